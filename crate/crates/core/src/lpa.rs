//! Elements of the Leavitt path algebra `L_K(E)` in normal form.
//!
//! Every element is a combination of monomials `μν*` with `r(μ) = r(ν)`.
//! The normal form forbids monomials where `μ` and `ν` both end in the
//! special edge `γ_v` (least out-edge id) of their common last source `v`;
//! such a monomial is rewritten with CK2:
//! `μ'γ(ν'γ)* = μ'ν'* − Σ_{e≠γ, s(e)=v} (μ'e)(ν'e)*`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::graph::{Digraph, EdgeId, FinPath, VertexId};

/// The monomial `μν*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    mu: FinPath,
    nu: FinPath,
}

impl Monomial {
    pub fn new(mu: FinPath, nu: FinPath) -> Result<Self> {
        if mu.dst() != nu.dst() {
            return Err(Error::Precondition("monomial needs r(μ) = r(ν)".into()));
        }
        Ok(Monomial { mu, nu })
    }

    pub fn vertex(v: VertexId) -> Self {
        Monomial { mu: FinPath::trivial(v), nu: FinPath::trivial(v) }
    }

    pub fn edge(g: &Digraph, e: EdgeId) -> Self {
        Monomial { mu: g.edge_path(e), nu: FinPath::trivial(g.dst(e)) }
    }

    pub fn ghost(g: &Digraph, e: EdgeId) -> Self {
        Monomial { mu: FinPath::trivial(g.dst(e)), nu: g.edge_path(e) }
    }

    pub fn mu(&self) -> &FinPath {
        &self.mu
    }

    pub fn nu(&self) -> &FinPath {
        &self.nu
    }

    /// `|μ| - |ν|`.
    pub fn degree(&self) -> i64 {
        self.mu.len() as i64 - self.nu.len() as i64
    }

    pub fn star(&self) -> Monomial {
        Monomial { mu: self.nu.clone(), nu: self.mu.clone() }
    }

    pub fn is_vertex(&self) -> bool {
        self.mu.is_trivial() && self.nu.is_trivial()
    }

    /// Text such as `e.f.~g`, `~f.~e` or a vertex name.
    pub fn show(&self, g: &Digraph) -> String {
        if self.is_vertex() {
            return g.vertex_name(self.mu.src()).to_string();
        }
        let mut parts: Vec<String> = g.edge_names_of(self.mu.edges());
        parts.extend(self.nu.edges().iter().rev().map(|e| format!("~{}", g.edge_name(*e))));
        parts.join(".")
    }

    /// Whether `μ` and `ν` both end in the special edge of one vertex.
    fn ck2_redex(&self, g: &Digraph) -> Option<EdgeId> {
        let a = self.mu.last_edge()?;
        let b = self.nu.last_edge()?;
        (a == b && g.special_edge(g.src(a)) == Some(a)).then_some(a)
    }
}

/// `(αβ*)(γδ*)` as a single monomial, or `None` for zero. No CK2 reduction.
pub fn mono_product(m1: &Monomial, m2: &Monomial) -> Option<Monomial> {
    if let Some(rest) = m2.mu.strip_prefix(&m1.nu) {
        let mu = m1.mu.concat(&rest)?;
        return Some(Monomial { mu, nu: m2.nu.clone() });
    }
    if let Some(rest) = m1.nu.strip_prefix(&m2.mu) {
        let nu = m2.nu.concat(&rest)?;
        return Some(Monomial { mu: m1.mu.clone(), nu });
    }
    None
}

/// Edge weights `a = (a_e)`, defaulting to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistParam {
    weights: BTreeMap<EdgeId, Scalar>,
}

impl TwistParam {
    pub fn trivial() -> Self {
        TwistParam { weights: BTreeMap::new() }
    }

    /// Builds a twist, rejecting zero weights and dropping weights equal to 1.
    pub fn new(field: &FieldSpec, weights: impl IntoIterator<Item = (EdgeId, Scalar)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (e, w) in weights {
            if !field.contains(&w) {
                return Err(Error::FieldMismatch(format!("twist weight {w} is not in {field}")));
            }
            if w.is_zero() {
                return Err(Error::Precondition("twist weights must be nonzero".into()));
            }
            if !field.is_one(&w) {
                out.insert(e, w);
            }
        }
        Ok(TwistParam { weights: out })
    }

    /// Parses `{"e": "2", "f": "1/3"}`; numbers are accepted as well as strings.
    pub fn from_json(g: &Digraph, field: &FieldSpec, value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("twist JSON must map edge ids to scalars".into()))?;
        let mut weights = Vec::new();
        for (name, v) in obj {
            let e = g.edge(name).ok_or_else(|| Error::Parse(format!("unknown edge `{name}` in twist")))?;
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return Err(Error::Parse(format!("twist weight for `{name}` must be a scalar"))),
            };
            weights.push((e, field.parse_scalar(&text)?));
        }
        Self::new(field, weights)
    }

    pub fn to_json(&self, g: &Digraph) -> Value {
        Value::Object(
            self.weights
                .iter()
                .map(|(e, w)| (g.edge_name(*e).to_string(), Value::String(w.to_string())))
                .collect(),
        )
    }

    pub fn is_trivial(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, field: &FieldSpec, e: EdgeId) -> Scalar {
        self.weights.get(&e).cloned().unwrap_or_else(|| field.one())
    }

    /// Pointwise product `ab`.
    pub fn product(&self, field: &FieldSpec, other: &TwistParam) -> TwistParam {
        let mut out = self.weights.clone();
        for (e, w) in &other.weights {
            let v = field.mul(&self.weight(field, *e), w);
            out.insert(*e, v);
        }
        out.retain(|_, w| !field.is_one(w));
        TwistParam { weights: out }
    }

    /// Pointwise inverse.
    pub fn inverse(&self, field: &FieldSpec) -> TwistParam {
        let weights = self
            .weights
            .iter()
            .map(|(e, w)| (*e, field.inv(w).expect("twist weights are nonzero")))
            .collect();
        TwistParam { weights }
    }

    /// Reinterprets the weights in `target`, which must contain them.
    pub fn embed(&self, target: &FieldSpec) -> TwistParam {
        let weights = self.weights.iter().map(|(e, w)| (*e, target.embed(w))).collect();
        TwistParam { weights }
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, &Scalar)> {
        self.weights.iter().map(|(e, w)| (*e, w))
    }
}

/// `a_q = a_{e_1} ⋯ a_{e_n}`; 1 on trivial paths.
pub fn path_weight(field: &FieldSpec, a: &TwistParam, q: &FinPath) -> Scalar {
    q.edges().iter().fold(field.one(), |acc, e| field.mul(&acc, &a.weight(field, *e)))
}

/// Whether `a_q = 1`.
pub fn q_stable(field: &FieldSpec, a: &TwistParam, q: &FinPath) -> bool {
    field.is_one(&path_weight(field, a, q))
}

/// A finite combination of normal-form monomials. Zero terms are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    terms: BTreeMap<Monomial, Scalar>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&Scalar> {
        self.terms.get(m)
    }

    /// Highest `|μ| + |ν|` over the terms.
    pub fn length(&self) -> usize {
        self.terms.keys().map(|m| m.mu.len() + m.nu.len()).max().unwrap_or(0)
    }
}

/// `L_K(E)` for a fixed graph and field; all element arithmetic goes through it.
#[derive(Clone, Debug)]
pub struct Algebra {
    graph: Arc<Digraph>,
    field: FieldSpec,
}

impl Algebra {
    pub fn new(graph: Arc<Digraph>, field: FieldSpec) -> Self {
        Algebra { graph, field }
    }

    pub fn graph(&self) -> &Arc<Digraph> {
        &self.graph
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// The same graph over another field.
    pub fn with_field(&self, field: FieldSpec) -> Algebra {
        Algebra { graph: self.graph.clone(), field }
    }

    fn insert(&self, terms: &mut BTreeMap<Monomial, Scalar>, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match terms.get_mut(&m) {
            Some(old) => {
                *old = self.field.add(old, &c);
                if old.is_zero() {
                    terms.remove(&m);
                }
            }
            None => {
                terms.insert(m, c);
            }
        }
    }

    /// Normal form of a raw combination of monomials.
    pub fn reduce_terms(&self, raw: impl IntoIterator<Item = (Monomial, Scalar)>) -> AlgebraElement {
        let g = &self.graph;
        let mut terms = BTreeMap::new();
        let mut work: Vec<(Monomial, Scalar)> = raw.into_iter().collect();
        while let Some((m, c)) = work.pop() {
            if c.is_zero() {
                continue;
            }
            let Some(gamma) = m.ck2_redex(g) else {
                self.insert(&mut terms, m, c);
                continue;
            };
            let v = g.src(gamma);
            let mu0 = m.mu.pop(g).expect("nonempty");
            let nu0 = m.nu.pop(g).expect("nonempty");
            let minus = self.field.neg(&c);
            for &e in g.out_edges(v) {
                if e == gamma {
                    continue;
                }
                let ep = g.edge_path(e);
                let mu = mu0.concat(&ep).expect("r(μ') = s(e)");
                let nu = nu0.concat(&ep).expect("r(ν') = s(e)");
                work.push((Monomial { mu, nu }, minus.clone()));
            }
            work.push((Monomial { mu: mu0, nu: nu0 }, c));
        }
        AlgebraElement { terms }
    }

    pub fn reduce(&self, x: &AlgebraElement) -> AlgebraElement {
        self.reduce_terms(x.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }

    pub fn monomial(&self, m: Monomial) -> AlgebraElement {
        self.reduce_terms([(m, self.field.one())])
    }

    pub fn scaled_monomial(&self, c: Scalar, m: Monomial) -> AlgebraElement {
        self.reduce_terms([(m, c)])
    }

    pub fn vertex(&self, v: VertexId) -> AlgebraElement {
        self.monomial(Monomial::vertex(v))
    }

    pub fn edge(&self, e: EdgeId) -> AlgebraElement {
        self.monomial(Monomial::edge(&self.graph, e))
    }

    pub fn ghost(&self, e: EdgeId) -> AlgebraElement {
        self.monomial(Monomial::ghost(&self.graph, e))
    }

    /// `μν*` as an element.
    pub fn path_monomial(&self, mu: &FinPath, nu: &FinPath) -> Result<AlgebraElement> {
        Ok(self.monomial(Monomial::new(mu.clone(), nu.clone())?))
    }

    /// `1 = Σ_v v`.
    pub fn one(&self) -> AlgebraElement {
        self.reduce_terms(self.graph.vertices().map(|v| (Monomial::vertex(v), self.field.one())))
    }

    pub fn scalar(&self, c: Scalar) -> AlgebraElement {
        self.scale(&c, &self.one())
    }

    /// The generators `v`, `e`, `e*` with their printed names.
    pub fn generators(&self) -> Vec<(String, AlgebraElement)> {
        let g = &self.graph;
        let mut out: Vec<_> = g.vertices().map(|v| (g.vertex_name(v).to_string(), self.vertex(v))).collect();
        for e in g.edges() {
            out.push((g.edge_name(e).to_string(), self.edge(e)));
            out.push((format!("~{}", g.edge_name(e)), self.ghost(e)));
        }
        out
    }

    pub fn add(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut terms = x.terms.clone();
        for (m, c) in &y.terms {
            self.insert(&mut terms, m.clone(), c.clone());
        }
        AlgebraElement { terms }
    }

    pub fn neg(&self, x: &AlgebraElement) -> AlgebraElement {
        let terms = x.terms.iter().map(|(m, c)| (m.clone(), self.field.neg(c))).collect();
        AlgebraElement { terms }
    }

    pub fn sub(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, c: &Scalar, x: &AlgebraElement) -> AlgebraElement {
        if c.is_zero() {
            return AlgebraElement::zero();
        }
        let terms = x.terms.iter().map(|(m, d)| (m.clone(), self.field.mul(c, d))).collect();
        AlgebraElement { terms }
    }

    /// `m1 · m2` in normal form.
    pub fn mono_mul(&self, m1: &Monomial, m2: &Monomial) -> AlgebraElement {
        match mono_product(m1, m2) {
            Some(m) => self.monomial(m),
            None => AlgebraElement::zero(),
        }
    }

    pub fn mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut raw = Vec::new();
        for (m1, c1) in &x.terms {
            for (m2, c2) in &y.terms {
                if let Some(m) = mono_product(m1, m2) {
                    raw.push((m, self.field.mul(c1, c2)));
                }
            }
        }
        self.reduce_terms(raw)
    }

    /// The involution `μν* ↦ νμ*`.
    pub fn star(&self, x: &AlgebraElement) -> AlgebraElement {
        let terms = x.terms.iter().map(|(m, c)| (m.star(), c.clone())).collect();
        AlgebraElement { terms }
    }

    /// `σ_a`: `μν* ↦ a_μ a_ν^{-1} μν*`.
    pub fn sigma_twist(&self, a: &TwistParam, x: &AlgebraElement) -> AlgebraElement {
        let f = &self.field;
        let terms = x
            .terms
            .iter()
            .map(|(m, c)| {
                let w = f
                    .div(&path_weight(f, a, &m.mu), &path_weight(f, a, &m.nu))
                    .expect("twist weights are nonzero");
                (m.clone(), f.mul(c, &w))
            })
            .collect();
        AlgebraElement { terms }
    }

    /// Homogeneous component of degree `k`.
    pub fn component(&self, x: &AlgebraElement, k: i64) -> AlgebraElement {
        let terms = x.terms.iter().filter(|(m, _)| m.degree() == k).map(|(m, c)| (m.clone(), c.clone())).collect();
        AlgebraElement { terms }
    }

    /// Coefficients moved into a larger field (e.g. `K ⊂ K[t]/(f)`).
    pub fn embed_into(&self, target: &Algebra, x: &AlgebraElement) -> AlgebraElement {
        let terms = x.terms.iter().map(|(m, c)| (m.clone(), target.field.embed(c))).collect();
        AlgebraElement { terms }
    }

    /// Canonical text: terms in `(|μ|, μ, |ν|, ν)` order, `0` for zero.
    pub fn show(&self, x: &AlgebraElement) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in x.terms.iter().enumerate() {
            let negative = c.is_negative_rational();
            let c = if negative { self.field.neg(c) } else { c.clone() };
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if !self.field.is_one(&c) {
                if needs_parens(&c) {
                    out.push_str(&format!("({c})*"));
                } else {
                    out.push_str(&format!("{c}*"));
                }
            }
            out.push_str(&m.show(&self.graph));
        }
        out
    }

    /// Parses element syntax such as `2*e1.e2*~e3 + 1/3*v2 - (t+1)*~e`.
    ///
    /// Factors are joined by `*` or `.`; `~e` is the ghost edge `e*`; a
    /// vertex name is the trivial path; scalars are integers, fractions, or
    /// parenthesized polynomials in `t` for quotient fields. A parenthesized
    /// group that is not a scalar is parsed as a sub-expression.
    pub fn parse(&self, text: &str) -> Result<AlgebraElement> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        let mut acc = AlgebraElement::zero();
        for (negative, term) in split_terms(text)? {
            let mut t = self.parse_term(term)?;
            if negative {
                t = self.neg(&t);
            }
            acc = self.add(&acc, &t);
        }
        Ok(acc)
    }

    fn parse_term(&self, term: &str) -> Result<AlgebraElement> {
        let g = &self.graph;
        let mut coeff = self.field.one();
        let mut elem: Option<AlgebraElement> = None;
        for factor in split_factors(term)? {
            let atom = if let Some(inner) = factor.strip_prefix('(') {
                let inner = inner
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in `{factor}`")))?;
                match self.field.parse_scalar(inner) {
                    Ok(c) => {
                        coeff = self.field.mul(&coeff, &c);
                        continue;
                    }
                    Err(_) => self.parse(inner)?,
                }
            } else if factor.starts_with(|c: char| c.is_ascii_digit()) {
                coeff = self.field.mul(&coeff, &self.field.parse_scalar(factor)?);
                continue;
            } else if let Some(name) = factor.strip_prefix('~') {
                if let Some(e) = g.edge(name) {
                    self.ghost(e)
                } else if let Some(v) = g.vertex(name) {
                    self.vertex(v)
                } else {
                    return Err(Error::Parse(format!("unknown edge `{name}`")));
                }
            } else if let Some(e) = g.edge(factor) {
                self.edge(e)
            } else if let Some(v) = g.vertex(factor) {
                self.vertex(v)
            } else {
                return Err(Error::Parse(format!("unknown symbol `{factor}`")));
            };
            elem = Some(match elem {
                None => atom,
                Some(prev) => self.mul(&prev, &atom),
            });
        }
        let elem = elem.unwrap_or_else(|| self.one());
        Ok(self.scale(&coeff, &elem))
    }
}

/// Extension scalars other than constants print as `(...)`.
fn needs_parens(c: &Scalar) -> bool {
    matches!(c, Scalar::Ext(p) if p.degree().unwrap_or(0) > 0)
}

/// Splits at top-level `+`/`-`, returning `(negated, term)` pairs.
pub(crate) fn split_terms(text: &str) -> Result<Vec<(bool, &str)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut negative = false;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced parentheses in `{text}`")));
                }
            }
            '+' | '-' if depth == 0 => {
                let piece = text[start..i].trim();
                if piece.is_empty() {
                    if !out.is_empty() || start != 0 {
                        return Err(Error::Parse(format!("missing term in `{text}`")));
                    }
                } else {
                    out.push((negative, piece));
                }
                negative = ch == '-';
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in `{text}`")));
    }
    let piece = text[start..].trim();
    if piece.is_empty() {
        return Err(Error::Parse(format!("missing term in `{text}`")));
    }
    out.push((negative, piece));
    Ok(out)
}

/// Splits a term at top-level `*` and `.`.
pub(crate) fn split_factors(term: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in term.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' | '.' if depth == 0 => {
                out.push(term[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(term[start..].trim());
    if out.iter().any(|f| f.is_empty()) {
        return Err(Error::Parse(format!("empty factor in `{term}`")));
    }
    Ok(out)
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.mu.edges(), self.nu.edges())
    }
}
