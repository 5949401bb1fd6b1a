//! Modules with a basis indexed by the points of one tail-equivalence class.
//!
//! Both Chen-type modules and induced modules over the graph groupoid have
//! this shape: a monomial `μν*` sends a basis vector to a scalar multiple
//! of another basis vector or to zero. [`PointModule`] captures that, and
//! everything else (linear action, restriction, equivariance checks) is
//! written once on top of it.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::boundary::{orbit_points, BoundaryPoint, ClassElement};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::graph::{Digraph, FinPath};
use crate::linalg::{min_poly, solve_columns, Matrix};
use crate::lpa::{Algebra, AlgebraElement, Monomial};

/// A finitely supported combination of class elements with coefficients in
/// the module's coefficient field.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PointVector {
    terms: BTreeMap<ClassElement, Scalar>,
}

impl PointVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(y: ClassElement, c: Scalar) -> Self {
        let mut out = Self::zero();
        if !c.is_zero() {
            out.terms.insert(y, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ClassElement, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, y: &ClassElement) -> Option<&Scalar> {
        self.terms.get(y)
    }

    pub fn add_term(&mut self, k: &FieldSpec, y: ClassElement, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&y) {
            Some(old) => {
                *old = k.add(old, &c);
                if old.is_zero() {
                    self.terms.remove(&y);
                }
            }
            None => {
                self.terms.insert(y, c);
            }
        }
    }

    pub fn add(&self, k: &FieldSpec, other: &PointVector) -> PointVector {
        let mut out = self.clone();
        for (y, c) in &other.terms {
            out.add_term(k, y.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &FieldSpec, c: &Scalar) -> PointVector {
        if c.is_zero() {
            return Self::zero();
        }
        PointVector { terms: self.terms.iter().map(|(y, d)| (y.clone(), k.mul(c, d))).collect() }
    }

    pub fn sub(&self, k: &FieldSpec, other: &PointVector) -> PointVector {
        self.add(k, &other.scale(k, &k.neg(&k.one())))
    }

    /// Longest prefix among the supporting points.
    pub fn depth(&self) -> usize {
        self.terms.keys().map(|y| y.prefix().len()).max().unwrap_or(0)
    }

    /// Text such as `2*f.x + (t+1)*e.x>1`; `x` is the base point, `>k` a shift.
    pub fn show(&self, g: &Digraph) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (y, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative_rational();
            let shown = if negative { c.to_string()[1..].to_string() } else { c.to_string() };
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if shown != "1" {
                if matches!(c, Scalar::Ext(p) if p.degree().unwrap_or(0) > 0) {
                    out.push_str(&format!("({shown})*"));
                } else {
                    out.push_str(&format!("{shown}*"));
                }
            }
            out.push_str(&y.show(g));
        }
        out
    }

    pub fn to_json(&self, g: &Digraph) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(y, c)| {
                    json!({
                        "prefix": g.edge_names_of(y.prefix().edges()),
                        "shift": y.shift(),
                        "coeff": c.to_string(),
                    })
                })
                .collect(),
        )
    }
}

/// Parses the text form printed by [`PointVector::show`] over `base`.
pub fn parse_point_vector(g: &Digraph, k: &FieldSpec, base: &Arc<BoundaryPoint>, text: &str) -> Result<PointVector> {
    let mut out = PointVector::zero();
    let text = text.trim();
    if text == "0" {
        return Ok(out);
    }
    for (negative, term) in crate::lpa::split_terms(text)? {
        let factors = crate::lpa::split_factors(term)?;
        let (last, rest) = factors.split_last().expect("at least one factor");
        let shift = match last.strip_prefix('x') {
            Some("") => 0,
            Some(s) => s
                .strip_prefix('>')
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or_else(|| Error::Parse(format!("bad base marker `{last}`")))?,
            None => return Err(Error::Parse(format!("term `{term}` must end with the base marker `x`"))),
        };
        let mut coeff = k.one();
        let mut edges = Vec::new();
        for f in rest {
            if let Some(inner) = f.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
                coeff = k.mul(&coeff, &k.parse_scalar(inner)?);
            } else if f.starts_with(|c: char| c.is_ascii_digit()) {
                coeff = k.mul(&coeff, &k.parse_scalar(f)?);
            } else {
                edges.push(g.edge(f).ok_or_else(|| Error::Parse(format!("unknown edge `{f}`")))?);
            }
        }
        let start = base.source_after(g, shift);
        let prefix = if edges.is_empty() { FinPath::trivial(start) } else { g.path(&edges)? };
        let y = ClassElement::new(g, base.clone(), prefix, shift)?;
        if negative {
            coeff = k.neg(&coeff);
        }
        out.add_term(k, y, coeff);
    }
    Ok(out)
}

/// A module over `L_K(E)` with basis `[x] × (K-basis of K')`, where
/// monomials act by weighted partial permutations of `[x]`.
pub trait PointModule: Send + Sync {
    /// Short description used in reports.
    fn label(&self) -> String;
    /// The acting algebra, over `K`.
    fn algebra(&self) -> &Algebra;
    /// Coefficient field `K'` of the point vectors; `K` itself or an extension.
    fn coeff_field(&self) -> &FieldSpec;
    /// Base point `x` of the class.
    fn base(&self) -> &Arc<BoundaryPoint>;
    /// `μν* · y = c · y'`, or `None` when the monomial kills `y`.
    fn act_monomial(&self, m: &Monomial, y: &ClassElement) -> Option<(ClassElement, Scalar)>;

    fn graph(&self) -> &Arc<Digraph> {
        self.algebra().graph()
    }

    /// `z · v` for `z` with coefficients in `K`.
    fn act(&self, z: &AlgebraElement, v: &PointVector) -> PointVector {
        let kp = self.coeff_field();
        let mut out = PointVector::zero();
        for (m, c) in z.terms() {
            let c = kp.embed(c);
            for (y, d) in v.terms() {
                if let Some((y2, w)) = self.act_monomial(m, y) {
                    out.add_term(kp, y2, kp.mul(&kp.mul(&c, d), &w));
                }
            }
        }
        out
    }

    /// The base point as a vector.
    fn generator(&self) -> PointVector {
        let g = self.graph();
        PointVector::basis(ClassElement::base_point(g, self.base().clone()), self.coeff_field().one())
    }

    /// `K`-basis vectors supported on class elements with prefix length at most `depth`.
    fn basis(&self, depth: usize) -> Vec<PointVector> {
        let kp = self.coeff_field();
        let orbit = orbit_points(self.graph(), self.base(), depth);
        let mut out = Vec::new();
        for y in orbit.points {
            for b in kp.base_basis() {
                out.push(PointVector::basis(y.clone(), b));
            }
        }
        out
    }
}

/// `Res_x(W)` at finite depth: the surviving basis and the isotropy action.
#[derive(Clone, Debug)]
pub struct Restriction {
    /// `K`-basis of the restriction.
    pub basis: Vec<PointVector>,
    /// Matrix of the isotropy generator in that basis (column `j` is the
    /// image of basis vector `j`), when `x` has nontrivial isotropy.
    pub generator_matrix: Option<Matrix>,
    /// The algebra element used as the isotropy generator.
    pub generator_element: Option<AlgebraElement>,
    /// Length of the prefixes of `x` used for the projections.
    pub window: usize,
}

impl Restriction {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Minimal polynomial of the generator over the ground field.
    pub fn generator_min_poly(&self, k: &FieldSpec) -> Option<crate::field::Poly> {
        let m = self.generator_matrix.as_ref()?;
        (!m.is_empty()).then(|| min_poly(k, m))
    }

    pub fn to_json(&self, g: &Digraph, k: &FieldSpec) -> Value {
        json!({
            "dim": self.dim(),
            "window": self.window,
            "basis": self.basis.iter().map(|b| b.show(g)).collect::<Vec<_>>(),
            "generator": self.generator_element.as_ref().map(|z| Algebra::new(Arc::new(g.clone()), k.clone()).show(z)),
            "generator_matrix": self.generator_matrix.as_ref().map(|m| {
                m.iter().map(|row| row.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()
            }),
            "generator_min_poly": self.generator_min_poly(k).map(|p| p.to_string()),
        })
    }
}

/// Algebra element acting as the isotropy generator `(x, n, x)` at a
/// rational point `x = β c^∞`: the monomial `(βc)β*`.
pub fn isotropy_generator(alg: &Algebra, x: &BoundaryPoint) -> Option<AlgebraElement> {
    let BoundaryPoint::Rational { prefix, cycle } = x else {
        return None;
    };
    let mu = prefix.concat(cycle).expect("cycle starts at r(prefix)");
    Some(alg.path_monomial(&mu, prefix).expect("r(βc) = r(β)"))
}

/// Computes `Res_x(W) = ∩_U 1_U W` with `U = Z_{(μ,μ)}` for the prefixes
/// `μ` of `x`, applying the projections `μμ*` to the orbit basis of `W`
/// up to `depth`.
///
/// The prefix window is long enough that a class element with prefix at
/// most `depth` survives only if it equals `x` (for sink and rational `x`
/// and bases); for irrational points the answer holds up to the window.
pub fn restrict(w: &dyn PointModule, x: &BoundaryPoint, depth: usize) -> Restriction {
    let g = w.graph();
    let alg = w.algebra();
    let k = alg.field();
    let kp = w.coeff_field();
    let shape_len = |p: &BoundaryPoint| match p {
        BoundaryPoint::Sink(q) => q.len(),
        BoundaryPoint::Rational { prefix, cycle } => prefix.len() + cycle.len(),
        BoundaryPoint::Irrational { .. } => depth + 1,
    };
    let window = match x.finite_len() {
        Some(len) => len,
        None => depth + shape_len(x) + shape_len(w.base()) + 1,
    };
    let mu = x.prefix_path(g, window);
    let projector = alg.path_monomial(&mu, &mu).expect("r(μ) = r(μ)");

    let mut survivors = Vec::new();
    for b in w.basis(depth) {
        if w.act(&projector, &b) == b {
            survivors.push(b);
        }
    }

    let generator_element = isotropy_generator(alg, x);
    let generator_matrix = generator_element.as_ref().map(|z| {
        // coordinates of z·b_j in the survivor basis, via K-coordinates of
        // the coefficient at each point
        let coords = |v: &PointVector| -> Vec<Scalar> {
            let mut out = Vec::new();
            for b in &survivors {
                let (y, _) = b.terms().next().expect("basis vectors are nonzero");
                let here = v.coefficient(y).cloned().unwrap_or_else(|| kp.zero());
                out.push(here);
            }
            out
        };
        let columns: Vec<Vec<Scalar>> = survivors
            .iter()
            .map(|b| {
                let image = w.act(z, b);
                let raw = coords(&image);
                expand_coordinates(k, kp, &survivors, &raw)
            })
            .collect();
        // transpose to row-major
        let n = survivors.len();
        (0..n).map(|i| (0..n).map(|j| columns[j][i].clone()).collect()).collect()
    });
    Restriction { basis: survivors, generator_matrix, generator_element, window }
}

/// Writes a vector given by its `K'` coefficient at each survivor's point
/// in `K`-coordinates relative to the survivor basis (points repeat once
/// per `K`-basis element of `K'`).
fn expand_coordinates(k: &FieldSpec, kp: &FieldSpec, survivors: &[PointVector], raw: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![k.zero(); survivors.len()];
    let mut i = 0;
    while i < survivors.len() {
        let (y, _) = survivors[i].terms().next().expect("nonzero");
        let group: Vec<usize> =
            (i..survivors.len()).take_while(|&j| survivors[j].terms().next().expect("nonzero").0 == y).collect();
        let columns: Vec<Vec<Scalar>> = group
            .iter()
            .map(|&j| kp.base_coords(survivors[j].terms().next().expect("nonzero").1))
            .collect();
        let target = kp.base_coords(&raw[i]);
        let x = solve_columns(k, &columns, &target).expect("survivors span the coefficient field");
        for (slot, &j) in group.iter().enumerate() {
            out[j] = x[slot].clone();
        }
        i += group.len();
    }
    out
}
