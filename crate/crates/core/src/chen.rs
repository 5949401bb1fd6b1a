//! Chen modules, their twisted and polynomial-quotient variants, and the
//! explicit isomorphisms with induced modules.
//!
//! `V^a_{[x],K'}` has basis the tail-equivalence class `[x]`; a monomial
//! acts by `(μν*)·p = a_μ a_ν^{-1} μp'` when `p = νp'` and by zero otherwise.
//! The acting algebra is always over the ground field `K`; when `K' ⊋ K`
//! this is the restriction of scalars `V^a_{[x],K'}|_K`.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::boundary::{BoundaryPoint, ClassElement};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Laurent, Poly, Scalar};
use crate::graph::{Digraph, FinPath};
use crate::groupoid::{GroupoidElt, InducedModule};
use crate::linalg::solve_columns;
use crate::lpa::{path_weight, Algebra, AlgebraElement, Monomial, TwistParam};
use crate::module::{isotropy_generator, PointModule, PointVector};

/// `V^a_{[x],K'}|_K`.
pub struct ChenModule {
    alg: Algebra,
    field: FieldSpec,
    base: Arc<BoundaryPoint>,
    twist: TwistParam,
    label: String,
}

impl ChenModule {
    /// The untwisted Chen module `V_{[x],K}`.
    pub fn new(alg: Algebra, base: Arc<BoundaryPoint>) -> Self {
        let field = alg.field().clone();
        Self::build(alg, field, base, TwistParam::trivial(), "chen")
    }

    /// `V^a_{[x],K}` with `a` over `K`.
    pub fn twisted(alg: Algebra, base: Arc<BoundaryPoint>, twist: TwistParam) -> Self {
        let field = alg.field().clone();
        Self::build(alg, field, base, twist, "twisted chen")
    }

    /// `V^a_{[x],K'}|_K` for an extension `K' ⊇ K` and `a` over `K'`.
    pub fn over_extension(alg: Algebra, field: FieldSpec, base: Arc<BoundaryPoint>, twist: TwistParam) -> Result<Self> {
        if &field != alg.field() && field.base_field() != alg.field() {
            return Err(Error::FieldMismatch(format!("{field} does not extend {}", alg.field())));
        }
        Ok(Self::build(alg, field, base, twist, "twisted chen over extension"))
    }

    /// `V^f_{[c^∞],K} = V^{t̄}_{[c^∞],K'}|_K` with `K' = K[t]/(f)`, for the
    /// rational base `x ~ c^∞`. The edge weights are powers of `t̄` chosen so
    /// that `a_c = t̄`.
    pub fn akr(alg: Algebra, base: Arc<BoundaryPoint>, f: Poly) -> Result<Self> {
        let BoundaryPoint::Rational { cycle, .. } = base.as_ref() else {
            return Err(Error::Precondition("polynomial-quotient modules need a rational base".into()));
        };
        let field = FieldSpec::quotient(alg.field().clone(), f)?;
        let tbar = field.generator().expect("quotient field");
        let twist = weights_with_product(alg.graph(), &field, cycle, &tbar)?;
        Ok(Self::build(alg, field, base, twist, "polynomial quotient"))
    }

    fn build(alg: Algebra, field: FieldSpec, base: Arc<BoundaryPoint>, twist: TwistParam, kind: &str) -> Self {
        let label = format!("{kind} module on [{}] over {field}", base.show(alg.graph()));
        ChenModule { alg, field, base, twist, label }
    }

    pub fn twist(&self) -> &TwistParam {
        &self.twist
    }

    /// `a_μ a_ν^{-1}` for `y = μ σ^s(x)` written as `μ x'`, `x = ν x'`.
    pub fn lift_weight(&self, y: &ClassElement) -> Scalar {
        let g = self.alg.graph();
        let k = &self.field;
        let nu = self.base.prefix_path(g, y.shift());
        k.div(&path_weight(k, &self.twist, y.prefix()), &path_weight(k, &self.twist, &nu))
            .expect("twist weights are nonzero")
    }

    pub fn describe(&self) -> Value {
        let g = self.alg.graph();
        json!({
            "label": self.label,
            "base": crate::boundary::point_to_json(g, &self.base),
            "coeff_field": self.field.to_string(),
            "restricted_to": self.alg.field().to_string(),
            "twist": self.twist.to_json(g),
        })
    }
}

impl PointModule for ChenModule {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn algebra(&self) -> &Algebra {
        &self.alg
    }

    fn coeff_field(&self) -> &FieldSpec {
        &self.field
    }

    fn base(&self) -> &Arc<BoundaryPoint> {
        &self.base
    }

    fn act_monomial(&self, m: &Monomial, y: &ClassElement) -> Option<(ClassElement, Scalar)> {
        let g = self.alg.graph();
        let image = y.apply_monomial(g, m.mu(), m.nu())?;
        let k = &self.field;
        let w = k
            .div(&path_weight(k, &self.twist, m.mu()), &path_weight(k, &self.twist, m.nu()))
            .expect("twist weights are nonzero");
        Some((image, w))
    }
}

/// Edge weights, powers of `b`, whose product along `c` is `b`.
///
/// Uses a Bezout combination of the edge multiplicities in `c`; fails when
/// those multiplicities share a factor.
pub fn weights_with_product(g: &Digraph, k: &FieldSpec, c: &FinPath, b: &Scalar) -> Result<TwistParam> {
    let mut counts: Vec<(crate::graph::EdgeId, i64)> = Vec::new();
    for e in c.edges() {
        match counts.iter_mut().find(|(d, _)| d == e) {
            Some((_, n)) => *n += 1,
            None => counts.push((*e, 1)),
        }
    }
    let mut gcd = 0i64;
    let mut coeffs: Vec<i64> = Vec::new();
    for (i, &(_, m)) in counts.iter().enumerate() {
        if i == 0 {
            gcd = m;
            coeffs.push(1);
            continue;
        }
        let (d, u, v) = ext_gcd(gcd, m);
        for c in coeffs.iter_mut() {
            *c *= u;
        }
        coeffs.push(v);
        gcd = d;
    }
    if gcd != 1 {
        return Err(Error::IncompatibleCoefficients(format!(
            "edge multiplicities along {} share the factor {gcd}",
            g.show_path(c)
        )));
    }
    let weights = counts
        .iter()
        .zip(coeffs)
        .map(|(&(e, _), u)| Ok((e, k.pow(b, u)?)))
        .collect::<Result<Vec<_>>>()?;
    TwistParam::new(k, weights)
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (d, x, y) = ext_gcd(b, a % b);
        (d, y, x - (a / b) * y)
    }
}

fn require_same_class(ind: &dyn PointModule, chen: &dyn PointModule) -> Result<()> {
    if ind.base() != chen.base() {
        return Err(Error::BaseMismatch);
    }
    if ind.coeff_field() != chen.coeff_field() {
        return Err(Error::FieldMismatch(format!(
            "{} vs {}",
            ind.coeff_field(),
            chen.coeff_field()
        )));
    }
    Ok(())
}

/// `φ((y,l,x)) = a_μ a_ν^{-1} y`: `Ind_x(K) → V^a_{[x],K}` for a point with
/// trivial isotropy.
pub fn phi_triv(ind: &InducedModule, chen: &ChenModule, v: &PointVector) -> Result<PointVector> {
    require_trivial(chen)?;
    require_same_class(ind, chen)?;
    Ok(reweight(chen, v, false))
}

/// `ψ(y) = a_μ^{-1} a_ν (y,l,x)`, the inverse of [`phi_triv`].
pub fn psi_triv(ind: &InducedModule, chen: &ChenModule, v: &PointVector) -> Result<PointVector> {
    require_trivial(chen)?;
    require_same_class(ind, chen)?;
    Ok(reweight(chen, v, true))
}

/// [`phi_triv`] on a single arrow of `L_x`.
pub fn phi_triv_arrow(chen: &ChenModule, t: &GroupoidElt) -> Result<PointVector> {
    require_trivial(chen)?;
    if t.k != t.src.degree().value || !t.dst.is_base() {
        return Err(Error::UnrealizableDegree { k: t.k });
    }
    Ok(PointVector::basis(t.src.clone(), chen.lift_weight(&t.src)))
}

fn require_trivial(chen: &ChenModule) -> Result<()> {
    if matches!(chen.base.as_ref(), BoundaryPoint::Rational { .. }) {
        return Err(Error::WrongIsomorphism("rational base points need the twisted isomorphism".into()));
    }
    Ok(())
}

fn reweight(chen: &ChenModule, v: &PointVector, inverse: bool) -> PointVector {
    let k = &chen.field;
    let mut out = PointVector::zero();
    for (y, c) in v.terms() {
        let w = chen.lift_weight(y);
        let w = if inverse { k.inv(&w).expect("nonzero") } else { w };
        out.add_term(k, y.clone(), k.mul(c, &w));
    }
    out
}

/// `a_c` for the cycle of a rational base.
pub fn twist_invariant(chen: &ChenModule) -> Result<Scalar> {
    match chen.base.as_ref() {
        BoundaryPoint::Rational { cycle, .. } => Ok(path_weight(&chen.field, &chen.twist, cycle)),
        _ => Err(Error::Precondition("the twist invariant needs a rational base".into())),
    }
}

fn require_twist_match(ind: &InducedModule, chen: &ChenModule) -> Result<()> {
    require_same_class(ind, chen)?;
    let a_c = twist_invariant(chen)?;
    let a = ind
        .coeff()
        .generator_scalar()
        .ok_or_else(|| Error::WrongIsomorphism("coefficients over the trivial group".into()))?;
    if *a != a_c {
        return Err(Error::TwistMismatch(format!("module acts by {a} but a_c = {a_c}")));
    }
    Ok(())
}

/// `φ((y,m,c^∞) ⊗ k') = a_μ a_ν^{-1} k' y`: `Ind_{c^∞}(K'^{(a)}) → V^a_{[c^∞],K'}`
/// when `a = a_c`.
pub fn phi_twist(ind: &InducedModule, chen: &ChenModule, v: &PointVector) -> Result<PointVector> {
    require_twist_match(ind, chen)?;
    Ok(reweight(chen, v, false))
}

/// `ψ(y) = (y, |μ|-|ν|, c^∞) ⊗ a_μ^{-1} a_ν`, the inverse of [`phi_twist`].
pub fn psi_twist(ind: &InducedModule, chen: &ChenModule, v: &PointVector) -> Result<PointVector> {
    require_twist_match(ind, chen)?;
    Ok(reweight(chen, v, true))
}

/// [`phi_twist`] on `t ⊗ k'` for an arbitrary arrow `t = (y, m, x) ∈ L_x`,
/// using paths `μ, ν` with `y = μx'`, `x = νx'`, `|μ| - |ν| = m` directly
/// rather than first normalizing `t`.
pub fn phi_twist_arrow(ind: &InducedModule, chen: &ChenModule, t: &GroupoidElt, kp: &Scalar) -> Result<PointVector> {
    require_twist_match(ind, chen)?;
    let g = chen.alg.graph();
    let k = &chen.field;
    let Some((rho, n)) = chen.base.rational_shape() else {
        unreachable!("twist invariant exists only for rational bases");
    };
    if !t.dst.is_base() {
        return Err(Error::Precondition("arrow must start at the base point".into()));
    }
    let y = &t.src;
    let s = y.shift();
    let surplus = t.k - y.degree().value;
    if surplus % n as i64 != 0 {
        return Err(Error::UnrealizableDegree { k: t.k });
    }
    let l = surplus / n as i64;
    let j = rho.max(s) + if l < 0 { (-l) as usize * n } else { 0 };
    let j2 = (j as i64 + l * n as i64) as usize;
    let x_edges = chen.base.expand(j.max(j2));
    let nu = chen.base.prefix_path(g, j);
    let mut mu_edges = y.prefix().edges().to_vec();
    mu_edges.extend_from_slice(&x_edges[s..j2]);
    let mu = if mu_edges.is_empty() { y.prefix().clone() } else { g.path(&mu_edges)? };
    debug_assert_eq!(mu.len() as i64 - nu.len() as i64, t.k);
    let w = k.div(&path_weight(k, &chen.twist, &mu), &path_weight(k, &chen.twist, &nu))?;
    Ok(PointVector::basis(y.clone(), k.mul(&w, kp)))
}

/// `θ(g) = g(a)` on Laurent polynomials.
pub fn theta(k: &FieldSpec, g: &Laurent, a: &Scalar) -> Result<Scalar> {
    if a.is_zero() {
        return Err(Error::DivisionByZero);
    }
    k.eval(g, a)
}

/// The isomorphism `V^a → V^b` between twisted Chen modules on one rational
/// class with `a_c = b_c`, built as `φ_b ∘ ψ_a` through the common induced
/// module `Ind_{c^∞}(K'^{(a_c)})`.
pub fn twist_iso<'a>(from: &'a ChenModule, to: &'a ChenModule) -> Result<impl Fn(&PointVector) -> Result<PointVector> + 'a> {
    require_same_class(from, to)?;
    let a = twist_invariant(from)?;
    let b = twist_invariant(to)?;
    if a != b {
        return Err(Error::TwistMismatch(format!("a_c = {a} but b_c = {b}")));
    }
    let line = Arc::new(crate::groupoid::TwistedLine::new(from.field.clone(), a)?);
    let ind = InducedModule::new(from.alg.clone(), from.base.clone(), line)?;
    Ok(move |v: &PointVector| {
        let mid = psi_twist(&ind, from, v)?;
        phi_twist(&ind, to, &mid)
    })
}

/// Applies a field map coefficientwise.
pub fn map_coefficients(v: &PointVector, target: &FieldSpec, f: impl Fn(&Scalar) -> Scalar) -> PointVector {
    let mut out = PointVector::zero();
    for (y, c) in v.terms() {
        out.add_term(target, y.clone(), f(c));
    }
    out
}

/// Outcome of an equivariance check.
#[derive(Clone, Debug, PartialEq)]
pub enum HomVerdict {
    Equivariant { depth: usize, checks: usize },
    Counterexample { generator: String, basis_vector: String, lhs: String, rhs: String },
}

impl HomVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, HomVerdict::Equivariant { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            HomVerdict::Equivariant { depth, checks } => {
                json!({ "verdict": "equivariant", "depth": depth, "checks": checks })
            }
            HomVerdict::Counterexample { generator, basis_vector, lhs, rhs } => json!({
                "verdict": "counterexample",
                "generator": generator,
                "basis_vector": basis_vector,
                "map_of_product": lhs,
                "product_of_map": rhs,
            }),
        }
    }
}

/// Checks `map(z·b) = z·map(b)` for the generators `z ∈ {v, e, e*}` and all
/// basis vectors `b` of `src` up to `depth`.
pub fn hom_check(
    src: &dyn PointModule,
    dst: &dyn PointModule,
    map: &dyn Fn(&PointVector) -> Result<PointVector>,
    depth: usize,
) -> Result<HomVerdict> {
    let g = src.graph();
    let gens = src.algebra().generators();
    let mut checks = 0;
    for b in src.basis(depth) {
        let image = map(&b)?;
        for (name, z) in &gens {
            let lhs = map(&src.act(z, &b))?;
            let rhs = dst.act(z, &image);
            checks += 1;
            if lhs != rhs {
                return Ok(HomVerdict::Counterexample {
                    generator: name.clone(),
                    basis_vector: b.show(g),
                    lhs: lhs.show(g),
                    rhs: rhs.show(g),
                });
            }
        }
    }
    Ok(HomVerdict::Equivariant { depth, checks })
}

/// An algebra element carrying a module element to the base point.
#[derive(Clone, Debug)]
pub struct Witness {
    pub element: AlgebraElement,
    /// `|μ| + |ν|` of the monomial found by the search.
    pub search_degree: usize,
    pub monomial: Monomial,
}

/// Searches for `w` with `w·m = x`, the base point.
///
/// Monomials `μν*` are tried by increasing `|μ| + |ν|` and then in
/// `(|μ|, μ, |ν|, ν)` order until one sends `m` to a single point `y`; a
/// second monomial then moves `y` to `x`, and the remaining scalar in `K'`
/// is cancelled by a polynomial in the isotropy generator. `Ok(None)` means
/// no witness up to `max_degree`; it is not a proof that none exists.
pub fn generator_witness(module: &dyn PointModule, m: &PointVector, max_degree: usize) -> Result<Option<Witness>> {
    if m.is_zero() {
        return Err(Error::Precondition("witness search needs a nonzero element".into()));
    }
    let alg = module.algebra();
    let g = alg.graph();
    let x = module.base();
    let target = module.generator();
    let mut by_len: Vec<Vec<FinPath>> = Vec::new();
    for len in 0..=max_degree {
        let mut paths = Vec::new();
        for v in g.vertices() {
            paths.extend(g.paths_starting_at(v, len));
        }
        paths.sort();
        by_len.push(paths);
    }
    let scalar_fix = ScalarFix::new(module);
    for total in 0..=max_degree {
        for a in 0..=total {
            for mu in &by_len[a] {
                for nu in &by_len[total - a] {
                    if mu.dst() != nu.dst() {
                        continue;
                    }
                    let mono = Monomial::new(mu.clone(), nu.clone()).expect("same range");
                    let probe = alg.monomial(mono.clone());
                    let r = module.act(&probe, m);
                    if r.len() != 1 {
                        continue;
                    }
                    let (y, _) = r.terms().next().expect("one term");
                    let to_base = x.prefix_path(g, y.shift());
                    let mover = alg.path_monomial(&to_base, y.prefix())?;
                    let moved = module.act(&mover, &r);
                    let (_, c) = moved.terms().next().expect("moving is invertible on points");
                    let Some(fix) = scalar_fix.inverse_of(c) else {
                        continue;
                    };
                    let w = alg.mul(&fix, &alg.mul(&mover, &probe));
                    if module.act(&w, m) == target {
                        return Ok(Some(Witness { element: w, search_degree: total, monomial: mono }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Realizes multiplication by scalars of `K'` on the base point through
/// polynomials in the isotropy generator.
struct ScalarFix<'a> {
    module: &'a dyn PointModule,
    powers: Vec<AlgebraElement>,
    columns: Vec<Vec<Scalar>>,
}

impl<'a> ScalarFix<'a> {
    fn new(module: &'a dyn PointModule) -> Self {
        let alg = module.algebra();
        let kp = module.coeff_field();
        let x = module.base();
        let g = alg.graph();
        let unit = alg.vertex(x.source(g));
        let mut powers = vec![unit.clone()];
        let mut columns = vec![kp.base_coords(&kp.one())];
        if let Some(gen) = isotropy_generator(alg, x) {
            let base = module.generator();
            let d = kp.degree_over_base();
            let mut current = unit;
            for _ in 1..d {
                current = alg.mul(&gen, &current);
                let image = module.act(&current, &base);
                let lambda = image.terms().next().map(|(_, c)| c.clone()).unwrap_or_else(|| kp.zero());
                powers.push(current.clone());
                columns.push(kp.base_coords(&lambda));
            }
        }
        ScalarFix { module, powers, columns }
    }

    /// An element acting on the base point by `c^{-1}`.
    fn inverse_of(&self, c: &Scalar) -> Option<AlgebraElement> {
        let alg = self.module.algebra();
        let kp = self.module.coeff_field();
        let target = kp.base_coords(&kp.inv(c).ok()?);
        let coeffs = solve_columns(alg.field(), &self.columns, &target)?;
        let mut out = AlgebraElement::zero();
        for (p, z) in coeffs.iter().zip(&self.powers) {
            out = alg.add(&out, &alg.scale(p, z));
        }
        Some(out)
    }
}
