//! Instance checks of the isomorphism and separation statements, grouped
//! into named suites.
//!
//! Every claim is checked exactly on a truncated basis; a failing claim
//! carries a machine-readable counterexample.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::boundary::{orbit_points, point_to_json, BoundaryPoint, ClassElement};
use crate::chen::{
    hom_check, phi_triv, phi_triv_arrow, phi_twist, phi_twist_arrow, psi_triv, psi_twist, theta,
    twist_invariant, twist_iso, weights_with_product, ChenModule, HomVerdict,
};
use crate::classify::catalog;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Laurent, Poly, Scalar};
use crate::graph::simple_cycles;
use crate::groupoid::{CoeffModule, GroupoidElt, InducedModule, QuotientMod, TrivialK, TwistedLine};
use crate::lpa::{Algebra, Monomial, TwistParam};
use crate::module::{restrict, PointModule, PointVector};

/// Everything a suite may read. Suites pick defaults for missing points:
/// the first sink for trivial isotropy, the first simple cycle otherwise.
#[derive(Clone)]
pub struct VerifyContext {
    pub alg: Algebra,
    pub point: Option<Arc<BoundaryPoint>>,
    pub twist: TwistParam,
    /// Second twist for comparisons; derived from `twist` when absent.
    pub twist_b: Option<TwistParam>,
    /// `f` for polynomial-quotient coefficients.
    pub poly: Option<Poly>,
    pub depth: usize,
    pub max_cycle_len: usize,
    pub max_deg: usize,
}

impl VerifyContext {
    pub fn new(alg: Algebra, depth: usize) -> Self {
        VerifyContext {
            alg,
            point: None,
            twist: TwistParam::trivial(),
            twist_b: None,
            poly: None,
            depth,
            max_cycle_len: 4,
            max_deg: 2,
        }
    }

    fn field(&self) -> &FieldSpec {
        self.alg.field()
    }

    fn rational_point(&self) -> Result<Arc<BoundaryPoint>> {
        match &self.point {
            Some(x) if matches!(x.as_ref(), BoundaryPoint::Rational { .. }) => Ok(x.clone()),
            Some(_) => Err(Error::Precondition("this suite needs a rational point".into())),
            None => {
                let g = self.alg.graph();
                let c = simple_cycles(g, self.max_cycle_len)
                    .into_iter()
                    .next()
                    .ok_or_else(|| Error::Precondition("the graph has no cycle; pass a point".into()))?;
                Ok(Arc::new(BoundaryPoint::cycle_point(g, &c)))
            }
        }
    }

    fn trivial_isotropy_point(&self) -> Result<Arc<BoundaryPoint>> {
        match &self.point {
            Some(x) if matches!(x.as_ref(), BoundaryPoint::Rational { .. }) => {
                Err(Error::Precondition("this suite needs a point with trivial isotropy".into()))
            }
            Some(x) => Ok(x.clone()),
            None => {
                let g = self.alg.graph();
                let w = g.sinks().next().ok_or_else(|| Error::Precondition("the graph has no sink; pass a point".into()))?;
                Ok(Arc::new(BoundaryPoint::sink_vertex(g, w)?))
            }
        }
    }

    fn any_point(&self) -> Result<Arc<BoundaryPoint>> {
        match &self.point {
            Some(x) => Ok(x.clone()),
            None => self.rational_point().or_else(|_| self.trivial_isotropy_point()),
        }
    }
}

/// Outcome of one claim.
#[derive(Clone, Debug, PartialEq)]
pub struct ClaimResult {
    pub claim: String,
    pub passed: bool,
    pub checks: usize,
    pub counterexample: Option<Value>,
    /// Set when the claim was not applicable and therefore not run.
    pub skipped: Option<String>,
}

impl ClaimResult {
    fn pass(claim: impl Into<String>, checks: usize) -> Self {
        ClaimResult { claim: claim.into(), passed: true, checks, counterexample: None, skipped: None }
    }

    fn fail(claim: impl Into<String>, checks: usize, counterexample: Value) -> Self {
        ClaimResult { claim: claim.into(), passed: false, checks, counterexample: Some(counterexample), skipped: None }
    }

    fn skip(claim: impl Into<String>, why: impl Into<String>) -> Self {
        ClaimResult { claim: claim.into(), passed: true, checks: 0, counterexample: None, skipped: Some(why.into()) }
    }

    fn from_verdict(claim: impl Into<String>, v: HomVerdict) -> Self {
        match v {
            HomVerdict::Equivariant { checks, .. } => Self::pass(claim, checks),
            other => Self::fail(claim, 0, other.to_json()),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut out = json!({
            "claim": self.claim,
            "passed": self.passed,
            "checks": self.checks,
        });
        if let Some(c) = &self.counterexample {
            out["counterexample"] = c.clone();
        }
        if let Some(s) = &self.skipped {
            out["skipped"] = json!(s);
        }
        out
    }
}

/// A named group of claims.
pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, ctx: &VerifyContext) -> Result<Vec<ClaimResult>>;
}

/// Suites selectable by name.
pub struct SuiteRegistry {
    suites: BTreeMap<&'static str, Arc<dyn Suite>>,
}

impl SuiteRegistry {
    pub fn builtin() -> Self {
        let atomic: Vec<Arc<dyn Suite>> = vec![
            Arc::new(TrivSuite),
            Arc::new(TwistSuite),
            Arc::new(ResSuite),
            Arc::new(Cor2Suite),
            Arc::new(Rem1Suite),
            Arc::new(NonisoSuite),
        ];
        let mut reg = SuiteRegistry { suites: BTreeMap::new() };
        for s in &atomic {
            reg.register(s.clone());
        }
        reg.register(Arc::new(AllSuite { parts: atomic }));
        reg
    }

    pub fn register(&mut self, suite: Arc<dyn Suite>) {
        self.suites.insert(suite.name(), suite);
    }

    pub fn names(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.suites.values().map(|s| (s.name(), s.description()))
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Suite>> {
        self.suites
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Unknown { kind: "verify suite", name: name.to_string() })
    }

    pub fn run(&self, name: &str, ctx: &VerifyContext) -> Result<SuiteReport> {
        let suite = self.get(name)?;
        Ok(SuiteReport { suite: suite.name(), claims: suite.run(ctx)? })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub claims: Vec<ClaimResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| !c.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "passed": self.passed(),
            "claims": self.claims.iter().map(ClaimResult::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Checks `f(g(b)) = b` on every vector of `basis`.
fn roundtrip(
    claim: &str,
    basis: &[PointVector],
    there: impl Fn(&PointVector) -> Result<PointVector>,
    back: impl Fn(&PointVector) -> Result<PointVector>,
    g: &crate::graph::Digraph,
) -> Result<ClaimResult> {
    for b in basis {
        let image = there(b)?;
        let again = back(&image)?;
        if &again != b {
            return Ok(ClaimResult::fail(
                claim,
                0,
                json!({ "basis_vector": b.show(g), "image": image.show(g), "returned": again.show(g) }),
            ));
        }
    }
    Ok(ClaimResult::pass(claim, basis.len()))
}

/// Isomorphism `Ind_x(K) ≃ V^a_{[x],K}` at a point with trivial isotropy.
struct TrivSuite;

impl Suite for TrivSuite {
    fn name(&self) -> &'static str {
        "triv"
    }

    fn description(&self) -> &'static str {
        "induced module from the trivial group vs twisted Chen module at a point with trivial isotropy"
    }

    fn run(&self, ctx: &VerifyContext) -> Result<Vec<ClaimResult>> {
        let x = ctx.trivial_isotropy_point()?;
        let alg = &ctx.alg;
        let g = alg.graph().clone();
        let k = ctx.field().clone();
        let chen = ChenModule::twisted(alg.clone(), x.clone(), ctx.twist.clone());
        let ind = InducedModule::new(alg.clone(), x.clone(), Arc::new(TrivialK::new(k.clone())))?;
        let ind_basis = ind.basis(ctx.depth);
        let chen_basis = chen.basis(ctx.depth);
        let mut out = vec![
            roundtrip("psi after phi is the identity", &ind_basis, |v| phi_triv(&ind, &chen, v), |v| psi_triv(&ind, &chen, v), &g)?,
            roundtrip("phi after psi is the identity", &chen_basis, |v| psi_triv(&ind, &chen, v), |v| phi_triv(&ind, &chen, v), &g)?,
        ];

        let claim = "phi on arrows agrees with phi on normalized arrows";
        let mut checks = 0;
        let mut failure = None;
        for b in &ind_basis {
            let (y, _) = b.terms().next().expect("basis vectors are nonzero");
            let t = GroupoidElt::from_base(&g, y.clone());
            let direct = phi_triv_arrow(&chen, &t)?;
            let via = phi_triv(&ind, &chen, b)?;
            checks += 1;
            if direct != via {
                failure = Some(json!({ "arrow": t.show(&g), "direct": direct.show(&g), "normalized": via.show(&g) }));
                break;
            }
        }
        out.push(match failure {
            None => ClaimResult::pass(claim, checks),
            Some(c) => ClaimResult::fail(claim, checks, c),
        });

        let verdict = hom_check(&ind, &chen, &|v| phi_triv(&ind, &chen, v), ctx.depth)?;
        out.push(ClaimResult::from_verdict("phi is equivariant for all generators", verdict));
        Ok(out)
    }
}

/// The rational-point pair: twisted Chen module and the induced module it
/// matches, built from `--poly` when given and from the twist otherwise.
struct RationalPair {
    x: Arc<BoundaryPoint>,
    chen: ChenModule,
    ind: InducedModule,
}

fn rational_pair(ctx: &VerifyContext) -> Result<RationalPair> {
    let x = ctx.rational_point()?;
    let alg = &ctx.alg;
    let k = ctx.field();
    let (chen, coeff): (ChenModule, Arc<dyn CoeffModule>) = match &ctx.poly {
        Some(f) => {
            let chen = ChenModule::akr(alg.clone(), x.clone(), f.clone())?;
            (chen, Arc::new(QuotientMod::new(k, f.clone())?))
        }
        None => {
            let chen = ChenModule::twisted(alg.clone(), x.clone(), ctx.twist.clone());
            let a = twist_invariant(&chen)?;
            (chen, Arc::new(TwistedLine::new(k.clone(), a)?))
        }
    };
    let ind = InducedModule::new(alg.clone(), x.clone(), coeff)?;
    Ok(RationalPair { x, chen, ind })
}

/// Paths of length at most `max_len` ending at each vertex.
fn monomials(ctx: &VerifyContext, max_len: usize) -> Vec<Monomial> {
    let g = ctx.alg.graph();
    let mut out = Vec::new();
    for v in g.vertices() {
        let ending: Vec<_> = (0..=max_len).flat_map(|l| g.paths_ending_at(v, l)).collect();
        for mu in &ending {
            for nu in &ending {
                out.push(Monomial::new(mu.clone(), nu.clone()).expect("common range"));
            }
        }
    }
    out
}

fn act_by_monomial(w: &dyn PointModule, m: &Monomial, v: &PointVector) -> PointVector {
    let kp = w.coeff_field();
    let mut out = PointVector::zero();
    for (y, c) in v.terms() {
        if let Some((y2, s)) = w.act_monomial(m, y) {
            out.add_term(kp, y2, kp.mul(c, &s));
        }
    }
    out
}

/// Isomorphism `Ind_{c^∞}(K'^{(a_c)}) ≃ V^a_{[c^∞],K'}`.
struct TwistSuite;

/// Bound on `|μ|` and `|ν|` in the bisection equivariance claim.
const BISECTION_LEN: usize = 4;

impl Suite for TwistSuite {
    fn name(&self) -> &'static str {
        "twist"
    }

    fn description(&self) -> &'static str {
        "induced module from a line with the cycle weight vs twisted Chen module at a rational point"
    }

    fn run(&self, ctx: &VerifyContext) -> Result<Vec<ClaimResult>> {
        let RationalPair { x, chen, ind } = rational_pair(ctx)?;
        let g = ctx.alg.graph().clone();
        let kp = chen.coeff_field().clone();
        let ind_basis = ind.basis(ctx.depth);
        let chen_basis = chen.basis(ctx.depth);
        let mut out = vec![
            roundtrip("psi after phi is the identity", &ind_basis, |v| phi_twist(&ind, &chen, v), |v| psi_twist(&ind, &chen, v), &g)?,
            roundtrip("phi after psi is the identity", &chen_basis, |v| psi_twist(&ind, &chen, v), |v| phi_twist(&ind, &chen, v), &g)?,
        ];

        let claim = format!("phi commutes with every bisection indicator with |mu|, |nu| <= {BISECTION_LEN}");
        let base = ClassElement::base_point(&g, x.clone());
        let mut checks = 0;
        let mut failure = None;
        'outer: for m in monomials(ctx, BISECTION_LEN.min(ctx.depth)) {
            for kk in kp.base_basis() {
                let v = PointVector::basis(base.clone(), kk);
                let lhs = phi_twist(&ind, &chen, &act_by_monomial(&ind, &m, &v))?;
                let rhs = act_by_monomial(&chen, &m, &phi_twist(&ind, &chen, &v)?);
                checks += 1;
                if lhs != rhs {
                    failure = Some(json!({
                        "monomial": m.show(&g),
                        "vector": v.show(&g),
                        "map_of_product": lhs.show(&g),
                        "product_of_map": rhs.show(&g),
                    }));
                    break 'outer;
                }
            }
        }
        out.push(match failure {
            None => ClaimResult::pass(claim, checks),
            Some(c) => ClaimResult::fail(claim, checks, c),
        });

        let claim = "phi on arbitrary arrows agrees with phi after normalization";
        let n = x.isotropy(&g).period().expect("rational points have cyclic isotropy") as i64;
        let mut checks = 0;
        let mut failure = None;
        'arrows: for y in orbit_points(&g, &x, ctx.depth).points {
            for l in -2..=2 {
                let t = GroupoidElt::new(y.clone(), y.degree().value + l * n, base.clone())?;
                for kk in kp.base_basis() {
                    let direct = phi_twist_arrow(&ind, &chen, &t, &kk)?;
                    let (y2, c) = ind.normalize(&t, &kk)?;
                    let via = phi_twist(&ind, &chen, &PointVector::basis(y2, c))?;
                    checks += 1;
                    if direct != via {
                        failure = Some(json!({
                            "arrow": t.show(&g),
                            "coefficient": kk.to_string(),
                            "direct": direct.show(&g),
                            "normalized": via.show(&g),
                        }));
                        break 'arrows;
                    }
                }
            }
        }
        out.push(match failure {
            None => ClaimResult::pass(claim, checks),
            Some(c) => ClaimResult::fail(claim, checks, c),
        });

        let verdict = hom_check(&ind, &chen, &|v| phi_twist(&ind, &chen, v), ctx.depth)?;
        out.push(ClaimResult::from_verdict("phi is equivariant for all generators", verdict));
        Ok(out)
    }
}

/// `Res_x(Ind_x(V)) ≃ V`.
struct ResSuite;

/// Matrix of multiplication by `s` on `K'` in the `K`-basis of `K'`.
fn multiplication_matrix(kp: &FieldSpec, s: &Scalar) -> Vec<Vec<Scalar>> {
    let basis = kp.base_basis();
    let columns: Vec<Vec<Scalar>> = basis.iter().map(|b| kp.base_coords(&kp.mul(s, b))).collect();
    let n = basis.len();
    (0..n).map(|i| (0..n).map(|j| columns[j][i].clone()).collect()).collect()
}

impl Suite for ResSuite {
    fn name(&self) -> &'static str {
        "res"
    }

    fn description(&self) -> &'static str {
        "restriction of an induced module to its base point recovers the coefficient module"
    }

    fn run(&self, ctx: &VerifyContext) -> Result<Vec<ClaimResult>> {
        let x = ctx.any_point()?;
        let g = ctx.alg.graph().clone();
        let k = ctx.field().clone();
        let ind = if matches!(x.as_ref(), BoundaryPoint::Rational { .. }) {
            rational_pair(&VerifyContext { point: Some(x.clone()), ..ctx.clone() })?.ind
        } else {
            InducedModule::new(ctx.alg.clone(), x.clone(), Arc::new(TrivialK::new(k.clone())))?
        };
        let coeff = ind.coeff().clone();
        let kp = coeff.field().clone();
        let res = restrict(&ind, &x, ctx.depth);
        let expected_dim = kp.degree_over_base();
        let mut out = Vec::new();
        let claim = format!("restriction to {} has dimension {expected_dim}", x.show(&g));
        out.push(if res.dim() == expected_dim {
            ClaimResult::pass(claim, 1)
        } else {
            ClaimResult::fail(claim, 1, json!({ "restriction": res.to_json(&g, &k), "expected_dim": expected_dim }))
        });

        let claim = "isotropy generator acts on the restriction as on the coefficient module";
        let expected = coeff.generator_scalar().map(|s| multiplication_matrix(&kp, s));
        out.push(if res.generator_matrix == expected {
            ClaimResult::pass(claim, expected_dim * expected_dim)
        } else {
            let show = |m: &Option<Vec<Vec<Scalar>>>| {
                m.as_ref().map(|m| m.iter().map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
            };
            ClaimResult::fail(
                claim,
                expected_dim * expected_dim,
                json!({ "restriction": res.to_json(&g, &k), "expected_matrix": show(&expected) }),
            )
        });
        Ok(out)
    }
}

/// Twisted Chen modules on one rational class are isomorphic exactly when
/// the cycle weights agree.
struct Cor2Suite;

impl Cor2Suite {
    /// A nonzero scalar different from `a`, if the field has one.
    fn other_scalar(k: &FieldSpec, a: &Scalar) -> Option<Scalar> {
        (2..=8).map(|i| k.from_i64(i)).find(|s| !s.is_zero() && s != a)
    }
}

impl Suite for Cor2Suite {
    fn name(&self) -> &'static str {
        "cor2"
    }

    fn description(&self) -> &'static str {
        "twisted Chen modules are classified by the cycle weight"
    }

    fn run(&self, ctx: &VerifyContext) -> Result<Vec<ClaimResult>> {
        let x = ctx.rational_point()?;
        let BoundaryPoint::Rational { cycle, .. } = x.as_ref() else { unreachable!() };
        let alg = &ctx.alg;
        let g = alg.graph().clone();
        let k = ctx.field().clone();
        let chen_a = ChenModule::twisted(alg.clone(), x.clone(), ctx.twist.clone());
        let a_c = twist_invariant(&chen_a)?;
        let mut out = Vec::new();

        let res_a = restrict(&chen_a, &x, ctx.depth);
        let claim = "restriction eigenvalue equals the cycle weight";
        out.push(if res_a.generator_matrix == Some(vec![vec![a_c.clone()]]) {
            ClaimResult::pass(claim, 1)
        } else {
            ClaimResult::fail(claim, 1, json!({ "cycle_weight": a_c.to_string(), "restriction": res_a.to_json(&g, &k) }))
        });

        let mut same = Vec::new();
        let mut different = Vec::new();
        match &ctx.twist_b {
            Some(b) => {
                let chen_b = ChenModule::twisted(alg.clone(), x.clone(), b.clone());
                if twist_invariant(&chen_b)? == a_c {
                    same.push(b.clone());
                } else {
                    different.push(b.clone());
                }
            }
            None => {
                same.push(weights_with_product(&g, &k, cycle, &a_c)?);
                if let Some(d) = Self::other_scalar(&k, &a_c) {
                    different.push(weights_with_product(&g, &k, cycle, &d)?);
                }
            }
        }

        for b in &same {
            let chen_b = ChenModule::twisted(alg.clone(), x.clone(), b.clone());
            let iso = twist_iso(&chen_a, &chen_b)?;
            let verdict = hom_check(&chen_a, &chen_b, &iso, ctx.depth)?;
            let claim = format!("equal cycle weights give an isomorphism onto twist {}", b.to_json(&g));
            out.push(ClaimResult::from_verdict(claim, verdict));
        }
        if different.is_empty() {
            out.push(ClaimResult::skip("distinct cycle weights are separated", format!("{k} has no second nonzero scalar")));
        }
        for b in &different {
            let chen_b = ChenModule::twisted(alg.clone(), x.clone(), b.clone());
            let b_c = twist_invariant(&chen_b)?;
            let res_b = restrict(&chen_b, &x, ctx.depth);
            let claim = format!("distinct cycle weights are separated by the restriction eigenvalue for twist {}", b.to_json(&g));
            let eigen_b = Some(vec![vec![b_c.clone()]]);
            out.push(if res_b.generator_matrix == eigen_b && res_a.generator_matrix != res_b.generator_matrix {
                ClaimResult::pass(claim, 2)
            } else {
                ClaimResult::fail(
                    claim,
                    2,
                    json!({ "weights": [a_c.to_string(), b_c.to_string()], "restrictions": [res_a.to_json(&g, &k), res_b.to_json(&g, &k)] }),
                )
            });
            let claim = "the twist isomorphism is refused for distinct cycle weights";
            out.push(match twist_iso(&chen_a, &chen_b) {
                Err(Error::TwistMismatch(_)) => ClaimResult::pass(claim, 1),
                Err(e) => return Err(e),
                Ok(_) => ClaimResult::fail(claim, 1, json!({ "weights": [a_c.to_string(), b_c.to_string()] })),
            });
        }
        Ok(out)
    }
}

/// `V^{t-a}_{[c^∞],K} ≃ V^a_{[c^∞],K}` through `θ: K[t,t^{-1}]/(t-a) → K`.
struct Rem1Suite;

/// `θ(s) = s(a)` for `s ∈ K[t]/(f)`, via a polynomial representative.
fn theta_on_quotient(k: &FieldSpec, kp: &FieldSpec, s: &Scalar, a: &Scalar) -> Result<Scalar> {
    theta(k, &Laurent::from_poly(Poly::new(kp.base_coords(s))), a)
}

impl Suite for Rem1Suite {
    fn name(&self) -> &'static str {
        "rem1"
    }

    fn description(&self) -> &'static str {
        "the quotient by t - a matches the twist with cycle weight a"
    }

    fn run(&self, ctx: &VerifyContext) -> Result<Vec<ClaimResult>> {
        let x = ctx.rational_point()?;
        let alg = &ctx.alg;
        let g = alg.graph().clone();
        let k = ctx.field().clone();
        if matches!(k, FieldSpec::Quotient { .. }) {
            return Err(Error::UnsupportedField(format!("quotients of {k}[t] are not built")));
        }
        let target = ChenModule::twisted(alg.clone(), x.clone(), ctx.twist.clone());
        let a = twist_invariant(&target)?;
        let t_minus_a = Poly::new(vec![k.neg(&a), k.one()]);
        let mut out = Vec::new();

        let claim = "theta kills t - a";
        let value = theta(&k, &Laurent::from_poly(t_minus_a.clone()), &a)?;
        out.push(if value.is_zero() {
            ClaimResult::pass(claim, 1)
        } else {
            ClaimResult::fail(claim, 1, json!({ "theta": value.to_string() }))
        });

        let claim = "theta is onto: t - a + b maps to b";
        let samples: Vec<Scalar> = (-3..=3).map(|i| k.from_i64(i)).collect();
        let mut failure = None;
        for b in &samples {
            let witness = Poly::new(vec![k.sub(b, &a), k.one()]);
            let value = theta(&k, &Laurent::from_poly(witness.clone()), &a)?;
            if &value != b {
                failure = Some(json!({ "target": b.to_string(), "witness": witness.to_string(), "theta": value.to_string() }));
                break;
            }
        }
        out.push(match failure {
            None => ClaimResult::pass(claim, samples.len()),
            Some(c) => ClaimResult::fail(claim, samples.len(), c),
        });

        let quotient = ChenModule::akr(alg.clone(), x.clone(), t_minus_a)?;
        let kp = quotient.coeff_field().clone();
        let mut pulled = Vec::new();
        for (e, w) in quotient.twist().iter() {
            pulled.push((e, theta_on_quotient(&k, &kp, w, &a)?));
        }
        let middle = ChenModule::twisted(alg.clone(), x.clone(), TwistParam::new(&k, pulled)?);
        let iso = twist_iso(&middle, &target)?;
        let composite = |v: &PointVector| -> Result<PointVector> {
            let mut moved = PointVector::zero();
            for (y, s) in v.terms() {
                moved.add_term(&k, y.clone(), theta_on_quotient(&k, &kp, s, &a)?);
            }
            iso(&moved)
        };
        let verdict = hom_check(&quotient, &target, &composite, ctx.depth)?;
        let claim = format!("the quotient by {} is isomorphic to the twist {}", Poly::new(vec![k.neg(&a), k.one()]), ctx.twist.to_json(&g));
        out.push(ClaimResult::from_verdict(claim, verdict));
        Ok(out)
    }
}

/// Restrictions separate modules on distinct orbits.
struct NonisoSuite;

impl Suite for NonisoSuite {
    fn name(&self) -> &'static str {
        "noniso"
    }

    fn description(&self) -> &'static str {
        "restriction at a base point kills Chen modules of every other orbit"
    }

    fn run(&self, ctx: &VerifyContext) -> Result<Vec<ClaimResult>> {
        let alg = &ctx.alg;
        let g = alg.graph().clone();
        let mut bases: Vec<Arc<BoundaryPoint>> = g.sinks().map(|w| BoundaryPoint::sink_vertex(&g, w).map(Arc::new)).collect::<Result<_>>()?;
        bases.extend(simple_cycles(&g, ctx.max_cycle_len).iter().map(|c| Arc::new(BoundaryPoint::cycle_point(&g, c))));
        if let Some(x) = &ctx.point {
            if !bases.contains(x) {
                bases.push(x.clone());
            }
        }
        let mut out = Vec::new();
        let claim = "restriction is nonzero at the own base point and zero at every other orbit";
        let mut checks = 0;
        let mut failure = None;
        'pairs: for xj in &bases {
            let w = ChenModule::new(alg.clone(), xj.clone());
            for xi in &bases {
                let dim = restrict(&w, xi, ctx.depth).dim();
                let expected = usize::from(xi == xj);
                checks += 1;
                if dim != expected {
                    failure = Some(json!({
                        "module_base": point_to_json(&g, xj),
                        "restricted_at": point_to_json(&g, xi),
                        "dim": dim,
                        "expected": expected,
                    }));
                    break 'pairs;
                }
            }
        }
        out.push(match failure {
            None => ClaimResult::pass(claim, checks),
            Some(c) => ClaimResult::fail(claim, checks, c),
        });

        match catalog(alg.graph(), alg.field(), ctx.max_deg, ctx.max_cycle_len, &[], ctx.depth) {
            Ok(cat) => {
                let claim = "every pair of catalog entries has a distinguishing witness";
                let checks = cat.entries.len() * cat.entries.len().saturating_sub(1);
                out.push(if cat.pairwise_distinguished {
                    ClaimResult::pass(claim, checks)
                } else {
                    ClaimResult::fail(claim, checks, cat.to_json(&g))
                });
            }
            Err(Error::UnsupportedField(why)) => {
                out.push(ClaimResult::skip("every pair of catalog entries has a distinguishing witness", why));
            }
            Err(e) => return Err(e),
        }
        Ok(out)
    }
}

/// Every other suite; inapplicable ones are reported as skipped.
struct AllSuite {
    parts: Vec<Arc<dyn Suite>>,
}

impl Suite for AllSuite {
    fn name(&self) -> &'static str {
        "all"
    }

    fn description(&self) -> &'static str {
        "every suite, skipping those whose preconditions fail"
    }

    fn run(&self, ctx: &VerifyContext) -> Result<Vec<ClaimResult>> {
        let mut out = Vec::new();
        for suite in &self.parts {
            match suite.run(ctx) {
                Ok(claims) => out.extend(claims.into_iter().map(|mut c| {
                    c.claim = format!("{}: {}", suite.name(), c.claim);
                    c
                })),
                Err(
                    e @ (Error::Precondition(_)
                    | Error::IncompatibleCoefficients(_)
                    | Error::UnsupportedField(_)
                    | Error::TwistMismatch(_)),
                ) => out.push(ClaimResult::skip(suite.name(), e.to_string())),
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }
}
