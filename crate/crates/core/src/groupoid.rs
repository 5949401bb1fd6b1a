//! The graph groupoid `G_E`, its compact bisections `Z_{(μ,ν)}`, and modules
//! induced from isotropy representations.
//!
//! Arrows are triples `(y, k, z)` of tail-equivalent boundary points with a
//! degree. Both ends are stored as [`ClassElement`]s over one base point, so
//! the arrows ending at the base `x` are exactly `L_x`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::boundary::{class_eq, BoundaryPoint, ClassElement, IsotropyDesc};
use crate::error::{Error, Result};
use crate::field::{parse_poly, FieldSpec, Scalar};
use crate::graph::{Digraph, FinPath};
use crate::lpa::{mono_product, Algebra, Monomial};
use crate::module::PointModule;

/// An arrow `(src, k, dst)`: range `src`, source `dst`, degree `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupoidElt {
    pub src: ClassElement,
    pub k: i64,
    pub dst: ClassElement,
}

fn same_base(u: &ClassElement, v: &ClassElement) -> bool {
    Arc::ptr_eq(u.base(), v.base()) || u.base() == v.base()
}

impl GroupoidElt {
    /// Checks that `k` is a degree realized between the two points.
    pub fn new(src: ClassElement, k: i64, dst: ClassElement) -> Result<Self> {
        if !same_base(&src, &dst) {
            return Err(Error::BaseMismatch);
        }
        let gap = src.degree().value - dst.degree().value;
        let ok = match src.degree().modulus {
            None => k == gap,
            Some(n) => (k - gap).rem_euclid(n as i64) == 0,
        };
        if !ok {
            return Err(Error::UnrealizableDegree { k });
        }
        Ok(GroupoidElt { src, k, dst })
    }

    /// The unit `(y, 0, y)`.
    pub fn unit(y: ClassElement) -> Self {
        GroupoidElt { src: y.clone(), k: 0, dst: y }
    }

    /// The canonical arrow `t_y = (y, |prefix| - shift, x)` from the base to `y`.
    pub fn from_base(g: &Digraph, y: ClassElement) -> Self {
        let k = y.degree().value;
        let x = ClassElement::base_point(g, y.base().clone());
        GroupoidElt { src: y, k, dst: x }
    }

    pub fn show(&self, g: &Digraph) -> String {
        format!("({}, {}, {})", self.src.show(g), self.k, self.dst.show(g))
    }
}

/// `(x,k,y)(y,l,z) = (x,k+l,z)`.
pub fn gpd_mul(a: &GroupoidElt, b: &GroupoidElt) -> Result<GroupoidElt> {
    if !same_base(&a.dst, &b.src) || !class_eq(&a.dst, &b.src)? {
        return Err(Error::MiddleMismatch);
    }
    Ok(GroupoidElt { src: a.src.clone(), k: a.k + b.k, dst: b.dst.clone() })
}

/// `(x,k,y)^{-1} = (y,-k,x)`.
pub fn gpd_inv(a: &GroupoidElt) -> GroupoidElt {
    GroupoidElt { src: a.dst.clone(), k: -a.k, dst: a.src.clone() }
}

/// The compact open bisection `Z_{(μ,ν)} = {(μz, |μ|-|ν|, νz)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bisection {
    mu: FinPath,
    nu: FinPath,
}

impl Bisection {
    pub fn new(mu: FinPath, nu: FinPath) -> Result<Self> {
        Monomial::new(mu.clone(), nu.clone())?;
        Ok(Bisection { mu, nu })
    }

    /// The bisection whose indicator corresponds to `μν*`.
    pub fn of_monomial(m: &Monomial) -> Self {
        Bisection { mu: m.mu().clone(), nu: m.nu().clone() }
    }

    pub fn monomial(&self) -> Monomial {
        Monomial::new(self.mu.clone(), self.nu.clone()).expect("r(μ) = r(ν)")
    }

    pub fn mu(&self) -> &FinPath {
        &self.mu
    }

    pub fn nu(&self) -> &FinPath {
        &self.nu
    }

    pub fn show(&self, g: &Digraph) -> String {
        format!("Z({}, {})", g.show_path(&self.mu), g.show_path(&self.nu))
    }
}

/// `1_B t`: `(μz, |μ|-|ν|+k, x)` when `src(t) = νz`, otherwise `None` (zero).
pub fn bisection_apply(g: &Digraph, b: &Bisection, t: &GroupoidElt) -> Option<GroupoidElt> {
    let z = t.src.strip(g, &b.nu)?;
    let src = z.prepend(g, &b.mu)?;
    let k = b.mu.len() as i64 - b.nu.len() as i64 + t.k;
    Some(GroupoidElt { src, k, dst: t.dst.clone() })
}

/// The set product `B1 B2` as one bisection, or `None` when it is empty.
pub fn bisection_prod(b1: &Bisection, b2: &Bisection) -> Option<Bisection> {
    mono_product(&b1.monomial(), &b2.monomial()).map(|m| Bisection::of_monomial(&m))
}

/// A simple `KG_x`-module presented as a line over a field `K' ⊇ K`, on
/// which the isotropy generator `(x, n, x)` acts by a fixed scalar.
pub trait CoeffModule: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    /// `K'`; `V` is `K'` viewed as a `K`-space.
    fn field(&self) -> &FieldSpec;
    /// Scalar in `K'` by which the isotropy generator acts; `None` for a
    /// module over the trivial group.
    fn generator_scalar(&self) -> Option<&Scalar>;
    fn describe(&self) -> Value;

    /// Whether this module is a representation of the isotropy group `iso`.
    fn check_compatible(&self, iso: &IsotropyDesc) -> Result<()> {
        match (iso, self.generator_scalar()) {
            (IsotropyDesc::Trivial, None) | (IsotropyDesc::Cyclic { .. }, Some(_)) => Ok(()),
            (IsotropyDesc::Trivial, Some(_)) => Err(Error::IncompatibleCoefficients(format!(
                "`{}` needs a point with cyclic isotropy",
                self.name()
            ))),
            (IsotropyDesc::Cyclic { .. }, None) => Err(Error::IncompatibleCoefficients(format!(
                "`{}` is a module over the trivial group but the point has cyclic isotropy",
                self.name()
            ))),
        }
    }
}

/// `K` with the trivial group acting.
#[derive(Debug)]
pub struct TrivialK {
    field: FieldSpec,
}

impl TrivialK {
    pub fn new(field: FieldSpec) -> Self {
        TrivialK { field }
    }
}

impl CoeffModule for TrivialK {
    fn name(&self) -> &'static str {
        "trivial"
    }
    fn field(&self) -> &FieldSpec {
        &self.field
    }
    fn generator_scalar(&self) -> Option<&Scalar> {
        None
    }
    fn describe(&self) -> Value {
        json!({ "kind": "trivial", "field": self.field.to_string() })
    }
}

/// `K'^{(a)}`: the generator acts by multiplication with `a ≠ 0`.
#[derive(Debug)]
pub struct TwistedLine {
    field: FieldSpec,
    a: Scalar,
}

impl TwistedLine {
    pub fn new(field: FieldSpec, a: Scalar) -> Result<Self> {
        if !field.contains(&a) {
            return Err(Error::FieldMismatch(format!("{a} is not in {field}")));
        }
        if a.is_zero() {
            return Err(Error::Precondition("the generator must act by a nonzero scalar".into()));
        }
        Ok(TwistedLine { field, a })
    }
}

impl CoeffModule for TwistedLine {
    fn name(&self) -> &'static str {
        "twisted"
    }
    fn field(&self) -> &FieldSpec {
        &self.field
    }
    fn generator_scalar(&self) -> Option<&Scalar> {
        Some(&self.a)
    }
    fn describe(&self) -> Value {
        json!({ "kind": "twisted", "field": self.field.to_string(), "a": self.a.to_string() })
    }
}

/// `K[t,t^{-1}]/(f)`, i.e. `K[t]/(f)` with the generator acting by `t̄`.
#[derive(Debug)]
pub struct QuotientMod {
    field: FieldSpec,
    tbar: Scalar,
}

impl QuotientMod {
    pub fn new(base: &FieldSpec, f: crate::field::Poly) -> Result<Self> {
        let field = FieldSpec::quotient(base.clone(), f)?;
        let tbar = field.generator().expect("quotient fields have a generator");
        Ok(QuotientMod { field, tbar })
    }
}

impl CoeffModule for QuotientMod {
    fn name(&self) -> &'static str {
        "quotient"
    }
    fn field(&self) -> &FieldSpec {
        &self.field
    }
    fn generator_scalar(&self) -> Option<&Scalar> {
        Some(&self.tbar)
    }
    fn describe(&self) -> Value {
        json!({
            "kind": "quotient",
            "field": self.field.to_string(),
            "f": self.field.modulus().map(|f| f.to_string()),
        })
    }
}

/// Parameters accepted by coefficient-module builders.
#[derive(Clone, Debug, Default)]
pub struct CoeffArgs {
    /// Scalar for `twisted`, in the ground field.
    pub a: Option<String>,
    /// Polynomial for `quotient`.
    pub poly: Option<String>,
}

type CoeffBuilder = fn(&FieldSpec, &CoeffArgs) -> Result<Arc<dyn CoeffModule>>;

/// Coefficient modules selectable by name.
pub struct CoeffRegistry {
    builders: BTreeMap<&'static str, CoeffBuilder>,
}

impl CoeffRegistry {
    pub fn builtin() -> Self {
        let mut builders: BTreeMap<&'static str, CoeffBuilder> = BTreeMap::new();
        builders.insert("trivial", |k, _| Ok(Arc::new(TrivialK::new(k.clone()))));
        builders.insert("twisted", |k, args| {
            let a = args.a.as_deref().ok_or_else(|| Error::Parse("`twisted` needs a scalar `a`".into()))?;
            Ok(Arc::new(TwistedLine::new(k.clone(), k.parse_scalar(a)?)?))
        });
        builders.insert("quotient", |k, args| {
            let f = args.poly.as_deref().ok_or_else(|| Error::Parse("`quotient` needs a polynomial".into()))?;
            Ok(Arc::new(QuotientMod::new(k, parse_poly(f, k)?)?))
        });
        CoeffRegistry { builders }
    }

    pub fn register(&mut self, name: &'static str, build: CoeffBuilder) {
        self.builders.insert(name, build);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.builders.keys().copied()
    }

    pub fn build(&self, name: &str, k: &FieldSpec, args: &CoeffArgs) -> Result<Arc<dyn CoeffModule>> {
        let build = self
            .builders
            .get(name)
            .ok_or_else(|| Error::Unknown { kind: "coefficient module", name: name.to_string() })?;
        build(k, args)
    }
}

/// `Ind_x(V) = KL_x ⊗_{KG_x} V` with basis `t_y ⊗ V` over the orbit of `x`.
///
/// A vector `Σ c_y y` (coefficients in `K'`) stands for `Σ t_y ⊗ c_y`.
pub struct InducedModule {
    alg: Algebra,
    base: Arc<BoundaryPoint>,
    coeff: Arc<dyn CoeffModule>,
    period: Option<usize>,
}

impl InducedModule {
    pub fn new(alg: Algebra, base: Arc<BoundaryPoint>, coeff: Arc<dyn CoeffModule>) -> Result<Self> {
        let kp = coeff.field();
        if kp != alg.field() && kp.base_field() != alg.field() {
            return Err(Error::FieldMismatch(format!(
                "coefficients over {kp} do not extend {}",
                alg.field()
            )));
        }
        let iso = base.isotropy(alg.graph());
        coeff.check_compatible(&iso)?;
        Ok(InducedModule { alg, base, coeff, period: iso.period() })
    }

    pub fn coeff(&self) -> &Arc<dyn CoeffModule> {
        &self.coeff
    }

    /// Rewrites `t ⊗ c` for an arrow `t ∈ L_x` as `t_y ⊗ c'`, pushing the
    /// isotropy surplus into the coefficient: `t_y γ^l ⊗ c = t_y ⊗ a^l c`.
    pub fn normalize(&self, t: &GroupoidElt, c: &Scalar) -> Result<(ClassElement, Scalar)> {
        if !t.dst.is_base() || !same_base(&t.dst, &ClassElement::base_point(self.graph(), self.base.clone())) {
            return Err(Error::Precondition("arrow does not start at the base point".into()));
        }
        let surplus = t.k - t.src.degree().value;
        let kp = self.coeff.field();
        let factor = match (self.period, self.coeff.generator_scalar()) {
            (None, _) | (_, None) => {
                if surplus != 0 {
                    return Err(Error::UnrealizableDegree { k: t.k });
                }
                kp.one()
            }
            (Some(n), Some(a)) => {
                let n = n as i64;
                if surplus % n != 0 {
                    return Err(Error::UnrealizableDegree { k: t.k });
                }
                kp.pow(a, surplus / n)?
            }
        };
        Ok((t.src.clone(), kp.mul(&factor, c)))
    }
}

impl PointModule for InducedModule {
    fn label(&self) -> String {
        format!("Ind_x({}) with x = {}", self.coeff.name(), self.base.show(self.alg.graph()))
    }

    fn algebra(&self) -> &Algebra {
        &self.alg
    }

    fn coeff_field(&self) -> &FieldSpec {
        self.coeff.field()
    }

    fn base(&self) -> &Arc<BoundaryPoint> {
        &self.base
    }

    /// `1_{Z(μ,ν)}` applied to `t_y`, then normalized.
    fn act_monomial(&self, m: &Monomial, y: &ClassElement) -> Option<(ClassElement, Scalar)> {
        let g = self.alg.graph();
        let t = GroupoidElt::from_base(g, y.clone());
        let moved = bisection_apply(g, &Bisection::of_monomial(m), &t)?;
        Some(
            self.normalize(&moved, &self.coeff.field().one())
                .expect("bisections preserve realizable degrees"),
        )
    }
}
