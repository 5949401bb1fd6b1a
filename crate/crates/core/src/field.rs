//! Exact coefficient fields: the rationals, prime fields, and simple
//! extensions `K[t]/(f)` of either, together with the univariate polynomial
//! arithmetic needed to build and classify them.
//!
//! Arithmetic is routed through a [`FieldSpec`], which plays the role of a
//! ring context; [`Scalar`] values carry just enough of a tag to detect a
//! mismatched field.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element of some [`FieldSpec`], always in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    /// Reduced fraction.
    Rat(BigRational),
    /// Residue in `[0, p)`.
    Mod(u64),
    /// Polynomial representative of degree below the modulus degree.
    Ext(Poly),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod(r) => *r == 0,
            Scalar::Ext(p) => p.is_zero(),
        }
    }

    /// Whether the printed form needs parentheses when used as a factor.
    pub fn is_compound(&self) -> bool {
        match self {
            Scalar::Ext(p) => p.coeffs.iter().filter(|c| !c.is_zero()).count() > 1,
            _ => false,
        }
    }

    /// Rational below zero, including constants of a quotient over `Q`.
    pub fn is_negative_rational(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_negative(),
            Scalar::Ext(p) => p.degree() == Some(0) && p.coeffs[0].is_negative_rational(),
            Scalar::Mod(_) => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod(r) => write!(f, "{r}"),
            Scalar::Ext(p) => write!(f, "{p}"),
        }
    }
}

/// Univariate polynomial in `t` over a non-extension field. Coefficients
/// are stored lowest degree first with trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Option<&Scalar> {
        self.coeffs.get(i)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    /// True for the polynomial `t` itself.
    pub fn is_monomial_t(&self) -> bool {
        self.coeffs.len() == 2 && self.coeffs[0].is_zero() && is_one(&self.coeffs[1])
    }
}

fn is_one(s: &Scalar) -> bool {
    match s {
        Scalar::Rat(r) => r.is_one(),
        Scalar::Mod(r) => *r == 1,
        Scalar::Ext(p) => p.coeffs.len() == 1 && is_one(&p.coeffs[0]),
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative_rational();
            let magnitude = match c {
                Scalar::Rat(r) => Scalar::Rat(r.abs()),
                other => other.clone(),
            };
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { "-" } else { "+" })?;
            }
            first = false;
            let unit = is_one(&magnitude);
            match i {
                0 => write!(f, "{magnitude}")?,
                _ => {
                    if !unit {
                        write!(f, "{magnitude}*")?;
                    }
                    if i == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// A Laurent polynomial `t^offset * poly`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    pub poly: Poly,
    pub offset: i64,
}

impl Laurent {
    pub fn new(poly: Poly, offset: i64) -> Self {
        Laurent { poly, offset }
    }

    pub fn from_poly(poly: Poly) -> Self {
        Laurent { poly, offset: 0 }
    }
}

/// Field operations accepted by [`FieldSpec::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Inv,
}

/// A coefficient field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
    /// `base[t]/(modulus)`, with `modulus` monic and irreducible over `base`.
    Quotient { base: Box<FieldSpec>, modulus: Poly },
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(FieldSpec::Prime(p))
    }

    /// Builds `base[t]/(modulus)` after certifying irreducibility.
    pub fn quotient(base: FieldSpec, modulus: Poly) -> Result<Self> {
        if matches!(base, FieldSpec::Quotient { .. }) {
            return Err(Error::InvalidField(
                "the base of a quotient field must be Q or a prime field".into(),
            ));
        }
        for c in modulus.coeffs() {
            if !base.contains(c) {
                return Err(Error::FieldMismatch(format!(
                    "modulus coefficient {c} is not in {base}"
                )));
            }
        }
        match modulus.degree() {
            None | Some(0) => {
                return Err(Error::InvalidField("modulus must have degree >= 1".into()))
            }
            _ => {}
        }
        let modulus = base.poly_monic(&modulus)?;
        if modulus.is_monomial_t() {
            return Err(Error::InvalidField("modulus must differ from t".into()));
        }
        if !is_irreducible(&modulus, &base)? {
            return Err(Error::InvalidField(format!(
                "{modulus} is reducible over {base}"
            )));
        }
        Ok(FieldSpec::Quotient { base: Box::new(base), modulus })
    }

    /// The ground field: `self` unless this is a quotient.
    pub fn base_field(&self) -> &FieldSpec {
        match self {
            FieldSpec::Quotient { base, .. } => base,
            other => other,
        }
    }

    /// Degree over the ground field.
    pub fn degree_over_base(&self) -> usize {
        match self {
            FieldSpec::Quotient { modulus, .. } => modulus.degree().unwrap_or(0),
            _ => 1,
        }
    }

    pub fn modulus(&self) -> Option<&Poly> {
        match self {
            FieldSpec::Quotient { modulus, .. } => Some(modulus),
            _ => None,
        }
    }

    /// The class of `t` in a quotient field.
    pub fn generator(&self) -> Option<Scalar> {
        match self {
            FieldSpec::Quotient { base, modulus } => {
                let t = Poly::new(vec![base.zero(), base.one()]);
                Some(Scalar::Ext(base.poly_rem(&t, modulus).ok()?))
            }
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::zero()),
            FieldSpec::Prime(_) => Scalar::Mod(0),
            FieldSpec::Quotient { .. } => Scalar::Ext(Poly::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::Prime(p) => Scalar::Mod((n as i128).rem_euclid(*p as i128) as u64),
            FieldSpec::Quotient { base, .. } => Scalar::Ext(Poly::new(vec![base.from_i64(n)])),
        }
    }

    /// Maps an exact rational into the field.
    pub fn from_rational(&self, r: &BigRational) -> Result<Scalar> {
        match self {
            FieldSpec::Rationals => Ok(Scalar::Rat(r.clone())),
            FieldSpec::Prime(p) => {
                let p_big = BigInt::from(*p);
                let num = r.numer().mod_floor(&p_big).to_u64().unwrap_or(0);
                let den = r.denom().mod_floor(&p_big).to_u64().unwrap_or(0);
                if den == 0 {
                    return Err(Error::DivisionByZero);
                }
                Ok(self.mul(&Scalar::Mod(num), &self.inv(&Scalar::Mod(den))?))
            }
            FieldSpec::Quotient { base, .. } => {
                Ok(Scalar::Ext(Poly::new(vec![base.from_rational(r)?])))
            }
        }
    }

    /// Embeds an element of the ground field.
    pub fn embed(&self, s: &Scalar) -> Scalar {
        match self {
            FieldSpec::Quotient { .. } if !matches!(s, Scalar::Ext(_)) => {
                Scalar::Ext(Poly::new(vec![s.clone()]))
            }
            _ => s.clone(),
        }
    }

    /// Whether `s` is a canonical element of this field.
    pub fn contains(&self, s: &Scalar) -> bool {
        match (self, s) {
            (FieldSpec::Rationals, Scalar::Rat(_)) => true,
            (FieldSpec::Prime(p), Scalar::Mod(r)) => r < p,
            (FieldSpec::Quotient { base, modulus }, Scalar::Ext(poly)) => {
                poly.coeffs().iter().all(|c| base.contains(c))
                    && poly.coeffs().len() < modulus.coeffs().len()
            }
            _ => false,
        }
    }

    pub fn is_zero(&self, s: &Scalar) -> bool {
        s.is_zero()
    }

    pub fn is_one(&self, s: &Scalar) -> bool {
        is_one(s)
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (FieldSpec::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => {
                Scalar::Mod(((*x as u128 + *y as u128) % *p as u128) as u64)
            }
            (FieldSpec::Quotient { base, .. }, Scalar::Ext(x), Scalar::Ext(y)) => {
                Scalar::Ext(base.poly_add(x, y))
            }
            _ => panic!("scalar {a} or {b} does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldSpec::Rationals, Scalar::Rat(x)) => Scalar::Rat(-x),
            (FieldSpec::Prime(p), Scalar::Mod(x)) => Scalar::Mod((p - x) % p),
            (FieldSpec::Quotient { base, .. }, Scalar::Ext(x)) => Scalar::Ext(base.poly_neg(x)),
            _ => panic!("scalar {a} does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (FieldSpec::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => {
                Scalar::Mod(((*x as u128 * *y as u128) % *p as u128) as u64)
            }
            (FieldSpec::Quotient { base, modulus }, Scalar::Ext(x), Scalar::Ext(y)) => {
                let prod = base.poly_mul(x, y);
                Scalar::Ext(base.poly_rem(&prod, modulus).expect("modulus is nonzero"))
            }
            _ => panic!("scalar {a} or {b} does not belong to {self}"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match (self, a) {
            (FieldSpec::Rationals, Scalar::Rat(x)) => Ok(Scalar::Rat(x.recip())),
            (FieldSpec::Prime(p), Scalar::Mod(x)) => {
                let (g, s, _) = ext_gcd_i128(*x as i128, *p as i128);
                debug_assert_eq!(g, 1);
                Ok(Scalar::Mod(s.rem_euclid(*p as i128) as u64))
            }
            (FieldSpec::Quotient { base, modulus }, Scalar::Ext(x)) => {
                let (g, s, _) = base.poly_ext_gcd(x, modulus)?;
                // g is a nonzero constant because the modulus is irreducible
                let g0 = g.coeff(0).cloned().ok_or(Error::DivisionByZero)?;
                if g.degree() != Some(0) {
                    return Err(Error::DivisionByZero);
                }
                let scale = base.inv(&g0)?;
                let s = base.poly_scale(&s, &scale);
                Ok(Scalar::Ext(base.poly_rem(&s, modulus)?))
            }
            _ => Err(Error::FieldMismatch(format!("{a} is not in {self}"))),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, a: &Scalar, e: i64) -> Result<Scalar> {
        let mut base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Checked arithmetic entry point: validates operand membership first.
    pub fn arith(&self, op: ArithOp, a: &Scalar, b: Option<&Scalar>) -> Result<Scalar> {
        let check = |s: &Scalar| {
            if self.contains(s) {
                Ok(())
            } else {
                Err(Error::FieldMismatch(format!("{s} is not an element of {self}")))
            }
        };
        check(a)?;
        if let Some(b) = b {
            check(b)?;
        }
        let need_b = || b.ok_or_else(|| Error::Precondition("binary operation needs two operands".into()));
        match op {
            ArithOp::Add => Ok(self.add(a, need_b()?)),
            ArithOp::Mul => Ok(self.mul(a, need_b()?)),
            ArithOp::Neg => Ok(self.neg(a)),
            ArithOp::Inv => self.inv(a),
        }
    }

    /// Coordinates over the ground field in the basis `1, t, ..., t^{d-1}`.
    pub fn base_coords(&self, s: &Scalar) -> Vec<Scalar> {
        match (self, s) {
            (FieldSpec::Quotient { base, modulus }, Scalar::Ext(p)) => {
                let d = modulus.degree().unwrap_or(0);
                (0..d).map(|i| p.coeff(i).cloned().unwrap_or_else(|| base.zero())).collect()
            }
            _ => vec![s.clone()],
        }
    }

    /// Inverse of [`FieldSpec::base_coords`].
    pub fn from_base_coords(&self, coords: &[Scalar]) -> Scalar {
        match self {
            FieldSpec::Quotient { .. } => Scalar::Ext(Poly::new(coords.to_vec())),
            _ => coords.first().cloned().unwrap_or_else(|| self.zero()),
        }
    }

    /// Basis of this field over its ground field.
    pub fn base_basis(&self) -> Vec<Scalar> {
        let d = self.degree_over_base();
        let base = self.base_field();
        (0..d)
            .map(|i| {
                let mut coords = vec![base.zero(); d];
                coords[i] = base.one();
                self.from_base_coords(&coords)
            })
            .collect()
    }

    /// Every element, for finite fields of at most `limit` elements.
    pub fn elements(&self, limit: u64) -> Option<Vec<Scalar>> {
        match self {
            FieldSpec::Rationals => None,
            FieldSpec::Prime(p) => (*p <= limit).then(|| (0..*p).map(Scalar::Mod).collect()),
            FieldSpec::Quotient { base, modulus } => {
                let p = match **base {
                    FieldSpec::Prime(p) => p,
                    _ => return None,
                };
                let d = modulus.degree()? as u32;
                let size = p.checked_pow(d)?;
                if size > limit {
                    return None;
                }
                Some(
                    (0..size)
                        .map(|mut n| {
                            let coords: Vec<Scalar> = (0..d)
                                .map(|_| {
                                    let c = Scalar::Mod(n % p);
                                    n /= p;
                                    c
                                })
                                .collect();
                            Scalar::Ext(Poly::new(coords))
                        })
                        .collect(),
                )
            }
        }
    }

    /// Parses a scalar literal: an integer, a fraction, or (in a quotient
    /// field) a polynomial in `t`.
    pub fn parse_scalar(&self, text: &str) -> Result<Scalar> {
        let base = self.base_field();
        let poly = parse_poly(text, base)?;
        match self {
            FieldSpec::Quotient { modulus, .. } => Ok(Scalar::Ext(base.poly_rem(&poly, modulus)?)),
            _ => match poly.degree() {
                None => Ok(self.zero()),
                Some(0) => Ok(poly.coeffs()[0].clone()),
                Some(_) => Err(Error::Parse(format!("`{text}` is not an element of {self}"))),
            },
        }
    }

    /// Evaluates a Laurent polynomial (over the ground field) at `a`.
    pub fn eval(&self, g: &Laurent, a: &Scalar) -> Result<Scalar> {
        if g.offset < 0 && a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let value = self.eval_poly(&g.poly, a);
        if value.is_zero() {
            return Ok(value);
        }
        Ok(self.mul(&self.pow(a, g.offset)?, &value))
    }

    /// Horner evaluation of a ground-field polynomial at an element of `self`.
    pub fn eval_poly(&self, g: &Poly, a: &Scalar) -> Scalar {
        let mut acc = self.zero();
        for c in g.coeffs().iter().rev() {
            acc = self.add(&self.mul(&acc, a), &self.embed(c));
        }
        acc
    }

    // ---- polynomial arithmetic with coefficients in `self` ----

    pub fn poly_add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.coeffs.len().max(b.coeffs.len());
        let zero = self.zero();
        Poly::new(
            (0..n)
                .map(|i| {
                    self.add(a.coeffs.get(i).unwrap_or(&zero), b.coeffs.get(i).unwrap_or(&zero))
                })
                .collect(),
        )
    }

    pub fn poly_neg(&self, a: &Poly) -> Poly {
        Poly::new(a.coeffs.iter().map(|c| self.neg(c)).collect())
    }

    pub fn poly_sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.poly_add(a, &self.poly_neg(b))
    }

    pub fn poly_scale(&self, a: &Poly, s: &Scalar) -> Poly {
        Poly::new(a.coeffs.iter().map(|c| self.mul(c, s)).collect())
    }

    pub fn poly_mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![self.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        Poly::new(out)
    }

    pub fn poly_divrem(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = self.inv(b.leading().expect("nonzero"))?;
        let mut rem = a.coeffs.clone();
        let mut quot = vec![self.zero(); a.coeffs.len().saturating_sub(db).max(1)];
        while rem.len() > db && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = self.mul(&rem[top], &lead_inv);
            if !c.is_zero() {
                let shift = top - db;
                quot[shift] = c.clone();
                for (j, bj) in b.coeffs.iter().enumerate() {
                    rem[shift + j] = self.sub(&rem[shift + j], &self.mul(&c, bj));
                }
            }
            rem.pop();
            while rem.last().is_some_and(Scalar::is_zero) {
                rem.pop();
            }
        }
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    pub fn poly_rem(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        Ok(self.poly_divrem(a, b)?.1)
    }

    pub fn poly_monic(&self, a: &Poly) -> Result<Poly> {
        let lead = a.leading().ok_or(Error::DivisionByZero)?;
        Ok(self.poly_scale(a, &self.inv(lead)?))
    }

    /// Returns `(g, s, t)` with `g = s*a + t*b`.
    pub fn poly_ext_gcd(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly, Poly)> {
        let one = Poly::new(vec![self.one()]);
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (one.clone(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), one);
        while !r1.is_zero() {
            let (q, r) = self.poly_divrem(&r0, &r1)?;
            let s2 = self.poly_sub(&s0, &self.poly_mul(&q, &s1));
            let t2 = self.poly_sub(&t0, &self.poly_mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        Ok((r0, s0, t0))
    }

    pub fn poly_eval(&self, g: &Poly, a: &Scalar) -> Scalar {
        self.eval_poly(g, a)
    }
}

fn ext_gcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, s0, t0)
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "F{p}"),
            FieldSpec::Quotient { base, modulus } => write!(f, "{base}[t]/({modulus})"),
        }
    }
}

impl std::str::FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `Q`, `F<p>`, `F<p>[t]/(<poly>)` and `Q[t]/(<poly>)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((base, rest)) = s.split_once("[t]/") {
            let base: FieldSpec = base.parse()?;
            let inner = rest
                .trim()
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected `(<poly>)` in `{s}`")))?;
            let modulus = parse_poly(inner, &base)?;
            return FieldSpec::quotient(base, modulus);
        }
        if s == "Q" {
            return Ok(FieldSpec::Rationals);
        }
        if let Some(digits) = s.strip_prefix('F') {
            let p: u64 = digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime field `{s}`")))?;
            return FieldSpec::prime(p);
        }
        Err(Error::Parse(format!("unrecognised field `{s}`")))
    }
}

/// Parses `t^2+t+1`, `2*t - 1/3`, `-t^3+2t` into a polynomial over `base`.
pub fn parse_poly(text: &str, base: &FieldSpec) -> Result<Poly> {
    let src: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let bad = || Error::Parse(format!("malformed polynomial `{text}`"));
    let mut terms: Vec<(BigRational, usize)> = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = BigRational::one();
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        } else if i != 0 {
            return Err(bad());
        }
        let start = i;
        while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            i += 1;
        }
        let term = &src[start..i];
        if term.is_empty() {
            return Err(bad());
        }
        let (coef_txt, var_txt) = match term.find('t') {
            Some(pos) => (term[..pos].trim_end_matches('*'), Some(&term[pos..])),
            None => (term, None),
        };
        let coef = if coef_txt.is_empty() {
            BigRational::one()
        } else {
            parse_rational(coef_txt).ok_or_else(bad)?
        };
        let exp = match var_txt {
            None => 0,
            Some("t") => 1,
            Some(v) => v
                .strip_prefix("t^")
                .and_then(|e| e.parse::<usize>().ok())
                .ok_or_else(bad)?,
        };
        terms.push((sign * coef, exp));
    }
    let top = terms.iter().map(|(_, e)| *e).max().unwrap_or(0);
    let mut coeffs = vec![base.zero(); top + 1];
    for (c, e) in terms {
        let c = base.from_rational(&c)?;
        coeffs[e] = base.add(&coeffs[e], &c);
    }
    Ok(Poly::new(coeffs))
}

/// Parses `n` or `n/d` with an optional leading minus.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Irreducibility over a prime field (exact, by trial division) or over
/// the rationals (exact up to degree 3, by the rational root test).
pub fn is_irreducible(f: &Poly, base: &FieldSpec) -> Result<bool> {
    let deg = match f.degree() {
        None | Some(0) => {
            return Err(Error::Precondition("irreducibility needs degree >= 1".into()))
        }
        Some(d) => d,
    };
    match base {
        FieldSpec::Prime(p) => {
            if deg == 1 {
                return Ok(true);
            }
            let candidates = enumerate_irreducibles(*p, deg / 2)?;
            for g in &candidates {
                if base.poly_rem(f, g)?.is_zero() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        FieldSpec::Rationals => {
            if deg == 1 {
                return Ok(true);
            }
            if deg > 3 {
                return Err(Error::CannotCertify(format!(
                    "degree {deg} over Q exceeds the supported bound of 3"
                )));
            }
            Ok(!has_rational_root(f))
        }
        FieldSpec::Quotient { .. } => Err(Error::UnsupportedField(format!(
            "irreducibility over {base}"
        ))),
    }
}

fn has_rational_root(f: &Poly) -> bool {
    let rats: Vec<BigRational> = f
        .coeffs()
        .iter()
        .map(|c| match c {
            Scalar::Rat(r) => r.clone(),
            _ => unreachable!("rational polynomial expected"),
        })
        .collect();
    let lcm = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = rats.iter().map(|r| (r * &lcm).to_integer()).collect();
    if ints[0].is_zero() {
        return true;
    }
    let lead = ints.last().expect("nonzero polynomial");
    let eval = |r: &BigRational| {
        ints.iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * r + BigRational::from_integer(c.clone()))
    };
    for p in divisors(&ints[0].abs()) {
        for q in divisors(&lead.abs()) {
            for sign in [1, -1] {
                let cand = BigRational::new(BigInt::from(sign) * &p, q.clone());
                if eval(&cand).is_zero() {
                    return true;
                }
            }
        }
    }
    false
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            let other = n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out
}

/// All monic irreducible polynomials over `F_p` of degree at most
/// `max_deg`, ordered by degree and then by coefficients read from the top.
pub fn enumerate_irreducibles(p: u64, max_deg: usize) -> Result<Vec<Poly>> {
    let field = FieldSpec::prime(p)?;
    let mut found: Vec<Poly> = Vec::new();
    for deg in 1..=max_deg {
        let count = p
            .checked_pow(deg as u32)
            .filter(|c| *c <= 50_000_000)
            .ok_or_else(|| Error::Precondition(format!("F{p} degree {deg} is too large to enumerate")))?;
        for n in 0..count {
            let mut rest = n;
            let mut coeffs: Vec<Scalar> = (0..deg)
                .map(|_| {
                    let c = Scalar::Mod(rest % p);
                    rest /= p;
                    c
                })
                .collect();
            coeffs.push(Scalar::Mod(1));
            let f = Poly::new(coeffs);
            let mut irreducible = true;
            for g in found.iter().take_while(|g| g.degree().unwrap_or(0) * 2 <= deg) {
                if field.poly_rem(&f, g)?.is_zero() {
                    irreducible = false;
                    break;
                }
            }
            if irreducible {
                found.push(f);
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(text: &str, base: &FieldSpec) -> Poly {
        parse_poly(text, base).unwrap()
    }

    #[test]
    fn inverse_in_f5() {
        let f = FieldSpec::prime(5).unwrap();
        assert_eq!(f.arith(ArithOp::Inv, &Scalar::Mod(2), None).unwrap(), Scalar::Mod(3));
    }

    #[test]
    fn quotient_product() {
        let f: FieldSpec = "F2[t]/(t^2+t+1)".parse().unwrap();
        let t = f.generator().unwrap();
        let t1 = f.add(&t, &f.one());
        assert_eq!(f.mul(&t, &t1), f.one());
        assert_eq!(f.inv(&t).unwrap(), t1);
    }

    #[test]
    fn rational_sum() {
        let q = FieldSpec::Rationals;
        let a = q.parse_scalar("2/3").unwrap();
        let b = q.parse_scalar("1/6").unwrap();
        assert_eq!(q.add(&a, &b).to_string(), "5/6");
    }

    #[test]
    fn division_by_zero_and_mismatch() {
        let q = FieldSpec::Rationals;
        assert_eq!(q.inv(&q.zero()), Err(Error::DivisionByZero));
        assert!(matches!(
            q.arith(ArithOp::Add, &Scalar::Mod(1), Some(&q.one())),
            Err(Error::FieldMismatch(_))
        ));
    }

    #[test]
    fn irreducibility_examples() {
        let f2 = FieldSpec::Prime(2);
        let f5 = FieldSpec::Prime(5);
        let q = FieldSpec::Rationals;
        assert!(is_irreducible(&poly("t^2+t+1", &f2), &f2).unwrap());
        assert!(!is_irreducible(&poly("t^2-1", &q), &q).unwrap());
        assert!(!is_irreducible(&poly("t^2+1", &f5), &f5).unwrap());
        assert!(is_irreducible(&poly("t^2+1", &q), &q).unwrap());
        assert!(is_irreducible(&poly("t^3-2", &q), &q).unwrap());
        assert!(!is_irreducible(&poly("2*t^3-t^2-1/2*t", &q), &q).unwrap());
        assert!(matches!(
            is_irreducible(&poly("t^4+1", &q), &q),
            Err(Error::CannotCertify(_))
        ));
    }

    #[test]
    fn irreducible_enumeration() {
        let show = |p, d| {
            enumerate_irreducibles(p, d)
                .unwrap()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
        };
        assert_eq!(show(2, 2), ["t", "t+1", "t^2+t+1"]);
        assert_eq!(show(2, 1), ["t", "t+1"]);
        assert_eq!(show(3, 1), ["t", "t+1", "t+2"]);
        assert_eq!(show(2, 3)[3..], ["t^3+t+1", "t^3+t^2+1"]);
    }

    #[test]
    fn laurent_evaluation() {
        let q = FieldSpec::Rationals;
        let a = q.from_i64(3);
        let b = q.from_i64(7);
        let t_cubed = Laurent::new(poly("1", &q), 3);
        assert_eq!(q.eval(&t_cubed, &a).unwrap(), q.from_i64(27));
        let t_inv = Laurent::new(poly("1", &q), -2);
        assert_eq!(q.eval(&t_inv, &a).unwrap().to_string(), "1/9");
        assert_eq!(q.eval(&Laurent::from_poly(poly("1", &q)), &a).unwrap(), q.one());
        // g = t - a + b sends a to b
        let g = Laurent::from_poly(poly("t+4", &q));
        assert_eq!(q.eval(&g, &a).unwrap(), b);
        assert_eq!(q.eval(&t_inv, &q.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn field_strings_round_trip() {
        for text in ["Q", "F7", "F2[t]/(t^2+t+1)", "Q[t]/(t^2+1)", "F3[t]/(t^2+1)"] {
            let f: FieldSpec = text.parse().unwrap();
            assert_eq!(f.to_string(), text);
        }
        assert!("F4".parse::<FieldSpec>().is_err());
        assert!("F2[t]/(t^2+1)".parse::<FieldSpec>().is_err());
        assert!("F3[t]/(t)".parse::<FieldSpec>().is_err());
        assert!("Q[t]/(t^4+1)".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn printing_signed_rational_polys() {
        let q = FieldSpec::Rationals;
        let p = poly("-1/3*t^2+t-1", &q);
        assert_eq!(p.to_string(), "-1/3*t^2+t-1");
        assert_eq!(parse_poly(&p.to_string(), &q).unwrap(), p);
    }

    #[test]
    fn quotient_sizes_are_exhaustive() {
        for text in ["F2[t]/(t^2+t+1)", "F3[t]/(t^2+1)", "F3[t]/(t^3+2*t+1)", "F2[t]/(t^3+t+1)"] {
            let f: FieldSpec = text.parse().unwrap();
            let elems = f.elements(81).unwrap();
            let p = match f.base_field() {
                FieldSpec::Prime(p) => *p,
                _ => unreachable!(),
            };
            let expected = p.pow(f.degree_over_base() as u32) as usize;
            let distinct: std::collections::BTreeSet<_> = elems.iter().collect();
            assert_eq!(distinct.len(), expected);
            for x in &elems {
                assert!(f.contains(x));
                if !x.is_zero() {
                    assert_eq!(f.mul(x, &f.inv(x).unwrap()), f.one());
                }
            }
        }
    }
}
