//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use leavitt::boundary::{parse_point, BoundaryPoint, RuleRegistry};
use leavitt::field::{FieldSpec, Scalar};
use leavitt::graph::{reference, Digraph, EdgeId, FinPath, VertexId};
use leavitt::lpa::{Algebra, AlgebraElement, Monomial, TwistParam};
use leavitt::module::PointVector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn graphs() -> Vec<(&'static str, Arc<Digraph>)> {
    vec![
        ("R1", Arc::new(reference::r1())),
        ("R2", Arc::new(reference::r2())),
        ("A2", Arc::new(reference::a2())),
        ("A3", Arc::new(reference::line(3))),
        ("T", Arc::new(reference::toeplitz())),
    ]
}

pub fn fields() -> Vec<FieldSpec> {
    ["Q", "F2", "F5"].iter().map(|k| k.parse().unwrap()).collect()
}

pub fn field(text: &str) -> FieldSpec {
    text.parse().unwrap()
}

pub fn point(g: &Digraph, value: serde_json::Value) -> Arc<BoundaryPoint> {
    Arc::new(parse_point(g, &value, &RuleRegistry::builtin()).unwrap())
}

/// The built-in aperiodic point on the two-loop graph.
pub fn irrational_r2(g: &Digraph) -> Arc<BoundaryPoint> {
    point(g, json!({"irrational": {"rule": "thue-morse", "params": {"e": "e", "f": "f"}}}))
}

pub fn twist(g: &Digraph, k: &FieldSpec, weights: &[(&str, &str)]) -> TwistParam {
    TwistParam::new(k, weights.iter().map(|(e, w)| (g.edge(e).unwrap(), k.parse_scalar(w).unwrap()))).unwrap()
}

/// Nonzero scalar with small numerator and denominator.
pub fn random_scalar(k: &FieldSpec, rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let s = match k {
            FieldSpec::Rationals => {
                let n: i64 = rng.gen_range(-4..=4);
                let d: i64 = rng.gen_range(1..=3);
                k.parse_scalar(&format!("{n}/{d}")).unwrap()
            }
            FieldSpec::Prime(_) => k.from_i64(rng.gen_range(0..50)),
            FieldSpec::Quotient { .. } => {
                let coords: Vec<Scalar> =
                    (0..k.degree_over_base()).map(|_| k.base_field().from_i64(rng.gen_range(0..50))).collect();
                k.from_base_coords(&coords)
            }
        };
        if !s.is_zero() {
            return s;
        }
    }
}

/// Random path of length at most `max_len` ending at `v`, built backwards.
pub fn random_path_to(g: &Digraph, v: VertexId, max_len: usize, rng: &mut ChaCha8Rng) -> FinPath {
    let len = rng.gen_range(0..=max_len);
    let mut edges: Vec<EdgeId> = Vec::new();
    let mut at = v;
    for _ in 0..len {
        let Some(&e) = g.in_edges(at).choose(rng) else { break };
        edges.push(e);
        at = g.src(e);
    }
    if edges.is_empty() {
        return FinPath::trivial(v);
    }
    edges.reverse();
    g.path(&edges).unwrap()
}

pub fn random_monomial(g: &Digraph, max_len: usize, rng: &mut ChaCha8Rng) -> Monomial {
    let vs: Vec<VertexId> = g.vertices().collect();
    let v = *vs.choose(rng).unwrap();
    let mu = random_path_to(g, v, max_len, rng);
    let nu = random_path_to(g, v, max_len, rng);
    Monomial::new(mu, nu).unwrap()
}

/// Unreduced terms: the element as the user wrote it.
pub fn random_raw(g: &Digraph, k: &FieldSpec, terms: usize, max_len: usize, rng: &mut ChaCha8Rng) -> Vec<(Monomial, Scalar)> {
    let n = rng.gen_range(1..=terms);
    (0..n).map(|_| (random_monomial(g, max_len, rng), random_scalar(k, rng))).collect()
}

pub fn random_element(alg: &Algebra, terms: usize, max_len: usize, rng: &mut ChaCha8Rng) -> AlgebraElement {
    alg.reduce_terms(random_raw(alg.graph(), alg.field(), terms, max_len, rng))
}

/// A boundary-path vector as explicit edge words: `(source, first edges) ↦ coefficient`.
pub type Words = BTreeMap<(VertexId, Vec<EdgeId>), Scalar>;

fn add_word(k: &FieldSpec, out: &mut Words, key: (VertexId, Vec<EdgeId>), c: Scalar) {
    let sum = match out.remove(&key) {
        Some(old) => k.add(&old, &c),
        None => c,
    };
    if !sum.is_zero() {
        out.insert(key, sum);
    }
}

/// Expands every class element of `v` to its first `n` edges.
pub fn to_words(k: &FieldSpec, v: &PointVector, n: usize) -> Words {
    let mut out = Words::new();
    for (y, c) in v.terms() {
        add_word(k, &mut out, (y.source(), y.expand(n)), c.clone());
    }
    out
}

/// Cuts words to their first `n` edges.
pub fn truncate(k: &FieldSpec, w: &Words, n: usize) -> Words {
    let mut out = Words::new();
    for ((s, word), c) in w {
        add_word(k, &mut out, (*s, word.iter().copied().take(n).collect()), c.clone());
    }
    out
}

/// The Chen action computed from its definition on edge words: `μν*`
/// strips `ν` from the front and prepends `μ`, scaled by `a_μ a_ν^{-1}`.
/// Works with unreduced terms, so it never sees the normal form.
pub fn oracle_act(k: &FieldSpec, a: &TwistParam, raw: &[(Monomial, Scalar)], v: &Words) -> Words {
    let weight = |p: &FinPath| p.edges().iter().fold(k.one(), |acc, e| k.mul(&acc, &k.embed(&a.weight(k, *e))));
    let mut out = Words::new();
    for (m, c) in raw {
        let (mu, nu) = (m.mu(), m.nu());
        let scale = k.div(&weight(mu), &weight(nu)).unwrap();
        for ((src, word), d) in v {
            if *src != nu.src() || !word.starts_with(nu.edges()) {
                continue;
            }
            let mut new_word = mu.edges().to_vec();
            new_word.extend_from_slice(&word[nu.len()..]);
            let coeff = k.mul(&k.mul(&k.embed(c), d), &scale);
            add_word(k, &mut out, (mu.src(), new_word), coeff);
        }
    }
    out
}

/// All monic polynomials over `F_p` of degree `d`, as coefficient vectors
/// (constant term first), for brute-force factor sieves.
pub fn monic_polys(p: u64, d: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let count = p.pow(d as u32);
    for mut n in 0..count {
        let mut coeffs = Vec::with_capacity(d + 1);
        for _ in 0..d {
            coeffs.push(n % p);
            n /= p;
        }
        coeffs.push(1);
        out.push(coeffs);
    }
    out
}

pub fn poly_mul_mod(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

/// Monic irreducibles over `F_p` up to degree `d` by sieving out products.
pub fn sieve_irreducibles(p: u64, max_deg: usize) -> Vec<Vec<u64>> {
    let mut reducible = std::collections::BTreeSet::new();
    for d1 in 1..=max_deg {
        for d2 in d1..=max_deg.saturating_sub(d1) {
            for a in monic_polys(p, d1) {
                for b in monic_polys(p, d2) {
                    reducible.insert(poly_mul_mod(p, &a, &b));
                }
            }
        }
    }
    (1..=max_deg).flat_map(|d| monic_polys(p, d)).filter(|f| !reducible.contains(f)).collect()
}
