//! Boundary paths, tail-equivalence classes and their canonical elements.
//!
//! A boundary path is a finite path ending at a sink, an eventually periodic
//! infinite path `prefix · cycle^∞`, or an aperiodic infinite path produced
//! by a named generator. Elements of a tail-equivalence class `[x]` are
//! written `μ · σ^k(x)` and kept in a reduced form that makes equality
//! structural.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{primitive_period, Digraph, EdgeId, FinPath, SimpleClosedPath, VertexId};

/// Default truncation depth for orbit searches, restrictions and checks.
pub const DEFAULT_DEPTH: usize = 8;

/// A rule producing the `i`-th edge of an aperiodic infinite path.
pub trait TailRule: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    /// Name plus parameters; two rules with equal descriptors produce equal words.
    fn descriptor(&self) -> String;
    fn edge_at(&self, i: usize) -> EdgeId;
}

type RuleBuilder = fn(&Digraph, &Value) -> Result<Box<dyn TailRule>>;

/// Named built-in generators for irrational points.
pub struct RuleRegistry {
    builders: BTreeMap<&'static str, (RuleBuilder, &'static str)>,
}

impl RuleRegistry {
    pub fn empty() -> Self {
        RuleRegistry { builders: BTreeMap::new() }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(
            "thue-morse-like",
            build_block_rule,
            "blocks e, f, ee, ff, eee, fff, ... over two loops at one vertex",
        );
        reg.register(
            "thue-morse",
            build_thue_morse_rule,
            "e/f by the parity of the binary digit sum of the index, over two loops",
        );
        reg
    }

    pub fn register(&mut self, name: &'static str, build: RuleBuilder, doc: &'static str) {
        self.builders.insert(name, (build, doc));
    }

    pub fn names(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.builders.iter().map(|(k, (_, doc))| (*k, *doc))
    }

    pub fn build(&self, g: &Digraph, name: &str, params: &Value) -> Result<Box<dyn TailRule>> {
        let (build, _) = self
            .builders
            .get(name)
            .ok_or_else(|| Error::Unknown { kind: "irrational rule", name: name.to_string() })?;
        build(g, params)
    }
}

fn two_loops(g: &Digraph, params: &Value) -> Result<(EdgeId, EdgeId, String, String)> {
    let pick = |key: &str| -> Result<(EdgeId, String)> {
        let name = params.get(key).and_then(Value::as_str).unwrap_or(key).to_string();
        let id = g
            .edge(&name)
            .ok_or_else(|| Error::InvalidPoint(format!("unknown edge `{name}` for parameter `{key}`")))?;
        Ok((id, name))
    };
    let (e, en) = pick("e")?;
    let (f, fname) = pick("f")?;
    let v = g.src(e);
    if e == f || g.dst(e) != v || g.src(f) != v || g.dst(f) != v {
        return Err(Error::InvalidPoint(format!(
            "`{en}` and `{fname}` must be distinct loops at one vertex"
        )));
    }
    Ok((e, f, en, fname))
}

#[derive(Debug)]
struct BlockRule {
    e: EdgeId,
    f: EdgeId,
    label: String,
}

impl TailRule for BlockRule {
    fn name(&self) -> &'static str {
        "thue-morse-like"
    }

    fn descriptor(&self) -> String {
        self.label.clone()
    }

    fn edge_at(&self, i: usize) -> EdgeId {
        // the j-th pair e^j f^j starts at j(j-1)
        let mut j = ((i as f64).sqrt() as usize).max(1);
        while j * (j - 1) > i {
            j -= 1;
        }
        while (j + 1) * j <= i {
            j += 1;
        }
        if i - j * (j - 1) < j {
            self.e
        } else {
            self.f
        }
    }
}

fn build_block_rule(g: &Digraph, params: &Value) -> Result<Box<dyn TailRule>> {
    let (e, f, en, fname) = two_loops(g, params)?;
    Ok(Box::new(BlockRule { e, f, label: format!("thue-morse-like({en},{fname})") }))
}

#[derive(Debug)]
struct ThueMorseRule {
    e: EdgeId,
    f: EdgeId,
    label: String,
}

impl TailRule for ThueMorseRule {
    fn name(&self) -> &'static str {
        "thue-morse"
    }

    fn descriptor(&self) -> String {
        self.label.clone()
    }

    fn edge_at(&self, i: usize) -> EdgeId {
        if i.count_ones() % 2 == 0 {
            self.e
        } else {
            self.f
        }
    }
}

fn build_thue_morse_rule(g: &Digraph, params: &Value) -> Result<Box<dyn TailRule>> {
    let (e, f, en, fname) = two_loops(g, params)?;
    Ok(Box::new(ThueMorseRule { e, f, label: format!("thue-morse({en},{fname})") }))
}

/// An aperiodic edge stream with a memoized prefix.
#[derive(Debug)]
pub struct IrrationalStream {
    rule: Box<dyn TailRule>,
    memo: Mutex<Vec<EdgeId>>,
    source: VertexId,
}

/// Length of the memoized prefix inspected when a stream is admitted.
pub const APERIODICITY_PROBE: usize = 512;

impl IrrationalStream {
    /// Wraps `rule`, checking composability and spot-checking aperiodicity
    /// on the first [`APERIODICITY_PROBE`] edges.
    pub fn new(g: &Digraph, rule: Box<dyn TailRule>) -> Result<Self> {
        let source = g.src(rule.edge_at(0));
        let stream = IrrationalStream { rule, memo: Mutex::new(Vec::new()), source };
        let word = stream.prefix(APERIODICITY_PROBE);
        for w in word.windows(2) {
            if g.dst(w[0]) != g.src(w[1]) {
                return Err(Error::InvalidPoint(format!(
                    "generator `{}` emits non-composable edges",
                    stream.rule.descriptor()
                )));
            }
        }
        if let Some(p) = small_tail_period(&word) {
            return Err(Error::InvalidPoint(format!(
                "generator `{}` looks eventually periodic with period {p}",
                stream.rule.descriptor()
            )));
        }
        Ok(stream)
    }

    pub fn descriptor(&self) -> String {
        self.rule.descriptor()
    }

    pub fn edge(&self, i: usize) -> EdgeId {
        let mut memo = self.memo.lock().expect("memo lock poisoned");
        while memo.len() <= i {
            let next = self.rule.edge_at(memo.len());
            memo.push(next);
        }
        memo[i]
    }

    pub fn prefix(&self, n: usize) -> Vec<EdgeId> {
        if n == 0 {
            return Vec::new();
        }
        self.edge(n - 1);
        self.memo.lock().expect("memo lock poisoned")[..n].to_vec()
    }

    pub fn memo_len(&self) -> usize {
        self.memo.lock().expect("memo lock poisoned").len()
    }

    pub fn source(&self) -> VertexId {
        self.source
    }
}

/// A period `p <= len/4` of the second half of `word`, if any.
fn small_tail_period(word: &[EdgeId]) -> Option<usize> {
    let half = &word[word.len() / 2..];
    (1..=word.len() / 4).find(|&p| (p..half.len()).all(|i| half[i] == half[i - p]))
}

/// A point of the boundary path space.
#[derive(Clone, Debug)]
pub enum BoundaryPoint {
    /// Finite path whose range is a sink.
    Sink(FinPath),
    /// `prefix · cycle^∞` in strip-and-rotate normal form: `cycle` is
    /// primitive, starts at `r(prefix)`, and `prefix` does not end with the
    /// last edge of `cycle`.
    Rational { prefix: FinPath, cycle: FinPath },
    /// The stream read from position `offset` on.
    Irrational { stream: Arc<IrrationalStream>, offset: usize },
}

impl BoundaryPoint {
    pub fn sink(g: &Digraph, path: FinPath) -> Result<Self> {
        if !g.is_sink(path.dst()) {
            return Err(Error::InvalidPoint(format!(
                "{} does not end at a sink",
                g.show_path(&path)
            )));
        }
        Ok(BoundaryPoint::Sink(path))
    }

    /// `prefix · cycle^∞`; `cycle` may be any closed path starting at `r(prefix)`.
    pub fn rational(g: &Digraph, prefix: FinPath, cycle: &FinPath) -> Result<Self> {
        if !cycle.is_closed() {
            return Err(Error::NotClosed);
        }
        if cycle.src() != prefix.dst() {
            return Err(Error::NotComposable {
                range: g.vertex_name(prefix.dst()).to_string(),
                source_vertex: g.vertex_name(cycle.src()).to_string(),
            });
        }
        let p = primitive_period(cycle.edges());
        let mut word = cycle.edges()[..p].to_vec();
        let mut prefix = prefix;
        while let Some(last) = prefix.last_edge() {
            if last != *word.last().expect("nonempty cycle") {
                break;
            }
            prefix = prefix.pop(g).expect("nonempty prefix");
            word.rotate_right(1);
        }
        let cycle = g.path(&word)?;
        Ok(BoundaryPoint::Rational { prefix, cycle })
    }

    pub fn irrational(g: &Digraph, rule: Box<dyn TailRule>) -> Result<Self> {
        Ok(BoundaryPoint::Irrational { stream: Arc::new(IrrationalStream::new(g, rule)?), offset: 0 })
    }

    /// `c^∞` for a simple closed path.
    pub fn cycle_point(g: &Digraph, c: &SimpleClosedPath) -> Self {
        BoundaryPoint::rational(g, FinPath::trivial(c.path().src()), c.path())
            .expect("simple closed paths give rational points")
    }

    /// The trivial path at a sink.
    pub fn sink_vertex(g: &Digraph, w: VertexId) -> Result<Self> {
        Self::sink(g, FinPath::trivial(w))
    }

    pub fn is_infinite(&self) -> bool {
        !matches!(self, BoundaryPoint::Sink(_))
    }

    pub fn finite_len(&self) -> Option<usize> {
        match self {
            BoundaryPoint::Sink(p) => Some(p.len()),
            _ => None,
        }
    }

    /// The edge at 0-based position `i`, if the path is that long.
    pub fn edge_at(&self, i: usize) -> Option<EdgeId> {
        match self {
            BoundaryPoint::Sink(p) => p.edges().get(i).copied(),
            BoundaryPoint::Rational { prefix, cycle } => {
                if i < prefix.len() {
                    Some(prefix.edges()[i])
                } else {
                    Some(cycle.edges()[(i - prefix.len()) % cycle.len()])
                }
            }
            BoundaryPoint::Irrational { stream, offset } => Some(stream.edge(offset + i)),
        }
    }

    pub fn source(&self, g: &Digraph) -> VertexId {
        self.source_after(g, 0)
    }

    /// `s(σ^k(x))`; for a finite path of length `k` this is its range.
    pub fn source_after(&self, g: &Digraph, k: usize) -> VertexId {
        match self {
            BoundaryPoint::Sink(p) if k >= p.len() => p.dst(),
            BoundaryPoint::Irrational { stream, offset } if k == 0 && *offset == 0 => stream.source(),
            _ => g.src(self.edge_at(k).expect("position inside the path")),
        }
    }

    /// First `n` edges (all of them for a shorter finite path).
    pub fn expand(&self, n: usize) -> Vec<EdgeId> {
        match self {
            BoundaryPoint::Sink(p) => p.edges()[..n.min(p.len())].to_vec(),
            BoundaryPoint::Irrational { stream, offset } => {
                stream.prefix(offset + n)[*offset..].to_vec()
            }
            _ => (0..n).filter_map(|i| self.edge_at(i)).collect(),
        }
    }

    /// The first `n` edges as a path (trivial at `s(x)` for `n = 0`).
    pub fn prefix_path(&self, g: &Digraph, n: usize) -> FinPath {
        let edges = self.expand(n);
        if edges.is_empty() {
            FinPath::trivial(self.source(g))
        } else {
            g.path(&edges).expect("prefixes of boundary paths compose")
        }
    }

    /// `σ^k(x)`: the point with its first `k` edges removed.
    pub fn shift(&self, g: &Digraph, k: usize) -> Result<Self> {
        match self {
            BoundaryPoint::Sink(p) => {
                if k > p.len() {
                    return Err(Error::OverShift { len: p.len(), by: k });
                }
                Ok(BoundaryPoint::Sink(p.suffix_from(g, k)))
            }
            BoundaryPoint::Rational { prefix, cycle } => {
                if k <= prefix.len() {
                    return BoundaryPoint::rational(g, prefix.suffix_from(g, k), cycle);
                }
                let r = (k - prefix.len()) % cycle.len();
                let mut word = cycle.edges().to_vec();
                word.rotate_left(r);
                let rotated = g.path(&word)?;
                BoundaryPoint::rational(g, FinPath::trivial(rotated.src()), &rotated)
            }
            BoundaryPoint::Irrational { stream, offset } => {
                Ok(BoundaryPoint::Irrational { stream: stream.clone(), offset: offset + k })
            }
        }
    }

    /// `(prefix length, period)` for rational points.
    pub fn rational_shape(&self) -> Option<(usize, usize)> {
        match self {
            BoundaryPoint::Rational { prefix, cycle } => Some((prefix.len(), cycle.len())),
            _ => None,
        }
    }

    pub fn isotropy(&self, g: &Digraph) -> IsotropyDesc {
        match self {
            BoundaryPoint::Rational { cycle, .. } => {
                let c = SimpleClosedPath::new(g, cycle).expect("stored cycle is primitive");
                IsotropyDesc::Cyclic { period: c.period(), cycle: c }
            }
            _ => IsotropyDesc::Trivial,
        }
    }

    /// A stable textual key used for ordering and hashing.
    fn key(&self) -> (u8, Vec<EdgeId>, Vec<EdgeId>, String, usize, VertexId) {
        match self {
            BoundaryPoint::Sink(p) => (0, p.edges().to_vec(), Vec::new(), String::new(), 0, p.src()),
            BoundaryPoint::Rational { prefix, cycle } => {
                (1, prefix.edges().to_vec(), cycle.edges().to_vec(), String::new(), 0, prefix.src())
            }
            BoundaryPoint::Irrational { stream, offset } => {
                (2, Vec::new(), Vec::new(), stream.descriptor(), *offset, stream.source())
            }
        }
    }

    /// Human-readable form, e.g. `e.(f.e)^inf` or `thue-morse-like(e,f)>3`.
    pub fn show(&self, g: &Digraph) -> String {
        match self {
            BoundaryPoint::Sink(p) => g.show_path(p),
            BoundaryPoint::Rational { prefix, cycle } => {
                let c = format!("({})^inf", g.show_path(cycle));
                if prefix.is_trivial() {
                    c
                } else {
                    format!("{}.{c}", g.show_path(prefix))
                }
            }
            BoundaryPoint::Irrational { stream, offset } => {
                if *offset == 0 {
                    stream.descriptor()
                } else {
                    format!("{}>{offset}", stream.descriptor())
                }
            }
        }
    }
}

impl PartialEq for BoundaryPoint {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for BoundaryPoint {}

impl Ord for BoundaryPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for BoundaryPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for BoundaryPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

/// Isotropy group of a boundary point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsotropyDesc {
    Trivial,
    /// Generated by an arrow of degree `period`.
    Cyclic { period: usize, cycle: SimpleClosedPath },
}

impl IsotropyDesc {
    pub fn period(&self) -> Option<usize> {
        match self {
            IsotropyDesc::Trivial => None,
            IsotropyDesc::Cyclic { period, .. } => Some(*period),
        }
    }
}

/// Outcome of a tail-equivalence test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TailVerdict {
    pub equivalent: bool,
    /// False when the answer only holds up to the inspected depth.
    pub exact: bool,
}

/// Whether `x` and `y` share a tail. Exact unless both points are
/// irrational with different generators.
pub fn tail_equiv(g: &Digraph, x: &BoundaryPoint, y: &BoundaryPoint, depth: usize) -> TailVerdict {
    use BoundaryPoint::*;
    let exact = |equivalent| TailVerdict { equivalent, exact: true };
    match (x, y) {
        (Sink(p), Sink(q)) => exact(p.dst() == q.dst()),
        (Rational { cycle: c, .. }, Rational { cycle: d, .. }) => {
            let c = SimpleClosedPath::new(g, c).expect("primitive");
            let d = SimpleClosedPath::new(g, d).expect("primitive");
            exact(c == d)
        }
        (Irrational { stream: s, .. }, Irrational { stream: t, .. }) => {
            if s.descriptor() == t.descriptor() {
                return exact(true);
            }
            let xs = x.expand(2 * depth + 1);
            let ys = y.expand(2 * depth + 1);
            let window = depth + 1;
            let equivalent = (0..=depth).any(|i| {
                (0..=depth).any(|j| xs[i..i + window] == ys[j..j + window])
            });
            TailVerdict { equivalent, exact: false }
        }
        _ => exact(false),
    }
}

/// `prefix · σ^shift(base)`, kept reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassElement {
    base: Arc<BoundaryPoint>,
    prefix: FinPath,
    shift: usize,
}

impl Ord for ClassElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.prefix
            .cmp(&other.prefix)
            .then(self.shift.cmp(&other.shift))
            .then_with(|| {
                if Arc::ptr_eq(&self.base, &other.base) {
                    Ordering::Equal
                } else {
                    self.base.cmp(&other.base)
                }
            })
    }
}

impl PartialOrd for ClassElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree `|μ| - |ν|` of a class element relative to its base.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Degree {
    /// Canonical representative `|prefix| - shift`.
    pub value: i64,
    /// `Some(n)` when the degree is only defined modulo `n`.
    pub modulus: Option<usize>,
}

impl Degree {
    /// Whether `k` lies in this degree class.
    pub fn admits(&self, k: i64) -> bool {
        match self.modulus {
            None => k == self.value,
            Some(n) => (k - self.value).rem_euclid(n as i64) == 0,
        }
    }
}

fn reduce_raw(g: &Digraph, base: &BoundaryPoint, mut prefix: FinPath, mut k: usize) -> (FinPath, usize) {
    let shape = base.rational_shape();
    if let Some((rho, n)) = shape {
        if k >= rho + n {
            k = rho + (k - rho) % n;
        }
    }
    while let Some(last) = prefix.last_edge() {
        if k >= 1 && base.edge_at(k - 1) == Some(last) {
            k -= 1;
        } else if matches!(shape, Some((rho, n)) if k == rho && base.edge_at(rho + n - 1) == Some(last)) {
            let (rho, n) = shape.expect("rational");
            k = rho + n - 1;
        } else {
            break;
        }
        prefix = prefix.pop(g).expect("nonempty prefix");
    }
    (prefix, k)
}

impl ClassElement {
    /// The base point itself, `(s(x), 0)`.
    pub fn base_point(g: &Digraph, base: Arc<BoundaryPoint>) -> Self {
        let prefix = FinPath::trivial(base.source(g));
        ClassElement { base, prefix, shift: 0 }
    }

    /// `prefix · σ^shift(base)`, reduced. Errors when the shift overruns a
    /// finite base or the prefix does not end where the tail starts.
    pub fn new(g: &Digraph, base: Arc<BoundaryPoint>, prefix: FinPath, shift: usize) -> Result<Self> {
        if let Some(len) = base.finite_len() {
            if shift > len {
                return Err(Error::OverShift { len, by: shift });
            }
        }
        let start = base.source_after(g, shift);
        if prefix.dst() != start {
            return Err(Error::NotComposable {
                range: g.vertex_name(prefix.dst()).to_string(),
                source_vertex: g.vertex_name(start).to_string(),
            });
        }
        let (prefix, shift) = reduce_raw(g, &base, prefix, shift);
        Ok(ClassElement { base, prefix, shift })
    }

    pub fn base(&self) -> &Arc<BoundaryPoint> {
        &self.base
    }

    pub fn prefix(&self) -> &FinPath {
        &self.prefix
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    /// `s(y)`.
    pub fn source(&self) -> VertexId {
        self.prefix.src()
    }

    pub fn is_base(&self) -> bool {
        self.prefix.is_trivial() && self.shift == 0
    }

    /// Re-runs reduction; the identity on values built through [`ClassElement::new`].
    pub fn reduced(&self, g: &Digraph) -> Self {
        let (prefix, shift) = reduce_raw(g, &self.base, self.prefix.clone(), self.shift);
        ClassElement { base: self.base.clone(), prefix, shift }
    }

    pub fn degree(&self) -> Degree {
        Degree {
            value: self.prefix.len() as i64 - self.shift as i64,
            modulus: self.base.rational_shape().map(|(_, n)| n),
        }
    }

    /// First `n` edges of the boundary path this element denotes.
    pub fn expand(&self, n: usize) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = self.prefix.edges().iter().copied().take(n).collect();
        if out.len() < n {
            let need = n - out.len();
            match self.base.as_ref() {
                BoundaryPoint::Irrational { stream, offset } => {
                    let start = offset + self.shift;
                    out.extend_from_slice(&stream.prefix(start + need)[start..]);
                }
                base => out.extend((0..need).map_while(|i| base.edge_at(self.shift + i))),
            }
        }
        out
    }

    /// Total length for elements of a finite class.
    pub fn finite_len(&self) -> Option<usize> {
        self.base.finite_len().map(|l| self.prefix.len() + l - self.shift)
    }

    /// `Some(z)` with `self = ν · z`.
    pub fn strip(&self, g: &Digraph, nu: &FinPath) -> Option<ClassElement> {
        if nu.src() != self.source() {
            return None;
        }
        if nu.len() <= self.prefix.len() {
            let rest = self.prefix.strip_prefix(nu)?;
            let (prefix, shift) = reduce_raw(g, &self.base, rest, self.shift);
            return Some(ClassElement { base: self.base.clone(), prefix, shift });
        }
        if !nu.edges().starts_with(self.prefix.edges()) {
            return None;
        }
        let tail = &nu.edges()[self.prefix.len()..];
        for (i, e) in tail.iter().enumerate() {
            if self.base.edge_at(self.shift + i) != Some(*e) {
                return None;
            }
        }
        let shift = self.shift + tail.len();
        let prefix = FinPath::trivial(nu.dst());
        let (prefix, shift) = reduce_raw(g, &self.base, prefix, shift);
        Some(ClassElement { base: self.base.clone(), prefix, shift })
    }

    /// `μ · self`, provided `r(μ) = s(self)`.
    pub fn prepend(&self, g: &Digraph, mu: &FinPath) -> Option<ClassElement> {
        let prefix = mu.concat(&self.prefix)?;
        let (prefix, shift) = reduce_raw(g, &self.base, prefix, self.shift);
        Some(ClassElement { base: self.base.clone(), prefix, shift })
    }

    /// The Chen-module rule for a monomial: `μ z` when `self = ν z`.
    pub fn apply_monomial(&self, g: &Digraph, mu: &FinPath, nu: &FinPath) -> Option<ClassElement> {
        self.strip(g, nu)?.prepend(g, mu)
    }

    /// Compact text such as `x`, `f.x`, `e.f.x>1` (`>k` marks `σ^k`).
    pub fn show(&self, g: &Digraph) -> String {
        let tail = if self.shift == 0 { "x".to_string() } else { format!("x>{}", self.shift) };
        if self.prefix.is_trivial() {
            tail
        } else {
            format!("{}.{tail}", g.edge_names_of(self.prefix.edges()).join("."))
        }
    }
}

/// Equality of two elements of the same class.
pub fn class_eq(u: &ClassElement, v: &ClassElement) -> Result<bool> {
    if !Arc::ptr_eq(&u.base, &v.base) && u.base != v.base {
        return Err(Error::BaseMismatch);
    }
    Ok(u.prefix == v.prefix && u.shift == v.shift)
}

/// Reduced class elements up to a prefix length.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub points: Vec<ClassElement>,
    /// True when no reduced element is longer than the search depth, so
    /// `points` is the whole class.
    pub exhausted: bool,
}

/// Enumerates the orbit of `x`: reduced elements with prefix length at most
/// `depth`. Irrational bases also cap the shift at `depth`.
pub fn orbit_points(g: &Digraph, x: &Arc<BoundaryPoint>, depth: usize) -> Orbit {
    let shifts: Vec<usize> = match x.as_ref() {
        BoundaryPoint::Sink(p) => (0..=p.len()).collect(),
        BoundaryPoint::Rational { prefix, cycle } => (0..prefix.len() + cycle.len()).collect(),
        BoundaryPoint::Irrational { .. } => (0..=depth).collect(),
    };
    let mut points = Vec::new();
    let mut longer = false;
    for k in shifts {
        let v = x.source_after(g, k);
        let forbidden = forbidden_last_edges(x, k);
        for len in 0..=depth + 1 {
            for mu in g.paths_ending_at(v, len) {
                if mu.last_edge().is_some_and(|e| forbidden.contains(&e)) {
                    continue;
                }
                if len > depth {
                    longer = true;
                    break;
                }
                points.push(ClassElement { base: x.clone(), prefix: mu, shift: k });
            }
        }
    }
    points.sort();
    let exhausted = !longer && !matches!(x.as_ref(), BoundaryPoint::Irrational { .. });
    Orbit { points, exhausted }
}

/// Last edges that a reduced prefix over shift `k` may not have.
fn forbidden_last_edges(x: &BoundaryPoint, k: usize) -> Vec<EdgeId> {
    let mut out = Vec::new();
    if k >= 1 {
        out.extend(x.edge_at(k - 1));
    }
    if let Some((rho, n)) = x.rational_shape() {
        if k == rho {
            out.extend(x.edge_at(rho + n - 1));
        }
    }
    out
}

/// Degree of a reduced element; see [`ClassElement::degree`].
pub fn degree_of(y: &ClassElement) -> Degree {
    y.degree()
}

/// Isotropy of a point; see [`BoundaryPoint::isotropy`].
pub fn isotropy(g: &Digraph, x: &BoundaryPoint) -> IsotropyDesc {
    x.isotropy(g)
}

/// Parses the point wire format:
/// `{"sink": ["e1", ...]}` or `{"sink": "w"}`, `{"prefix": [...], "cycle": [...]}`,
/// `{"irrational": {"rule": "...", "params": {...}}}`.
pub fn parse_point(g: &Digraph, value: &Value, rules: &RuleRegistry) -> Result<BoundaryPoint> {
    let bad = |msg: &str| Error::Parse(format!("point JSON: {msg}"));
    let names = |v: &Value| -> Result<Vec<String>> {
        v.as_array()
            .ok_or_else(|| bad("expected an array of edge ids"))?
            .iter()
            .map(|e| e.as_str().map(str::to_string).ok_or_else(|| bad("edge ids must be strings")))
            .collect()
    };
    let obj = value.as_object().ok_or_else(|| bad("expected an object"))?;
    if let Some(sink) = obj.get("sink") {
        if let Some(w) = sink.as_str() {
            let v = g.vertex(w).ok_or_else(|| bad(&format!("unknown vertex `{w}`")))?;
            return BoundaryPoint::sink_vertex(g, v);
        }
        let edges = names(sink)?;
        if edges.is_empty() {
            return Err(bad("a trivial sink path is written {\"sink\": \"<vertex>\"}"));
        }
        return BoundaryPoint::sink(g, g.path_from_names(&edges)?);
    }
    if let Some(cycle) = obj.get("cycle") {
        let cycle = g.path_from_names(&names(cycle)?)?;
        let prefix_names = match obj.get("prefix") {
            Some(p) => names(p)?,
            None => Vec::new(),
        };
        let prefix = if prefix_names.is_empty() {
            FinPath::trivial(cycle.src())
        } else {
            g.path_from_names(&prefix_names)?
        };
        return BoundaryPoint::rational(g, prefix, &cycle);
    }
    if let Some(irr) = obj.get("irrational") {
        let rule = irr.get("rule").and_then(Value::as_str).ok_or_else(|| bad("missing rule"))?;
        let params = irr.get("params").cloned().unwrap_or(Value::Null);
        let rule = rules.build(g, rule, &params)?;
        return BoundaryPoint::irrational(g, rule);
    }
    Err(bad("expected one of `sink`, `cycle`, `irrational`"))
}

/// Inverse of [`parse_point`] for sink and rational points.
pub fn point_to_json(g: &Digraph, x: &BoundaryPoint) -> Value {
    match x {
        BoundaryPoint::Sink(p) if p.is_trivial() => serde_json::json!({ "sink": g.vertex_name(p.src()) }),
        BoundaryPoint::Sink(p) => serde_json::json!({ "sink": g.edge_names_of(p.edges()) }),
        BoundaryPoint::Rational { prefix, cycle } => serde_json::json!({
            "prefix": g.edge_names_of(prefix.edges()),
            "cycle": g.edge_names_of(cycle.edges()),
        }),
        BoundaryPoint::Irrational { stream, offset } => serde_json::json!({
            "irrational": { "descriptor": stream.descriptor(), "offset": offset }
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::reference::*;
    use serde_json::json;

    fn path(g: &Digraph, names: &[&str]) -> FinPath {
        g.path_from_names(names).unwrap()
    }

    fn rational(g: &Digraph, prefix: &[&str], cycle: &[&str]) -> BoundaryPoint {
        let c = path(g, cycle);
        let pre = if prefix.is_empty() { FinPath::trivial(c.src()) } else { path(g, prefix) };
        BoundaryPoint::rational(g, pre, &c).unwrap()
    }

    fn irrational(g: &Digraph) -> BoundaryPoint {
        let rule = RuleRegistry::builtin().build(g, "thue-morse-like", &Value::Null).unwrap();
        BoundaryPoint::irrational(g, rule).unwrap()
    }

    #[test]
    fn rational_normal_form_strips_and_rotates() {
        let g = r2();
        let x = rational(&g, &["e", "f", "e", "f"], &["e", "f", "e", "f"]);
        assert_eq!(x, rational(&g, &[], &["e", "f"]));
        let y = rational(&g, &["f"], &["e", "f"]);
        assert_eq!(y, rational(&g, &[], &["f", "e"]));
        assert_eq!(y.show(&g), "(f.e)^inf");
        let z = rational(&g, &["f", "e"], &["e"]);
        assert_eq!(z.show(&g), "f.(e)^inf");
    }

    #[test]
    fn shifting() {
        let g = r1();
        let e_inf = rational(&g, &[], &["e"]);
        assert_eq!(e_inf.shift(&g, 3).unwrap(), e_inf);

        let a = a2();
        let e = BoundaryPoint::sink(&a, path(&a, &["e"])).unwrap();
        let v2 = BoundaryPoint::sink_vertex(&a, a.vertex("v2").unwrap()).unwrap();
        assert_eq!(e.shift(&a, 1).unwrap(), v2);
        assert_eq!(e.shift(&a, 2), Err(Error::OverShift { len: 1, by: 2 }));

        let r = r2();
        let ef = rational(&r, &[], &["e", "f"]);
        let fe = ef.shift(&r, 1).unwrap();
        assert_eq!(fe, rational(&r, &[], &["f", "e"]));
        // expansion oracle
        let shifted: Vec<_> = ef.expand(11)[1..].to_vec();
        assert_eq!(fe.expand(10), shifted);
    }

    #[test]
    fn tail_equivalence_examples() {
        let a = a2();
        let v2 = BoundaryPoint::sink_vertex(&a, a.vertex("v2").unwrap()).unwrap();
        let e = BoundaryPoint::sink(&a, path(&a, &["e"])).unwrap();
        assert_eq!(tail_equiv(&a, &v2, &e, 8), TailVerdict { equivalent: true, exact: true });

        let g = r2();
        let ef = rational(&g, &[], &["e", "f"]);
        let fe = rational(&g, &[], &["f", "e"]);
        assert!(tail_equiv(&g, &ef, &fe, 8).equivalent);
        let e_inf = rational(&g, &[], &["e"]);
        let f_inf = rational(&g, &[], &["f"]);
        assert!(!tail_equiv(&g, &e_inf, &f_inf, 8).equivalent);

        let x = irrational(&g);
        let y = x.shift(&g, 5).unwrap();
        assert_eq!(tail_equiv(&g, &x, &y, 8), TailVerdict { equivalent: true, exact: true });
        assert!(!tail_equiv(&g, &x, &e_inf, 8).equivalent);
    }

    #[test]
    fn bounded_tail_equivalence_between_generators() {
        let g = r2();
        let reg = RuleRegistry::builtin();
        let a = BoundaryPoint::irrational(&g, reg.build(&g, "thue-morse-like", &Value::Null).unwrap()).unwrap();
        let b = BoundaryPoint::irrational(&g, reg.build(&g, "thue-morse", &Value::Null).unwrap()).unwrap();
        let verdict = tail_equiv(&g, &a, &b, 8);
        assert!(!verdict.exact);
    }

    #[test]
    fn class_equality() {
        let g = r1();
        let base = Arc::new(rational(&g, &[], &["e"]));
        let e = path(&g, &["e"]);
        let v = FinPath::trivial(g.vertex("v").unwrap());
        let a = ClassElement::new(&g, base.clone(), e, 0).unwrap();
        let b = ClassElement::new(&g, base.clone(), v.clone(), 0).unwrap();
        assert!(class_eq(&a, &b).unwrap());
        let c = ClassElement::new(&g, base.clone(), v, 3).unwrap();
        assert!(class_eq(&c, &b).unwrap());

        let r = r2();
        let x = Arc::new(irrational(&r));
        let first = x.edge_at(0).unwrap();
        let u = ClassElement::new(&r, x.clone(), r.edge_path(first), 1).unwrap();
        let w = ClassElement::base_point(&r, x.clone());
        assert!(class_eq(&u, &w).unwrap());

        let other = ClassElement::base_point(&r, Arc::new(rational(&r, &[], &["e"])));
        assert_eq!(class_eq(&w, &other), Err(Error::BaseMismatch));
    }

    #[test]
    fn isotropy_examples() {
        let g = r1();
        match rational(&g, &[], &["e"]).isotropy(&g) {
            IsotropyDesc::Cyclic { period, cycle } => {
                assert_eq!(period, 1);
                assert_eq!(g.show_path(cycle.path()), "e");
            }
            other => panic!("{other:?}"),
        }
        let a = a2();
        let e = BoundaryPoint::sink(&a, path(&a, &["e"])).unwrap();
        assert_eq!(e.isotropy(&a), IsotropyDesc::Trivial);
        let r = r2();
        let iso = rational(&r, &[], &["f", "e"]).isotropy(&r);
        assert_eq!(iso.period(), Some(2));
        if let IsotropyDesc::Cyclic { cycle, .. } = iso {
            assert_eq!(r.show_path(cycle.path()), "e.f");
        }
        assert_eq!(irrational(&r).isotropy(&r), IsotropyDesc::Trivial);
    }

    #[test]
    fn orbit_examples() {
        let a = a2();
        let v2 = Arc::new(BoundaryPoint::sink_vertex(&a, a.vertex("v2").unwrap()).unwrap());
        let orbit = orbit_points(&a, &v2, 2);
        let shown: Vec<_> = orbit.points.iter().map(|p| p.show(&a)).collect();
        assert_eq!(shown, ["x", "e.x"]);
        assert!(orbit.exhausted);

        let g = r1();
        let e_inf = Arc::new(rational(&g, &[], &["e"]));
        let orbit = orbit_points(&g, &e_inf, 5);
        assert_eq!(orbit.points.len(), 1);
        assert!(orbit.exhausted);

        let r = r2();
        let e_inf = Arc::new(rational(&r, &[], &["e"]));
        let orbit = orbit_points(&r, &e_inf, 2);
        let shown: Vec<_> = orbit.points.iter().map(|p| p.show(&r)).collect();
        assert_eq!(shown, ["x", "f.x", "e.f.x", "f.f.x"]);
        assert!(!orbit.exhausted);
    }

    #[test]
    fn degrees() {
        let a = a2();
        let v2 = Arc::new(BoundaryPoint::sink_vertex(&a, a.vertex("v2").unwrap()).unwrap());
        let y = ClassElement::new(&a, v2.clone(), path(&a, &["e"]), 0).unwrap();
        assert_eq!(degree_of(&y), Degree { value: 1, modulus: None });
        assert_eq!(degree_of(&ClassElement::base_point(&a, v2)).value, 0);
        let g = r1();
        let e_inf = Arc::new(rational(&g, &[], &["e"]));
        let d = degree_of(&ClassElement::base_point(&g, e_inf));
        assert_eq!(d, Degree { value: 0, modulus: Some(1) });
        assert!(d.admits(17));
    }

    #[test]
    fn point_json_round_trip() {
        let g = toeplitz();
        let reg = RuleRegistry::builtin();
        for v in [json!({"sink": "w"}), json!({"sink": ["e", "g"]}), json!({"prefix": ["e"], "cycle": ["e"]})] {
            let p = parse_point(&g, &v, &reg).unwrap();
            let back = parse_point(&g, &point_to_json(&g, &p), &reg).unwrap();
            assert_eq!(p, back);
        }
        assert!(parse_point(&g, &json!({"sink": ["e"]}), &reg).is_err());
        assert!(parse_point(&g, &json!({"irrational": {"rule": "thue-morse-like"}}), &reg).is_err());
        let r = r2();
        let x = parse_point(&r, &json!({"irrational": {"rule": "thue-morse", "params": {"e": "f", "f": "e"}}}), &reg)
            .unwrap();
        assert_eq!(x.expand(4), [r.edge("f").unwrap(), r.edge("e").unwrap(), r.edge("e").unwrap(), r.edge("f").unwrap()]);
    }

    #[test]
    fn block_rule_layout() {
        let g = r2();
        let rule = RuleRegistry::builtin().build(&g, "thue-morse-like", &Value::Null).unwrap();
        let word: String = (0..12).map(|i| g.edge_name(rule.edge_at(i)).to_string()).collect();
        assert_eq!(word, "efeeffeeefff");
    }

    #[test]
    fn periodic_generators_are_rejected() {
        #[derive(Debug)]
        struct Periodic(EdgeId, EdgeId);
        impl TailRule for Periodic {
            fn name(&self) -> &'static str {
                "periodic"
            }
            fn descriptor(&self) -> String {
                "periodic".into()
            }
            fn edge_at(&self, i: usize) -> EdgeId {
                if i % 3 == 0 { self.0 } else { self.1 }
            }
        }
        let g = r2();
        let rule = Periodic(g.edge("e").unwrap(), g.edge("f").unwrap());
        assert!(matches!(BoundaryPoint::irrational(&g, Box::new(rule)), Err(Error::InvalidPoint(_))));
    }
}
