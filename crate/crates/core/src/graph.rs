//! Row-finite digraphs, finite paths, and simple closed paths.
//!
//! Vertex and edge identifiers are opaque strings. They are interned into
//! dense indices whose order agrees with the lexicographic order of the
//! strings, so every "least id" choice downstream is a plain `min`.

use std::collections::BTreeSet;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub(crate) u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub(crate) u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeJson {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// Wire form of a graph: `{"vertices": [...], "edges": [{"id","src","dst"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeJson>,
}

/// A finite directed graph. A vertex without outgoing edges is a sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    edge_src: Vec<VertexId>,
    edge_dst: Vec<VertexId>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

impl Digraph {
    /// Builds a graph from vertex ids and `(edge id, src, dst)` triples.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let edges: Vec<(String, String, String)> = edges.into_iter().collect();

        let mut vertex_names = vertices.clone();
        vertex_names.sort();
        if let Some(w) = vertex_names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate vertex id `{}`", w[0])));
        }
        let mut edge_names: Vec<String> = edges.iter().map(|e| e.0.clone()).collect();
        edge_names.sort();
        if let Some(w) = edge_names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate edge id `{}`", w[0])));
        }
        if let Some(clash) = edge_names.iter().find(|e| vertex_names.binary_search(e).is_ok()) {
            return Err(Error::InvalidGraph(format!(
                "id `{clash}` is used for both a vertex and an edge"
            )));
        }
        for name in vertex_names.iter().chain(&edge_names) {
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::InvalidGraph(format!(
                    "id `{name}` must be a non-empty alphanumeric/underscore word"
                )));
            }
        }

        let find_vertex = |name: &str| -> Result<VertexId> {
            vertex_names
                .binary_search_by(|v| v.as_str().cmp(name))
                .map(|i| VertexId(i as u32))
                .map_err(|_| Error::InvalidGraph(format!("edge refers to unknown vertex `{name}`")))
        };

        let n = vertex_names.len();
        let m = edge_names.len();
        let mut edge_src = vec![VertexId(0); m];
        let mut edge_dst = vec![VertexId(0); m];
        for (id, src, dst) in &edges {
            let i = edge_names.binary_search(id).expect("edge id interned");
            edge_src[i] = find_vertex(src)?;
            edge_dst[i] = find_vertex(dst)?;
        }
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for i in 0..m {
            out_edges[edge_src[i].index()].push(EdgeId(i as u32));
            in_edges[edge_dst[i].index()].push(EdgeId(i as u32));
        }
        Ok(Digraph { vertex_names, edge_names, edge_src, edge_dst, out_edges, in_edges })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: GraphJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph JSON: {e}")))?;
        Self::from_wire(raw)
    }

    pub fn from_wire(raw: GraphJson) -> Result<Self> {
        Digraph::new(raw.vertices, raw.edges.into_iter().map(|e| (e.id, e.src, e.dst)))
    }

    pub fn to_wire(&self) -> GraphJson {
        GraphJson {
            vertices: self.vertex_names.clone(),
            edges: self
                .edges()
                .map(|e| EdgeJson {
                    id: self.edge_name(e).to_string(),
                    src: self.vertex_name(self.src(e)).to_string(),
                    dst: self.vertex_name(self.dst(e)).to_string(),
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_names.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edge_names.len() as u32).map(EdgeId)
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.vertex_names
            .binary_search_by(|v| v.as_str().cmp(name))
            .ok()
            .map(|i| VertexId(i as u32))
    }

    pub fn edge(&self, name: &str) -> Option<EdgeId> {
        self.edge_names
            .binary_search_by(|v| v.as_str().cmp(name))
            .ok()
            .map(|i| EdgeId(i as u32))
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.index()]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e.index()]
    }

    pub fn src(&self, e: EdgeId) -> VertexId {
        self.edge_src[e.index()]
    }

    pub fn dst(&self, e: EdgeId) -> VertexId {
        self.edge_dst[e.index()]
    }

    /// Outgoing edges of `v`, in id order.
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v.index()]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v.index()]
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.out_edges[v.index()].is_empty()
    }

    pub fn sinks(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(|v| self.is_sink(*v))
    }

    /// The out-edge of a regular vertex with least id; `None` at sinks.
    pub fn special_edge(&self, v: VertexId) -> Option<EdgeId> {
        self.out_edges[v.index()].first().copied()
    }

    pub fn edge_path(&self, e: EdgeId) -> FinPath {
        FinPath { src: self.src(e), dst: self.dst(e), edges: vec![e] }
    }

    /// Builds a path from edge ids, checking composability.
    pub fn path(&self, edges: &[EdgeId]) -> Result<FinPath> {
        let first = edges.first().ok_or_else(|| {
            Error::Precondition("an edge list for a path must be non-empty".into())
        })?;
        for w in edges.windows(2) {
            if self.dst(w[0]) != self.src(w[1]) {
                return Err(self.mismatch(self.dst(w[0]), self.src(w[1])));
            }
        }
        Ok(FinPath {
            src: self.src(*first),
            dst: self.dst(*edges.last().expect("non-empty")),
            edges: edges.to_vec(),
        })
    }

    /// Builds a path from edge names; an empty list is rejected because the
    /// base vertex would be unknown.
    pub fn path_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<FinPath> {
        let ids = names
            .iter()
            .map(|n| {
                self.edge(n.as_ref())
                    .ok_or_else(|| Error::Parse(format!("unknown edge `{}`", n.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        self.path(&ids)
    }

    fn mismatch(&self, range: VertexId, source: VertexId) -> Error {
        Error::NotComposable {
            range: self.vertex_name(range).to_string(),
            source_vertex: self.vertex_name(source).to_string(),
        }
    }

    /// Concatenation `pq`; requires `r(p) = s(q)`.
    pub fn compose(&self, p: &FinPath, q: &FinPath) -> Result<FinPath> {
        p.concat(q).ok_or_else(|| self.mismatch(p.dst, q.src))
    }

    /// Renders a path as dot-separated edge ids, or the vertex id when trivial.
    pub fn show_path(&self, p: &FinPath) -> String {
        if p.is_trivial() {
            self.vertex_name(p.src).to_string()
        } else {
            self.edge_names_of(&p.edges).join(".")
        }
    }

    pub fn edge_names_of(&self, edges: &[EdgeId]) -> Vec<String> {
        edges.iter().map(|e| self.edge_name(*e).to_string()).collect()
    }

    /// All paths of length exactly `len` ending at `v`.
    pub fn paths_ending_at(&self, v: VertexId, len: usize) -> Vec<FinPath> {
        let mut frontier = vec![FinPath::trivial(v)];
        for _ in 0..len {
            let mut next = Vec::new();
            for p in &frontier {
                for &e in self.in_edges(p.src) {
                    let mut edges = Vec::with_capacity(p.len() + 1);
                    edges.push(e);
                    edges.extend_from_slice(&p.edges);
                    next.push(FinPath { src: self.src(e), dst: p.dst, edges });
                }
            }
            frontier = next;
        }
        frontier.sort();
        frontier
    }

    /// All paths of length exactly `len` starting at `v`.
    pub fn paths_starting_at(&self, v: VertexId, len: usize) -> Vec<FinPath> {
        let mut frontier = vec![FinPath::trivial(v)];
        for _ in 0..len {
            let mut next = Vec::new();
            for p in &frontier {
                for &e in self.out_edges(p.dst) {
                    let mut q = p.clone();
                    q.edges.push(e);
                    q.dst = self.dst(e);
                    next.push(q);
                }
            }
            frontier = next;
        }
        frontier.sort();
        frontier
    }

    /// All paths (trivial ones included) of length at most `max_len`.
    pub fn all_paths(&self, max_len: usize) -> Vec<FinPath> {
        let mut out: Vec<FinPath> = self
            .vertices()
            .flat_map(|v| (0..=max_len).flat_map(move |l| self.paths_starting_at(v, l)))
            .collect();
        out.sort();
        out
    }

    /// Strongly connected components that carry more than one simple
    /// closed path, i.e. with more edges than vertices inside. These are
    /// exactly the places where aperiodic infinite paths live.
    pub fn branching_components(&self) -> Vec<Vec<VertexId>> {
        let mut pg: DiGraph<VertexId, EdgeId> = DiGraph::new();
        let nodes: Vec<_> = self.vertices().map(|v| pg.add_node(v)).collect();
        for e in self.edges() {
            pg.add_edge(nodes[self.src(e).index()], nodes[self.dst(e).index()], e);
        }
        let mut out = Vec::new();
        for comp in tarjan_scc(&pg) {
            let members: BTreeSet<VertexId> = comp.iter().map(|n| pg[*n]).collect();
            let inner = self
                .edges()
                .filter(|e| members.contains(&self.src(*e)) && members.contains(&self.dst(*e)))
                .count();
            if inner > members.len() {
                out.push(members.into_iter().collect());
            }
        }
        out.sort();
        out
    }

    /// Returns a copy with every id renamed through `rename_vertex` and
    /// `rename_edge`.
    pub fn relabel(
        &self,
        rename_vertex: impl Fn(&str) -> String,
        rename_edge: impl Fn(&str) -> String,
    ) -> Result<Self> {
        Digraph::new(
            self.vertex_names.iter().map(|v| rename_vertex(v)),
            self.edges().map(|e| {
                (
                    rename_edge(self.edge_name(e)),
                    rename_vertex(self.vertex_name(self.src(e))),
                    rename_vertex(self.vertex_name(self.dst(e))),
                )
            }),
        )
    }
}

/// A finite path: a vertex when `edges` is empty, else a composable edge word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinPath {
    src: VertexId,
    dst: VertexId,
    edges: Vec<EdgeId>,
}

impl FinPath {
    pub fn trivial(v: VertexId) -> Self {
        FinPath { src: v, dst: v, edges: Vec::new() }
    }

    pub fn src(&self) -> VertexId {
        self.src
    }

    pub fn dst(&self) -> VertexId {
        self.dst
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        !self.edges.is_empty() && self.src == self.dst
    }

    pub fn last_edge(&self) -> Option<EdgeId> {
        self.edges.last().copied()
    }

    pub fn concat(&self, other: &FinPath) -> Option<FinPath> {
        if self.dst != other.src {
            return None;
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Some(FinPath { src: self.src, dst: other.dst, edges })
    }

    /// `Some(q)` with `self = prefix · q`.
    pub fn strip_prefix(&self, prefix: &FinPath) -> Option<FinPath> {
        if prefix.src != self.src || !self.edges.starts_with(&prefix.edges) {
            return None;
        }
        Some(FinPath { src: prefix.dst, dst: self.dst, edges: self.edges[prefix.len()..].to_vec() })
    }

    /// Drops the last edge; `g` supplies the new range vertex.
    pub fn pop(&self, g: &Digraph) -> Option<FinPath> {
        let last = *self.edges.last()?;
        let mut edges = self.edges.clone();
        edges.pop();
        Some(FinPath { src: self.src, dst: g.src(last), edges })
    }

    /// The suffix starting after the first `k` edges.
    pub fn suffix_from(&self, g: &Digraph, k: usize) -> FinPath {
        if k >= self.edges.len() {
            return FinPath::trivial(self.dst);
        }
        FinPath { src: g.src(self.edges[k]), dst: self.dst, edges: self.edges[k..].to_vec() }
    }

    /// The prefix made of the first `k` edges.
    pub fn prefix_to(&self, g: &Digraph, k: usize) -> FinPath {
        if k == 0 {
            return FinPath::trivial(self.src);
        }
        let k = k.min(self.edges.len());
        FinPath { src: self.src, dst: g.dst(self.edges[k - 1]), edges: self.edges[..k].to_vec() }
    }

    /// `self` repeated `m` times; a closed path is required for `m > 1`.
    pub fn power(&self, m: usize) -> FinPath {
        if m == 0 {
            return FinPath::trivial(self.src);
        }
        FinPath { src: self.src, dst: self.dst, edges: self.edges.repeat(m) }
    }
}

impl Ord for FinPath {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.edges
            .len()
            .cmp(&other.edges.len())
            .then_with(|| self.edges.cmp(&other.edges))
            .then_with(|| self.src.cmp(&other.src))
    }
}

impl PartialOrd for FinPath {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Least `d` dividing `word.len()` with `word` a power of its first `d` letters.
pub(crate) fn primitive_period<T: PartialEq>(word: &[T]) -> usize {
    let n = word.len();
    (1..=n)
        .find(|d| n % d == 0 && (0..n).all(|i| word[i] == word[i % d]))
        .unwrap_or(n)
}

/// Index of the lexicographically least rotation.
pub(crate) fn least_rotation<T: Ord>(word: &[T]) -> usize {
    let n = word.len();
    (0..n)
        .min_by(|&a, &b| {
            let ra = word[a..].iter().chain(&word[..a]);
            let rb = word[b..].iter().chain(&word[..b]);
            ra.cmp(rb)
        })
        .unwrap_or(0)
}

/// A closed path that is not a proper power, kept in its least rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleClosedPath {
    path: FinPath,
}

impl SimpleClosedPath {
    /// Canonicalizes a closed primitive path; errors on proper powers.
    pub fn new(g: &Digraph, path: &FinPath) -> Result<Self> {
        if !path.is_closed() {
            return Err(Error::NotClosed);
        }
        if primitive_period(path.edges()) != path.len() {
            return Err(Error::Precondition(format!(
                "{} is a proper power of a shorter closed path",
                g.show_path(path)
            )));
        }
        let r = least_rotation(path.edges());
        let mut edges = path.edges()[r..].to_vec();
        edges.extend_from_slice(&path.edges()[..r]);
        Ok(SimpleClosedPath { path: g.path(&edges)? })
    }

    pub fn path(&self) -> &FinPath {
        &self.path
    }

    pub fn period(&self) -> usize {
        self.path.len()
    }

    pub fn edges(&self) -> &[EdgeId] {
        self.path.edges()
    }
}

/// The rotation `e_{i+1}...e_n e_1...e_i`, for `1 <= i <= n`.
pub fn rotate(g: &Digraph, c: &SimpleClosedPath, i: usize) -> Result<FinPath> {
    let n = c.period();
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    let mut edges = c.edges()[i % n..].to_vec();
    edges.extend_from_slice(&c.edges()[..i % n]);
    g.path(&edges)
}

/// Writes a nontrivial closed path as `c^m` with `c` simple.
pub fn primitive_root(g: &Digraph, d: &FinPath) -> Result<(SimpleClosedPath, usize)> {
    if !d.is_closed() {
        return Err(Error::NotClosed);
    }
    let p = primitive_period(d.edges());
    let root = g.path(&d.edges()[..p])?;
    Ok((SimpleClosedPath::new(g, &root)?, d.len() / p))
}

/// All simple closed paths of length at most `max_len`, one least rotation
/// per rotation class, ordered by length and then edge ids.
pub fn simple_cycles(g: &Digraph, max_len: usize) -> Vec<SimpleClosedPath> {
    let mut found = BTreeSet::new();
    let mut stack: Vec<EdgeId> = Vec::new();
    fn walk(
        g: &Digraph,
        start: VertexId,
        max_len: usize,
        stack: &mut Vec<EdgeId>,
        found: &mut BTreeSet<Vec<EdgeId>>,
    ) {
        let at = stack.last().map_or(start, |e| g.dst(*e));
        if !stack.is_empty() && at == start {
            let word = stack.as_slice();
            if primitive_period(word) == word.len() && least_rotation(word) == 0 {
                found.insert(word.to_vec());
            }
        }
        if stack.len() == max_len {
            return;
        }
        for &e in g.out_edges(at) {
            // a least rotation never has a letter smaller than its first one
            if let Some(first) = stack.first() {
                if e < *first {
                    continue;
                }
            }
            stack.push(e);
            walk(g, start, max_len, stack, found);
            stack.pop();
        }
    }
    for v in g.vertices() {
        walk(g, v, max_len, &mut stack, &mut found);
    }
    let mut out: Vec<SimpleClosedPath> = found
        .into_iter()
        .map(|w| SimpleClosedPath { path: g.path(&w).expect("walk yields paths") })
        .collect();
    out.sort_by(|a, b| a.path.cmp(&b.path));
    out
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v#{}", self.0)
    }
}

/// Small graphs used throughout the tests and documentation.
pub mod reference {
    use super::Digraph;

    fn build(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Digraph {
        Digraph::new(
            vertices.iter().copied(),
            edges.iter().map(|(e, s, d)| (e.to_string(), s.to_string(), d.to_string())),
        )
        .expect("reference graph is well formed")
    }

    /// One vertex `v` with a loop `e`.
    pub fn r1() -> Digraph {
        build(&["v"], &[("e", "v", "v")])
    }

    /// One vertex `v` with loops `e` and `f`.
    pub fn r2() -> Digraph {
        build(&["v"], &[("e", "v", "v"), ("f", "v", "v")])
    }

    /// `v1 -e-> v2`.
    pub fn a2() -> Digraph {
        build(&["v1", "v2"], &[("e", "v1", "v2")])
    }

    /// The line `v1 -e1-> v2 -e2-> ... -> vn`.
    pub fn line(n: usize) -> Digraph {
        let names: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
        let edges: Vec<(String, String, String)> = (1..n)
            .map(|i| (format!("e{i}"), format!("v{i}"), format!("v{}", i + 1)))
            .collect();
        Digraph::new(names, edges).expect("line graph is well formed")
    }

    /// Toeplitz graph: loop `e` at `u` and `g: u -> w` with `w` a sink.
    pub fn toeplitz() -> Digraph {
        build(&["u", "w"], &[("e", "u", "u"), ("g", "u", "w")])
    }
}
