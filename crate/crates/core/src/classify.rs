//! The catalog of simple modules attached to a graph: one Chen module per
//! sink, one untwisted Chen module per cycle class, one polynomial-quotient
//! module per cycle class and admissible irreducible `f`, and symbolic rows
//! for the irrational classes.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::boundary::{orbit_points, point_to_json, BoundaryPoint};
use crate::chen::ChenModule;
use crate::error::{Error, Result};
use crate::field::{enumerate_irreducibles, is_irreducible, FieldSpec, Poly};
use crate::graph::{simple_cycles, Digraph, SimpleClosedPath, VertexId};
use crate::groupoid::{InducedModule, QuotientMod};
use crate::lpa::Algebra;
use crate::module::restrict;

/// Label attached to every catalog: the list is complete for spectral
/// simple modules.
pub const CATALOG_LABEL: &str = "spectral simple modules";

/// One representative per orbit type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReps {
    pub sinks: Vec<VertexId>,
    pub cycles: Vec<SimpleClosedPath>,
    /// Vertex sets of components carrying uncountably many irrational classes.
    pub irrational_components: Vec<Vec<VertexId>>,
}

pub fn orbit_reps(g: &Digraph, max_cycle_len: usize) -> OrbitReps {
    OrbitReps {
        sinks: g.sinks().collect(),
        cycles: simple_cycles(g, max_cycle_len),
        irrational_components: g.branching_components(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryKind {
    /// `V_{[w],K}`.
    SinkClass(VertexId),
    /// `V_{[c^∞],K}`.
    RationalChen(SimpleClosedPath),
    /// `V^f_{[c^∞],K}`.
    RationalQuotient(SimpleClosedPath, Poly),
    /// `V_{[x],K}` for the irrational `x` through the listed vertices.
    IrrationalFamily(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub kind: EntryKind,
    /// `None` when undecided at the search depth.
    pub finite_dim: Option<bool>,
    /// `None` for infinite or undecided dimension.
    pub dim: Option<usize>,
    pub noniso_witness: Value,
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub label: &'static str,
    pub field: FieldSpec,
    pub entries: Vec<CatalogEntry>,
    /// Whether every pair of non-symbolic entries got a distinguishing witness.
    pub pairwise_distinguished: bool,
}

impl EntryKind {
    pub fn base_point(&self, g: &Digraph) -> Option<BoundaryPoint> {
        match self {
            EntryKind::SinkClass(w) => Some(BoundaryPoint::sink_vertex(g, *w).expect("sink")),
            EntryKind::RationalChen(c) | EntryKind::RationalQuotient(c, _) => Some(BoundaryPoint::cycle_point(g, c)),
            EntryKind::IrrationalFamily(_) => None,
        }
    }

    /// `dim_K` of the coefficient module.
    fn coeff_dim(&self) -> usize {
        match self {
            EntryKind::RationalQuotient(_, f) => f.degree().unwrap_or(0),
            _ => 1,
        }
    }

    pub fn show(&self, g: &Digraph) -> String {
        match self {
            EntryKind::SinkClass(w) => format!("V[{}]", g.vertex_name(*w)),
            EntryKind::RationalChen(c) => format!("V[({})^inf]", g.show_path(c.path())),
            EntryKind::RationalQuotient(c, f) => format!("V^({f})[({})^inf]", g.show_path(c.path())),
            EntryKind::IrrationalFamily(text) => format!("V[x] for {text}"),
        }
    }
}

/// `(finite_dim, dim)` decided from the orbit search: an exhausted search
/// gives the exact dimension; an unexhausted search at depth `≥ |V|` proves
/// the orbit infinite, since a longer reduced prefix repeats a vertex and
/// its loop can be pumped.
pub fn finite_dim_report(kind: &EntryKind, g: &Digraph, depth: usize) -> (Option<bool>, Option<usize>) {
    let Some(x) = kind.base_point(g) else {
        return (Some(false), None);
    };
    let orbit = orbit_points(g, &Arc::new(x), depth);
    if orbit.exhausted {
        (Some(true), Some(orbit.points.len() * kind.coeff_dim()))
    } else if depth >= g.vertex_count() {
        (Some(false), None)
    } else {
        (None, None)
    }
}

/// Builds the catalog. Over `F_p` quotient modules come from enumerating
/// irreducibles up to `max_deg`; over `Q` they come from `extra_polys`.
pub fn catalog(
    g: &Arc<Digraph>,
    k: &FieldSpec,
    max_deg: usize,
    max_cycle_len: usize,
    extra_polys: &[Poly],
    depth: usize,
) -> Result<Catalog> {
    let polys = admissible_polys(k, max_deg, extra_polys)?;
    let reps = orbit_reps(g, max_cycle_len);
    let mut kinds = Vec::new();
    for w in &reps.sinks {
        kinds.push(EntryKind::SinkClass(*w));
    }
    for c in &reps.cycles {
        kinds.push(EntryKind::RationalChen(c.clone()));
        for f in &polys {
            kinds.push(EntryKind::RationalQuotient(c.clone(), f.clone()));
        }
    }
    for comp in &reps.irrational_components {
        let names: Vec<&str> = comp.iter().map(|v| g.vertex_name(*v)).collect();
        kinds.push(EntryKind::IrrationalFamily(format!(
            "each irrational path eventually inside {{{}}} (uncountably many classes, not enumerated)",
            names.join(", ")
        )));
    }

    let alg = Algebra::new(g.clone(), k.clone());
    let witnesses = Witnesses::new(&alg, &kinds, depth)?;
    let mut entries = Vec::new();
    let mut all_distinguished = true;
    for (i, kind) in kinds.iter().enumerate() {
        let (finite_dim, dim) = finite_dim_report(kind, g, depth);
        let (witness, ok) = witnesses.for_entry(g, &kinds, i);
        all_distinguished &= ok;
        entries.push(CatalogEntry { kind: kind.clone(), finite_dim, dim, noniso_witness: witness });
    }
    Ok(Catalog { label: CATALOG_LABEL, field: k.clone(), entries, pairwise_distinguished: all_distinguished })
}

fn admissible_polys(k: &FieldSpec, max_deg: usize, extra: &[Poly]) -> Result<Vec<Poly>> {
    let excluded = |f: &Poly| -> bool {
        let t = Poly::new(vec![k.zero(), k.one()]);
        let t_minus_1 = Poly::new(vec![k.neg(&k.one()), k.one()]);
        *f == t || *f == t_minus_1
    };
    let mut out = match k {
        FieldSpec::Prime(p) => enumerate_irreducibles(*p, max_deg)?,
        FieldSpec::Rationals => Vec::new(),
        FieldSpec::Quotient { .. } => {
            return Err(Error::UnsupportedField(format!("catalogs over {k} are not enumerated")));
        }
    };
    for f in extra {
        let f = k.poly_monic(f)?;
        if f.degree().unwrap_or(0) > max_deg {
            continue;
        }
        if !is_irreducible(&f, k)? {
            return Err(Error::Precondition(format!("{f} is not irreducible over {k}")));
        }
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out.retain(|f| !excluded(f));
    match k {
        FieldSpec::Prime(p) => {
            let enumerated = enumerate_irreducibles(*p, max_deg)?;
            out.sort_by_key(|f| enumerated.iter().position(|e| e == f).unwrap_or(usize::MAX));
        }
        _ => out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.to_string().cmp(&b.to_string()))),
    }
    Ok(out)
}

/// Restriction data separating catalog entries.
struct Witnesses {
    /// `dim_K Res_{x_i}(V_{[x_j]})` for untwisted coefficient modules, keyed by base index.
    survivors: BTreeMap<(usize, usize), usize>,
    /// Minimal polynomial of the isotropy generator on `Res_{x_i}(W_i)`.
    min_polys: Vec<Option<String>>,
    base_index: Vec<Option<usize>>,
}

impl Witnesses {
    fn new(alg: &Algebra, kinds: &[EntryKind], depth: usize) -> Result<Self> {
        let g = alg.graph();
        let mut bases: Vec<BoundaryPoint> = Vec::new();
        let mut base_index = Vec::new();
        for kind in kinds {
            base_index.push(kind.base_point(g).map(|x| match bases.iter().position(|b| *b == x) {
                Some(i) => i,
                None => {
                    bases.push(x);
                    bases.len() - 1
                }
            }));
        }
        let arcs: Vec<Arc<BoundaryPoint>> = bases.iter().cloned().map(Arc::new).collect();
        let mut survivors = BTreeMap::new();
        for (j, xj) in arcs.iter().enumerate() {
            let w = ChenModule::new(alg.clone(), xj.clone());
            for (i, xi) in arcs.iter().enumerate() {
                survivors.insert((i, j), restrict(&w, xi, depth).dim());
            }
        }
        let mut min_polys = Vec::new();
        for (kind, idx) in kinds.iter().zip(&base_index) {
            let poly = match (kind, idx) {
                (EntryKind::RationalChen(_), Some(i)) => {
                    let w = ChenModule::new(alg.clone(), arcs[*i].clone());
                    restrict(&w, &arcs[*i], depth).generator_min_poly(alg.field())
                }
                (EntryKind::RationalQuotient(_, f), Some(i)) => {
                    let coeff = Arc::new(QuotientMod::new(alg.field(), f.clone())?);
                    let w = InducedModule::new(alg.clone(), arcs[*i].clone(), coeff)?;
                    restrict(&w, &arcs[*i], depth).generator_min_poly(alg.field())
                }
                _ => None,
            };
            min_polys.push(poly.map(|p| p.to_string()));
        }
        Ok(Witnesses { survivors, min_polys, base_index })
    }

    fn for_entry(&self, g: &Digraph, kinds: &[EntryKind], i: usize) -> (Value, bool) {
        let Some(bi) = self.base_index[i] else {
            return (json!({ "kind": "symbolic", "note": "irrational classes are separated by restriction at their own base points" }), true);
        };
        let own = self.survivors[&(bi, bi)] * kinds[i].coeff_dim();
        let mut against = Vec::new();
        let mut ok = true;
        for (j, kind) in kinds.iter().enumerate() {
            let Some(bj) = self.base_index[j] else {
                continue;
            };
            if j == i {
                continue;
            }
            let other = self.survivors[&(bi, bj)] * kind.coeff_dim();
            let reason = if other != own {
                json!({
                    "entry": kind.show(g),
                    "reason": "restriction dimension at this entry's base point",
                    "dims": [own, other],
                })
            } else if self.min_polys[i] != self.min_polys[j] {
                json!({
                    "entry": kind.show(g),
                    "reason": "isotropy generator minimal polynomial on the restriction",
                    "min_polys": [self.min_polys[i], self.min_polys[j]],
                })
            } else {
                ok = false;
                json!({ "entry": kind.show(g), "reason": "not distinguished" })
            };
            against.push(reason);
        }
        let witness = json!({
            "restriction_dim": own,
            "isotropy_min_poly": self.min_polys[i],
            "against": against,
        });
        (witness, ok)
    }
}

impl CatalogEntry {
    pub fn to_json(&self, g: &Digraph) -> Value {
        let (kind, data) = match &self.kind {
            EntryKind::SinkClass(w) => ("sink", json!({ "sink": g.vertex_name(*w) })),
            EntryKind::RationalChen(c) => ("rational_chen", json!({ "cycle": g.edge_names_of(c.edges()) })),
            EntryKind::RationalQuotient(c, f) => (
                "rational_quotient",
                json!({ "cycle": g.edge_names_of(c.edges()), "poly": f.to_string() }),
            ),
            EntryKind::IrrationalFamily(text) => ("irrational_family", json!({ "family": text })),
        };
        let base = self.kind.base_point(g).map(|x| point_to_json(g, &x));
        json!({
            "kind": kind,
            "name": self.kind.show(g),
            "data": data,
            "base": base,
            "finite_dim": match self.finite_dim { Some(b) => json!(b), None => json!("unknown") },
            "dim": match (self.finite_dim, self.dim) {
                (_, Some(d)) => json!(d),
                (Some(false), None) => json!("infinite"),
                _ => json!("unknown"),
            },
            "noniso_witness": self.noniso_witness,
        })
    }
}

impl Catalog {
    pub fn to_json(&self, g: &Digraph) -> Value {
        json!({
            "label": self.label,
            "field": self.field.to_string(),
            "pairwise_distinguished": self.pairwise_distinguished,
            "entries": self.entries.iter().map(|e| e.to_json(g)).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::reference::*;

    fn cat(g: Digraph, k: &str, max_deg: usize) -> (Arc<Digraph>, Catalog) {
        let g = Arc::new(g);
        let c = catalog(&g, &k.parse().unwrap(), max_deg, 4, &[], 8).unwrap();
        (g, c)
    }

    #[test]
    fn orbit_representatives() {
        let a = a2();
        let reps = orbit_reps(&a, 4);
        assert_eq!(reps.sinks, vec![a.vertex("v2").unwrap()]);
        assert!(reps.cycles.is_empty());
        let t = toeplitz();
        let reps = orbit_reps(&t, 4);
        assert_eq!(reps.sinks, vec![t.vertex("w").unwrap()]);
        assert_eq!(reps.cycles.len(), 1);
        assert!(reps.irrational_components.is_empty());
        assert_eq!(orbit_reps(&r2(), 2).irrational_components.len(), 1);
    }

    #[test]
    fn small_catalogs() {
        let (g, c) = cat(a2(), "Q", 3);
        assert_eq!(c.entries.len(), 1);
        assert_eq!(c.entries[0].dim, Some(2));
        assert_eq!(c.to_json(&g)["label"], "spectral simple modules");

        let (g, c) = cat(r1(), "F2", 2);
        let names: Vec<_> = c.entries.iter().map(|e| e.kind.show(&g)).collect();
        assert_eq!(names, ["V[(e)^inf]", "V^(t^2+t+1)[(e)^inf]"]);
        assert!(c.pairwise_distinguished);

        let (_, c) = cat(r1(), "F2", 3);
        let dims: Vec<_> = c.entries.iter().map(|e| e.dim.unwrap()).collect();
        assert_eq!(dims, [1, 2, 3, 3]);
    }

    #[test]
    fn infinite_orbits_are_reported() {
        let (_, c) = cat(toeplitz(), "F2", 2);
        assert_eq!(c.entries[0].finite_dim, Some(false));
        assert_eq!(c.entries[1].dim, Some(1));
        assert_eq!(c.entries[2].dim, Some(2));
        let (g, c) = cat(r2(), "F2", 2);
        let quotient = c.entries.iter().find(|e| matches!(e.kind, EntryKind::RationalQuotient(..))).unwrap();
        assert_eq!(quotient.finite_dim, Some(false));
        assert!(c.entries.last().unwrap().kind.show(&g).contains("irrational"));
    }

    #[test]
    fn rational_catalog_uses_supplied_polys() {
        let g = Arc::new(r1());
        let q: FieldSpec = "Q".parse().unwrap();
        let f = crate::field::parse_poly("t^2+1", &q).unwrap();
        let c = catalog(&g, &q, 3, 2, &[f], 8).unwrap();
        assert_eq!(c.entries.len(), 2);
        let t_minus_1 = crate::field::parse_poly("t-1", &q).unwrap();
        let c = catalog(&g, &q, 3, 2, &[t_minus_1], 8).unwrap();
        assert_eq!(c.entries.len(), 1);
        let reducible = crate::field::parse_poly("t^2-1", &q).unwrap();
        assert!(catalog(&g, &q, 3, 2, &[reducible], 8).is_err());
    }
}
