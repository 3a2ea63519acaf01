//! Canonical clique-partitions with bounded layered structure for
//! neighborhood graphs (realizable in a window of side two) and simple clique
//! neighborhood graphs (everything adjacent to a distinguished clique with a
//! uniform trace size).
//!
//! After refinement, every class of a neighborhood graph induces a graph that
//! is co-bipartite or proper circular arc with at most four components; each
//! case yields clique classes plus a matching- or cycle-shaped piece of
//! structure graph. Since no refinement dimension is known to suffice a
//! priori, the dimension escalates and every structural conclusion is
//! verified; inputs outside the class fail loudly.

use std::collections::HashMap;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layered::{verify_circle_bounded, ColorKey, StructureGraph};
use crate::pca::{co_bipartite_parts, is_cluster_graph, pca_canonical_cycle};
use crate::refine::{color_refine, wl_k, OrderedPartition};

/// Structure-vertex tags; ascending order is the layer order.
pub mod tags {
    /// class vertex of a neighborhood partition, followed by the class color
    pub const NP_CLASS: u64 = 0;
    /// one vertex per non-cluster trace class
    pub const NUC_INIT: u64 = 1;
    /// recursive neighborhood structure under a non-cluster trace class
    pub const NUC: u64 = 2;
    /// one vertex per connected component of the cluster region
    pub const CC_PAR: u64 = 3;
    /// one vertex per piece-graph component
    pub const CLIQUE_CC: u64 = 4;
    /// final partition class vertices
    pub const FIN_PAR: u64 = 5;
}

/// A clique-partition of (a subset of) the vertices together with a layered
/// structure graph; each class is one structure vertex.
#[derive(Clone, Debug)]
pub struct PartitionWithStructure {
    pub classes: Vec<VertexSet>,
    pub structure: StructureGraph,
    /// class index -> structure vertex
    pub anchor: Vec<usize>,
}

impl PartitionWithStructure {
    pub fn covered(&self, n: usize) -> VertexSet {
        let mut s = VertexSet::new(n);
        for c in &self.classes {
            debug_assert!(s.is_disjoint(c));
            s.union_with(c);
        }
        s
    }
}

enum ClassOutcome {
    Done,
    /// structural conclusion failed for this refinement dimension
    Retry(String),
}

/// Emit the partition and structure for one refinement class `x` (as a set of
/// global vertices) with class color `c`.
fn emit_class(
    g: &Graph,
    x: &VertexSet,
    c: u64,
    out: &mut PartitionWithStructure,
) -> Result<ClassOutcome> {
    let (sub, back) = g.induced_subgraph(x)?;
    let color: ColorKey = vec![tags::NP_CLASS, c];
    if let Some((pairs, isolated)) = co_bipartite_parts(&sub) {
        if pairs.len() > 2 {
            return Ok(ClassOutcome::Retry(format!(
                "co-bipartite class with {} non-trivial complement components",
                pairs.len()
            )));
        }
        for (a, b) in pairs {
            let va = out.structure.add_vertex(color.clone());
            let vb = out.structure.add_vertex(color.clone());
            out.structure.add_edge(va, vb);
            out.classes.push(a.map(|v| back[v], g.n()));
            out.anchor.push(va);
            out.classes.push(b.map(|v| back[v], g.n()));
            out.anchor.push(vb);
        }
        if !isolated.is_empty() {
            let v = out.structure.add_vertex(color.clone());
            out.classes.push(isolated.map(|v| back[v], g.n()));
            out.anchor.push(v);
        }
        return Ok(ClassOutcome::Done);
    }
    let comps = sub.connected_components();
    if comps.len() > 4 {
        return Ok(ClassOutcome::Retry(format!(
            "class splits into {} components",
            comps.len()
        )));
    }
    for comp in comps {
        let (csub, cback) = sub.induced_subgraph(&comp)?;
        let to_global = |v: usize| back[cback[v]];
        if let Some((pairs, isolated)) = co_bipartite_parts(&csub) {
            // degenerate component: the co-bipartite branch applies locally
            if pairs.len() > 2 {
                return Ok(ClassOutcome::Retry(
                    "component complement has too many parts".into(),
                ));
            }
            for (a, b) in pairs {
                let va = out.structure.add_vertex(color.clone());
                let vb = out.structure.add_vertex(color.clone());
                out.structure.add_edge(va, vb);
                out.classes.push(a.map(to_global, g.n()));
                out.anchor.push(va);
                out.classes.push(b.map(to_global, g.n()));
                out.anchor.push(vb);
            }
            if !isolated.is_empty() {
                let v = out.structure.add_vertex(color.clone());
                out.classes.push(isolated.map(to_global, g.n()));
                out.anchor.push(v);
            }
            continue;
        }
        let cc = match pca_canonical_cycle(&csub) {
            Ok(cc) => cc,
            Err(e) => return Ok(ClassOutcome::Retry(format!("no neighborhood cycle: {e}"))),
        };
        let base = out.structure.n();
        for t in 0..cc.twins.class_count() {
            let v = out.structure.add_vertex(color.clone());
            debug_assert_eq!(v, base + t);
            out.classes.push(cc.twins.class(t).map(to_global, g.n()));
            out.anchor.push(v);
        }
        for (a, b) in cc.cycle.edges() {
            out.structure.add_edge(base + a, base + b);
        }
    }
    Ok(ClassOutcome::Done)
}

/// Canonical clique-partition and 4-bounded structure graph of a
/// neighborhood graph. The refinement dimension escalates up to `k_max`
/// until every structural conclusion verifies.
pub fn partition_neighborhood(g: &Graph, k_max: usize) -> Result<PartitionWithStructure> {
    let mut last_reason = String::from("no refinement dimension tried");
    for k in 1..=k_max.max(1) {
        let part = wl_k(g, k)?;
        match try_partition_neighborhood(g, &part) {
            Ok(ps) => return Ok(ps),
            Err(reason) => last_reason = format!("k={k}: {reason}"),
        }
    }
    Err(Error::diagnosed(
        "neighborhood-class-structure",
        format!("not a neighborhood graph, or refinement dimension too small ({last_reason})"),
    ))
}

fn try_partition_neighborhood(
    g: &Graph,
    part: &OrderedPartition,
) -> std::result::Result<PartitionWithStructure, String> {
    let mut out = PartitionWithStructure {
        classes: Vec::new(),
        structure: StructureGraph::new(),
        anchor: Vec::new(),
    };
    for i in 0..part.class_count() {
        match emit_class(g, part.class(i), part.name(i), &mut out).map_err(|e| e.to_string())? {
            ClassOutcome::Done => {}
            ClassOutcome::Retry(reason) => return Err(reason),
        }
    }
    if let Err(v) = verify_circle_bounded(&out.structure, 4) {
        return Err(format!("structure certificate failed: {}", v.reason));
    }
    for c in &out.classes {
        if !g.is_clique(c) {
            return Err("emitted class is not a clique".into());
        }
    }
    if out.covered(g.n()) != g.vertex_set() {
        return Err("classes do not cover the graph".into());
    }
    Ok(out)
}

/// Trace partition of `V \ X`: vertices grouped by their exact closed
/// neighborhood inside the clique `x`. Names are ranks of
/// (trace size, refinement profile) signatures.
pub fn snh_partition(g: &Graph, x: &VertexSet) -> Result<OrderedPartition> {
    if !g.is_clique(x) {
        return Err(Error::precondition("trace set must be a clique"));
    }
    let n = g.n();
    let mut groups: HashMap<VertexSet, VertexSet> = HashMap::new();
    for v in 0..n {
        if x.contains(v) {
            continue;
        }
        let trace = g.closed_neighbors(v).intersection(x);
        if trace.is_empty() {
            return Err(Error::precondition(format!(
                "vertex {v} has no neighbor in the clique"
            )));
        }
        groups
            .entry(trace)
            .or_insert_with(|| VertexSet::new(n))
            .insert(v);
    }
    let refined = color_refine(g, &OrderedPartition::from_colors(g));
    let mut keyed: Vec<(usize, Vec<(u64, usize)>, VertexSet)> = groups
        .into_iter()
        .map(|(trace, members)| {
            let mut profile: HashMap<u64, usize> = HashMap::new();
            for v in members.iter() {
                *profile.entry(refined.name(refined.class_of(v))).or_insert(0) += 1;
            }
            let mut profile: Vec<(u64, usize)> = profile.into_iter().collect();
            profile.sort_unstable();
            (trace.len(), profile, members)
        })
        .collect();
    keyed.sort();
    let mut names = Vec::with_capacity(keyed.len());
    let mut rank = 0u64;
    for i in 0..keyed.len() {
        if i > 0 && (keyed[i].0, &keyed[i].1) != (keyed[i - 1].0, &keyed[i - 1].1) {
            rank += 1;
        }
        names.push(rank);
    }
    // domain stays the full graph; class sets cover V \ X only, so build by
    // hand instead of via OrderedPartition (which wants a full cover)
    let classes: Vec<VertexSet> = keyed.into_iter().map(|(_, _, m)| m).collect();
    Ok(partial_partition(n, x, classes, names))
}

/// Wrap disjoint classes covering `V \ x` as a partition over the full
/// domain by adding `x` as a final throwaway class.
fn partial_partition(
    n: usize,
    x: &VertexSet,
    mut classes: Vec<VertexSet>,
    mut names: Vec<u64>,
) -> OrderedPartition {
    let spare = names.iter().max().copied().unwrap_or(0) + 1;
    classes.push(x.clone());
    names.push(spare);
    OrderedPartition::from_classes(n, classes, names)
}

/// Pieces of the cluster region and the piece graph: trace classes inducing
/// disjoint unions of cliques split into components, pieces joined when
/// completely adjacent in `g`.
pub struct PieceGraph {
    pub pieces: Vec<VertexSet>,
    pub graph: Graph,
}

pub fn build_g_clique(g: &Graph, x: &VertexSet) -> Result<PieceGraph> {
    let snh = snh_partition(g, x)?;
    let k = uniform_trace_size(g, x)?;
    if k >= x.len() {
        return Err(Error::precondition(
            "piece graph requires trace size below the clique size",
        ));
    }
    let mut pieces: Vec<VertexSet> = Vec::new();
    for ci in 0..snh.class_count() {
        let class = snh.class(ci);
        if class == x {
            continue; // the wrapper class for the clique itself
        }
        let (sub, back) = g.induced_subgraph(class)?;
        if !is_cluster_graph(&sub) {
            continue;
        }
        for comp in sub.connected_components() {
            pieces.push(comp.map(|v| back[v], g.n()));
        }
    }
    pieces.sort_by_key(|p| p.first());
    let m = pieces.len();
    let mut b = crate::graph::GraphBuilder::new(m);
    for i in 0..m {
        for j in i + 1..m {
            let full = pieces[i].len() * pieces[j].len();
            let mut count = 0;
            for v in pieces[i].iter() {
                count += g.neighbors(v).intersection_len(&pieces[j]);
            }
            if count == full {
                b.add_edge(i, j);
            }
        }
    }
    Ok(PieceGraph {
        pieces,
        graph: b.build(),
    })
}

fn uniform_trace_size(g: &Graph, x: &VertexSet) -> Result<usize> {
    let mut size: Option<usize> = None;
    for v in 0..g.n() {
        if x.contains(v) {
            continue;
        }
        let t = g.closed_neighbors(v).intersection_len(x);
        match size {
            None => size = Some(t),
            Some(s) if s != t => {
                return Err(Error::precondition(format!(
                    "trace sizes differ: vertex {v} has {t}, expected {s}"
                )))
            }
            _ => {}
        }
    }
    size.ok_or_else(|| Error::precondition("no vertices outside the clique"))
}

/// Canonical clique-partition of `V \ X` and 8-bounded structure graph for a
/// simple clique neighborhood graph with respect to the clique `x`.
pub fn partition_clique_neighborhood(
    g: &Graph,
    x: &VertexSet,
    k_max: usize,
) -> Result<PartitionWithStructure> {
    if !g.is_clique(x) {
        return Err(Error::precondition("x must be a clique"));
    }
    for v in 0..g.n() {
        if !x.contains(v) && g.closed_neighbors(v).is_disjoint(x) {
            return Err(Error::precondition(format!(
                "vertex {v} is outside the closed neighborhood of the clique"
            )));
        }
    }
    // x must be a union of color classes so refinement classes never straddle
    for v in 0..g.n() {
        if !x.contains(v) && x.iter().any(|u| g.color(u) == g.color(v)) {
            return Err(Error::precondition(
                "the clique must be separated from the rest by color",
            ));
        }
    }
    if x.len() == g.n() {
        return Ok(PartitionWithStructure {
            classes: Vec::new(),
            structure: StructureGraph::new(),
            anchor: Vec::new(),
        });
    }
    let k = uniform_trace_size(g, x)?;

    if k == x.len() {
        // everything sees the whole clique: the graph fits a window of side
        // two, so the neighborhood machinery applies to all of it
        let ps = partition_neighborhood(g, k_max)?;
        let mut out = PartitionWithStructure {
            classes: Vec::new(),
            structure: ps.structure,
            anchor: Vec::new(),
        };
        for (c, &a) in ps.classes.iter().zip(&ps.anchor) {
            if c.is_disjoint(x) {
                out.classes.push(c.clone());
                out.anchor.push(a);
            } else {
                debug_assert!(c.is_subset(x), "class straddles the clique");
            }
        }
        return Ok(out);
    }

    let snh = snh_partition(g, x)?;
    let mut out = PartitionWithStructure {
        classes: Vec::new(),
        structure: StructureGraph::new(),
        anchor: Vec::new(),
    };
    // non-cluster trace classes: recursively partitioned neighborhood graphs
    let mut cluster_region = VertexSet::new(g.n());
    let mut nuc_count = 0;
    for ci in 0..snh.class_count() {
        let class = snh.class(ci);
        if class == x {
            continue;
        }
        let (sub, back) = g.induced_subgraph(class)?;
        if is_cluster_graph(&sub) {
            cluster_region.union_with(class);
            continue;
        }
        nuc_count += 1;
        if nuc_count > 4 {
            return Err(Error::diagnosed(
                "clique-neighborhood-structure",
                "more than four non-cluster trace classes",
            ));
        }
        let vy = out.structure.add_vertex(vec![tags::NUC_INIT]);
        let inner = partition_neighborhood(&sub, k_max)?;
        let offset = out.structure.n();
        for u in 0..inner.structure.n() {
            let mut key = vec![tags::NUC];
            key.extend_from_slice(inner.structure.color(u));
            let nv = out.structure.add_vertex(key);
            debug_assert_eq!(nv, offset + u);
            out.structure.add_edge(nv, vy);
        }
        for u in 0..inner.structure.n() {
            for w in inner.structure.neighbors(u).iter() {
                if u < w {
                    out.structure.add_edge(offset + u, offset + w);
                }
            }
        }
        for (cset, &a) in inner.classes.iter().zip(&inner.anchor) {
            out.classes.push(cset.map(|v| back[v], g.n()));
            out.anchor.push(offset + a);
        }
    }

    // cluster region: per connected component, pieces and the piece graph
    let piece_graph = build_g_clique(g, x)?;
    let components = {
        let (csub, cback) = g.induced_subgraph(&cluster_region)?;
        csub.connected_components()
            .into_iter()
            .map(|c| c.map(|v| cback[v], g.n()))
            .collect::<Vec<_>>()
    };
    for comp in components {
        let vy = out.structure.add_vertex(vec![tags::CC_PAR]);
        let local_pieces: Vec<usize> = (0..piece_graph.pieces.len())
            .filter(|&pi| piece_graph.pieces[pi].is_subset(&comp))
            .collect();
        debug_assert_eq!(
            local_pieces.iter().map(|&pi| piece_graph.pieces[pi].len()).sum::<usize>(),
            comp.len()
        );
        let local_set = VertexSet::from_iter(piece_graph.graph.n(), local_pieces.iter().copied());
        let (gc, gc_back) = piece_graph.graph.induced_subgraph(&local_set)?;
        for gc_comp in gc.connected_components() {
            let vc = out.structure.add_vertex(vec![tags::CLIQUE_CC]);
            out.structure.add_edge(vc, vy);
            let (gcc, gcc_back) = gc.induced_subgraph(&gc_comp)?;
            let piece_vertices = |local: &VertexSet| -> VertexSet {
                let mut s = VertexSet::new(g.n());
                for lp in local.iter() {
                    s.union_with(&piece_graph.pieces[gc_back[gcc_back[lp]]]);
                }
                s
            };
            if let Some((pairs, isolated)) = co_bipartite_parts(&gcc) {
                if pairs.len() > 2 {
                    return Err(Error::diagnosed(
                        "clique-neighborhood-structure",
                        "piece component complement has more than two parts",
                    ));
                }
                for (a, b) in pairs {
                    for side in [a, b] {
                        let z = piece_vertices(&side);
                        let vz = out.structure.add_vertex(vec![tags::FIN_PAR]);
                        out.structure.add_edge(vz, vc);
                        out.classes.push(z);
                        out.anchor.push(vz);
                    }
                }
                if !isolated.is_empty() {
                    let z = piece_vertices(&isolated);
                    let vz = out.structure.add_vertex(vec![tags::FIN_PAR]);
                    out.structure.add_edge(vz, vc);
                    out.classes.push(z);
                    out.anchor.push(vz);
                }
            } else {
                let cc = pca_canonical_cycle(&gcc).map_err(|e| {
                    Error::diagnosed(
                        "clique-neighborhood-structure",
                        format!("piece component has no neighborhood cycle: {e}"),
                    )
                })?;
                let base = out.structure.n();
                for t in 0..cc.twins.class_count() {
                    let vz = out.structure.add_vertex(vec![tags::FIN_PAR]);
                    debug_assert_eq!(vz, base + t);
                    out.structure.add_edge(vz, vc);
                    out.classes.push(piece_vertices(cc.twins.class(t)));
                    out.anchor.push(vz);
                }
                for (a, b) in cc.cycle.edges() {
                    out.structure.add_edge(base + a, base + b);
                }
            }
        }
    }

    // postconditions
    let mut covered = out.covered(g.n());
    covered.union_with(x);
    if covered != g.vertex_set() {
        return Err(Error::diagnosed(
            "clique-neighborhood-structure",
            "classes do not cover the neighborhood",
        ));
    }
    for c in &out.classes {
        if !g.is_clique(c) {
            return Err(Error::diagnosed(
                "clique-neighborhood-structure",
                "emitted class is not a clique",
            ));
        }
    }
    if let Err(v) = verify_circle_bounded(&out.structure, 8) {
        return Err(Error::diagnosed(
            "clique-neighborhood-structure",
            format!("structure certificate failed: {}", v.reason),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{intersection_graph, ratio, Realization};

    #[test]
    fn complete_graph_is_one_class() {
        let g = Graph::complete(5);
        let ps = partition_neighborhood(&g, 3).unwrap();
        assert_eq!(ps.classes.len(), 1);
        assert_eq!(ps.classes[0].len(), 5);
        assert_eq!(ps.structure.n(), 1);
    }

    #[test]
    fn five_cycle_partitions_into_singletons() {
        let g = Graph::cycle(5);
        let ps = partition_neighborhood(&g, 3).unwrap();
        assert_eq!(ps.classes.len(), 5);
        assert!(verify_circle_bounded(&ps.structure, 4).is_ok());
        // the structure is the 5-cycle itself
        assert_eq!(ps.structure.edge_count(), 5);
    }

    #[test]
    fn claw_is_a_neighborhood_graph() {
        let g = crate::pca::patterns::claw();
        let ps = partition_neighborhood(&g, 3).unwrap();
        assert!(verify_circle_bounded(&ps.structure, 4).is_ok());
        let covered = ps.covered(4);
        assert_eq!(covered.len(), 4);
        for c in &ps.classes {
            assert!(g.is_clique(c));
        }
    }

    #[test]
    fn partition_is_relabeling_invariant() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 2)]);
        let ps1 = partition_neighborhood(&g, 3).unwrap();
        let perm = vec![4, 2, 0, 5, 1, 3];
        let h = g.relabel(&perm);
        let ps2 = partition_neighborhood(&h, 3).unwrap();
        assert_eq!(ps1.structure.color_signature(), ps2.structure.color_signature());
        let mut s1: Vec<usize> = ps1.classes.iter().map(VertexSet::len).collect();
        let mut s2: Vec<usize> = ps2.classes.iter().map(VertexSet::len).collect();
        s1.sort_unstable();
        s2.sort_unstable();
        assert_eq!(s1, s2);
    }

    #[test]
    fn snh_groups_by_trace() {
        // x = {0}, pendants 1 and 2 share the trace
        let g = Graph::from_edges(3, &[(0, 1), (0, 2)]);
        let x = VertexSet::from_iter(3, [0]);
        let p = snh_partition(&g, &x).unwrap();
        // one trace class plus the wrapper class for x
        assert_eq!(p.class_count(), 2);
        // traces {0} vs {0,1}: two classes
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 3)]);
        let x = VertexSet::from_iter(4, [0, 1]);
        let p = snh_partition(&g, &x).unwrap();
        assert_eq!(p.class_count(), 3);
    }

    #[test]
    fn snh_rejects_uncovered_vertices() {
        let g = Graph::from_edges(3, &[(0, 1)]);
        let x = VertexSet::from_iter(3, [0]);
        assert!(snh_partition(&g, &x).is_err());
    }

    #[test]
    fn piece_graph_on_split_traces() {
        // clique {0,1}; 2,3 see only 0 and are adjacent; 4 sees only 1
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (2, 3), (1, 4)])
            .with_colors(vec![1, 1, 0, 0, 0]);
        let x = VertexSet::from_iter(5, [0, 1]);
        let pg = build_g_clique(&g, &x).unwrap();
        assert_eq!(pg.pieces.len(), 2);
        assert_eq!(pg.pieces[0].len(), 2);
        assert_eq!(pg.graph.edge_count(), 0);
    }

    #[test]
    fn clique_neighborhood_star_case() {
        // K1 clique with 4 独立 pendants: trace size 1 = |x|: delegation path
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)])
            .with_colors(vec![1, 0, 0, 0, 0]);
        let x = VertexSet::from_iter(5, [0]);
        let ps = partition_clique_neighborhood(&g, &x, 3).unwrap();
        let covered = ps.covered(5);
        assert_eq!(covered.len(), 4);
        assert!(!covered.contains(0));
        assert!(verify_circle_bounded(&ps.structure, 8).is_ok());
    }

    #[test]
    fn clique_neighborhood_partial_trace() {
        // x = edge {0,1}; outside vertices see exactly one end each
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 3)]).with_colors(vec![1, 1, 0, 0]);
        let x = VertexSet::from_iter(4, [0, 1]);
        let ps = partition_clique_neighborhood(&g, &x, 3).unwrap();
        assert_eq!(ps.covered(4).len(), 2);
        for c in &ps.classes {
            assert!(g.is_clique(c));
        }
        assert!(verify_circle_bounded(&ps.structure, 8).is_ok());
    }

    #[test]
    fn clique_neighborhood_from_geometry() {
        // points: clique at the origin cell, ring of neighbors around it
        let coords: Vec<(i64, i64)> = vec![
            (0, 0),
            (10, 64), // above, within distance 1 of origin
            (64, 10),
            (-50, 40),
        ];
        let f = Realization {
            points: coords
                .iter()
                .map(|&(a, b)| (ratio(a, 64), ratio(b, 64)))
                .collect(),
        };
        let g0 = intersection_graph(&f);
        let mut colors = vec![0u64; g0.n()];
        colors[0] = 1;
        let g = g0.with_colors(colors);
        let x = VertexSet::from_iter(g.n(), [0]);
        let ps = partition_clique_neighborhood(&g, &x, 3).unwrap();
        assert_eq!(ps.covered(g.n()).len(), g.n() - 1);
        assert!(verify_circle_bounded(&ps.structure, 8).is_ok());
    }

    #[test]
    fn rejects_non_uniform_trace() {
        // one vertex sees both of x, another sees one
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 2), (0, 3)]).with_colors(vec![1, 1, 0, 0]);
        let x = VertexSet::from_iter(4, [0, 1]);
        assert!(partition_clique_neighborhood(&g, &x, 3).is_err());
    }
}
