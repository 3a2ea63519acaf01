//! The end-to-end decision pipeline: twin reduction, anchoring, the layered
//! global structure, clique-stable refinement layers, the top action group on
//! the canonical partition, and the isomorphism decision.
//!
//! Soundness gate: every bijection or automorphism produced here is verified
//! against adjacency and colors before being returned. Inputs outside the
//! intended graph class can produce diagnosed failures, never a wrong
//! verified answer.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::One;

use crate::bitset::VertexSet;
use crate::cliques::{
    clique_stable_refine, lift_automorphism, quotient_graph, verify_staircase, QuotientGraph,
    StaircaseWitness,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layered::{aut_circle_bounded, verify_circle_bounded, ColorKey, StructureGraph};
use crate::neighborhood::partition_clique_neighborhood;
use crate::perm::{
    hypergraph_aut_intersect, restriction_kernel_image, schreier_sims, set_transporter,
    Hypergraph, Perm, PermGroup,
};
use crate::refine::{color_refine, OrderedPartition};

/// Reserved color marking the anchor vertex; file colors are capped far
/// below it and arithmetic headroom stays above it.
pub const ANCHOR_COLOR: u64 = 1 << 48;

#[derive(Clone, Copy, Debug)]
pub struct PipelineConfig {
    /// refinement dimension ceiling for neighborhood partitioning
    pub wl_k: usize,
    /// certificate bound for every produced structure graph
    pub circle_bound: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            wl_k: 3,
            circle_bound: 8,
        }
    }
}

// structure-vertex tags for the global layers; ascending = layer order
const SECTION_BASE: u64 = 0;
const SECTION_ROUNDS: u64 = 1;
const SECTION_FINAL: u64 = 2;
const GTAG_INIT: u64 = 0;
const GTAG_INITJ: u64 = 1;
const GTAG_DEG: u64 = 2;
const GTAG_CNP: u64 = 3;
const GTAG_FINPAR: u64 = 4;

/// Twin contraction: one vertex per connected-twin class, colored by the
/// rank of (original color, class size).
pub struct TwinReduction {
    pub graph: Graph,
    /// reduced color -> (original color, class size)
    pub table: Vec<(u64, u64)>,
    /// reduced vertex -> original members
    pub classes: Vec<VertexSet>,
}

pub fn twin_reduce(g: &Graph) -> TwinReduction {
    let twins = g.connected_twin_classes();
    let m = twins.class_count();
    let mut keys: Vec<(u64, u64)> = (0..m)
        .map(|i| {
            let rep = twins.class(i).first().unwrap();
            (g.color(rep), twins.class(i).len() as u64)
        })
        .collect();
    let mut table = keys.clone();
    table.sort_unstable();
    table.dedup();
    let rank: HashMap<(u64, u64), u64> = table
        .iter()
        .enumerate()
        .map(|(r, &k)| (k, r as u64))
        .collect();
    let mut b = crate::graph::GraphBuilder::new(m);
    for i in 0..m {
        b.set_color(i, rank[&keys[i]]);
        let rep = twins.class(i).first().unwrap();
        for j in i + 1..m {
            if g.has_edge(rep, twins.class(j).first().unwrap()) {
                b.add_edge(i, j);
            }
        }
    }
    keys.clear();
    TwinReduction {
        graph: b.build(),
        table,
        classes: twins.classes().to_vec(),
    }
}

/// Recolor two reductions through a shared table so their colors are
/// directly comparable.
pub fn harmonize(a: &TwinReduction, b: &TwinReduction) -> (Graph, Graph) {
    let mut joint: Vec<(u64, u64)> = a.table.iter().chain(&b.table).copied().collect();
    joint.sort_unstable();
    joint.dedup();
    let rank: HashMap<(u64, u64), u64> = joint
        .iter()
        .enumerate()
        .map(|(r, &k)| (k, r as u64))
        .collect();
    let recolor = |r: &TwinReduction| -> Graph {
        let colors: Vec<u64> = (0..r.graph.n())
            .map(|v| rank[&r.table[r.graph.color(v) as usize]])
            .collect();
        r.graph.with_colors(colors)
    };
    (recolor(a), recolor(b))
}

/// A connected, twin-free graph with exactly one vertex of the reserved
/// anchor color.
pub struct AnchoredInstance {
    pub graph: Graph,
    pub anchor: usize,
}

impl AnchoredInstance {
    pub fn new(g: &Graph, anchor: usize) -> Result<AnchoredInstance> {
        if anchor >= g.n() {
            return Err(Error::IndexOutOfRange {
                index: anchor,
                n: g.n(),
            });
        }
        if !g.is_connected() {
            return Err(Error::precondition("anchored instance must be connected"));
        }
        if (0..g.n()).any(|v| g.color(v) == ANCHOR_COLOR) {
            return Err(Error::precondition("anchor color already in use"));
        }
        let twins = g.connected_twin_classes();
        if twins.class_count() != g.n() {
            return Err(Error::precondition("anchored instance must be twin-free"));
        }
        Ok(AnchoredInstance {
            graph: g.with_color(anchor, ANCHOR_COLOR),
            anchor,
        })
    }
}

/// Layered clique-partition of an anchored instance.
pub struct GlobalLayers {
    pub classes: Vec<VertexSet>,
    pub structure: StructureGraph,
    /// class index -> structure vertex
    pub class_vertex: Vec<usize>,
}

/// Levels from the anchor; per level, classes split by previous-layer
/// adjacency pattern and per-class trace counts, then clique-partitioned
/// against every incident previous class; the structure graph accumulates one
/// gadget per construction step.
pub fn global_structure(inst: &AnchoredInstance, cfg: &PipelineConfig) -> Result<GlobalLayers> {
    let g = &inst.graph;
    let n = g.n();
    let levels = g.distance_levels(inst.anchor);
    let covered: usize = levels.iter().map(VertexSet::len).sum();
    if covered != n {
        return Err(Error::precondition("instance must be connected"));
    }
    let mut h = StructureGraph::new();
    let mut classes: Vec<VertexSet> = Vec::new();
    let mut class_vertex: Vec<usize> = Vec::new();

    let v0 = h.add_vertex(vec![SECTION_BASE, 0, GTAG_FINPAR]);
    classes.push(VertexSet::from_iter(n, [inst.anchor]));
    class_vertex.push(v0);
    let mut prev_layer: Vec<usize> = vec![0];

    for (i, y) in levels.iter().enumerate().skip(1) {
        let li = i as u64;
        let mut zcells: BTreeMap<(Vec<usize>, u64), VertexSet> = BTreeMap::new();
        for v in y.iter() {
            let seen: Vec<usize> = prev_layer
                .iter()
                .copied()
                .filter(|&c| g.neighbors(v).intersection_len(&classes[c]) > 0)
                .collect();
            debug_assert!(!seen.is_empty());
            zcells
                .entry((seen, g.color(v)))
                .or_insert_with(|| VertexSet::new(n))
                .insert(v);
        }
        let mut this_layer: Vec<usize> = Vec::new();
        for ((seen, _color), z) in zcells {
            let vz = h.add_vertex(vec![SECTION_BASE, li, GTAG_INIT]);
            for &c in &seen {
                h.add_edge(vz, class_vertex[c]);
            }
            // split by trace counts toward each seen class
            let mut dcells: BTreeMap<Vec<usize>, VertexSet> = BTreeMap::new();
            for v in z.iter() {
                let profile: Vec<usize> = seen
                    .iter()
                    .map(|&c| g.neighbors(v).intersection_len(&classes[c]))
                    .collect();
                dcells
                    .entry(profile)
                    .or_insert_with(|| VertexSet::new(n))
                    .insert(v);
            }
            let mut gadget: HashMap<(usize, usize), usize> = HashMap::new();
            for (profile, a) in dcells {
                let va = h.add_vertex(vec![SECTION_BASE, li, GTAG_DEG]);
                h.add_edge(va, vz);
                for (j, &cnt) in profile.iter().enumerate() {
                    debug_assert!(cnt > 0);
                    let gv = *gadget.entry((j, cnt)).or_insert_with(|| {
                        let gv = h.add_vertex(vec![SECTION_BASE, li, GTAG_INITJ, cnt as u64]);
                        gv
                    });
                    if !h.has_edge(gv, vz) {
                        h.add_edge(gv, vz);
                        h.add_edge(gv, class_vertex[seen[j]]);
                    }
                    h.add_edge(va, gv);
                }
                // clique-neighborhood partition against each seen class
                let mut sub_partitions: Vec<Vec<(VertexSet, usize)>> = Vec::new();
                for &cidx in &seen {
                    let xset = &classes[cidx];
                    let mut union = a.clone();
                    union.union_with(xset);
                    let (sub, back) = g.induced_subgraph(&union)?;
                    let local_colors: Vec<u64> = (0..sub.n())
                        .map(|lv| u64::from(xset.contains(back[lv])))
                        .collect();
                    let sub = sub.with_colors(local_colors);
                    let local_x = VertexSet::from_iter(
                        sub.n(),
                        (0..sub.n()).filter(|&lv| xset.contains(back[lv])),
                    );
                    let ps = partition_clique_neighborhood(&sub, &local_x, cfg.wl_k)
                        .map_err(|e| match e {
                            Error::Diagnosed(d) => Error::diagnosed(
                                d.check,
                                format!("layer {i}: {}", d.context),
                            ),
                            other => other,
                        })?;
                    let offset = h.n();
                    for u in 0..ps.structure.n() {
                        let mut key: ColorKey = vec![SECTION_BASE, li, GTAG_CNP];
                        key.extend_from_slice(ps.structure.color(u));
                        let hv = h.add_vertex(key);
                        debug_assert_eq!(hv, offset + u);
                        h.add_edge(hv, va);
                        h.add_edge(hv, class_vertex[cidx]);
                    }
                    for u in 0..ps.structure.n() {
                        for w in ps.structure.neighbors(u).iter() {
                            if u < w {
                                h.add_edge(offset + u, offset + w);
                            }
                        }
                    }
                    let translated: Vec<(VertexSet, usize)> = ps
                        .classes
                        .iter()
                        .zip(&ps.anchor)
                        .map(|(cset, &anch)| (cset.map(|v| back[v], n), offset + anch))
                        .collect();
                    sub_partitions.push(translated);
                }
                // meet of the per-class partitions of the cell
                let mut cells: BTreeMap<Vec<usize>, VertexSet> = BTreeMap::new();
                for v in a.iter() {
                    let key: Vec<usize> = sub_partitions
                        .iter()
                        .map(|parts| {
                            parts
                                .iter()
                                .position(|(cset, _)| cset.contains(v))
                                .expect("cell vertex must be covered")
                        })
                        .collect();
                    cells
                        .entry(key)
                        .or_insert_with(|| VertexSet::new(n))
                        .insert(v);
                }
                for (key, bset) in cells {
                    let vb = h.add_vertex(vec![SECTION_BASE, li, GTAG_FINPAR]);
                    for (j, &pi) in key.iter().enumerate() {
                        h.add_edge(vb, sub_partitions[j][pi].1);
                    }
                    classes.push(bset);
                    class_vertex.push(vb);
                    this_layer.push(classes.len() - 1);
                }
            }
        }
        prev_layer = this_layer;
    }

    // postconditions
    let mut covered = VertexSet::new(n);
    for c in &classes {
        if !covered.is_disjoint(c) {
            return Err(Error::diagnosed("global-partition", "classes overlap"));
        }
        covered.union_with(c);
        if !g.is_clique(c) {
            return Err(Error::diagnosed("global-partition", "class is not a clique"));
        }
    }
    if covered != g.vertex_set() {
        return Err(Error::diagnosed("global-partition", "classes do not cover"));
    }
    if let Err(v) = verify_circle_bounded(&h, cfg.circle_bound) {
        return Err(Error::diagnosed(
            "global-certificate",
            format!("base structure: {}", v.reason),
        ));
    }
    Ok(GlobalLayers {
        classes,
        structure: h,
        class_vertex,
    })
}

/// Everything the isomorphism decision needs about one anchored instance.
pub struct GlobalStructure {
    pub partition: OrderedPartition,
    pub structure: StructureGraph,
    pub quotient: QuotientGraph,
    pub top_group: PermGroup,
    pub witness: StaircaseWitness,
    /// partition class index -> final structure vertex
    pub class_vertex: Vec<usize>,
}

/// Clique-stable refinement of the global layers, with one structure layer
/// per refinement round, plus the top action group on the refined partition.
pub fn global_structure_refined(
    inst: &AnchoredInstance,
    cfg: &PipelineConfig,
) -> Result<GlobalStructure> {
    let g = &inst.graph;
    let n = g.n();
    let layers = global_structure(inst, cfg)?;
    let base_names: Vec<u64> = (0..layers.classes.len() as u64).collect();
    let base_p = OrderedPartition::from_classes(n, layers.classes.clone(), base_names);
    let csr = clique_stable_refine(g, &base_p)?;

    let mut h = layers.structure.clone();
    // locate the base class for each round-0 vertex-side class
    let base_lookup: HashMap<Vec<usize>, usize> = layers
        .classes
        .iter()
        .enumerate()
        .map(|(ci, c)| (c.iter().collect(), ci))
        .collect();

    let mut round_vertex: Vec<Vec<usize>> = Vec::new();
    let mut gadgets: HashMap<(usize, usize, usize), usize> = HashMap::new(); // (round, class, count)
    for (r, round) in csr.rounds.iter().enumerate() {
        let ru = r as u64;
        let mut ids = Vec::with_capacity(round.class_count());
        for ci in 0..round.class_count() {
            let v = h.add_vertex(vec![SECTION_ROUNDS, ru, 0]);
            ids.push(v);
        }
        for ci in 0..round.class_count() {
            let class = round.class(ci);
            let rep = class.first().unwrap();
            if r == 0 {
                if rep < n {
                    let key: Vec<usize> = class.iter().collect();
                    let base = *base_lookup.get(&key).ok_or_else(|| {
                        Error::diagnosed(
                            "global-refinement",
                            "initial refinement class does not match a base class",
                        )
                    })?;
                    h.add_edge(ids[ci], layers.class_vertex[base]);
                }
                continue;
            }
            let prev = &csr.rounds[r - 1];
            let parent = prev.class_of(rep);
            h.add_edge(ids[ci], round_vertex[r - 1][parent]);
            for pci in 0..prev.class_count() {
                let cnt = csr.gm_star.neighbors(rep).intersection_len(prev.class(pci));
                if cnt == 0 {
                    continue;
                }
                let gv = *gadgets.entry((r - 1, pci, cnt)).or_insert_with(|| {
                    let gv = h.add_vertex(vec![SECTION_ROUNDS, (r - 1) as u64, 1, cnt as u64]);
                    gv
                });
                if !h.has_edge(gv, round_vertex[r - 1][pci]) {
                    h.add_edge(gv, round_vertex[r - 1][pci]);
                }
                h.add_edge(ids[ci], gv);
            }
        }
        round_vertex.push(ids);
    }

    // final partition classes under the last round
    let partition = csr.vertex_partition.clone();
    let last = csr.rounds.last().unwrap();
    let mut class_vertex = Vec::with_capacity(partition.class_count());
    for ci in 0..partition.class_count() {
        let rep = partition.class(ci).first().unwrap();
        let round_class = last.class_of(rep);
        let v = h.add_vertex(vec![SECTION_FINAL]);
        h.add_edge(v, round_vertex[round_vertex.len() - 1][round_class]);
        class_vertex.push(v);
    }

    if let Err(v) = verify_circle_bounded(&h, cfg.circle_bound) {
        return Err(Error::diagnosed(
            "global-certificate",
            format!("refined structure: {}", v.reason),
        ));
    }

    let quotient = quotient_graph(g, &partition);
    let witness = verify_staircase(g, &partition).ok_or_else(|| {
        Error::diagnosed("staircase-witness", "refined partition has no staircase witness")
    })?;

    let aut_h = aut_circle_bounded(&h)?;
    let fin_set = VertexSet::from_iter(h.n(), class_vertex.iter().copied());
    let restr = restriction_kernel_image(&aut_h, &fin_set)?;
    // restriction points are ascending structure vertices; class_vertex was
    // created in class order, hence ascending as well
    debug_assert_eq!(restr.points, class_vertex);
    let ambient = restr.image;
    let top_group = quotient_constrained(&quotient, &ambient, &[(g, &partition, 0)])?;

    Ok(GlobalStructure {
        partition,
        structure: h,
        quotient,
        top_group,
        witness,
        class_vertex,
    })
}

/// Intersect an ambient group on partition classes with the quotient's
/// colored constraints: class size and member color as point colors, crossing
/// counts as pair colors. `sides` lists (graph, partition, class offset) so a
/// disjoint union can be encoded in one hypergraph.
fn quotient_constrained(
    _q: &QuotientGraph,
    ambient: &PermGroup,
    sides: &[(&Graph, &OrderedPartition, usize)],
) -> Result<PermGroup> {
    let m = ambient.degree();
    let mut point_keys: Vec<(u64, u64)> = vec![(0, 0); m];
    let mut edges = Vec::new();
    let mut colors = Vec::new();
    for &(g, p, off) in sides {
        let q = quotient_graph(g, p);
        for ci in 0..p.class_count() {
            let rep = p.class(ci).first().unwrap();
            point_keys[off + ci] = (q.sizes[ci], g.color(rep));
        }
        for ci in 0..p.class_count() {
            for cj in ci + 1..p.class_count() {
                edges.push(VertexSet::from_iter(m, [off + ci, off + cj]));
                colors.push(1 << 40 | q.crossing[ci][cj]);
            }
        }
    }
    let mut distinct: Vec<(u64, u64)> = point_keys.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let rank: HashMap<(u64, u64), u64> = distinct
        .iter()
        .enumerate()
        .map(|(r, &k)| (k, r as u64))
        .collect();
    for (ci, key) in point_keys.iter().enumerate() {
        edges.push(VertexSet::from_iter(m, [ci]));
        colors.push(rank[key]);
    }
    hypergraph_aut_intersect(&Hypergraph::new(m, edges, colors), ambient)
}

/// Attempt to match two anchored instances: union the structures, compute the
/// union automorphism group, restrict to the canonical partitions, intersect
/// with the union quotient constraints, search for a side swap and lift it to
/// a verified vertex bijection of the reduced graphs.
fn anchored_match(
    g1: &Graph,
    gs1: &GlobalStructure,
    g2: &Graph,
    gs2: &GlobalStructure,
) -> Result<Option<Vec<usize>>> {
    let m1 = gs1.partition.class_count();
    let m2 = gs2.partition.class_count();
    if m1 != m2 || g1.n() != g2.n() {
        return Ok(None);
    }
    if gs1.quotient.signature() != gs2.quotient.signature() {
        return Ok(None);
    }
    if gs1.structure.color_signature() != gs2.structure.color_signature() {
        return Ok(None);
    }
    let hu = gs1.structure.disjoint_union(&gs2.structure);
    let aut = aut_circle_bounded(&hu)?;
    let shift = gs1.structure.n();
    let fin: Vec<usize> = gs1
        .class_vertex
        .iter()
        .copied()
        .chain(gs2.class_vertex.iter().map(|&v| v + shift))
        .collect();
    let fin_set = VertexSet::from_iter(hu.n(), fin.iter().copied());
    let restr = restriction_kernel_image(&aut, &fin_set)?;
    // class index mapping: side-1 classes then side-2 classes
    debug_assert_eq!(restr.points, fin);
    let gq = quotient_constrained(
        &gs1.quotient,
        &restr.image,
        &[(g1, &gs1.partition, 0), (g2, &gs2.partition, m1)],
    )?;
    let side1 = VertexSet::from_iter(m1 + m2, 0..m1);
    let side2 = VertexSet::from_iter(m1 + m2, m1..m1 + m2);
    let Some(sigma) = set_transporter(&gq, &side1, &side2) else {
        return Ok(None);
    };

    // lift on the union graph
    let n1 = g1.n();
    let gu = g1.disjoint_union(g2);
    let mut u_classes: Vec<VertexSet> = gs1
        .partition
        .classes()
        .iter()
        .map(|c| c.map(|v| v, gu.n()))
        .collect();
    u_classes.extend(
        gs2.partition
            .classes()
            .iter()
            .map(|c| c.map(|v| v + n1, gu.n())),
    );
    let u_names: Vec<u64> = (0..u_classes.len() as u64).collect();
    let pu = OrderedPartition::from_classes(gu.n(), u_classes, u_names);
    let mut u_orders: Vec<Vec<usize>> = gs1.witness.orders.clone();
    u_orders.extend(
        gs2.witness
            .orders
            .iter()
            .map(|o| o.iter().map(|&v| v + n1).collect::<Vec<usize>>()),
    );
    let wu = StaircaseWitness { orders: u_orders };
    let gamma = lift_automorphism(&gu, &pu, &wu, &sigma)?;
    let mut map = vec![0usize; n1];
    for v in 0..n1 {
        let img = gamma.apply(v);
        if img < n1 {
            return Err(Error::diagnosed("quotient-lift", "lift does not swap the sides"));
        }
        map[v] = img - n1;
    }
    if !g1.is_isomorphism_to(g2, &map) {
        return Err(Error::diagnosed("quotient-lift", "lifted map failed verification"));
    }
    Ok(Some(map))
}

fn anchored_structure(g: &Graph, v: usize, cfg: &PipelineConfig) -> Result<GlobalStructure> {
    let inst = AnchoredInstance::new(g, v)?;
    global_structure_refined(&inst, cfg)
}

/// Isomorphism decision for connected twin-reduced colored graphs with
/// comparable colors.
fn reduced_connected_iso(
    g1: &Graph,
    g2: &Graph,
    cfg: &PipelineConfig,
) -> Result<Option<Vec<usize>>> {
    if g1.n() != g2.n() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let n = g1.n();
    if n == 1 {
        return Ok(if g1.color(0) == g2.color(0) {
            Some(vec![0])
        } else {
            None
        });
    }
    // candidate anchors from refinement of the union
    let union = g1.disjoint_union(g2);
    let part = color_refine(&union, &OrderedPartition::from_colors(&union));
    for c in part.classes() {
        let a = c.iter().filter(|&v| v < n).count();
        if 2 * a != c.len() {
            return Ok(None); // unequal side counts: provably non-isomorphic
        }
    }
    let anchor_class = (0..part.class_count())
        .filter(|&i| part.class(i).iter().any(|v| v < n))
        .min_by_key(|&i| (part.name(i), i))
        .expect("non-empty graph");
    let v1 = part.class(anchor_class).iter().find(|&v| v < n).unwrap();
    let candidates: Vec<usize> = part
        .class(anchor_class)
        .iter()
        .filter(|&v| v >= n)
        .map(|v| v - n)
        .collect();
    let gs1 = anchored_structure(g1, v1, cfg)?;
    let anchored1 = g1.with_color(v1, ANCHOR_COLOR);
    for v2 in candidates {
        let gs2 = anchored_structure(g2, v2, cfg)?;
        let anchored2 = g2.with_color(v2, ANCHOR_COLOR);
        if let Some(map) = anchored_match(&anchored1, &gs1, &anchored2, &gs2)? {
            return Ok(Some(map));
        }
    }
    Ok(None)
}

fn connected_iso(g1: &Graph, g2: &Graph, cfg: &PipelineConfig) -> Result<Option<Vec<usize>>> {
    let r1 = twin_reduce(g1);
    let r2 = twin_reduce(g2);
    if r1.graph.n() != r2.graph.n() {
        return Ok(None);
    }
    let (h1, h2) = harmonize(&r1, &r2);
    {
        let mut c1: Vec<u64> = h1.colors().to_vec();
        let mut c2: Vec<u64> = h2.colors().to_vec();
        c1.sort_unstable();
        c2.sort_unstable();
        if c1 != c2 {
            return Ok(None);
        }
    }
    let Some(reduced_map) = reduced_connected_iso(&h1, &h2, cfg)? else {
        return Ok(None);
    };
    // expand through the twin classes: members pair up in index order
    let mut map = vec![usize::MAX; g1.n()];
    for (c1, &c2) in reduced_map.iter().enumerate().map(|(i, t)| (i, t)) {
        let src: Vec<usize> = r1.classes[c1].iter().collect();
        let dst: Vec<usize> = r2.classes[c2].iter().collect();
        if src.len() != dst.len() {
            return Err(Error::diagnosed("twin-expansion", "class size mismatch"));
        }
        for (s, d) in src.iter().zip(&dst) {
            map[*s] = *d;
        }
    }
    if !g1.is_isomorphism_to(g2, &map) {
        return Err(Error::diagnosed("twin-expansion", "expanded map failed verification"));
    }
    Ok(Some(map))
}

/// The isomorphism decision: decompose into components, match them by
/// invariants and pairwise anchored tests, and assemble a verified bijection.
pub fn isomorphic(g1: &Graph, g2: &Graph, cfg: &PipelineConfig) -> Result<Option<Vec<usize>>> {
    if g1.n() != g2.n() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let comps1 = g1.connected_components();
    let comps2 = g2.connected_components();
    if comps1.len() != comps2.len() {
        return Ok(None);
    }
    let key = |g: &Graph, c: &VertexSet| -> (usize, Vec<u64>, usize) {
        let (sub, _) = g.induced_subgraph(c).unwrap();
        let mut colors: Vec<u64> = (0..sub.n()).map(|v| sub.color(v)).collect();
        colors.sort_unstable();
        (sub.n(), colors, sub.edge_count())
    };
    let mut used = vec![false; comps2.len()];
    let mut map = vec![usize::MAX; g1.n()];
    for c1 in &comps1 {
        let k1 = key(g1, c1);
        let (sub1, back1) = g1.induced_subgraph(c1)?;
        let mut matched = false;
        for (j, c2) in comps2.iter().enumerate() {
            if used[j] || key(g2, c2) != k1 {
                continue;
            }
            let (sub2, back2) = g2.induced_subgraph(c2)?;
            if let Some(m) = connected_iso(&sub1, &sub2, cfg)? {
                for (v, &img) in m.iter().enumerate() {
                    map[back1[v]] = back2[img];
                }
                used[j] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return Ok(None);
        }
    }
    if !g1.is_isomorphism_to(g2, &map) {
        return Err(Error::diagnosed("assembled-map", "component map failed verification"));
    }
    Ok(Some(map))
}

fn factorial(k: u64) -> BigUint {
    let mut f = BigUint::one();
    for i in 2..=k {
        f *= BigUint::from(i);
    }
    f
}

/// The automorphisms of the reduced graph fixing every partition class
/// setwise: edge-preserving members of the product of per-class symmetric
/// groups.
fn partition_kernel(g: &Graph, p: &OrderedPartition) -> Result<PermGroup> {
    let n = g.n();
    let mut gens = Vec::new();
    for ci in 0..p.class_count() {
        let members: Vec<usize> = p.class(ci).iter().collect();
        for w in members.windows(2) {
            gens.push(Perm::from_cycles(n, &[&[w[0], w[1]]]));
        }
    }
    let ambient = schreier_sims(n, &gens)?;
    let edges: Vec<VertexSet> = g
        .edges()
        .into_iter()
        .map(|(u, v)| VertexSet::from_iter(n, [u, v]))
        .collect();
    let colors = vec![0; edges.len()];
    hypergraph_aut_intersect(&Hypergraph::new(n, edges, colors), &ambient)
}

/// Automorphism group data for a connected graph.
pub struct AutomorphismGroup {
    pub order: BigUint,
    /// verified generators on the original vertex set
    pub generators: Vec<Perm>,
}

pub fn automorphism_group(g: &Graph, cfg: &PipelineConfig) -> Result<AutomorphismGroup> {
    if !g.is_connected() {
        return Err(Error::precondition("automorphism order requires a connected graph"));
    }
    let n = g.n();
    if n == 0 {
        return Ok(AutomorphismGroup {
            order: BigUint::one(),
            generators: Vec::new(),
        });
    }
    let r = twin_reduce(g);
    let mut order = BigUint::one();
    let mut generators: Vec<Perm> = Vec::new();
    for class in &r.classes {
        order *= factorial(class.len() as u64);
        let members: Vec<usize> = class.iter().collect();
        for w in members.windows(2) {
            generators.push(Perm::from_cycles(n, &[&[w[0], w[1]]]));
        }
    }
    let reduced = &r.graph;
    if reduced.n() > 1 {
        // anchored stabilizer order times the anchor orbit size
        let part = color_refine(reduced, &OrderedPartition::from_colors(reduced));
        let anchor_class = (0..part.class_count())
            .min_by_key(|&i| (part.name(i), i))
            .unwrap();
        let v1 = part.class(anchor_class).first().unwrap();
        let gs1 = anchored_structure(reduced, v1, cfg)?;
        let anchored1 = reduced.with_color(v1, ANCHOR_COLOR);
        let kernel = partition_kernel(&anchored1, &gs1.partition)?;
        let stab_order = kernel.order() * gs1.top_group.order();

        let mut orbit = 1u64;
        let mut orbit_maps: Vec<Vec<usize>> = Vec::new();
        for v2 in part.class(anchor_class).iter() {
            if v2 == v1 {
                continue;
            }
            let gs2 = anchored_structure(reduced, v2, cfg)?;
            let anchored2 = reduced.with_color(v2, ANCHOR_COLOR);
            if let Some(m) = anchored_match(&anchored1, &gs1, &anchored2, &gs2)? {
                orbit += 1;
                orbit_maps.push(m);
            }
        }
        order *= stab_order * BigUint::from(orbit);

        // reduced-level generators, expanded blockwise to the original graph
        let mut reduced_gens: Vec<Perm> = kernel.generators().to_vec();
        for delta in gs1.top_group.generators() {
            reduced_gens.push(lift_automorphism(
                &anchored1,
                &gs1.partition,
                &gs1.witness,
                delta,
            )?);
        }
        for m in orbit_maps {
            reduced_gens.push(Perm::from_images(m)?);
        }
        for rg in reduced_gens {
            let mut images = vec![usize::MAX; n];
            for (c, class) in r.classes.iter().enumerate() {
                let src: Vec<usize> = class.iter().collect();
                let dst: Vec<usize> = r.classes[rg.apply(c)].iter().collect();
                for (s, d) in src.iter().zip(&dst) {
                    images[*s] = *d;
                }
            }
            generators.push(Perm::from_images(images)?);
        }
    }
    for gen in &generators {
        if !g.is_isomorphism_to(g, &(0..n).map(|v| gen.apply(v)).collect::<Vec<_>>()) {
            return Err(Error::diagnosed("automorphism-check", "generator failed verification"));
        }
    }
    Ok(AutomorphismGroup { order, generators })
}

pub fn automorphism_order(g: &Graph, cfg: &PipelineConfig) -> Result<BigUint> {
    Ok(automorphism_group(g, cfg)?.order)
}

/// The tight-bound witness instance: a 9-clique with a pendant on eight of
/// its vertices.
pub fn g8_graph() -> Graph {
    let mut b = crate::graph::GraphBuilder::new(17);
    for i in 0..9 {
        for j in i + 1..9 {
            b.add_edge(i, j);
        }
    }
    for i in 0..8 {
        b.add_edge(i, 9 + i);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{self, SearchBudget};

    fn cfg() -> PipelineConfig {
        PipelineConfig::default()
    }

    #[test]
    fn twin_reduction_shapes() {
        let k4 = Graph::complete(4);
        let r = twin_reduce(&k4);
        assert_eq!(r.graph.n(), 1);
        assert_eq!(r.table, vec![(0, 4)]);

        let c5 = Graph::cycle(5);
        let r = twin_reduce(&c5);
        assert_eq!(r.graph.n(), 5);
    }

    #[test]
    fn twin_reduction_aut_factorization() {
        for seed in 0..40 {
            let g = oracle::random_colored_graph(8, 55, 1, seed);
            let r = twin_reduce(&g);
            let whole = oracle::brute_aut_order(&g, SearchBudget::default())
                .found()
                .unwrap();
            let reduced = oracle::brute_aut_order(&r.graph, SearchBudget::default())
                .found()
                .unwrap();
            let factor: u64 = r
                .classes
                .iter()
                .map(|c| (1..=c.len() as u64).product::<u64>())
                .product();
            assert_eq!(whole, reduced * factor, "seed {seed}");
        }
    }

    #[test]
    fn global_structure_k1() {
        let inst = AnchoredInstance::new(&Graph::empty(1), 0).unwrap();
        let layers = global_structure(&inst, &cfg()).unwrap();
        assert_eq!(layers.classes.len(), 1);
        assert_eq!(layers.structure.n(), 1);
    }

    #[test]
    fn global_structure_star() {
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        // the star is twin-free? leaves share open neighborhoods but not
        // closed ones, so yes
        let inst = AnchoredInstance::new(&star, 0).unwrap();
        let layers = global_structure(&inst, &cfg()).unwrap();
        let mut covered = VertexSet::new(5);
        for c in &layers.classes {
            covered.union_with(c);
        }
        assert_eq!(covered.len(), 5);
        assert!(verify_circle_bounded(&layers.structure, 8).is_ok());
    }

    #[test]
    fn refined_c6_top_group() {
        let c6 = Graph::cycle(6);
        let inst = AnchoredInstance::new(&c6, 0).unwrap();
        let gs = global_structure_refined(&inst, &cfg()).unwrap();
        // anchored six-cycle: the only symmetry is the reflection through
        // the anchor
        assert_eq!(gs.top_group.order(), BigUint::from(2u32));
        assert!(verify_circle_bounded(&gs.structure, 8).is_ok());
    }

    #[test]
    fn iso_identity_and_relabel() {
        let g = Graph::cycle(6);
        let m = isomorphic(&g, &g, &cfg()).unwrap().unwrap();
        assert!(g.is_isomorphism_to(&g, &m));

        let (h, _) = oracle::random_relabel(&g, 5);
        let m = isomorphic(&g, &h, &cfg()).unwrap().unwrap();
        assert!(g.is_isomorphism_to(&h, &m));
    }

    #[test]
    fn iso_rejects_quickly_on_signature() {
        assert!(isomorphic(&Graph::complete(3), &Graph::path(3), &cfg())
            .unwrap()
            .is_none());
    }

    #[test]
    fn iso_on_generated_instances() {
        for seed in 0..8 {
            let (g, _) = crate::geom::random_usq_graph(9, &crate::geom::ratio(3, 1), seed).unwrap();
            let (h, _) = oracle::random_relabel(&g, seed + 99);
            let got = isomorphic(&g, &h, &cfg()).unwrap();
            let want = oracle::brute_iso(&g, &h, SearchBudget::default());
            assert_eq!(got.is_some(), want.found().is_some(), "seed {seed}");
            if let Some(m) = got {
                assert!(g.is_isomorphism_to(&h, &m));
            }
        }
    }

    #[test]
    fn aut_orders_match_oracle() {
        let cases: Vec<Graph> = vec![
            Graph::complete(5),
            Graph::cycle(5),
            Graph::path(4),
            Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
        ];
        for g in cases {
            let want = oracle::brute_aut_order(&g, SearchBudget::default())
                .found()
                .unwrap();
            let got = automorphism_order(&g, &cfg()).unwrap();
            assert_eq!(got, BigUint::from(want), "graph {g:?}");
        }
    }

    #[test]
    fn g8_instance() {
        let g = g8_graph();
        assert_eq!(g.n(), 17);
        let got = automorphism_order(&g, &cfg()).unwrap();
        assert_eq!(got, BigUint::from(40320u32));
    }
}
