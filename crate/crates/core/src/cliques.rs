//! Maximal cliques, the auxiliary vertex-clique graphs, clique-stable
//! refinement, colored quotients, staircase verification and automorphism
//! lifting.
//!
//! In a unit square graph every maximal clique is the intersection of at most
//! four closed neighborhoods (the coordinate-extremal members), so candidate
//! enumeration ranges over vertex quadruples drawn from common neighborhoods
//! instead of assuming an abstract clique bound.
//!
//! A clique partition is clique-stable when it is the vertex part of a stable
//! partition of the incidence graph over vertices and maximal cliques. Cross
//! edges between two classes of such a partition are then forced to be
//! complete, empty, or a staircase pattern: both classes split into equal
//! blocks, matched bijectively with complete joins inside. Witness orders for
//! those patterns replace coordinate orders when lifting quotient
//! automorphisms back to the graph.

use std::collections::{HashMap, HashSet};

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::perm::Perm;
use crate::refine::{color_refine_rounds, OrderedPartition};

/// Deduplicated maximal cliques of `g`.
///
/// Candidates are intersections of up to four closed neighborhoods with the
/// smallest member leading; clique candidates are greedily extended to
/// maximal (color order, then index) and deduplicated. On inputs outside the
/// intended graph class the result may miss cliques; tests cross-check
/// against full enumeration.
pub fn maximal_cliques(g: &Graph) -> Vec<VertexSet> {
    let n = g.n();
    let mut candidates_seen: HashSet<VertexSet> = HashSet::new();
    let mut cliques_seen: HashSet<VertexSet> = HashSet::new();
    let mut out: Vec<VertexSet> = Vec::new();
    let closed: Vec<VertexSet> = (0..n).map(|v| g.closed_neighbors(v)).collect();
    let mut ext_order: Vec<usize> = (0..n).collect();
    ext_order.sort_by_key(|&v| (g.color(v), v));

    for v1 in 0..n {
        let t1 = &closed[v1];
        for v2 in t1.iter().filter(|&v| v >= v1) {
            let t2 = t1.intersection(&closed[v2]);
            for v3 in t2.iter().filter(|&v| v >= v2) {
                let t3 = t2.intersection(&closed[v3]);
                for v4 in t3.iter().filter(|&v| v >= v3) {
                    let cand = t3.intersection(&closed[v4]);
                    if !candidates_seen.insert(cand.clone()) || !g.is_clique(&cand) {
                        continue;
                    }
                    let mut clique = cand;
                    for &u in &ext_order {
                        if !clique.contains(u) && clique.is_subset(&closed[u]) {
                            clique.insert(u);
                        }
                    }
                    debug_assert!(g.is_clique(&clique));
                    debug_assert!(
                        (0..n).all(|u| clique.contains(u) || !clique.is_subset(&closed[u]))
                    );
                    if cliques_seen.insert(clique.clone()) {
                        out.push(clique);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// A graph over the vertices of `g` followed by its maximal cliques.
pub struct CliqueGraph {
    pub graph: Graph,
    pub cliques: Vec<VertexSet>,
}

const CLIQUE_PART_COLOR: u64 = 1;
const VERTEX_COLOR_SHIFT: u64 = 2;

fn incidence_builder(g: &Graph, cliques: &[VertexSet]) -> (GraphBuilder, usize) {
    let n = g.n();
    let total = n + cliques.len();
    let mut b = GraphBuilder::new(total);
    for v in 0..n {
        b.set_color(v, g.color(v) + VERTEX_COLOR_SHIFT);
    }
    for (i, c) in cliques.iter().enumerate() {
        b.set_color(n + i, CLIQUE_PART_COLOR);
        for v in c.iter() {
            b.add_edge(v, n + i);
        }
    }
    (b, n)
}

/// Vertices are pairwise adjacent, cliques are pairwise adjacent, and a
/// vertex joins each maximal clique containing it. Vertex colors are shifted
/// above the clique-part color.
pub fn build_gm(g: &Graph) -> CliqueGraph {
    let cliques = maximal_cliques(g);
    let (mut b, n) = incidence_builder(g, &cliques);
    for u in 0..n {
        for v in u + 1..n {
            b.add_edge(u, v);
        }
    }
    for i in 0..cliques.len() {
        for j in i + 1..cliques.len() {
            b.add_edge(n + i, n + j);
        }
    }
    CliqueGraph {
        graph: b.build(),
        cliques,
    }
}

/// Incidence edges plus the original edges only.
pub fn build_gm_star(g: &Graph) -> CliqueGraph {
    let cliques = maximal_cliques(g);
    let (mut b, _) = incidence_builder(g, &cliques);
    for (u, v) in g.edges() {
        b.add_edge(u, v);
    }
    CliqueGraph {
        graph: b.build(),
        cliques,
    }
}

pub struct CliqueStableRefinement {
    /// stable vertex-side partition of the original graph
    pub vertex_partition: OrderedPartition,
    /// stable clique-side partition (indices into `cliques`)
    pub clique_partition: OrderedPartition,
    /// per-round partitions of the combined incidence domain
    pub rounds: Vec<OrderedPartition>,
    pub gm_star: Graph,
    pub cliques: Vec<VertexSet>,
}

/// Refines a clique partition to the clique-stable one: color refinement on
/// the incidence graph starting from the partition plus one class of all
/// maximal cliques. Exposes the per-round history for layered structure
/// construction.
pub fn clique_stable_refine(g: &Graph, p: &OrderedPartition) -> Result<CliqueStableRefinement> {
    if p.domain() != g.n() {
        return Err(Error::precondition("partition domain mismatch"));
    }
    for c in p.classes() {
        if !g.is_clique(c) {
            return Err(Error::precondition(format!(
                "class {:?} is not a clique",
                c.iter().collect::<Vec<_>>()
            )));
        }
    }
    let CliqueGraph { graph: gm_star, cliques } = build_gm_star(g);
    let total = gm_star.n();
    let n = g.n();
    // lift the partition: vertex classes split by color for safety, all
    // cliques in one class named above every vertex-class name
    let mut keyed: Vec<((u64, u64), VertexSet)> = Vec::new();
    for (i, c) in p.classes().iter().enumerate() {
        let mut by_color: HashMap<u64, VertexSet> = HashMap::new();
        for v in c.iter() {
            by_color
                .entry(g.color(v))
                .or_insert_with(|| VertexSet::new(total))
                .insert(v);
        }
        for (color, set) in by_color {
            keyed.push(((p.name(i), color), set));
        }
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let mut classes: Vec<VertexSet> = Vec::new();
    let mut names: Vec<u64> = Vec::new();
    for (rank, (_, set)) in keyed.into_iter().enumerate() {
        classes.push(set);
        names.push(rank as u64);
    }
    let clique_class = VertexSet::from_iter(total, n..total);
    if !clique_class.is_empty() {
        names.push(classes.len() as u64);
        classes.push(clique_class);
    }
    let init = OrderedPartition::from_classes(total, classes, names);
    let (stable, rounds) = color_refine_rounds(&gm_star, &init);

    let vertex_partition = restrict_partition(&stable, 0, n);
    let clique_partition = restrict_partition(&stable, n, total);
    for c in vertex_partition.classes() {
        debug_assert!(g.is_clique(c), "refined classes must stay cliques");
    }
    Ok(CliqueStableRefinement {
        vertex_partition,
        clique_partition,
        rounds,
        gm_star,
        cliques,
    })
}

/// Restrict a partition of a larger domain to the index range
/// `lo..hi`, re-indexing to `0..hi-lo`. Classes must not straddle the cut.
pub fn restrict_partition(p: &OrderedPartition, lo: usize, hi: usize) -> OrderedPartition {
    let m = hi - lo;
    let mut classes = Vec::new();
    let mut names = Vec::new();
    for (i, c) in p.classes().iter().enumerate() {
        let inside: Vec<usize> = c.iter().filter(|&v| v >= lo && v < hi).collect();
        if inside.is_empty() {
            continue;
        }
        assert_eq!(inside.len(), c.len(), "class straddles the restriction cut");
        classes.push(VertexSet::from_iter(m, inside.into_iter().map(|v| v - lo)));
        names.push(p.name(i));
    }
    OrderedPartition::from_classes(m, classes, names)
}

/// Complete graph on partition classes, vertex-colored by class size and
/// edge-colored by crossing edge counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGraph {
    pub class_names: Vec<u64>,
    pub sizes: Vec<u64>,
    /// symmetric crossing-count matrix, diagonal zero
    pub crossing: Vec<Vec<u64>>,
}

impl QuotientGraph {
    pub fn class_count(&self) -> usize {
        self.sizes.len()
    }

    /// Relabeling-invariant summary (class names are deterministic but not
    /// canonical, so they stay out of it).
    pub fn signature(&self) -> Vec<(u64, Vec<u64>)> {
        let m = self.class_count();
        let mut sig: Vec<(u64, Vec<u64>)> = (0..m)
            .map(|i| {
                let mut row: Vec<u64> =
                    (0..m).filter(|&j| j != i).map(|j| self.crossing[i][j]).collect();
                row.sort_unstable();
                (self.sizes[i], row)
            })
            .collect();
        sig.sort();
        sig
    }
}

pub fn quotient_graph(g: &Graph, p: &OrderedPartition) -> QuotientGraph {
    let m = p.class_count();
    let mut crossing = vec![vec![0u64; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let mut count = 0u64;
            for v in p.class(i).iter() {
                count += g.neighbors(v).intersection_len(p.class(j)) as u64;
            }
            crossing[i][j] = count;
            crossing[j][i] = count;
        }
    }
    QuotientGraph {
        class_names: p.names().to_vec(),
        sizes: p.classes().iter().map(|c| c.len() as u64).collect(),
        crossing,
    }
}

/// How one class pair is wired.
#[derive(Clone, Debug)]
enum PairKind {
    Empty,
    Complete,
    /// equal-size blocks on both sides, matched bijectively with complete
    /// joins; `x_blocks[r]` has common neighborhood `y_blocks[r]`
    Staircase {
        x_blocks: Vec<VertexSet>,
        y_blocks: Vec<VertexSet>,
    },
}

fn classify_pair(g: &Graph, x: &VertexSet, y: &VertexSet) -> Option<PairKind> {
    let s = x.len();
    let t = y.len();
    let k: usize = x.iter().map(|v| g.neighbors(v).intersection_len(y)).sum();
    if k == 0 {
        return Some(PairKind::Empty);
    }
    if k == s * t {
        return Some(PairKind::Complete);
    }
    if k % s != 0 || k % t != 0 || (s * t) % k != 0 {
        return None;
    }
    let block_count = s * t / k;
    let x_block_size = k / t;
    let y_block_size = k / s;
    let mut by_trace: HashMap<VertexSet, VertexSet> = HashMap::new();
    for v in x.iter() {
        let trace = g.neighbors(v).intersection(y);
        if trace.len() != y_block_size {
            return None;
        }
        by_trace
            .entry(trace)
            .or_insert_with(|| VertexSet::new(g.n()))
            .insert(v);
    }
    if by_trace.len() != block_count {
        return None;
    }
    let mut seen_y = VertexSet::new(g.n());
    let mut x_blocks = Vec::with_capacity(block_count);
    let mut y_blocks = Vec::with_capacity(block_count);
    for (trace, members) in by_trace {
        if members.len() != x_block_size || !seen_y.is_disjoint(&trace) {
            return None;
        }
        seen_y.union_with(&trace);
        x_blocks.push(members);
        y_blocks.push(trace);
    }
    if seen_y != *y {
        return None;
    }
    Some(PairKind::Staircase { x_blocks, y_blocks })
}

/// Per-class vertex orders witnessing the staircase structure.
#[derive(Clone, Debug)]
pub struct StaircaseWitness {
    /// order of each class, indexed like the partition's classes
    pub orders: Vec<Vec<usize>>,
}

/// Whether the block pattern holds between two ordered classes with `k`
/// crossing edges: the i-th of x joins the j-th of y exactly when
/// ceil(i*t/k) = ceil(j*s/k) (1-based).
pub fn staircase_pattern_holds(g: &Graph, xo: &[usize], yo: &[usize], k: u64) -> bool {
    let s = xo.len() as u64;
    let t = yo.len() as u64;
    if k == 0 || k == s * t {
        return true;
    }
    let ceil = |a: u64, b: u64| a.div_ceil(b);
    for (i, &xv) in xo.iter().enumerate() {
        for (j, &yv) in yo.iter().enumerate() {
            let want = ceil((i as u64 + 1) * t, k) == ceil((j as u64 + 1) * s, k);
            if g.has_edge(xv, yv) != want {
                return false;
            }
        }
    }
    true
}

struct StairCsp<'a> {
    g: &'a Graph,
    p: &'a OrderedPartition,
    /// staircase pairs: (class a, class b, kind)
    pairs: Vec<(usize, usize, Vec<VertexSet>, Vec<VertexSet>)>,
    /// pair indices touching each class
    touching: Vec<Vec<usize>>,
    orders: Vec<Option<Vec<usize>>>,
    budget: usize,
}

impl<'a> StairCsp<'a> {
    /// Enumerate orders of `members` where every listed interval is a
    /// contiguous run and, if `pinned` is given, position ranges follow the
    /// pinned block sequence. Calls `visit` per order until it returns true.
    fn enumerate_orders(
        &mut self,
        members: &[usize],
        intervals: &[VertexSet],
        pinned: Option<&[VertexSet]>,
        visit: &mut dyn FnMut(&mut StairCsp<'a>, &[usize]) -> bool,
    ) -> bool {
        fn feasible(order: &[usize], intervals: &[VertexSet], total: usize) -> bool {
            let p = order.len();
            for iv in intervals {
                let mut run_start = None;
                let mut run_end = None;
                let mut placed = 0;
                for (pos, &v) in order.iter().enumerate() {
                    if iv.contains(v) {
                        placed += 1;
                        if run_start.is_none() {
                            run_start = Some(pos);
                        } else if run_end != Some(pos - 1) {
                            return false; // second run
                        }
                        run_end = Some(pos);
                    }
                }
                let _ = total;
                if placed > 0 && placed < iv.len() && run_end != Some(p - 1) {
                    return false; // incomplete run no longer touching the end
                }
            }
            true
        }
        fn rec<'x>(
            me: &mut StairCsp<'x>,
            members: &[usize],
            intervals: &[VertexSet],
            pinned: Option<&[VertexSet]>,
            order: &mut Vec<usize>,
            used: &mut HashSet<usize>,
            visit: &mut dyn FnMut(&mut StairCsp<'x>, &[usize]) -> bool,
        ) -> bool {
            if me.budget == 0 {
                return false;
            }
            me.budget -= 1;
            if order.len() == members.len() {
                return visit(me, order);
            }
            let pos = order.len();
            for &v in members {
                if used.contains(&v) {
                    continue;
                }
                if let Some(blocks) = pinned {
                    let block_size = members.len() / blocks.len();
                    if !blocks[pos / block_size].contains(v) {
                        continue;
                    }
                }
                order.push(v);
                used.insert(v);
                if feasible(order, intervals, members.len())
                    && rec(me, members, intervals, pinned, order, used, visit)
                {
                    return true;
                }
                order.pop();
                used.remove(&v);
            }
            false
        }
        let mut order = Vec::with_capacity(members.len());
        let mut used = HashSet::new();
        rec(self, members, intervals, pinned, &mut order, &mut used, visit)
    }

    /// Verify all pairs between already-ordered classes touching `c`.
    fn pairs_ok(&self, c: usize) -> bool {
        for &pi in &self.touching[c] {
            let (a, b, ref xb, ref yb) = self.pairs[pi];
            let (Some(ao), Some(bo)) = (&self.orders[a], &self.orders[b]) else {
                continue;
            };
            let k = (xb.len() * xb[0].len() * yb[0].len()) as u64;
            if !staircase_pattern_holds(self.g, ao, bo, k) {
                return false;
            }
        }
        true
    }

    /// Assign orders to every class of the component containing `root`.
    fn solve_component(&mut self, component: &[usize]) -> bool {
        let unassigned: Vec<usize> = component
            .iter()
            .copied()
            .filter(|&c| self.orders[c].is_none())
            .collect();
        let Some(&next) = unassigned
            .iter()
            .find(|&&c| {
                self.touching[c].iter().any(|&pi| {
                    let (a, b, _, _) = (self.pairs[pi].0, self.pairs[pi].1, (), ());
                    let other = if a == c { b } else { a };
                    self.orders[other].is_some()
                })
            })
            .or(unassigned.first())
        else {
            return true; // component fully assigned
        };

        let members: Vec<usize> = self.p.class(next).iter().collect();
        let intervals: Vec<VertexSet> = self.touching[next]
            .iter()
            .flat_map(|&pi| {
                let (a, _b, ref xb, ref yb) = self.pairs[pi];
                if a == next { xb.clone() } else { yb.clone() }
            })
            .collect();
        // pinned block sequence from one ordered neighbor, if any
        let pinned: Option<Vec<VertexSet>> = self.touching[next].iter().find_map(|&pi| {
            let (a, b, ref xb, ref yb) = self.pairs[pi];
            let (mine, theirs, other) = if a == next {
                (xb, yb, b)
            } else {
                (yb, xb, a)
            };
            let other_order = self.orders[other].as_ref()?;
            // block sequence of the neighbor in its order
            let mut seq = Vec::new();
            let mut seen = vec![false; theirs.len()];
            for &v in other_order {
                for (r, blk) in theirs.iter().enumerate() {
                    if blk.contains(v) && !seen[r] {
                        seen[r] = true;
                        seq.push(mine[r].clone());
                    }
                }
            }
            Some(seq)
        });

        let comp: Vec<usize> = component.to_vec();
        let mut solved = false;
        self.enumerate_orders(
            &members,
            &intervals,
            pinned.as_deref(),
            &mut |me, order| {
                me.orders[next] = Some(order.to_vec());
                if me.pairs_ok(next) && me.solve_component(&comp) {
                    solved = true;
                    return true;
                }
                me.orders[next] = None;
                false
            },
        );
        solved
    }
}

/// Decide whether per-class total orders exist making every class pair
/// complete, empty, or a staircase, and produce them.
pub fn verify_staircase(g: &Graph, p: &OrderedPartition) -> Option<StaircaseWitness> {
    let m = p.class_count();
    let mut pairs = Vec::new();
    let mut touching = vec![Vec::new(); m];
    for i in 0..m {
        for j in i + 1..m {
            match classify_pair(g, p.class(i), p.class(j))? {
                PairKind::Empty | PairKind::Complete => {}
                PairKind::Staircase { x_blocks, y_blocks } => {
                    touching[i].push(pairs.len());
                    touching[j].push(pairs.len());
                    pairs.push((i, j, x_blocks, y_blocks));
                }
            }
        }
    }
    let mut csp = StairCsp {
        g,
        p,
        pairs,
        touching,
        orders: vec![None; m],
        budget: 2_000_000,
    };
    // classes with no staircase pair get the trivial order
    for c in 0..m {
        if csp.touching[c].is_empty() {
            csp.orders[c] = Some(p.class(c).iter().collect());
        }
    }
    // connected components of the staircase constraint graph
    let mut comp_of = vec![usize::MAX; m];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for c in 0..m {
        if comp_of[c] != usize::MAX || csp.touching[c].is_empty() {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![c];
        let mut comp = Vec::new();
        comp_of[c] = id;
        while let Some(x) = stack.pop() {
            comp.push(x);
            for &pi in &csp.touching[x] {
                let (a, b, _, _) = (csp.pairs[pi].0, csp.pairs[pi].1, (), ());
                for y in [a, b] {
                    if comp_of[y] == usize::MAX {
                        comp_of[y] = id;
                        stack.push(y);
                    }
                }
            }
        }
        comps.push(comp);
    }
    for comp in &comps {
        if !csp.solve_component(comp) {
            return None;
        }
    }
    let orders: Vec<Vec<usize>> = csp.orders.into_iter().map(Option::unwrap).collect();
    Some(StaircaseWitness { orders })
}

/// Lift a quotient automorphism to a graph automorphism using witness
/// orders: the i-th member of a class maps to the i-th member of its image
/// class. Falls back to constrained backtracking, and always verifies the
/// result before returning it.
pub fn lift_automorphism(
    g: &Graph,
    p: &OrderedPartition,
    witness: &StaircaseWitness,
    delta: &Perm,
) -> Result<Perm> {
    let m = p.class_count();
    if delta.degree() != m {
        return Err(Error::DomainMismatch(delta.degree(), m));
    }
    let mut images = vec![usize::MAX; g.n()];
    let mut valid_sizes = true;
    for c in 0..m {
        let d = delta.apply(c);
        if witness.orders[c].len() != witness.orders[d].len() {
            valid_sizes = false;
            break;
        }
        for (i, &v) in witness.orders[c].iter().enumerate() {
            images[v] = witness.orders[d][i];
        }
    }
    if valid_sizes {
        let gamma = Perm::from_images(images)?;
        if is_colored_automorphism(g, &gamma) {
            return Ok(gamma);
        }
    }
    // fallback: per-class constrained search
    lift_by_backtracking(g, p, delta)
}

fn is_colored_automorphism(g: &Graph, p: &Perm) -> bool {
    if p.degree() != g.n() {
        return false;
    }
    (0..g.n()).all(|v| g.color(v) == g.color(p.apply(v)))
        && (0..g.n()).all(|u| {
            g.neighbors(u).iter().all(|v| g.has_edge(p.apply(u), p.apply(v)))
        })
}

fn lift_by_backtracking(g: &Graph, p: &OrderedPartition, delta: &Perm) -> Result<Perm> {
    let budget = crate::oracle::SearchBudget {
        node_limit: 20_000_000,
        time_limit_ms: 60_000,
    };
    // search for an isomorphism g -> g constrained to map class c onto
    // class delta(c): encode (class, color) pairs as fresh joint colors
    let n = g.n();
    let mut pair_rank: HashMap<(usize, u64), u64> = HashMap::new();
    let rank_of = |key: (usize, u64), ranks: &mut HashMap<(usize, u64), u64>| -> u64 {
        let next = ranks.len() as u64;
        *ranks.entry(key).or_insert(next)
    };
    let mut source_colors: Vec<u64> = vec![0; n];
    let mut target_colors: Vec<u64> = vec![0; n];
    let inv = delta.inverse();
    for v in 0..n {
        source_colors[v] = rank_of((p.class_of(v), g.color(v)), &mut pair_rank);
    }
    for v in 0..n {
        target_colors[v] = rank_of((inv.apply(p.class_of(v)), g.color(v)), &mut pair_rank);
    }
    let gs = g.with_colors(source_colors);
    let gt = g.with_colors(target_colors);
    match crate::oracle::brute_iso(&gs, &gt, budget) {
        crate::oracle::SearchOutcome::Found(map) => {
            let gamma = Perm::from_images(map)?;
            if is_colored_automorphism(g, &gamma) {
                Ok(gamma)
            } else {
                Err(Error::diagnosed("quotient-lift", "lifted map is not an automorphism"))
            }
        }
        _ => Err(Error::diagnosed(
            "quotient-lift",
            "no lift found for a quotient automorphism",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn cliques_of_small_graphs() {
        let k3 = Graph::complete(3);
        let cl = maximal_cliques(&k3);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].len(), 3);

        let c5 = Graph::cycle(5);
        let cl = maximal_cliques(&c5);
        assert_eq!(cl.len(), 5);
        assert!(cl.iter().all(|c| c.len() == 2));
    }

    #[test]
    fn cliques_match_full_enumeration() {
        for seed in 0..40 {
            let g = oracle::random_colored_graph(10, 45, 1, seed);
            let mut a = maximal_cliques(&g);
            let mut b = oracle::bron_kerbosch(&g);
            a.sort();
            b.sort();
            assert_eq!(a, b, "seed {seed}");
        }
    }

    #[test]
    fn gm_shapes() {
        let k1 = Graph::empty(1);
        let gm = build_gm(&k1);
        assert_eq!(gm.graph.n(), 2);
        assert_eq!(gm.graph.edge_count(), 1);
        let colors: HashSet<u64> = (0..2).map(|v| gm.graph.color(v)).collect();
        assert_eq!(colors.len(), 2);

        let k2 = Graph::complete(2);
        let gm = build_gm(&k2);
        assert_eq!(gm.graph.n(), 3);
        assert_eq!(gm.graph.edge_count(), 3);
    }

    #[test]
    fn gm_star_shapes() {
        let k1 = Graph::empty(1);
        assert_eq!(build_gm_star(&k1).graph.edge_count(), 1);

        let c5 = Graph::cycle(5);
        let st = build_gm_star(&c5);
        assert_eq!(st.graph.edge_count(), 5 + 10);

        let k3 = Graph::complete(3);
        assert_eq!(build_gm_star(&k3).graph.edge_count(), 3 + 3);
    }

    #[test]
    fn clique_stable_refine_discrete_stays() {
        let g = Graph::cycle(5);
        let p = OrderedPartition::discrete(5);
        let r = clique_stable_refine(&g, &p).unwrap();
        assert_eq!(r.vertex_partition.class_count(), 5);
    }

    #[test]
    fn clique_stable_refine_complete_stays_coarse() {
        let g = Graph::complete(4);
        let p = OrderedPartition::unit(4);
        let r = clique_stable_refine(&g, &p).unwrap();
        assert_eq!(r.vertex_partition.class_count(), 1);
    }

    #[test]
    fn clique_stable_refine_rejects_non_clique() {
        let g = Graph::path(3);
        assert!(clique_stable_refine(&g, &OrderedPartition::unit(3)).is_err());
    }

    #[test]
    fn quotient_shapes() {
        let g = Graph::complete(4);
        let q = quotient_graph(&g, &OrderedPartition::unit(4));
        assert_eq!(q.class_count(), 1);
        assert_eq!(q.sizes, vec![4]);

        let q = quotient_graph(&g, &OrderedPartition::discrete(4));
        assert!(q.crossing.iter().enumerate().all(|(i, row)| row
            .iter()
            .enumerate()
            .all(|(j, &c)| c == u64::from(i != j))));
    }

    #[test]
    fn staircase_matched_pairs() {
        // X = {0,1}, Y = {2,3}, matching edges only; classes are cliques
        let g = Graph::from_edges(4, &[(0, 1), (2, 3), (0, 2), (1, 3)]);
        let p = OrderedPartition::from_classes(
            4,
            vec![VertexSet::from_iter(4, [0, 1]), VertexSet::from_iter(4, [2, 3])],
            vec![0, 1],
        );
        let w = verify_staircase(&g, &p).expect("staircase must verify");
        let k = 2;
        assert!(staircase_pattern_holds(&g, &w.orders[0], &w.orders[1], k));
    }

    #[test]
    fn staircase_trivial_on_singletons() {
        let g = Graph::cycle(5);
        let p = OrderedPartition::discrete(5);
        assert!(verify_staircase(&g, &p).is_some());
    }

    #[test]
    fn staircase_rejects_bad_pattern() {
        // X = {0,1} clique, Y = {2,3} clique, edges 0-2, 0-3, 1-2: counts 2 and 1
        let g = Graph::from_edges(4, &[(0, 1), (2, 3), (0, 2), (0, 3), (1, 2)]);
        let p = OrderedPartition::from_classes(
            4,
            vec![VertexSet::from_iter(4, [0, 1]), VertexSet::from_iter(4, [2, 3])],
            vec![0, 1],
        );
        assert!(verify_staircase(&g, &p).is_none());
    }

    #[test]
    fn lift_identity_and_swap() {
        // two K2 classes joined by a matching: quotient swap lifts
        let g = Graph::from_edges(4, &[(0, 1), (2, 3), (0, 2), (1, 3)]);
        let p = OrderedPartition::from_classes(
            4,
            vec![VertexSet::from_iter(4, [0, 1]), VertexSet::from_iter(4, [2, 3])],
            vec![0, 0],
        );
        let w = verify_staircase(&g, &p).unwrap();
        let id = Perm::identity(2);
        let gamma = lift_automorphism(&g, &p, &w, &id).unwrap();
        assert!(is_colored_automorphism(&g, &gamma));
        let swap = Perm::from_cycles(2, &[&[0, 1]]);
        let gamma = lift_automorphism(&g, &p, &w, &swap).unwrap();
        assert!(is_colored_automorphism(&g, &gamma));
        assert_eq!(p.class_of(gamma.apply(0)), 1);
    }

    #[test]
    fn chain_of_staircases_lifts() {
        // three classes of size 2 in a diagonal chain
        let g = Graph::from_edges(
            6,
            &[(0, 1), (2, 3), (4, 5), (0, 2), (1, 3), (2, 4), (3, 5)],
        );
        let p = OrderedPartition::from_classes(
            6,
            vec![
                VertexSet::from_iter(6, [0, 1]),
                VertexSet::from_iter(6, [2, 3]),
                VertexSet::from_iter(6, [4, 5]),
            ],
            vec![0, 1, 2],
        );
        let w = verify_staircase(&g, &p).unwrap();
        for c in 0..3 {
            assert_eq!(w.orders[c].len(), 2);
        }
        let id = Perm::identity(3);
        assert!(lift_automorphism(&g, &p, &w, &id).is_ok());
    }
}
