//! Unit interval recognition at desk scale, co-bipartite decomposition,
//! induced-subgraph search over the small forbidden-pattern catalog, and the
//! canonical neighborhood cycle of proper circular arc graphs.


use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::refine::{color_refine, OrderedPartition};

/// The named small graphs used as forbidden induced subgraphs.
pub mod patterns {
    use crate::graph::Graph;

    /// Star with three leaves.
    pub fn claw() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)])
    }

    pub fn k15() -> Graph {
        Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)])
    }

    pub fn k23() -> Graph {
        Graph::from_edges(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)])
    }

    /// The 3-sun: a triangle with one outer vertex astride each edge.
    pub fn s3() -> Graph {
        Graph::from_edges(
            6,
            &[(0, 1), (1, 2), (0, 2), (3, 0), (3, 1), (4, 1), (4, 2), (5, 0), (5, 2)],
        )
    }

    /// Spider with three legs of length two.
    pub fn t2() -> Graph {
        Graph::from_edges(7, &[(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])
    }

    pub fn t2_complement() -> Graph {
        t2().complement()
    }

    /// Triangle with a pendant vertex on each corner.
    pub fn net() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)])
    }

    pub fn three_k2() -> Graph {
        Graph::from_edges(6, &[(0, 1), (2, 3), (4, 5)])
    }

    /// The octahedron.
    pub fn three_k2_complement() -> Graph {
        three_k2().complement()
    }

    /// The triangular prism.
    pub fn c6_complement() -> Graph {
        Graph::cycle(6).complement()
    }

    pub fn cn(n: usize) -> Graph {
        Graph::cycle(n)
    }
}

/// Lexicographically first injective embedding of `pattern` into `g` as an
/// induced subgraph (colors ignored), or `None`.
pub fn find_induced(g: &Graph, pattern: &Graph) -> Option<Vec<usize>> {
    let k = pattern.n();
    if k > g.n() {
        return None;
    }
    let mut map = vec![usize::MAX; k];
    let mut used = VertexSet::new(g.n());
    fn extend(
        g: &Graph,
        pattern: &Graph,
        map: &mut Vec<usize>,
        used: &mut VertexSet,
        next: usize,
    ) -> bool {
        if next == pattern.n() {
            return true;
        }
        'cand: for cand in 0..g.n() {
            if used.contains(cand) || g.degree(cand) < pattern.degree(next) {
                continue;
            }
            for prev in 0..next {
                if pattern.has_edge(prev, next) != g.has_edge(map[prev], cand) {
                    continue 'cand;
                }
            }
            map[next] = cand;
            used.insert(cand);
            if extend(g, pattern, map, used, next + 1) {
                return true;
            }
            used.remove(cand);
            map[next] = usize::MAX;
        }
        false
    }
    if extend(g, pattern, &mut map, &mut used, 0) {
        Some(map)
    } else {
        None
    }
}

pub fn has_induced(g: &Graph, pattern: &Graph) -> bool {
    find_induced(g, pattern).is_some()
}

/// Chordality via maximum cardinality search and the perfect elimination
/// check. A graph has an induced cycle of length >= 4 iff it is not chordal.
pub fn is_chordal(g: &Graph) -> bool {
    let n = g.n();
    if n == 0 {
        return true;
    }
    let mut weight = vec![0usize; n];
    let mut picked = vec![false; n];
    let mut order = Vec::with_capacity(n); // MCS order, later reversed
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !picked[v])
            .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
            .unwrap();
        picked[v] = true;
        order.push(v);
        for w in g.neighbors(v).iter() {
            if !picked[w] {
                weight[w] += 1;
            }
        }
    }
    order.reverse(); // perfect elimination order candidate
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    for (i, &v) in order.iter().enumerate() {
        // later neighbors of v must form a clique with their earliest member
        let later: Vec<usize> = g.neighbors(v).iter().filter(|&w| pos[w] > i).collect();
        if let Some(&parent) = later.iter().min_by_key(|&&w| pos[w]) {
            for &w in &later {
                if w != parent && !g.has_edge(parent, w) {
                    return false;
                }
            }
        }
    }
    true
}

/// One induced (chordless) cycle of length exactly `len`, if any.
pub fn find_induced_cycle(g: &Graph, len: usize) -> Option<Vec<usize>> {
    assert!(len >= 3);
    fn extend(g: &Graph, path: &mut Vec<usize>, on_path: &mut VertexSet, len: usize) -> bool {
        if path.len() == len {
            return g.has_edge(*path.last().unwrap(), path[0]);
        }
        let last = *path.last().unwrap();
        'cand: for cand in g.neighbors(last).iter() {
            // keep the cycle rooted at its smallest vertex
            if cand <= path[0] || on_path.contains(cand) {
                continue;
            }
            // induced: cand may touch only its predecessor, and the root
            // exactly when it closes the cycle
            let closing = path.len() + 1 == len;
            for (i, &p) in path.iter().enumerate().take(path.len() - 1) {
                let adj = g.has_edge(p, cand);
                if i == 0 {
                    if closing != adj {
                        continue 'cand;
                    }
                } else if adj {
                    continue 'cand;
                }
            }
            path.push(cand);
            on_path.insert(cand);
            if extend(g, path, on_path, len) {
                return true;
            }
            on_path.remove(cand);
            path.pop();
        }
        false
    }
    for v0 in 0..g.n() {
        let mut path = vec![v0];
        let mut on_path = VertexSet::new(g.n());
        on_path.insert(v0);
        if extend(g, &mut path, &mut on_path, len) {
            return Some(path);
        }
    }
    None
}

/// Unit interval test: chordal plus claw-, 3-sun- and net-free.
pub fn is_unit_interval(g: &Graph) -> bool {
    is_chordal(g)
        && !has_induced(g, &patterns::claw())
        && !has_induced(g, &patterns::s3())
        && !has_induced(g, &patterns::net())
}

/// Every connected component is a clique.
pub fn is_cluster_graph(g: &Graph) -> bool {
    g.connected_components()
        .iter()
        .all(|c| g.is_clique(c))
}

/// If the complement of `g` is bipartite: the unique bipartition pair of each
/// non-trivial complement component, plus the complement-isolated vertices.
/// All returned sets induce cliques in `g`.
pub fn co_bipartite_parts(g: &Graph) -> Option<(Vec<(VertexSet, VertexSet)>, VertexSet)> {
    let n = g.n();
    let comp = g.complement();
    let mut side = vec![usize::MAX; n];
    let mut pairs = Vec::new();
    let mut isolated = VertexSet::new(n);
    for c in comp.connected_components() {
        if c.len() == 1 {
            isolated.insert(c.first().unwrap());
            continue;
        }
        let start = c.first().unwrap();
        side[start] = 0;
        let mut queue = vec![start];
        let mut a = VertexSet::new(n);
        let mut b = VertexSet::new(n);
        a.insert(start);
        while let Some(v) = queue.pop() {
            for w in comp.neighbors(v).iter() {
                if side[w] == usize::MAX {
                    side[w] = 1 - side[v];
                    if side[w] == 0 {
                        a.insert(w);
                    } else {
                        b.insert(w);
                    }
                    queue.push(w);
                } else if side[w] == side[v] {
                    return None; // odd cycle in the complement
                }
            }
        }
        debug_assert!(g.is_clique(&a) && g.is_clique(&b));
        pairs.push((a, b));
    }
    Some((pairs, isolated))
}

/// The contracted-twin neighborhood cycle of a connected proper circular arc
/// graph whose complement is not bipartite.
///
/// Twin classes are contracted, then a cyclic order of the classes is found
/// by exhaustive backtracking such that every closed class-neighborhood is a
/// contiguous arc and nested neighborhoods share an arc endpoint. The cycle
/// satisfying both conditions is unique for such inputs, so the returned
/// graph is canonical. Classes carry refinement-derived canonical names.
pub struct CanonicalCycle {
    pub twins: OrderedPartition,
    /// graph on class indices with maximum degree two, vertex i colored by
    /// the canonical name of class i
    pub cycle: Graph,
}

pub fn pca_canonical_cycle(g: &Graph) -> Result<CanonicalCycle> {
    if g.n() == 0 {
        return Err(Error::precondition("empty graph has no neighborhood cycle"));
    }
    if !g.is_connected() {
        return Err(Error::precondition("graph must be connected"));
    }
    let twin_raw = g.connected_twin_classes();
    let refined = color_refine(g, &OrderedPartition::from_colors(g));
    let names: Vec<u64> = twin_raw
        .classes()
        .iter()
        .map(|c| refined.name(refined.class_of(c.first().unwrap())))
        .collect();
    let twins = OrderedPartition::from_classes(g.n(), twin_raw.classes().to_vec(), names);
    let m = twins.class_count();

    // class quotient: cross edges between twin classes are all-or-none
    let mut q = GraphBuilder::new(m);
    for i in 0..m {
        q.set_color(i, twins.name(i));
        let rep = twins.class(i).first().unwrap();
        for j in i + 1..m {
            if g.has_edge(rep, twins.class(j).first().unwrap()) {
                q.add_edge(i, j);
            }
        }
    }
    let q = q.build();

    if let Some(u) = (0..m).find(|&i| q.degree(i) == m - 1) {
        return Err(Error::precondition(format!(
            "universal class {u} violates the cycle preconditions"
        )));
    }

    let closed: Vec<VertexSet> = (0..m).map(|i| q.closed_neighbors(i)).collect();
    let order = find_arc_cycle(&q, &closed).ok_or_else(|| {
        Error::precondition("no cyclic class order satisfies the arc conditions")
    })?;

    let mut h = GraphBuilder::new(m);
    for i in 0..m {
        h.set_color(i, twins.name(i));
    }
    for i in 0..m {
        h.add_edge(order[i], order[(i + 1) % m]);
    }
    let cycle = h.build();
    debug_assert!(check_arc_conditions(&closed, &order));
    Ok(CanonicalCycle { twins, cycle })
}

/// Placed prefix feasibility: the placed members of each closed neighborhood
/// must form at most two runs, and a run not touching either end of the
/// prefix can never grow again.
fn prefix_feasible(closed: &[VertexSet], pos_of: &[usize], order: &[usize]) -> bool {
    let p = order.len();
    for nb in closed {
        let mut placed: Vec<usize> = nb.iter().filter(|&v| pos_of[v] != usize::MAX).map(|v| pos_of[v]).collect();
        if placed.is_empty() {
            continue;
        }
        placed.sort_unstable();
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for &x in &placed {
            match runs.last_mut() {
                Some((_, end)) if *end + 1 == x => *end = x,
                _ => runs.push((x, x)),
            }
        }
        let unplaced = nb.len() - placed.len();
        match runs.len() {
            1 => {
                let (s, e) = runs[0];
                // a fully interior run must already be complete
                if s > 0 && e < p - 1 && unplaced > 0 {
                    return false;
                }
            }
            2 => {
                // both runs stay extendable only through the seam: one must
                // touch position 0, the other the current end
                if !(runs[0].0 == 0 && runs[1].1 == p - 1) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

fn check_arc_conditions(closed: &[VertexSet], order: &[usize]) -> bool {
    let m = order.len();
    let mut pos_of = vec![0usize; m];
    for (p, &v) in order.iter().enumerate() {
        pos_of[v] = p;
    }
    // condition 1: every closed neighborhood is a cyclic interval
    let arc_of = |nb: &VertexSet| -> Option<(usize, usize)> {
        // returns (start, len) of the cyclic run
        let k = nb.len();
        if k == m {
            return Some((0, m));
        }
        let mut marks = vec![false; m];
        for v in nb.iter() {
            marks[pos_of[v]] = true;
        }
        // find a position not in the set, then walk
        let gap = (0..m).find(|&i| !marks[i])?;
        let mut start = None;
        let mut len = 0;
        let mut run_done = false;
        for off in 1..=m {
            let i = (gap + off) % m;
            if marks[i] {
                if run_done {
                    return None; // second run: not an interval
                }
                if start.is_none() {
                    start = Some(i);
                }
                len += 1;
            } else if start.is_some() {
                run_done = true;
            }
        }
        if len == k {
            start.map(|s| (s, len))
        } else {
            None
        }
    };
    let mut arcs = Vec::with_capacity(m);
    for nb in closed {
        match arc_of(nb) {
            Some(a) => arcs.push(a),
            None => return false,
        }
    }
    // condition 2: nested neighborhoods share an arc endpoint
    for y in 0..m {
        for z in 0..m {
            if y != z && closed[y].is_subset(&closed[z]) {
                let (sy, ly) = arcs[y];
                let (sz, lz) = arcs[z];
                let ey = (sy + ly - 1) % m;
                let ez = (sz + lz - 1) % m;
                if lz == m {
                    continue;
                }
                if sy != sz && ey != ez {
                    return false;
                }
            }
        }
    }
    true
}

fn find_arc_cycle(q: &Graph, closed: &[VertexSet]) -> Option<Vec<usize>> {
    let m = q.n();
    let _ = q;
    let mut order = vec![0usize];
    let mut pos_of = vec![usize::MAX; m];
    pos_of[0] = 0;
    let mut budget: usize = 2_000_000;
    fn dfs(
        m: usize,
        closed: &[VertexSet],
        order: &mut Vec<usize>,
        pos_of: &mut Vec<usize>,
        budget: &mut usize,
    ) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        if order.len() == m {
            return check_arc_conditions(closed, order);
        }
        for cand in 0..m {
            if pos_of[cand] != usize::MAX {
                continue;
            }
            pos_of[cand] = order.len();
            order.push(cand);
            if prefix_feasible(closed, pos_of, order)
                && dfs(m, closed, order, pos_of, budget)
            {
                return true;
            }
            order.pop();
            pos_of[cand] = usize::MAX;
        }
        false
    }
    if dfs(m, closed, &mut order, &mut pos_of, &mut budget) {
        Some(order)
    } else {
        None
    }
}

/// Some vertex sees every long induced cycle: true iff a vertex v exists with
/// `g - N[v]` chordal.
pub fn exists_vertex_covering_long_cycles(g: &Graph) -> bool {
    (0..g.n()).any(|v| {
        let mut rest = g.vertex_set();
        rest.difference_with(&g.closed_neighbors(v));
        let (sub, _) = g.induced_subgraph(&rest).unwrap();
        is_chordal(&sub)
    })
}

/// Some vertex sees every induced 3-sun.
pub fn exists_vertex_covering_s3(g: &Graph) -> bool {
    (0..g.n()).any(|v| {
        let mut rest = g.vertex_set();
        rest.difference_with(&g.closed_neighbors(v));
        let (sub, _) = g.induced_subgraph(&rest).unwrap();
        !has_induced(&sub, &patterns::s3())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_shapes() {
        assert_eq!(patterns::s3().edge_count(), 9);
        assert_eq!(patterns::net().edge_count(), 6);
        assert_eq!(patterns::t2().n(), 7);
        assert_eq!(patterns::c6_complement().edge_count(), 9);
        // octahedron: 6 vertices, 12 edges, 4-regular
        let oct = patterns::three_k2_complement();
        assert_eq!(oct.edge_count(), 12);
        assert!((0..6).all(|v| oct.degree(v) == 4));
    }

    #[test]
    fn find_induced_basics() {
        let claw = patterns::claw();
        assert_eq!(find_induced(&claw, &claw), Some(vec![0, 1, 2, 3]));
        assert!(find_induced(&Graph::complete(4), &claw).is_none());
        // the net is claw-free (pendants are independent but never three around one vertex)
        assert!(!has_induced(&patterns::net(), &patterns::claw()));
        // K_{2,3} inside K_{3,3}
        let k33 = Graph::from_edges(
            6,
            &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
        );
        assert!(has_induced(&k33, &patterns::k23()));
        // net contains itself but prism does not contain a net
        assert!(has_induced(&patterns::net(), &patterns::net()));
        assert!(!has_induced(&patterns::c6_complement(), &patterns::net()));
    }

    #[test]
    fn chordality() {
        assert!(is_chordal(&Graph::path(5)));
        assert!(is_chordal(&Graph::complete(5)));
        assert!(!is_chordal(&Graph::cycle(4)));
        assert!(!is_chordal(&Graph::cycle(7)));
        // two triangles sharing an edge
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (1, 3), (2, 3)]);
        assert!(is_chordal(&g));
    }

    #[test]
    fn induced_cycles() {
        let c6 = Graph::cycle(6);
        assert!(find_induced_cycle(&c6, 6).is_some());
        assert!(find_induced_cycle(&c6, 4).is_none());
        assert!(find_induced_cycle(&Graph::complete(5), 4).is_none());
        let c4 = find_induced_cycle(&Graph::cycle(4), 4).unwrap();
        assert_eq!(c4.len(), 4);
    }

    #[test]
    fn unit_interval_catalog() {
        assert!(is_unit_interval(&Graph::path(5)));
        assert!(!is_unit_interval(&patterns::claw()));
        assert!(!is_unit_interval(&Graph::cycle(4)));
        assert!(!is_unit_interval(&patterns::s3()));
        assert!(!is_unit_interval(&patterns::net()));
        assert!(is_unit_interval(&Graph::complete(6)));
    }

    #[test]
    fn co_bipartite_decomposition() {
        // K4: complement empty, everything isolated
        let (pairs, isolated) = co_bipartite_parts(&Graph::complete(4)).unwrap();
        assert!(pairs.is_empty());
        assert_eq!(isolated.len(), 4);

        // prism: complement is C6, one non-trivial component
        let prism = patterns::c6_complement();
        let (pairs, isolated) = co_bipartite_parts(&prism).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(isolated.is_empty());
        let (a, b) = &pairs[0];
        assert_eq!(a.len() + b.len(), 6);
        assert!(prism.is_clique(a) && prism.is_clique(b));

        assert!(co_bipartite_parts(&Graph::cycle(5)).is_none());
    }

    #[test]
    fn canonical_cycle_on_cycles() {
        for n in [5usize, 7] {
            let g = Graph::cycle(n);
            let cc = pca_canonical_cycle(&g).unwrap();
            assert_eq!(cc.twins.class_count(), n);
            assert!((0..n).all(|v| cc.cycle.degree(v) == 2));
            assert!(cc.cycle.is_connected());
        }
    }

    #[test]
    fn canonical_cycle_on_squared_cycle() {
        // C7 with chords to distance 2 is proper circular arc
        let mut edges = Vec::new();
        for i in 0..7usize {
            edges.push((i, (i + 1) % 7));
            edges.push((i, (i + 2) % 7));
        }
        edges.sort();
        edges.dedup();
        let edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        let mut uniq = edges.clone();
        uniq.sort();
        uniq.dedup();
        let g = Graph::from_edges(7, &uniq);
        let cc = pca_canonical_cycle(&g).unwrap();
        assert_eq!(cc.cycle.edge_count(), 7);
    }

    #[test]
    fn canonical_cycle_rejects_universal() {
        let star_plus = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2)]);
        assert!(pca_canonical_cycle(&star_plus).is_err());
    }

    #[test]
    fn canonical_cycle_invariant_under_relabeling() {
        let g = Graph::cycle(7);
        let cc1 = pca_canonical_cycle(&g).unwrap();
        let perm = vec![3, 6, 1, 4, 0, 5, 2];
        let h = g.relabel(&perm);
        let cc2 = pca_canonical_cycle(&h).unwrap();
        assert_eq!(cc1.twins.signature(), cc2.twins.signature());
        assert_eq!(cc1.cycle.edge_count(), cc2.cycle.edge_count());
    }

    #[test]
    fn long_cycle_and_sun_cover_helpers() {
        assert!(exists_vertex_covering_long_cycles(&Graph::cycle(6)));
        let two_c4 = Graph::cycle(4).disjoint_union(&Graph::cycle(4));
        assert!(!exists_vertex_covering_long_cycles(&two_c4));
        assert!(exists_vertex_covering_s3(&patterns::s3()));
        let two_s3 = patterns::s3().disjoint_union(&patterns::s3());
        assert!(!exists_vertex_covering_s3(&two_s3));
    }
}
