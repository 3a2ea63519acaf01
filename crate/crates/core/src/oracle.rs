//! Brute-force reference implementations. Everything here trades speed for
//! obvious correctness; budgets make exhaustion explicit instead of wrong.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::refine::{color_refine, OrderedPartition};

#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub node_limit: u64,
    pub time_limit_ms: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            node_limit: 200_000_000,
            time_limit_ms: 120_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    /// complete search finished without a result
    Exhausted,
    /// budget ran out; no answer may be inferred
    Budget,
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }
}

struct IsoSearch<'a> {
    g: &'a Graph,
    h: &'a Graph,
    candidates: Vec<VertexSet>,
    map: Vec<usize>,
    used: Vec<bool>,
    nodes: u64,
    budget: SearchBudget,
    started: Instant,
    /// when set, every complete map is recorded instead of stopping early
    all: Option<Vec<Vec<usize>>>,
    count: u64,
    blown: bool,
}

impl IsoSearch<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget.node_limit {
            self.blown = true;
            return false;
        }
        if self.nodes % 4096 == 0
            && self.started.elapsed().as_millis() as u64 > self.budget.time_limit_ms
        {
            self.blown = true;
            return false;
        }
        true
    }

    fn run(&mut self) -> bool {
        if !self.tick() {
            return false;
        }
        let n = self.g.n();
        let next = (0..n)
            .filter(|&v| self.map[v] == usize::MAX)
            .max_by_key(|&v| {
                let mapped_nbrs = self
                    .g
                    .neighbors(v)
                    .iter()
                    .filter(|&w| self.map[w] != usize::MAX)
                    .count();
                (mapped_nbrs, self.g.degree(v), std::cmp::Reverse(v))
            });
        let Some(v) = next else {
            self.count += 1;
            if let Some(all) = &mut self.all {
                all.push(self.map.clone());
                return false; // keep enumerating
            }
            return true;
        };
        let cands: Vec<usize> = self.candidates[v].iter().collect();
        for w in cands {
            if self.used[w] {
                continue;
            }
            let consistent = self.g.neighbors(v).iter().all(|x| {
                self.map[x] == usize::MAX || self.h.has_edge(w, self.map[x])
            }) && (0..n).all(|x| {
                self.map[x] == usize::MAX
                    || self.g.has_edge(v, x) == self.h.has_edge(w, self.map[x])
            });
            if !consistent {
                continue;
            }
            self.map[v] = w;
            self.used[w] = true;
            if self.run() {
                return true;
            }
            self.used[w] = false;
            self.map[v] = usize::MAX;
            if self.blown {
                return false;
            }
        }
        false
    }
}

fn iso_candidates(g: &Graph, h: &Graph) -> Option<Vec<VertexSet>> {
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return None;
    }
    let union = g.disjoint_union(h);
    let part = color_refine(&union, &OrderedPartition::from_colors(&union));
    let n = g.n();
    let mut cands = vec![VertexSet::new(n); n];
    for c in part.classes() {
        let g_side: Vec<usize> = c.iter().filter(|&v| v < n).collect();
        let h_side: Vec<usize> = c.iter().filter(|&v| v >= n).map(|v| v - n).collect();
        if g_side.len() != h_side.len() {
            return None;
        }
        for &v in &g_side {
            for &w in &h_side {
                cands[v].insert(w);
            }
        }
    }
    Some(cands)
}

/// Color-preserving isomorphism by backtracking with refinement pruning.
pub fn brute_iso(g: &Graph, h: &Graph, budget: SearchBudget) -> SearchOutcome<Vec<usize>> {
    let Some(candidates) = iso_candidates(g, h) else {
        return SearchOutcome::Exhausted;
    };
    let mut s = IsoSearch {
        g,
        h,
        candidates,
        map: vec![usize::MAX; g.n()],
        used: vec![false; g.n()],
        nodes: 0,
        budget,
        started: Instant::now(),
        all: None,
        count: 0,
    blown: false,
    };
    if s.run() {
        debug_assert!(g.is_isomorphism_to(h, &s.map));
        SearchOutcome::Found(s.map)
    } else if s.blown {
        SearchOutcome::Budget
    } else {
        SearchOutcome::Exhausted
    }
}

/// Exact |Aut(G)| by exhaustive backtracking.
pub fn brute_aut_order(g: &Graph, budget: SearchBudget) -> SearchOutcome<u64> {
    match brute_aut_elements(g, budget) {
        SearchOutcome::Found(elems) => SearchOutcome::Found(elems.len() as u64),
        SearchOutcome::Exhausted => SearchOutcome::Exhausted,
        SearchOutcome::Budget => SearchOutcome::Budget,
    }
}

/// Every automorphism of `g`, as image maps.
pub fn brute_aut_elements(g: &Graph, budget: SearchBudget) -> SearchOutcome<Vec<Vec<usize>>> {
    let Some(candidates) = iso_candidates(g, g) else {
        return SearchOutcome::Exhausted;
    };
    let mut s = IsoSearch {
        g,
        h: g,
        candidates,
        map: vec![usize::MAX; g.n()],
        used: vec![false; g.n()],
        nodes: 0,
        budget,
        started: Instant::now(),
        all: Some(Vec::new()),
        count: 0,
        blown: false,
    };
    s.run();
    if s.blown {
        return SearchOutcome::Budget;
    }
    let elems = s.all.take().unwrap();
    debug_assert!(!elems.is_empty(), "identity must always be found");
    SearchOutcome::Found(elems)
}

/// Literal repeat-split-until-stable partition refinement; the correctness
/// reference for the worklist implementation.
pub fn naive_stable_partition(g: &Graph, init: &OrderedPartition) -> OrderedPartition {
    let n = g.n();
    let mut classes: Vec<Vec<usize>> = init
        .classes()
        .iter()
        .map(|c| c.iter().collect())
        .collect();
    loop {
        let mut class_of = vec![0usize; n];
        for (i, c) in classes.iter().enumerate() {
            for &v in c {
                class_of[v] = i;
            }
        }
        let mut next: Vec<Vec<usize>> = Vec::new();
        for c in &classes {
            let mut keyed: Vec<(Vec<usize>, usize)> = c
                .iter()
                .map(|&v| {
                    let mut counts = vec![0usize; classes.len()];
                    for w in g.neighbors(v).iter() {
                        counts[class_of[w]] += 1;
                    }
                    (counts, v)
                })
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                    start = i;
                }
            }
        }
        // a split strictly increases the class count
        let changed = next.len() != classes.len();
        classes = next;
        if !changed {
            break;
        }
    }
    let sets: Vec<VertexSet> = classes
        .iter()
        .map(|c| VertexSet::from_iter(n, c.iter().copied()))
        .collect();
    let names: Vec<u64> = (0..sets.len() as u64).collect();
    OrderedPartition::from_classes(n, sets, names)
}

/// One-dimensional realizability on the grid of step 1/(2n): for every vertex
/// order, positions are a difference-constraint system solved exactly.
pub fn brute_unit_interval(g: &Graph) -> Result<bool> {
    let n = g.n();
    if n > 8 {
        return Err(Error::precondition("brute unit interval test limited to n <= 8"));
    }
    if n <= 1 {
        return Ok(true);
    }
    let unit = 2 * n as i64; // scaled threshold: grid step is 1/(2n)
    let mut order: Vec<usize> = (0..n).collect();
    let feasible = |order: &[usize]| -> bool {
        // difference constraints on scaled positions x:
        //   ordering: x[order[i]] <= x[order[i+1]]
        //   edge uv (u before v): x_v - x_u <= unit
        //   non-edge: x_v - x_u >= unit + 1
        // Bellman-Ford over constraint edges (to - from <= w)
        let mut cons: Vec<(usize, usize, i64)> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (u, v) = (order[i], order[j]);
                if g.has_edge(u, v) {
                    cons.push((u, v, unit));
                } else {
                    cons.push((v, u, -(unit + 1)));
                }
            }
            if i + 1 < n {
                cons.push((order[i + 1], order[i], 0));
            }
        }
        let mut dist = vec![0i64; n];
        for round in 0..n {
            let mut any = false;
            for &(from, to, w) in &cons {
                if dist[from] + w < dist[to] {
                    dist[to] = dist[from] + w;
                    any = true;
                }
            }
            if !any {
                return true;
            }
            if round == n - 1 {
                return false; // negative cycle
            }
        }
        true
    };
    // Heap's algorithm over vertex orders
    let mut c = vec![0usize; n];
    if feasible(&order) {
        return Ok(true);
    }
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            if feasible(&order) {
                return Ok(true);
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(false)
}

/// Maximal clique enumeration with pivoting; the reference the primary
/// enumeration is compared against.
pub fn bron_kerbosch(g: &Graph) -> Vec<VertexSet> {
    fn expand(g: &Graph, r: VertexSet, mut p: VertexSet, mut x: VertexSet, out: &mut Vec<VertexSet>) {
        if p.is_empty() && x.is_empty() {
            out.push(r);
            return;
        }
        let pivot = p
            .union(&x)
            .iter()
            .max_by_key(|&u| g.neighbors(u).intersection_len(&p))
            .unwrap();
        let todo: Vec<usize> = p.difference(g.neighbors(pivot)).iter().collect();
        for v in todo {
            let nv = g.neighbors(v);
            let mut r2 = r.clone();
            r2.insert(v);
            expand(g, r2, p.intersection(nv), x.intersection(nv), out);
            p.remove(v);
            x.insert(v);
        }
    }
    let mut out = Vec::new();
    if g.n() > 0 {
        expand(
            g,
            VertexSet::new(g.n()),
            VertexSet::full(g.n()),
            VertexSet::new(g.n()),
            &mut out,
        );
    }
    out.sort();
    out
}

/// Seeded Erdos-Renyi-style colored graph, for randomized cross-checks.
pub fn random_colored_graph(
    n: usize,
    edge_percent: u32,
    color_count: u64,
    seed: u64,
) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = crate::graph::GraphBuilder::new(n);
    for v in 0..n {
        b.set_color(v, rng.gen_range(0..color_count.max(1)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_range(0..100) < edge_percent {
                b.add_edge(u, v);
            }
        }
    }
    b.build()
}

/// Seeded random relabeling of a graph, returning the permuted graph and the
/// permutation used.
pub fn random_relabel(g: &Graph, seed: u64) -> (Graph, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..g.n()).collect();
    for i in (1..g.n()).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    (g.relabel(&perm), perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pca::patterns;

    fn b() -> SearchBudget {
        SearchBudget::default()
    }

    #[test]
    fn iso_basics() {
        let k3 = Graph::complete(3);
        let found = brute_iso(&k3, &k3, b()).found().unwrap();
        assert!(k3.is_isomorphism_to(&k3, &found));
        assert_eq!(brute_iso(&k3, &Graph::path(3), b()), SearchOutcome::Exhausted);
        // refinement alone cannot separate these; search must
        let c6 = Graph::cycle(6);
        let kk = Graph::complete(3).disjoint_union(&Graph::complete(3));
        assert_eq!(brute_iso(&c6, &kk, b()), SearchOutcome::Exhausted);
    }

    #[test]
    fn iso_respects_colors() {
        let g = Graph::complete(2).with_colors(vec![0, 1]);
        let h = Graph::complete(2).with_colors(vec![0, 0]);
        assert_eq!(brute_iso(&g, &h, b()), SearchOutcome::Exhausted);
        let h2 = Graph::complete(2).with_colors(vec![1, 0]);
        assert!(brute_iso(&g, &h2, b()).found().is_some());
    }

    #[test]
    fn relabeled_graphs_recovered() {
        for seed in 0..20 {
            let g = random_colored_graph(9, 40, 2, seed);
            let (h, _) = random_relabel(&g, seed + 1000);
            let map = brute_iso(&g, &h, b()).found().expect("must recover");
            assert!(g.is_isomorphism_to(&h, &map));
        }
    }

    #[test]
    fn aut_orders() {
        assert_eq!(brute_aut_order(&Graph::complete(4), b()), SearchOutcome::Found(24));
        assert_eq!(brute_aut_order(&Graph::path(4), b()), SearchOutcome::Found(2));
        let petersen = Graph::from_edges(
            10,
            &[
                (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
                (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            ],
        );
        assert_eq!(brute_aut_order(&petersen, b()), SearchOutcome::Found(120));
    }

    #[test]
    fn aut_self_consistency() {
        let g = random_colored_graph(8, 50, 1, 7);
        let gg = g.disjoint_union(&g);
        if let (SearchOutcome::Found(a), SearchOutcome::Found(b2)) =
            (brute_aut_order(&g, b()), brute_aut_order(&gg, b()))
        {
            if g.is_connected() {
                assert_eq!(b2, 2 * a * a);
            }
        } else {
            panic!("budget too small");
        }
    }

    #[test]
    fn naive_refinement_agrees() {
        for seed in 0..30 {
            let g = random_colored_graph(12, 30, 2, seed);
            let init = OrderedPartition::from_colors(&g);
            let fast = color_refine(&g, &init);
            let slow = naive_stable_partition(&g, &init);
            assert!(fast.same_classes(&slow), "seed {seed}");
        }
    }

    #[test]
    fn unit_interval_brute() {
        assert!(brute_unit_interval(&Graph::path(4)).unwrap());
        assert!(!brute_unit_interval(&patterns::claw()).unwrap());
        assert!(!brute_unit_interval(&Graph::cycle(4)).unwrap());
        assert!(brute_unit_interval(&Graph::complete(8)).unwrap());
        assert!(!brute_unit_interval(&patterns::s3()).unwrap());
        assert!(!brute_unit_interval(&patterns::net()).unwrap());
        assert!(brute_unit_interval(&Graph::empty(5)).unwrap());
        assert!(brute_unit_interval(&Graph::cycle(3)).unwrap());
    }

    #[test]
    fn budget_is_reported() {
        let g = random_colored_graph(12, 50, 1, 3);
        let tiny = SearchBudget {
            node_limit: 1,
            time_limit_ms: 60_000,
        };
        assert_eq!(brute_aut_elements(&g, tiny), SearchOutcome::Budget);
    }
}
