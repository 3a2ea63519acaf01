//! Colored undirected graphs over vertex indices `0..n` with bitset adjacency
//! rows, plus the elementary operations everything else is built from.

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::refine::OrderedPartition;

/// An undirected, irreflexive, vertex-colored graph.
///
/// Values are immutable after construction; all mutation goes through
/// [`GraphBuilder`]. Colors are plain integers: canonical naming is the
/// refinement modules' job, never this type's.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
    colors: Vec<u64>,
}

pub struct GraphBuilder {
    g: Graph,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder {
            g: Graph {
                n,
                adj: vec![VertexSet::new(n); n],
                colors: vec![0; n],
            },
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> &mut Self {
        assert!(u < self.g.n && v < self.g.n && u != v, "bad edge {u}-{v}");
        self.g.adj[u].insert(v);
        self.g.adj[v].insert(u);
        self
    }

    pub fn set_color(&mut self, v: usize, c: u64) -> &mut Self {
        self.g.colors[v] = c;
        self
    }

    pub fn build(&mut self) -> Graph {
        self.g.clone()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Graph {
        GraphBuilder::new(n).build()
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut b = GraphBuilder::new(n);
        for &(u, v) in edges {
            b.add_edge(u, v);
        }
        b.build()
    }

    pub fn complete(n: usize) -> Graph {
        let mut b = GraphBuilder::new(n);
        for u in 0..n {
            for v in u + 1..n {
                b.add_edge(u, v);
            }
        }
        b.build()
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        let mut b = GraphBuilder::new(n);
        for v in 0..n {
            b.add_edge(v, (v + 1) % n);
        }
        b.build()
    }

    pub fn path(n: usize) -> Graph {
        let mut b = GraphBuilder::new(n);
        for v in 1..n {
            b.add_edge(v - 1, v);
        }
        b.build()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn closed_neighbors(&self, v: usize) -> VertexSet {
        let mut s = self.adj[v].clone();
        s.insert(v);
        s
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn color(&self, v: usize) -> u64 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u64] {
        &self.colors
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in self.adj[u].iter() {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn with_color(&self, v: usize, c: u64) -> Graph {
        let mut g = self.clone();
        g.colors[v] = c;
        g
    }

    pub fn with_colors(&self, colors: Vec<u64>) -> Graph {
        assert_eq!(colors.len(), self.n);
        let mut g = self.clone();
        g.colors = colors;
        g
    }

    pub fn is_clique(&self, s: &VertexSet) -> bool {
        s.iter().all(|v| {
            let mut need = s.clone();
            need.remove(v);
            need.is_subset(&self.adj[v])
        })
    }

    /// Induced subgraph on `s`, plus the map from new indices to old ones.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<(Graph, Vec<usize>)> {
        if let Some(bad) = s.iter().find(|&v| v >= self.n) {
            return Err(Error::IndexOutOfRange { index: bad, n: self.n });
        }
        let old: Vec<usize> = s.iter().collect();
        let mut new_of = vec![usize::MAX; self.n];
        for (i, &v) in old.iter().enumerate() {
            new_of[v] = i;
        }
        let mut b = GraphBuilder::new(old.len());
        for (i, &v) in old.iter().enumerate() {
            b.set_color(i, self.colors[v]);
            for w in self.adj[v].intersection(s).iter() {
                if new_of[w] > i {
                    b.add_edge(i, new_of[w]);
                }
            }
        }
        Ok((b.build(), old))
    }

    /// Graph with vertex `v` relabeled to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut b = GraphBuilder::new(self.n);
        for v in 0..self.n {
            b.set_color(perm[v], self.colors[v]);
            for w in self.adj[v].iter() {
                if perm[v] < perm[w] {
                    b.add_edge(perm[v], perm[w]);
                }
            }
        }
        b.build()
    }

    /// Connected components, in a canonical-after-canonical-coloring order:
    /// sorted by (size, sorted color multiset), remaining ties by smallest
    /// contained vertex.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let mut seen = VertexSet::new(self.n);
        let mut comps = Vec::new();
        for v0 in 0..self.n {
            if seen.contains(v0) {
                continue;
            }
            let mut comp = VertexSet::new(self.n);
            let mut stack = vec![v0];
            comp.insert(v0);
            while let Some(v) = stack.pop() {
                for w in self.adj[v].iter() {
                    if !comp.contains(w) {
                        comp.insert(w);
                        stack.push(w);
                    }
                }
            }
            seen.union_with(&comp);
            comps.push(comp);
        }
        comps.sort_by_cached_key(|c| {
            let mut cols: Vec<u64> = c.iter().map(|v| self.colors[v]).collect();
            cols.sort_unstable();
            (c.len(), cols, c.first().unwrap_or(0))
        });
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.connected_components().len() == 1
    }

    /// BFS levels from `v0`: level `i` holds the vertices at distance exactly
    /// `i`. Vertices unreachable from `v0` are not listed.
    pub fn distance_levels(&self, v0: usize) -> Vec<VertexSet> {
        assert!(v0 < self.n);
        let mut levels = Vec::new();
        let mut seen = VertexSet::new(self.n);
        let mut frontier = VertexSet::new(self.n);
        frontier.insert(v0);
        seen.insert(v0);
        while !frontier.is_empty() {
            let mut next = VertexSet::new(self.n);
            for v in frontier.iter() {
                next.union_with(&self.adj[v]);
            }
            next.difference_with(&seen);
            seen.union_with(&next);
            levels.push(frontier);
            frontier = next;
        }
        levels
    }

    /// Equivalence classes of `N[v] = N[w]` intersected with color classes.
    /// Every class induces a clique (equal closed neighborhoods of distinct
    /// vertices force an edge).
    pub fn connected_twin_classes(&self) -> OrderedPartition {
        let mut keys: Vec<(Vec<u64>, u64, usize)> = (0..self.n)
            .map(|v| {
                let closed = self.closed_neighbors(v);
                let blocks: Vec<u64> = closed.iter().map(|x| x as u64).collect();
                (blocks, self.colors[v], v)
            })
            .collect();
        keys.sort();
        let mut classes: Vec<VertexSet> = Vec::new();
        let mut i = 0;
        while i < keys.len() {
            let mut j = i;
            let mut class = VertexSet::new(self.n);
            while j < keys.len() && keys[j].0 == keys[i].0 && keys[j].1 == keys[i].1 {
                class.insert(keys[j].2);
                j += 1;
            }
            classes.push(class);
            i = j;
        }
        for c in &classes {
            debug_assert!(self.is_clique(c));
        }
        let names = (0..classes.len() as u64).collect();
        OrderedPartition::from_classes(self.n, classes, names)
    }

    pub fn complement(&self) -> Graph {
        let mut b = GraphBuilder::new(self.n);
        for v in 0..self.n {
            b.set_color(v, self.colors[v]);
            for w in v + 1..self.n {
                if !self.adj[v].contains(w) {
                    b.add_edge(v, w);
                }
            }
        }
        b.build()
    }

    /// Disjoint union; `other`'s vertices are re-indexed after `self`'s.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let n = self.n + other.n;
        let mut b = GraphBuilder::new(n);
        for v in 0..self.n {
            b.set_color(v, self.colors[v]);
            for w in self.adj[v].iter() {
                if v < w {
                    b.add_edge(v, w);
                }
            }
        }
        for v in 0..other.n {
            b.set_color(self.n + v, other.colors[v]);
            for w in other.adj[v].iter() {
                if v < w {
                    b.add_edge(self.n + v, self.n + w);
                }
            }
        }
        b.build()
    }

    /// Checks that `map` is a color- and adjacency-preserving bijection from
    /// `self` onto `other`.
    pub fn is_isomorphism_to(&self, other: &Graph, map: &[usize]) -> bool {
        if self.n != other.n || map.len() != self.n {
            return false;
        }
        let mut hit = vec![false; self.n];
        for v in 0..self.n {
            if map[v] >= self.n || hit[map[v]] {
                return false;
            }
            hit[map[v]] = true;
            if self.colors[v] != other.colors[map[v]] {
                return false;
            }
        }
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) != other.has_edge(map[u], map[v]) {
                    return false;
                }
            }
        }
        true
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?}", self.n, self.edges())?;
        if self.colors.iter().any(|&c| c != 0) {
            write!(f, ", colors={:?}", self.colors)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn induced_subgraph_cases() {
        let p3 = Graph::path(3);
        let (g, _) = p3.induced_subgraph(&VertexSet::new(3)).unwrap();
        assert_eq!(g.n(), 0);

        let (g, map) = p3
            .induced_subgraph(&VertexSet::from_iter(3, [0, 2]))
            .unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(map, vec![0, 2]);

        let k4 = Graph::complete(4);
        let (g, _) = k4
            .induced_subgraph(&VertexSet::from_iter(4, [0, 2, 3]))
            .unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn induced_subgraph_out_of_range() {
        let g = Graph::path(3);
        let mut s = VertexSet::new(5);
        s.insert(4);
        assert!(g.induced_subgraph(&s).is_err());
    }

    #[test]
    fn components() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let comps = g.connected_components();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.len() == 3));

        assert_eq!(Graph::cycle(5).connected_components().len(), 1);
        assert_eq!(Graph::empty(4).connected_components().len(), 4);
    }

    #[test]
    fn bfs_levels() {
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let levels = star.distance_levels(0);
        assert_eq!(levels.len(), 2);
        assert_eq!(levels[0].iter().collect::<Vec<_>>(), vec![0]);
        assert_eq!(levels[1].len(), 4);

        let p4 = Graph::path(4);
        let levels = p4.distance_levels(0);
        assert_eq!(levels.len(), 4);
        assert!(levels.iter().all(|l| l.len() == 1));

        let c6 = Graph::cycle(6);
        let levels = c6.distance_levels(0);
        let sizes: Vec<usize> = levels.iter().map(VertexSet::len).collect();
        assert_eq!(sizes, vec![1, 2, 2, 1]);
        assert_eq!(levels[1].iter().collect::<Vec<_>>(), vec![1, 5]);
        assert_eq!(levels[2].iter().collect::<Vec<_>>(), vec![2, 4]);
    }

    #[test]
    fn distance_levels_cover_component_disjointly() {
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (5, 6)]);
        let levels = g.distance_levels(0);
        let mut seen = VertexSet::new(7);
        for l in &levels {
            assert!(seen.is_disjoint(l));
            seen.union_with(l);
        }
        let comp = &g.connected_components()[1];
        assert_eq!(&seen, comp);
    }

    #[test]
    fn twin_classes() {
        let k4 = Graph::complete(4);
        let p = k4.connected_twin_classes();
        assert_eq!(p.class_count(), 1);
        assert_eq!(p.class(0).len(), 4);

        let c5 = Graph::cycle(5);
        assert_eq!(c5.connected_twin_classes().class_count(), 5);

        let k4c = k4.with_color(2, 7);
        let p = k4c.connected_twin_classes();
        assert_eq!(p.class_count(), 2);
        let sizes: Vec<usize> = (0..2).map(|i| p.class(i).len()).collect();
        assert!(sizes.contains(&1) && sizes.contains(&3));
    }

    #[test]
    fn complement_and_union() {
        let k3 = Graph::complete(3);
        assert_eq!(k3.complement().edge_count(), 0);
        let g = Graph::from_edges(5, &[(0, 3), (1, 2), (2, 4)]);
        assert_eq!(g.complement().complement(), g);
        let u = Graph::complete(2).disjoint_union(&Graph::complete(2));
        assert_eq!(u.n(), 4);
        assert_eq!(u.edge_count(), 2);
        assert!(u.has_edge(2, 3));
    }

    #[test]
    fn relabel_commutes_with_ops() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4)]).with_colors(vec![0, 1, 0, 0, 1, 2]);
        let perm = vec![3, 0, 5, 1, 4, 2];
        let h = g.relabel(&perm);
        // component size/color multisets agree
        let sig = |g: &Graph| {
            let mut v: Vec<(usize, Vec<u64>)> = g
                .connected_components()
                .iter()
                .map(|c| {
                    let mut cols: Vec<u64> = c.iter().map(|x| g.color(x)).collect();
                    cols.sort_unstable();
                    (c.len(), cols)
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(sig(&g), sig(&h));
        // twin class size multisets agree
        let tw = |g: &Graph| {
            let p = g.connected_twin_classes();
            let mut v: Vec<usize> = (0..p.class_count()).map(|i| p.class(i).len()).collect();
            v.sort_unstable();
            v
        };
        assert_eq!(tw(&g), tw(&h));
    }
}
