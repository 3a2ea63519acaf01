//! Color refinement and k-dimensional Weisfeiler-Leman refinement, producing
//! stable partitions with canonical (isomorphism-invariant) class names.
//!
//! Names are dictionary ranks of iteration-indexed signatures: each round a
//! class is described by (previous name, sorted neighbor-name counts), the
//! distinct signatures are sorted, and names are rebuilt as their ranks.
//! Relabeling the input therefore permutes classes but preserves the multiset
//! of (name, size) pairs.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// A partition of `0..domain` into indexed classes carrying canonical names.
///
/// Classes are stored sorted by (name, smallest member). Names produced by the
/// refinement operations are injective whenever the initial names were; other
/// producers (trace partitions, twin classes) may assign equal names to
/// classes that are genuinely indistinguishable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedPartition {
    domain: usize,
    classes: Vec<VertexSet>,
    class_of: Vec<usize>,
    names: Vec<u64>,
}

impl OrderedPartition {
    pub fn from_classes(domain: usize, classes: Vec<VertexSet>, names: Vec<u64>) -> Self {
        assert_eq!(classes.len(), names.len());
        let mut idx: Vec<usize> = (0..classes.len()).collect();
        idx.sort_by_key(|&i| (names[i], classes[i].first().unwrap_or(usize::MAX)));
        let classes: Vec<VertexSet> = idx.iter().map(|&i| classes[i].clone()).collect();
        let names: Vec<u64> = idx.iter().map(|&i| names[i]).collect();
        let mut class_of = vec![usize::MAX; domain];
        for (i, c) in classes.iter().enumerate() {
            for v in c.iter() {
                assert_eq!(class_of[v], usize::MAX, "classes overlap at {v}");
                class_of[v] = i;
            }
        }
        assert!(
            class_of.iter().all(|&c| c != usize::MAX),
            "classes do not cover the domain"
        );
        OrderedPartition {
            domain,
            classes,
            class_of,
            names,
        }
    }

    /// One class per vertex, named by index.
    pub fn discrete(domain: usize) -> Self {
        let classes = (0..domain)
            .map(|v| VertexSet::from_iter(domain, [v]))
            .collect();
        OrderedPartition::from_classes(domain, classes, (0..domain as u64).collect())
    }

    /// A single class covering the whole domain.
    pub fn unit(domain: usize) -> Self {
        OrderedPartition::from_classes(domain, vec![VertexSet::full(domain)], vec![0])
    }

    /// Partition by vertex color; names are the raw color values.
    pub fn from_colors(g: &Graph) -> Self {
        let mut by_color: HashMap<u64, VertexSet> = HashMap::new();
        for v in 0..g.n() {
            by_color
                .entry(g.color(v))
                .or_insert_with(|| VertexSet::new(g.n()))
                .insert(v);
        }
        let mut items: Vec<(u64, VertexSet)> = by_color.into_iter().collect();
        items.sort_by_key(|(c, _)| *c);
        let names = items.iter().map(|(c, _)| *c).collect();
        let classes = items.into_iter().map(|(_, s)| s).collect();
        OrderedPartition::from_classes(g.n(), classes, names)
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, i: usize) -> &VertexSet {
        &self.classes[i]
    }

    pub fn classes(&self) -> &[VertexSet] {
        &self.classes
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    pub fn name(&self, i: usize) -> u64 {
        self.names[i]
    }

    pub fn names(&self) -> &[u64] {
        &self.names
    }

    pub fn is_discrete(&self) -> bool {
        self.classes.len() == self.domain
    }

    /// Sorted multiset of (name, class size): the isomorphism-invariant
    /// summary of the partition.
    pub fn signature(&self) -> Vec<(u64, usize)> {
        let mut sig: Vec<(u64, usize)> = self
            .classes
            .iter()
            .zip(&self.names)
            .map(|(c, &n)| (n, c.len()))
            .collect();
        sig.sort_unstable();
        sig
    }

    /// True iff every class of `self` is contained in a class of `coarser`.
    pub fn refines(&self, coarser: &OrderedPartition) -> bool {
        self.classes.iter().all(|c| {
            let mut it = c.iter();
            match it.next() {
                None => true,
                Some(first) => {
                    let target = coarser.class_of[first];
                    it.all(|v| coarser.class_of[v] == target)
                }
            }
        })
    }

    /// True iff both partitions have the same classes (names ignored).
    pub fn same_classes(&self, other: &OrderedPartition) -> bool {
        if self.domain != other.domain || self.classes.len() != other.classes.len() {
            return false;
        }
        let mut a: Vec<&VertexSet> = self.classes.iter().collect();
        let mut b: Vec<&VertexSet> = other.classes.iter().collect();
        a.sort();
        b.sort();
        a == b
    }

    /// Common refinement of several partitions of the same domain. Names are
    /// ranks of the combined per-class name keys.
    pub fn common_refinement(parts: &[&OrderedPartition]) -> OrderedPartition {
        assert!(!parts.is_empty());
        let domain = parts[0].domain;
        let mut groups: HashMap<Vec<usize>, VertexSet> = HashMap::new();
        for v in 0..domain {
            let key: Vec<usize> = parts.iter().map(|p| p.class_of[v]).collect();
            groups
                .entry(key)
                .or_insert_with(|| VertexSet::new(domain))
                .insert(v);
        }
        let mut keyed: Vec<(Vec<u64>, VertexSet)> = groups
            .into_iter()
            .map(|(key, set)| {
                let names: Vec<u64> = key
                    .iter()
                    .zip(parts.iter())
                    .map(|(&ci, p)| p.names[ci])
                    .collect();
                (names, set)
            })
            .collect();
        keyed.sort();
        let mut names = Vec::with_capacity(keyed.len());
        let mut last: Option<&Vec<u64>> = None;
        let mut rank = 0u64;
        let keys: Vec<Vec<u64>> = keyed.iter().map(|(k, _)| k.clone()).collect();
        for k in &keys {
            if let Some(prev) = last {
                if prev != k {
                    rank += 1;
                }
            }
            names.push(rank);
            last = Some(k);
        }
        let classes = keyed.into_iter().map(|(_, s)| s).collect();
        OrderedPartition::from_classes(domain, classes, names)
    }

    /// Checks the stability condition on `g`: all members of a class have the
    /// same number of neighbors in every class.
    pub fn is_stable(&self, g: &Graph) -> bool {
        self.classes.iter().all(|y| {
            self.classes.iter().all(|x| {
                let mut it = x.iter();
                match it.next() {
                    None => true,
                    Some(first) => {
                        let c = g.neighbors(first).intersection_len(y);
                        it.all(|v| g.neighbors(v).intersection_len(y) == c)
                    }
                }
            })
        })
    }
}

/// Worklist refinement (split classes by counts toward a splitter, re-queue
/// all fragments but the largest) producing the coarsest stable partition
/// refining `init`, without names.
fn stable_classes(g: &Graph, init: &OrderedPartition) -> Vec<VertexSet> {
    let n = g.n();
    let mut members: Vec<Vec<usize>> = init.classes().iter().map(|c| c.iter().collect()).collect();
    let mut class_of: Vec<usize> = (0..n).map(|v| init.class_of(v)).collect();
    let mut queue: VecDeque<usize> = (0..members.len()).collect();
    let mut in_queue = vec![true; members.len()];

    let mut counts = vec![0usize; n];
    while let Some(splitter) = queue.pop_front() {
        in_queue[splitter] = false;
        let mut touched: Vec<usize> = Vec::new();
        for &y in members[splitter].clone().iter() {
            for w in g.neighbors(y).iter() {
                if counts[w] == 0 {
                    touched.push(w);
                }
                counts[w] += 1;
            }
        }
        let mut affected: Vec<usize> = touched.iter().map(|&w| class_of[w]).collect();
        affected.sort_unstable();
        affected.dedup();
        for x in affected {
            if members[x].len() <= 1 {
                continue;
            }
            let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
            for &v in &members[x] {
                groups.entry(counts[v]).or_default().push(v);
            }
            if groups.len() <= 1 {
                continue;
            }
            let mut parts: Vec<Vec<usize>> = groups.into_values().collect();
            // largest fragment stays in place and is never re-queued unless
            // the original class already was
            parts.sort_by_key(|p| std::cmp::Reverse(p.len()));
            members[x] = parts[0].clone();
            for part in parts.into_iter().skip(1) {
                let id = members.len();
                for &v in &part {
                    class_of[v] = id;
                }
                members.push(part);
                in_queue.push(true);
                queue.push_back(id);
            }
        }
        for w in touched {
            counts[w] = 0;
        }
    }
    members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|m| VertexSet::from_iter(n, m))
        .collect()
}

/// Canonical names for the classes of a stable partition: iterate
/// (previous name, aggregated neighbor-name counts) signatures on the class
/// quotient, re-ranking each round, until the induced grouping stops changing.
fn canonical_names(
    g: &Graph,
    classes: &[VertexSet],
    init: &OrderedPartition,
) -> Vec<u64> {
    let k = classes.len();
    if k == 0 {
        return Vec::new();
    }
    // counts[x][y] = |N(v) ∩ classes[y]| for v ∈ classes[x]
    let counts: Vec<Vec<usize>> = classes
        .iter()
        .map(|x| {
            let rep = x.first().unwrap();
            classes
                .iter()
                .map(|y| g.neighbors(rep).intersection_len(y))
                .collect()
        })
        .collect();
    let mut names: Vec<u64> = classes
        .iter()
        .map(|c| init.name(init.class_of(c.first().unwrap())))
        .collect();
    loop {
        let mut sigs: Vec<(u64, Vec<(u64, usize)>)> = Vec::with_capacity(k);
        for x in 0..k {
            let mut profile: HashMap<u64, usize> = HashMap::new();
            for y in 0..k {
                if counts[x][y] > 0 {
                    *profile.entry(names[y]).or_insert(0) += counts[x][y];
                }
            }
            let mut profile: Vec<(u64, usize)> = profile.into_iter().collect();
            profile.sort_unstable();
            sigs.push((names[x], profile));
        }
        let mut sorted: Vec<&(u64, Vec<(u64, usize)>)> = sigs.iter().collect();
        sorted.sort();
        sorted.dedup();
        let rank: HashMap<&(u64, Vec<(u64, usize)>), u64> = sorted
            .iter()
            .enumerate()
            .map(|(r, s)| (*s, r as u64))
            .collect();
        let new_names: Vec<u64> = sigs.iter().map(|s| rank[s]).collect();
        let stable = {
            // grouping unchanged: old names determine new names and vice versa
            let mut fwd: HashMap<u64, u64> = HashMap::new();
            let mut ok = true;
            for (o, n) in names.iter().zip(&new_names) {
                match fwd.entry(*o) {
                    Entry::Vacant(e) => {
                        e.insert(*n);
                    }
                    Entry::Occupied(e) => {
                        if e.get() != n {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            ok && fwd.len() == new_names.iter().collect::<std::collections::HashSet<_>>().len()
        };
        names = new_names;
        if stable {
            return names;
        }
    }
}

/// The unique coarsest stable partition refining `init`, with canonical names.
pub fn color_refine(g: &Graph, init: &OrderedPartition) -> OrderedPartition {
    assert_eq!(init.domain(), g.n());
    let classes = stable_classes(g, init);
    let names = canonical_names(g, &classes, init);
    OrderedPartition::from_classes(g.n(), classes, names)
}

/// Round-synchronous color refinement recording each round's partition.
/// `rounds[0]` is `init`, the last entry equals the returned stable
/// partition. Splitting is relative to class identity (not names), so
/// non-injectively named initial classes never merge. Round class names are
/// deterministic enumeration ranks, not canonical; downstream structure
/// derives canonicity from how rounds attach to an already-canonical graph.
pub fn color_refine_rounds(
    g: &Graph,
    init: &OrderedPartition,
) -> (OrderedPartition, Vec<OrderedPartition>) {
    assert_eq!(init.domain(), g.n());
    let n = g.n();
    let mut current = init.clone();
    let mut rounds = vec![current.clone()];
    loop {
        // signature: own class plus neighbor counts per class identity
        let mut sigs: Vec<(usize, Vec<(usize, usize)>)> = Vec::with_capacity(n);
        for v in 0..n {
            let mut profile: HashMap<usize, usize> = HashMap::new();
            for w in g.neighbors(v).iter() {
                *profile.entry(current.class_of(w)).or_insert(0) += 1;
            }
            let mut profile: Vec<(usize, usize)> = profile.into_iter().collect();
            profile.sort_unstable();
            sigs.push((current.class_of(v), profile));
        }
        let mut groups: HashMap<&(usize, Vec<(usize, usize)>), VertexSet> = HashMap::new();
        for (v, sig) in sigs.iter().enumerate() {
            groups
                .entry(sig)
                .or_insert_with(|| VertexSet::new(n))
                .insert(v);
        }
        let mut classes: Vec<VertexSet> = groups.into_values().collect();
        classes.sort_by_key(|c| c.first().unwrap_or(usize::MAX));
        let names: Vec<u64> = (0..classes.len() as u64).collect();
        let next = OrderedPartition::from_classes(n, classes, names);
        if next.same_classes(&current) {
            return (next, rounds);
        }
        rounds.push(next.clone());
        current = next;
    }
}

/// Stable k-dimensional Weisfeiler-Leman coloring folded to vertices via the
/// diagonal tuples. `k = 1` coincides classwise with [`color_refine`].
pub fn wl_k(g: &Graph, k: usize) -> Result<OrderedPartition> {
    if !(1..=3).contains(&k) {
        return Err(Error::precondition(format!(
            "refinement dimension {k} outside supported range 1..=3"
        )));
    }
    if k == 1 {
        return Ok(color_refine(g, &OrderedPartition::from_colors(g)));
    }
    let n = g.n();
    if n == 0 {
        return Ok(OrderedPartition::from_classes(0, Vec::new(), Vec::new()));
    }
    let tuple_count = n.pow(k as u32);
    let decode = |mut idx: usize| -> Vec<usize> {
        let mut t = vec![0; k];
        for slot in t.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        t
    };

    // 2 bits per pair slot (equality / adjacency) plus the substituted colors
    let atomic = |t: &[usize], w: usize| -> u64 {
        let mut bits = 0u64;
        for (i, &ti) in t.iter().enumerate() {
            bits |= ((ti == w) as u64) << (2 * i);
            bits |= (g.has_edge(ti, w) as u64) << (2 * i + 1);
        }
        bits
    };

    let mut colors: Vec<u64> = Vec::with_capacity(tuple_count);
    {
        let mut sigs: Vec<Vec<u64>> = Vec::with_capacity(tuple_count);
        for idx in 0..tuple_count {
            let t = decode(idx);
            let mut sig: Vec<u64> = t.iter().map(|&v| g.color(v)).collect();
            for i in 0..k {
                for j in i + 1..k {
                    sig.push(((t[i] == t[j]) as u64) << 1 | g.has_edge(t[i], t[j]) as u64);
                }
            }
            sigs.push(sig);
        }
        let mut distinct: Vec<&Vec<u64>> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        let rank: HashMap<&Vec<u64>, u64> =
            distinct.iter().enumerate().map(|(r, s)| (*s, r as u64)).collect();
        colors.extend(sigs.iter().map(|s| rank[s]));
    }

    let stride: Vec<usize> = (0..k).map(|i| n.pow((k - 1 - i) as u32)).collect();
    loop {
        let mut sigs: Vec<(u64, Vec<Vec<u64>>)> = Vec::with_capacity(tuple_count);
        for idx in 0..tuple_count {
            let t = decode(idx);
            let mut multiset: Vec<Vec<u64>> = Vec::with_capacity(n);
            for w in 0..n {
                let mut entry = Vec::with_capacity(k + 1);
                entry.push(atomic(&t, w));
                for i in 0..k {
                    let sub = (idx as i64 + (w as i64 - t[i] as i64) * stride[i] as i64) as usize;
                    entry.push(colors[sub]);
                }
                multiset.push(entry);
            }
            multiset.sort();
            sigs.push((colors[idx], multiset));
        }
        let mut distinct: Vec<&(u64, Vec<Vec<u64>>)> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        let rank: HashMap<&(u64, Vec<Vec<u64>>), u64> =
            distinct.iter().enumerate().map(|(r, s)| (*s, r as u64)).collect();
        let new_colors: Vec<u64> = sigs.iter().map(|s| rank[s]).collect();
        let old_groups: std::collections::HashSet<u64> = colors.iter().copied().collect();
        let new_groups: std::collections::HashSet<u64> = new_colors.iter().copied().collect();
        let done = old_groups.len() == new_groups.len();
        colors = new_colors;
        if done {
            break;
        }
    }

    let mut groups: HashMap<u64, VertexSet> = HashMap::new();
    for v in 0..n {
        let mut idx = 0;
        for _ in 0..k {
            idx = idx * n + v;
        }
        groups
            .entry(colors[idx])
            .or_insert_with(|| VertexSet::new(n))
            .insert(v);
    }
    let mut items: Vec<(u64, VertexSet)> = groups.into_iter().collect();
    items.sort_by_key(|(c, _)| *c);
    // re-rank diagonal colors to consecutive names
    let (names, classes): (Vec<u64>, Vec<VertexSet>) = items
        .into_iter()
        .enumerate()
        .map(|(r, (_, s))| (r as u64, s))
        .unzip();
    Ok(OrderedPartition::from_classes(n, classes, names))
}

/// True iff refinement of the disjoint union separates the two graphs: some
/// stable class holds unequal vertex counts from `g` and `h`.
pub fn distinguishes(g: &Graph, h: &Graph, k: usize) -> Result<bool> {
    let union = g.disjoint_union(h);
    let part = wl_k(&union, k)?;
    for c in part.classes() {
        let from_g = c.iter().filter(|&v| v < g.n()).count();
        let from_h = c.len() - from_g;
        if from_g != from_h {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    }

    #[test]
    fn refine_regular_graph_stays_coarse() {
        let c5 = Graph::cycle(5);
        let p = color_refine(&c5, &OrderedPartition::from_colors(&c5));
        assert_eq!(p.class_count(), 1);
    }

    #[test]
    fn refine_path_splits_ends() {
        let p3 = Graph::path(3);
        let p = color_refine(&p3, &OrderedPartition::from_colors(&p3));
        assert_eq!(p.class_count(), 2);
        let sizes: Vec<usize> = p.classes().iter().map(VertexSet::len).collect();
        assert!(sizes.contains(&2) && sizes.contains(&1));
        assert!(p.is_stable(&p3));
    }

    #[test]
    fn cr_cannot_split_two_regular_graphs() {
        let c6 = Graph::cycle(6);
        let kk = two_triangles();
        assert!(!distinguishes(&c6, &kk, 1).unwrap());
        assert!(distinguishes(&c6, &kk, 2).unwrap());
        assert!(!distinguishes(&c6, &c6, 1).unwrap());
    }

    #[test]
    fn k3_vs_p3_distinguished_by_cr() {
        assert!(distinguishes(&Graph::complete(3), &Graph::path(3), 1).unwrap());
    }

    #[test]
    fn wl1_matches_color_refine_classwise() {
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0), (0, 3)]);
        let a = wl_k(&g, 1).unwrap();
        let b = color_refine(&g, &OrderedPartition::from_colors(&g));
        assert!(a.same_classes(&b));
    }

    #[test]
    fn wl_diagonal_constant_on_vertex_transitive() {
        let c7 = Graph::cycle(7);
        for k in 1..=3 {
            let p = wl_k(&c7, k).unwrap();
            assert_eq!(p.class_count(), 1, "k={k}");
        }
    }

    #[test]
    fn wl_rejects_bad_dimension() {
        assert!(wl_k(&Graph::path(2), 0).is_err());
        assert!(wl_k(&Graph::path(2), 4).is_err());
    }

    #[test]
    fn refinement_is_monotone_and_stable() {
        let g = Graph::from_edges(8, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (0, 4)]);
        let init = OrderedPartition::from_colors(&g);
        let p = color_refine(&g, &init);
        assert!(p.refines(&init));
        assert!(p.is_stable(&g));
        let (q, rounds) = color_refine_rounds(&g, &init);
        assert!(p.same_classes(&q));
        assert!(rounds.len() >= 2);
        for w in rounds.windows(2) {
            assert!(w[1].refines(&w[0]));
        }
    }

    #[test]
    fn canonical_names_survive_relabeling() {
        let g = Graph::from_edges(8, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 5), (5, 6), (1, 7)])
            .with_colors(vec![0, 0, 1, 0, 0, 0, 1, 0]);
        let perm = vec![5, 3, 7, 1, 0, 6, 2, 4];
        let h = g.relabel(&perm);
        let pg = color_refine(&g, &OrderedPartition::from_colors(&g));
        let ph = color_refine(&h, &OrderedPartition::from_colors(&h));
        assert_eq!(pg.signature(), ph.signature());
    }

    #[test]
    fn common_refinement_meets() {
        let a = OrderedPartition::from_classes(
            4,
            vec![VertexSet::from_iter(4, [0, 1]), VertexSet::from_iter(4, [2, 3])],
            vec![0, 1],
        );
        let b = OrderedPartition::from_classes(
            4,
            vec![VertexSet::from_iter(4, [0, 2]), VertexSet::from_iter(4, [1, 3])],
            vec![0, 1],
        );
        let m = OrderedPartition::common_refinement(&[&a, &b]);
        assert_eq!(m.class_count(), 4);
        assert!(m.refines(&a) && m.refines(&b));
    }
}
