//! Layered, vertex-colored structure graphs whose color classes are linearly
//! ordered, with the bounded-cell certificate and the layer-by-layer
//! automorphism algorithm.
//!
//! A structure graph is t-circle-bounded when, for every color and every
//! exact down-neighborhood, the cell of vertices of that color with that
//! down-neighborhood induces a disjoint union of at most t paths and cycles.
//! The automorphism group of such a graph decomposes layer by layer: the
//! kernel of restriction to the lower layers is the product of per-cell
//! path/cycle symmetries, and the image is the subgroup of lower-layer
//! automorphisms preserving the cell hypergraph colored by cell shape.

use std::collections::HashMap;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::perm::{
    hypergraph_aut_intersect, schreier_sims, set_transporter, Hypergraph, Perm, PermGroup,
};

/// Canonical color of a structure-graph vertex. Keys compare
/// lexicographically; the layer order is ascending key order.
pub type ColorKey = Vec<u64>;

#[derive(Clone, Debug, Default)]
pub struct StructureGraph {
    adj: Vec<VertexSet>,
    colors: Vec<ColorKey>,
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub color: ColorKey,
    pub cell_down: Vec<usize>,
    pub reason: String,
}

#[derive(Clone, Debug)]
enum Shape {
    Path(Vec<usize>),
    Cycle(Vec<usize>),
}

impl Shape {
    fn signature(&self) -> (bool, usize) {
        match self {
            Shape::Path(v) => (false, v.len()),
            Shape::Cycle(v) => (true, v.len()),
        }
    }

    fn vertices(&self) -> &[usize] {
        match self {
            Shape::Path(v) | Shape::Cycle(v) => v,
        }
    }
}

struct Cell {
    down: VertexSet,
    members: VertexSet,
    comps: Vec<Shape>,
}

impl StructureGraph {
    pub fn new() -> StructureGraph {
        StructureGraph::default()
    }

    pub fn add_vertex(&mut self, color: ColorKey) -> usize {
        let id = self.adj.len();
        for a in &mut self.adj {
            let mut grown = VertexSet::new(id + 1);
            for v in a.iter() {
                grown.insert(v);
            }
            *a = grown;
        }
        self.adj.push(VertexSet::new(id + 1));
        self.colors.push(color);
        id
    }

    /// Reserve all vertices up front; cheaper than growing row by row.
    pub fn with_vertices(colors: Vec<ColorKey>) -> StructureGraph {
        let n = colors.len();
        StructureGraph {
            adj: vec![VertexSet::new(n); n],
            colors,
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n() && v < self.n());
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn color(&self, v: usize) -> &ColorKey {
        &self.colors[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// Distinct colors in ascending (layer) order.
    pub fn layer_colors(&self) -> Vec<ColorKey> {
        let mut cols: Vec<ColorKey> = self.colors.clone();
        cols.sort();
        cols.dedup();
        cols
    }

    pub fn disjoint_union(&self, other: &StructureGraph) -> StructureGraph {
        let n = self.n() + other.n();
        let mut colors = self.colors.clone();
        colors.extend(other.colors.iter().cloned());
        let mut g = StructureGraph::with_vertices(colors);
        for u in 0..self.n() {
            for v in self.adj[u].iter() {
                if u < v {
                    g.add_edge(u, v);
                }
            }
        }
        for u in 0..other.n() {
            for v in other.adj[u].iter() {
                if u < v {
                    g.add_edge(self.n() + u, self.n() + v);
                }
            }
        }
        debug_assert_eq!(g.n(), n);
        g
    }

    pub fn is_automorphism(&self, p: &Perm) -> bool {
        if p.degree() != self.n() {
            return false;
        }
        (0..self.n()).all(|v| self.colors[v] == self.colors[p.apply(v)])
            && (0..self.n()).all(|u| {
                self.adj[u]
                    .iter()
                    .all(|v| self.has_edge(p.apply(u), p.apply(v)))
            })
    }

    /// Sorted (color, size) pairs: a cheap relabeling-invariant summary.
    pub fn color_signature(&self) -> Vec<(ColorKey, usize)> {
        let mut counts: HashMap<&ColorKey, usize> = HashMap::new();
        for c in &self.colors {
            *counts.entry(c).or_insert(0) += 1;
        }
        let mut sig: Vec<(ColorKey, usize)> =
            counts.into_iter().map(|(c, k)| (c.clone(), k)).collect();
        sig.sort();
        sig
    }

    fn cells_of_layer(&self, layer: &VertexSet, below: &VertexSet) -> Result<Vec<Cell>> {
        let mut groups: HashMap<VertexSet, VertexSet> = HashMap::new();
        for v in layer.iter() {
            let down = self.adj[v].intersection(below);
            groups
                .entry(down)
                .or_insert_with(|| VertexSet::new(self.n()))
                .insert(v);
        }
        let mut keys: Vec<VertexSet> = groups.keys().cloned().collect();
        keys.sort();
        keys.into_iter()
            .map(|down| {
                let members = groups.remove(&down).unwrap();
                let comps = self.cell_components(&members)?;
                Ok(Cell {
                    down,
                    members,
                    comps,
                })
            })
            .collect()
    }

    fn cell_components(&self, members: &VertexSet) -> Result<Vec<Shape>> {
        let mut remaining = members.clone();
        let mut comps = Vec::new();
        while let Some(start) = remaining.first() {
            // walk the component; inside a cell every vertex has degree <= 2
            let mut comp = VertexSet::new(self.n());
            comp.insert(start);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for w in self.adj[v].intersection(members).iter() {
                    if !comp.contains(w) {
                        comp.insert(w);
                        stack.push(w);
                    }
                }
            }
            remaining.difference_with(&comp);
            let degrees: Vec<(usize, usize)> = comp
                .iter()
                .map(|v| (v, self.adj[v].intersection_len(&comp)))
                .collect();
            if let Some(&(v, d)) = degrees.iter().find(|&&(_, d)| d > 2) {
                return Err(Error::diagnosed(
                    "layered-cell-degree",
                    format!("vertex {v} has {d} same-cell neighbors"),
                ));
            }
            let ends: Vec<usize> =
                degrees.iter().filter(|&&(_, d)| d <= 1).map(|&(v, _)| v).collect();
            if ends.is_empty() {
                // cycle: traverse from the smallest vertex
                let first = comp.first().unwrap();
                let mut seq = vec![first];
                let mut prev = first;
                let mut cur = self.adj[first].intersection(&comp).first().unwrap();
                while cur != first {
                    seq.push(cur);
                    let next = self.adj[cur]
                        .intersection(&comp)
                        .iter()
                        .find(|&w| w != prev)
                        .unwrap();
                    prev = cur;
                    cur = next;
                }
                comps.push(Shape::Cycle(seq));
            } else {
                // path: walk from the smaller endpoint
                let first = *ends.iter().min().unwrap();
                let mut seq = vec![first];
                let mut prev = usize::MAX;
                let mut cur = first;
                while let Some(w) = self.adj[cur]
                    .intersection(&comp)
                    .iter()
                    .find(|&w| w != prev)
                {
                    seq.push(w);
                    prev = cur;
                    cur = w;
                }
                comps.push(Shape::Path(seq));
            }
        }
        Ok(comps)
    }
}

/// Checks the bounded-cell certificate: every same-color, same-down-
/// neighborhood cell is a disjoint union of at most `t` paths/cycles.
/// Returns the first violation found.
pub fn verify_circle_bounded(h: &StructureGraph, t: usize) -> std::result::Result<(), Violation> {
    let layers = h.layer_colors();
    let mut below = VertexSet::new(h.n());
    for color in layers {
        let mut layer = VertexSet::new(h.n());
        for v in 0..h.n() {
            if h.colors[v] == color {
                layer.insert(v);
            }
        }
        let mut groups: HashMap<VertexSet, VertexSet> = HashMap::new();
        for v in layer.iter() {
            let down = h.adj[v].intersection(&below);
            groups
                .entry(down)
                .or_insert_with(|| VertexSet::new(h.n()))
                .insert(v);
        }
        for (down, members) in groups {
            for v in members.iter() {
                let d = h.adj[v].intersection_len(&members);
                if d > 2 {
                    return Err(Violation {
                        color: color.clone(),
                        cell_down: down.iter().collect(),
                        reason: format!("vertex {v} has cell degree {d} > 2"),
                    });
                }
            }
            // count components by union-find over cell edges
            let verts: Vec<usize> = members.iter().collect();
            let idx: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let mut parent: Vec<usize> = (0..verts.len()).collect();
            fn find(p: &mut Vec<usize>, x: usize) -> usize {
                if p[x] != x {
                    let r = find(p, p[x]);
                    p[x] = r;
                }
                p[x]
            }
            for &v in &verts {
                for w in h.adj[v].intersection(&members).iter() {
                    let (a, b) = (find(&mut parent, idx[&v]), find(&mut parent, idx[&w]));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
            let comp_count = (0..verts.len()).filter(|&i| find(&mut parent, i) == i).count();
            if comp_count > t {
                return Err(Violation {
                    color: color.clone(),
                    cell_down: down.iter().collect(),
                    reason: format!("cell has {comp_count} components > bound {t}"),
                });
            }
        }
        below.union_with(&layer);
    }
    Ok(())
}

/// Generators of the internal symmetries of one cell: path reversals, cycle
/// rotations/reflections, and swaps of equal-shape components.
fn cell_kernel_generators(n: usize, cell: &Cell) -> Vec<Perm> {
    let mut gens = Vec::new();
    let mut sorted: Vec<&Shape> = cell.comps.iter().collect();
    sorted.sort_by_key(|s| (s.signature(), s.vertices().first().copied()));
    for shape in &sorted {
        match shape {
            Shape::Path(seq) if seq.len() >= 2 => {
                let mut images: Vec<usize> = (0..n).collect();
                for (i, &v) in seq.iter().enumerate() {
                    images[v] = seq[seq.len() - 1 - i];
                }
                gens.push(Perm::from_images(images).unwrap());
            }
            Shape::Cycle(seq) => {
                let mut rot: Vec<usize> = (0..n).collect();
                for (i, &v) in seq.iter().enumerate() {
                    rot[v] = seq[(i + 1) % seq.len()];
                }
                gens.push(Perm::from_images(rot).unwrap());
                let mut refl: Vec<usize> = (0..n).collect();
                for (i, &v) in seq.iter().enumerate() {
                    refl[v] = seq[(seq.len() - i) % seq.len()];
                }
                gens.push(Perm::from_images(refl).unwrap());
            }
            _ => {}
        }
    }
    for pair in sorted.windows(2) {
        if pair[0].signature() == pair[1].signature() {
            let mut images: Vec<usize> = (0..n).collect();
            for (&a, &b) in pair[0].vertices().iter().zip(pair[1].vertices()) {
                images[a] = b;
                images[b] = a;
            }
            gens.push(Perm::from_images(images).unwrap());
        }
    }
    gens
}

/// An isomorphism from `from`'s cell onto `to`'s, as a partial image map.
/// Components are matched by shape in sorted order; any choice is valid
/// because all within-cell symmetries lie in the kernel.
fn cell_isomorphism(from: &Cell, to: &Cell, images: &mut [usize]) {
    let sort_shapes = |cell: &Cell| {
        let mut v: Vec<Shape> = cell.comps.clone();
        v.sort_by_key(|s| (s.signature(), s.vertices().first().copied()));
        v
    };
    let a = sort_shapes(from);
    let b = sort_shapes(to);
    debug_assert_eq!(
        a.iter().map(Shape::signature).collect::<Vec<_>>(),
        b.iter().map(Shape::signature).collect::<Vec<_>>()
    );
    for (sa, sb) in a.iter().zip(&b) {
        for (&x, &y) in sa.vertices().iter().zip(sb.vertices()) {
            images[x] = y;
        }
    }
}

fn cell_type_signature(cell: &Cell) -> Vec<(bool, usize)> {
    let mut sig: Vec<(bool, usize)> = cell.comps.iter().map(Shape::signature).collect();
    sig.sort_unstable();
    sig
}

/// The automorphism group of a structure graph, computed layer by layer.
pub fn aut_circle_bounded(h: &StructureGraph) -> Result<PermGroup> {
    let n = h.n();
    let layers = h.layer_colors();
    let mut group = PermGroup::trivial(n);
    let mut below = VertexSet::new(n);
    for color in layers {
        let mut layer = VertexSet::new(n);
        for v in 0..n {
            if h.colors[v] == color {
                layer.insert(v);
            }
        }
        let cells = h.cells_of_layer(&layer, &below)?;

        let mut kernel_gens: Vec<Perm> = Vec::new();
        for cell in &cells {
            kernel_gens.extend(cell_kernel_generators(n, cell));
        }

        // hyperedges: cell down-neighborhoods colored by cell shape
        let mut type_ranks: HashMap<Vec<(bool, usize)>, u64> = HashMap::new();
        let mut edge_sets = Vec::new();
        let mut edge_colors = Vec::new();
        let mut cell_by_down: HashMap<VertexSet, usize> = HashMap::new();
        for (ci, cell) in cells.iter().enumerate() {
            let sig = cell_type_signature(cell);
            let next = type_ranks.len() as u64;
            let rank = *type_ranks.entry(sig).or_insert(next);
            edge_sets.push(cell.down.clone());
            edge_colors.push(rank);
            cell_by_down.insert(cell.down.clone(), ci);
        }
        let hyper = Hypergraph::new(n, edge_sets, edge_colors);
        let image = hypergraph_aut_intersect(&hyper, &group)?;

        let mut lifted: Vec<Perm> = Vec::new();
        for s in image.generators() {
            let mut images: Vec<usize> = (0..n).map(|v| s.apply(v)).collect();
            for cell in &cells {
                let target_down = s.apply_set(&cell.down);
                let ti = *cell_by_down.get(&target_down).ok_or_else(|| {
                    Error::diagnosed("layered-cell-transport", "image cell missing")
                })?;
                cell_isomorphism(cell, &cells[ti], &mut images);
            }
            lifted.push(Perm::from_images(images)?);
        }

        let mut gens = kernel_gens.clone();
        gens.extend(lifted);
        let relaxed = schreier_sims(n, &gens)?;
        debug_assert_eq!(
            relaxed.order(),
            schreier_sims(n, &kernel_gens)?.order() * image.order(),
            "layer decomposition must be exact"
        );

        // edges between different cells of this layer were not part of the
        // cell structure; enforce them as colored pairs
        let mut cross: Vec<VertexSet> = Vec::new();
        let cell_of: HashMap<usize, usize> = cells
            .iter()
            .enumerate()
            .flat_map(|(ci, c)| c.members.iter().map(move |v| (v, ci)))
            .collect();
        for u in layer.iter() {
            for v in h.adj[u].intersection(&layer).iter() {
                if u < v && cell_of[&u] != cell_of[&v] {
                    cross.push(VertexSet::from_iter(n, [u, v]));
                }
            }
        }
        group = if cross.is_empty() {
            relaxed
        } else {
            let colors = vec![0; cross.len()];
            hypergraph_aut_intersect(&Hypergraph::new(n, cross, colors), &relaxed)?
        };
        below.union_with(&layer);
    }

    for g in group.generators() {
        if !h.is_automorphism(g) {
            return Err(Error::diagnosed(
                "layered-generator-check",
                format!("generator {g:?} is not an automorphism"),
            ));
        }
    }
    Ok(group)
}

/// Color-preserving isomorphism between two structure graphs, if one exists.
/// Works on the disjoint union: some element of its automorphism group maps
/// one side onto the other exactly when the graphs are isomorphic.
pub fn iso_circle_bounded(
    h1: &StructureGraph,
    h2: &StructureGraph,
) -> Result<Option<Vec<usize>>> {
    if h1.color_signature() != h2.color_signature() {
        return Ok(None);
    }
    let union = h1.disjoint_union(h2);
    let aut = aut_circle_bounded(&union)?;
    let side1 = VertexSet::from_iter(union.n(), 0..h1.n());
    let side2 = VertexSet::from_iter(union.n(), h1.n()..union.n());
    let Some(t) = set_transporter(&aut, &side1, &side2) else {
        return Ok(None);
    };
    let map: Vec<usize> = (0..h1.n()).map(|v| t.apply(v) - h1.n()).collect();
    for v in 0..h1.n() {
        if h1.color(v) != h2.color(map[v]) {
            return Err(Error::diagnosed("layered-iso-check", "color mismatch in map"));
        }
        for w in h1.neighbors(v).iter() {
            if !h2.has_edge(map[v], map[w]) {
                return Err(Error::diagnosed("layered-iso-check", "edge mismatch in map"));
            }
        }
    }
    Ok(Some(map))
}

pub fn aut_order(h: &StructureGraph) -> Result<num_bigint::BigUint> {
    Ok(aut_circle_bounded(h)?.order())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn single_layer(edges: &[(usize, usize)], n: usize) -> StructureGraph {
        let mut h = StructureGraph::with_vertices(vec![vec![0]; n]);
        for &(u, v) in edges {
            h.add_edge(u, v);
        }
        h
    }

    #[test]
    fn verify_cycle_and_components() {
        let c7 = single_layer(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0)], 7);
        assert!(verify_circle_bounded(&c7, 1).is_ok());

        let two_c4 = single_layer(
            &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)],
            8,
        );
        assert!(verify_circle_bounded(&two_c4, 1).is_err());
        assert!(verify_circle_bounded(&two_c4, 2).is_ok());

        let claw = single_layer(&[(0, 1), (0, 2), (0, 3)], 4);
        for t in 1..5 {
            let err = verify_circle_bounded(&claw, t).unwrap_err();
            assert!(err.reason.contains("degree"));
        }
    }

    #[test]
    fn aut_of_paths_and_cycles() {
        let c5 = single_layer(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], 5);
        assert_eq!(aut_order(&c5).unwrap(), BigUint::from(10u32));

        let p4 = single_layer(&[(0, 1), (1, 2), (2, 3)], 4);
        assert_eq!(aut_order(&p4).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn aut_two_layer_cone() {
        // layer 1: single vertex r; layer 2: C4 all adjacent to r
        let mut h = StructureGraph::with_vertices(vec![
            vec![0],
            vec![1],
            vec![1],
            vec![1],
            vec![1],
        ]);
        for v in 1..=4 {
            h.add_edge(0, v);
        }
        h.add_edge(1, 2);
        h.add_edge(2, 3);
        h.add_edge(3, 4);
        h.add_edge(4, 1);
        assert!(verify_circle_bounded(&h, 1).is_ok());
        assert_eq!(aut_order(&h).unwrap(), BigUint::from(8u32));
    }

    #[test]
    fn aut_component_swaps() {
        // two equal paths in one cell: each reverses, and they swap
        let h = single_layer(&[(0, 1), (1, 2), (3, 4), (4, 5)], 6);
        assert_eq!(aut_order(&h).unwrap(), BigUint::from(8u32));
    }

    #[test]
    fn iso_cases() {
        let c5 = single_layer(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], 5);
        let map = iso_circle_bounded(&c5, &c5).unwrap().unwrap();
        assert_eq!(map.len(), 5);

        let p5 = single_layer(&[(0, 1), (1, 2), (2, 3), (3, 4)], 5);
        assert!(iso_circle_bounded(&c5, &p5).unwrap().is_none());

        // relabeled two-layer graph is recovered
        let mut h1 = StructureGraph::with_vertices(vec![vec![0], vec![1], vec![1], vec![1]]);
        h1.add_edge(0, 1);
        h1.add_edge(1, 2);
        h1.add_edge(2, 3);
        let mut h2 = StructureGraph::with_vertices(vec![vec![1], vec![1], vec![1], vec![0]]);
        h2.add_edge(3, 2);
        h2.add_edge(2, 1);
        h2.add_edge(1, 0);
        let map = iso_circle_bounded(&h1, &h2).unwrap().unwrap();
        for v in 0..4 {
            assert_eq!(h1.color(v), h2.color(map[v]));
        }
    }
}
