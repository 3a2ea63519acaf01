//! Exact-rational realizations: point sets in the plane whose intersection
//! graph under the maximum metric (threshold one) is the graph under study.
//!
//! The decision pipeline never reads a realization. Everything here exists to
//! generate instances and to power geometric test oracles, with exact
//! arithmetic so that "distance exactly one" is a reliable edge.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::VertexSet;
use crate::cliques::{build_gm, maximal_cliques, CliqueGraph};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub points: Vec<(Rational, Rational)>,
}

impl Realization {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn linf(&self, u: usize, v: usize) -> Rational {
        let dx = (&self.points[u].0 - &self.points[v].0).abs();
        let dy = (&self.points[u].1 - &self.points[v].1).abs();
        if dx >= dy {
            dx
        } else {
            dy
        }
    }

    pub fn translated(&self, dx: &Rational, dy: &Rational) -> Realization {
        Realization {
            points: self
                .points
                .iter()
                .map(|(x, y)| (x + dx, y + dy))
                .collect(),
        }
    }

    /// Restriction to a vertex subset, in ascending vertex order.
    pub fn restricted(&self, s: &VertexSet) -> Realization {
        Realization {
            points: s.iter().map(|v| self.points[v].clone()).collect(),
        }
    }
}

/// Edge between distinct points exactly when their maximum-metric distance is
/// at most one. The result is uncolored.
pub fn intersection_graph(f: &Realization) -> Graph {
    let n = f.len();
    let one = Rational::one();
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if f.linf(u, v) <= one {
                b.add_edge(u, v);
            }
        }
    }
    b.build()
}

/// `n` points sampled uniformly on the grid of step 1/64 inside
/// `[0, box] x [0, box]`; deterministic for a fixed seed.
pub fn random_usq_graph(n: usize, bounding: &Rational, seed: u64) -> Result<(Graph, Realization)> {
    if n == 0 {
        return Err(Error::precondition("need at least one point"));
    }
    if bounding <= &Rational::zero() {
        return Err(Error::precondition("box must be positive"));
    }
    let steps = (bounding * BigInt::from(64)).floor().to_integer();
    let steps: u64 = steps
        .try_into()
        .map_err(|_| Error::precondition("box too large"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let kx = rng.gen_range(0..=steps);
        let ky = rng.gen_range(0..=steps);
        points.push((ratio(kx as i64, 64), ratio(ky as i64, 64)));
    }
    let f = Realization { points };
    Ok((intersection_graph(&f), f))
}

/// True iff every point lies in the square `[-1, 1] x [-1, 1]`.
pub fn is_neighborhood_realization(f: &Realization) -> bool {
    let one = Rational::one();
    f.points
        .iter()
        .all(|(x, y)| x.abs() <= one && y.abs() <= one)
}

/// Closed axis-parallel rectangle of all points within max-distance 1/2 of
/// every member of a clique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueCenter {
    pub x_lo: Rational,
    pub x_hi: Rational,
    pub y_lo: Rational,
    pub y_hi: Rational,
}

impl CliqueCenter {
    pub fn is_empty(&self) -> bool {
        self.x_lo > self.x_hi || self.y_lo > self.y_hi
    }

    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        &self.x_lo <= x && x <= &self.x_hi && &self.y_lo <= y && y <= &self.y_hi
    }

    pub fn intersects(&self, other: &CliqueCenter) -> bool {
        !(self.x_hi < other.x_lo
            || other.x_hi < self.x_lo
            || self.y_hi < other.y_lo
            || other.y_hi < self.y_lo)
    }
}

/// `[max_x - 1/2, min_x + 1/2] x [max_y - 1/2, min_y + 1/2]` over the clique
/// members. Errors when `c` is not a clique of the intersection graph.
pub fn clique_center(f: &Realization, c: &VertexSet) -> Result<CliqueCenter> {
    if c.is_empty() {
        return Err(Error::precondition("empty clique has no center"));
    }
    let one = Rational::one();
    let members: Vec<usize> = c.iter().collect();
    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            if f.linf(u, v) > one {
                return Err(Error::precondition(format!(
                    "vertices {u} and {v} are not adjacent"
                )));
            }
        }
    }
    let half = ratio(1, 2);
    let xs: Vec<&Rational> = members.iter().map(|&v| &f.points[v].0).collect();
    let ys: Vec<&Rational> = members.iter().map(|&v| &f.points[v].1).collect();
    let min = |vals: &[&Rational]| vals.iter().min().unwrap().to_owned().clone();
    let max = |vals: &[&Rational]| vals.iter().max().unwrap().to_owned().clone();
    Ok(CliqueCenter {
        x_lo: max(&xs) - &half,
        x_hi: min(&xs) + &half,
        y_lo: max(&ys) - &half,
        y_hi: min(&ys) + &half,
    })
}

/// A consecutive order of the maximal cliques (each vertex's cliques form a
/// contiguous run), found by backtracking. Intended for small interval
/// graphs; this is not a recognizer.
pub fn consecutive_clique_order(g: &Graph) -> Option<Vec<VertexSet>> {
    let cliques = maximal_cliques(g);
    let m = cliques.len();
    let mut order: Vec<usize> = Vec::with_capacity(m);
    let mut used = vec![false; m];
    fn feasible(g: &Graph, cliques: &[VertexSet], order: &[usize]) -> bool {
        for v in 0..g.n() {
            let total = cliques.iter().filter(|c| c.contains(v)).count();
            let mut run_end: Option<usize> = None;
            let mut run_start: Option<usize> = None;
            let mut placed = 0;
            for (pos, &ci) in order.iter().enumerate() {
                if cliques[ci].contains(v) {
                    placed += 1;
                    if run_start.is_none() {
                        run_start = Some(pos);
                    } else if run_end != Some(pos - 1) {
                        return false;
                    }
                    run_end = Some(pos);
                }
            }
            if placed > 0 && placed < total && run_end != Some(order.len() - 1) {
                return false;
            }
        }
        true
    }
    fn rec(
        g: &Graph,
        cliques: &[VertexSet],
        order: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if order.len() == cliques.len() {
            return true;
        }
        for ci in 0..cliques.len() {
            if used[ci] {
                continue;
            }
            order.push(ci);
            used[ci] = true;
            if feasible(g, cliques, order) && rec(g, cliques, order, used) {
                return true;
            }
            order.pop();
            used[ci] = false;
        }
        false
    }
    if rec(g, &cliques, &mut order, &mut used) {
        Some(order.into_iter().map(|ci| cliques[ci].clone()).collect())
    } else {
        None
    }
}

/// Encode an interval graph as a unit square graph: the vertex-clique graph
/// together with the diagonal realization `f(C_i) = (i/k - 1, i/k)`,
/// `f(v) = (a_v/k, b_v/k - 1)` over a consecutive clique order.
pub fn interval_to_usq(g: &Graph, clique_order: &[VertexSet]) -> Result<(Graph, Realization)> {
    let mut expected = maximal_cliques(g);
    expected.sort();
    let mut given: Vec<VertexSet> = clique_order.to_vec();
    given.sort();
    if expected != given {
        return Err(Error::precondition(
            "clique order must list exactly the maximal cliques",
        ));
    }
    let k = clique_order.len() as i64;
    // each vertex must appear in consecutive cliques
    let mut spans = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let positions: Vec<i64> = clique_order
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(v))
            .map(|(i, _)| i as i64 + 1)
            .collect();
        if positions.is_empty() {
            return Err(Error::precondition(format!("vertex {v} lies in no clique")));
        }
        let (a, b) = (positions[0], *positions.last().unwrap());
        if positions.len() as i64 != b - a + 1 {
            return Err(Error::precondition(format!(
                "vertex {v} appears in non-consecutive cliques"
            )));
        }
        spans.push((a, b));
    }
    let CliqueGraph { graph: gm, cliques } = build_gm(g);
    // realization indexed like the vertex-clique graph: vertices first, then
    // cliques in build order
    let mut points = vec![(Rational::zero(), Rational::zero()); gm.n()];
    for (v, &(a, b)) in spans.iter().enumerate() {
        points[v] = (ratio(a, k), ratio(b, k) - Rational::one());
    }
    for (order_pos, c) in clique_order.iter().enumerate() {
        let gm_idx = cliques
            .iter()
            .position(|d| d == c)
            .expect("clique sets verified equal");
        let i = order_pos as i64 + 1;
        points[g.n() + gm_idx] = (ratio(i, k) - Rational::one(), ratio(i, k));
    }
    let f = Realization { points };
    let check = intersection_graph(&f);
    for u in 0..gm.n() {
        for v in u + 1..gm.n() {
            if check.has_edge(u, v) != gm.has_edge(u, v) {
                return Err(Error::diagnosed(
                    "interval-encode-check",
                    format!("edge mismatch at ({u},{v})"),
                ));
            }
        }
    }
    Ok((gm, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pca::patterns;

    fn pts(coords: &[(i64, i64, i64, i64)]) -> Realization {
        Realization {
            points: coords
                .iter()
                .map(|&(xn, xd, yn, yd)| (ratio(xn, xd), ratio(yn, yd)))
                .collect(),
        }
    }

    #[test]
    fn boundary_distance_is_an_edge() {
        let f = pts(&[(0, 1, 0, 1), (1, 1, 1, 1)]);
        assert_eq!(intersection_graph(&f).edge_count(), 1);
    }

    #[test]
    fn coincident_points_form_clique() {
        let f = pts(&[(0, 1, 0, 1), (0, 1, 0, 1), (0, 1, 0, 1)]);
        assert_eq!(intersection_graph(&f).edge_count(), 3);
    }

    #[test]
    fn cross_makes_star() {
        let f = pts(&[(0, 1, 0, 1), (1, 1, 1, 1), (1, 1, -1, 1), (-1, 1, 1, 1), (-1, 1, -1, 1)]);
        let g = intersection_graph(&f);
        assert_eq!(g.degree(0), 4);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn generator_is_deterministic() {
        let b = ratio(4, 1);
        let (g1, f1) = random_usq_graph(30, &b, 7).unwrap();
        let (g2, f2) = random_usq_graph(30, &b, 7).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(f1, f2);
        assert_eq!(random_usq_graph(1, &b, 0).unwrap().0.n(), 1);
        assert!(random_usq_graph(0, &b, 0).is_err());
    }

    #[test]
    fn generated_graphs_avoid_big_stars() {
        for seed in 0..10 {
            let (g, _) = random_usq_graph(50, &ratio(4, 1), seed).unwrap();
            assert!(
                crate::pca::find_induced(&g, &patterns::k15()).is_none(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn neighborhood_realization_window() {
        assert!(is_neighborhood_realization(&pts(&[(0, 1, 0, 1), (1, 1, 1, 1)])));
        assert!(!is_neighborhood_realization(&pts(&[(2, 1, 0, 1)])));
        let f = pts(&[(0, 1, 0, 1)]);
        assert!(!is_neighborhood_realization(&f.translated(&ratio(5, 1), &ratio(5, 1))));
    }

    #[test]
    fn centers() {
        let f = pts(&[(0, 1, 0, 1)]);
        let c = clique_center(&f, &VertexSet::from_iter(1, [0])).unwrap();
        assert_eq!(c.x_lo, ratio(-1, 2));
        assert_eq!(c.x_hi, ratio(1, 2));

        let f = pts(&[(0, 1, 0, 1), (1, 1, 0, 1)]);
        let c = clique_center(&f, &VertexSet::from_iter(2, [0, 1])).unwrap();
        assert_eq!(c.x_lo, c.x_hi);
        assert_eq!(c.x_lo, ratio(1, 2));
        assert!(!c.is_empty());

        // non-adjacent pair is rejected
        let f = pts(&[(0, 1, 0, 1), (3, 1, 0, 1)]);
        assert!(clique_center(&f, &VertexSet::from_iter(2, [0, 1])).is_err());
    }

    #[test]
    fn distinct_maximal_clique_centers_are_disjoint() {
        for seed in 0..15 {
            let (g, f) = random_usq_graph(25, &ratio(3, 1), seed).unwrap();
            let cliques = maximal_cliques(&g);
            let centers: Vec<CliqueCenter> = cliques
                .iter()
                .map(|c| clique_center(&f, c).unwrap())
                .collect();
            for (i, a) in centers.iter().enumerate() {
                assert!(!a.is_empty());
                for b in centers.iter().skip(i + 1) {
                    assert!(!a.intersects(b), "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn interval_encoding_single_clique() {
        let k2 = Graph::complete(2);
        let order = consecutive_clique_order(&k2).unwrap();
        let (gm, f) = interval_to_usq(&k2, &order).unwrap();
        assert_eq!(gm.n(), 3);
        assert_eq!(gm.edge_count(), 3);
        // clique sits at (0, 1), both vertices at (1, 0)
        assert_eq!(f.points[2], (ratio(0, 1), ratio(1, 1)));
        assert_eq!(f.points[0], (ratio(1, 1), ratio(0, 1)));
        assert_eq!(f.points[1], (ratio(1, 1), ratio(0, 1)));
    }

    #[test]
    fn interval_encoding_path() {
        let p3 = Graph::path(3);
        let order = consecutive_clique_order(&p3).unwrap();
        let (gm, f) = interval_to_usq(&p3, &order).unwrap();
        assert_eq!(gm.n(), 5);
        let check = intersection_graph(&f);
        assert_eq!(check.edges(), gm.edges());
    }

    #[test]
    fn interval_encoding_k1() {
        let k1 = Graph::empty(1);
        let order = consecutive_clique_order(&k1).unwrap();
        let (gm, _) = interval_to_usq(&k1, &order).unwrap();
        assert_eq!(gm.n(), 2);
        assert_eq!(gm.edge_count(), 1);
    }

    #[test]
    fn interval_encoding_rejects_bad_order() {
        // C4 is not an interval graph: no consecutive order exists
        assert!(consecutive_clique_order(&Graph::cycle(4)).is_none());
        // wrong clique list is rejected
        let p3 = Graph::path(3);
        assert!(interval_to_usq(&p3, &[VertexSet::from_iter(3, [0, 1])]).is_err());
    }
}
