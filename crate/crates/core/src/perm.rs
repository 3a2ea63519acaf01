//! Permutation groups represented by a base and strong generating set.
//!
//! Membership, order, orbits and pointwise stabilizers come from a
//! deterministic Schreier-Sims chain. Setwise stabilizers, set transporters
//! and hypergraph automorphism intersections are exact backtracking searches
//! over the chain with orbit-counting pruning: always correct, fast when the
//! ambient group is small or well-structured, which the pipeline's call sites
//! guarantee structurally.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::One;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};

/// A permutation of `0..m`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(m: usize) -> Perm {
        Perm {
            images: (0..m).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &x in &images {
            if x >= m || seen[x] {
                return Err(Error::precondition("not a bijection"));
            }
            seen[x] = true;
        }
        Ok(Perm { images })
    }

    /// Permutation from disjoint cycles over a domain of size `m`.
    pub fn from_cycles(m: usize, cycles: &[&[usize]]) -> Perm {
        let mut images: Vec<usize> = (0..m).collect();
        for cyc in cycles {
            for i in 0..cyc.len() {
                images[cyc[i]] = cyc[(i + 1) % cyc.len()];
            }
        }
        Perm::from_images(images).expect("cycles must be disjoint")
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Composition applying `self` first, then `next`.
    pub fn then(&self, next: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), next.degree());
        Perm {
            images: self.images.iter().map(|&x| next.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Perm { images }
    }

    pub fn min_moved(&self) -> Option<usize> {
        self.images.iter().enumerate().find(|&(i, &x)| i != x).map(|(i, _)| i)
    }

    pub fn apply_set(&self, s: &VertexSet) -> VertexSet {
        s.map(|v| self.images[v], self.degree())
    }

    /// Cycle notation, fixed points omitted; the identity prints as `()`.
    pub fn cycle_string(&self) -> String {
        let m = self.degree();
        let mut seen = vec![false; m];
        let mut out = String::new();
        for start in 0..m {
            if seen[start] || self.images[start] == start {
                continue;
            }
            out.push('(');
            let mut x = start;
            loop {
                seen[x] = true;
                out.push_str(&x.to_string());
                x = self.images[x];
                if x == start {
                    break;
                }
                out.push(' ');
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.cycle_string())
    }
}

struct Level {
    point: usize,
    /// orbit of `point` under the generators fixing all earlier base points,
    /// in BFS discovery order
    orbit: Vec<usize>,
    /// transversal element `u` with `u(point) = β` per orbit member β
    transversal: HashMap<usize, Perm>,
}

/// A permutation group with a base and strong generating set.
pub struct PermGroup {
    m: usize,
    base: Vec<usize>,
    /// generators of the stabilizer chain: `level_gens[i]` generates the
    /// subgroup fixing `base[..i]` pointwise
    level_gens: Vec<Vec<Perm>>,
    levels: Vec<Level>,
    /// orbit partition of the group fixing base[..i] pointwise, for
    /// i in 0..=base.len(); entry base.len() is the trivial partition
    stab_orbits: Vec<Vec<Vec<usize>>>,
}

fn orbit_partition(m: usize, gens: &[&Perm]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; m];
    let mut orbits = Vec::new();
    for s in 0..m {
        if seen[s] {
            continue;
        }
        let mut orbit = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for g in gens {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbits.push(orbit);
    }
    orbits
}

impl PermGroup {
    pub fn trivial(m: usize) -> PermGroup {
        schreier_sims(m, &[]).expect("trivial group")
    }

    pub fn symmetric(m: usize) -> PermGroup {
        let mut gens = Vec::new();
        if m >= 2 {
            gens.push(Perm::from_cycles(m, &[&[0, 1]]));
        }
        if m >= 3 {
            let cyc: Vec<usize> = (0..m).collect();
            gens.push(Perm::from_cycles(m, &[&cyc]));
        }
        schreier_sims(m, &gens).expect("symmetric group")
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn generators(&self) -> &[Perm] {
        self.level_gens.first().map_or(&[], Vec::as_slice)
    }

    /// Generators of the subgroup fixing the first `i` base points.
    pub fn level_generators(&self, i: usize) -> &[Perm] {
        self.level_gens.get(i).map_or(&[], Vec::as_slice)
    }

    pub fn order(&self) -> BigUint {
        let mut o = BigUint::one();
        for l in &self.levels {
            o *= BigUint::from(l.orbit.len());
        }
        o
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.iter().all(|l| l.orbit.len() == 1)
    }

    /// Sift `p` through the chain; `Ok` iff it reduces to the identity.
    pub fn contains(&self, p: &Perm) -> bool {
        self.sift(p).is_identity()
    }

    fn sift(&self, p: &Perm) -> Perm {
        let mut r = p.clone();
        for l in &self.levels {
            let beta = r.apply(l.point);
            match l.transversal.get(&beta) {
                Some(u) => r = r.then(&u.inverse()),
                None => return r,
            }
        }
        r
    }

    /// Orbits of the whole group on its domain.
    pub fn orbits(&self) -> Vec<VertexSet> {
        let gens: Vec<&Perm> = self.generators().iter().collect();
        orbit_partition(self.m, &gens)
            .into_iter()
            .map(|o| VertexSet::from_iter(self.m, o))
            .collect()
    }

    pub fn orbit_of(&self, x: usize) -> VertexSet {
        self.orbits()
            .into_iter()
            .find(|o| o.contains(x))
            .unwrap()
    }

    /// All group elements; `None` if the order exceeds `cap`.
    pub fn elements_capped(&self, cap: usize) -> Option<Vec<Perm>> {
        if self.order() > BigUint::from(cap) {
            return None;
        }
        let mut elems = vec![Perm::identity(self.m)];
        for l in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(elems.len() * l.orbit.len());
            for &beta in &l.orbit {
                let u = &l.transversal[&beta];
                for e in &elems {
                    next.push(e.then(u));
                }
            }
            elems = next;
        }
        Some(elems)
    }

    /// Deterministic pseudo-random element: product of transversal entries
    /// selected by `pick(level, orbit_len)`.
    pub fn element_by_choices(&self, mut pick: impl FnMut(usize, usize) -> usize) -> Perm {
        let mut p = Perm::identity(self.m);
        for (i, l) in self.levels.iter().enumerate().rev() {
            let beta = l.orbit[pick(i, l.orbit.len()) % l.orbit.len()];
            p = p.then(&l.transversal[&beta]);
        }
        p
    }
}

impl std::fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "PermGroup(degree={}, order={}, base={:?}, gens={:?})",
            self.m,
            self.order(),
            self.base,
            self.generators()
        )
    }
}

/// Deterministic Schreier-Sims construction.
pub fn schreier_sims(m: usize, gens: &[Perm]) -> Result<PermGroup> {
    schreier_sims_with_base(m, gens, &[])
}

/// Schreier-Sims with a prescribed initial base segment. The prescribed
/// points head the base in the given order (possibly with singleton orbits),
/// so the chain level after them is the pointwise stabilizer of the segment.
///
/// Levels are verified deepest-first; a failed strip adds the residue to the
/// levels it belongs to and resumes verification there, so work is
/// incremental in the number of strong generators.
pub fn schreier_sims_with_base(m: usize, gens: &[Perm], prescribed: &[usize]) -> Result<PermGroup> {
    for g in gens {
        if g.degree() != m {
            return Err(Error::DomainMismatch(g.degree(), m));
        }
    }
    let mut base: Vec<usize> = prescribed.to_vec();
    let mut level_gens: Vec<Vec<Perm>> = vec![Vec::new(); base.len()];
    let mut levels: Vec<Level> = base
        .iter()
        .map(|&point| Level {
            point,
            orbit: vec![point],
            transversal: HashMap::from([(point, Perm::identity(m))]),
        })
        .collect();

    fn recompute_level(m: usize, level: &mut Level, gens: &[Perm]) {
        let point = level.point;
        let mut orbit = vec![point];
        let mut transversal = HashMap::new();
        transversal.insert(point, Perm::identity(m));
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            for g in gens {
                let y = g.apply(x);
                if !transversal.contains_key(&y) {
                    let u = transversal[&x].then(g);
                    transversal.insert(y, u);
                    orbit.push(y);
                }
            }
            k += 1;
        }
        level.orbit = orbit;
        level.transversal = transversal;
    }

    // seed: each input generator joins every level it fixes the prefix of
    for g in gens {
        if g.is_identity() {
            continue;
        }
        let mut at = 0;
        while at < base.len() && g.apply(base[at]) == base[at] {
            at += 1;
        }
        if at == base.len() {
            let point = g.min_moved().unwrap();
            base.push(point);
            level_gens.push(Vec::new());
            levels.push(Level {
                point,
                orbit: vec![point],
                transversal: HashMap::from([(point, Perm::identity(m))]),
            });
        }
        // the generator fixes base[..at], so it acts at levels 0..=at
        for l in 0..=at {
            level_gens[l].push(g.clone());
        }
    }
    for l in 0..levels.len() {
        recompute_level(m, &mut levels[l], &level_gens[l]);
    }

    // verify levels deepest-first; on failure resume at the repaired level
    let mut i = levels.len() as isize - 1;
    'verify: while i >= 0 {
        let li = i as usize;
        let mut bi = 0;
        while bi < levels[li].orbit.len() {
            let beta = levels[li].orbit[bi];
            for gi in 0..level_gens[li].len() {
                let g = level_gens[li][gi].clone();
                let u_beta = levels[li].transversal[&beta].clone();
                let target = g.apply(beta);
                let u_target = levels[li].transversal[&target].clone();
                let mut r = u_beta.then(&g).then(&u_target.inverse());
                // strip from level li+1
                let mut stuck = levels.len();
                for l in li + 1..levels.len() {
                    let b = r.apply(levels[l].point);
                    match levels[l].transversal.get(&b) {
                        Some(u) => r = r.then(&u.inverse()),
                        None => {
                            stuck = l;
                            break;
                        }
                    }
                }
                if r.is_identity() {
                    continue;
                }
                let _ = stuck;
                // r lies in every level group whose base prefix it fixes
                let mut at = li + 1;
                while at < base.len() && r.apply(base[at]) == base[at] {
                    at += 1;
                }
                if at == base.len() {
                    let point = r.min_moved().expect("non-identity residue");
                    base.push(point);
                    level_gens.push(Vec::new());
                    levels.push(Level {
                        point,
                        orbit: vec![point],
                        transversal: HashMap::from([(point, Perm::identity(m))]),
                    });
                }
                for l in li + 1..=at {
                    level_gens[l].push(r.clone());
                    recompute_level(m, &mut levels[l], &level_gens[l]);
                }
                i = at as isize;
                continue 'verify;
            }
            bi += 1;
        }
        i -= 1;
    }

    let stab_orbits: Vec<Vec<Vec<usize>>> = (0..=base.len())
        .map(|i| {
            let fixing: Vec<&Perm> = level_gens
                .get(i)
                .map_or(Vec::new(), |gens| gens.iter().collect());
            orbit_partition(m, &fixing)
        })
        .collect();
    Ok(PermGroup {
        m,
        base,
        level_gens,
        levels,
        stab_orbits,
    })
}

/// Build a group from verified generators, asserting each has the expected
/// degree.
pub fn group_from_generators(m: usize, gens: Vec<Perm>) -> Result<PermGroup> {
    schreier_sims(m, &gens)
}

trait SearchTarget {
    /// Necessary condition per orbit of the remaining level group: with the
    /// fixed outer part `partial`, can some completion still satisfy the
    /// target on this orbit?
    fn orbit_feasible(&self, partial: &Perm, orbit: &[usize]) -> bool;
    /// Prune on a decided base-point image.
    fn point_feasible(&self, _point: usize, _image: usize) -> bool {
        true
    }
    fn leaf(&self, full: &Perm) -> bool;
}

struct SetTransport<'a> {
    a: &'a VertexSet,
    b: &'a VertexSet,
}

impl SearchTarget for SetTransport<'_> {
    fn orbit_feasible(&self, partial: &Perm, orbit: &[usize]) -> bool {
        let mut in_a = 0;
        let mut img_in_b = 0;
        for &x in orbit {
            if self.a.contains(x) {
                in_a += 1;
            }
            if self.b.contains(partial.apply(x)) {
                img_in_b += 1;
            }
        }
        in_a == img_in_b
    }

    fn point_feasible(&self, point: usize, image: usize) -> bool {
        self.a.contains(point) == self.b.contains(image)
    }

    fn leaf(&self, full: &Perm) -> bool {
        self.a.iter().all(|x| self.b.contains(full.apply(x)))
    }
}

struct HypergraphTarget<'a> {
    /// per color: the set of hyperedges of that color
    by_color: HashMap<u64, HashSet<VertexSet>>,
    edges: &'a [VertexSet],
    colors: &'a [u64],
    /// per point: sorted (color, edge size, multiplicity) incidence signature
    sigs: Vec<Vec<(u64, usize, usize)>>,
}

impl HypergraphTarget<'_> {
    fn new<'a>(m: usize, edges: &'a [VertexSet], colors: &'a [u64]) -> HypergraphTarget<'a> {
        let mut by_color: HashMap<u64, HashSet<VertexSet>> = HashMap::new();
        for (e, &c) in edges.iter().zip(colors) {
            by_color.entry(c).or_default().insert(e.clone());
        }
        let mut sigs = vec![HashMap::new(); m];
        for (e, &c) in edges.iter().zip(colors) {
            for v in e.iter() {
                *sigs[v].entry((c, e.len())).or_insert(0usize) += 1;
            }
        }
        let sigs = sigs
            .into_iter()
            .map(|h| {
                let mut v: Vec<(u64, usize, usize)> =
                    h.into_iter().map(|((c, s), k)| (c, s, k)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        HypergraphTarget {
            by_color,
            edges,
            colors,
            sigs,
        }
    }
}

impl SearchTarget for HypergraphTarget<'_> {
    fn orbit_feasible(&self, _partial: &Perm, _orbit: &[usize]) -> bool {
        true
    }

    fn point_feasible(&self, point: usize, image: usize) -> bool {
        self.sigs[point] == self.sigs[image]
    }

    fn leaf(&self, full: &Perm) -> bool {
        self.edges.iter().zip(self.colors).all(|(e, c)| {
            let img = full.apply_set(e);
            self.by_color[c].contains(&img)
        })
    }
}

/// Complete backtracking over the stabilizer chain of `ambient`. Finds one
/// element satisfying `target` and accepted by `extra`, or proves none exists.
fn coset_search(
    ambient: &PermGroup,
    target: &dyn SearchTarget,
    first_image_allowed: &dyn Fn(usize) -> bool,
    accept: &dyn Fn(&Perm) -> bool,
) -> Option<Perm> {
    fn dfs(
        g: &PermGroup,
        level: usize,
        partial: &Perm,
        target: &dyn SearchTarget,
        first_image_allowed: &dyn Fn(usize) -> bool,
        accept: &dyn Fn(&Perm) -> bool,
    ) -> Option<Perm> {
        for orbit in &g.stab_orbits[level] {
            if !target.orbit_feasible(partial, orbit) {
                return None;
            }
        }
        if level == g.levels.len() {
            if target.leaf(partial) && accept(partial) {
                return Some(partial.clone());
            }
            return None;
        }
        let l = &g.levels[level];
        for &beta in &l.orbit {
            let image = partial.apply(beta);
            if level == 0 && !first_image_allowed(image) {
                continue;
            }
            if !target.point_feasible(l.point, image) {
                continue;
            }
            let next = l.transversal[&beta].then(partial);
            if let Some(found) = dfs(g, level + 1, &next, target, first_image_allowed, accept) {
                return Some(found);
            }
        }
        None
    }
    dfs(
        ambient,
        0,
        &Perm::identity(ambient.m),
        target,
        first_image_allowed,
        accept,
    )
}

/// Grows the subgroup of `ambient` consisting of elements satisfying a
/// subgroup-closed target. Seeds with the ambient generators that already
/// satisfy it, then repeatedly searches for one element outside the known
/// subgroup, restricting the first base image to minima of known-subgroup
/// orbits.
fn subgroup_search(ambient: &PermGroup, target: &dyn SearchTarget) -> Result<PermGroup> {
    let m = ambient.m;
    let mut found: Vec<Perm> = ambient
        .generators()
        .iter()
        .filter(|g| target.leaf(g))
        .cloned()
        .collect();
    // the target is subgroup-closed: when every ambient generator already
    // satisfies it, the whole ambient group does
    if found.len() == ambient.generators().len() {
        return schreier_sims(m, &found);
    }
    let mut known = schreier_sims(m, &found)?;
    loop {
        let orbit_min: Vec<usize> = {
            let mut mins = vec![0; m];
            for o in known.orbits() {
                let mn = o.first().unwrap();
                for x in o.iter() {
                    mins[x] = mn;
                }
            }
            mins
        };
        let allowed = |image: usize| orbit_min[image] == image;
        let accept = |p: &Perm| !known.contains(p);
        match coset_search(ambient, target, &allowed, &accept) {
            Some(p) => {
                found.push(p);
                known = schreier_sims(m, &found)?;
            }
            None => return Ok(known),
        }
    }
}

/// The exact setwise stabilizer `{γ ∈ ambient | A^γ = A}`.
pub fn setwise_stabilizer(ambient: &PermGroup, a: &VertexSet) -> Result<PermGroup> {
    if a.domain() != ambient.m {
        return Err(Error::DomainMismatch(a.domain(), ambient.m));
    }
    let target = SetTransport { a, b: a };
    subgroup_search(ambient, &target)
}

/// One element of `ambient` mapping set `a` onto set `b`, if any exists.
pub fn set_transporter(ambient: &PermGroup, a: &VertexSet, b: &VertexSet) -> Option<Perm> {
    if a.len() != b.len() {
        return None;
    }
    // fast path: a generator already works
    for g in ambient.generators() {
        if a.iter().all(|x| b.contains(g.apply(x))) {
            return Some(g.clone());
        }
    }
    let target = SetTransport { a, b };
    coset_search(ambient, &target, &|_| true, &|_| true)
}

/// An edge-colored hypergraph over `0..domain`.
#[derive(Clone, Debug)]
pub struct Hypergraph {
    pub domain: usize,
    pub edges: Vec<VertexSet>,
    pub colors: Vec<u64>,
}

impl Hypergraph {
    pub fn new(domain: usize, edges: Vec<VertexSet>, colors: Vec<u64>) -> Hypergraph {
        assert_eq!(edges.len(), colors.len());
        for e in &edges {
            assert_eq!(e.domain(), domain);
        }
        Hypergraph {
            domain,
            edges,
            colors,
        }
    }
}

/// The subgroup of `ambient` preserving the hyperedge set of every color.
pub fn hypergraph_aut_intersect(h: &Hypergraph, ambient: &PermGroup) -> Result<PermGroup> {
    if h.domain != ambient.m {
        return Err(Error::DomainMismatch(h.domain, ambient.m));
    }
    let target = HypergraphTarget::new(h.domain, &h.edges, &h.colors);
    subgroup_search(ambient, &target)
}

/// Restriction of `group` to an invariant set `a`: the image group acting on
/// `a` (re-indexed ascending), the kernel (pointwise stabilizer of `a`), and
/// for each image generator one preimage in `group`.
pub struct Restriction {
    pub image: PermGroup,
    pub kernel: PermGroup,
    pub lifts: Vec<Perm>,
    /// ascending members of `a`: image point i corresponds to `points[i]`
    pub points: Vec<usize>,
}

pub fn restriction_kernel_image(group: &PermGroup, a: &VertexSet) -> Result<Restriction> {
    if a.domain() != group.m {
        return Err(Error::DomainMismatch(a.domain(), group.m));
    }
    for g in group.generators() {
        for x in a.iter() {
            if !a.contains(g.apply(x)) {
                return Err(Error::precondition(format!(
                    "set is not invariant: generator moves {x} outside"
                )));
            }
        }
    }
    let points: Vec<usize> = a.iter().collect();
    let index_of: HashMap<usize, usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut image_gens = Vec::new();
    let mut lifts = Vec::new();
    for g in group.generators() {
        let restricted =
            Perm::from_images(points.iter().map(|&p| index_of[&g.apply(p)]).collect())?;
        if !restricted.is_identity() {
            image_gens.push(restricted);
            lifts.push(g.clone());
        }
    }
    let image = schreier_sims(points.len(), &image_gens)?;
    // chain with the invariant set leading the base: the level after it is
    // exactly the pointwise stabilizer
    let chained = schreier_sims_with_base(group.m, group.generators(), &points)?;
    let kernel_gens: Vec<Perm> = chained.level_generators(points.len()).to_vec();
    let kernel = schreier_sims(group.m, &kernel_gens)?;
    debug_assert_eq!(image.order() * kernel.order(), group.order());
    Ok(Restriction {
        image,
        kernel,
        lifts,
        points,
    })
}

/// Direct product of groups embedded at the given domain offsets.
pub fn direct_product(total: usize, factors: &[(PermGroup, usize)]) -> Result<PermGroup> {
    let mut used = VertexSet::new(total);
    let mut gens = Vec::new();
    for (g, off) in factors {
        if off + g.m > total {
            return Err(Error::precondition("factor exceeds product domain"));
        }
        for x in 0..g.m {
            if used.contains(off + x) {
                return Err(Error::precondition("factor domains overlap"));
            }
            used.insert(off + x);
        }
        for gen in g.generators() {
            let mut images: Vec<usize> = (0..total).collect();
            for x in 0..g.m {
                images[off + x] = off + gen.apply(x);
            }
            gens.push(Perm::from_images(images)?);
        }
    }
    schreier_sims(total, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s4() -> PermGroup {
        schreier_sims(
            4,
            &[
                Perm::from_cycles(4, &[&[0, 1]]),
                Perm::from_cycles(4, &[&[0, 1, 2, 3]]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn schreier_sims_orders() {
        assert_eq!(schreier_sims(3, &[]).unwrap().order(), BigUint::from(1u32));
        assert_eq!(s4().order(), BigUint::from(24u32));
        let c5 = schreier_sims(5, &[Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        assert_eq!(c5.order(), BigUint::from(5u32));
    }

    #[test]
    fn s4_elements_and_membership() {
        let g = s4();
        let elems = g.elements_capped(100).unwrap();
        assert_eq!(elems.len(), 24);
        let distinct: HashSet<Perm> = elems.iter().cloned().collect();
        assert_eq!(distinct.len(), 24);
        for e in &elems {
            assert!(g.contains(e));
        }
    }

    #[test]
    fn membership_rejects_non_members() {
        let c5 = schreier_sims(5, &[Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        assert!(!c5.contains(&Perm::from_cycles(5, &[&[0, 1]])));
        assert!(c5.contains(&Perm::from_cycles(5, &[&[0, 2, 4, 1, 3]])));
    }

    #[test]
    fn orbit_structure() {
        let triv = PermGroup::trivial(3);
        assert_eq!(triv.orbits().len(), 3);
        let g = schreier_sims(4, &[Perm::from_cycles(4, &[&[0, 1, 2]])]).unwrap();
        let orbits = g.orbits();
        assert_eq!(orbits.len(), 2);
        assert_eq!(orbits[0].len(), 3);
        assert!(orbits[1].contains(3));
        assert_eq!(s4().orbits().len(), 1);
    }

    fn filter_stabilizer(g: &PermGroup, a: &VertexSet) -> usize {
        g.elements_capped(100_000)
            .unwrap()
            .into_iter()
            .filter(|p| p.apply_set(a) == *a)
            .count()
    }

    #[test]
    fn setwise_stabilizer_examples() {
        let g = s4();
        let empty = VertexSet::new(4);
        assert_eq!(setwise_stabilizer(&g, &empty).unwrap().order(), g.order());
        let full = VertexSet::full(4);
        assert_eq!(setwise_stabilizer(&g, &full).unwrap().order(), g.order());

        let a = VertexSet::from_iter(4, [0, 1]);
        let stab = setwise_stabilizer(&g, &a).unwrap();
        assert_eq!(stab.order(), BigUint::from(4u32));
        assert_eq!(filter_stabilizer(&g, &a), 4);
        for p in stab.elements_capped(100).unwrap() {
            assert_eq!(p.apply_set(&a), a);
        }

        let c5 = schreier_sims(5, &[Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        let a = VertexSet::from_iter(5, [0, 2]);
        assert!(setwise_stabilizer(&c5, &a).unwrap().is_trivial());
    }

    #[test]
    fn setwise_stabilizer_matches_filter_random() {
        // dihedral group of an 8-cycle
        let rot = Perm::from_cycles(8, &[&[0, 1, 2, 3, 4, 5, 6, 7]]);
        let refl = Perm::from_images(vec![0, 7, 6, 5, 4, 3, 2, 1]).unwrap();
        let d8 = schreier_sims(8, &[rot, refl]).unwrap();
        for bits in [0b1010_1010u32, 0b1100_0011, 0b0001_0111, 0b1111_0000] {
            let a = VertexSet::from_iter(8, (0..8).filter(|i| bits >> i & 1 == 1));
            let stab = setwise_stabilizer(&d8, &a).unwrap();
            assert_eq!(
                stab.order(),
                BigUint::from(filter_stabilizer(&d8, &a)),
                "bits={bits:b}"
            );
        }
    }

    #[test]
    fn transporter_finds_and_refutes() {
        let rot = Perm::from_cycles(6, &[&[0, 1, 2, 3, 4, 5]]);
        let c6 = schreier_sims(6, &[rot]).unwrap();
        let a = VertexSet::from_iter(6, [0, 1]);
        let b = VertexSet::from_iter(6, [3, 4]);
        let t = set_transporter(&c6, &a, &b).unwrap();
        assert_eq!(t.apply_set(&a), b);
        let c = VertexSet::from_iter(6, [0, 3]);
        assert!(set_transporter(&c6, &a, &c).is_none());
    }

    #[test]
    fn hypergraph_intersect_examples() {
        let s3 = schreier_sims(
            3,
            &[Perm::from_cycles(3, &[&[0, 1]]), Perm::from_cycles(3, &[&[0, 1, 2]])],
        )
        .unwrap();
        // all singletons, one color: no constraint
        let h = Hypergraph::new(
            3,
            (0..3).map(|v| VertexSet::from_iter(3, [v])).collect(),
            vec![0, 0, 0],
        );
        assert_eq!(hypergraph_aut_intersect(&h, &s3).unwrap().order(), s3.order());

        let h = Hypergraph::new(3, vec![VertexSet::from_iter(3, [0, 1])], vec![0]);
        assert_eq!(
            hypergraph_aut_intersect(&h, &s3).unwrap().order(),
            BigUint::from(2u32)
        );

        let g = s4();
        let h = Hypergraph::new(
            4,
            vec![VertexSet::from_iter(4, [0, 1]), VertexSet::from_iter(4, [2, 3])],
            vec![0, 0],
        );
        assert_eq!(
            hypergraph_aut_intersect(&h, &g).unwrap().order(),
            BigUint::from(8u32)
        );
        // distinct colors forbid swapping the two edges
        let h = Hypergraph::new(
            4,
            vec![VertexSet::from_iter(4, [0, 1]), VertexSet::from_iter(4, [2, 3])],
            vec![0, 1],
        );
        assert_eq!(
            hypergraph_aut_intersect(&h, &g).unwrap().order(),
            BigUint::from(4u32)
        );
    }

    #[test]
    fn restriction_examples() {
        let g = s4();
        let r = restriction_kernel_image(&g, &VertexSet::full(4)).unwrap();
        assert_eq!(r.image.order(), g.order());
        assert!(r.kernel.is_trivial());

        // S2 x S2 on {0,1} u {2,3}
        let g = schreier_sims(
            4,
            &[Perm::from_cycles(4, &[&[0, 1]]), Perm::from_cycles(4, &[&[2, 3]])],
        )
        .unwrap();
        let r = restriction_kernel_image(&g, &VertexSet::from_iter(4, [0, 1])).unwrap();
        assert_eq!(r.image.order(), BigUint::from(2u32));
        assert_eq!(r.kernel.order(), BigUint::from(2u32));
        for (img, lift) in r.image.generators().iter().zip(&r.lifts) {
            for (i, &p) in r.points.iter().enumerate() {
                assert_eq!(r.points[img.apply(i)], lift.apply(p));
            }
        }

        let t = PermGroup::trivial(4);
        let r = restriction_kernel_image(&t, &VertexSet::from_iter(4, [1, 2])).unwrap();
        assert!(r.image.is_trivial() && r.kernel.is_trivial());

        let g = schreier_sims(3, &[Perm::from_cycles(3, &[&[0, 1, 2]])]).unwrap();
        assert!(restriction_kernel_image(&g, &VertexSet::from_iter(3, [0])).is_err());
    }

    #[test]
    fn direct_product_orders() {
        let s2 = schreier_sims(2, &[Perm::from_cycles(2, &[&[0, 1]])]).unwrap();
        let p = direct_product(4, &[(s2, 0), (schreier_sims(2, &[Perm::from_cycles(2, &[&[0, 1]])]).unwrap(), 2)])
            .unwrap();
        assert_eq!(p.order(), BigUint::from(4u32));
        assert_eq!(direct_product(5, &[]).unwrap().order(), BigUint::from(1u32));
    }

    #[test]
    fn direct_product_of_solvable_factors() {
        // cyclic and dihedral factors at staggered offsets
        let mut factors = Vec::new();
        let mut off = 0;
        let mut expected = BigUint::one();
        for k in [3usize, 4, 5] {
            let cyc: Vec<usize> = (0..k).collect();
            let rot = Perm::from_cycles(k, &[&cyc]);
            let refl = Perm::from_images((0..k).map(|i| (k - i) % k).collect()).unwrap();
            let d = schreier_sims(k, &[rot, refl]).unwrap();
            expected *= d.order();
            factors.push((d, off));
            off += k;
        }
        let p = direct_product(off, &factors).unwrap();
        assert_eq!(p.order(), expected);
    }

    #[test]
    fn generators_sift_and_products_are_members() {
        let rot = Perm::from_cycles(7, &[&[0, 1, 2, 3, 4, 5, 6]]);
        let refl = Perm::from_images((0..7).map(|i| (7 - i) % 7).collect()).unwrap();
        let d7 = schreier_sims(7, &[rot.clone(), refl.clone()]).unwrap();
        assert_eq!(d7.order(), BigUint::from(14u32));
        let mut p = Perm::identity(7);
        for i in 0..5 {
            p = if i % 2 == 0 { p.then(&rot) } else { p.then(&refl) };
            assert!(d7.contains(&p));
        }
    }
}
