//! Dense bitsets over a fixed vertex domain `0..n`.
//!
//! Set intersections against adjacency rows dominate the whole pipeline, so
//! the representation is a plain `Vec<u64>` with the tail bits kept zero.

const BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    blocks: Vec<u64>,
    domain: usize,
}

impl VertexSet {
    pub fn new(domain: usize) -> Self {
        VertexSet {
            blocks: vec![0; domain.div_ceil(BITS)],
            domain,
        }
    }

    pub fn full(domain: usize) -> Self {
        let mut s = Self::new(domain);
        for v in 0..domain {
            s.insert(v);
        }
        s
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(domain: usize, iter: I) -> Self {
        let mut s = Self::new(domain);
        for v in iter {
            s.insert(v);
        }
        s
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn insert(&mut self, v: usize) {
        debug_assert!(v < self.domain);
        self.blocks[v / BITS] |= 1u64 << (v % BITS);
    }

    pub fn remove(&mut self, v: usize) {
        debug_assert!(v < self.domain);
        self.blocks[v / BITS] &= !(1u64 << (v % BITS));
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.domain && self.blocks[v / BITS] >> (v % BITS) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn clear(&mut self) {
        self.blocks.fill(0);
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.domain, other.domain);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.domain, other.domain);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.domain, other.domain);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        debug_assert_eq!(self.domain, other.domain);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        debug_assert_eq!(self.domain, other.domain);
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        debug_assert_eq!(self.domain, other.domain);
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & b == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            set: self,
            block: 0,
            bits: self.blocks.first().copied().unwrap_or(0),
        }
    }

    /// Image of this set under a vertex map into a domain of size `m`.
    pub fn map(&self, f: impl Fn(usize) -> usize, m: usize) -> VertexSet {
        VertexSet::from_iter(m, self.iter().map(f))
    }
}

pub struct Iter<'a> {
    set: &'a VertexSet,
    block: usize,
    bits: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.bits == 0 {
            self.block += 1;
            if self.block >= self.set.blocks.len() {
                return None;
            }
            self.bits = self.set.blocks[self.block];
        }
        let tz = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(self.block * BITS + tz)
    }
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for VertexSet {
    /// Collect into a set whose domain is one past the largest element.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let items: Vec<usize> = iter.into_iter().collect();
        let domain = items.iter().max().map_or(0, |&m| m + 1);
        VertexSet::from_iter(domain, items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut s = VertexSet::new(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.len(), 3);
        assert!(s.contains(64));
        assert!(!s.contains(63));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        s.remove(64);
        assert_eq!(s.len(), 2);
        assert_eq!(s.first(), Some(0));
    }

    #[test]
    fn set_algebra() {
        let a = VertexSet::from_iter(70, [1, 3, 5, 65]);
        let b = VertexSet::from_iter(70, [3, 65, 66]);
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![3, 65]);
        assert_eq!(a.intersection_len(&b), 2);
        assert_eq!(a.union(&b).len(), 5);
        assert_eq!(a.difference(&b).iter().collect::<Vec<_>>(), vec![1, 5]);
        assert!(VertexSet::from_iter(70, [3]).is_subset(&b));
        assert!(!a.is_subset(&b));
        assert!(a.is_disjoint(&VertexSet::from_iter(70, [0, 2])));
    }
}
