//! Equivalence relations over `0..n`, stored as partitions.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn into_partition(mut self) -> Partition {
        let n = self.parent.len();
        let roots: Vec<usize> = (0..n).map(|i| self.find(i)).collect();
        Partition::from_labels(&roots)
    }
}

/// A partition of `0..n` in canonical form: blocks are sorted internally and
/// ordered by their least element, so equal relations compare equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Every element alone.
    pub fn discrete(n: usize) -> Self {
        Partition {
            block_of: (0..n).collect(),
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// A single block holding everything.
    pub fn total(n: usize) -> Self {
        if n == 0 {
            return Partition::discrete(0);
        }
        Partition {
            block_of: vec![0; n],
            blocks: vec![(0..n).collect()],
        }
    }

    /// Elements with equal labels share a block.
    pub fn from_labels<K: Hash + Eq>(labels: &[K]) -> Self {
        let mut ids: HashMap<&K, usize> = HashMap::new();
        let mut block_of = Vec::with_capacity(labels.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, label) in labels.iter().enumerate() {
            let next = blocks.len();
            let b = *ids.entry(label).or_insert(next);
            if b == next {
                blocks.push(Vec::new());
            }
            blocks[b].push(i);
            block_of.push(b);
        }
        Partition { block_of, blocks }
    }

    /// Equivalence closure of the given pairs.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut uf = UnionFind::new(n);
        for (a, b) in pairs {
            uf.union(a, b);
        }
        uf.into_partition()
    }

    /// Blocks must be disjoint and cover `0..n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in block {
                if x >= n {
                    return Err(Error::InvalidPartition(format!("element {x} out of range")));
                }
                if labels[x] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "element {x} in two blocks"
                    )));
                }
                labels[x] = b;
            }
        }
        if let Some(missing) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "element {missing} is in no block"
            )));
        }
        Ok(Partition::from_labels(&labels))
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_index(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn block_of(&self, x: usize) -> &[usize] {
        &self.blocks[self.block_of[x]]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    /// Restriction to `keep`, renumbered by position in `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Partition {
        let labels: Vec<usize> = keep.iter().map(|&x| self.block_of[x]).collect();
        Partition::from_labels(&labels)
    }

    /// Side-by-side union; elements of `other` are shifted by `self.len()`.
    pub fn disjoint_union(&self, other: &Partition) -> Partition {
        let offset = self.num_blocks();
        let labels: Vec<usize> = self
            .block_of
            .iter()
            .copied()
            .chain(other.block_of.iter().map(|b| b + offset))
            .collect();
        Partition::from_labels(&labels)
    }

    pub fn to_relation(&self) -> Relation {
        let mut rel = Relation::empty(self.len());
        for block in &self.blocks {
            for &a in block {
                for &b in block {
                    rel.insert(a, b);
                }
            }
        }
        rel
    }
}

/// An arbitrary binary relation on `0..n` as a dense bit matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

/// How a relation fails to be an equivalence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EquivalenceDefect {
    NotReflexive(usize),
    NotSymmetric(usize, usize),
    NotTransitive(usize, usize, usize),
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            n,
            bits: vec![false; n * n],
        }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut rel = Relation::empty(n);
        for (a, b) in pairs {
            rel.insert(a, b);
        }
        rel
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.n + b]
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.bits[a * self.n + b] = true;
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| {
            (0..self.n)
                .filter(move |&b| self.contains(a, b))
                .map(move |b| (a, b))
        })
    }

    /// Every reflexivity, symmetry and transitivity failure.
    pub fn equivalence_defects(&self) -> Vec<EquivalenceDefect> {
        let n = self.n;
        let mut out = Vec::new();
        for a in 0..n {
            if !self.contains(a, a) {
                out.push(EquivalenceDefect::NotReflexive(a));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if self.contains(a, b) && !self.contains(b, a) {
                    out.push(EquivalenceDefect::NotSymmetric(a, b));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !self.contains(a, b) {
                    continue;
                }
                for c in 0..n {
                    if self.contains(b, c) && !self.contains(a, c) {
                        out.push(EquivalenceDefect::NotTransitive(a, b, c));
                    }
                }
            }
        }
        out
    }

    pub fn to_partition(&self) -> Option<Partition> {
        if self.equivalence_defects().is_empty() {
            Some(Partition::from_pairs(self.n, self.pairs()))
        } else {
            None
        }
    }
}

/// Checks that `related` is an equivalence on `0..n` and returns the partition.
///
/// On failure returns a pair that the equivalence closure relates but
/// `related` does not. Runs in time linear in the size of the closure blocks,
/// so it suits large product models where the cubic defect scan does not.
pub fn equivalence_partition(
    n: usize,
    mut related: impl FnMut(usize, usize) -> bool,
    candidates: impl IntoIterator<Item = (usize, usize)>,
) -> std::result::Result<Partition, (usize, usize)> {
    let mut uf = UnionFind::new(n);
    for (a, b) in candidates {
        if related(a, b) {
            uf.union(a, b);
        }
    }
    let partition = uf.into_partition();
    for block in partition.blocks() {
        for &a in block {
            for &b in block {
                if !related(a, b) {
                    return Err((a, b));
                }
            }
        }
    }
    Ok(partition)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let a = Partition::from_labels(&["x", "y", "x", "z"]);
        let b = Partition::from_blocks(4, &[vec![3], vec![2, 0], vec![1]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.blocks(), &[vec![0, 2], vec![1], vec![3]]);
    }

    #[test]
    fn closure_of_chain() {
        let p = Partition::from_pairs(3, [(0, 1), (1, 2)]);
        assert_eq!(p, Partition::total(3));
        assert_eq!(Partition::from_pairs(2, []), Partition::discrete(2));
    }

    #[test]
    fn bad_blocks_rejected() {
        assert!(Partition::from_blocks(2, &[vec![0]]).is_err());
        assert!(Partition::from_blocks(2, &[vec![0, 1], vec![1]]).is_err());
        assert!(Partition::from_blocks(2, &[vec![0, 5]]).is_err());
    }

    #[test]
    fn restrict_and_union() {
        let p = Partition::from_blocks(4, &[vec![0, 3], vec![1, 2]]).unwrap();
        assert_eq!(p.restrict(&[3, 1, 0]).blocks(), &[vec![0, 2], vec![1]]);
        let u = p.disjoint_union(&Partition::total(2));
        assert_eq!(u.blocks(), &[vec![0, 3], vec![1, 2], vec![4, 5]]);
    }

    #[test]
    fn defects_found() {
        let rel = Relation::from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 1)]);
        let defects = rel.equivalence_defects();
        assert!(defects.contains(&EquivalenceDefect::NotTransitive(0, 1, 2)));
        assert!(rel.to_partition().is_none());
        let ok = Partition::total(3).to_relation();
        assert!(ok.equivalence_defects().is_empty());
        assert_eq!(ok.to_partition(), Some(Partition::total(3)));
        let half = Relation::from_pairs(2, [(0, 0), (1, 1), (0, 1)]);
        assert_eq!(
            half.equivalence_defects(),
            vec![EquivalenceDefect::NotSymmetric(0, 1)]
        );
    }

    #[test]
    fn fast_check_matches_definition() {
        let rel = Relation::from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 1)]);
        let all: Vec<_> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
        assert!(equivalence_partition(3, |a, b| rel.contains(a, b), all.clone()).is_err());
        let eq = Partition::from_pairs(3, [(0, 2)]).to_relation();
        assert_eq!(
            equivalence_partition(3, |a, b| eq.contains(a, b), all).unwrap(),
            Partition::from_pairs(3, [(0, 2)])
        );
    }
}
