use std::fmt;

use crate::chores::ChoreSet;
use crate::error::{Error, Result};

/// `bundles[i]` is agent i's bundle; chores in no bundle form the pool.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    m: usize,
    bundles: Vec<ChoreSet>,
}

impl Allocation {
    pub fn new(m: usize, bundles: Vec<ChoreSet>) -> Result<Self> {
        let full = ChoreSet::full(m);
        let mut seen = ChoreSet::EMPTY;
        for (i, b) in bundles.iter().enumerate() {
            if !b.is_subset(full) {
                return Err(Error::ChoreOutOfRange { chore: b.span(), m });
            }
            if let Some(c) = b.intersection(seen).iter().next() {
                return Err(Error::InvalidInput(format!("chore c{} appears in two bundles (second: agent {})", c + 1, i + 1)));
            }
            seen = seen.union(*b);
        }
        Ok(Allocation { m, bundles })
    }

    pub fn empty(m: usize, n: usize) -> Self {
        Allocation { m, bundles: vec![ChoreSet::EMPTY; n] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundles(&self) -> &[ChoreSet] {
        &self.bundles
    }

    pub fn bundle(&self, i: usize) -> ChoreSet {
        self.bundles[i]
    }

    pub fn into_bundles(self) -> Vec<ChoreSet> {
        self.bundles
    }

    pub fn allocated(&self) -> ChoreSet {
        self.bundles.iter().fold(ChoreSet::EMPTY, |a, b| a.union(*b))
    }

    pub fn pool(&self) -> ChoreSet {
        ChoreSet::full(self.m).difference(self.allocated())
    }

    pub fn is_full(&self) -> bool {
        self.pool().is_empty()
    }

    /// Owner of chore `c`, if allocated.
    pub fn owner(&self, c: usize) -> Option<usize> {
        self.bundles.iter().position(|b| b.contains(c))
    }

    /// Puts a pool chore into agent `agent`'s bundle.
    pub fn assign(&mut self, agent: usize, c: usize) -> Result<()> {
        if c >= self.m {
            return Err(Error::ChoreOutOfRange { chore: c + 1, m: self.m });
        }
        if let Some(o) = self.owner(c) {
            return Err(Error::InvalidInput(format!("chore c{} already held by agent {}", c + 1, o + 1)));
        }
        self.bundles[agent].insert(c);
        Ok(())
    }

    pub fn set_bundle(&mut self, i: usize, b: ChoreSet) {
        self.bundles[i] = b;
    }

    pub fn swap(&mut self, i: usize, j: usize) {
        self.bundles.swap(i, j);
    }

    /// Bundles sorted by mask; equal for two allocations that differ only by
    /// which agent holds which bundle.
    pub fn canonical_bundles(&self) -> Vec<ChoreSet> {
        let mut v = self.bundles.clone();
        v.sort();
        v
    }

    /// Bundles as 1-based chore lists, for external formats.
    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.bundles.iter().map(|b| b.to_one_based()).collect()
    }

    pub fn from_one_based(m: usize, bundles: &[Vec<usize>]) -> Result<Self> {
        let mut sets = Vec::with_capacity(bundles.len());
        for b in bundles {
            let mut s = ChoreSet::EMPTY;
            for &c in b {
                if c == 0 || c > m {
                    return Err(Error::ChoreOutOfRange { chore: c, m });
                }
                if s.contains(c - 1) {
                    return Err(Error::InvalidInput(format!("chore c{c} listed twice in one bundle")));
                }
                s.insert(c - 1);
            }
            sets.push(s);
        }
        Allocation::new(m, sets)
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, b) in self.bundles.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set;

    #[test]
    fn pool_and_display() {
        let a = Allocation::new(6, vec![set![2, 5], set![4], set![1]]).unwrap();
        assert_eq!(a.pool(), set![3, 6]);
        assert!(!a.is_full());
        assert_eq!(a.to_string(), "({c2,c5},{c4},{c1})");
        assert_eq!(a.owner(3), Some(1));
        assert_eq!(a.owner(2), None);
    }

    #[test]
    fn rejects_overlap_and_range() {
        assert!(Allocation::new(3, vec![set![1], set![1, 2]]).is_err());
        assert!(Allocation::new(3, vec![set![4]]).is_err());
        assert!(Allocation::from_one_based(3, &[vec![0]]).is_err());
        assert!(Allocation::from_one_based(3, &[vec![1, 1]]).is_err());
    }

    #[test]
    fn assign_and_canonical() {
        let mut a = Allocation::empty(3, 2);
        a.assign(1, 0).unwrap();
        assert!(a.assign(0, 0).is_err());
        a.assign(0, 2).unwrap();
        a.assign(0, 1).unwrap();
        assert!(a.is_full());
        let mut b = a.clone();
        b.swap(0, 1);
        assert_eq!(a.canonical_bundles(), b.canonical_bundles());
        assert_eq!(Allocation::from_one_based(3, &a.to_one_based()).unwrap(), a);
    }
}
