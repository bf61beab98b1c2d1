//! Chore subsets as 64-bit masks. Chore `c` (0-based) is bit `c`.

use std::fmt;

pub const MAX_CHORES: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ChoreSet(u64);

impl ChoreSet {
    pub const EMPTY: ChoreSet = ChoreSet(0);

    pub fn full(m: usize) -> ChoreSet {
        assert!(m <= MAX_CHORES);
        if m == 64 {
            ChoreSet(u64::MAX)
        } else {
            ChoreSet((1u64 << m) - 1)
        }
    }

    pub fn singleton(c: usize) -> ChoreSet {
        ChoreSet(1u64 << c)
    }

    pub fn from_bits(bits: u64) -> ChoreSet {
        ChoreSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn from_chores<I: IntoIterator<Item = usize>>(it: I) -> ChoreSet {
        it.into_iter().fold(ChoreSet::EMPTY, |s, c| s.with(c))
    }

    pub fn contains(self, c: usize) -> bool {
        c < MAX_CHORES && self.0 >> c & 1 == 1
    }

    pub fn with(self, c: usize) -> ChoreSet {
        ChoreSet(self.0 | 1u64 << c)
    }

    pub fn without(self, c: usize) -> ChoreSet {
        ChoreSet(self.0 & !(1u64 << c))
    }

    pub fn insert(&mut self, c: usize) {
        self.0 |= 1u64 << c;
    }

    pub fn remove(&mut self, c: usize) {
        self.0 &= !(1u64 << c);
    }

    pub fn union(self, o: ChoreSet) -> ChoreSet {
        ChoreSet(self.0 | o.0)
    }

    pub fn intersection(self, o: ChoreSet) -> ChoreSet {
        ChoreSet(self.0 & o.0)
    }

    pub fn difference(self, o: ChoreSet) -> ChoreSet {
        ChoreSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: ChoreSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: ChoreSet) -> bool {
        self.0 & o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Highest chore index + 1, i.e. the smallest m this set fits in.
    pub fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Chores in ascending index order.
    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// 1-based indices, for external formats.
    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|c| c + 1).collect()
    }

    /// All subsets of `self`, starting from the empty set.
    pub fn subsets(self) -> Subsets {
        Subsets { of: self.0, next: Some(0) }
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let c = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(c)
    }
    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

pub struct Subsets {
    of: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = ChoreSet;
    fn next(&mut self) -> Option<ChoreSet> {
        let cur = self.next?;
        self.next = if cur == self.of { None } else { Some((cur.wrapping_sub(self.of)) & self.of) };
        Some(ChoreSet(cur))
    }
}

impl FromIterator<usize> for ChoreSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        ChoreSet::from_chores(it)
    }
}

impl IntoIterator for ChoreSet {
    type Item = usize;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

impl fmt::Display for ChoreSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, c) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "c{}", c + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ChoreSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `set![1, 3]` builds the 1-based set {c1, c3}.
#[macro_export]
macro_rules! set {
    () => { $crate::ChoreSet::EMPTY };
    ($($c:expr),+ $(,)?) => { $crate::ChoreSet::from_chores([$($c - 1),+]) };
}
