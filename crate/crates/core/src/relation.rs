//! Sets of base relations stored as a machine-word bitset.

use core::fmt;
use core::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign};

/// Largest number of base relations a calculus may declare.
pub const MAX_RELATIONS: usize = 64;

/// Index of a base relation in declaration order.
pub type RelationIndex = u8;

/// A subset of the base relations of a calculus.
///
/// Bit `i` is set iff the relation with declaration index `i` is a member.
/// The set carries no reference to its calculus; callers keep members below
/// the calculus's relation count.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct RelationSet(u64);

impl RelationSet {
    pub const EMPTY: RelationSet = RelationSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        RelationSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub const fn singleton(index: RelationIndex) -> Self {
        RelationSet(1u64 << index)
    }

    /// All relations with index below `count`.
    pub const fn full(count: usize) -> Self {
        if count >= 64 {
            RelationSet(u64::MAX)
        } else {
            RelationSet((1u64 << count) - 1)
        }
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn contains(self, index: RelationIndex) -> bool {
        self.0 & (1u64 << index) != 0
    }

    pub fn insert(&mut self, index: RelationIndex) {
        self.0 |= 1u64 << index;
    }

    pub fn remove(&mut self, index: RelationIndex) {
        self.0 &= !(1u64 << index);
    }

    pub const fn union(self, other: Self) -> Self {
        RelationSet(self.0 | other.0)
    }

    pub const fn intersection(self, other: Self) -> Self {
        RelationSet(self.0 & other.0)
    }

    pub const fn difference(self, other: Self) -> Self {
        RelationSet(self.0 & !other.0)
    }

    /// Complement relative to a calculus with `count` relations.
    pub const fn complement(self, count: usize) -> Self {
        RelationSet(!self.0 & Self::full(count).0)
    }

    pub const fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// The only member, if the set is a singleton.
    pub const fn single(self) -> Option<RelationIndex> {
        if self.0 != 0 && self.0 & (self.0 - 1) == 0 {
            Some(self.0.trailing_zeros() as RelationIndex)
        } else {
            None
        }
    }

    /// Smallest member.
    pub const fn first(self) -> Option<RelationIndex> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as RelationIndex)
        }
    }

    /// Members in ascending index order.
    pub fn iter(self) -> Iter {
        Iter(self.0)
    }
}

impl fmt::Debug for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<RelationIndex> for RelationSet {
    fn from_iter<I: IntoIterator<Item = RelationIndex>>(iter: I) -> Self {
        let mut set = RelationSet::EMPTY;
        for i in iter {
            set.insert(i);
        }
        set
    }
}

impl IntoIterator for RelationSet {
    type Item = RelationIndex;
    type IntoIter = Iter;

    fn into_iter(self) -> Iter {
        self.iter()
    }
}

impl BitOr for RelationSet {
    type Output = RelationSet;
    fn bitor(self, rhs: Self) -> Self {
        self.union(rhs)
    }
}

impl BitOrAssign for RelationSet {
    fn bitor_assign(&mut self, rhs: Self) {
        self.0 |= rhs.0;
    }
}

impl BitAnd for RelationSet {
    type Output = RelationSet;
    fn bitand(self, rhs: Self) -> Self {
        self.intersection(rhs)
    }
}

impl BitAndAssign for RelationSet {
    fn bitand_assign(&mut self, rhs: Self) {
        self.0 &= rhs.0;
    }
}

/// Iterator over the members of a [`RelationSet`].
#[derive(Clone, Debug)]
pub struct Iter(u64);

impl Iterator for Iter {
    type Item = RelationIndex;

    fn next(&mut self) -> Option<RelationIndex> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(i as RelationIndex)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_complement() {
        assert_eq!(RelationSet::full(5).bits(), 0b11111);
        assert_eq!(RelationSet::full(64).bits(), u64::MAX);
        let s: RelationSet = [0, 3].into_iter().collect();
        assert_eq!(s.complement(5), [1, 2, 4].into_iter().collect());
    }

    #[test]
    fn single_and_first() {
        assert_eq!(RelationSet::singleton(63).single(), Some(63));
        assert_eq!(RelationSet::from_bits(0b110).single(), None);
        assert_eq!(RelationSet::from_bits(0b110).first(), Some(1));
        assert_eq!(RelationSet::EMPTY.first(), None);
    }

    #[test]
    fn iteration_is_ascending() {
        let s = RelationSet::from_bits(0b1010_0101);
        let v: alloc::vec::Vec<_> = s.iter().collect();
        assert_eq!(v, [0, 2, 5, 7]);
        assert_eq!(s.iter().len(), 4);
    }
}
