use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Sub};

/// Largest number of states a model may have.
pub const MAX_STATES: usize = 128;

/// A set of state indices of one model, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateSet(u128);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    pub fn from_bits(bits: u128) -> StateSet {
        StateSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn singleton(i: usize) -> StateSet {
        StateSet(1u128 << i)
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> StateSet {
        if n >= 128 {
            StateSet(u128::MAX)
        } else {
            StateSet((1u128 << n) - 1)
        }
    }

    pub fn contains(self, i: usize) -> bool {
        i < 128 && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u128 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: StateSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: StateSet) -> bool {
        self.0 & other.0 != 0
    }

    /// Smallest member.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }
}

pub struct Iter(u128);

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

impl FromIterator<usize> for StateSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut out = StateSet::EMPTY;
        for i in iter {
            out.insert(i);
        }
        out
    }
}

impl BitAnd for StateSet {
    type Output = StateSet;
    fn bitand(self, rhs: StateSet) -> StateSet {
        StateSet(self.0 & rhs.0)
    }
}

impl BitOr for StateSet {
    type Output = StateSet;
    fn bitor(self, rhs: StateSet) -> StateSet {
        StateSet(self.0 | rhs.0)
    }
}

impl Sub for StateSet {
    type Output = StateSet;
    fn sub(self, rhs: StateSet) -> StateSet {
        StateSet(self.0 & !rhs.0)
    }
}

impl BitAndAssign for StateSet {
    fn bitand_assign(&mut self, rhs: StateSet) {
        self.0 &= rhs.0;
    }
}

impl BitOrAssign for StateSet {
    fn bitor_assign(&mut self, rhs: StateSet) {
        self.0 |= rhs.0;
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a: StateSet = [0, 3, 127].into_iter().collect();
        assert_eq!(a.len(), 3);
        assert!(a.contains(127) && !a.contains(1));
        assert_eq!(a.iter().collect::<Vec<_>>(), [0, 3, 127]);
        assert_eq!((a - StateSet::singleton(3)).len(), 2);
        assert!(StateSet::singleton(3).is_subset(a));
        assert_eq!(StateSet::full(128).len(), 128);
        assert_eq!(StateSet::full(2), [0, 1].into_iter().collect());
        assert_eq!(a.first(), Some(0));
    }
}
