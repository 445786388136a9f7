use std::fmt;

/// Maximum number of relations a query graph may hold.
pub const MAX_RELATIONS: usize = 128;

/// A set of relation indices stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RelSet(pub u128);

impl RelSet {
    pub const EMPTY: RelSet = RelSet(0);

    pub fn single(rel: usize) -> Self {
        debug_assert!(rel < MAX_RELATIONS);
        RelSet(1u128 << rel)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_RELATIONS);
        if n == MAX_RELATIONS {
            RelSet(u128::MAX)
        } else {
            RelSet((1u128 << n) - 1)
        }
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(RelSet::EMPTY, |s, r| s.with(r))
    }

    pub fn with(self, rel: usize) -> Self {
        RelSet(self.0 | (1u128 << rel))
    }

    pub fn contains(self, rel: usize) -> bool {
        rel < MAX_RELATIONS && self.0 & (1u128 << rel) != 0
    }

    pub fn union(self, other: RelSet) -> RelSet {
        RelSet(self.0 | other.0)
    }

    pub fn intersect(self, other: RelSet) -> RelSet {
        RelSet(self.0 & other.0)
    }

    pub fn minus(self, other: RelSet) -> RelSet {
        RelSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: RelSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: RelSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Lowest member, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let r = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(r)
            }
        })
    }
}

impl fmt::Debug for RelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
