//! Feature subsets as single-word bitmasks.
//!
//! Bit `i` of a [`FeatureSet`] stands for feature `i` (0-based). Reports and
//! file formats use 1-based indices, so serde goes through sorted 1-based
//! arrays.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest feature count supported by any path (one machine word).
pub const MAX_FEATURES: usize = 63;

/// Default cap on `n` for paths that enumerate all `2^n` coalitions.
pub const DEFAULT_EXACT_CAP: usize = 24;

static EXACT_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_EXACT_CAP);

/// Current cap for exact enumeration.
pub fn exact_cap() -> usize {
    EXACT_CAP.load(Ordering::Relaxed)
}

/// Lowers the exact-enumeration cap. Requests above [`DEFAULT_EXACT_CAP`] are clamped.
pub fn set_exact_cap(cap: usize) {
    EXACT_CAP.store(cap.min(DEFAULT_EXACT_CAP), Ordering::Relaxed);
}

pub(crate) fn check_exact(n: usize) -> Result<()> {
    let cap = exact_cap();
    if n > cap {
        return Err(Error::Capacity {
            what: "feature count for exact enumeration",
            requested: n,
            limit: cap,
        });
    }
    Ok(())
}

pub(crate) fn check_feature_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_FEATURES {
        return Err(Error::Capacity {
            what: "feature count",
            requested: n,
            limit: MAX_FEATURES,
        });
    }
    Ok(())
}

/// A subset of `{0, .., n-1}` stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FeatureSet(u64);

impl FeatureSet {
    pub const EMPTY: FeatureSet = FeatureSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        FeatureSet(bits)
    }

    /// The grand coalition `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= 64);
        if n >= 64 {
            FeatureSet(u64::MAX)
        } else {
            FeatureSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < 64);
        FeatureSet(1u64 << i)
    }

    pub fn pair(i: usize, j: usize) -> Self {
        Self::singleton(i).with(j)
    }

    /// Builds a set from 1-based feature indices, validating them against `n`.
    pub fn from_one_based(indices: &[usize], n: usize) -> Result<Self> {
        let mut set = FeatureSet::EMPTY;
        for &i in indices {
            if i == 0 || i > n {
                return Err(Error::arg(format!("feature index {i} outside 1..={n}")));
            }
            set = set.with(i - 1);
        }
        Ok(set)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1u64 << i) != 0
    }

    #[must_use]
    pub fn with(self, i: usize) -> Self {
        FeatureSet(self.0 | (1u64 << i))
    }

    #[must_use]
    pub fn without(self, i: usize) -> Self {
        FeatureSet(self.0 & !(1u64 << i))
    }

    pub fn union(self, other: Self) -> Self {
        FeatureSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        FeatureSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        FeatureSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// `N \ self` for a universe of `n` features.
    pub fn complement(self, n: usize) -> Self {
        FeatureSet::full(n).difference(self)
    }

    /// True when no bit at position `>= n` is set.
    pub fn fits(self, n: usize) -> bool {
        self.is_subset_of(FeatureSet::full(n))
    }

    pub fn check_fits(self, n: usize) -> Result<()> {
        if self.fits(n) {
            Ok(())
        } else {
            Err(Error::arg(format!("subset {self:?} has a feature outside 1..={n}")))
        }
    }

    /// Member indices in increasing order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// All subsets of `self`, in increasing bitmask order, starting with the empty set.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }

    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Debug for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(FeatureSet::EMPTY, FeatureSet::with)
    }
}

impl Serialize for FeatureSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FeatureSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let indices = Vec::<usize>::deserialize(deserializer)?;
        let mut set = FeatureSet::EMPTY;
        for i in indices {
            if i == 0 || i > MAX_FEATURES {
                return Err(serde::de::Error::custom(format!("feature index {i} out of range")));
            }
            set = set.with(i - 1);
        }
        Ok(set)
    }
}

pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for Members {}

/// Submask enumeration in increasing order.
pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = FeatureSet;

    fn next(&mut self) -> Option<FeatureSet> {
        let cur = self.next?;
        let succ = (cur | !self.mask).wrapping_add(1) & self.mask;
        self.next = if succ == 0 { None } else { Some(succ) };
        Some(FeatureSet(cur))
    }
}

/// All subsets of `{0..n-1}` with exactly `k` members, in increasing bitmask order.
pub fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = FeatureSet> {
    let limit = if n >= 64 { u64::MAX } else { 1u64 << n };
    let first = if k == 0 {
        Some(0u64)
    } else if k > n {
        None
    } else {
        Some(FeatureSet::full(k).bits())
    };
    std::iter::successors(first, move |&cur| {
        if cur == 0 {
            return None;
        }
        // Gosper's hack
        let c = cur & cur.wrapping_neg();
        let r = cur.checked_add(c)?;
        let next = (((r ^ cur) >> 2) / c) | r;
        (n >= 64 || next < limit).then_some(next)
    })
    .map(FeatureSet)
}

/// Every subset with `1 <= |S| <= order`, ordered by size then bitmask.
pub fn subsets_up_to(n: usize, order: usize) -> Vec<FeatureSet> {
    (1..=order.min(n)).flat_map(|k| subsets_of_size(n, k)).collect()
}
