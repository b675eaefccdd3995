//! Reduced (merged) games and relabeled games.

use crate::error::{Error, Result};
use crate::game::{Game, GameKind};
use crate::subsets::{check_feature_count, FeatureSet};

/// A partition of the original features into super-features.
///
/// Groups are kept sorted by their smallest member, so merging `{i, j}`
/// places `[ij]` at the position of `min(i, j)` among the remaining features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeMap {
    original_n: usize,
    groups: Vec<FeatureSet>,
    group_of: Vec<usize>,
}

impl MergeMap {
    pub fn new(original_n: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        check_feature_count(original_n)?;
        let mut sets = Vec::with_capacity(groups.len());
        let mut covered = FeatureSet::EMPTY;
        for g in &groups {
            if g.is_empty() {
                return Err(Error::arg("merge group is empty"));
            }
            let mut set = FeatureSet::EMPTY;
            for &i in g {
                if i >= original_n {
                    return Err(Error::arg(format!("feature {} outside 1..={original_n}", i + 1)));
                }
                if covered.contains(i) {
                    return Err(Error::arg(format!("feature {} appears in two merge groups", i + 1)));
                }
                covered = covered.with(i);
                set = set.with(i);
            }
            sets.push(set);
        }
        if covered != FeatureSet::full(original_n) {
            let missing = FeatureSet::full(original_n).difference(covered);
            return Err(Error::arg(format!("merge groups do not cover features {missing:?}")));
        }
        sets.sort_by_key(|s| s.bits().trailing_zeros());
        let mut group_of = vec![0; original_n];
        for (g, set) in sets.iter().enumerate() {
            for i in set.iter() {
                group_of[i] = g;
            }
        }
        Ok(MergeMap {
            original_n,
            groups: sets,
            group_of,
        })
    }

    /// All-singleton partition.
    pub fn identity(n: usize) -> Result<Self> {
        MergeMap::new(n, (0..n).map(|i| vec![i]).collect())
    }

    /// Fuses features `i` and `j`, leaving all others as singletons.
    pub fn pair(n: usize, i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::arg("cannot merge a feature with itself"));
        }
        let mut groups: Vec<Vec<usize>> = (0..n).filter(|&k| k != i && k != j).map(|k| vec![k]).collect();
        groups.push(vec![i, j]);
        MergeMap::new(n, groups)
    }

    pub fn original_n(&self) -> usize {
        self.original_n
    }

    pub fn merged_n(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[FeatureSet] {
        &self.groups
    }

    /// Index of the super-feature that contains original feature `i`.
    pub fn group_of(&self, i: usize) -> usize {
        self.group_of[i]
    }

    /// Original features covered by a merged subset.
    pub fn expand(&self, merged: FeatureSet) -> FeatureSet {
        merged
            .iter()
            .fold(FeatureSet::EMPTY, |acc, g| acc.union(self.groups[g]))
    }

    /// Merged subset whose expansion is exactly `original`; errors if `original`
    /// splits a group.
    pub fn lift(&self, original: FeatureSet) -> Result<FeatureSet> {
        original.check_fits(self.original_n)?;
        let merged: FeatureSet = original.iter().map(|i| self.group_of[i]).collect();
        if self.expand(merged) != original {
            return Err(Error::arg(format!("subset {original:?} splits a merge group")));
        }
        Ok(merged)
    }
}

/// `v_[T]`: each selected super-feature switches on all of its members.
#[derive(Debug, Clone)]
pub struct MergedGame<G> {
    inner: G,
    map: MergeMap,
}

impl<G: Game> MergedGame<G> {
    pub fn map(&self) -> &MergeMap {
        &self.map
    }
}

impl<G: Game> Game for MergedGame<G> {
    fn n(&self) -> usize {
        self.map.merged_n()
    }
    fn value(&self, s: FeatureSet) -> f64 {
        self.inner.value(self.map.expand(s))
    }
    fn kind(&self) -> GameKind {
        GameKind::Reduced
    }
    fn offset(&self) -> f64 {
        self.inner.offset()
    }
}

pub fn merge_game<G: Game>(v: G, map: MergeMap) -> Result<MergedGame<G>> {
    if map.original_n() != v.n() {
        return Err(Error::Dimension {
            expected: v.n(),
            actual: map.original_n(),
        });
    }
    Ok(MergedGame { inner: v, map })
}

/// Image of `s` under the permutation `i -> perm[i]`.
pub fn permute_set(perm: &[usize], s: FeatureSet) -> FeatureSet {
    s.iter().map(|i| perm[i]).collect()
}

fn validate_permutation(perm: &[usize]) -> Result<Vec<usize>> {
    let n = perm.len();
    let mut inverse = vec![usize::MAX; n];
    for (i, &p) in perm.iter().enumerate() {
        if p >= n || inverse[p] != usize::MAX {
            return Err(Error::arg(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        inverse[p] = i;
    }
    Ok(inverse)
}

/// `(πv)(T) = v(π^{-1} T)`.
#[derive(Debug, Clone)]
pub struct PermutedGame<G> {
    inner: G,
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl<G: Game> PermutedGame<G> {
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }
}

impl<G: Game> Game for PermutedGame<G> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn value(&self, t: FeatureSet) -> f64 {
        self.inner.value(permute_set(&self.inverse, t))
    }
    fn kind(&self) -> GameKind {
        GameKind::Permuted
    }
    fn offset(&self) -> f64 {
        self.inner.offset()
    }
}

pub fn permute_game<G: Game>(v: G, perm: &[usize]) -> Result<PermutedGame<G>> {
    if perm.len() != v.n() {
        return Err(Error::Dimension {
            expected: v.n(),
            actual: perm.len(),
        });
    }
    let inverse = validate_permutation(perm)?;
    Ok(PermutedGame {
        inner: v,
        perm: perm.to_vec(),
        inverse,
    })
}
