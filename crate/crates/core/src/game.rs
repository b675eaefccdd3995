//! Cooperative games over feature subsets.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Model;
use crate::subsets::{check_exact, check_feature_count, FeatureSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    Table,
    FeatureEffect,
    Primitive,
    Reduced,
    Permuted,
    LinearCombination,
    Scaled,
}

/// A characteristic function `v: 2^N -> R`.
///
/// Implementations must be pure: the same subset always yields the same value,
/// and evaluation may happen concurrently from several threads.
pub trait Game: Send + Sync {
    fn n(&self) -> usize;

    fn value(&self, s: FeatureSet) -> f64;

    fn kind(&self) -> GameKind;

    /// Constant `b0` such that `v(S) + b0` is the underlying Boolean function.
    /// Zero unless the game was derived from a model prediction.
    fn offset(&self) -> f64 {
        0.0
    }
}

impl<G: Game + ?Sized> Game for &G {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn value(&self, s: FeatureSet) -> f64 {
        (**self).value(s)
    }
    fn kind(&self) -> GameKind {
        (**self).kind()
    }
    fn offset(&self) -> f64 {
        (**self).offset()
    }
}

impl<G: Game + ?Sized> Game for Box<G> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn value(&self, s: FeatureSet) -> f64 {
        (**self).value(s)
    }
    fn kind(&self) -> GameKind {
        (**self).kind()
    }
    fn offset(&self) -> f64 {
        (**self).offset()
    }
}

impl<G: Game + ?Sized> Game for Arc<G> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn value(&self, s: FeatureSet) -> f64 {
        (**self).value(s)
    }
    fn kind(&self) -> GameKind {
        (**self).kind()
    }
    fn offset(&self) -> f64 {
        (**self).offset()
    }
}

/// Dense materialization of a game: `values[S.bits()] = v(S)`.
///
/// Serializes as `{"n": .., "values": [..]}`; the offset is not stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableGameFile", into = "TableGameFile")]
pub struct TableGame {
    n: usize,
    values: Vec<f64>,
    offset: f64,
}

#[derive(Serialize, Deserialize)]
struct TableGameFile {
    n: usize,
    values: Vec<f64>,
}

impl TryFrom<TableGameFile> for TableGame {
    type Error = Error;

    fn try_from(file: TableGameFile) -> Result<Self> {
        TableGame::new(file.n, file.values)
    }
}

impl From<TableGame> for TableGameFile {
    fn from(v: TableGame) -> Self {
        TableGameFile {
            n: v.n,
            values: v.values,
        }
    }
}

impl TableGame {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_exact(n)?;
        if values.len() != 1usize << n {
            return Err(Error::arg(format!(
                "table game over {n} features needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::arg(format!("table value at index {pos} is not finite")));
        }
        Ok(TableGame { n, values, offset: 0.0 })
    }

    pub fn from_fn(n: usize, f: impl Fn(FeatureSet) -> f64) -> Result<Self> {
        check_exact(n)?;
        let values = (0..1u64 << n).map(|b| f(FeatureSet::from_bits(b))).collect();
        TableGame::new(n, values)
    }

    #[must_use]
    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Parses `{"n": .., "values": [..]}` with values in bitmask order.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: TableGameFile = serde_json::from_str(s)?;
        TableGame::try_from(file)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("table game serializes")
    }
}

impl Game for TableGame {
    fn n(&self) -> usize {
        self.n
    }
    fn value(&self, s: FeatureSet) -> f64 {
        self.values[s.index()]
    }
    fn kind(&self) -> GameKind {
        GameKind::Table
    }
    fn offset(&self) -> f64 {
        self.offset
    }
}

/// Evaluates every coalition of `v` into a [`TableGame`]. Fails beyond the exact cap.
pub fn materialize_table<G: Game + ?Sized>(v: &G) -> Result<TableGame> {
    let n = v.n();
    check_exact(n)?;
    use rayon::prelude::*;
    let values: Vec<f64> = (0..1u64 << n)
        .into_par_iter()
        .map(|b| v.value(FeatureSet::from_bits(b)))
        .collect();
    Ok(TableGame::new(n, values)?.with_offset(v.offset()))
}

/// The unanimity game `p^R`: 1 on supersets of `R`, 0 elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveGame {
    n: usize,
    support: FeatureSet,
}

impl PrimitiveGame {
    pub fn new(n: usize, support: FeatureSet) -> Result<Self> {
        check_feature_count(n)?;
        support.check_fits(n)?;
        Ok(PrimitiveGame { n, support })
    }

    pub fn support(&self) -> FeatureSet {
        self.support
    }
}

impl Game for PrimitiveGame {
    fn n(&self) -> usize {
        self.n
    }
    fn value(&self, s: FeatureSet) -> f64 {
        if self.support.is_subset_of(s) {
            1.0
        } else {
            0.0
        }
    }
    fn kind(&self) -> GameKind {
        GameKind::Primitive
    }
}

#[derive(Debug, Clone)]
pub struct ScaledGame<G> {
    inner: G,
    factor: f64,
}

impl<G: Game> ScaledGame<G> {
    pub fn new(inner: G, factor: f64) -> Self {
        ScaledGame { inner, factor }
    }
}

impl<G: Game> Game for ScaledGame<G> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn value(&self, s: FeatureSet) -> f64 {
        self.factor * self.inner.value(s)
    }
    fn kind(&self) -> GameKind {
        GameKind::Scaled
    }
    fn offset(&self) -> f64 {
        self.factor * self.inner.offset()
    }
}

/// `Σ a_k v_k` over games sharing the same feature count.
#[derive(Clone)]
pub struct LinearCombination {
    n: usize,
    terms: Vec<(f64, Arc<dyn Game>)>,
}

impl LinearCombination {
    pub fn new(n: usize) -> Self {
        LinearCombination { n, terms: Vec::new() }
    }

    pub fn push(&mut self, weight: f64, game: Arc<dyn Game>) -> Result<()> {
        if game.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: game.n(),
            });
        }
        self.terms.push((weight, game));
        Ok(())
    }

    #[must_use]
    pub fn plus(mut self, weight: f64, game: impl Game + 'static) -> Self {
        self.push(weight, Arc::new(game)).expect("feature counts agree");
        self
    }
}

impl Game for LinearCombination {
    fn n(&self) -> usize {
        self.n
    }
    fn value(&self, s: FeatureSet) -> f64 {
        self.terms.iter().map(|(w, g)| w * g.value(s)).sum()
    }
    fn kind(&self) -> GameKind {
        GameKind::LinearCombination
    }
    fn offset(&self) -> f64 {
        self.terms.iter().map(|(w, g)| w * g.offset()).sum()
    }
}

/// `v(S) = f(poi_S, baseline_{N\S}) - f(baseline)`.
///
/// Each game feature owns a group of model columns; a one-hot encoded
/// categorical feature flips all of its indicator columns together.
pub struct FeatureEffectGame<M> {
    model: M,
    poi: Vec<f64>,
    baseline: Vec<f64>,
    groups: Vec<Vec<usize>>,
    base_prediction: f64,
}

impl<M: Model> FeatureEffectGame<M> {
    /// One game feature per model column.
    pub fn new(model: M, poi: Vec<f64>, baseline: Vec<f64>) -> Result<Self> {
        let groups = (0..model.arity()).map(|c| vec![c]).collect();
        Self::with_groups(model, poi, baseline, groups)
    }

    pub fn with_groups(model: M, poi: Vec<f64>, baseline: Vec<f64>, groups: Vec<Vec<usize>>) -> Result<Self> {
        let arity = model.arity();
        for v in [&poi, &baseline] {
            if v.len() != arity {
                return Err(Error::Dimension {
                    expected: arity,
                    actual: v.len(),
                });
            }
        }
        check_feature_count(groups.len())?;
        let mut seen = vec![false; arity];
        for (g, cols) in groups.iter().enumerate() {
            if cols.is_empty() {
                return Err(Error::arg(format!("feature group {} is empty", g + 1)));
            }
            for &c in cols {
                if c >= arity || std::mem::replace(&mut seen[c], true) {
                    return Err(Error::arg(format!(
                        "column {c} is out of range or in two feature groups"
                    )));
                }
            }
        }
        if let Some(c) = seen.iter().position(|s| !s) {
            return Err(Error::arg(format!("column {c} belongs to no feature group")));
        }
        let base_prediction = model.predict(&baseline);
        Ok(FeatureEffectGame {
            model,
            poi,
            baseline,
            groups,
            base_prediction,
        })
    }

    /// `f(baseline)`.
    pub fn base_prediction(&self) -> f64 {
        self.base_prediction
    }

    /// The hybrid input where features in `s` take POI values.
    pub fn hybrid(&self, s: FeatureSet) -> Vec<f64> {
        let mut x = self.baseline.clone();
        for i in s.iter() {
            for &c in &self.groups[i] {
                x[c] = self.poi[c];
            }
        }
        x
    }

    pub fn model(&self) -> &M {
        &self.model
    }
}

impl<M: Model> Game for FeatureEffectGame<M> {
    fn n(&self) -> usize {
        self.groups.len()
    }
    fn value(&self, s: FeatureSet) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        self.model.predict(&self.hybrid(s)) - self.base_prediction
    }
    fn kind(&self) -> GameKind {
        GameKind::FeatureEffect
    }
    fn offset(&self) -> f64 {
        self.base_prediction
    }
}

/// Builds the feature-effect game of `model` at `poi` against `baseline`.
pub fn feature_effect_game<M: Model>(model: M, poi: &[f64], baseline: &[f64]) -> Result<FeatureEffectGame<M>> {
    FeatureEffectGame::new(model, poi.to_vec(), baseline.to_vec())
}

/// `m_S(T, v) = Σ_{L ⊆ S} (-1)^{|S|-|L|} v(T ∪ L)`.
pub fn discrete_derivative<G: Game + ?Sized>(v: &G, s: FeatureSet, t: FeatureSet) -> Result<f64> {
    let n = v.n();
    s.check_fits(n)?;
    t.check_fits(n)?;
    if !s.is_disjoint(t) {
        return Err(Error::arg(format!("derivative set {s:?} overlaps coalition {t:?}")));
    }
    Ok(derivative_unchecked(v, s, t))
}

pub(crate) fn derivative_unchecked<G: Game + ?Sized>(v: &G, s: FeatureSet, t: FeatureSet) -> f64 {
    let size = s.len();
    s.subsets()
        .map(|l| {
            let x = v.value(t.union(l));
            if (size - l.len()).is_multiple_of(2) {
                x
            } else {
                -x
            }
        })
        .sum()
}

/// `m_S(∅, v)`.
pub fn harsanyi_dividend<G: Game + ?Sized>(v: &G, s: FeatureSet) -> Result<f64> {
    discrete_derivative(v, s, FeatureSet::EMPTY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{MonomialModel, ThresholdModel};

    fn or_game() -> TableGame {
        TableGame::new(2, vec![0.0, 1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn feature_effect_of_product() {
        let f = MonomialModel::new(2, 1.0, FeatureSet::full(2)).unwrap();
        let v = feature_effect_game(f, &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let got: Vec<f64> = (0..4).map(|b| v.value(FeatureSet::from_bits(b))).collect();
        assert_eq!(got, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn feature_effect_poi_equals_baseline_is_null() {
        let f = ThresholdModel::new(4, 2).unwrap();
        let x = [1.0, 0.0, 1.0, 1.0];
        let v = feature_effect_game(f, &x, &x).unwrap();
        assert!(FeatureSet::full(4).subsets().all(|s| v.value(s) == 0.0));
    }

    #[test]
    fn feature_effect_of_fc() {
        let f = MonomialModel::new(3, 2.0, FeatureSet::full(3)).unwrap();
        let v = feature_effect_game(f, &[1.0; 3], &[0.0; 3]).unwrap();
        for s in FeatureSet::full(3).subsets() {
            let want = if s == FeatureSet::full(3) { 2.0 } else { 0.0 };
            assert_eq!(v.value(s), want);
        }
        assert_eq!(v.offset(), 0.0);
    }

    #[test]
    fn feature_effect_arity_mismatch() {
        let f = ThresholdModel::new(3, 2).unwrap();
        let err = feature_effect_game(f, &[1.0, 1.0], &[0.0; 3]).err().unwrap();
        assert!(matches!(err, Error::Dimension { expected: 3, actual: 2 }));
    }

    #[test]
    fn derivative_edge_cases() {
        let v = or_game();
        let t = FeatureSet::singleton(1);
        assert_eq!(discrete_derivative(&v, FeatureSet::EMPTY, t).unwrap(), v.value(t));
        assert!(discrete_derivative(&v, FeatureSet::full(2), t).is_err());
        assert_eq!(harsanyi_dividend(&v, FeatureSet::full(2)).unwrap(), -1.0);
    }

    #[test]
    fn derivative_of_primitive_vanishes_off_support() {
        let p = PrimitiveGame::new(3, FeatureSet::pair(0, 1)).unwrap();
        let s = FeatureSet::pair(0, 2);
        for t in s.complement(3).subsets() {
            assert_eq!(discrete_derivative(&p, s, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn threshold_pair_derivative() {
        let f = ThresholdModel::new(4, 2).unwrap();
        let v = feature_effect_game(f, &[1.0; 4], &[0.0; 4]).unwrap();
        let m = discrete_derivative(&v, FeatureSet::pair(0, 1), FeatureSet::EMPTY).unwrap();
        assert_eq!(m, 1.0);
    }

    #[test]
    fn dividends_of_scaled_primitive() {
        let r = FeatureSet::from_bits(0b0110);
        let v = ScaledGame::new(PrimitiveGame::new(4, r).unwrap(), 3.5);
        for s in FeatureSet::full(4).subsets() {
            let want = if s == r { 3.5 } else { 0.0 };
            assert_eq!(harsanyi_dividend(&v, s).unwrap(), want);
        }
    }

    #[test]
    fn table_game_validation_and_json() {
        assert!(TableGame::new(2, vec![0.0; 3]).is_err());
        assert!(TableGame::new(1, vec![0.0, f64::NAN]).is_err());
        let g = TableGame::from_json_str(r#"{"n":2,"values":[0,1,1,1]}"#).unwrap();
        assert_eq!(g, or_game());
        assert_eq!(TableGame::from_json_str(&g.to_json_string()).unwrap(), g);
    }

    #[test]
    fn materialize_respects_cap() {
        let p = PrimitiveGame::new(30, FeatureSet::singleton(3)).unwrap();
        assert!(matches!(materialize_table(&p), Err(Error::Capacity { .. })));
    }

    #[test]
    fn linear_combination_rejects_mismatched_games() {
        let mut lc = LinearCombination::new(3);
        assert!(lc
            .push(1.0, Arc::new(PrimitiveGame::new(2, FeatureSet::EMPTY).unwrap()))
            .is_err());
    }
}
