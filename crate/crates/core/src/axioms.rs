//! Randomized conformance checks of interaction indices against the
//! axioms that characterize the Banzhaf interaction index.
//!
//! Each trial draws a game (or a pair of games) from a seeded family, builds
//! one or more concrete instances of the axiom, and evaluates the index on
//! them. Equalities are checked at absolute tolerance [`TOLERANCE`]; strict
//! inequalities require a gap larger than [`STRICT_MARGIN`]. The worst
//! failing instance is kept as a self-contained [`Witness`] that can be
//! serialized and replayed.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::{census_game, census_tree, census_tree_edited, CG, MS};
use crate::game::{discrete_derivative, materialize_table, Game, TableGame};
use crate::indices::{bii_exact, shapley_taylor, sii_exact, IndexKind};
use crate::mobius::{mobius_transform, MobiusCoefficients};
use crate::reduce::{merge_game, permute_game, MergeMap};
use crate::subsets::{check_exact, FeatureSet};

pub const TOLERANCE: f64 = 1e-9;
pub const STRICT_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Symmetry,
    Ge,
    Limit,
    Monotonicity,
    Null,
    PropA1,
    PropA2,
    LemmaA3,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::Symmetry,
        Axiom::Ge,
        Axiom::Limit,
        Axiom::Monotonicity,
        Axiom::Null,
        Axiom::PropA1,
        Axiom::PropA2,
        Axiom::LemmaA3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Symmetry => "symmetry",
            Axiom::Ge => "ge",
            Axiom::Limit => "limit",
            Axiom::Monotonicity => "monotonicity",
            Axiom::Null => "null",
            Axiom::PropA1 => "prop_a1",
            Axiom::PropA2 => "prop_a2",
            Axiom::LemmaA3 => "lemma_a3",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown axiom '{s}'")))
    }
}

/// Families of games the generator can draw from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Independent values uniform on `[-1, 1]`.
    RandomTable,
    /// Each nonempty `R` gets a coefficient uniform on `[-1, 1]` with
    /// probability `density`; the game is rebuilt from the coefficients.
    MobiusSparse { density: f64 },
    /// `c · p^R` with `c` uniform on `±[0.25, 2]`; `R` is random when absent.
    Primitive { support: Option<FeatureSet> },
    /// `v(S) = 1` iff `|S| >= k`.
    Threshold { k: usize },
    /// `c · p^R`, the game of `c Π_{i∈R} x_i` at `x = 1`, baseline `0`.
    Monomial { c: f64, support: Option<FeatureSet> },
    /// `v1 = v2 + ε p^{S ∪ T*}` with `v2` drawn from `base` and `T*` random,
    /// so `m_S(T, v1) >= m_S(T, v2)` with equality unless `T ⊇ T*`.
    MonotonePair {
        subset: Option<FeatureSet>,
        epsilon: f64,
        base: Box<Family>,
    },
    /// The census tree before and after lowering its 0.67 leaf, compared on `{MS, CG}`.
    TreeEditPair,
}

impl Family {
    pub fn monotone_pair(base: Family) -> Self {
        Family::MonotonePair {
            subset: None,
            epsilon: 0.1,
            base: Box::new(base),
        }
    }

    fn is_pair(&self) -> bool {
        matches!(self, Family::MonotonePair { .. } | Family::TreeEditPair)
    }
}

fn parse_members(s: &str) -> Result<Vec<usize>> {
    s.split('+')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad feature index '{x}'")))
        })
        .collect()
}

fn parse_support(s: Option<&str>) -> Result<Option<FeatureSet>> {
    match s {
        None | Some("") | Some("-") => Ok(None),
        Some(s) => {
            let members = parse_members(s)?;
            if members.contains(&0) {
                return Err(Error::Parse("feature indices are 1-based".into()));
            }
            Ok(Some(members.into_iter().map(|i| i - 1).collect()))
        }
    }
}

/// Text forms: `random_table`, `mobius_sparse[:DENSITY]`, `primitive[:1+2]`,
/// `threshold:K`, `monomial:C[:1+2]`, `monotone_pair[:1+2[:BASE]]`, `tree_edit_pair`.
impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let number = |x: &str| x.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{x}'")));
        match head {
            "random_table" => Ok(Family::RandomTable),
            "mobius_sparse" => Ok(Family::MobiusSparse {
                density: rest.map(number).transpose()?.unwrap_or(0.3),
            }),
            "primitive" => Ok(Family::Primitive {
                support: parse_support(rest)?,
            }),
            "threshold" => {
                let k = rest
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| Error::Parse("threshold family needs threshold:K".into()))?;
                Ok(Family::Threshold { k })
            }
            "monomial" => {
                let rest = rest.ok_or_else(|| Error::Parse("monomial family needs monomial:C".into()))?;
                let (c, support) = match rest.split_once(':') {
                    Some((c, r)) => (c, Some(r)),
                    None => (rest, None),
                };
                Ok(Family::Monomial {
                    c: number(c)?,
                    support: parse_support(support)?,
                })
            }
            "monotone_pair" => {
                let (subset, base) = match rest.map(|r| r.split_once(':').unwrap_or((r, ""))) {
                    Some((subset, base)) => (parse_support(Some(subset))?, base),
                    None => (None, ""),
                };
                let base = if base.is_empty() {
                    Family::RandomTable
                } else {
                    base.parse()?
                };
                if base.is_pair() {
                    return Err(Error::Parse("monotone_pair needs a single-game base family".into()));
                }
                Ok(Family::MonotonePair {
                    subset,
                    epsilon: 0.1,
                    base: Box::new(base),
                })
            }
            "tree_edit_pair" => Ok(Family::TreeEditPair),
            other => Err(Error::Parse(format!("unknown game family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameGenerator {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
}

fn random_coef(rng: &mut ChaCha8Rng) -> f64 {
    let magnitude = rng.random_range(0.25..=2.0);
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// A uniformly random subset of `pool` with exactly `size` members.
fn random_subset_of(rng: &mut ChaCha8Rng, pool: FeatureSet, size: usize) -> FeatureSet {
    let mut members: Vec<usize> = pool.iter().collect();
    members.shuffle(rng);
    members.into_iter().take(size).collect()
}

fn random_subset(rng: &mut ChaCha8Rng, pool: FeatureSet) -> FeatureSet {
    FeatureSet::from_bits(rng.random::<u64>() & pool.bits())
}

impl GameGenerator {
    pub fn new(family: Family, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("games need at least one feature"));
        }
        check_exact(n)?;
        let gen = GameGenerator { family, n, seed };
        gen.validate_family(&gen.family)?;
        Ok(gen)
    }

    fn validate_family(&self, family: &Family) -> Result<()> {
        let n = self.n;
        match family {
            Family::MobiusSparse { density } if !(0.0..=1.0).contains(density) => {
                Err(Error::arg(format!("density must be in [0, 1], got {density}")))
            }
            Family::Primitive { support: Some(r) } | Family::Monomial { support: Some(r), .. } => r.check_fits(n),
            Family::Threshold { k } if *k == 0 || *k > n => {
                Err(Error::arg(format!("threshold k must be in 1..={n}, got {k}")))
            }
            Family::MonotonePair {
                subset, epsilon, base, ..
            } => {
                if !(*epsilon > 0.0 && epsilon.is_finite()) {
                    return Err(Error::arg(format!("epsilon must be positive, got {epsilon}")));
                }
                if let Some(s) = subset {
                    if s.is_empty() {
                        return Err(Error::arg("monotone pair subset is empty"));
                    }
                    s.check_fits(n)?;
                }
                if base.is_pair() {
                    return Err(Error::arg("monotone_pair needs a single-game base family"));
                }
                self.validate_family(base)
            }
            Family::TreeEditPair if n != 4 => {
                Err(Error::arg(format!("the tree edit pair has 4 features, requested {n}")))
            }
            _ => Ok(()),
        }
    }

    /// RNG for one trial; trials are independent streams under the same seed.
    pub fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }

    fn single(&self, family: &Family, rng: &mut ChaCha8Rng) -> Result<TableGame> {
        let n = self.n;
        let full = FeatureSet::full(n);
        match family {
            Family::RandomTable => {
                let values = (0..1usize << n).map(|_| rng.random_range(-1.0..=1.0)).collect();
                TableGame::new(n, values)
            }
            Family::MobiusSparse { density } => {
                let mut coeffs = vec![0.0; 1 << n];
                for c in coeffs.iter_mut().skip(1) {
                    if rng.random_bool(*density) {
                        *c = rng.random_range(-1.0..=1.0);
                    }
                }
                Ok(MobiusCoefficients::new(n, coeffs)?.to_table())
            }
            Family::Primitive { support } => {
                let r = support.unwrap_or_else(|| random_subset(rng, full));
                let c = random_coef(rng);
                TableGame::from_fn(n, |s| if r.is_subset_of(s) { c } else { 0.0 })
            }
            Family::Threshold { k } => TableGame::from_fn(n, |s| if s.len() >= *k { 1.0 } else { 0.0 }),
            Family::Monomial { c, support } => {
                let r = support.unwrap_or(full);
                TableGame::from_fn(n, |s| if r.is_subset_of(s) { *c } else { 0.0 })
            }
            Family::MonotonePair { .. } | Family::TreeEditPair => {
                Err(Error::arg("pair families only support the monotonicity check"))
            }
        }
    }

    /// A single game for trial `trial`.
    pub fn game(&self, trial: u64) -> Result<TableGame> {
        self.single(&self.family, &mut self.trial_rng(trial))
    }
}

/// A concrete instance of an axiom, complete enough to be replayed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Instance {
    /// `I^v(S) = I^{πv}(πS)`; `permutation[i]` is the 1-based image of feature `i + 1`.
    Symmetry {
        game: TableGame,
        permutation: Vec<usize>,
        subset: FeatureSet,
    },
    /// `I^{v_[ij]}(S ∪ [ij]) = I^v(S ∪ i) + I^v(S ∪ j)`.
    Ge {
        game: TableGame,
        pair: FeatureSet,
        subset: FeatureSet,
    },
    /// `I^v(N) = m_N(∅, v)`.
    Limit { game: TableGame },
    /// `I^{greater}(S) > I^{lesser}(S)`.
    Increase {
        greater: TableGame,
        lesser: TableGame,
        subset: FeatureSet,
    },
    /// `I^{first}(S) = I^{second}(S)`.
    Unchanged {
        first: TableGame,
        second: TableGame,
        subset: FeatureSet,
    },
    /// `I^v(S)` equals a known value.
    Value {
        game: TableGame,
        subset: FeatureSet,
        expected: f64,
    },
}

impl Instance {
    /// `(lhs, rhs)` of the instance's relation under `index`.
    pub fn sides(&self, index: IndexKind) -> Result<(f64, f64)> {
        match self {
            Instance::Symmetry {
                game,
                permutation,
                subset,
            } => {
                let perm: Vec<usize> = permutation.iter().map(|&p| p.wrapping_sub(1)).collect();
                let image: FeatureSet = subset.iter().map(|i| perm[i]).collect();
                let permuted = permute_game(game, &perm)?;
                Ok((index.evaluate(game, *subset)?, index.evaluate(&permuted, image)?))
            }
            Instance::Ge { game, pair, subset } => {
                let mut it = pair.iter();
                let (i, j) = match (it.next(), it.next(), it.next()) {
                    (Some(i), Some(j), None) => (i, j),
                    _ => return Err(Error::arg(format!("merge pair {pair:?} must have two features"))),
                };
                let map = MergeMap::pair(game.n(), i, j)?;
                let merged_subset = map.lift(*subset)?.with(map.group_of(i));
                let merged = merge_game(game, map)?;
                let lhs = index.evaluate(&merged, merged_subset)?;
                let rhs = index.evaluate(game, subset.with(i))? + index.evaluate(game, subset.with(j))?;
                Ok((lhs, rhs))
            }
            Instance::Limit { game } => {
                let full = FeatureSet::full(game.n());
                Ok((
                    index.evaluate(game, full)?,
                    discrete_derivative(game, full, FeatureSet::EMPTY)?,
                ))
            }
            Instance::Increase {
                greater,
                lesser,
                subset,
            } => Ok((index.evaluate(greater, *subset)?, index.evaluate(lesser, *subset)?)),
            Instance::Unchanged { first, second, subset } => {
                Ok((index.evaluate(first, *subset)?, index.evaluate(second, *subset)?))
            }
            Instance::Value { game, subset, expected } => Ok((index.evaluate(game, *subset)?, *expected)),
        }
    }

    /// How badly the instance fails under `index`, or `None` if it holds.
    pub fn violation(&self, index: IndexKind) -> Result<Option<Witness>> {
        let (lhs, rhs) = self.sides(index)?;
        let magnitude = match self {
            Instance::Increase { .. } => {
                if lhs - rhs > STRICT_MARGIN {
                    return Ok(None);
                }
                (rhs - lhs).max(0.0)
            }
            _ => {
                let gap = (lhs - rhs).abs();
                if gap <= TOLERANCE {
                    return Ok(None);
                }
                gap
            }
        };
        Ok(Some(Witness {
            instance: self.clone(),
            lhs,
            rhs,
            magnitude,
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub instance: Instance,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs|` for equalities, `max(0, rhs - lhs)` for strict increases.
    pub magnitude: f64,
}

impl Witness {
    /// Re-evaluates the stored instance and returns its violation magnitude.
    pub fn replay(&self, index: IndexKind) -> Result<f64> {
        Ok(self.instance.violation(index)?.map_or(0.0, |w| w.magnitude))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheckResult {
    pub axiom: Axiom,
    pub index: IndexKind,
    pub generator: GameGenerator,
    pub trials: u64,
    pub violations: u64,
    pub worst_witness: Option<Witness>,
}

/// Largest subset size `index` can be evaluated on in an `n`-feature game.
fn order_cap(index: IndexKind, n: usize) -> usize {
    index.max_order().unwrap_or(n).min(n)
}

fn unsupported(axiom: Axiom, index: IndexKind, why: &str) -> Error {
    Error::arg(format!("cannot check {axiom} for {index}: {why}"))
}

fn check_supported(axiom: Axiom, index: IndexKind, gen: &GameGenerator) -> Result<()> {
    let n = gen.n;
    if let IndexKind::ShapleyTaylor { order } = index {
        if order == 0 || order > n {
            return Err(unsupported(axiom, index, "order must be in 1..=n"));
        }
    }
    let pair_family = gen.family.is_pair();
    match axiom {
        Axiom::Monotonicity if !pair_family => {
            return Err(unsupported(
                axiom,
                index,
                "needs paired games (monotone_pair or tree_edit_pair)",
            ))
        }
        Axiom::Monotonicity => {}
        _ if pair_family => return Err(unsupported(axiom, index, "pair families only supply monotonicity")),
        Axiom::PropA1 | Axiom::PropA2 | Axiom::LemmaA3 => {
            let Family::Primitive { support } = gen.family else {
                return Err(unsupported(axiom, index, "needs the primitive family"));
            };
            if axiom == Axiom::PropA1 && support == Some(FeatureSet::full(n)) {
                return Err(unsupported(axiom, index, "every set lies inside R = N"));
            }
            if axiom == Axiom::LemmaA3 && support.is_some_and(|r| r.len() > order_cap(index, n)) {
                return Err(unsupported(axiom, index, "index is not defined on R"));
            }
        }
        Axiom::Ge => {
            if n < 2 {
                return Err(unsupported(axiom, index, "merging needs two features"));
            }
            if let IndexKind::ShapleyTaylor { order } = index {
                if order > n - 1 {
                    return Err(unsupported(axiom, index, "order exceeds the merged game size"));
                }
            }
        }
        Axiom::Limit if order_cap(index, n) < n => {
            return Err(unsupported(axiom, index, "index is not defined on the grand coalition"))
        }
        _ => {}
    }
    match &gen.family {
        Family::TreeEditPair if order_cap(index, n) < 2 => {
            return Err(unsupported(axiom, index, "the tree edit compares a pair of features"))
        }
        Family::MonotonePair { subset: Some(s), .. } if s.len() > order_cap(index, n) => {
            return Err(unsupported(axiom, index, "index is not defined on the chosen subset"))
        }
        _ => {}
    }
    Ok(())
}

/// Random nonempty subset of `pool` with at most `cap` members.
fn random_small_subset(rng: &mut ChaCha8Rng, pool: FeatureSet, cap: usize) -> FeatureSet {
    let size = rng.random_range(1..=cap.min(pool.len()).max(1));
    random_subset_of(rng, pool, size)
}

fn tree_edit_tables() -> Result<(TableGame, TableGame)> {
    let before = materialize_table(&census_game(census_tree())?)?;
    let after = materialize_table(&census_game(census_tree_edited())?)?;
    Ok((after, before))
}

/// Instances of `axiom` for one trial.
fn build_instances(axiom: Axiom, index: IndexKind, gen: &GameGenerator, trial: u64) -> Result<Vec<Instance>> {
    let n = gen.n;
    let cap = order_cap(index, n);
    let full = FeatureSet::full(n);
    let mut rng = gen.trial_rng(trial);
    let rng = &mut rng;
    Ok(match axiom {
        Axiom::Symmetry => {
            let game = gen.single(&gen.family, rng)?;
            let mut perm: Vec<usize> = (1..=n).collect();
            perm.shuffle(rng);
            let subset = random_small_subset(rng, full, cap);
            vec![Instance::Symmetry {
                game,
                permutation: perm,
                subset,
            }]
        }
        Axiom::Ge => {
            let game = gen.single(&gen.family, rng)?;
            let pair = random_subset_of(rng, full, 2);
            let rest = full.difference(pair);
            let size = rng.random_range(0..=rest.len().min(cap - 1));
            let subset = random_subset_of(rng, rest, size);
            vec![Instance::Ge { game, pair, subset }]
        }
        Axiom::Limit => vec![Instance::Limit {
            game: gen.single(&gen.family, rng)?,
        }],
        Axiom::Null => {
            let game = gen.single(&gen.family, rng)?;
            let subset = random_small_subset(rng, full, cap);
            let mut coeffs = mobius_transform(&game)?;
            for (r, c) in coeffs.coeffs_mut().iter_mut().enumerate() {
                if subset.is_subset_of(FeatureSet::from_bits(r as u64)) {
                    *c = 0.0;
                }
            }
            vec![Instance::Value {
                game: coeffs.to_table(),
                subset,
                expected: 0.0,
            }]
        }
        Axiom::PropA1 | Axiom::PropA2 | Axiom::LemmaA3 => {
            let Family::Primitive { support } = gen.family else {
                unreachable!("checked by check_supported")
            };
            let r = match (support, axiom) {
                (Some(r), _) => r,
                // R must leave room for a set outside it
                (None, Axiom::PropA1) => {
                    let size = rng.random_range(0..n);
                    random_subset_of(rng, full, size)
                }
                (None, _) => {
                    let size = rng.random_range(1..=n.min(cap));
                    random_subset_of(rng, full, size)
                }
            };
            let c = random_coef(rng);
            let game = TableGame::from_fn(n, |s| if r.is_subset_of(s) { c } else { 0.0 })?;
            let (subset, expected) = match axiom {
                Axiom::PropA1 => {
                    let outside = random_subset_of(rng, full.difference(r), 1);
                    let extra = random_subset(rng, full.difference(outside));
                    let mut subset = outside;
                    for i in extra.iter() {
                        if subset.len() < cap {
                            subset = subset.with(i);
                        }
                    }
                    (subset, 0.0)
                }
                Axiom::PropA2 if r.is_empty() => (r, c),
                Axiom::PropA2 => {
                    let subset = random_small_subset(rng, r, cap);
                    (subset, c / f64::powi(2.0, (r.len() - subset.len()) as i32))
                }
                _ => (r, c),
            };
            if subset.is_empty() {
                // the empty set is outside every index's domain
                return Ok(Vec::new());
            }
            vec![Instance::Value { game, subset, expected }]
        }
        Axiom::Monotonicity => match &gen.family {
            Family::TreeEditPair => {
                let (greater, lesser) = tree_edit_tables()?;
                vec![Instance::Increase {
                    greater,
                    lesser,
                    subset: FeatureSet::pair(MS, CG),
                }]
            }
            Family::MonotonePair { subset, epsilon, base } => {
                let lesser = gen.single(base, rng)?;
                let s = subset.unwrap_or_else(|| random_small_subset(rng, full, cap));
                let t_star = random_subset(rng, full.difference(s));
                let bump = s.union(t_star);
                let greater = TableGame::from_fn(n, |t| {
                    lesser.value(t) + if bump.is_subset_of(t) { *epsilon } else { 0.0 }
                })?;
                // second clause: a term p^R with S ⊄ R leaves every m_S(T, ·) unchanged
                let dropped = random_subset_of(rng, s, 1);
                let r = random_subset(rng, full).difference(dropped);
                let delta = random_coef(rng);
                let shifted = TableGame::from_fn(n, |t| lesser.value(t) + if r.is_subset_of(t) { delta } else { 0.0 })?;
                vec![
                    Instance::Increase {
                        greater,
                        lesser: lesser.clone(),
                        subset: s,
                    },
                    Instance::Unchanged {
                        first: shifted,
                        second: lesser,
                        subset: s,
                    },
                ]
            }
            _ => unreachable!("checked by check_supported"),
        },
    })
}

/// Runs `trials` seeded instances of `axiom` for `index`.
///
/// A trial counts as one violation if any of its instances fails; the
/// witness with the largest magnitude (earliest trial on ties) is kept.
pub fn check_axiom(axiom: Axiom, index: IndexKind, gen: &GameGenerator, trials: u64) -> Result<AxiomCheckResult> {
    check_supported(axiom, index, gen)?;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut worst: Option<Witness> = None;
            for inst in build_instances(axiom, index, gen, trial)? {
                if let Some(w) = inst.violation(index)? {
                    if worst.as_ref().is_none_or(|b| w.magnitude > b.magnitude) {
                        worst = Some(w);
                    }
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = outcomes.iter().filter(|w| w.is_some()).count() as u64;
    let worst_witness = outcomes
        .into_iter()
        .flatten()
        .fold(None, |best: Option<Witness>, w| match best {
            Some(b) if b.magnitude >= w.magnitude => Some(b),
            _ => Some(w),
        });
    Ok(AxiomCheckResult {
        axiom,
        index,
        generator: gen.clone(),
        trials,
        violations,
        worst_witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdAudit {
    pub n: usize,
    pub k: usize,
    pub bii_pair: f64,
    pub sii_pair: f64,
    pub st_pair: f64,
}

/// Pairwise indices of features 1 and 2 in the game `v(S) = 1` iff `|S| >= k`.
pub fn threshold_game_audit(n: usize, k: usize) -> Result<ThresholdAudit> {
    if n > 16 {
        return Err(Error::Capacity {
            what: "threshold audit size",
            requested: n,
            limit: 16,
        });
    }
    if k < 2 || k + 1 > n {
        return Err(Error::arg(format!(
            "threshold k must be in 2..={}, got {k}",
            n.saturating_sub(1)
        )));
    }
    let v = TableGame::from_fn(n, |s| if s.len() >= k { 1.0 } else { 0.0 })?;
    let pair = FeatureSet::pair(0, 1);
    Ok(ThresholdAudit {
        n,
        k,
        bii_pair: bii_exact(&v, pair)?,
        sii_pair: sii_exact(&v, pair)?,
        st_pair: shapley_taylor(&v, pair, 2)?,
    })
}
