//! Exact interaction indices by direct summation over coalitions.
//!
//! All indices here are linear in the discrete derivatives `m_S(T, v)` and
//! differ only in how coalitions `T ⊆ N \ S` are weighted:
//!
//! | index            | weight of `m_S(T)`                                  |
//! |------------------|-----------------------------------------------------|
//! | Banzhaf (BII)    | `1 / 2^{n-s}`                                       |
//! | Shapley (SII)    | `(n-t-s)! t! / (n-s+1)!`                            |
//! | Shapley-Taylor   | `(k/n) / C(n-1, t)` at `s = k`, `[t = 0]` below     |
//!
//! Set-QII is not a weighted sum of derivatives; it reads single game values.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{derivative_unchecked, materialize_table, Game};
use crate::mobius::{mobius_transform, MobiusCoefficients};
use crate::sampling::Estimate;
use crate::subsets::{check_exact, subsets_up_to, FeatureSet};

/// Binomial coefficient, exact for the feature counts used on exact paths.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// `(n-t-s)! t! / (n-s+1)!` as `1 / ((m+1) C(m, t))` with `m = n - s`.
fn sii_weight(n: usize, s: usize, t: usize) -> f64 {
    let m = n - s;
    1.0 / ((m as u128 + 1) * binomial(m, t)) as f64
}

/// `t! (n-t-1)! / n!` as `1 / (n C(n-1, t))`.
fn shapley_weight(n: usize, t: usize) -> f64 {
    1.0 / (n as u128 * binomial(n - 1, t)) as f64
}

fn check_subset<G: Game + ?Sized>(v: &G, s: FeatureSet) -> Result<usize> {
    let n = v.n();
    check_exact(n)?;
    s.check_fits(n)?;
    Ok(n)
}

/// Banzhaf interaction index by direct double summation:
/// `(1 / 2^{n-|S|}) Σ_{T ⊆ N\S} m_S(T, v)`.
pub fn bii_exact<G: Game + ?Sized>(v: &G, s: FeatureSet) -> Result<f64> {
    let n = check_subset(v, s)?;
    let outside = s.complement(n);
    let total: f64 = outside.subsets().map(|t| derivative_unchecked(v, s, t)).sum();
    Ok(total / (1u64 << (n - s.len())) as f64)
}

/// `Σ_{R ⊇ S} c_R / 2^{|R|-|S|}`.
pub fn bii_via_mobius(coeffs: &MobiusCoefficients, s: FeatureSet) -> Result<f64> {
    let n = coeffs.n();
    s.check_fits(n)?;
    Ok(s.complement(n)
        .subsets()
        .map(|u| coeffs.coeff(s.union(u)) / (1u64 << u.len()) as f64)
        .sum())
}

/// Shapley interaction index.
pub fn sii_exact<G: Game + ?Sized>(v: &G, s: FeatureSet) -> Result<f64> {
    let n = check_subset(v, s)?;
    let size = s.len();
    Ok(s.complement(n)
        .subsets()
        .map(|t| sii_weight(n, size, t.len()) * derivative_unchecked(v, s, t))
        .sum())
}

/// Shapley-Taylor index of order `k`.
pub fn shapley_taylor<G: Game + ?Sized>(v: &G, s: FeatureSet, k: usize) -> Result<f64> {
    let n = check_subset(v, s)?;
    if s.is_empty() || s.len() > k || k > n {
        return Err(Error::arg(format!(
            "Shapley-Taylor needs 1 <= |S| <= k <= n, got |S|={}, k={k}, n={n}",
            s.len()
        )));
    }
    if s.len() < k {
        return Ok(derivative_unchecked(v, s, FeatureSet::EMPTY));
    }
    let total: f64 = s
        .complement(n)
        .subsets()
        .map(|t| derivative_unchecked(v, s, t) / binomial(n - 1, t.len()) as f64)
        .sum();
    Ok(k as f64 / n as f64 * total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetQiiVariant {
    /// `v(S)`
    On,
    /// `v(N) - v(N \ S)`
    Off,
}

pub fn set_qii<G: Game + ?Sized>(v: &G, s: FeatureSet, variant: SetQiiVariant) -> Result<f64> {
    let n = v.n();
    s.check_fits(n)?;
    if s.is_empty() {
        return Err(Error::arg("Set-QII needs a nonempty feature set"));
    }
    Ok(match variant {
        SetQiiVariant::On => v.value(s),
        SetQiiVariant::Off => v.value(FeatureSet::full(n)) - v.value(s.complement(n)),
    })
}

fn check_feature<G: Game + ?Sized>(v: &G, i: usize) -> Result<()> {
    if i >= v.n() {
        return Err(Error::arg(format!("feature {} outside 1..={}", i + 1, v.n())));
    }
    Ok(())
}

pub fn banzhaf_value<G: Game + ?Sized>(v: &G, i: usize) -> Result<f64> {
    check_feature(v, i)?;
    bii_exact(v, FeatureSet::singleton(i))
}

pub fn shapley_value<G: Game + ?Sized>(v: &G, i: usize) -> Result<f64> {
    check_feature(v, i)?;
    let n = check_subset(v, FeatureSet::singleton(i))?;
    let s = FeatureSet::singleton(i);
    Ok(s.complement(n)
        .subsets()
        .map(|t| shapley_weight(n, t.len()) * derivative_unchecked(v, s, t))
        .sum())
}

/// Single-feature attribution used as the base of an additive expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingletonIndex {
    Banzhaf,
    Shapley,
}

impl SingletonIndex {
    pub fn value<G: Game + ?Sized>(self, v: &G, i: usize) -> Result<f64> {
        match self {
            SingletonIndex::Banzhaf => banzhaf_value(v, i),
            SingletonIndex::Shapley => shapley_value(v, i),
        }
    }
}

/// `Σ_{i ∈ S} base(v, i)`.
pub fn additive_expansion<G: Game + ?Sized>(base: SingletonIndex, v: &G, s: FeatureSet) -> Result<f64> {
    s.check_fits(v.n())?;
    s.iter().map(|i| base.value(v, i)).sum()
}

/// Serialized by its CLI name (`bii`, `staylor2`, `additive-shapley`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexKind {
    Bii,
    Sii,
    ShapleyTaylor { order: usize },
    SetQiiOn,
    SetQiiOff,
    Banzhaf,
    Shapley,
    Additive { base: SingletonIndex },
}

impl IndexKind {
    /// Evaluates the index on one subset.
    pub fn evaluate<G: Game + ?Sized>(&self, v: &G, s: FeatureSet) -> Result<f64> {
        match *self {
            IndexKind::Bii => bii_exact(v, s),
            IndexKind::Sii => sii_exact(v, s),
            IndexKind::ShapleyTaylor { order } => shapley_taylor(v, s, order),
            IndexKind::SetQiiOn => set_qii(v, s, SetQiiVariant::On),
            IndexKind::SetQiiOff => set_qii(v, s, SetQiiVariant::Off),
            IndexKind::Banzhaf | IndexKind::Shapley => {
                if s.len() != 1 {
                    return Err(Error::arg(format!("{self} is defined on single features, got {s:?}")));
                }
                let i = s.iter().next().expect("one member");
                if *self == IndexKind::Banzhaf {
                    banzhaf_value(v, i)
                } else {
                    shapley_value(v, i)
                }
            }
            IndexKind::Additive { base } => additive_expansion(base, v, s),
        }
    }

    /// Largest subset size the index is defined on, if bounded.
    pub fn max_order(&self) -> Option<usize> {
        match *self {
            IndexKind::Banzhaf | IndexKind::Shapley => Some(1),
            IndexKind::ShapleyTaylor { order } => Some(order),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexKind::Bii => write!(f, "bii"),
            IndexKind::Sii => write!(f, "sii"),
            IndexKind::ShapleyTaylor { order } => write!(f, "staylor{order}"),
            IndexKind::SetQiiOn => write!(f, "setqii-on"),
            IndexKind::SetQiiOff => write!(f, "setqii-off"),
            IndexKind::Banzhaf => write!(f, "banzhaf"),
            IndexKind::Shapley => write!(f, "shapley"),
            IndexKind::Additive {
                base: SingletonIndex::Banzhaf,
            } => write!(f, "additive-banzhaf"),
            IndexKind::Additive {
                base: SingletonIndex::Shapley,
            } => write!(f, "additive-shapley"),
        }
    }
}

impl FromStr for IndexKind {
    type Err = Error;

    /// Accepts the CLI names; a bare `staylor` has order 2 until a report order is known.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bii" => IndexKind::Bii,
            "sii" => IndexKind::Sii,
            "staylor" => IndexKind::ShapleyTaylor { order: 2 },
            "setqii-on" => IndexKind::SetQiiOn,
            "setqii-off" => IndexKind::SetQiiOff,
            "banzhaf" => IndexKind::Banzhaf,
            "shapley" => IndexKind::Shapley,
            "additive-banzhaf" => IndexKind::Additive {
                base: SingletonIndex::Banzhaf,
            },
            "additive-shapley" => IndexKind::Additive {
                base: SingletonIndex::Shapley,
            },
            other => match other.strip_prefix("staylor").map(str::parse::<usize>) {
                Some(Ok(order)) if order >= 1 => IndexKind::ShapleyTaylor { order },
                _ => return Err(Error::arg(format!("unknown index '{other}'"))),
            },
        })
    }
}

impl Serialize for IndexKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IndexKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub subset: FeatureSet,
    pub value: f64,
    #[serde(flatten)]
    pub estimate: Option<EntryEstimate>,
}

/// Sampling diagnostics attached to an entry in sampled mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryEstimate {
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl From<&Estimate> for EntryEstimate {
    fn from(e: &Estimate) -> Self {
        EntryEstimate {
            stderr: e.stderr,
            samples: e.samples,
            seed: e.seed,
        }
    }
}

/// Values of one index for every subset with `1 <= |S| <= order`,
/// ordered by subset size and then bitmask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionReport {
    pub n: usize,
    pub order: usize,
    pub kind: IndexKind,
    pub mode: Mode,
    pub metadata: ReportMetadata,
    pub entries: Vec<ReportEntry>,
}

impl InteractionReport {
    pub fn get(&self, s: FeatureSet) -> Option<f64> {
        self.entries
            .binary_search_by(|e| (e.subset.len(), e.subset).cmp(&(s.len(), s)))
            .ok()
            .map(|i| self.entries[i].value)
    }

    /// Checks that entries cover each subset with `1 <= |S| <= order` exactly once.
    pub fn validate(&self) -> Result<()> {
        let want = subsets_up_to(self.n, self.order);
        if want.len() != self.entries.len() || want.iter().zip(&self.entries).any(|(s, e)| *s != e.subset) {
            return Err(Error::Data(format!(
                "report entries do not cover all subsets of size 1..={}",
                self.order
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_order(n: usize, order: usize) -> Result<()> {
    if order == 0 || order > n {
        return Err(Error::arg(format!("order must be in 1..={n}, got {order}")));
    }
    Ok(())
}

/// Computes `kind` for every subset up to `order`.
///
/// The game is materialized once; BII entries come from a single Möbius
/// transform, the rest are summed directly per subset in parallel.
pub fn compute_report<G: Game + ?Sized>(v: &G, kind: IndexKind, order: usize) -> Result<InteractionReport> {
    let n = v.n();
    check_exact(n)?;
    check_order(n, order)?;
    if let Some(max) = kind.max_order() {
        if order > max {
            return Err(Error::arg(format!("{kind} is defined only up to order {max}")));
        }
    }
    let table = materialize_table(v)?;
    let subsets = subsets_up_to(n, order);
    let values: Vec<f64> = match kind {
        IndexKind::Bii => {
            let all = mobius_transform(&table)?.banzhaf_interactions();
            subsets.iter().map(|s| all[s.index()]).collect()
        }
        IndexKind::Banzhaf | IndexKind::Shapley | IndexKind::Additive { .. } => {
            let base = match kind {
                IndexKind::Shapley
                | IndexKind::Additive {
                    base: SingletonIndex::Shapley,
                } => SingletonIndex::Shapley,
                _ => SingletonIndex::Banzhaf,
            };
            let singles = (0..n)
                .into_par_iter()
                .map(|i| base.value(&table, i))
                .collect::<Result<Vec<f64>>>()?;
            subsets.iter().map(|s| s.iter().map(|i| singles[i]).sum()).collect()
        }
        _ => subsets
            .par_iter()
            .map(|&s| kind.evaluate(&table, s))
            .collect::<Result<Vec<f64>>>()?,
    };
    Ok(InteractionReport {
        n,
        order,
        kind,
        mode: Mode::Exact,
        metadata: ReportMetadata::default(),
        entries: subsets
            .into_iter()
            .zip(values)
            .map(|(subset, value)| ReportEntry {
                subset,
                value,
                estimate: None,
            })
            .collect(),
    })
}
