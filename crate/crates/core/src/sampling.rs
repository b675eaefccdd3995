//! Monte-Carlo estimation of the Banzhaf interaction index.
//!
//! BII is the mean of `m_S(T, v)` over `T` drawn uniformly from the subsets
//! of `N \ S`, so each draw masks `n - |S|` fair random bits. Draws are split
//! into fixed-size chunks; chunk `c` uses ChaCha stream `c` under the caller's
//! seed, and chunk statistics are merged pairwise in chunk order. The result
//! is therefore bit-identical for a given `(seed, samples)` no matter how many
//! threads do the work.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{derivative_unchecked, Game};
use crate::indices::{check_order, EntryEstimate, IndexKind, InteractionReport, Mode, ReportEntry, ReportMetadata};
use crate::subsets::{subsets_up_to, FeatureSet};

/// Draws per RNG stream.
const CHUNK: u64 = 4096;

/// Most features a sampled derivative may span (each draw costs `2^|S|` evaluations).
pub const MAX_SAMPLED_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub samples: u64,
    /// Standard error of the mean, from the unbiased sample variance.
    pub stderr: f64,
    pub seed: u64,
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.count == 0 {
            return b;
        }
        if b.count == 0 {
            return a;
        }
        let count = a.count + b.count;
        let delta = b.mean - a.mean;
        let mean = if delta == 0.0 {
            a.mean
        } else {
            a.mean + delta * b.count as f64 / count as f64
        };
        let m2 = a.m2 + b.m2 + delta * delta * (a.count as f64 * b.count as f64 / count as f64);
        Moments { count, mean, m2 }
    }
}

fn pairwise_merge(parts: &[Moments]) -> Moments {
    match parts.len() {
        0 => Moments::default(),
        1 => parts[0],
        len => {
            let (l, r) = parts.split_at(len / 2);
            Moments::merge(pairwise_merge(l), pairwise_merge(r))
        }
    }
}

/// Runs `samples` draws of `draw(T)` with `T` uniform over subsets of `outside`.
fn estimate(samples: u64, seed: u64, outside: FeatureSet, draw: impl Fn(FeatureSet) -> f64 + Sync) -> Estimate {
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(samples - c * CHUNK);
            let mut m = Moments::default();
            for _ in 0..len {
                let t = FeatureSet::from_bits(rng.next_u64() & outside.bits());
                m.push(draw(t));
            }
            m
        })
        .collect();
    let total = pairwise_merge(&parts);
    let variance = (total.m2 / (total.count - 1) as f64).max(0.0);
    Estimate {
        value: total.mean,
        samples,
        stderr: (variance / total.count as f64).sqrt(),
        seed,
    }
}

fn check_samples(samples: u64) -> Result<()> {
    if samples < 2 {
        return Err(Error::arg(format!("need at least 2 samples, got {samples}")));
    }
    Ok(())
}

/// One draw of the BII estimator: the derivative `m_S(T, v)`.
pub fn marginal_draw<G: Game + ?Sized>(v: &G, s: FeatureSet, t: FeatureSet) -> f64 {
    derivative_unchecked(v, s, t)
}

/// Unbiased Monte-Carlo estimate of `bii_exact(v, S)`.
pub fn bii_sample<G: Game + ?Sized>(v: &G, s: FeatureSet, samples: u64, seed: u64) -> Result<Estimate> {
    check_samples(samples)?;
    s.check_fits(v.n())?;
    if s.len() > MAX_SAMPLED_ORDER {
        return Err(Error::arg(format!(
            "sampled sets are limited to {MAX_SAMPLED_ORDER} features, got {}",
            s.len()
        )));
    }
    let outside = s.complement(v.n());
    Ok(estimate(samples, seed, outside, |t| marginal_draw(v, s, t)))
}

/// One draw of the pairwise decomposition at coalition `T ⊆ N \ {i, j}`:
/// the merged-pair marginal minus the two single-feature marginals,
/// `[v(T∪ij) - v(T)] - [v(T∪j) - v(T)] - [v(T∪i) - v(T)]`.
pub fn pair_stencil<G: Game + ?Sized>(v: &G, i: usize, j: usize, t: FeatureSet) -> f64 {
    let base = v.value(t);
    let merged = v.value(t.with(i).with(j)) - base;
    let only_j = v.value(t.with(j)) - base;
    let only_i = v.value(t.with(i)) - base;
    merged - only_j - only_i
}

/// Pairwise BII estimated through the merged-pair decomposition.
pub fn bii_pair_decomposed<G: Game + ?Sized>(v: &G, i: usize, j: usize, samples: u64, seed: u64) -> Result<Estimate> {
    check_samples(samples)?;
    let n = v.n();
    if i == j {
        return Err(Error::arg("pair decomposition needs two distinct features"));
    }
    if i >= n || j >= n {
        return Err(Error::arg(format!("feature outside 1..={n}")));
    }
    let outside = FeatureSet::pair(i, j).complement(n);
    Ok(estimate(samples, seed, outside, |t| pair_stencil(v, i, j, t)))
}

/// Sizing inputs for a Hoeffding bound on the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub epsilon: f64,
    pub delta: f64,
    /// A priori bound on `|v(S)|`.
    pub bound: f64,
}

impl SamplePlan {
    pub fn new(epsilon: f64, delta: f64, bound: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::arg(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::arg(format!("delta must be in (0, 1), got {delta}")));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::arg(format!("value bound must be positive, got {bound}")));
        }
        Ok(SamplePlan { epsilon, delta, bound })
    }
}

/// Draws needed so that `P(|estimate - truth| > epsilon) <= delta`.
///
/// A derivative over `s` features sums `2^s` values bounded by `M`, so each
/// draw lies in an interval of width `2^s * 2M`; Hoeffding gives
/// `ceil(width^2 ln(2/delta) / (2 epsilon^2))`.
pub fn plan_samples(plan: &SamplePlan, set_size: usize) -> u64 {
    let width = (1u64 << set_size) as f64 * 2.0 * plan.bound;
    (width * width * (2.0 / plan.delta).ln() / (2.0 * plan.epsilon * plan.epsilon)).ceil() as u64
}

/// Sampled BII for every subset up to `order`, all from the same seed.
pub fn sample_report<G: Game + ?Sized>(v: &G, order: usize, samples: u64, seed: u64) -> Result<InteractionReport> {
    let n = v.n();
    check_order(n, order)?;
    let entries = subsets_up_to(n, order)
        .into_iter()
        .map(|s| {
            let e = bii_sample(v, s, samples, seed)?;
            Ok(ReportEntry {
                subset: s,
                value: e.value,
                estimate: Some(EntryEstimate::from(&e)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InteractionReport {
        n,
        order,
        kind: IndexKind::Bii,
        mode: Mode::Sampled,
        metadata: ReportMetadata {
            seed: Some(seed),
            ..ReportMetadata::default()
        },
        entries,
    })
}
