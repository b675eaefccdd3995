//! Möbius (Harsanyi) coefficients of a game over the subset lattice.
//!
//! Every game decomposes uniquely as `v = Σ_R c_R p^R`. The coefficients are
//! obtained from a dense table by the in-place subset Möbius pass, `O(n 2^n)`.

use crate::error::{Error, Result};
use crate::game::{Game, GameKind, TableGame};
use crate::subsets::{check_exact, FeatureSet};

#[derive(Debug, Clone, PartialEq)]
pub struct MobiusCoefficients {
    n: usize,
    coeffs: Vec<f64>,
}

fn for_each_bit_pair(values: &mut [f64], n: usize, mut op: impl FnMut(&mut f64, &mut f64)) {
    for bit in 0..n {
        let half = 1usize << bit;
        for block in values.chunks_exact_mut(half * 2) {
            let (lo, hi) = block.split_at_mut(half);
            for (z, o) in lo.iter_mut().zip(hi) {
                op(z, o);
            }
        }
    }
}

impl MobiusCoefficients {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_exact(n)?;
        if coeffs.len() != 1usize << n {
            return Err(Error::arg(format!(
                "expected {} coefficients for {n} features, got {}",
                1usize << n,
                coeffs.len()
            )));
        }
        Ok(MobiusCoefficients { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, r: FeatureSet) -> f64 {
        self.coeffs[r.index()]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// `v(S) = Σ_{R ⊆ S} c_R`, summed term by term.
    pub fn reconstruct(&self, s: FeatureSet) -> f64 {
        s.subsets().map(|r| self.coeff(r)).sum()
    }

    /// Rebuilds the whole game with the subset zeta pass.
    pub fn to_table(&self) -> TableGame {
        let mut values = self.coeffs.clone();
        for_each_bit_pair(&mut values, self.n, |z, o| *o += *z);
        TableGame::new(self.n, values).expect("size already validated")
    }

    /// Banzhaf interaction index of every subset at once:
    /// `I(S) = Σ_{R ⊇ S} c_R / 2^{|R|-|S|}`, computed as a halving superset pass.
    pub fn banzhaf_interactions(&self) -> Vec<f64> {
        let mut values = self.coeffs.clone();
        for_each_bit_pair(&mut values, self.n, |z, o| *z += 0.5 * *o);
        values
    }
}

impl Game for MobiusCoefficients {
    fn n(&self) -> usize {
        self.n
    }
    fn value(&self, s: FeatureSet) -> f64 {
        self.reconstruct(s)
    }
    fn kind(&self) -> GameKind {
        GameKind::LinearCombination
    }
}

/// Möbius transform of a dense game: `coeffs[R] = m_R(∅, v)`.
pub fn mobius_transform(v: &TableGame) -> Result<MobiusCoefficients> {
    let n = v.n();
    check_exact(n)?;
    let mut coeffs = v.values().to_vec();
    for_each_bit_pair(&mut coeffs, n, |z, o| *o -= *z);
    Ok(MobiusCoefficients { n, coeffs })
}
