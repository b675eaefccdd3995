//! Global least-squares fit of a pseudo-Boolean function by a multilinear
//! polynomial of bounded degree.
//!
//! The fitted function is `f(χ_S) = v(S) + b0` over all `2^n` points of the
//! cube. Adding the constant `b0` only moves the intercept, so the top-degree
//! coefficients are the same whether one fits `f` or `v`; at degree `k` they
//! coincide with the Banzhaf interaction index of each `k`-subset.
//!
//! Degree is a user parameter: the best fit of maximal degree reproduces the
//! function exactly and assigns nothing to lower-order terms, which is why a
//! degree-`k` fit is used to read off order-`k` interactions.

use nalgebra::{DMatrix, DVector};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::{Game, TableGame};
use crate::indices::binomial;
use crate::mobius::mobius_transform;
use crate::subsets::{subsets_of_size, FeatureSet};

/// Largest `n` accepted by the dense solver.
pub const MAX_FIT_FEATURES: usize = 14;

/// Largest design matrix (rows × columns) the dense solver will allocate.
pub const MAX_DESIGN_ENTRIES: usize = 1 << 25;

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFit {
    pub n: usize,
    pub degree: usize,
    /// `(S, φ_S)` ordered by degree then bitmask; `φ_∅` is the intercept.
    pub terms: Vec<(FeatureSet, f64)>,
    /// Sum of squared errors over all `2^n` points.
    pub residual: f64,
}

impl PolynomialFit {
    pub fn coefficient(&self, s: FeatureSet) -> Option<f64> {
        self.terms.iter().find(|(t, _)| *t == s).map(|&(_, c)| c)
    }

    /// `g(χ_x) = Σ_{S ⊆ x} φ_S`.
    pub fn evaluate(&self, x: FeatureSet) -> f64 {
        self.terms
            .iter()
            .filter(|(s, _)| s.is_subset_of(x))
            .map(|&(_, c)| c)
            .sum()
    }

    /// `Σ_x (f(x) - g(x))^2` for another coefficient vector in the same basis.
    pub fn loss_with(&self, target: &TableGame, coefs: &[f64]) -> f64 {
        let offset = target.offset();
        (0..1u64 << self.n)
            .map(|b| {
                let x = FeatureSet::from_bits(b);
                let g: f64 = self
                    .terms
                    .iter()
                    .zip(coefs)
                    .filter(|((s, _), _)| s.is_subset_of(x))
                    .map(|(_, &c)| c)
                    .sum();
                let r = target.value(x) + offset - g;
                r * r
            })
            .sum()
    }
}

#[derive(Serialize)]
struct TermJson {
    subset: FeatureSet,
    coef: f64,
}

impl Serialize for PolynomialFit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|&(subset, coef)| TermJson { subset, coef })
            .collect();
        let mut st = serializer.serialize_struct("PolynomialFit", 4)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("terms", &terms)?;
        st.serialize_field("residual", &self.residual)?;
        st.end()
    }
}

/// Monomials of degree `<= k`, ordered by degree then bitmask.
pub fn monomial_basis(n: usize, k: usize) -> Vec<FeatureSet> {
    (0..=k).flat_map(|d| subsets_of_size(n, d)).collect()
}

fn check_fit_size(n: usize, k: usize) -> Result<usize> {
    if k == 0 || k > n {
        return Err(Error::arg(format!("degree must be in 1..={n}, got {k}")));
    }
    if n > MAX_FIT_FEATURES {
        return Err(Error::Capacity {
            what: "feature count for polynomial fitting",
            requested: n,
            limit: MAX_FIT_FEATURES,
        });
    }
    let cols: usize = (0..=k).map(|d| binomial(n, d) as usize).sum();
    let entries = cols << n;
    if entries > MAX_DESIGN_ENTRIES {
        return Err(Error::Capacity {
            what: "design matrix entries",
            requested: entries,
            limit: MAX_DESIGN_ENTRIES,
        });
    }
    Ok(cols)
}

/// Unique minimizer of `Σ_x [f(x) - g(x)]^2` over multilinear `g` of degree `<= k`,
/// solved by Householder QR of the `2^n × Σ C(n, d)` design matrix.
pub fn fit_polynomial(v: &TableGame, k: usize) -> Result<PolynomialFit> {
    let n = v.n();
    let cols = check_fit_size(n, k)?;
    let basis = monomial_basis(n, k);
    debug_assert_eq!(basis.len(), cols);
    let rows = 1usize << n;
    let design = DMatrix::from_fn(rows, cols, |r, c| {
        if basis[c].is_subset_of(FeatureSet::from_bits(r as u64)) {
            1.0
        } else {
            0.0
        }
    });
    let offset = v.offset();
    let target = DVector::from_iterator(rows, v.values().iter().map(|x| x + offset));

    let qr = design.clone().qr();
    let qt_b = qr.q().transpose() * &target;
    let coefs = qr
        .r()
        .solve_upper_triangular(&qt_b)
        .ok_or_else(|| Error::Data("design matrix is rank deficient".into()))?;
    let residual = (&design * &coefs - &target).norm_squared();

    Ok(PolynomialFit {
        n,
        degree: k,
        terms: basis.into_iter().zip(coefs.iter().copied()).collect(),
        residual,
    })
}

/// Largest `|φ_S - I_BII(S)|` over `|S| = k`, with BII taken from the Möbius route.
pub fn topdegree_equals_bii(v: &TableGame, k: usize) -> Result<f64> {
    let fit = fit_polynomial(v, k)?;
    let bii = mobius_transform(v)?.banzhaf_interactions();
    Ok(fit
        .terms
        .iter()
        .filter(|(s, _)| s.len() == k)
        .map(|(s, phi)| (phi - bii[s.index()]).abs())
        .fold(0.0, f64::max))
}
