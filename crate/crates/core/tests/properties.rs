mod common;

use bii_core::game::{discrete_derivative, harsanyi_dividend, LinearCombination};
use bii_core::indices::{bii_exact, shapley_taylor, sii_exact};
use bii_core::mobius::{mobius_transform, MobiusCoefficients};
use bii_core::polyfit::{fit_polynomial, monomial_basis};
use bii_core::reduce::{merge_game, permute_game, permute_set, MergeMap};
use bii_core::{FeatureSet, Game, TableGame};
use proptest::prelude::*;

fn table(max_n: usize) -> impl Strategy<Value = TableGame> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-10.0f64..10.0, 1usize << n).prop_map(move |values| TableGame::new(n, values).unwrap())
    })
}

/// A game together with a nonempty subset of its features.
fn table_and_set(min_n: usize, max_n: usize) -> impl Strategy<Value = (TableGame, FeatureSet)> {
    (min_n..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(-10.0f64..10.0, 1usize << n)
                .prop_map(move |values| TableGame::new(n, values).unwrap()),
            1u64..(1u64 << n),
        )
            .prop_map(|(v, bits)| (v, FeatureSet::from_bits(bits)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_reconstructs_every_value(v in table(10)) {
        let coeffs = mobius_transform(&v).unwrap();
        for b in 0..1u64 << v.n() {
            let s = FeatureSet::from_bits(b);
            prop_assert!((coeffs.reconstruct(s) - v.value(s)).abs() < 1e-9);
        }
        let back = coeffs.to_table();
        for (a, b) in back.values().iter().zip(v.values()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn derivative_is_linear_in_the_game(
        (v1, s) in table_and_set(1, 7),
        seed in any::<u64>(),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let n = v1.n();
        let v2 = common::random_table(n, &mut common::rng(seed));
        let mix = LinearCombination::new(n).plus(a, v1.clone()).plus(b, v2.clone());
        for t in s.complement(n).subsets() {
            let lhs = discrete_derivative(&mix, s, t).unwrap();
            let rhs = a * discrete_derivative(&v1, s, t).unwrap() + b * discrete_derivative(&v2, s, t).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn indices_are_symmetric((v, s) in table_and_set(2, 7), seed in any::<u64>()) {
        let n = v.n();
        let perm = common::random_permutation(n, &mut common::rng(seed));
        let pv = permute_game(&v, &perm).unwrap();
        let ps = permute_set(&perm, s);
        prop_assert!((bii_exact(&v, s).unwrap() - bii_exact(&pv, ps).unwrap()).abs() < 1e-9);
        prop_assert!((sii_exact(&v, s).unwrap() - sii_exact(&pv, ps).unwrap()).abs() < 1e-9);
        let k = s.len();
        prop_assert!((shapley_taylor(&v, s, k).unwrap() - shapley_taylor(&pv, ps, k).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn bii_survives_merging_any_pair(v in (2usize..=7).prop_flat_map(|n| {
        prop::collection::vec(-10.0f64..10.0, 1usize << n).prop_map(move |values| TableGame::new(n, values).unwrap())
    })) {
        let n = v.n();
        for i in 0..n {
            for j in (i + 1)..n {
                let map = MergeMap::pair(n, i, j).unwrap();
                let merged_feature = map.group_of(i);
                let merged = merge_game(&v, map.clone()).unwrap();
                for s in FeatureSet::pair(i, j).complement(n).subsets() {
                    let lhs = bii_exact(&merged, map.lift(s).unwrap().with(merged_feature)).unwrap();
                    let rhs = bii_exact(&v, s.with(i)).unwrap() + bii_exact(&v, s.with(j)).unwrap();
                    prop_assert!((lhs - rhs).abs() < 1e-9, "i={} j={} S={:?}", i, j, s);
                }
            }
        }
    }

    #[test]
    fn bii_of_everything_is_the_top_dividend(v in table(10)) {
        let full = FeatureSet::full(v.n());
        prop_assert_eq!(bii_exact(&v, full).unwrap(), harsanyi_dividend(&v, full).unwrap());
    }

    #[test]
    fn bumping_derivatives_raises_bii(
        (v, s) in table_and_set(1, 7),
        t_bits in any::<u64>(),
        eps in 0.01f64..1.0,
    ) {
        let n = v.n();
        let t_star = FeatureSet::from_bits(t_bits & s.complement(n).bits());
        let bump = s.union(t_star);
        let up = TableGame::from_fn(n, |t| v.value(t) + if bump.is_subset_of(t) { eps } else { 0.0 }).unwrap();
        for t in s.complement(n).subsets() {
            prop_assert!(discrete_derivative(&up, s, t).unwrap() >= discrete_derivative(&v, s, t).unwrap() - 1e-12);
        }
        prop_assert!(bii_exact(&up, s).unwrap() > bii_exact(&v, s).unwrap() + 1e-12);
    }

    #[test]
    fn null_derivatives_give_zero((v, s) in table_and_set(1, 8)) {
        let n = v.n();
        let mut coeffs = mobius_transform(&v).unwrap().coeffs().to_vec();
        for (r, c) in coeffs.iter_mut().enumerate() {
            if s.is_subset_of(FeatureSet::from_bits(r as u64)) {
                *c = 0.0;
            }
        }
        let w = MobiusCoefficients::new(n, coeffs).unwrap().to_table();
        for t in s.complement(n).subsets() {
            prop_assert!(discrete_derivative(&w, s, t).unwrap().abs() < 1e-9);
        }
        prop_assert!(bii_exact(&w, s).unwrap().abs() < 1e-9);
    }

    #[test]
    fn residual_shrinks_with_degree(v in (1usize..=7).prop_flat_map(|n| {
        prop::collection::vec(-10.0f64..10.0, 1usize << n).prop_map(move |values| TableGame::new(n, values).unwrap())
    })) {
        let n = v.n();
        let mut last = f64::INFINITY;
        for k in 1..=n {
            let r = fit_polynomial(&v, k).unwrap().residual;
            prop_assert!(r <= last + 1e-9 * (1.0 + last.abs().min(1e12)));
            last = r;
        }
        prop_assert!(last < 1e-12 * (1u64 << n) as f64 * 100.0);
    }

    #[test]
    fn fitted_coefficients_are_optimal(v in (2usize..=6).prop_flat_map(|n| {
        prop::collection::vec(-10.0f64..10.0, 1usize << n).prop_map(move |values| TableGame::new(n, values).unwrap())
    }), k_pick in 0usize..6) {
        let n = v.n();
        let k = 1 + k_pick % n;
        let fit = fit_polynomial(&v, k).unwrap();
        let coefs: Vec<f64> = fit.terms.iter().map(|&(_, c)| c).collect();
        let best = fit.loss_with(&v, &coefs);
        for idx in 0..coefs.len() {
            for delta in [1e-3, -1e-3] {
                let mut moved = coefs.clone();
                moved[idx] += delta;
                prop_assert!(fit.loss_with(&v, &moved) > best);
            }
        }
    }

    #[test]
    fn qr_fit_agrees_with_normal_equations(v in (1usize..=7).prop_flat_map(|n| {
        prop::collection::vec(-10.0f64..10.0, 1usize << n).prop_map(move |values| TableGame::new(n, values).unwrap())
    }), k_pick in 0usize..7, offset in -5.0f64..5.0) {
        let n = v.n();
        let k = 1 + k_pick % n;
        let v = v.with_offset(offset);
        let fit = fit_polynomial(&v, k).unwrap();
        let target: Vec<f64> = v.values().iter().map(|x| x + offset).collect();
        let oracle = common::normal_equations_fit(n, &target, &monomial_basis(n, k));
        for ((_, got), want) in fit.terms.iter().zip(&oracle) {
            prop_assert!((got - want).abs() < 1e-7, "{} vs {}", got, want);
        }
    }
}
