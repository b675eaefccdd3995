#![allow(dead_code)]

use bii_core::models::{DecisionTree, Forest, Node};
use bii_core::{FeatureSet, Game, TableGame};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_table(n: usize, rng: &mut ChaCha8Rng) -> TableGame {
    let values = (0..1usize << n).map(|_| rng.random_range(-10.0..=10.0)).collect();
    TableGame::new(n, values).unwrap()
}

pub fn set(members: &[usize]) -> FeatureSet {
    members.iter().copied().collect()
}

/// `m_S(T, v)` straight from the alternating sum.
pub fn derivative(v: &impl Game, s: FeatureSet, t: FeatureSet) -> f64 {
    s.subsets()
        .map(|l| {
            let sign = if (s.len() - l.len()).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            sign * v.value(l.union(t))
        })
        .sum()
}

pub fn bii_brute(v: &impl Game, s: FeatureSet) -> f64 {
    let outside = s.complement(v.n());
    let total: f64 = outside.subsets().map(|t| derivative(v, s, t)).sum();
    total / (1u64 << outside.len()) as f64
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (pos, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(pos);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Shapley value as the average marginal contribution over all orderings.
pub fn shapley_by_orderings(v: &impl Game, i: usize) -> f64 {
    let players: Vec<usize> = (0..v.n()).collect();
    let orders = permutations(&players);
    let total: f64 = orders
        .iter()
        .map(|order| {
            let before: FeatureSet = order.iter().take_while(|&&p| p != i).copied().collect();
            v.value(before.with(i)) - v.value(before)
        })
        .sum();
    total / orders.len() as f64
}

/// Shapley interaction index: `S` is fused into one block and we average
/// `m_S(predecessors of the block)` over orderings of the remaining players
/// and the block.
pub fn sii_by_orderings(v: &impl Game, s: FeatureSet) -> f64 {
    const BLOCK: usize = usize::MAX;
    let mut players: Vec<usize> = s.complement(v.n()).iter().collect();
    players.push(BLOCK);
    let orders = permutations(&players);
    let total: f64 = orders
        .iter()
        .map(|order| {
            let before: FeatureSet = order.iter().take_while(|&&p| p != BLOCK).copied().collect();
            derivative(v, s, before)
        })
        .sum();
    total / orders.len() as f64
}

/// Top-order Shapley-Taylor index: average of `m_S(predecessors of the
/// first member of S)` over all orderings of `N`.
pub fn shapley_taylor_by_orderings(v: &impl Game, s: FeatureSet) -> f64 {
    let players: Vec<usize> = (0..v.n()).collect();
    let orders = permutations(&players);
    let total: f64 = orders
        .iter()
        .map(|order| {
            let before: FeatureSet = order.iter().take_while(|&&p| !s.contains(p)).copied().collect();
            derivative(v, s, before)
        })
        .sum();
    total / orders.len() as f64
}

/// Least-squares fit of `target` by monomials `basis` via the normal
/// equations `(XᵀX) φ = Xᵀy`, solved by Gaussian elimination with partial pivoting.
pub fn normal_equations_fit(n: usize, target: &[f64], basis: &[FeatureSet]) -> Vec<f64> {
    let m = basis.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for x in 0..1u64 << n {
        let x = FeatureSet::from_bits(x);
        let active: Vec<usize> = (0..m).filter(|&c| basis[c].is_subset_of(x)).collect();
        for &r in &active {
            for &c in &active {
                a[r][c] += 1.0;
            }
            a[r][m] += target[x.index()];
        }
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for row in 0..m {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, p) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                        *x -= f * p;
                    }
                }
            }
        }
    }
    (0..m).map(|r| a[r][m] / a[r][r]).collect()
}

/// A random binary tree of the given depth over `n` inputs in `[0, 1]`.
pub fn random_tree(n: usize, depth: usize, rng: &mut ChaCha8Rng) -> DecisionTree {
    let mut nodes = Vec::new();
    fn grow(n: usize, depth: usize, rng: &mut ChaCha8Rng, nodes: &mut Vec<(u64, Node)>) -> u64 {
        let id = nodes.len() as u64;
        nodes.push((id, Node::Leaf { value: 0.0 }));
        if depth == 0 {
            nodes[id as usize].1 = Node::Leaf {
                value: rng.random_range(0.0..1.0),
            };
            return id;
        }
        let feature = rng.random_range(0..n);
        let threshold = rng.random_range(0.2..0.8);
        let left = grow(n, depth - 1, rng, nodes) as usize;
        let right = grow(n, depth - 1, rng, nodes) as usize;
        nodes[id as usize].1 = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
    grow(n, depth, rng, &mut nodes);
    DecisionTree::new(n, 0, nodes).unwrap()
}

pub fn random_forest(n: usize, trees: usize, depth: usize, rng: &mut ChaCha8Rng) -> Forest {
    Forest::new((0..trees).map(|_| random_tree(n, depth, rng)).collect()).unwrap()
}

pub fn random_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..1.0)).collect()
}

pub fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
