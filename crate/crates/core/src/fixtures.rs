//! A small income-prediction tree over four census features.
//!
//! Model columns are `ms_married, ms_single, CG, A, EL` (marital status is
//! one-hot encoded); game features are `MS, CG, A, EL`. The tree pins these
//! predictions for the point of interest `MS=married, CG=6021, A=32, EL=13`
//! against the baseline `MS=none, CG=0, A=37, EL=10`:
//!
//! | coalition      | prediction |
//! |----------------|-----------:|
//! | none           | 0.03 |
//! | {A, EL}        | 0.15 |
//! | {A, EL, MS}    | 0.67 |
//! | {A, EL, CG}    | 0.15 |
//! | all            | 1.00 |
//!
//! Other leaf values (0.40, 0.08, 0.30) are filler chosen only to keep the
//! tree a plausible probability model. [`census_tree_edited`] lowers the 0.67
//! leaf to 0.01.

use crate::error::Result;
use crate::game::FeatureEffectGame;
use crate::models::{DatasetSchema, DecisionTree};

pub const CENSUS_TREE_JSON: &str = include_str!("../fixtures/census_tree.json");
pub const CENSUS_SCHEMA_JSON: &str = include_str!("../fixtures/census_schema.json");
pub const CENSUS_SAMPLE_CSV: &str = include_str!("../fixtures/census_sample.csv");

pub const CENSUS_FEATURES: [&str; 4] = ["MS", "CG", "A", "EL"];
pub const CENSUS_POI: [f64; 5] = [1.0, 0.0, 6021.0, 32.0, 13.0];
pub const CENSUS_BASELINE: [f64; 5] = [0.0, 0.0, 0.0, 37.0, 10.0];

/// Id of the leaf reached by `{A, EL, MS}`.
pub const EDITED_LEAF: u64 = 12;

pub const MS: usize = 0;
pub const CG: usize = 1;
pub const A: usize = 2;
pub const EL: usize = 3;

pub fn census_tree() -> DecisionTree {
    DecisionTree::from_json_str(CENSUS_TREE_JSON).expect("census fixture is a valid tree")
}

pub fn census_tree_edited() -> DecisionTree {
    census_tree()
        .with_leaf_value(EDITED_LEAF, 0.01)
        .expect("edited leaf exists")
}

pub fn census_schema() -> DatasetSchema {
    DatasetSchema::from_json_str(CENSUS_SCHEMA_JSON).expect("census schema is valid")
}

/// Column groups of the four game features.
pub fn census_groups() -> Vec<Vec<usize>> {
    vec![vec![0, 1], vec![2], vec![3], vec![4]]
}

pub fn census_game(tree: DecisionTree) -> Result<FeatureEffectGame<DecisionTree>> {
    FeatureEffectGame::with_groups(tree, CENSUS_POI.to_vec(), CENSUS_BASELINE.to_vec(), census_groups())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Game;
    use crate::models::{build_baseline, BaselineSpec, Dataset, Model};
    use crate::subsets::FeatureSet;

    #[test]
    fn pinned_predictions() {
        let game = census_game(census_tree()).unwrap();
        let predict = |members: &[usize]| {
            let s: FeatureSet = members.iter().copied().collect();
            game.value(s) + game.offset()
        };
        assert_eq!(game.offset(), 0.03);
        assert!((predict(&[A, EL]) - 0.15).abs() < 1e-12);
        assert!((predict(&[A, EL, MS]) - 0.67).abs() < 1e-12);
        assert!((predict(&[A, EL, CG]) - 0.15).abs() < 1e-12);
        assert!((predict(&[MS, CG, A, EL]) - 1.00).abs() < 1e-12);
    }

    #[test]
    fn shape() {
        let tree = census_tree();
        assert_eq!(tree.leaf_ids(), vec![6, 7, 8, 9, 11, 12, 10]);
        let mut x = CENSUS_BASELINE;
        x[0] = 1.0;
        x[3] = 32.0;
        x[4] = 13.0;
        assert_eq!(tree.leaf_for(&x), EDITED_LEAF);
        assert_eq!(census_tree_edited().predict(&x), 0.01);
    }

    #[test]
    fn sample_medians_match_baseline() {
        let ds = Dataset::from_csv_reader(CENSUS_SAMPLE_CSV.as_bytes(), census_schema()).unwrap();
        let baseline = build_baseline(&ds, &BaselineSpec::auto(&ds.schema)).unwrap();
        assert_eq!(baseline, CENSUS_BASELINE.to_vec());
        let names: Vec<String> = ds.schema.feature_groups().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, CENSUS_FEATURES);
    }
}
