//! Exact and sampled interaction indices for black-box model explanations.
//!
//! A model `f`, a point of interest `x` and a baseline `x'` induce the game
//! `v(S) = f(x_S, x'_{N\S}) - f(x')`. The crate computes the Banzhaf
//! interaction index of that game (exactly for up to 24 features, by sampling
//! above that), the competing indices it is usually compared against, the
//! least-squares polynomial whose top-degree coefficients equal it, and a
//! randomized harness that checks the defining axioms.

pub mod axioms;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod indices;
pub mod mobius;
pub mod models;
pub mod polyfit;
pub mod reduce;
pub mod sampling;
pub mod subsets;

pub use error::{Error, Result};
pub use game::{feature_effect_game, FeatureEffectGame, Game, GameKind, TableGame};
pub use indices::{compute_report, IndexKind, InteractionReport, Mode};
pub use subsets::FeatureSet;
