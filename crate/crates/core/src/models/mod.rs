//! Black-box model adapters.

mod dataset;
mod tree;

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::subsets::{check_exact, FeatureSet};

pub use dataset::{build_baseline, BaselineRule, BaselineSpec, ColumnKind, ColumnSpec, Dataset, DatasetSchema};
pub use tree::{DecisionTree, Forest, Node};

/// A deterministic predictor over real feature vectors.
pub trait Model: Send + Sync {
    fn arity(&self) -> usize;

    fn predict(&self, x: &[f64]) -> f64;
}

impl<M: Model + ?Sized> Model for &M {
    fn arity(&self) -> usize {
        (**self).arity()
    }
    fn predict(&self, x: &[f64]) -> f64 {
        (**self).predict(x)
    }
}

impl<M: Model + ?Sized> Model for Box<M> {
    fn arity(&self) -> usize {
        (**self).arity()
    }
    fn predict(&self, x: &[f64]) -> f64 {
        (**self).predict(x)
    }
}

impl<M: Model + ?Sized> Model for Arc<M> {
    fn arity(&self) -> usize {
        (**self).arity()
    }
    fn predict(&self, x: &[f64]) -> f64 {
        (**self).predict(x)
    }
}

/// `f(x) = 1` iff `Σ x_i >= k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdModel {
    n: usize,
    k: usize,
}

impl ThresholdModel {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Model(format!("threshold k must be in 1..={n}, got {k}")));
        }
        Ok(ThresholdModel { n, k })
    }
}

impl Model for ThresholdModel {
    fn arity(&self) -> usize {
        self.n
    }
    fn predict(&self, x: &[f64]) -> f64 {
        if x.iter().sum::<f64>() >= self.k as f64 {
            1.0
        } else {
            0.0
        }
    }
}

/// `f(x) = c Π_{i ∈ support} x_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialModel {
    n: usize,
    c: f64,
    support: FeatureSet,
}

impl MonomialModel {
    pub fn new(n: usize, c: f64, support: FeatureSet) -> Result<Self> {
        if !support.fits(n) {
            return Err(Error::Model(format!("monomial support {support:?} exceeds arity {n}")));
        }
        Ok(MonomialModel { n, c, support })
    }
}

impl Model for MonomialModel {
    fn arity(&self) -> usize {
        self.n
    }
    fn predict(&self, x: &[f64]) -> f64 {
        self.support.iter().fold(self.c, |acc, i| acc * x[i])
    }
}

/// A function on `{0,1}^n` given by its `2^n` values; bit `i` of the index
/// is `x_i >= 0.5`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthTableModel {
    n: usize,
    values: Vec<f64>,
}

impl TruthTableModel {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_exact(n)?;
        if values.len() != 1usize << n {
            return Err(Error::Model(format!(
                "truth table over {n} inputs needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        Ok(TruthTableModel { n, values })
    }
}

impl Model for TruthTableModel {
    fn arity(&self) -> usize {
        self.n
    }
    fn predict(&self, x: &[f64]) -> f64 {
        let idx = x
            .iter()
            .enumerate()
            .filter(|(_, &xi)| xi >= 0.5)
            .fold(0usize, |acc, (i, _)| acc | (1 << i));
        self.values[idx]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFormat {
    TreeJson,
    ForestJson,
    TableJson,
    /// A JSON object such as `{"kind":"threshold","n":5,"k":3}`.
    Builtin,
}

impl FromStr for ModelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree-json" => Ok(ModelFormat::TreeJson),
            "forest-json" => Ok(ModelFormat::ForestJson),
            "table-json" => Ok(ModelFormat::TableJson),
            "builtin" => Ok(ModelFormat::Builtin),
            other => Err(Error::Parse(format!("unknown model format '{other}'"))),
        }
    }
}

impl fmt::Display for ModelFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelFormat::TreeJson => "tree-json",
            ModelFormat::ForestJson => "forest-json",
            ModelFormat::TableJson => "table-json",
            ModelFormat::Builtin => "builtin",
        })
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum BuiltinSpec {
    Threshold {
        n: usize,
        k: usize,
    },
    Monomial {
        n: usize,
        c: f64,
        #[serde(default)]
        support: Option<Vec<usize>>,
    },
}

#[derive(Deserialize)]
struct TableModelFile {
    n: usize,
    values: Vec<f64>,
}

fn build_builtin(spec: BuiltinSpec) -> Result<Arc<dyn Model>> {
    Ok(match spec {
        BuiltinSpec::Threshold { n, k } => Arc::new(ThresholdModel::new(n, k)?),
        BuiltinSpec::Monomial { n, c, support } => {
            let support = match support {
                Some(idx) => FeatureSet::from_one_based(&idx, n).map_err(|e| Error::Model(e.to_string()))?,
                None => FeatureSet::full(n),
            };
            Arc::new(MonomialModel::new(n, c, support)?)
        }
    })
}

/// Parses a model document held in memory.
pub fn parse_model(text: &str, format: ModelFormat) -> Result<Arc<dyn Model>> {
    Ok(match format {
        ModelFormat::TreeJson => Arc::new(DecisionTree::from_json_str(text)?),
        ModelFormat::ForestJson => Arc::new(Forest::from_json_str(text)?),
        ModelFormat::TableJson => {
            let file: TableModelFile = serde_json::from_str(text)?;
            Arc::new(TruthTableModel::new(file.n, file.values)?)
        }
        ModelFormat::Builtin => build_builtin(serde_json::from_str(text)?)?,
    })
}

pub fn load_model(path: impl AsRef<Path>, format: ModelFormat) -> Result<Arc<dyn Model>> {
    let text = std::fs::read_to_string(path)?;
    parse_model(&text, format)
}

/// Parses the inline form `threshold,n=5,k=3` or `monomial,n=3,c=2[,support=1+2]`
/// (an optional `builtin:` prefix is accepted).
pub fn parse_builtin(spec: &str) -> Result<Arc<dyn Model>> {
    let spec = spec.strip_prefix("builtin:").unwrap_or(spec);
    let mut parts = spec.split(',').map(str::trim);
    let kind = parts.next().unwrap_or_default();
    let mut n = None;
    let mut k = None;
    let mut c = None;
    let mut support = None;
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value in builtin spec, got '{part}'")))?;
        let bad = |_| Error::Parse(format!("bad value for '{key}': '{value}'"));
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(bad)?),
            "k" => k = Some(value.parse::<usize>().map_err(bad)?),
            "c" => {
                c = Some(
                    value
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad value for 'c': '{value}'")))?,
                )
            }
            "support" => {
                support = Some(
                    value
                        .split('+')
                        .map(|i| i.parse::<usize>().map_err(bad))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            other => return Err(Error::Parse(format!("unknown builtin parameter '{other}'"))),
        }
    }
    let n = n.ok_or_else(|| Error::Parse("builtin spec needs n=..".into()))?;
    let spec = match kind {
        "threshold" => BuiltinSpec::Threshold {
            n,
            k: k.ok_or_else(|| Error::Parse("threshold spec needs k=..".into()))?,
        },
        "monomial" => BuiltinSpec::Monomial {
            n,
            c: c.unwrap_or(1.0),
            support,
        },
        other => return Err(Error::Parse(format!("unknown builtin model '{other}'"))),
    };
    build_builtin(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{feature_effect_game, materialize_table, Game};

    #[test]
    fn threshold_spec() {
        let m = parse_model(r#"{"kind":"threshold","n":5,"k":3}"#, ModelFormat::Builtin).unwrap();
        assert_eq!(m.predict(&[1.0, 1.0, 1.0, 0.0, 0.0]), 1.0);
        assert_eq!(m.predict(&[1.0, 1.0, 0.0, 0.0, 0.0]), 0.0);
        assert!(parse_model(r#"{"kind":"threshold","n":5,"k":6}"#, ModelFormat::Builtin).is_err());
    }

    #[test]
    fn monomial_spec() {
        let m = parse_model(
            r#"{"kind":"monomial","n":3,"c":2,"support":[1,2,3]}"#,
            ModelFormat::Builtin,
        )
        .unwrap();
        assert_eq!(m.predict(&[1.0, 1.0, 1.0]), 2.0);
        assert_eq!(m.predict(&[1.0, 0.0, 1.0]), 0.0);
        assert!(parse_model(r#"{"kind":"monomial","n":3,"c":2,"support":[4]}"#, ModelFormat::Builtin).is_err());
        assert!(parse_model(r#"{"kind":"lime"}"#, ModelFormat::Builtin).is_err());
    }

    #[test]
    fn inline_builtins() {
        let m = parse_builtin("builtin:monomial,n=3,c=2").unwrap();
        assert_eq!(m.arity(), 3);
        assert_eq!(m.predict(&[1.0; 3]), 2.0);
        let m = parse_builtin("monomial,n=4,c=-1.5,support=2+4").unwrap();
        assert_eq!(m.predict(&[0.0, 1.0, 0.0, 1.0]), -1.5);
        let t = parse_builtin("threshold,n=6,k=2").unwrap();
        assert_eq!(t.predict(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]), 1.0);
        assert!(parse_builtin("threshold,n=6").is_err());
        assert!(parse_builtin("tree,n=6").is_err());
        assert!(parse_builtin("threshold,n=six,k=2").is_err());
    }

    #[test]
    fn truth_table_game_matches_table() {
        for n in 1..=8 {
            let values: Vec<f64> = (0..1u64 << n).map(|b| ((b * 7 + 3) % 13) as f64 / 4.0).collect();
            let json = serde_json::json!({"n": n, "values": values}).to_string();
            let model = parse_model(&json, ModelFormat::TableJson).unwrap();
            let game = materialize_table(&feature_effect_game(model, &vec![1.0; n], &vec![0.0; n]).unwrap()).unwrap();
            for b in 0..1u64 << n {
                let s = FeatureSet::from_bits(b);
                assert_eq!(game.value(s), values[b as usize] - values[0]);
            }
            assert_eq!(game.offset(), values[0]);
        }
        assert!(parse_model(r#"{"n":2,"values":[1,2,3]}"#, ModelFormat::TableJson).is_err());
    }

    #[test]
    fn format_names() {
        for f in ["tree-json", "forest-json", "table-json", "builtin"] {
            assert_eq!(f.parse::<ModelFormat>().unwrap().to_string(), f);
        }
        assert!("onnx".parse::<ModelFormat>().is_err());
    }
}
