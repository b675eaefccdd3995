//! Turning model, point and baseline flags into a game.

use std::path::PathBuf;
use std::sync::Arc;

use bii_core::models::{
    build_baseline, load_model, parse_builtin, BaselineSpec, Dataset, DatasetSchema, Model, ModelFormat,
};
use bii_core::{Error, FeatureEffectGame, Game, Result};
use clap::Args;

use crate::document::default_names;

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Model file, or an inline `builtin:threshold,n=5,k=3` / `builtin:monomial,n=3,c=2[,support=1+2]`.
    #[arg(long)]
    pub model: Option<String>,

    /// tree-json (default), forest-json, table-json, builtin, or an inline `builtin:...` spec.
    #[arg(long)]
    pub format: Option<String>,

    /// Point of interest as a CSV row (`1,0,3.5`) or a JSON array. Builtin models default to all ones.
    #[arg(long)]
    pub poi: Option<String>,

    /// `auto` (dataset medians, or zeros without a dataset) or `file PATH`.
    #[arg(long, num_args = 1..=2, value_names = ["MODE", "PATH"], default_values = ["auto"])]
    pub baseline: Vec<String>,

    /// CSV dataset used for the `auto` baseline; needs --schema.
    #[arg(long, requires = "schema")]
    pub dataset: Option<PathBuf>,

    /// Dataset schema JSON; supplies feature names and one-hot groups.
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

/// A game ready to explain, with one display name per game feature.
pub struct GameSource {
    pub game: Box<dyn Game>,
    pub feature_names: Vec<String>,
    pub model: String,
    pub poi: Vec<f64>,
    pub baseline: Vec<f64>,
}

/// Parses `1,2,3` or `[1,2,3]`.
pub fn parse_row(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.starts_with('[') {
        return Ok(serde_json::from_str(text)?);
    }
    text.split(',')
        .map(|cell| {
            let cell = cell.trim();
            cell.parse::<f64>()
                .map_err(|_| Error::Parse(format!("'{cell}' is not a number")))
        })
        .collect()
}

pub fn format_row(row: &[f64]) -> String {
    row.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Loads the model and returns it with a label for report metadata.
fn load(args: &ModelArgs) -> Result<(Arc<dyn Model>, String)> {
    let inline = |spec: &str| Ok((parse_builtin(spec)?, spec.to_string()));
    let builtin = |s: &str| s.starts_with("builtin:");
    match (args.model.as_deref(), args.format.as_deref()) {
        (None, Some(f)) if builtin(f) => inline(f),
        (None, _) => Err(Error::Argument("--model is required".into())),
        (Some(_), Some(f)) if builtin(f) => Err(Error::Argument(
            "give the builtin spec in either --model or --format, not both".into(),
        )),
        (Some(m), None | Some("builtin")) if builtin(m) => inline(m),
        (Some(m), Some(f)) if builtin(m) => Err(Error::Argument(format!("--format {f} does not take a builtin model"))),
        (Some(m), f) => {
            let format: ModelFormat = f
                .unwrap_or("tree-json")
                .parse()
                .map_err(|e: Error| Error::Argument(e.to_string()))?;
            Ok((load_model(m, format)?, m.to_string()))
        }
    }
}

impl GameSource {
    pub fn from_args(args: &ModelArgs) -> Result<Self> {
        let (model, label) = load(args)?;
        let arity = model.arity();

        let schema = args.schema.as_ref().map(DatasetSchema::load).transpose()?;
        if let Some(schema) = &schema {
            if schema.arity() != arity {
                return Err(Error::Data(format!(
                    "schema has {} columns but the model takes {arity}",
                    schema.arity()
                )));
            }
        }

        let poi = match &args.poi {
            Some(text) => parse_row(text).map_err(|e| Error::Argument(format!("--poi: {e}")))?,
            None if label.starts_with("builtin:") => vec![1.0; arity],
            None => return Err(Error::Argument("--poi is required for model files".into())),
        };

        let baseline = match args.baseline.as_slice() {
            [mode] if mode == "auto" => match (&args.dataset, &schema) {
                (Some(path), Some(schema)) => {
                    let ds = Dataset::from_csv_path(path, schema.clone())?;
                    build_baseline(&ds, &BaselineSpec::auto(schema))?
                }
                _ => vec![0.0; arity],
            },
            [mode, path] if mode == "file" => parse_row(&std::fs::read_to_string(path)?)?,
            other => {
                return Err(Error::Argument(format!(
                    "--baseline expects 'auto' or 'file PATH', got '{}'",
                    other.join(" ")
                )))
            }
        };

        let (groups, feature_names) = match &schema {
            Some(schema) => {
                schema.check_row(&poi)?;
                schema
                    .feature_groups()
                    .into_iter()
                    .map(|(name, cols)| (cols, name))
                    .unzip()
            }
            None => ((0..arity).map(|c| vec![c]).collect(), default_names(arity)),
        };
        let game = FeatureEffectGame::with_groups(model, poi.clone(), baseline.clone(), groups)?;
        Ok(GameSource {
            game: Box::new(game),
            feature_names,
            model: label,
            poi,
            baseline,
        })
    }
}
