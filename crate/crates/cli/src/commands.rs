//! Subcommand implementations. Each returns the text to print.

use std::io::Read;
use std::path::PathBuf;

use bii_core::axioms::{check_axiom, Axiom, AxiomCheckResult, Family, GameGenerator};
use bii_core::game::materialize_table;
use bii_core::indices::ReportMetadata;
use bii_core::polyfit::{fit_polynomial, topdegree_equals_bii, PolynomialFit};
use bii_core::sampling::{plan_samples, sample_report, SamplePlan};
use bii_core::{compute_report, Error, Game, IndexKind, InteractionReport, TableGame};
use clap::Args;
use serde::Serialize;

use crate::document::{default_names, ReportDocument, SamplingPlan, SCHEMA_VERSION};
use crate::error::CliError;
use crate::heatmap::{render, HeatmapFormat};
use crate::source::{format_row, GameSource, ModelArgs};

#[derive(Debug, Clone, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub source: ModelArgs,

    /// bii, sii, staylor[K], setqii (= setqii-off), setqii-on, setqii-off,
    /// banzhaf, shapley, additive-banzhaf, additive-shapley.
    #[arg(long, default_value = "bii")]
    pub index: String,

    /// Largest subset size to report.
    #[arg(long, default_value_t = 2)]
    pub order: usize,

    /// Enumerate all coalitions (the default unless sampling flags are given).
    #[arg(long, conflicts_with_all = ["samples", "epsilon", "delta"])]
    pub exact: bool,

    /// Monte-Carlo draws per subset (bii only).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..), conflicts_with_all = ["epsilon", "delta"])]
    pub samples: Option<u64>,

    /// Seed for sampled mode.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Target absolute error; with --delta, picks the sample count.
    #[arg(long, requires = "delta")]
    pub epsilon: Option<f64>,

    /// Allowed failure probability for --epsilon.
    #[arg(long, requires = "epsilon")]
    pub delta: Option<f64>,

    /// Bound on |f(x) - f(baseline)| used by the --epsilon/--delta plan.
    #[arg(long, default_value_t = 1.0, requires = "epsilon")]
    pub bound: f64,

    /// Write the document here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: ModelArgs,

    /// Two or more indices, repeated or comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub index: Vec<String>,

    #[arg(long, default_value_t = 2)]
    pub order: usize,

    /// Accepted for symmetry with `explain`; comparisons are always exact.
    #[arg(long)]
    pub exact: bool,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CheckAxiomsArgs {
    #[arg(long)]
    pub index: String,

    /// Number of features in the generated games.
    #[arg(long)]
    pub n: usize,

    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,

    #[arg(long)]
    pub seed: u64,

    /// Game family for every axiom, e.g. random_table, primitive:1+2, monotone_pair:1+2:monomial:2.
    /// By default each axiom uses its natural family.
    #[arg(long)]
    pub family: Option<String>,

    /// Run a single axiom instead of every applicable one.
    #[arg(long)]
    pub axiom: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct PolyfitArgs {
    #[command(flatten)]
    pub source: ModelArgs,

    /// A `{"n":..,"values":[..]}` table game instead of a model.
    #[arg(long, conflicts_with_all = ["model", "poi", "dataset", "schema"])]
    pub game: Option<PathBuf>,

    #[arg(long)]
    pub degree: usize,
}

#[derive(Debug, Clone, Args)]
pub struct HeatmapArgs {
    /// Report document to render, or `-` for stdin.
    pub report: PathBuf,

    #[arg(long, value_enum, default_value_t = HeatmapFormat::Ascii)]
    pub format: HeatmapFormat,

    /// Which report of a comparison document to render.
    #[arg(long)]
    pub index: Option<String>,
}

/// Parses an index name; a bare `staylor` takes the report order.
pub fn parse_index(name: &str, order: usize) -> Result<IndexKind, CliError> {
    let kind = match name {
        "setqii" => IndexKind::SetQiiOff,
        "staylor" => IndexKind::ShapleyTaylor { order },
        other => other.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?,
    };
    Ok(kind)
}

fn metadata(src: &GameSource, seed: Option<u64>) -> ReportMetadata {
    ReportMetadata {
        model: Some(src.model.clone()),
        poi: Some(format_row(&src.poi)),
        baseline: Some(format_row(&src.baseline)),
        seed,
    }
}

pub fn explain(args: &ExplainArgs) -> Result<String, CliError> {
    let kind = parse_index(&args.index, args.order)?;
    let src = GameSource::from_args(&args.source)?;
    let plan = match (args.epsilon, args.delta) {
        (Some(epsilon), Some(delta)) => {
            let sizing = SamplePlan::new(epsilon, delta, args.bound)?;
            Some(SamplingPlan {
                epsilon,
                delta,
                bound: args.bound,
                samples: plan_samples(&sizing, args.order).max(2),
            })
        }
        _ => None,
    };
    let samples = args.samples.or(plan.map(|p| p.samples));
    let report = match samples {
        None => {
            let mut r = compute_report(src.game.as_ref(), kind, args.order)?;
            r.metadata = metadata(&src, None);
            r
        }
        Some(samples) => {
            if kind != IndexKind::Bii {
                return Err(CliError::Usage(format!(
                    "sampling is only available for bii, not {kind}"
                )));
            }
            let seed = args
                .seed
                .ok_or_else(|| CliError::Usage("sampled mode needs --seed".into()))?;
            let mut r = sample_report(src.game.as_ref(), args.order, samples, seed)?;
            r.metadata = metadata(&src, Some(seed));
            r
        }
    };
    Ok(ReportDocument::single(src.feature_names, report, plan).to_json())
}

pub fn compare(args: &CompareArgs) -> Result<String, CliError> {
    if args.index.len() < 2 {
        return Err(CliError::Usage("compare needs at least two --index values".into()));
    }
    let kinds = args
        .index
        .iter()
        .map(|name| parse_index(name, args.order))
        .collect::<Result<Vec<_>, _>>()?;
    let src = GameSource::from_args(&args.source)?;
    let reports = kinds
        .into_iter()
        .map(|kind| {
            let mut r = compute_report(src.game.as_ref(), kind, args.order)?;
            r.metadata = metadata(&src, None);
            Ok(r)
        })
        .collect::<Result<Vec<InteractionReport>, Error>>()?;
    Ok(ReportDocument::compare(src.feature_names.clone(), reports).to_json())
}

#[derive(Serialize)]
struct AxiomSummary {
    schema_version: &'static str,
    index: IndexKind,
    n: usize,
    trials: u64,
    seed: u64,
    total_violations: u64,
    results: Vec<AxiomCheckResult>,
}

/// The family an axiom is checked on when none is given.
fn default_family(axiom: Axiom) -> Family {
    match axiom {
        Axiom::Monotonicity => Family::monotone_pair(Family::RandomTable),
        Axiom::PropA1 | Axiom::PropA2 | Axiom::LemmaA3 => Family::Primitive { support: None },
        _ => Family::RandomTable,
    }
}

/// Returns the summary and whether a BII run found a violation.
pub fn check_axioms(args: &CheckAxiomsArgs) -> Result<(String, bool), CliError> {
    let index = parse_index(&args.index, 2)?;
    let family = args
        .family
        .as_deref()
        .map(|f| f.parse::<Family>())
        .transpose()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let axioms = match args.axiom.as_deref() {
        Some(a) => vec![a.parse::<Axiom>().map_err(|e| CliError::Usage(e.to_string()))?],
        None => Axiom::ALL.to_vec(),
    };
    let explicit = args.axiom.is_some();

    let mut results = Vec::new();
    for axiom in axioms {
        let gen = GameGenerator::new(
            family.clone().unwrap_or_else(|| default_family(axiom)),
            args.n,
            args.seed,
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;
        match check_axiom(axiom, index, &gen, args.trials) {
            Ok(r) => results.push(r),
            // an axiom that does not apply to this index or family is skipped unless asked for by name
            Err(Error::Argument(_)) if !explicit => {}
            Err(Error::Argument(msg)) => return Err(CliError::Usage(msg)),
            Err(e) => return Err(e.into()),
        }
    }
    if results.is_empty() {
        return Err(CliError::Usage(format!("no axiom applies to {index} on this family")));
    }
    let total_violations = results.iter().map(|r| r.violations).sum();
    let summary = AxiomSummary {
        schema_version: SCHEMA_VERSION,
        index,
        n: args.n,
        trials: args.trials,
        seed: args.seed,
        total_violations,
        results,
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("summaries always serialize");
    text.push('\n');
    Ok((text, index == IndexKind::Bii && total_violations > 0))
}

#[derive(Serialize)]
struct PolyfitDocument<'a> {
    schema_version: &'static str,
    feature_names: Vec<String>,
    fit: &'a PolynomialFit,
    /// Largest gap between a top-degree coefficient and the matching BII.
    topdegree_equals_bii: f64,
}

pub fn polyfit(args: &PolyfitArgs) -> Result<String, CliError> {
    let (table, names) = match &args.game {
        Some(path) => {
            let table = TableGame::from_json_str(&std::fs::read_to_string(path).map_err(Error::from)?)?;
            let names = default_names(table.n());
            (table, names)
        }
        None => {
            let src = GameSource::from_args(&args.source)?;
            (materialize_table(src.game.as_ref())?, src.feature_names)
        }
    };
    let fit = fit_polynomial(&table, args.degree)?;
    let gap = topdegree_equals_bii(&table, args.degree)?;
    let doc = PolyfitDocument {
        schema_version: SCHEMA_VERSION,
        feature_names: names,
        fit: &fit,
        topdegree_equals_bii: gap,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("fits always serialize");
    text.push('\n');
    Ok(text)
}

pub fn heatmap(args: &HeatmapArgs) -> Result<String, CliError> {
    let text = if args.report.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(Error::from)?;
        buf
    } else {
        std::fs::read_to_string(&args.report).map_err(Error::from)?
    };
    let doc: ReportDocument = serde_json::from_str(&text).map_err(Error::from)?;
    doc.validate()?;
    let reports = doc.reports();
    let report = match (&args.index, reports.as_slice()) {
        (None, [only]) => *only,
        (None, _) => {
            return Err(CliError::Usage(
                "the document holds several reports; pick one with --index".into(),
            ))
        }
        (Some(name), _) => reports
            .iter()
            .copied()
            .find(|r| r.kind.to_string() == *name || parse_index(name, r.order).is_ok_and(|k| k == r.kind))
            .ok_or_else(|| CliError::Usage(format!("no '{name}' report in the document")))?,
    };
    Ok(render(report, &doc.feature_names, args.format))
}
