//! Text renderings of order-1 and order-2 reports.
//!
//! Cell `(i, j)` with `i < j` holds the pair `{i, j}` and the diagonal holds
//! singletons. Values are bucketed into nine signed levels `-4..=4` relative
//! to the largest magnitude in the report.

use std::fmt::Write;

use bii_core::{FeatureSet, InteractionReport};

use crate::document::SIGN_TOLERANCE;

pub const LEVELS: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum HeatmapFormat {
    Ascii,
    Csv,
}

/// Signed bucket of `x` when the largest magnitude is `scale`.
pub fn bucket(x: f64, scale: f64) -> i32 {
    if scale <= SIGN_TOLERANCE || x.abs() <= SIGN_TOLERANCE {
        return 0;
    }
    ((x / scale) * LEVELS as f64)
        .round()
        .clamp(-LEVELS as f64, LEVELS as f64) as i32
}

/// `0` for the neutral bucket, signed otherwise.
fn level_label(level: i32) -> String {
    if level == 0 {
        "0".into()
    } else {
        format!("{level:+}")
    }
}

/// Matrix cells; `None` below the diagonal and for pairs an order-1 report lacks.
pub fn cells(report: &InteractionReport) -> Vec<Vec<Option<f64>>> {
    let n = report.n;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => None,
                    std::cmp::Ordering::Equal => report.get(FeatureSet::singleton(i)),
                    std::cmp::Ordering::Greater => report.get(FeatureSet::pair(i, j)),
                })
                .collect()
        })
        .collect()
}

pub fn render(report: &InteractionReport, names: &[String], format: HeatmapFormat) -> String {
    if report.order > 2 {
        return render_listing(report);
    }
    match format {
        HeatmapFormat::Ascii => render_ascii(report, names),
        HeatmapFormat::Csv => render_csv(report),
    }
}

fn render_ascii(report: &InteractionReport, names: &[String]) -> String {
    let grid = cells(report);
    let scale = report.entries.iter().map(|e| e.value.abs()).fold(0.0, f64::max);
    let mut out = String::new();
    let _ = writeln!(out, "{} order {} (scale {scale})", report.kind, report.order);
    out.push_str("    ");
    for j in 1..=report.n {
        let _ = write!(out, "{j:>4}");
    }
    out.push('\n');
    for (i, row) in grid.iter().enumerate() {
        let _ = write!(out, "{:>4}", i + 1);
        for cell in row {
            match cell {
                Some(x) => {
                    let _ = write!(out, "{:>4}", level_label(bucket(*x, scale)));
                }
                None => out.push_str("    "),
            }
        }
        out.truncate(out.trim_end_matches(' ').len());
        out.push('\n');
    }
    for (i, name) in names.iter().enumerate() {
        let _ = writeln!(out, "{:>4} = {name}", i + 1);
    }
    out
}

fn render_csv(report: &InteractionReport) -> String {
    let mut out = String::from("i,j,value\n");
    for (i, row) in cells(report).iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            if let Some(x) = cell {
                let _ = writeln!(out, "{},{},{x}", i + 1, j + 1);
            }
        }
    }
    out
}

/// One `subset,value` row per entry, members joined by `+`.
fn render_listing(report: &InteractionReport) -> String {
    let mut out = String::from("subset,value\n");
    for e in &report.entries {
        let members: Vec<String> = e.subset.to_one_based().iter().map(usize::to_string).collect();
        let _ = writeln!(out, "{},{}", members.join("+"), e.value);
    }
    out
}
