//! JSON documents emitted and consumed by the CLI.

use bii_core::{FeatureSet, InteractionReport};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

/// Below this magnitude a value counts as zero when comparing signs.
pub const SIGN_TOLERANCE: f64 = 1e-12;

/// Hoeffding sizing used to pick the sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub epsilon: f64,
    pub delta: f64,
    pub bound: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Body {
    Single {
        report: InteractionReport,
    },
    Compare {
        reports: Vec<InteractionReport>,
        disagreements: Vec<Disagreement>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub feature_names: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling_plan: Option<SamplingPlan>,
    #[serde(flatten)]
    pub body: Body,
}

/// Interaction subsets (two or more features) on which two reports disagree in sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub first: String,
    pub second: String,
    pub count: usize,
    pub subsets: Vec<FeatureSet>,
}

impl ReportDocument {
    pub fn single(feature_names: Vec<String>, report: InteractionReport, plan: Option<SamplingPlan>) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION.into(),
            feature_names,
            sampling_plan: plan,
            body: Body::Single { report },
        }
    }

    /// Bundles reports over identical subsets with a sign comparison of every pair.
    pub fn compare(feature_names: Vec<String>, reports: Vec<InteractionReport>) -> Self {
        let mut disagreements = Vec::new();
        for (a, ra) in reports.iter().enumerate() {
            for rb in &reports[a + 1..] {
                disagreements.push(sign_disagreement(ra, rb));
            }
        }
        ReportDocument {
            schema_version: SCHEMA_VERSION.into(),
            feature_names,
            sampling_plan: None,
            body: Body::Compare { reports, disagreements },
        }
    }

    pub fn reports(&self) -> Vec<&InteractionReport> {
        match &self.body {
            Body::Single { report } => vec![report],
            Body::Compare { reports, .. } => reports.iter().collect(),
        }
    }

    /// Checks the version, the name count and every report's subset coverage.
    pub fn validate(&self) -> bii_core::Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(bii_core::Error::Data(format!(
                "unsupported schema_version '{}'",
                self.schema_version
            )));
        }
        for r in self.reports() {
            if r.n != self.feature_names.len() {
                return Err(bii_core::Error::Data(format!(
                    "report has {} features but {} names are given",
                    r.n,
                    self.feature_names.len()
                )));
            }
            r.validate()?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report documents always serialize");
        text.push('\n');
        text
    }
}

fn sign(x: f64) -> i8 {
    if x.abs() <= SIGN_TOLERANCE {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

/// Both reports must cover the same subsets in the same order. Singletons
/// are attributions rather than interactions and are not compared.
pub fn sign_disagreement(a: &InteractionReport, b: &InteractionReport) -> Disagreement {
    debug_assert_eq!(a.entries.len(), b.entries.len());
    let subsets: Vec<FeatureSet> = a
        .entries
        .iter()
        .zip(&b.entries)
        .filter(|(x, y)| x.subset.len() >= 2 && sign(x.value) != sign(y.value))
        .map(|(x, _)| x.subset)
        .collect();
    Disagreement {
        first: a.kind.to_string(),
        second: b.kind.to_string(),
        count: subsets.len(),
        subsets,
    }
}

/// `x1..xn`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use bii_core::{compute_report, IndexKind, TableGame};

    fn cubic() -> TableGame {
        TableGame::from_fn(3, |s| if s.len() == 3 { 2.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn round_trip_is_lossless() {
        let v = TableGame::from_fn(3, |s| (s.bits() as f64).sqrt() / 7.0).unwrap();
        let report = compute_report(&v, IndexKind::Sii, 3).unwrap();
        let doc = ReportDocument::single(default_names(3), report, None);
        let back: ReportDocument = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        back.validate().unwrap();

        let other = compute_report(&v, IndexKind::Bii, 3).unwrap();
        let doc = ReportDocument::compare(default_names(3), vec![back.reports()[0].clone(), other]);
        let again: ReportDocument = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn disagreement_counts_sign_changes_and_zeros() {
        let v = cubic();
        let bii = compute_report(&v, IndexKind::Bii, 2).unwrap();
        let on = compute_report(&v, IndexKind::SetQiiOn, 2).unwrap();
        let d = sign_disagreement(&bii, &on);
        assert_eq!(d.count, 3);
        assert!(d.subsets.iter().all(|s| s.len() == 2));
        assert_eq!(sign_disagreement(&bii, &bii).count, 0);
    }

    #[test]
    fn validate_rejects_name_mismatch() {
        let report = compute_report(&cubic(), IndexKind::Bii, 1).unwrap();
        let doc = ReportDocument::single(default_names(2), report, None);
        assert!(doc.validate().is_err());
    }
}
