use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Continuous,
    Onehot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    /// Name of the categorical feature an indicator column belongs to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

/// Column sidecar for a CSV file: `{"columns":[{"name","kind","group"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSchema {
    pub columns: Vec<ColumnSpec>,
}

impl DatasetSchema {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let schema: DatasetSchema = serde_json::from_str(text)?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(Error::Data("schema lists no columns".into()));
        }
        for (i, col) in self.columns.iter().enumerate() {
            if col.kind == ColumnKind::Onehot && col.group.is_none() {
                return Err(Error::Data(format!(
                    "column {} ('{}') is one-hot but names no group",
                    i + 1,
                    col.name
                )));
            }
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    /// Game features in order of first appearance: each continuous column is
    /// its own feature, each one-hot group is one feature over its columns.
    pub fn feature_groups(&self) -> Vec<(String, Vec<usize>)> {
        let mut out: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, col) in self.columns.iter().enumerate() {
            match (&col.kind, &col.group) {
                (ColumnKind::Onehot, Some(g)) => match out.iter_mut().find(|(name, _)| name == g) {
                    Some((_, cols)) => cols.push(i),
                    None => out.push((g.clone(), vec![i])),
                },
                _ => out.push((col.name.clone(), vec![i])),
            }
        }
        out
    }

    /// Checks that every one-hot group of `row` has exactly one active indicator.
    pub fn check_row(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.arity() {
            return Err(Error::Dimension {
                expected: self.arity(),
                actual: row.len(),
            });
        }
        for (name, cols) in self.feature_groups() {
            if self.columns[cols[0]].kind != ColumnKind::Onehot {
                continue;
            }
            if cols.iter().any(|&c| row[c] != 0.0 && row[c] != 1.0) {
                return Err(Error::Data(format!(
                    "one-hot group '{name}' has a value other than 0 or 1"
                )));
            }
            let active = cols.iter().filter(|&&c| row[c] == 1.0).count();
            if active != 1 {
                return Err(Error::Data(format!(
                    "one-hot group '{name}' has {active} active indicators, expected 1"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: DatasetSchema,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(schema: DatasetSchema, rows: Vec<Vec<f64>>) -> Result<Self> {
        schema.validate()?;
        for (i, row) in rows.iter().enumerate() {
            schema
                .check_row(row)
                .map_err(|e| Error::Data(format!("row {}: {e}", i + 1)))?;
        }
        Ok(Dataset { schema, rows })
    }

    /// Reads a headed CSV whose header must list the schema's columns in order.
    pub fn from_csv_reader(reader: impl Read, schema: DatasetSchema) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected: Vec<&str> = schema.columns.iter().map(|c| c.name.as_str()).collect();
        if headers.iter().ne(expected.iter().copied()) {
            return Err(Error::Data(format!(
                "CSV header [{}] does not match schema columns [{}]",
                headers.iter().collect::<Vec<_>>().join(", "),
                expected.join(", ")
            )));
        }
        let mut rows = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let row = record
                .iter()
                .enumerate()
                .map(|(j, field)| {
                    field.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                        Error::Data(format!(
                            "row {}, column '{}': '{field}' is not a number",
                            i + 1,
                            expected[j]
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Dataset::new(schema, rows)
    }

    pub fn from_csv_path(path: impl AsRef<Path>, schema: DatasetSchema) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?, schema)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineRule {
    Median,
    Zero,
    Value(f64),
}

/// One rule per column.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSpec {
    pub rules: Vec<BaselineRule>,
}

impl BaselineSpec {
    /// Median for continuous columns, zero for one-hot indicators.
    pub fn auto(schema: &DatasetSchema) -> Self {
        BaselineSpec {
            rules: schema
                .columns
                .iter()
                .map(|c| match c.kind {
                    ColumnKind::Continuous => BaselineRule::Median,
                    ColumnKind::Onehot => BaselineRule::Zero,
                })
                .collect(),
        }
    }

    /// Replaces the rule of column `j`.
    pub fn with_rule(mut self, j: usize, rule: BaselineRule) -> Self {
        self.rules[j] = rule;
        self
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len().is_multiple_of(2) {
        (xs[mid - 1] + xs[mid]) / 2.0
    } else {
        xs[mid]
    }
}

pub fn build_baseline(ds: &Dataset, spec: &BaselineSpec) -> Result<Vec<f64>> {
    if spec.rules.len() != ds.schema.arity() {
        return Err(Error::Dimension {
            expected: ds.schema.arity(),
            actual: spec.rules.len(),
        });
    }
    if ds.rows.is_empty() {
        return Err(Error::Data("cannot build a baseline from an empty dataset".into()));
    }
    Ok(spec
        .rules
        .iter()
        .enumerate()
        .map(|(j, rule)| match *rule {
            BaselineRule::Median => median(ds.column(j).collect()),
            BaselineRule::Zero => 0.0,
            BaselineRule::Value(x) => x,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> DatasetSchema {
        DatasetSchema::from_json_str(
            r#"{"columns":[
                {"name":"age","kind":"continuous"},
                {"name":"ms_a","kind":"onehot","group":"MS"},
                {"name":"ms_b","kind":"onehot","group":"MS"},
                {"name":"ms_c","kind":"onehot","group":"MS"},
                {"name":"ms_d","kind":"onehot","group":"MS"}]}"#,
        )
        .unwrap()
    }

    fn load(csv: &str) -> Result<Dataset> {
        Dataset::from_csv_reader(csv.as_bytes(), schema())
    }

    #[test]
    fn medians_and_zeros() {
        let ds = load("age,ms_a,ms_b,ms_c,ms_d\n1,1,0,0,0\n2,0,1,0,0\n3,0,0,0,1\n").unwrap();
        let spec = BaselineSpec::auto(&ds.schema);
        assert_eq!(build_baseline(&ds, &spec).unwrap(), vec![2.0, 0.0, 0.0, 0.0, 0.0]);

        let ds = load("age,ms_a,ms_b,ms_c,ms_d\n1,1,0,0,0\n2,0,1,0,0\n3,0,0,0,1\n10,0,0,1,0\n").unwrap();
        assert_eq!(build_baseline(&ds, &spec).unwrap()[0], 2.5);
        let spec = spec.with_rule(0, BaselineRule::Value(7.0));
        assert_eq!(build_baseline(&ds, &spec).unwrap()[0], 7.0);
    }

    #[test]
    fn groups_follow_first_appearance() {
        let groups = schema().feature_groups();
        assert_eq!(
            groups,
            vec![("age".to_string(), vec![0]), ("MS".to_string(), vec![1, 2, 3, 4])]
        );
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(load("age,ms_a,ms_b,ms_c,ms_d\n1,1,1,0,0\n").is_err());
        assert!(load("age,ms_a,ms_b,ms_c,ms_d\n1,0,0,0,0\n").is_err());
        assert!(load("age,ms_a,ms_b,ms_c,ms_d\nabc,1,0,0,0\n").is_err());
        assert!(load("age,ms_a,ms_b,ms_d,ms_c\n1,1,0,0,0\n").is_err());
        let err = load("age,ms_a,ms_b,ms_c,ms_d\n1,1,0,0,0\n2,0,0,0,0\n").unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn empty_dataset_has_no_median() {
        let ds = load("age,ms_a,ms_b,ms_c,ms_d\n").unwrap();
        assert!(matches!(
            build_baseline(&ds, &BaselineSpec::auto(&ds.schema)),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn onehot_needs_group() {
        assert!(DatasetSchema::from_json_str(r#"{"columns":[{"name":"a","kind":"onehot"}]}"#).is_err());
    }
}
