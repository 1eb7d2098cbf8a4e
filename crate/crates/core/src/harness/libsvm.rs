//! LIBSVM text format: `label idx:value idx:value …` with 1-based, strictly
//! increasing feature indices.

use crate::linalg::CsrMatrix;
use crate::problems::LabeledDesign;
use crate::{OsgmError, Result};
use std::fmt::Write as _;

/// Comment that records the feature count when it exceeds the largest index.
const FEATURES_TAG: &str = "# n_features ";

#[derive(Clone, Debug, PartialEq)]
pub struct SparseDataset {
    /// `(1-based index, value)` pairs per row.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub labels: Vec<f64>,
    pub n_features: usize,
}

impl SparseDataset {
    pub fn n_samples(&self) -> usize {
        self.rows.len()
    }

    /// Checks the format invariants.
    pub fn validate(&self) -> Result<()> {
        if self.rows.len() != self.labels.len() {
            return Err(OsgmError::InvalidInput(format!("{} rows but {} labels", self.rows.len(), self.labels.len())));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.first().is_some_and(|(j, _)| *j == 0) || row.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(OsgmError::InvalidInput(format!("row {} has invalid indices", i + 1)));
            }
            if row.last().is_some_and(|(j, _)| *j > self.n_features) {
                return Err(OsgmError::InvalidInput(format!("row {} exceeds n_features", i + 1)));
            }
        }
        Ok(())
    }

    /// Design with labels mapped to ±1 (see [`binarize_labels`]).
    pub fn to_design(&self) -> Result<LabeledDesign> {
        let rows: Vec<Vec<(usize, f64)>> = self.rows.iter().map(|r| r.iter().map(|&(j, v)| (j - 1, v)).collect()).collect();
        LabeledDesign::new(CsrMatrix::from_rows(&rows, self.n_features), binarize_labels(&self.labels)?)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> OsgmError {
    OsgmError::Parse { line, message: message.into() }
}

pub fn parse_libsvm(text: &str) -> Result<SparseDataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut n_features = 0;
    let mut declared = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix(FEATURES_TAG) {
            declared = rest.trim().parse().map_err(|_| parse_err(line_no, format!("bad feature count `{}`", rest.trim())))?;
            continue;
        }
        let body = trimmed.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let label_tok = tokens.next().expect("nonempty line");
        let label: f64 = label_tok.parse().map_err(|_| parse_err(line_no, format!("bad label `{label_tok}`")))?;
        if !label.is_finite() {
            return Err(parse_err(line_no, format!("non-finite label `{label_tok}`")));
        }
        let mut row: Vec<(usize, f64)> = Vec::new();
        for tok in tokens {
            let (i, v) = tok.split_once(':').ok_or_else(|| parse_err(line_no, format!("expected index:value, got `{tok}`")))?;
            let idx: usize = i.parse().map_err(|_| parse_err(line_no, format!("bad index `{i}`")))?;
            if idx == 0 {
                return Err(parse_err(line_no, "indices are 1-based"));
            }
            let val: f64 = v.parse().map_err(|_| parse_err(line_no, format!("bad value `{v}`")))?;
            if !val.is_finite() {
                return Err(parse_err(line_no, format!("non-finite value `{v}`")));
            }
            if let Some(&(prev, _)) = row.last() {
                if idx <= prev {
                    return Err(parse_err(line_no, format!("index {idx} after {prev} is not increasing")));
                }
            }
            row.push((idx, val));
        }
        n_features = n_features.max(row.last().map_or(0, |r| r.0));
        rows.push(row);
        labels.push(label);
    }
    Ok(SparseDataset { rows, labels, n_features: n_features.max(declared) })
}

/// Shortest round-trip formatting, so `parse(serialize(d)) == d`.
pub fn serialize_libsvm(ds: &SparseDataset) -> String {
    let mut out = String::new();
    let max_idx = ds.rows.iter().filter_map(|r| r.last().map(|p| p.0)).max().unwrap_or(0);
    if ds.n_features > max_idx {
        let _ = writeln!(out, "{FEATURES_TAG}{}", ds.n_features);
    }
    for (row, y) in ds.rows.iter().zip(&ds.labels) {
        let _ = write!(out, "{y:?}");
        for (j, v) in row {
            let _ = write!(out, " {j}:{v:?}");
        }
        out.push('\n');
    }
    out
}

/// Maps labels to ±1: a single distinct value goes by sign, two distinct
/// values map smaller → −1 and larger → +1, more are rejected.
pub fn binarize_labels(labels: &[f64]) -> Result<Vec<f64>> {
    let mut distinct: Vec<f64> = labels.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    match distinct.as_slice() {
        [] => Ok(Vec::new()),
        [_] => Ok(labels.iter().map(|y| if *y > 0.0 { 1.0 } else { -1.0 }).collect()),
        [lo, _] => Ok(labels.iter().map(|y| if y == lo { -1.0 } else { 1.0 }).collect()),
        _ => Err(OsgmError::InvalidInput(format!("{} distinct labels; classification needs two", distinct.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_line() {
        let d = parse_libsvm("1 1:0.5 3:-2\n").unwrap();
        assert_eq!(d.rows, vec![vec![(1, 0.5), (3, -2.0)]]);
        assert_eq!(d.labels, vec![1.0]);
        assert!(d.n_features >= 3);
    }

    #[test]
    fn empty_row() {
        let d = parse_libsvm("-1\n").unwrap();
        assert_eq!(d.rows, vec![vec![]]);
        assert_eq!(d.labels, vec![-1.0]);
    }

    #[test]
    fn comments_and_whitespace() {
        let d = parse_libsvm("# header\n\n  +1   2:1e-3\t5:4  # trailing\n0 1:1\n").unwrap();
        assert_eq!(d.rows.len(), 2);
        assert_eq!(d.n_features, 5);
        assert_eq!(binarize_labels(&d.labels).unwrap(), vec![1.0, -1.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases =
            [("1 1:1\n1 2:1 2:3\n", 2), ("1 1:1\n\n# c\nx 1:1\n", 4), ("1 0:1\n", 1), ("1 1:1 3\n", 1), ("1 1:a\n", 1), ("1 1:1\n1 1:nan\n", 2)];
        for (text, line) in cases {
            match parse_libsvm(text) {
                Err(OsgmError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn declared_feature_count_survives() {
        let d = SparseDataset { rows: vec![vec![(1, 2.0)]], labels: vec![1.0], n_features: 7 };
        assert_eq!(parse_libsvm(&serialize_libsvm(&d)).unwrap(), d);
    }

    #[test]
    fn three_labels_rejected() {
        assert!(binarize_labels(&[0.0, 1.0, 2.0]).is_err());
    }
}
