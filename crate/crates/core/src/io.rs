//! Problem and certificate documents: one flat JSON format apiece, with
//! parse-time validation of every dimension rule the model enforces.
//!
//! A problem document pairs an `index_set` (interval, countable, or finite)
//! with `constraints` (polynomial or explicit rows); the two kinds must
//! match up. Certificate indices are plain numbers interpreted against the
//! problem's index set: a real for intervals, a positive integer for
//! countable sets, a zero-based row position for finite sets.

use crate::duals::DualCertificate;
use crate::model::{ConstraintGenerator, IndexValue, LinearSIP, ScalarPoly};
use crate::Error;
use serde::{Deserialize, Serialize};

/// `index_set` field of a problem document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum IndexSetFile {
    #[serde(rename = "interval")]
    Interval { lo: f64, hi: f64 },
    #[serde(rename = "countable")]
    Countable,
    #[serde(rename = "finite")]
    Finite {
        /// Optional numeric labels, one per row; row positions by default.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<f64>>,
    },
}

/// One explicit constraint row `a'x <= b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowFile {
    pub a: Vec<f64>,
    pub b: f64,
}

/// `constraints` field of a problem document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ConstraintsFile {
    /// Coefficient polynomials in the index, ascending degree: `a` holds one
    /// coefficient array per variable, `b` one for the right-hand side.
    #[serde(rename = "polynomial")]
    Polynomial { a: Vec<Vec<f64>>, b: Vec<f64> },
    #[serde(rename = "explicit")]
    Explicit { rows: Vec<RowFile> },
}

/// On-disk problem document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub n: usize,
    pub objective: Vec<f64>,
    pub index_set: IndexSetFile,
    pub constraints: ConstraintsFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl ProblemFile {
    /// Validate and build the in-memory problem.
    pub fn to_sip(&self) -> Result<LinearSIP, Error> {
        if self.objective.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "objective has {} entries, n is {}",
                self.objective.len(),
                self.n
            )));
        }
        let generator = match (&self.index_set, &self.constraints) {
            (IndexSetFile::Interval { lo, hi }, ConstraintsFile::Polynomial { a, b }) => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidArgument(format!(
                        "[{}, {}] is not a nondegenerate bounded interval",
                        lo, hi
                    )));
                }
                ConstraintGenerator::IntervalPoly {
                    lo: *lo,
                    hi: *hi,
                    a: a.iter().map(|c| ScalarPoly::new(c.clone())).collect(),
                    b: ScalarPoly::new(b.clone()),
                }
            }
            (IndexSetFile::Countable, ConstraintsFile::Polynomial { a, b }) => {
                ConstraintGenerator::CountablePoly {
                    a: a.iter().map(|c| ScalarPoly::new(c.clone())).collect(),
                    b: ScalarPoly::new(b.clone()),
                }
            }
            (IndexSetFile::Finite { values }, ConstraintsFile::Explicit { rows }) => {
                let pairs: Vec<(Vec<f64>, f64)> =
                    rows.iter().map(|r| (r.a.clone(), r.b)).collect();
                match values {
                    None => ConstraintGenerator::explicit(pairs),
                    Some(labels) => {
                        if labels.len() != pairs.len() {
                            return Err(Error::InvalidArgument(format!(
                                "{} labels for {} rows",
                                labels.len(),
                                pairs.len()
                            )));
                        }
                        ConstraintGenerator::ExplicitFinite { rows: pairs, labels: labels.clone() }
                    }
                }
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "index_set kind does not match constraints kind".into(),
                ))
            }
        };
        LinearSIP::new(self.objective.clone(), generator)
    }

    /// Inverse of [`ProblemFile::to_sip`] up to the optional metadata.
    pub fn from_sip(p: &LinearSIP) -> ProblemFile {
        let (index_set, constraints) = match &p.generator {
            ConstraintGenerator::IntervalPoly { lo, hi, a, b } => (
                IndexSetFile::Interval { lo: *lo, hi: *hi },
                ConstraintsFile::Polynomial {
                    a: a.iter().map(|p| p.coeffs().to_vec()).collect(),
                    b: b.coeffs().to_vec(),
                },
            ),
            ConstraintGenerator::CountablePoly { a, b } => (
                IndexSetFile::Countable,
                ConstraintsFile::Polynomial {
                    a: a.iter().map(|p| p.coeffs().to_vec()).collect(),
                    b: b.coeffs().to_vec(),
                },
            ),
            ConstraintGenerator::ExplicitFinite { rows, labels } => (
                IndexSetFile::Finite { values: Some(labels.clone()) },
                ConstraintsFile::Explicit {
                    rows: rows
                        .iter()
                        .map(|(a, b)| RowFile { a: a.clone(), b: *b })
                        .collect(),
                },
            ),
        };
        ProblemFile {
            n: p.n,
            objective: p.c.clone(),
            index_set,
            constraints,
            name: None,
            notes: None,
        }
    }
}

/// Parse a problem document without building the problem.
pub fn parse_problem_file(text: &str) -> Result<ProblemFile, Error> {
    serde_json::from_str(text)
        .map_err(|e| Error::InvalidArgument(format!("problem document: {}", e)))
}

/// Parse and validate a problem document.
pub fn parse_problem(text: &str) -> Result<LinearSIP, Error> {
    parse_problem_file(text)?.to_sip()
}

/// Render a problem as a document; all numeric fields round-trip exactly.
pub fn render_problem(p: &LinearSIP) -> String {
    let mut out = serde_json::to_string_pretty(&ProblemFile::from_sip(p))
        .expect("problem files serialize");
    out.push('\n');
    out
}

/// One certificate entry: a raw index (interpreted against the problem's
/// index set) and its multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportEntryFile {
    pub index: f64,
    pub lambda: f64,
}

/// On-disk certificate document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub support: Vec<SupportEntryFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// A certificate document resolved against a problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedCertificate {
    pub cert: DualCertificate,
    pub point: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub notes: Option<String>,
}

fn index_for(p: &LinearSIP, raw: f64) -> Result<IndexValue, Error> {
    match &p.generator {
        ConstraintGenerator::IntervalPoly { lo, hi, .. } => {
            if !(*lo <= raw && raw <= *hi) {
                return Err(Error::IndexOutOfRange(format!(
                    "index {} outside [{}, {}]",
                    raw, lo, hi
                )));
            }
            Ok(IndexValue::Real(raw))
        }
        ConstraintGenerator::CountablePoly { .. } => {
            if raw < 1.0 || raw.fract() != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "index {} is not a positive integer",
                    raw
                )));
            }
            Ok(IndexValue::Natural(raw as u64))
        }
        ConstraintGenerator::ExplicitFinite { rows, .. } => {
            if raw < 0.0 || raw.fract() != 0.0 || raw as usize >= rows.len() {
                return Err(Error::IndexOutOfRange(format!(
                    "index {} is not a row position below {}",
                    raw,
                    rows.len()
                )));
            }
            Ok(IndexValue::Position(raw as usize))
        }
    }
}

/// Parse a certificate document and resolve its indices against `p`.
pub fn parse_certificate(text: &str, p: &LinearSIP) -> Result<ParsedCertificate, Error> {
    let file: CertificateFile = serde_json::from_str(text)
        .map_err(|e| Error::InvalidArgument(format!("certificate document: {}", e)))?;
    let mut support = Vec::with_capacity(file.support.len());
    for entry in &file.support {
        if !(entry.lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "multiplier {} at index {} is negative",
                entry.lambda, entry.index
            )));
        }
        support.push((index_for(p, entry.index)?, entry.lambda));
    }
    if let Some(point) = &file.point {
        if point.len() != p.n {
            return Err(Error::InvalidArgument(format!(
                "point has {} entries, problem has {} variables",
                point.len(),
                p.n
            )));
        }
    }
    Ok(ParsedCertificate {
        cert: DualCertificate { support },
        point: file.point,
        alpha: file.alpha,
        notes: file.notes,
    })
}

/// Render a certificate (with optional point and bound) as a document.
pub fn render_certificate(
    cert: &DualCertificate,
    point: Option<&[f64]>,
    alpha: Option<f64>,
) -> String {
    let file = CertificateFile {
        support: cert
            .support
            .iter()
            .map(|(idx, l)| SupportEntryFile { index: idx.as_f64(), lambda: *l })
            .collect(),
        point: point.map(|x| x.to_vec()),
        alpha,
        notes: None,
    };
    let mut out = serde_json::to_string_pretty(&file).expect("certificate files serialize");
    out.push('\n');
    out
}
