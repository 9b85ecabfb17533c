use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::dataset::{CsvRows, SAFE};
use crate::error::{Error, Result};
use crate::learner::LearnedModel;

/// Indicator state of the detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Safe,
    Unsafe,
}

impl Status {
    pub fn from_label(label: u8) -> Status {
        if label == SAFE {
            Status::Safe
        } else {
            Status::Unsafe
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Safe => "safe",
            Status::Unsafe => "unsafe",
        }
    }
}

/// Output tokens driving the indicators: a green light when safe, a red
/// light and the buzzer otherwise.
pub fn status_tokens(status: Status) -> &'static [&'static str] {
    match status {
        Status::Safe => &["GREEN"],
        Status::Unsafe => &["RED", "BUZZER"],
    }
}

/// Outcome for one input row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectRecord {
    /// 1-based line in the input, header included.
    pub line: u64,
    pub predicted: Option<u8>,
    pub status: Option<Status>,
    pub label: Option<u8>,
    pub error: Option<String>,
}

impl fmt::Display for DetectRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.status, &self.error) {
            (Some(s), _) => write!(f, "line {}: {} {}", self.line, s.as_str(), status_tokens(*s).join(" ")),
            (None, Some(e)) => write!(f, "line {}: error: {e}", self.line),
            (None, None) => write!(f, "line {}: no result", self.line),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectReport {
    pub records: Vec<DetectRecord>,
    pub safe: usize,
    pub unsafe_count: usize,
    pub errors: usize,
    /// Classified rows that carried a label.
    pub labeled: usize,
    pub correct: usize,
}

impl DetectReport {
    pub fn accuracy(&self) -> Option<f64> {
        (self.labeled > 0).then(|| self.correct as f64 / self.labeled as f64)
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "summary: {} rows, {} safe, {} unsafe, {} errors",
            self.records.len(),
            self.safe,
            self.unsafe_count,
            self.errors
        );
        if let Some(a) = self.accuracy() {
            s.push_str(&format!("\naccuracy: {a:.4} ({}/{})", self.correct, self.labeled));
        }
        s
    }

    fn push(&mut self, rec: DetectRecord) {
        match rec.status {
            Some(Status::Safe) => self.safe += 1,
            Some(Status::Unsafe) => self.unsafe_count += 1,
            None => self.errors += 1,
        }
        if let (Some(p), Some(y)) = (rec.predicted, rec.label) {
            self.labeled += 1;
            if p == y {
                self.correct += 1;
            }
        }
        self.records.push(rec);
    }
}

/// Classifies CSV rows in arrival order, writing one status line per row to
/// `sink` as soon as it is decided. Malformed rows produce an error line and
/// processing continues; an empty input yields an empty report.
pub fn cmd_detect(model: &LearnedModel, input: impl BufRead, mut sink: impl Write) -> Result<DetectReport> {
    let mut input = input;
    let mut report = DetectReport::default();
    if input.fill_buf()?.is_empty() {
        return Ok(report);
    }
    let rows = CsvRows::new(input)?;
    let width = rows.header().feature_names.len();
    if width != model.dim() {
        return Err(Error::data(format!(
            "input has {width} feature columns but the model expects {}",
            model.dim()
        )));
    }
    for row in rows {
        let rec = match row {
            Ok(r) => match model.predict(&r.features) {
                Ok(p) => DetectRecord {
                    line: r.line,
                    predicted: Some(p),
                    status: Some(Status::from_label(p)),
                    label: r.label,
                    error: None,
                },
                Err(e) => DetectRecord {
                    line: r.line,
                    predicted: None,
                    status: None,
                    label: r.label,
                    error: Some(e.to_string()),
                },
            },
            Err(e) => {
                let (line, error) = match e {
                    Error::Parse { line, message } => (line, message),
                    other => (0, other.to_string()),
                };
                DetectRecord {
                    line,
                    predicted: None,
                    status: None,
                    label: None,
                    error: Some(error),
                }
            }
        };
        writeln!(sink, "{rec}")?;
        report.push(rec);
    }
    Ok(report)
}
