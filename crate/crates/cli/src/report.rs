use std::io::{self, Write};

use serde::Serialize;
use serde_json::{Map, Value};

use qdybe_core::qdybe::Verdict;

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Inconclusive,
    Fail,
    Error,
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => Outcome::Pass,
            Verdict::Inconclusive => Outcome::Inconclusive,
            Verdict::Fail => Outcome::Fail,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub residual: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_condition: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    /// Verdict from the residual and the configured tolerances.
    pub fn graded(name: &str, residual: f64, cfg: &RunConfig) -> Self {
        Self::with_verdict(name, residual, Verdict::classify(residual, cfg.tol_pass, cfg.tol_fail))
    }

    pub fn with_verdict(name: &str, residual: f64, verdict: Verdict) -> Self {
        Self {
            name: name.to_string(),
            residual,
            verdict,
            max_condition: None,
            rejected: None,
            samples: None,
            note: None,
        }
    }

    pub fn sampled(mut self, max_condition: f64, rejected: usize, samples: usize) -> Self {
        self.max_condition = Some(max_condition);
        self.rejected = Some(rejected);
        self.samples = Some(samples);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
    pub verdict: Outcome,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub details: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Report {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            command: cfg.command.clone(),
            config: cfg.clone(),
            seed: cfg.seed,
            checks: Vec::new(),
            verdict: Outcome::Pass,
            details: Map::new(),
            error: None,
            wall_time_s: None,
        }
    }

    pub fn push(&mut self, check: CheckReport) {
        self.checks.push(check);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.details.insert(key.to_string(), v);
    }

    /// Worst verdict over the checks, or `error` when one was recorded.
    pub fn finish(&mut self) {
        self.verdict = if self.error.is_some() {
            Outcome::Error
        } else {
            self.checks
                .iter()
                .fold(Verdict::Pass, |acc, c| acc.combine(c.verdict))
                .into()
        };
    }

    pub fn fail_with(&mut self, e: &CliError) {
        self.error = Some(ErrorReport {
            kind: e.kind(),
            message: e.message().to_string(),
        });
        self.finish();
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
            Outcome::Error => 65,
        }
    }

    pub fn to_json_string(&self) -> String {
        to_json_string(self)
    }
}

/// Prints every float with 17 significant digits.
struct ExactFloats;

impl serde_json::ser::Formatter for ExactFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Compact JSON with 17-significant-digit floats and a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats);
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        let s = to_json_string(&vec![0.1, 1.0 / 3.0, -2.5e-300, 0.0]);
        assert_eq!(
            s,
            "[1.0000000000000001e-1,3.3333333333333331e-1,-2.5000000000000000e-300,0.0000000000000000e0]\n"
        );
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, 1.0 / 3.0, -2.5e-300, 0.0]);
    }

    #[test]
    fn verdict_aggregation_and_exit_codes() {
        let cfg = RunConfig::defaults("t");
        let mut r = Report::new(&cfg);
        r.push(CheckReport::graded("a", 1e-12, &cfg));
        r.finish();
        assert_eq!((r.verdict, r.exit_code()), (Outcome::Pass, 0));
        r.push(CheckReport::graded("b", 1e-7, &cfg));
        r.finish();
        assert_eq!((r.verdict, r.exit_code()), (Outcome::Inconclusive, 2));
        r.push(CheckReport::graded("c", f64::NAN, &cfg));
        r.finish();
        assert_eq!((r.verdict, r.exit_code()), (Outcome::Fail, 1));
        r.fail_with(&CliError::Data("boom".into()));
        assert_eq!((r.verdict, r.exit_code()), (Outcome::Error, 65));
        assert!(r.to_json_string().contains("\"residual\":null"));
    }
}
