use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use qdybe_core::qdybe::{DEFAULT_TOL_FAIL, DEFAULT_TOL_PASS};

use crate::error::{CliError, CliResult};

/// Settings shared by every command, after merging defaults, the config file
/// and flags (flags win).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n: usize,
    pub tau: Complex64,
    pub gamma: Complex64,
    pub q: Complex64,
    pub kappa: Complex64,
    pub samples: usize,
    pub seed: u64,
    pub tol_pass: f64,
    pub tol_fail: f64,
    pub order: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn defaults(command: &str) -> Self {
        Self {
            command: command.to_string(),
            n: 2,
            tau: Complex64::new(0.0, 2.0),
            gamma: Complex64::new(0.31, 0.07),
            q: Complex64::new(0.6, 0.0),
            kappa: Complex64::new(3.0, 0.0),
            samples: 100,
            seed: 0,
            tol_pass: DEFAULT_TOL_PASS,
            tol_fail: DEFAULT_TOL_FAIL,
            order: 8,
            out: None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.samples == 0 {
            return Err(CliError::Usage("samples must be at least 1".into()));
        }
        if self.order == 0 {
            return Err(CliError::Usage("order must be at least 1".into()));
        }
        if !(self.tol_pass > 0.0 && self.tol_pass < self.tol_fail && self.tol_fail.is_finite()) {
            return Err(CliError::Usage(format!(
                "need 0 < tol_pass < tol_fail, got {} and {}",
                self.tol_pass, self.tol_fail
            )));
        }
        Ok(())
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let bad = |what: &str| CliError::Usage(format!("{key}: expected {what}, got {value:?}"));
        match key {
            "command" => {
                if value != self.command {
                    return Err(CliError::Usage(format!(
                        "config file is for command {value:?}, running {:?}",
                        self.command
                    )));
                }
            }
            "n" => self.n = value.parse().map_err(|_| bad("an integer"))?,
            "tau" => self.tau = parse_complex(value)?,
            "gamma" => self.gamma = parse_complex(value)?,
            "q" => self.q = parse_complex(value)?,
            "kappa" => self.kappa = parse_complex(value)?,
            "samples" => self.samples = value.parse().map_err(|_| bad("an integer"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("an unsigned integer"))?,
            "tol_pass" => self.tol_pass = value.parse().map_err(|_| bad("a number"))?,
            "tol_fail" => self.tol_fail = value.parse().map_err(|_| bad("a number"))?,
            "order" => self.order = value.parse().map_err(|_| bad("an integer"))?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(CliError::Usage(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Read a flat `key = value` file; `#` starts a comment.
    pub fn load_file(&mut self, path: &Path) -> CliResult<()> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{}:{}: expected key = value", path.display(), lineno + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| CliError::Usage(format!("{}:{}: {}", path.display(), lineno + 1, e.message())))?;
        }
        Ok(())
    }
}

/// `[re, im]`, `re,im` or a bare real.
pub fn parse_complex(text: &str) -> CliResult<Complex64> {
    let bad = || CliError::Usage(format!("cannot parse complex number {text:?}; use [re, im], re,im or re"));
    let t = text.trim();
    let inner = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(t);
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

/// Semicolon-separated complex numbers, each in a form [`parse_complex`] accepts.
pub fn parse_complex_list(text: &str) -> CliResult<Vec<Complex64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(';').map(parse_complex).collect()
}

pub fn parse_real_list(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("cannot parse real list {text:?}")))
        })
        .collect()
}
