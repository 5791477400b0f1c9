//! Flat `key = value` run configuration for the verification suites.
//!
//! ```text
//! # comments start with '#'
//! cutoff = 64
//! pair_cutoff = 160
//! report = out/report.json
//! ```

use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Fock cutoff for the single-mode, fidelity and plane checks.
    pub cutoff: usize,
    /// Pair-subspace cutoff for closed-form vacuum and entropy checks.
    pub pair_cutoff: usize,
    /// Per-mode cutoff for dense two-mode operator checks.
    pub operator_cutoff: usize,
    /// Per-mode cutoff for the doubled fractal-operator identity.
    pub identity_cutoff: usize,
    /// Per-mode cutoff of the single-mode squeezed vacua.
    pub squeeze_cutoff: usize,
    /// Top levels per mode dropped in operator identities.
    pub margin: usize,
    /// Top levels dropped in spectrum comparisons; `ceil(cutoff/8)` if unset.
    pub spectrum_margin: Option<usize>,
    pub koch_depth: u32,
    /// Finite-difference step.
    pub step: f64,
    pub rk4_steps: usize,
    pub tail_tolerance: f64,
    /// Where to write the JSON report; stdout when unset.
    pub report: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cutoff: 64,
            pair_cutoff: 160,
            operator_cutoff: 10,
            identity_cutoff: 12,
            squeeze_cutoff: 400,
            margin: 2,
            spectrum_margin: None,
            koch_depth: 8,
            step: 1e-3,
            rk4_steps: 10_000,
            tail_tolerance: 1e-12,
            report: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

pub const KEYS: &[&str] = &[
    "cutoff",
    "pair_cutoff",
    "operator_cutoff",
    "identity_cutoff",
    "squeeze_cutoff",
    "margin",
    "spectrum_margin",
    "koch_depth",
    "step",
    "rk4_steps",
    "tail_tolerance",
    "report",
];

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError {
        line,
        message: format!("invalid value {value:?} for {key}"),
    })
}

fn positive_real(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse_value(line, key, value)?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(ConfigError {
            line,
            message: format!("{key} must be positive, got {value}"),
        });
    }
    Ok(v)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError {
                line,
                message: format!("expected key=value, got {content:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "cutoff" => cfg.cutoff = parse_value(line, key, value)?,
                "pair_cutoff" => cfg.pair_cutoff = parse_value(line, key, value)?,
                "operator_cutoff" => cfg.operator_cutoff = parse_value(line, key, value)?,
                "identity_cutoff" => cfg.identity_cutoff = parse_value(line, key, value)?,
                "squeeze_cutoff" => cfg.squeeze_cutoff = parse_value(line, key, value)?,
                "margin" => cfg.margin = parse_value(line, key, value)?,
                "spectrum_margin" => cfg.spectrum_margin = Some(parse_value(line, key, value)?),
                "koch_depth" => cfg.koch_depth = parse_value(line, key, value)?,
                "step" => cfg.step = positive_real(line, key, value)?,
                "rk4_steps" => cfg.rk4_steps = parse_value(line, key, value)?,
                "tail_tolerance" => cfg.tail_tolerance = positive_real(line, key, value)?,
                "report" => {
                    if value.is_empty() {
                        return Err(ConfigError {
                            line,
                            message: "report path is empty".into(),
                        });
                    }
                    cfg.report = Some(PathBuf::from(value));
                }
                other => {
                    return Err(ConfigError {
                        line,
                        message: format!("unknown key {other:?}"),
                    })
                }
            }
        }
        Ok(cfg)
    }

    pub fn effective_spectrum_margin(&self) -> usize {
        self.spectrum_margin.unwrap_or_else(|| self.cutoff.div_ceil(8))
    }
}
