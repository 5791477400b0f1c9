//! Reading `(theta, r)` samples for the slope fit.

use std::f64::consts::PI;

use fractalab::spiral::{fit_loglog_slope, SlopeFit};
use serde::Serialize;

/// Below this coefficient of determination a curve is flagged.
pub const DEFAULT_MIN_R_SQUARED: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvError {
    /// 1-based line in the input file.
    pub line: u64,
    pub message: String,
}

impl std::fmt::Display for CsvError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Columns {
    Polar,
    Cartesian,
}

/// Parses CSV with header `theta,r`, or `x,y` (angles are unwrapped along
/// the curve, so consecutive points must turn by less than pi).
pub fn read_samples(text: &str) -> Result<Vec<(f64, f64)>, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| CsvError {
        line: e.position().map_or(1, |p| p.line()),
        message: e.to_string(),
    })?;
    let columns = match (header.get(0), header.get(1), header.len()) {
        (Some("theta"), Some("r"), 2) => Columns::Polar,
        (Some("x"), Some("y"), 2) => Columns::Cartesian,
        _ => {
            return Err(CsvError {
                line: 1,
                message: format!("expected header theta,r or x,y, got {:?}", header.iter().collect::<Vec<_>>().join(",")),
            })
        }
    };

    let mut samples = Vec::new();
    let mut previous_angle: Option<f64> = None;
    for record in reader.records() {
        let record = record.map_err(|e| CsvError {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64, CsvError> {
            let raw = record.get(i).unwrap_or("");
            raw.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| CsvError {
                line,
                message: format!("column {} is not a finite number: {raw:?}", i + 1),
            })
        };
        let (a, b) = (field(0)?, field(1)?);
        let (theta, r) = match columns {
            Columns::Polar => (a, b),
            Columns::Cartesian => {
                let raw = b.atan2(a);
                let theta = match previous_angle {
                    Some(prev) => prev + wrap(raw - prev),
                    None => raw,
                };
                previous_angle = Some(theta);
                (theta, a.hypot(b))
            }
        };
        if r <= 0.0 || r.is_nan() {
            return Err(CsvError {
                line,
                message: format!("radius must be positive, got {r}"),
            });
        }
        samples.push((theta, r));
    }
    if samples.len() < 3 {
        return Err(CsvError {
            line: 1,
            message: format!("need at least 3 data rows, got {}", samples.len()),
        });
    }
    Ok(samples)
}

/// Reduces an angle difference to `(-pi, pi]`.
fn wrap(delta: f64) -> f64 {
    let mut d = delta % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeReport {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
    pub degenerate: bool,
    pub not_self_similar: bool,
    pub inferred_dimension_note: String,
}

pub fn report(fit: &SlopeFit, samples: usize, min_r_squared: f64) -> SlopeReport {
    let not_self_similar = !fit.degenerate && fit.r_squared < min_r_squared;
    let note = if fit.degenerate {
        "constant radius: slope 0 with a perfect but uninformative fit (degenerate)".to_string()
    } else if not_self_similar {
        format!("not self-similar at tolerance: r^2 = {} < {min_r_squared}", fit.r_squared)
    } else {
        format!(
            "ln r is linear in theta: logarithmic spiral with d = {}, {} anti-clockwise",
            fit.slope.abs(),
            if fit.slope > 0.0 { "growing" } else { "shrinking" }
        )
    };
    SlopeReport {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        samples,
        degenerate: fit.degenerate,
        not_self_similar,
        inferred_dimension_note: note,
    }
}

pub fn fit_text(text: &str, min_r_squared: f64) -> Result<SlopeReport, CsvError> {
    let samples = read_samples(text)?;
    let fit = fit_loglog_slope(&samples).map_err(|e| CsvError {
        line: 1,
        message: e.to_string(),
    })?;
    Ok(report(&fit, samples.len(), min_r_squared))
}
