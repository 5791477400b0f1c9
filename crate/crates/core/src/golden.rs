//! Golden spiral, Fibonacci progression and the Fibonacci tiling spiral.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point, Polyline};
use crate::spiral::second_order_residual;

/// Largest index whose Fibonacci number fits in a `u64`.
pub const MAX_FIBONACCI_INDEX: u32 = 92;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoldenConstants {
    pub phi: f64,
    pub psi: f64,
    /// Slope of the golden spiral, `ln(phi) / (pi/2)`.
    pub d_g: f64,
}

impl GoldenConstants {
    pub fn new() -> Self {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        Self {
            phi,
            psi: 1.0 - phi,
            d_g: phi.ln() / FRAC_PI_2,
        }
    }
}

impl Default for GoldenConstants {
    fn default() -> Self {
        Self::new()
    }
}

fn check_r0(r0: f64) -> Result<()> {
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::ParameterRange {
            name: "r0",
            value: r0,
            reason: "initial radius must be positive",
        });
    }
    Ok(())
}

/// `r0 e^{d_g theta}`.
pub fn golden_radius(r0: f64, theta: f64) -> Result<f64> {
    check_r0(r0)?;
    Ok(r0 * (GoldenConstants::new().d_g * theta).exp())
}

/// Radius after `n` quarter turns, `r0 phi^n`.
pub fn quarter_turn_progression(r0: f64, n: u32) -> Result<f64> {
    check_r0(r0)?;
    Ok(r0 * GoldenConstants::new().phi.powi(n as i32))
}

/// `F_n` with `F_0 = 0`, `F_1 = 1`.
pub fn fibonacci(n: u32) -> Result<u64> {
    if n > MAX_FIBONACCI_INDEX {
        return Err(Error::ParameterRange {
            name: "n",
            value: n as f64,
            reason: "F_n overflows 64 bits beyond n = 92",
        });
    }
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        let next = a + b;
        a = b;
        b = next;
    }
    Ok(a)
}

/// `F_n / F_{n-1}`.
pub fn ratio_convergence(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "ratio F_n / F_(n-1) needs n >= 2, got {n}"
        )));
    }
    Ok(fibonacci(n)? as f64 / fibonacci(n - 1)? as f64)
}

/// Fibonacci spiral: quarter circles of radii `F_1, F_2, ...` (times `unit`)
/// drawn in the squares of the tiling, turning anti-clockwise. After the
/// unit square `[0,1]^2` the tiling adds squares left, down, right, up in
/// turn; each arc starts where the previous one ended, so the curve is
/// continuous with a continuous tangent.
///
/// ```text
///   +--+--+------+
///   |F2|F1|      |
///   +--+--+  F4  |
///   | F3  |      |
///   +-----+------+
/// ```
pub fn fibonacci_spiral(n_arcs: u32, unit: f64, samples_per_arc: usize) -> Result<Polyline> {
    Polyline::new(
        fibonacci_arcs(n_arcs, unit)?
            .iter()
            .enumerate()
            .flat_map(|(k, arc)| {
                let skip = usize::from(k > 0);
                arc.sample(samples_per_arc.max(2)).into_iter().skip(skip)
            })
            .collect(),
    )
}

/// One quarter circle of the Fibonacci spiral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarterArc {
    pub center: Point,
    pub radius: f64,
    /// Polar angle (about `center`) where the arc starts.
    pub start_angle: f64,
}

impl QuarterArc {
    pub fn point_at(&self, fraction: f64) -> Point {
        let angle = self.start_angle + fraction * FRAC_PI_2;
        Point::new(
            self.center.x + self.radius * angle.cos(),
            self.center.y + self.radius * angle.sin(),
        )
    }

    pub fn start(&self) -> Point {
        self.point_at(0.0)
    }

    pub fn end(&self) -> Point {
        self.point_at(1.0)
    }

    fn sample(&self, count: usize) -> Vec<Point> {
        (0..count)
            .map(|i| self.point_at(i as f64 / (count - 1) as f64))
            .collect()
    }
}

pub fn fibonacci_arcs(n_arcs: u32, unit: f64) -> Result<Vec<QuarterArc>> {
    if n_arcs < 2 {
        return Err(Error::InvalidParameter(format!(
            "fibonacci spiral needs at least 2 arcs, got {n_arcs}"
        )));
    }
    if n_arcs > MAX_FIBONACCI_INDEX {
        return Err(Error::ParameterRange {
            name: "n_arcs",
            value: n_arcs as f64,
            reason: "arc radii overflow beyond 92 arcs",
        });
    }
    if !(unit > 0.0) || !unit.is_finite() {
        return Err(Error::ParameterRange {
            name: "unit",
            value: unit,
            reason: "unit length must be positive",
        });
    }
    let mut arcs = Vec::with_capacity(n_arcs as usize);
    // first unit square spans (0,0)-(1,1); its arc runs from (1,0) to (0,1)
    let mut center = Point::new(0.0, 0.0);
    let mut previous_radius = 0.0;
    for k in 1..=n_arcs {
        let radius = fibonacci(k)? as f64 * unit;
        let start_angle = (k - 1) as f64 * FRAC_PI_2;
        if k > 1 {
            // keep the start point equal to the previous end point:
            // center + radius * e(start) = old_center + previous_radius * e(start)
            let (s, c) = start_angle.sin_cos();
            center = Point::new(
                center.x + (previous_radius - radius) * c,
                center.y + (previous_radius - radius) * s,
            );
        }
        arcs.push(QuarterArc {
            center,
            radius,
            start_angle,
        });
        previous_radius = radius;
    }
    Ok(arcs)
}

/// Relative mismatch between the Fibonacci spiral and the golden spiral
/// over the final quarter turn: both start that turn at radius `F_{n-1}`;
/// the golden spiral ends it at `phi F_{n-1}`, the Fibonacci spiral at
/// `F_n`. Shrinks with `n_arcs` but never reaches zero.
pub fn golden_deviation(n_arcs: u32) -> Result<f64> {
    if n_arcs < 2 {
        return Err(Error::InvalidParameter(format!(
            "golden deviation needs at least 2 arcs, got {n_arcs}"
        )));
    }
    let phi = GoldenConstants::new().phi;
    Ok((ratio_convergence(n_arcs)? - phi).abs() / phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticResiduals {
    pub phi_quadratic: f64,
    pub psi_quadratic: f64,
    /// `max_n |phi^n - phi^{n-1} - phi^{n-2}| / phi^n` for `2 <= n <= 20`.
    pub phi_recurrence_scaled: f64,
    pub psi_recurrence_scaled: f64,
}

pub fn quadratic_and_recurrence_check() -> QuadraticResiduals {
    let g = GoldenConstants::new();
    let quad = |x: f64| (x * x - x - 1.0).abs();
    let recur = |x: f64| {
        (2..=20)
            .map(|n| {
                let xn = x.powi(n);
                (xn - x.powi(n - 1) - x.powi(n - 2)).abs() / xn.abs()
            })
            .fold(0.0, f64::max)
    };
    QuadraticResiduals {
        phi_quadratic: quad(g.phi),
        psi_quadratic: quad(g.psi),
        phi_recurrence_scaled: recur(g.phi),
        psi_recurrence_scaled: recur(g.psi),
    }
}

/// Finite-difference residuals of `r'' + r' - r = 0` for
/// `r_phi = r0 e^{-phi t}` and `r_psi = r0 e^{-psi t}`.
pub fn ode_a4_check(r0: f64, times: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = GoldenConstants::new();
    let r_phi: Vec<Complex64> = times
        .iter()
        .map(|&t| Complex64::new(r0 * (-g.phi * t).exp(), 0.0))
        .collect();
    let r_psi: Vec<Complex64> = times
        .iter()
        .map(|&t| Complex64::new(r0 * (-g.psi * t).exp(), 0.0))
        .collect();
    Ok((
        second_order_residual(times, &r_phi, 1.0, 1.0, -1.0)?,
        second_order_residual(times, &r_psi, 1.0, 1.0, -1.0)?,
    ))
}
