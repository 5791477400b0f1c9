//! Logarithmic spiral geometry and the doubled damped/amplified oscillator
//! whose two solutions trace the direct and indirect spirals.
//!
//! Times are dimensionless; the damping rate `Gamma = gamma / 2m` sets the
//! scale. Angles are anti-clockwise positive and the additive constant in
//! `theta(t) = (Gamma / d) t` is zero.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Handedness {
    /// Anti-clockwise growth, `r = r0 e^{+d theta}`.
    Direct,
    /// Clockwise image, `r = r0 e^{-d theta}`.
    Indirect,
}

impl Handedness {
    pub fn sign(self) -> f64 {
        match self {
            Handedness::Direct => 1.0,
            Handedness::Indirect => -1.0,
        }
    }
}

impl std::str::FromStr for Handedness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Handedness::Direct),
            "indirect" => Ok(Handedness::Indirect),
            other => Err(Error::InvalidParameter(format!(
                "handedness must be direct or indirect, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralParams {
    r0: f64,
    d: f64,
    handedness: Handedness,
}

impl SpiralParams {
    pub fn new(r0: f64, d: f64, handedness: Handedness) -> Result<Self> {
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::ParameterRange {
                name: "r0",
                value: r0,
                reason: "initial radius must be positive",
            });
        }
        if d == 0.0 || !d.is_finite() {
            return Err(Error::ParameterRange {
                name: "d",
                value: d,
                reason: "spiral slope must be finite and nonzero",
            });
        }
        Ok(Self { r0, d, handedness })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn handedness(&self) -> Handedness {
        self.handedness
    }

    /// Slope of `ln r` against `theta` including the handedness sign.
    pub fn effective_slope(&self) -> f64 {
        self.handedness.sign() * self.d
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.r0 * (self.effective_slope() * theta).exp()
    }

    /// Same spiral with the opposite handedness.
    pub fn mirrored(&self) -> Self {
        let handedness = match self.handedness {
            Handedness::Direct => Handedness::Indirect,
            Handedness::Indirect => Handedness::Direct,
        };
        Self { handedness, ..*self }
    }
}

pub fn spiral_point(p: &SpiralParams, theta: f64) -> Point {
    Point::polar(p.radius(theta), theta)
}

/// `count` points with `theta` evenly spaced on `[0, theta_max]`.
pub fn sample_spiral(p: &SpiralParams, theta_max: f64, count: usize) -> Result<Vec<(f64, Point)>> {
    if count < 2 {
        return Err(Error::InsufficientSamples {
            required: 2,
            got: count,
        });
    }
    if !(theta_max > 0.0) || !theta_max.is_finite() {
        return Err(Error::ParameterRange {
            name: "theta_max",
            value: theta_max,
            reason: "angular range must be positive",
        });
    }
    let step = theta_max / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            let theta = i as f64 * step;
            (theta, spiral_point(p, theta))
        })
        .collect())
}

/// Mass, damping and stiffness of the doubled oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MechanicalParams {
    pub m: f64,
    pub gamma: f64,
    pub kappa: f64,
}

impl MechanicalParams {
    /// Requires the underdamped regime `kappa > gamma^2 / 4m`.
    pub fn new(m: f64, gamma: f64, kappa: f64) -> Result<Self> {
        for (name, value) in [("m", m), ("gamma", gamma), ("kappa", kappa)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::ParameterRange {
                    name,
                    value,
                    reason: "mechanical parameters must be positive",
                });
            }
        }
        if kappa <= gamma * gamma / (4.0 * m) {
            return Err(Error::ParameterRange {
                name: "kappa",
                value: kappa,
                reason: "oscillation needs kappa > gamma^2 / 4m",
            });
        }
        Ok(Self { m, gamma, kappa })
    }

    /// Parameters whose trajectories trace a spiral of slope `d`, i.e.
    /// `Omega d = Gamma`.
    pub fn for_spiral(m: f64, gamma: f64, d: f64) -> Result<Self> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::ParameterRange {
                name: "d",
                value: d,
                reason: "spiral slope must be positive",
            });
        }
        let rate = gamma / (2.0 * m);
        let omega = rate / d;
        Self::new(m, gamma, m * (omega * omega + rate * rate))
    }

    /// `Gamma = gamma / 2m`.
    pub fn damping_rate(&self) -> f64 {
        self.gamma / (2.0 * self.m)
    }

    /// `Omega = sqrt(kappa / m - Gamma^2)`.
    pub fn omega(&self) -> f64 {
        let rate = self.damping_rate();
        (self.kappa / self.m - rate * rate).sqrt()
    }

    /// The spiral slope `d = Gamma / Omega` these parameters trace.
    pub fn spiral_slope(&self) -> f64 {
        self.damping_rate() / self.omega()
    }

    /// Period `T = 2 pi d / Gamma` for the bound slope.
    pub fn period(&self) -> f64 {
        2.0 * PI * self.spiral_slope() / self.damping_rate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    z1: Vec<Complex64>,
    z2: Vec<Complex64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, z1: Vec<Complex64>, z2: Vec<Complex64>) -> Result<Self> {
        if z1.len() != times.len() || z2.len() != times.len() {
            return Err(Error::DimensionMismatch {
                left: times.len(),
                right: z1.len().max(z2.len()),
            });
        }
        check_increasing(&times)?;
        Ok(Self { times, z1, z2 })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn z1(&self) -> &[Complex64] {
        &self.z1
    }

    pub fn z2(&self) -> &[Complex64] {
        &self.z2
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_increasing(times: &[f64]) -> Result<()> {
    if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSample {
            index: i + 1,
            reason: "times must be strictly increasing".into(),
        });
    }
    Ok(())
}

/// `theta(t) = (Gamma / d) t`.
pub fn theta_of_t(mech: &MechanicalParams, d: f64, t: f64) -> Result<f64> {
    if d == 0.0 {
        return Err(Error::ParameterRange {
            name: "d",
            value: d,
            reason: "spiral slope must be nonzero",
        });
    }
    Ok(mech.damping_rate() / d * t)
}

/// Evenly spaced times `start, start + h, ...` (`count` samples).
pub fn uniform_times(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + i as f64 * step).collect()
}

/// `z1 = r0 e^{-i Omega t} e^{-Gamma t}`, `z2 = r0 e^{+i Omega t} e^{+Gamma t}`.
pub fn analytic_trajectory(mech: &MechanicalParams, r0: f64, times: &[f64]) -> Result<Trajectory> {
    let checked = MechanicalParams::new(mech.m, mech.gamma, mech.kappa)?;
    let rate = checked.damping_rate();
    let omega = checked.omega();
    let z1 = times
        .iter()
        .map(|&t| Complex64::from_polar(r0 * (-rate * t).exp(), -omega * t))
        .collect();
    let z2 = times
        .iter()
        .map(|&t| Complex64::from_polar(r0 * (rate * t).exp(), omega * t))
        .collect();
    Trajectory::new(times.to_vec(), z1, z2)
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 5 {
        return Err(Error::InsufficientSamples {
            required: 5,
            got: times.len(),
        });
    }
    check_increasing(times)?;
    let h = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h + 1e-14 * w[1].abs() {
            return Err(Error::InvalidSample {
                index: i + 1,
                reason: "samples must be uniformly spaced".into(),
            });
        }
    }
    Ok(h)
}

/// Fourth-order central first and second derivatives at sample `i`
/// (requires `2 <= i < len - 2`).
fn central_derivatives(f: &[Complex64], i: usize, h: f64) -> (Complex64, Complex64) {
    let (m2, m1, c0, p1, p2) = (f[i - 2], f[i - 1], f[i], f[i + 1], f[i + 2]);
    let first = (m2 - m1 * 8.0 + p1 * 8.0 - p2) / (12.0 * h);
    let second = (-m2 + m1 * 16.0 - c0 * 30.0 + p1 * 16.0 - p2) / (12.0 * h * h);
    (first, second)
}

/// `|m f'' + c f' + k f|` at every sample with two neighbours on each side;
/// endpoints are dropped rather than handled with one-sided stencils.
pub fn second_order_residual(
    times: &[f64],
    values: &[Complex64],
    m: f64,
    c: f64,
    k: f64,
) -> Result<Vec<f64>> {
    if values.len() != times.len() {
        return Err(Error::DimensionMismatch {
            left: times.len(),
            right: values.len(),
        });
    }
    let h = uniform_step(times)?;
    Ok((2..times.len() - 2)
        .map(|i| {
            let (d1, d2) = central_derivatives(values, i, h);
            (d2 * m + d1 * c + values[i] * k).norm()
        })
        .collect())
}

/// Residual pairs `(|m z1'' + gamma z1' + kappa z1|, |m z2'' - gamma z2' + kappa z2|)`.
pub fn ode_residual(mech: &MechanicalParams, traj: &Trajectory) -> Result<Vec<(f64, f64)>> {
    let r1 = second_order_residual(&traj.times, &traj.z1, mech.m, mech.gamma, mech.kappa)?;
    let r2 = second_order_residual(&traj.times, &traj.z2, mech.m, -mech.gamma, mech.kappa)?;
    Ok(r1.into_iter().zip(r2).collect())
}

/// Residuals of `m rho'' + K rho = 0`, `K = m Omega^2`, for
/// `rho_pm = r0 e^{pm i theta(t)}` with `theta = (Gamma/d) t`.
pub fn rho_residual(
    mech: &MechanicalParams,
    d: f64,
    r0: f64,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let stiffness = mech.m * mech.omega().powi(2);
    let mut plus = Vec::with_capacity(times.len());
    let mut minus = Vec::with_capacity(times.len());
    for &t in times {
        let theta = theta_of_t(mech, d, t)?;
        plus.push(Complex64::from_polar(r0, theta));
        minus.push(Complex64::from_polar(r0, -theta));
    }
    let rp = second_order_residual(times, &plus, mech.m, 0.0, stiffness)?;
    let rm = second_order_residual(times, &minus, mech.m, 0.0, stiffness)?;
    Ok(rp.into_iter().zip(rm).collect())
}

pub fn max_pair(residuals: &[(f64, f64)]) -> f64 {
    residuals.iter().fold(0.0, |acc, (a, b)| acc.max(*a).max(*b))
}

/// RK4 solution of the doubled system plus its canonical momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledSolution {
    pub trajectory: Trajectory,
    pub v1: Vec<Complex64>,
    pub v2: Vec<Complex64>,
    /// `p_{z1} = m z2' - gamma z2 / 2`.
    pub p_z1: Vec<Complex64>,
    /// `p_{z2} = m z1' + gamma z1 / 2`.
    pub p_z2: Vec<Complex64>,
}

pub const MIN_RK4_STEPS: usize = 16;

/// Fixed-step classical RK4 on the first-order form of
/// `m z1'' + gamma z1' + kappa z1 = 0` and `m z2'' - gamma z2' + kappa z2 = 0`.
pub fn integrate_doubled_system(
    mech: &MechanicalParams,
    z1_0: Complex64,
    z2_0: Complex64,
    v1_0: Complex64,
    v2_0: Complex64,
    t_end: f64,
    steps: usize,
) -> Result<DoubledSolution> {
    if steps < MIN_RK4_STEPS {
        return Err(Error::InsufficientSamples {
            required: MIN_RK4_STEPS,
            got: steps,
        });
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::ParameterRange {
            name: "t_end",
            value: t_end,
            reason: "integration horizon must be positive",
        });
    }
    let (m, gamma, kappa) = (mech.m, mech.gamma, mech.kappa);
    // state: [z1, v1, z2, v2]
    let rhs = |y: &[Complex64; 4]| -> [Complex64; 4] {
        [
            y[1],
            -(y[1] * gamma + y[0] * kappa) / m,
            y[3],
            (y[3] * gamma - y[2] * kappa) / m,
        ]
    };
    let axpy = |y: &[Complex64; 4], k: &[Complex64; 4], s: f64| -> [Complex64; 4] {
        [y[0] + k[0] * s, y[1] + k[1] * s, y[2] + k[2] * s, y[3] + k[3] * s]
    };
    let h = t_end / steps as f64;
    let mut y = [z1_0, v1_0, z2_0, v2_0];
    let mut states = Vec::with_capacity(steps + 1);
    states.push(y);
    for _ in 0..steps {
        let k1 = rhs(&y);
        let k2 = rhs(&axpy(&y, &k1, h / 2.0));
        let k3 = rhs(&axpy(&y, &k2, h / 2.0));
        let k4 = rhs(&axpy(&y, &k3, h));
        for j in 0..4 {
            y[j] += (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (h / 6.0);
        }
        states.push(y);
    }
    let times = uniform_times(0.0, h, steps + 1);
    let z1: Vec<_> = states.iter().map(|s| s[0]).collect();
    let v1: Vec<_> = states.iter().map(|s| s[1]).collect();
    let z2: Vec<_> = states.iter().map(|s| s[2]).collect();
    let v2: Vec<_> = states.iter().map(|s| s[3]).collect();
    let p_z1 = v2.iter().zip(&z2).map(|(v, z)| v * m - z * (gamma / 2.0)).collect();
    let p_z2 = v1.iter().zip(&z1).map(|(v, z)| v * m + z * (gamma / 2.0)).collect();
    Ok(DoubledSolution {
        trajectory: Trajectory::new(times, z1, z2)?,
        v1,
        v2,
        p_z1,
        p_z2,
    })
}

/// Initial data `(z1, z2, z1', z2')` at `t = 0` of the analytic spiral pair.
pub fn analytic_initial_data(mech: &MechanicalParams, r0: f64) -> [Complex64; 4] {
    let rate = mech.damping_rate();
    let omega = mech.omega();
    let z = Complex64::new(r0, 0.0);
    [
        z,
        z,
        z * Complex64::new(-rate, -omega),
        z * Complex64::new(rate, omega),
    ]
}

/// Max over interior samples of `|p_{z_i}' - dL/dz_i|` with
/// `L = m z1' z2' + (gamma/2)(z1 z2' - z1' z2) - kappa z1 z2`.
pub fn euler_lagrange_residual(mech: &MechanicalParams, sol: &DoubledSolution) -> Result<f64> {
    let times = sol.trajectory.times();
    let h = uniform_step(times)?;
    let z1 = sol.trajectory.z1();
    let z2 = sol.trajectory.z2();
    let mut worst = 0.0f64;
    for i in 2..times.len() - 2 {
        let (dp1, _) = central_derivatives(&sol.p_z1, i, h);
        let (dp2, _) = central_derivatives(&sol.p_z2, i, h);
        let dl_dz1 = sol.v2[i] * (mech.gamma / 2.0) - z2[i] * mech.kappa;
        let dl_dz2 = -sol.v1[i] * (mech.gamma / 2.0) - z1[i] * mech.kappa;
        worst = worst.max((dp1 - dl_dz1).norm()).max((dp2 - dl_dz2).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// All radii equal: slope 0 with a perfect, but uninformative, fit.
    pub degenerate: bool,
}

/// Least squares `ln r = slope * theta + intercept`.
pub fn fit_loglog_slope(samples: &[(f64, f64)]) -> Result<SlopeFit> {
    if samples.len() < 3 {
        return Err(Error::InsufficientSamples {
            required: 3,
            got: samples.len(),
        });
    }
    for (index, &(theta, r)) in samples.iter().enumerate() {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidSample {
                index,
                reason: format!("radius must be positive, got {r}"),
            });
        }
        if !theta.is_finite() {
            return Err(Error::InvalidSample {
                index,
                reason: format!("angle must be finite, got {theta}"),
            });
        }
    }
    let n = samples.len() as f64;
    let mean_x = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_y = samples.iter().map(|s| s.1.ln()).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(theta, r) in samples {
        let dx = theta - mean_x;
        let dy = r.ln() - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "all angles coincide; slope is undetermined".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = samples
        .iter()
        .map(|&(theta, r)| (r.ln() - slope * theta - intercept).powi(2))
        .sum();
    let degenerate = syy == 0.0;
    let r_squared = if degenerate { 1.0 } else { 1.0 - ss_res / syy };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference() -> MechanicalParams {
        // Gamma = 0.5, Omega = 2, d = 0.25
        MechanicalParams::new(1.0, 1.0, 4.25).unwrap()
    }

    #[test]
    fn spiral_point_basics() {
        let p = SpiralParams::new(2.0, 0.1, Handedness::Direct).unwrap();
        assert_eq!(spiral_point(&p, 0.0), Point::new(2.0, 0.0));
        let unit = SpiralParams::new(1.0, 0.1, Handedness::Direct).unwrap();
        let r = spiral_point(&unit, 2.0 * PI).norm();
        assert!((r - (0.2 * PI).exp()).abs() < 1e-12);
        assert!((r - 1.8745).abs() < 1e-4);
    }

    #[test]
    fn indirect_mirrors_direct() {
        let direct = SpiralParams::new(1.5, 0.2, Handedness::Direct).unwrap();
        let indirect = direct.mirrored();
        for theta in [-3.0, -0.5, 0.0, 1.0, 7.0] {
            assert_eq!(indirect.radius(theta), direct.radius(-theta));
        }
    }

    #[test]
    fn spiral_params_validation() {
        assert!(SpiralParams::new(0.0, 0.1, Handedness::Direct).is_err());
        assert!(SpiralParams::new(1.0, 0.0, Handedness::Direct).is_err());
        assert!("sideways".parse::<Handedness>().is_err());
        assert_eq!("indirect".parse::<Handedness>().unwrap(), Handedness::Indirect);
    }

    #[test]
    fn mechanical_derived_quantities() {
        let mech = reference();
        assert_eq!(mech.damping_rate(), 0.5);
        assert!((mech.omega() - 2.0).abs() < 1e-15);
        assert!((mech.spiral_slope() - 0.25).abs() < 1e-15);
        assert!(MechanicalParams::new(1.0, 4.0, 4.0).is_err());
        let bound = MechanicalParams::for_spiral(2.0, 0.6, 0.3).unwrap();
        assert!((bound.omega() * 0.3 - bound.damping_rate()).abs() < 1e-14);
    }

    #[test]
    fn theta_of_t_examples() {
        let mech = reference();
        assert_eq!(theta_of_t(&mech, 0.25, 0.0).unwrap(), 0.0);
        assert!((theta_of_t(&mech, 0.25, PI).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!(theta_of_t(&mech, 0.0, 1.0).is_err());
    }

    #[test]
    fn analytic_trajectory_examples() {
        let mech = reference();
        let r0 = 1.7;
        let t = mech.period();
        let traj = analytic_trajectory(&mech, r0, &[0.0, 0.3, t]).unwrap();
        assert_eq!(traj.z1()[0], Complex64::new(r0, 0.0));
        assert_eq!(traj.z2()[0], Complex64::new(r0, 0.0));
        let expected = r0 * (-PI / 2.0).exp();
        assert!((traj.z1()[2].norm() - expected).abs() < 1e-12);
        assert!((traj.z1()[2].norm() / r0 - 0.2079).abs() < 1e-4);
        assert!((traj.z2()[2].norm() - r0 * (2.0 * PI * 0.25).exp()).abs() < 1e-12);
    }

    #[test]
    fn ode_residual_small_for_analytic_solution() {
        let mech = reference();
        let times = uniform_times(0.0, 1e-3, 2001);
        let traj = analytic_trajectory(&mech, 1.0, &times).unwrap();
        let res = ode_residual(&mech, &traj).unwrap();
        assert_eq!(res.len(), times.len() - 4);
        assert!(max_pair(&res) < 1e-6);
    }

    #[test]
    fn ode_residual_converges_at_fourth_order() {
        let mech = reference();
        let coarse = uniform_times(0.0, 0.05, 41);
        let fine = uniform_times(0.0, 0.025, 81);
        let rc = max_pair(&ode_residual(&mech, &analytic_trajectory(&mech, 1.0, &coarse).unwrap()).unwrap());
        let rf = max_pair(&ode_residual(&mech, &analytic_trajectory(&mech, 1.0, &fine).unwrap()).unwrap());
        let factor = rc / rf;
        assert!((12.0..=20.0).contains(&factor), "factor {factor}");
    }

    #[test]
    fn residual_of_zero_is_zero() {
        let times = uniform_times(0.0, 0.1, 10);
        let zeros = vec![Complex64::new(0.0, 0.0); 10];
        let traj = Trajectory::new(times.clone(), zeros.clone(), zeros).unwrap();
        assert_eq!(max_pair(&ode_residual(&reference(), &traj).unwrap()), 0.0);
        assert_eq!(max_pair(&rho_residual(&reference(), 0.25, 0.0, &times).unwrap()), 0.0);
    }

    #[test]
    fn residual_guards() {
        let times = uniform_times(0.0, 0.1, 4);
        let z = vec![Complex64::new(1.0, 0.0); 4];
        let traj = Trajectory::new(times, z.clone(), z).unwrap();
        assert!(matches!(
            ode_residual(&reference(), &traj),
            Err(Error::InsufficientSamples { required: 5, got: 4 })
        ));
        let uneven = vec![0.0, 0.1, 0.2, 0.35, 0.4, 0.5];
        let z = vec![Complex64::new(1.0, 0.0); 6];
        assert!(second_order_residual(&uneven, &z, 1.0, 0.0, 1.0).is_err());
        assert!(Trajectory::new(vec![0.0, 0.0], z[..2].to_vec(), z[..2].to_vec()).is_err());
    }

    #[test]
    fn rho_residual_and_negative_control() {
        let mech = reference();
        let times = uniform_times(0.0, 1e-3, 1001);
        let res = max_pair(&rho_residual(&mech, 0.25, 1.0, &times).unwrap());
        assert!(res < 1e-6, "{res}");
        // Omega up by 1% with Gamma fixed: kappa/m = (1.01 Omega)^2 + Gamma^2
        let perturbed = MechanicalParams::new(1.0, 1.0, (2.0f64 * 1.01).powi(2) + 0.25).unwrap();
        let bad = max_pair(&rho_residual(&perturbed, 0.25, 1.0, &times).unwrap());
        assert!(bad > 1e4 * res.max(1e-12), "{bad}");
        assert!(bad > 1e-2);
    }

    #[test]
    fn rk4_matches_analytic_solution() {
        let mech = reference();
        let [z1, z2, v1, v2] = analytic_initial_data(&mech, 1.0);
        let t_end = 2.0 * mech.period();
        let sol = integrate_doubled_system(&mech, z1, z2, v1, v2, t_end, 10_000).unwrap();
        let exact = analytic_trajectory(&mech, 1.0, sol.trajectory.times()).unwrap();
        let err = sol
            .trajectory
            .z1()
            .iter()
            .zip(exact.z1())
            .chain(sol.trajectory.z2().iter().zip(exact.z2()))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        let mech = reference();
        let [z1, z2, v1, v2] = analytic_initial_data(&mech, 1.0);
        let t_end = 2.0 * mech.period();
        let err = |steps: usize| {
            let sol = integrate_doubled_system(&mech, z1, z2, v1, v2, t_end, steps).unwrap();
            let exact = analytic_trajectory(&mech, 1.0, &[t_end]).unwrap();
            let n = sol.trajectory.len() - 1;
            (sol.trajectory.z1()[n] - exact.z1()[0])
                .norm()
                .max((sol.trajectory.z2()[n] - exact.z2()[0]).norm())
        };
        let factor = err(200) / err(400);
        assert!((12.0..=20.0).contains(&factor), "factor {factor}");
    }

    #[test]
    fn undamped_limit_keeps_copies_equal() {
        // gamma = 0 bypasses the constructor's positivity check on purpose
        let mech = MechanicalParams { m: 1.0, gamma: 0.0, kappa: 3.0 };
        let z = Complex64::new(0.4, -0.2);
        let v = Complex64::new(0.1, 0.7);
        let sol = integrate_doubled_system(&mech, z, z, v, v, 10.0, 2000).unwrap();
        for (a, b) in sol.trajectory.z1().iter().zip(sol.trajectory.z2()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn rk4_step_guard() {
        let mech = reference();
        let z = Complex64::new(1.0, 0.0);
        assert!(matches!(
            integrate_doubled_system(&mech, z, z, z, z, 1.0, 8),
            Err(Error::InsufficientSamples { required: 16, got: 8 })
        ));
    }

    #[test]
    fn euler_lagrange_consistency() {
        let mech = reference();
        let [z1, z2, v1, v2] = analytic_initial_data(&mech, 1.0);
        let sol = integrate_doubled_system(&mech, z1, z2, v1, v2, 2.0, 2000).unwrap();
        assert!(euler_lagrange_residual(&mech, &sol).unwrap() < 1e-6);
        let first = sol.p_z1[0];
        let expected = v2 * mech.m - z2 * (mech.gamma / 2.0);
        assert!((first - expected).norm() < 1e-15);
    }

    #[test]
    fn fit_examples() {
        let p = SpiralParams::new(0.8, 0.30635, Handedness::Direct).unwrap();
        let samples: Vec<_> = sample_spiral(&p, 4.0 * PI, 200)
            .unwrap()
            .into_iter()
            .map(|(t, pt)| (t, pt.norm()))
            .collect();
        let fit = fit_loglog_slope(&samples).unwrap();
        assert!((fit.slope - 0.30635).abs() < 1e-6);
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert!((fit.intercept - 0.8f64.ln()).abs() < 1e-9);

        let mirrored: Vec<_> = samples.iter().map(|&(t, _)| (t, p.mirrored().radius(t))).collect();
        let twin = fit_loglog_slope(&mirrored).unwrap();
        assert!((twin.slope + fit.slope).abs() < 1e-12);

        let flat = fit_loglog_slope(&[(0.0, 2.0), (1.0, 2.0), (2.0, 2.0)]).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert!(flat.degenerate);
    }

    #[test]
    fn fit_rejects_bad_samples() {
        assert!(matches!(
            fit_loglog_slope(&[(0.0, 1.0), (1.0, -1.0), (2.0, 3.0)]),
            Err(Error::InvalidSample { index: 1, .. })
        ));
        assert!(fit_loglog_slope(&[(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
    }

    proptest! {
        #[test]
        fn quarter_turn_rescaling(r0 in 0.1f64..5.0, d in 0.01f64..1.0, theta in -10.0f64..10.0, direct in any::<bool>()) {
            let h = if direct { Handedness::Direct } else { Handedness::Indirect };
            let p = SpiralParams::new(r0, d, h).unwrap();
            let ratio = p.radius(theta + 2.0 * PI) / p.radius(theta);
            let expected = (h.sign() * 2.0 * PI * d).exp();
            prop_assert!((ratio - expected).abs() <= 1e-12 * expected);
        }

        #[test]
        fn analytic_radii_product_is_constant(r0 in 0.1f64..3.0, gamma in 0.1f64..2.0, d in 0.05f64..1.0, t in 0.0f64..10.0) {
            let mech = MechanicalParams::for_spiral(1.0, gamma, d).unwrap();
            let traj = analytic_trajectory(&mech, r0, &[t]).unwrap();
            let prod = traj.z1()[0].norm() * traj.z2()[0].norm();
            prop_assert!((prod - r0 * r0).abs() <= 1e-12 * r0 * r0);
        }

        #[test]
        fn period_closes_one_turn(m in 0.2f64..5.0, gamma in 0.05f64..3.0, d in 0.05f64..2.0) {
            let mech = MechanicalParams::for_spiral(m, gamma, d).unwrap();
            let period = 2.0 * PI * d / mech.damping_rate();
            let theta = theta_of_t(&mech, d, period).unwrap();
            prop_assert!((theta - 2.0 * PI).abs() < 1e-12);
        }

        #[test]
        fn fit_inverts_sampling(d in 0.01f64..1.5, r0 in 0.1f64..10.0) {
            let p = SpiralParams::new(r0, d, Handedness::Direct).unwrap();
            let samples: Vec<_> = (0..50).map(|i| {
                let t = i as f64 * 0.2;
                (t, p.radius(t))
            }).collect();
            let fit = fit_loglog_slope(&samples).unwrap();
            prop_assert!((fit.slope - d).abs() < 1e-6);
        }
    }
}
