//! Verification suites: each check evaluates one invariant or worked example
//! and records the measured residual against its tolerance.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::spiral::{self, Handedness, MechanicalParams, SpiralParams};
use crate::{dissipative, fock, golden, ncplane, selfsim};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass when `measured <= tolerance` (residual-type).
    AtMost,
    /// Pass when `measured >= tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub paper_anchor: String,
    /// `None` when the computation itself failed; see `detail`.
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(id: &str, anchor: &str, measured: Result<f64>, tolerance: f64, comparison: Comparison) -> Self {
        let (measured, detail) = match measured {
            Ok(v) if v.is_finite() => (Some(v), None),
            Ok(v) => (None, Some(format!("non-finite measurement {v}"))),
            Err(e) => (None, Some(e.to_string())),
        };
        let pass = match (measured, comparison) {
            (Some(v), Comparison::AtMost) => v <= tolerance,
            (Some(v), Comparison::AtLeast) => v >= tolerance,
            (None, _) => false,
        };
        Self {
            id: id.into(),
            paper_anchor: anchor.into(),
            measured,
            tolerance,
            comparison,
            pass,
            detail,
        }
    }

    pub fn at_most(id: &str, anchor: &str, measured: Result<f64>, tolerance: f64) -> Self {
        Self::new(id, anchor, measured, tolerance, Comparison::AtMost)
    }

    pub fn at_least(id: &str, anchor: &str, measured: Result<f64>, tolerance: f64) -> Self {
        Self::new(id, anchor, measured, tolerance, Comparison::AtLeast)
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        self.detail = Some(match self.detail.take() {
            Some(existing) => format!("{existing}; {detail}"),
            None => detail,
        });
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Fock,
    Selfsim,
    Spiral,
    Dissipative,
    Golden,
    Ncplane,
}

impl Suite {
    pub const NAMES: &'static [&'static str] =
        &["all", "fock", "selfsim", "spiral", "dissipative", "golden", "ncplane"];

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Fock,
                Suite::Selfsim,
                Suite::Spiral,
                Suite::Dissipative,
                Suite::Golden,
                Suite::Ncplane,
            ],
            other => vec![other],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "fock" => Suite::Fock,
            "selfsim" => Suite::Selfsim,
            "spiral" => Suite::Spiral,
            "dissipative" => Suite::Dissipative,
            "golden" => Suite::Golden,
            "ncplane" => Suite::Ncplane,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown suite {other:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::All => "all",
            Suite::Fock => "fock",
            Suite::Selfsim => "selfsim",
            Suite::Spiral => "spiral",
            Suite::Dissipative => "dissipative",
            Suite::Golden => "golden",
            Suite::Ncplane => "ncplane",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    /// Seconds since the Unix epoch; the only non-deterministic field.
    pub generated_at: Option<u64>,
    pub suite: Suite,
    pub environment: RunConfig,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Runs every check of `suite`; checks are ordered by id.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> VerificationReport {
    let mut checks = Vec::new();
    for member in suite.members() {
        checks.extend(match member {
            Suite::Fock => fock_checks(cfg),
            Suite::Selfsim => selfsim_checks(cfg),
            Suite::Spiral => spiral_checks(cfg),
            Suite::Dissipative => dissipative_checks(cfg),
            Suite::Golden => golden_checks(cfg),
            Suite::Ncplane => ncplane_checks(cfg),
            Suite::All => unreachable!("expanded above"),
        });
    }
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    let passed = checks.iter().filter(|c| c.pass).count();
    VerificationReport {
        schema_version: SCHEMA_VERSION,
        generated_at: None,
        suite,
        environment: cfg.clone(),
        summary: Summary {
            total: checks.len(),
            passed,
        },
        checks,
    }
}

fn max_of<I: IntoIterator<Item = Result<f64>>>(values: I) -> Result<f64> {
    let mut worst = 0.0f64;
    for v in values {
        worst = worst.max(v?);
    }
    Ok(worst)
}

fn koch_q() -> fock::QDeformation {
    selfsim::SimilaritySpec::koch().self_similar_deformation()
}

/// Lens grid: labels `q alpha` on radii up to 2 and six directions, three
/// deformations, `n <= 5`.
fn lens_grid() -> Vec<(f64, Complex64, u32)> {
    let mut grid = Vec::new();
    for q in [1.0 / 3.0, 0.5, 0.8] {
        for radius in [0.0, 0.5, 1.0, 1.5, 2.0] {
            for k in 0..6 {
                let label = Complex64::from_polar(radius, k as f64 * PI / 3.0);
                for n in 0..=5 {
                    grid.push((q, label / q, n));
                }
            }
        }
    }
    grid
}

pub fn magnifying_lens_deviation(cutoff: usize) -> Result<f64> {
    max_of(lens_grid().into_iter().map(|(q, alpha, n)| {
        let qd = fock::QDeformation::new(q)?;
        let value = fock::magnifying_lens(qd, alpha, n, cutoff)?;
        Ok((value - (alpha * q).powu(n)).norm())
    }))
}

fn fock_checks(cfg: &RunConfig) -> Vec<Check> {
    let k = cfg.cutoff;
    let mut out = vec![
        Check::at_most(
            "fock.ccr_block",
            "[a, a^dagger] = 1 on the retained block",
            max_of([8, 16, 32, 64].map(fock::ccr_block_deviation)),
            1e-12,
        ),
        Check::at_most(
            "fock.coherent_eigenvalue",
            "coherent state expansion exp(-|alpha|^2/2) sum alpha^n/sqrt(n!) |n>: <alpha|a|alpha> = alpha",
            (|| {
                let alpha = Complex64::new(0.7, 0.2);
                let psi = fock::coherent_state_with_tolerance(alpha, k, cfg.tail_tolerance)?;
                Ok((fock::expectation(&fock::annihilation(k)?, &psi)? - alpha).norm())
            })(),
            1e-10,
        ),
        Check::at_most(
            "fock.coherent_eigenstate",
            "a|alpha> = alpha|alpha> for |alpha| <= 2",
            max_of([0.5, 1.0, 2.0].map(|r: f64| {
                let alpha = Complex64::from_polar(r, 0.4);
                let psi = fock::coherent_state_with_tolerance(alpha, k, cfg.tail_tolerance)?;
                let a = fock::annihilation(k)?;
                let residual = a.matrix() * psi.amplitudes() - psi.amplitudes() * alpha;
                Ok(residual.norm())
            })),
            1e-8,
        ),
        Check::at_most(
            "fock.fractal_composition",
            "q^N: q1^N q2^N = (q1 q2)^N",
            (|| {
                let (q1, q2) = (fock::QDeformation::new(0.6)?, fock::QDeformation::new(1.7)?);
                let prod = &fock::fractal_operator(q1, k)? * &fock::fractal_operator(q2, k)?;
                let direct = fock::fractal_operator(fock::QDeformation::new(0.6 * 1.7)?, k)?;
                Ok((prod.matrix() - direct.matrix())
                    .iter()
                    .zip(direct.matrix().iter())
                    .map(|(d, v)| d.norm() / v.norm())
                    .fold(0.0, f64::max))
            })(),
            1e-12,
        ),
    ];

    let overlap = (|| {
        let q = fock::QDeformation::new(1.0 / 3.0)?;
        let alpha = c(1.5);
        let image = fock::fractal_operator(q, k)?.apply(&fock::coherent_state(alpha, k)?)?;
        let target = fock::coherent_state(alpha * q.q(), k)?;
        let factor = image.amplitudes().norm() / target.amplitudes().norm();
        Ok((1.0 - image.normalized().inner(&target.normalized())?.norm(), factor, fock::fractal_image_factor(q, alpha)))
    })();
    out.push(match overlap {
        Ok((gap, factor, analytic)) => Check::at_most(
            "fock.fractal_coherent_overlap",
            "q^N |alpha> proportional to |q alpha>",
            Ok(gap),
            1e-10,
        )
        .with_detail(format!(
            "norm ratio |q^N alpha| / |q alpha| = {factor:.12}, analytic exp((|q alpha|^2 - |alpha|^2)/2) = {analytic:.12}"
        )),
        Err(e) => Check::at_most("fock.fractal_coherent_overlap", "q^N |alpha> proportional to |q alpha>", Err(e), 1e-10),
    });

    out.push(Check::at_most(
        "fock.magnifying_lens",
        "magnifying lens <q alpha|a^n|q alpha> = (q alpha)^n",
        magnifying_lens_deviation(k),
        1e-8,
    ));
    out.push(Check::at_most(
        "fock.magnifying_lens_koch",
        "q = 3^-d, alpha = 4: lens value 1 for every n",
        max_of((0..=5).map(|n| Ok((fock::magnifying_lens(koch_q(), c(4.0), n, k)? - c(1.0)).norm()))),
        1e-8,
    ));
    out.push(Check::at_most(
        "fock.squeeze_inverse",
        "single-mode squeeze exp(-(zeta/2)(a^2 - a^dagger^2)): U(zeta) U(-zeta) = 1",
        (|| {
            let prod = &fock::single_mode_squeeze(0.4, k)? * &fock::single_mode_squeeze(-0.4, k)?;
            Ok(prod.block_deviation(&CMatrix::identity(k, k), k.saturating_sub(8)))
        })(),
        1e-8,
    ));
    out.push(Check::at_most(
        "fock.squeezed_photon_number",
        "squeezed vacuum <N> = sinh^2 zeta",
        (|| {
            let u = fock::single_mode_squeeze(0.3, k)?;
            let psi = u.apply(&fock::FockState::basis(0, k)?)?;
            Ok((fock::expectation(&fock::number(k)?, &psi)?.re - 0.3f64.sinh().powi(2)).abs())
        })(),
        1e-6,
    ));
    out
}

fn selfsim_checks(cfg: &RunConfig) -> Vec<Check> {
    let depth = cfg.koch_depth;
    let koch = selfsim::SimilaritySpec::koch();
    vec![
        Check::at_most(
            "selfsim.dimension",
            "self-similarity dimension d = ln 4 / ln 3 = 1.2619",
            selfsim::similarity_dimension(4, 3.0).map(|d| (d - 1.2619).abs()),
            1e-4,
        ),
        Check::at_most(
            "selfsim.koch_census",
            "Koch stages: 4^n segments of length 3^-n",
            max_of((0..=depth).map(|n| {
                let line = selfsim::koch_iterate(n)?;
                if line.segment_count() != 4usize.pow(n) {
                    return Ok(f64::INFINITY);
                }
                let unit = 3f64.powi(-(n as i32));
                Ok(line.segment_lengths().map(|l| (l - unit).abs() / unit).fold(0.0, f64::max))
            })),
            1e-10,
        ),
        Check::at_most(
            "selfsim.koch_length",
            "Koch stage n has total length (4/3)^n",
            max_of((0..=depth).map(|n| {
                let expected = (4.0f64 / 3.0).powi(n as i32);
                Ok((selfsim::koch_iterate(n)?.length() - expected).abs() / expected)
            })),
            1e-10,
        ),
        Check::at_most(
            "selfsim.koch_self_similarity",
            "stage n-1 scaled by 1/3 is the first quarter of stage n",
            max_of((1..=depth.min(7)).map(selfsim::koch_self_similarity_deviation)),
            1e-10,
        )
        .with_detail("finite-stage form; exact self-similarity only holds in the limit"),
        Check::at_most(
            "selfsim.u_n_koch_point",
            "u_n = (q alpha)^n = 1 for any n at alpha = 4, q = 3^-d",
            max_of((0..=12).map(|n| Ok((selfsim::u_n(koch.self_similar_deformation(), c(4.0), n, false) - c(1.0)).norm()))),
            1e-12,
        ),
        Check::at_most(
            "selfsim.bargmann_orthonormality",
            "u_n = (q alpha)^n / sqrt(n!) orthonormal under exp(-|alpha|^2) d^2alpha / pi",
            Ok(selfsim::bargmann_orthonormality_deviation(4)),
            1e-6,
        ),
        Check::at_most(
            "selfsim.u_n_vs_lens",
            "u_n(q, alpha) equals the lens value for real q alpha",
            max_of(lens_grid().into_iter().filter(|(_, a, _)| a.im == 0.0).map(|(q, alpha, n)| {
                let qd = fock::QDeformation::new(q)?;
                Ok((selfsim::u_n(qd, alpha, n, false) - fock::magnifying_lens(qd, alpha, n, cfg.cutoff)?).norm())
            })),
            1e-8,
        ),
        Check::at_most(
            "selfsim.q_derivative_limit",
            "q-derivative (f(q alpha) - f(alpha)) / ((q-1) alpha) tends to f' as q -> 1",
            selfsim::q_derivative(|z| z * z * z, 1.0 + 1e-6, c(2.0)).map(|v| (v - c(12.0)).norm()),
            1e-4,
        ),
    ]
}

fn reference_mechanics() -> MechanicalParams {
    MechanicalParams::new(1.0, 1.0, 4.25).expect("valid reference parameters")
}

fn rk4_end_error(mech: &MechanicalParams, steps: usize) -> Result<f64> {
    let [z1, z2, v1, v2] = spiral::analytic_initial_data(mech, 1.0);
    let t_end = 2.0 * mech.period();
    let sol = spiral::integrate_doubled_system(mech, z1, z2, v1, v2, t_end, steps)?;
    let exact = spiral::analytic_trajectory(mech, 1.0, sol.trajectory.times())?;
    Ok(sol
        .trajectory
        .z1()
        .iter()
        .zip(exact.z1())
        .chain(sol.trajectory.z2().iter().zip(exact.z2()))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

fn fd_residual(mech: &MechanicalParams, h: f64, span: f64) -> Result<f64> {
    let count = (span / h).round() as usize + 1;
    let times = spiral::uniform_times(0.0, h, count);
    let traj = spiral::analytic_trajectory(mech, 1.0, &times)?;
    Ok(spiral::max_pair(&spiral::ode_residual(mech, &traj)?))
}

fn spiral_checks(cfg: &RunConfig) -> Vec<Check> {
    let mech = reference_mechanics();
    let d = mech.spiral_slope();
    let h = cfg.step;
    let mut out = vec![
        Check::at_most(
            "spiral.rotation_rescaling",
            "r = r0 e^{d theta}: a full turn rescales the radius by e^{2 pi d}",
            (|| {
                let p = SpiralParams::new(1.3, 0.1, Handedness::Direct)?;
                Ok((0..50)
                    .map(|i| {
                        let theta = -10.0 + 0.4 * i as f64;
                        let ratio = spiral::spiral_point(&p, theta + 2.0 * PI).norm() / spiral::spiral_point(&p, theta).norm();
                        (ratio / (0.2 * PI).exp() - 1.0).abs()
                    })
                    .fold(0.0, f64::max))
            })(),
            1e-12,
        ),
        Check::at_most(
            "spiral.period",
            "theta(t) = (Gamma/d) t reaches 2 pi at T = 2 pi d / Gamma",
            spiral::theta_of_t(&mech, d, mech.period()).map(|t| (t - 2.0 * PI).abs()),
            1e-12,
        ),
        Check::at_most(
            "spiral.radius_product",
            "|z1(t)| |z2(t)| = r0^2",
            (|| {
                let times = spiral::uniform_times(0.0, 0.05, 400);
                let traj = spiral::analytic_trajectory(&mech, 1.7, &times)?;
                Ok(traj
                    .z1()
                    .iter()
                    .zip(traj.z2())
                    .map(|(a, b)| (a.norm() * b.norm() / (1.7 * 1.7) - 1.0).abs())
                    .fold(0.0, f64::max))
            })(),
            1e-12,
        ),
        Check::at_most(
            "spiral.ode_residual",
            "damped and amplified oscillators m z'' +- gamma z' + kappa z = 0",
            fd_residual(&mech, h, 2.0),
            1e-6,
        ),
    ];

    let convergence = (|| Ok(fd_residual(&mech, 0.05, 2.0)? / fd_residual(&mech, 0.025, 2.0)?))();
    out.push(
        Check::at_most(
            "spiral.ode_residual_order",
            "finite-difference residual falls by 16 under step halving",
            convergence.clone().map(|f| (f - 16.0).abs()),
            4.0,
        )
        .with_detail(match convergence {
            Ok(f) => format!("factor {f:.4}, accepted range [12, 20]"),
            Err(e) => e.to_string(),
        }),
    );

    out.push(Check::at_most(
        "spiral.rho_residual",
        "rho = r0 e^{+-i theta(t)} solves m rho'' + K rho = 0 with K = m Omega^2",
        (|| {
            let times = spiral::uniform_times(0.0, h, (1.0 / h).round() as usize + 1);
            Ok(spiral::max_pair(&spiral::rho_residual(&mech, d, 1.0, &times)?))
        })(),
        1e-6,
    ));
    out.push(
        Check::at_least(
            "spiral.rho_negative_control",
            "Omega d = Gamma: a 1% change of Omega breaks the rho equation",
            (|| {
                let times = spiral::uniform_times(0.0, h, (1.0 / h).round() as usize + 1);
                let perturbed = MechanicalParams::new(1.0, 1.0, (2.0f64 * 1.01).powi(2) + 0.25)?;
                Ok(spiral::max_pair(&spiral::rho_residual(&perturbed, d, 1.0, &times)?))
            })(),
            1e-2,
        )
        .with_detail("residual must exceed the tolerance"),
    );
    out.push(Check::at_most(
        "spiral.rk4_vs_analytic",
        "RK4 integration of the doubled system over two periods",
        rk4_end_error(&mech, cfg.rk4_steps),
        1e-8,
    ));

    let rk4_factor = (|| Ok(rk4_end_error(&mech, 200)? / rk4_end_error(&mech, 400)?))();
    out.push(
        Check::at_most(
            "spiral.rk4_order",
            "RK4 error falls by 16 under step halving",
            rk4_factor.clone().map(|f| (f - 16.0).abs()),
            4.0,
        )
        .with_detail(match rk4_factor {
            Ok(f) => format!("factor {f:.4}, accepted range [12, 20]"),
            Err(e) => e.to_string(),
        }),
    );
    out.push(Check::at_most(
        "spiral.euler_lagrange",
        "canonical momenta p_z1 = m z2' - gamma z2/2, p_z2 = m z1' + gamma z1/2 satisfy p' = dL/dz",
        (|| {
            let [z1, z2, v1, v2] = spiral::analytic_initial_data(&mech, 1.0);
            let sol = spiral::integrate_doubled_system(&mech, z1, z2, v1, v2, 2.0, 2000)?;
            spiral::euler_lagrange_residual(&mech, &sol)
        })(),
        1e-6,
    ));
    out.push(Check::at_most(
        "spiral.undamped_symmetry",
        "gamma = 0: both copies obey the same oscillator",
        (|| {
            let free = MechanicalParams { m: 1.0, gamma: 0.0, kappa: 3.0 };
            let z = Complex64::new(0.4, -0.2);
            let v = Complex64::new(0.1, 0.7);
            let sol = spiral::integrate_doubled_system(&free, z, z, v, v, 10.0, 2000)?;
            Ok(sol
                .trajectory
                .z1()
                .iter()
                .zip(sol.trajectory.z2())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max))
        })(),
        1e-10,
    ));
    out.push(Check::at_most(
        "spiral.slope_round_trip",
        "ln r is a straight line of slope d against theta",
        (|| {
            let p = SpiralParams::new(0.8, 0.30635, Handedness::Direct)?;
            let samples: Vec<_> = spiral::sample_spiral(&p, 4.0 * PI, 200)?
                .into_iter()
                .map(|(t, pt)| (t, pt.norm()))
                .collect();
            let fit = spiral::fit_loglog_slope(&samples)?;
            let mirrored: Vec<_> = samples.iter().map(|&(t, _)| (t, p.mirrored().radius(t))).collect();
            let twin = spiral::fit_loglog_slope(&mirrored)?;
            Ok((fit.slope - 0.30635).abs().max((twin.slope + 0.30635).abs()))
        })(),
        1e-6,
    ));
    out
}

const VACUUM_GRID: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
const ENTROPY_GRID: [f64; 4] = [0.25, 0.5, 1.0, 1.5];

fn dissipative_checks(cfg: &RunConfig) -> Vec<Check> {
    let kp = cfg.pair_cutoff;
    let tol = cfg.tail_tolerance;
    let algebra = dissipative::build_modes(cfg.operator_cutoff);
    let mut out = vec![
        Check::at_most(
            "dissipative.mode_ccr",
            "[A, A^dagger] = 1 = [B, B^dagger], [A, B] = 0 = [A, B^dagger]",
            algebra
                .as_ref()
                .map(|a| a.ccr_deviations(cfg.margin).into_iter().fold(0.0, f64::max))
                .map_err(Clone::clone),
            1e-12,
        ),
        Check::at_most(
            "dissipative.hamiltonians_commute",
            "[H0, H_I] = 0 with H0 = Omega(A^dagger A - B^dagger B), H_I = i Gamma (A^dagger B^dagger - A B)",
            algebra
                .as_ref()
                .map(|a| a.hamiltonian_commutator(2.0, 0.5, cfg.margin))
                .map_err(Clone::clone),
            1e-10,
        ),
        Check::at_most(
            "dissipative.pair_closure",
            "condensation of (AB)^n pairs: H_I keeps |n, n> inside the pair subspace",
            algebra.as_ref().map(|a| a.pair_subspace_leakage(0.5)).map_err(Clone::clone),
            0.0,
        ),
        Check::at_most(
            "dissipative.casimir_eigenvalue",
            "H0 eigenvalue Omega (n_A - n_B); Casimir (n_A - n_B)/2",
            algebra
                .as_ref()
                .map(|a| {
                    let k = a.cutoff();
                    (a.casimir[(2 * k + 1, 2 * k + 1)].re - 0.5).abs()
                })
                .map_err(Clone::clone),
            1e-14,
        ),
    ];

    out.push(Check::at_most(
        "dissipative.vacuum_closed_form",
        "|0(t)> = (1/cosh Gamma t) exp(tanh(Gamma t) J+) |0> against exp(-i t H_I)|0>",
        max_of(ENTROPY_GRID.map(|gt| {
            let closed = dissipative::vacuum_evolution_with_tolerance(1.0, gt, kp, tol)?;
            let numeric = dissipative::vacuum_evolution_expm(1.0, gt, 2 * kp)?;
            Ok((0..kp)
                .map(|n| (closed.pair_amplitude(n) - numeric.pair_amplitude(n)).norm())
                .fold(0.0, f64::max))
        })),
        1e-8,
    ));
    out.push(Check::at_most(
        "dissipative.vacuum_norm",
        "<0(t)|0(t)> = 1",
        max_of(ENTROPY_GRID.map(|gt| {
            let psi = dissipative::vacuum_evolution_with_tolerance(1.0, gt, kp, tol)?;
            Ok((psi.retained_mass() + psi.tail_mass() - 1.0).abs())
        })),
        1e-12,
    ));
    out.push(Check::at_most(
        "dissipative.vacuum_fidelity",
        "<0(t)|0> = exp(-ln cosh Gamma t)",
        max_of(VACUUM_GRID.map(|gt| {
            let numeric = dissipative::vacuum_evolution_expm(1.0, gt, cfg.cutoff)?;
            Ok((numeric.pair_amplitude(0).re - dissipative::vacuum_fidelity(1.0, gt)?).abs())
        })),
        1e-6,
    ));
    out.push(Check::at_most(
        "dissipative.vacuum_decay",
        "<0(t)|0> -> 0 as t -> infinity",
        dissipative::vacuum_fidelity(1.0, 10.0),
        1e-4,
    ));
    out.push(Check::at_most(
        "dissipative.entropy_expectation",
        "entropy S_A = -(A^dagger A ln sinh^2 - A A^dagger ln cosh^2): <S_A> = cosh^2 ln cosh^2 - sinh^2 ln sinh^2",
        max_of(ENTROPY_GRID.map(|gt| {
            let psi = dissipative::vacuum_evolution_with_tolerance(1.0, gt, kp, tol)?;
            let s = dissipative::entropy_operator(1.0, gt, kp, dissipative::Mode::A)?.expectation(&psi)?;
            Ok((s - dissipative::entropy_closed_form(gt)).abs())
        })),
        1e-6,
    ));
    out.push(Check::at_most(
        "dissipative.entropy_symmetry",
        "S_A and S_B have equal expectation on |0(t)>",
        max_of(ENTROPY_GRID.map(|gt| {
            let psi = dissipative::vacuum_evolution_with_tolerance(1.0, gt, kp, tol)?;
            let sa = dissipative::entropy_operator(1.0, gt, kp, dissipative::Mode::A)?.expectation(&psi)?;
            let sb = dissipative::entropy_operator(1.0, gt, kp, dissipative::Mode::B)?.expectation(&psi)?;
            Ok((sa - sb).abs())
        })),
        1e-10,
    ));
    out.push(Check::at_most(
        "dissipative.entropy_monotone",
        "entropy grows with t",
        (|| {
            let mut values = Vec::new();
            for i in 1..=15 {
                let gt = 0.1 * i as f64;
                let psi = dissipative::vacuum_evolution_with_tolerance(1.0, gt, kp, tol)?;
                values.push(dissipative::entropy_operator(1.0, gt, kp, dissipative::Mode::A)?.expectation(&psi)?);
            }
            Ok(values.windows(2).filter(|w| !(w[1] > w[0])).count() as f64)
        })(),
        0.0,
    ));

    let thermo = dissipative::thermodynamics(1.0, 2.0, 0.5, kp);
    out.push(match &thermo {
        Ok(th) => Check::at_most(
            "dissipative.free_energy_derivative",
            "F = U - T S with T = Gamma: dF/dT at fixed Omega = -2 J2",
            Ok((th.d_free_energy_d_temperature - th.minus_two_j2).abs()),
            1e-4,
        )
        .with_detail(format!(
            "<2 J2> = {:.6e}, <S_A> = {:.12}, <H> - F = {:.3e}; derivative taken at fixed state",
            th.entropy,
            th.entropy_operator_expectation,
            th.hamiltonian - th.free_energy
        )),
        Err(e) => Check::at_most(
            "dissipative.free_energy_derivative",
            "F = U - T S with T = Gamma: dF/dT at fixed Omega = -2 J2",
            Err(e.clone()),
            1e-4,
        ),
    });
    out.push(Check::at_most(
        "dissipative.internal_energy",
        "U = 2 Omega <C> vanishes on pair states",
        thermo.as_ref().map(|th| th.internal_energy.abs()).map_err(Clone::clone),
        0.0,
    ));
    out.push(Check::at_most(
        "dissipative.temperature",
        "T = Gamma",
        thermo.as_ref().map(|th| (th.temperature - 1.0).abs()).map_err(Clone::clone),
        0.0,
    ));

    out.push(Check::at_most(
        "dissipative.doubled_identity",
        "doubled operator (c^2 - c^dagger^2) - (c~^2 - c~^dagger^2) = -2(C^dagger D^dagger - C D)",
        dissipative::doubled_fractal_identity_with_margin(cfg.identity_cutoff, cfg.margin),
        1e-10,
    ));
    out.push(Check::at_most(
        "dissipative.doubled_identity_swapped",
        "the doubled identity under c <-> c~",
        dissipative::doubled_fractal_identity_swapped(cfg.identity_cutoff),
        1e-10,
    ));
    out.push(Check::at_most(
        "dissipative.cross_pair_element",
        "<2,0| C^dagger D^dagger |0,0> = sqrt(2)/2",
        dissipative::cross_pair_element(cfg.identity_cutoff, 2, 0).map(|z| (z - c(std::f64::consts::SQRT_2 / 2.0)).norm()),
        1e-14,
    ));
    out.push(Check::at_most(
        "dissipative.squeezed_vacuum",
        "U(t) = exp(-(Gamma t/2)((a^2 - a^dagger^2) - (b^2 - b^dagger^2))) |0,0> equals |0(t)>",
        max_of([0.5, 1.0, 1.5].map(|gt| dissipative::two_mode_squeeze_check(1.0, gt, cfg.squeeze_cutoff))),
        1e-8,
    ));
    out.push(Check::at_most(
        "dissipative.squeezing_parameter",
        "squeezing parameter zeta = -Gamma t",
        dissipative::two_mode_squeeze_exponent(0.5, 1.2, 6).map(|x| (dissipative::read_squeezing_parameter(&x) + 0.6).abs()),
        1e-14,
    ));
    out
}

fn golden_checks(cfg: &RunConfig) -> Vec<Check> {
    let g = golden::GoldenConstants::new();
    let quad = golden::quadratic_and_recurrence_check();
    vec![
        Check::at_most(
            "golden.ratio_convergence",
            "Fibonacci ratios F_n / F_(n-1) tend to phi",
            golden::ratio_convergence(20).map(|r| (r - g.phi).abs()),
            1e-7,
        ),
        Check::at_most(
            "golden.quadratic",
            "phi and psi solve x^2 - x - 1 = 0",
            Ok(quad.phi_quadratic.max(quad.psi_quadratic)),
            1e-12,
        ),
        Check::at_most(
            "golden.recurrence",
            "phi^n = phi^(n-1) + phi^(n-2), scaled by phi^-n",
            Ok(quad.phi_recurrence_scaled.max(quad.psi_recurrence_scaled)),
            1e-12,
        ),
        Check::at_most(
            "golden.conjugate",
            "psi = 1 - phi = -1/phi",
            Ok((g.psi + 1.0 / g.phi).abs()),
            1e-14,
        ),
        Check::at_most(
            "golden.radial_ode",
            "r_phi = r0 e^{-phi t}, r_psi = r0 e^{-psi t} solve r'' + r' - r = 0",
            (|| {
                let h = cfg.step;
                let times = spiral::uniform_times(0.0, h, (2.0 / h).round() as usize + 1);
                let (a, b) = golden::ode_a4_check(1.0, &times)?;
                Ok(a.iter().chain(&b).fold(0.0f64, |m, v| m.max(*v)))
            })(),
            1e-6,
        ),
        Check::at_most(
            "golden.quarter_turn",
            "golden spiral grows by phi per quarter turn",
            max_of((0..20).map(|n| {
                Ok((golden::quarter_turn_progression(1.0, n + 1)? / golden::quarter_turn_progression(1.0, n)? - g.phi).abs())
            })),
            1e-14,
        ),
        Check::at_most(
            "golden.slope_round_trip",
            "golden slope d_g = ln phi / (pi/2) recovered by the log-log fit",
            (|| {
                let samples = (0..100)
                    .map(|i| {
                        let t = i as f64 * 0.1;
                        Ok((t, golden::golden_radius(1.0, t)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let fit = spiral::fit_loglog_slope(&samples)?;
                Ok((fit.slope - g.d_g).abs())
            })(),
            1e-6,
        ),
        Check::at_most(
            "golden.fibonacci_continuity",
            "Fibonacci spiral quarter circles meet end to start",
            golden::fibonacci_arcs(16, 1.0).map(|arcs| {
                arcs.windows(2)
                    .map(|w| w[0].end().distance(&w[1].start()) / w[1].radius)
                    .fold(0.0, f64::max)
            }),
            1e-12,
        ),
        Check::at_most(
            "golden.fibonacci_deviation_trend",
            "Fibonacci spiral approaches the golden spiral as arcs are added",
            (|| Ok(golden::golden_deviation(12)? / golden::golden_deviation(4)?))(),
            1.0,
        ),
        Check::at_least(
            "golden.fibonacci_deviation_persists",
            "the Fibonacci spiral does not perfectly overlap the golden spiral",
            golden::golden_deviation(12),
            1e-6,
        ),
    ]
}

fn ncplane_checks(cfg: &RunConfig) -> Vec<Check> {
    let k = cfg.cutoff;
    let mut out = vec![
        Check::at_most(
            "ncplane.scheme_equivalence",
            "delta_n^2 = L^2 (2n+1) and 2 q^2 (n + 1/2) agree for L = q",
            max_of([0.5, 0.7, 1.0, 1.3].map(|s| {
                let l = ncplane::quantized_radii(&ncplane::NCParams::length(s)?, 40);
                let q = ncplane::quantized_radii(&ncplane::NCParams::deformation(s)?, 40);
                Ok(l.iter().zip(&q).map(|(a, b)| (a - b).abs() / a).fold(0.0, f64::max))
            })),
            1e-12,
        ),
        Check::at_most(
            "ncplane.ladder_ccr",
            "z_q = (x + i q^2 p)/(q sqrt 2): [z_q, z_q^dagger] = 1",
            max_of([0.5, 0.7, 1.0, 1.3].map(|q| Ok(ncplane::deformed_ladder(q, k)?.ladder_ccr_deviation(cfg.margin)))),
            1e-10,
        ),
        Check::at_most(
            "ncplane.plane_ccr",
            "[x1, x2] = i q^2",
            max_of([0.5, 0.7, 1.0, 1.3].map(|q| Ok(ncplane::deformed_ladder(q, k)?.plane_ccr_deviation(cfg.margin)))),
            1e-10,
        ),
    ];
    for (q, label) in [(0.5, "0.5"), (1.0, "1.0"), (1.3, "1.3")] {
        let cmp = ncplane::spectrum_comparison(q, k, cfg.effective_spectrum_margin(), 1e-6);
        let check = Check::at_most(
            &format!("ncplane.spectrum.q{label}"),
            "noncommutative Pythagoras x1^2 + x2^2 has spectrum 2 q^2 (n + 1/2)",
            cmp.as_ref().map(|c| c.max_relative_error).map_err(Clone::clone),
            1e-6,
        );
        out.push(match cmp {
            Ok(c) => check.with_detail(format!(
                "compared lowest {} levels; {} leading levels within 1e-6",
                c.compared, c.accurate_levels
            )),
            Err(_) => check,
        });
    }
    let xi = ncplane::velocity_xi_commutators(&MechanicalParams::new(1.0, 2.0, 5.0).expect("valid"), cfg.operator_cutoff.max(8));
    out.push(Check::at_most(
        "ncplane.velocity_commutator",
        "[v+, v-] = -i gamma / m^2",
        xi.as_ref().map(|r| r.velocity_deviation).map_err(Clone::clone),
        1e-10,
    ));
    out.push(Check::at_most(
        "ncplane.xi_commutator",
        "[xi+, xi-] = i / gamma",
        max_of([(1.0, 2.0), (0.5, 0.3), (3.0, 1.5)].map(|(m, gamma): (f64, f64)| {
            let mech = MechanicalParams::new(m, gamma, gamma * gamma / m + 1.0)?;
            Ok(ncplane::velocity_xi_commutators(&mech, cfg.operator_cutoff.max(8))?.xi_deviation)
        })),
        1e-10,
    ));
    out.push(Check::at_most(
        "ncplane.uncertainty_minimum",
        "zero-point uncertainty Delta x1 Delta x2 >= q^2/2, saturated by the ground state",
        ncplane::uncertainty_check(0.6, k).map(|u| (u.product - u.bound).abs()),
        1e-8,
    ));
    out.push(Check::at_least(
        "ncplane.uncertainty_excited",
        "excited state exceeds the uncertainty bound",
        ncplane::uncertainty_at_level(0.6, k, 1).map(|u| u.product - u.bound),
        1e-3,
    ));
    out.push(Check::at_most(
        "ncplane.stage_energy",
        "E_n = q^2 (n + 1/2) = delta_n^2 / 2",
        ncplane::NCParams::deformation(0.8).map(|p| {
            ncplane::quantized_radii(&p, 10)
                .iter()
                .enumerate()
                .map(|(n, r)| (ncplane::fractal_energy(0.8, n) - r / 2.0).abs())
                .fold(0.0, f64::max)
        }),
        1e-15,
    ));
    out.push(Check::at_most(
        "ncplane.interference_phase",
        "interference phase A / L^2 equals the dissipative phase A gamma when L^2 = 1/gamma",
        (|| {
            let gamma = 0.5f64;
            let by_length = ncplane::interference_phase(2.0, &ncplane::NCParams::length(gamma.sqrt().recip())?)?;
            let by_gamma = ncplane::interference_phase(2.0, &ncplane::NCParams::dissipative(gamma)?)?;
            Ok((by_length - by_gamma).abs().max((by_gamma - 1.0).abs()))
        })(),
        1e-12,
    ));
    out
}
