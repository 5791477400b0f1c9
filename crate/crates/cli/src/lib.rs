//! `fractalab` command line: geometry generation, verification reports and
//! log-log slope fits.
//!
//! Exit codes: 0 success, 1 failed checks (the report is still written),
//! 2 usage, parameter, config or CSV errors, 3 I/O errors.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fractalab::config::RunConfig;
use fractalab::geometry::Polyline;
use fractalab::spiral::{self, Handedness, SpiralParams};
use fractalab::verify::{self, Suite, VerificationReport};
use fractalab::{golden, selfsim};

pub mod render;
pub mod slope;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fractalab", version, about = "Fractal self-similarity and coherent-state numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a curve as CSV or SVG.
    Generate {
        #[command(subcommand)]
        kind: Kind,
    },
    /// Run verification checks and emit a JSON report.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// key=value configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report path; overrides `report` in the config. Stdout by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit ln r = d theta + c to a CSV with header theta,r (or x,y).
    FitSlope {
        input: PathBuf,
        /// Fits with r^2 below this are flagged as not self-similar.
        #[arg(long, default_value_t = slope::DEFAULT_MIN_R_SQUARED)]
        min_r_squared: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum Kind {
    /// Koch curve on the unit segment.
    Koch {
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[command(flatten)]
        output: Output,
    },
    /// r = r0 e^{d theta} (direct) or r0 e^{-d theta} (indirect).
    Logspiral {
        #[arg(long)]
        d: f64,
        #[command(flatten)]
        spiral: SpiralArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Logarithmic spiral growing by phi per quarter turn.
    Goldenspiral {
        #[command(flatten)]
        spiral: SpiralArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Quarter circles inscribed in Fibonacci squares.
    Fibspiral {
        #[arg(long, default_value_t = 8)]
        arcs: u32,
        #[arg(long, default_value_t = 1.0)]
        unit: f64,
        #[arg(long, default_value_t = 32)]
        samples_per_arc: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct SpiralArgs {
    #[arg(long, default_value_t = 1.0)]
    r0: f64,
    #[arg(long, default_value_t = 4.0 * PI)]
    theta_max: f64,
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = HandednessArg::Direct)]
    handedness: HandednessArg,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HandednessArg {
    Direct,
    Indirect,
}

impl From<HandednessArg> for Handedness {
    fn from(h: HandednessArg) -> Self {
        match h {
            HandednessArg::Direct => Handedness::Direct,
            HandednessArg::Indirect => Handedness::Indirect,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Fock,
    Selfsim,
    Spiral,
    Dissipative,
    Golden,
    Ncplane,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Fock => Suite::Fock,
            SuiteArg::Selfsim => Suite::Selfsim,
            SuiteArg::Spiral => Suite::Spiral,
            SuiteArg::Dissipative => Suite::Dissipative,
            SuiteArg::Golden => Suite::Golden,
            SuiteArg::Ncplane => Suite::Ncplane,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}"))),
    }
}

pub fn curve(kind: &Kind) -> fractalab::Result<Polyline> {
    match kind {
        Kind::Koch { depth, .. } => selfsim::koch_iterate(*depth),
        Kind::Logspiral { d, spiral, .. } => spiral_curve(*d, spiral),
        Kind::Goldenspiral { spiral, .. } => spiral_curve(golden::GoldenConstants::new().d_g, spiral),
        Kind::Fibspiral {
            arcs,
            unit,
            samples_per_arc,
            ..
        } => golden::fibonacci_spiral(*arcs, *unit, *samples_per_arc),
    }
}

fn spiral_curve(d: f64, args: &SpiralArgs) -> fractalab::Result<Polyline> {
    let params = SpiralParams::new(args.r0, d, args.handedness.into())?;
    let points = spiral::sample_spiral(&params, args.theta_max, args.samples)?;
    Polyline::new(points.into_iter().map(|(_, p)| p).collect())
}

fn output_of(kind: &Kind) -> &Output {
    match kind {
        Kind::Koch { output, .. }
        | Kind::Logspiral { output, .. }
        | Kind::Goldenspiral { output, .. }
        | Kind::Fibspiral { output, .. } => output,
    }
}

fn generate(kind: &Kind, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let line = curve(kind).map_err(usage)?;
    let output = output_of(kind);
    let text = match output.format {
        Format::Csv => render::to_csv(&line),
        Format::Svg => render::to_svg(&line),
    };
    emit(&text, output.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set.
fn timestamp() -> Option<u64> {
    if let Ok(v) = std::env::var("SOURCE_DATE_EPOCH") {
        return v.trim().parse().ok();
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs())
}

pub fn report_json(report: &VerificationReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

fn run_verify(
    suite: SuiteArg,
    config: Option<&Path>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let cfg = match config {
        Some(path) => RunConfig::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => RunConfig::default(),
    };
    let mut report = verify::run_suite(suite.into(), &cfg);
    report.generated_at = timestamp();
    let destination = out.map(Path::to_path_buf).or_else(|| cfg.report.clone());
    emit(&report_json(&report), destination.as_deref(), stdout)?;

    let _ = writeln!(
        stderr,
        "verify {}: {}/{} checks passed",
        report.suite, report.summary.passed, report.summary.total
    );
    for check in report.failures() {
        let measured = check.measured.map_or("none".to_string(), |m| format!("{m:.3e}"));
        let _ = writeln!(
            stderr,
            "  FAIL {} measured {measured} tolerance {:e}{}",
            check.id,
            check.tolerance,
            check.detail.as_ref().map_or(String::new(), |d| format!(" ({d})"))
        );
    }
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn fit_slope(input: &Path, min_r_squared: f64, stdout: &mut dyn Write) -> Result<i32, Failure> {
    if !(0.0..=1.0).contains(&min_r_squared) {
        return Err(Failure::Usage(format!("--min-r-squared must lie in [0, 1], got {min_r_squared}")));
    }
    let text = read(input)?;
    let rep = slope::fit_text(&text, min_r_squared).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let mut json = serde_json::to_string_pretty(&rep).expect("fit serializes");
    json.push('\n');
    emit(&json, None, stdout)?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Generate { kind } => generate(kind, stdout),
        Command::Verify { suite, config, out } => run_verify(*suite, config.as_deref(), out.as_deref(), stdout, stderr),
        Command::FitSlope { input, min_r_squared } => fit_slope(input, *min_r_squared, stdout),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message());
            failure.code()
        }
    }
}
