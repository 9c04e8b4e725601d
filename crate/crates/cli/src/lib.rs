//! Command-line driver: argument parsing, run dispatch and diagnostics.

pub mod config;
pub mod output;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use trimer::analysis;
use trimer::dynamics::{named_state, observable_by_label, Observable};
use trimer::operators::{casimir, casimir_value, verify_identities, ModelParams};
use trimer::semiclassical::{self, ReducedState, SolutionCurve};
use trimer::series::uniform_times;
use trimer::{FockBasis, Propagator, TimeSeries, DEFAULT_MAX_ATOMS};

use config::{Format, Mode, PartialConfig, RunConfig};

/// Largest norm deviation tolerated along a quantum run.
pub const NORM_TOL: f64 = 1e-10;
/// Largest relative energy drift tolerated along a quantum run.
pub const ENERGY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "trimer", version, about = "Quantum and mean-field dynamics of a three-well condensate")]
pub struct Cli {
    /// Worker threads for sweeps (defaults to the available cores).
    #[arg(long, global = true, env = "TRIMER_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact propagation in the fixed-N Fock basis.
    SimulateQuantum(RunArgs),
    /// Mean-field trajectory from the localized start.
    SimulateSemiclassical(RunArgs),
    /// Stationary points of the mean-field flow at one ratio.
    FixedPoints(RunArgs),
    /// Fixed points and localization over a grid of ratios.
    Sweep(RunArgs),
    /// Operator identities and conservation checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON file with any subset of the run fields; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_atoms: Option<usize>,
    /// Ratio of tunnelling to collective interaction.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// `start:step:stop` or a comma list (fractions like `1/3` allowed).
    #[arg(long, allow_hyphen_values = true)]
    pub r_grid: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_sign: Option<i8>,
    /// e1, e2, e3, g1, g2 or g3.
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dt_out: Option<f64>,
    /// Comma-separated labels for quantum runs.
    #[arg(long, value_delimiter = ',')]
    pub observables: Option<Vec<String>>,
    /// Destination file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Raise the atom-number cap (dense diagonalization grows as N^6).
    #[arg(long)]
    pub max_atoms: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Largest sector checked, in addition to N = 1, 2, 5.
    #[arg(long, default_value_t = 50)]
    pub n_atoms: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_ATOMS)]
    pub max_atoms: usize,
}

#[derive(Debug)]
pub enum CliError {
    Config(config::ConfigError),
    Compute(trimer::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => e.fmt(f),
            CliError::Compute(e) => write!(f, "computation failed: {e}"),
            CliError::Io(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for CliError {}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<trimer::Error> for CliError {
    fn from(e: trimer::Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// What a run produced: the rendered document and any failed diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub contents: String,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

impl RunArgs {
    fn flags(&self) -> Result<PartialConfig, config::ConfigError> {
        Ok(PartialConfig {
            mode: None,
            n_atoms: self.n_atoms,
            r: self.r,
            r_grid: self.r_grid.as_deref().map(config::parse_r_grid).transpose()?,
            omega_sign: self.omega_sign,
            initial: self.initial.clone(),
            t_max: self.t_max,
            dt_out: self.dt_out,
            observables: self.observables.clone(),
            output_path: self.output.clone(),
            format: self.format,
            max_atoms: self.max_atoms,
        })
    }

    pub fn resolve(&self, mode: Mode) -> Result<RunConfig, config::ConfigError> {
        let file = self.config.as_deref().map(config::read_config_file).transpose()?;
        config::resolve(mode, file, self.flags()?)
    }
}

fn cap_warning(max_atoms: usize) -> Option<String> {
    (max_atoms > DEFAULT_MAX_ATOMS).then(|| {
        format!(
            "max_atoms raised to {max_atoms}; dense diagonalization above N = {DEFAULT_MAX_ATOMS} \
             may exhaust memory"
        )
    })
}

pub fn run_quantum(cfg: &RunConfig) -> Result<Report, CliError> {
    let basis = FockBasis::with_max(cfg.n_atoms, cfg.max_atoms)?;
    let params = ModelParams::from_ratio(cfg.n_atoms, cfg.r, f64::from(cfg.omega_sign))?;
    let initial = named_state(&basis, &cfg.initial)?;
    let times = uniform_times(cfg.t_max, cfg.dt_out)?;

    // energy and norm are always tracked for the diagnostics
    let mut labels: Vec<&str> = cfg.observables.iter().map(String::as_str).collect();
    for extra in ["energy", "norm"] {
        if !labels.contains(&extra) {
            labels.push(extra);
        }
    }
    let observables: Vec<Observable> = labels
        .iter()
        .map(|l| observable_by_label(&basis, &params, l))
        .collect::<Result<_, _>>()?;
    let full = Propagator::for_params(&basis, &params)?.propagate(&initial, &times, &observables)?;

    let mut failures = Vec::new();
    let norm = full.column("norm").expect("tracked");
    let norm_dev = norm.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    if norm_dev > NORM_TOL {
        failures.push(format!("norm deviates by {norm_dev:e} (tolerance {NORM_TOL:e})"));
    }
    let energy = full.column("energy").expect("tracked");
    let scale = energy[0].abs().max(1.0);
    let energy_drift = energy.iter().map(|e| (e - energy[0]).abs() / scale).fold(0.0, f64::max);
    if energy_drift > ENERGY_TOL {
        failures.push(format!("energy drifts by {energy_drift:e} relative (tolerance {ENERGY_TOL:e})"));
    }

    let columns: Vec<Vec<f64>> = cfg
        .observables
        .iter()
        .map(|l| full.column(l).expect("requested").to_vec())
        .collect();
    let series = TimeSeries::new(times, cfg.observables.clone(), columns)?;
    Ok(Report {
        contents: output::render_series(&series, cfg),
        failures,
        warnings: cap_warning(cfg.max_atoms).into_iter().collect(),
    })
}

pub fn run_semiclassical(cfg: &RunConfig) -> Result<Report, CliError> {
    let times = uniform_times(cfg.t_max, cfg.dt_out)?;
    let start = ReducedState::localized();
    let series = if cfg.r == 0.0 {
        // no tunnelling: tau = |chi| N t and only the interaction term acts
        let states = semiclassical::integrate_unscaled(&start, 0.0, f64::from(cfg.omega_sign), &times)?;
        let rows: Vec<Vec<f64>> = states.iter().map(|s| s.to_array().to_vec()).collect();
        TimeSeries::from_rows(times, ["x2", "y2", "z1", "z2"].map(String::from).to_vec(), &rows)?
    } else {
        semiclassical::integrate_with(&start, cfg.r, &times, f64::from(cfg.omega_sign), &Default::default())?
            .to_series()
    };
    Ok(Report {
        contents: output::render_series(&series, cfg),
        failures: Vec::new(),
        warnings: Vec::new(),
    })
}

pub fn run_fixed_points(cfg: &RunConfig) -> Result<Report, CliError> {
    let points = analysis::fixed_points(cfg.r)?;
    let contents = match cfg.format {
        Format::Csv => output::fixed_points_csv(&points),
        Format::Json => output::fixed_points_json(&points, cfg),
    };
    Ok(Report {
        contents,
        failures: Vec::new(),
        warnings: Vec::new(),
    })
}

pub fn run_sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    let result = analysis::sweep_r(&cfg.r_grid, cfg.t_max)?;
    let mut failures = Vec::new();
    for e in &result.entries {
        for err in [e.fixed_points.as_ref().err(), e.max_x2.as_ref().err()].into_iter().flatten() {
            failures.push(format!("r = {}: {err}", e.r));
        }
    }
    let contents = match cfg.format {
        Format::Csv => output::sweep_csv(&result),
        Format::Json => output::sweep_json(&result, cfg),
    };
    Ok(Report {
        contents,
        failures,
        warnings: Vec::new(),
    })
}

pub fn run_config(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.mode {
        Mode::Quantum => run_quantum(cfg),
        Mode::Semiclassical => run_semiclassical(cfg),
        Mode::FixedPoints => run_fixed_points(cfg),
        Mode::Sweep => run_sweep(cfg),
    }
}

/// Plain-text report of the operator identities, the Casimir value and the
/// mean-field conservation audit.
pub fn run_verify(args: &VerifyArgs) -> Result<Report, CliError> {
    const ALGEBRA_TOL: f64 = 1e-10;
    let mut text = String::new();
    let mut failures = Vec::new();
    let mut sectors = vec![1, 2, 5];
    if !sectors.contains(&args.n_atoms) {
        sectors.push(args.n_atoms);
    }
    for n in sectors {
        let basis = FockBasis::with_max(n, args.max_atoms)?;
        let identities = verify_identities(&basis).max_relative();
        let value = casimir_value(n);
        let cas = if n == 0 {
            casimir(&basis).matrix().max_abs()
        } else {
            casimir(&basis).matrix().shift(-value).max_abs() / value
        };
        let ok = identities <= ALGEBRA_TOL && cas <= ALGEBRA_TOL;
        let _ = writeln!(
            text,
            "N = {n:>3}: identity residual {identities:.2e}, Casimir {value:.6} residual {cas:.2e} {}",
            if ok { "ok" } else { "FAIL" }
        );
        if !ok {
            failures.push(format!("operator algebra at N = {n}"));
        }
    }
    let times = uniform_times(100.0, 0.01)?;
    for r in [0.283, 0.4, 0.506] {
        match semiclassical::integrate(&ReducedState::localized(), r, &times) {
            Ok(traj) => {
                let curve = SolutionCurve::new(r)?;
                let orbit = traj
                    .states
                    .iter()
                    .map(|s| (s.y2 * s.y2 - curve.f(s.x2)).abs())
                    .fold(0.0, f64::max);
                let ok = orbit <= 1e-7;
                let _ = writeln!(
                    text,
                    "r = {r}: energy drift {:.2e}, number drift {:.2e}, |y2^2 - f(x2)| {orbit:.2e} {}",
                    traj.max_energy_drift,
                    traj.max_number_drift,
                    if ok { "ok" } else { "FAIL" }
                );
                if !ok {
                    failures.push(format!("orbit equation at r = {r}"));
                }
            }
            Err(e) => {
                let _ = writeln!(text, "r = {r}: FAIL {e}");
                failures.push(format!("conservation at r = {r}"));
            }
        }
    }
    Ok(Report {
        contents: text,
        failures,
        warnings: cap_warning(args.max_atoms).into_iter().collect(),
    })
}

/// Runs the parsed command and returns the process exit code.
///
/// Sweeps fan out over `workers` threads; every other subcommand runs on one.
pub fn execute(cli: Cli) -> i32 {
    let (mode, args) = match &cli.command {
        Command::Verify(args) => return finish(run_verify(args), None),
        Command::SimulateQuantum(a) => (Mode::Quantum, a),
        Command::SimulateSemiclassical(a) => (Mode::Semiclassical, a),
        Command::FixedPoints(a) => (Mode::FixedPoints, a),
        Command::Sweep(a) => (Mode::Sweep, a),
    };
    let cfg = match args.resolve(mode) {
        Ok(cfg) => cfg,
        Err(e) => return finish(Err(e.into()), None),
    };
    let threads = if mode == Mode::Sweep { cli.workers.unwrap_or(0) } else { 1 };
    let result = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))
        .and_then(|pool| pool.install(|| run_config(&cfg)));
    finish(result, cfg.output_path.as_deref())
}

fn finish(result: Result<Report, CliError>, path: Option<&std::path::Path>) -> i32 {
    match result {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if let Err(e) = output::emit(&report.contents, path) {
                eprintln!("error: {e}");
                return 1;
            }
            for f in &report.failures {
                eprintln!("diagnostic failed: {f}");
            }
            i32::from(!report.failures.is_empty())
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
