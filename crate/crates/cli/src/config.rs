//! Run configuration: per-mode defaults, an optional JSON file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use trimer::dynamics::OBSERVABLE_LABELS;
use trimer::DEFAULT_MAX_ATOMS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Quantum,
    Semiclassical,
    FixedPoints,
    Sweep,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Quantum => "quantum",
            Mode::Semiclassical => "semiclassical",
            Mode::FixedPoints => "fixed-points",
            Mode::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub const INITIAL_STATES: [&str; 6] = ["e1", "e2", "e3", "g1", "g2", "g3"];

pub const DEFAULT_QUANTUM_OBSERVABLES: [&str; 5] = ["x1_over_n", "x2_over_n", "ys_over_n", "energy", "norm"];

/// A fully resolved, validated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub n_atoms: usize,
    pub r: f64,
    /// Ratios for `sweep`; ignored by the other modes.
    pub r_grid: Vec<f64>,
    pub omega_sign: i8,
    pub initial: String,
    /// Final `tau`; the localization horizon in sweeps.
    pub t_max: f64,
    pub dt_out: f64,
    pub observables: Vec<String>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub max_atoms: usize,
}

/// Every field optional; used for the config file and for flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub mode: Option<Mode>,
    pub n_atoms: Option<usize>,
    pub r: Option<f64>,
    pub r_grid: Option<Vec<f64>>,
    pub omega_sign: Option<i8>,
    pub initial: Option<String>,
    pub t_max: Option<f64>,
    pub dt_out: Option<f64>,
    pub observables: Option<Vec<String>>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub max_atoms: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Values that reproduce the reference runs at N = 50.
pub fn defaults(mode: Mode) -> RunConfig {
    let (r, t_max, observables) = match mode {
        Mode::Quantum => (0.506, 50.0, DEFAULT_QUANTUM_OBSERVABLES.map(String::from).to_vec()),
        Mode::Semiclassical => (0.506, 50.0, Vec::new()),
        Mode::FixedPoints => (0.45, 100.0, Vec::new()),
        Mode::Sweep => (0.506, 100.0, Vec::new()),
    };
    RunConfig {
        mode,
        n_atoms: 50,
        r,
        r_grid: vec![0.2, 0.283, 1.0 / 3.0, 0.506, 0.52],
        omega_sign: -1,
        initial: "e1".into(),
        t_max,
        dt_out: 0.05,
        observables,
        output_path: None,
        format: Format::Csv,
        max_atoms: DEFAULT_MAX_ATOMS,
    }
}

pub fn read_config_file(path: &Path) -> Result<PartialConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))
}

/// Layers `file` then `flags` over the mode defaults and validates the result.
pub fn resolve(mode: Mode, file: Option<PartialConfig>, flags: PartialConfig) -> Result<RunConfig, ConfigError> {
    let mut cfg = defaults(mode);
    for layer in file.into_iter().chain([flags]) {
        if let Some(m) = layer.mode {
            if m != mode {
                return Err(ConfigError::new(
                    "mode",
                    format!("config is for `{}` but the subcommand runs `{}`", m.as_str(), mode.as_str()),
                ));
            }
        }
        macro_rules! take {
            ($($f:ident),*) => {$(if let Some(v) = layer.$f { cfg.$f = v; })*};
        }
        take!(n_atoms, r, r_grid, omega_sign, initial, t_max, dt_out, observables, format, max_atoms);
        if layer.output_path.is_some() {
            cfg.output_path = layer.output_path;
        }
    }
    validate(&cfg)?;
    Ok(cfg)
}

pub fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    let positive = |field, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(ConfigError::new(field, format!("must be a finite number > 0, got {v}")))
        }
    };
    positive("t_max", cfg.t_max)?;
    positive("dt_out", cfg.dt_out)?;
    if cfg.dt_out > cfg.t_max {
        return Err(ConfigError::new(
            "dt_out",
            format!("output spacing {} exceeds t_max {}", cfg.dt_out, cfg.t_max),
        ));
    }
    if !(cfg.r.is_finite() && cfg.r >= 0.0) {
        return Err(ConfigError::new("r", format!("coupling ratio must be finite and >= 0, got {}", cfg.r)));
    }
    if cfg.mode == Mode::FixedPoints && cfg.r == 0.0 {
        return Err(ConfigError::new("r", "fixed points need r > 0"));
    }
    if let Some(bad) = cfg.r_grid.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(ConfigError::new("r_grid", format!("every ratio must be finite and > 0, got {bad}")));
    }
    if cfg.omega_sign != 1 && cfg.omega_sign != -1 {
        return Err(ConfigError::new("omega_sign", format!("must be 1 or -1, got {}", cfg.omega_sign)));
    }
    if !INITIAL_STATES.contains(&cfg.initial.as_str()) {
        return Err(ConfigError::new(
            "initial",
            format!("unknown state `{}`; expected one of {}", cfg.initial, INITIAL_STATES.join(", ")),
        ));
    }
    if cfg.mode == Mode::Semiclassical && cfg.initial != "e1" {
        return Err(ConfigError::new(
            "initial",
            "the reduced mean-field model only describes the localized start e1",
        ));
    }
    if cfg.mode == Mode::Quantum {
        if cfg.n_atoms == 0 {
            return Err(ConfigError::new("n_atoms", "quantum runs need at least one atom"));
        }
        if cfg.n_atoms > cfg.max_atoms {
            return Err(ConfigError::new(
                "n_atoms",
                format!("{} exceeds max_atoms {}; raise --max-atoms to override", cfg.n_atoms, cfg.max_atoms),
            ));
        }
        if cfg.observables.is_empty() {
            return Err(ConfigError::new("observables", "at least one observable is required"));
        }
        for (i, label) in cfg.observables.iter().enumerate() {
            if !OBSERVABLE_LABELS.contains(&label.as_str()) {
                return Err(ConfigError::new(
                    "observables",
                    format!("unknown label `{label}`; expected any of {}", OBSERVABLE_LABELS.join(", ")),
                ));
            }
            if cfg.observables[..i].contains(label) {
                return Err(ConfigError::new("observables", format!("`{label}` is listed twice")));
            }
        }
    }
    Ok(())
}

fn parse_ratio_token(token: &str) -> Result<f64, String> {
    let token = token.trim();
    let value = match token.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| format!("bad numerator in `{token}`"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("bad denominator in `{token}`"))?;
            num / den
        }
        None => token.parse().map_err(|_| format!("`{token}` is not a number"))?,
    };
    Ok(value)
}

/// `start:step:stop` (inclusive) or a comma list whose entries may be
/// fractions such as `1/3`. An empty string is an empty grid.
pub fn parse_r_grid(text: &str) -> Result<Vec<f64>, ConfigError> {
    let err = |m: String| ConfigError::new("r_grid", m);
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let start = parse_ratio_token(start).map_err(err)?;
            let step = parse_ratio_token(step).map_err(err)?;
            let stop = parse_ratio_token(stop).map_err(err)?;
            if !(step > 0.0 && stop >= start) {
                return Err(err(format!("range needs step > 0 and stop >= start in `{text}`")));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| start + step * i as f64).collect())
        }
        [_] => text.split(',').map(|t| parse_ratio_token(t).map_err(err)).collect(),
        _ => Err(err(format!("expected `start:step:stop` or a comma list, got `{text}`"))),
    }
}
