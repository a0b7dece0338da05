//! `key = value` experiment files and command-line overrides.
//!
//! One assignment per line, `#` starts a comment, lists are comma
//! separated. Reals may be written as fractions such as `1/3`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fran_core::{Strategy, SystemConfig};

use crate::error::{keyed, CliError, Result};
use crate::format::real;

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    CacheFraction,
    Connectivity,
    Subfiles,
    SnrDb,
    Capacity,
}

impl Axis {
    pub const ALL: [Axis; 5] = [
        Axis::CacheFraction,
        Axis::Connectivity,
        Axis::Subfiles,
        Axis::SnrDb,
        Axis::Capacity,
    ];

    /// Key of the parameter in config files and CSV headers.
    pub fn key(self) -> &'static str {
        match self {
            Axis::CacheFraction => "mu",
            Axis::Connectivity => "M",
            Axis::Subfiles => "L",
            Axis::SnrDb => "P_dB",
            Axis::Capacity => "C",
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, Axis::Connectivity | Axis::Subfiles)
    }

    /// `cfg` with this parameter set to `value`.
    pub fn apply(self, cfg: &SystemConfig, value: f64) -> Result<SystemConfig> {
        let mut out = cfg.clone();
        match self {
            Axis::CacheFraction => out.cache_fraction = value,
            Axis::Connectivity => out.connectivity = integer_value(self.key(), value)?,
            Axis::Subfiles => out.subfiles = integer_value(self.key(), value)?,
            Axis::SnrDb => out.snr_db = value,
            Axis::Capacity => out.fronthaul_capacity = value,
        }
        out.validate().map_err(keyed)?;
        Ok(out)
    }

    pub fn format_value(self, value: f64) -> String {
        if self.is_integer() {
            format!("{}", value as usize)
        } else {
            real(value)
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL.into_iter().find(|a| a.key() == s).ok_or_else(|| {
            CliError::value("axis", format!("{s:?} is not one of mu, M, L, P_dB, C"))
        })
    }
}

fn integer_value(key: &str, value: f64) -> Result<usize> {
    if value.fract() != 0.0 || value < 1.0 || value > u32::MAX as f64 {
        return Err(CliError::value(
            key,
            format!("{value} is not a positive integer"),
        ));
    }
    Ok(value as usize)
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SystemConfig,
    pub axis: Axis,
    pub values: Vec<f64>,
    /// Fronthaul capacities swept as separate curves; empty means the base
    /// capacity only.
    pub capacity_curves: Vec<f64>,
    pub strategies: Vec<Strategy>,
    pub n_trials: usize,
    pub master_seed: u64,
    pub output_path: PathBuf,
    /// Free-text assumptions copied into the run manifest.
    pub notes: Vec<String>,
    /// Keys that were not set by the file or by overrides.
    pub defaulted: Vec<String>,
}

/// One experiment of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub config: SystemConfig,
    pub axis_value: f64,
}

const SOLVER_KEYS: [&str; 7] = [
    "solver.max_outer_iters",
    "solver.outer_tol",
    "solver.inner_max_iters",
    "solver.inner_tol",
    "solver.softmin_schedule",
    "solver.step_backtrack",
    "solver.seed_scale",
];

const SYSTEM_KEYS: [&str; 13] = [
    "N", "F", "L", "S", "mu", "M", "C", "P_dB", "gamma", "alpha", "nT", "nR", "nS",
];

const SWEEP_KEYS: [&str; 6] = ["axis", "values", "curves_C", "strategies", "trials", "seed"];

impl Default for SweepSpec {
    fn default() -> Self {
        let base = SystemConfig::default();
        SweepSpec {
            axis: Axis::CacheFraction,
            values: vec![base.cache_fraction],
            base,
            capacity_curves: Vec::new(),
            strategies: Strategy::ALL.to_vec(),
            n_trials: 200,
            master_seed: 1,
            output_path: PathBuf::from("results.csv"),
            notes: Vec::new(),
            defaulted: Vec::new(),
        }
    }
}

impl SweepSpec {
    /// Experiments in output order: capacity curve, then axis value.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        let curves: Vec<Option<f64>> = if self.capacity_curves.is_empty() {
            vec![None]
        } else {
            self.capacity_curves.iter().copied().map(Some).collect()
        };
        let mut points = Vec::new();
        for c in curves {
            let base = match c {
                Some(c) => Axis::Capacity.apply(&self.base, c)?,
                None => self.base.clone(),
            };
            for &v in &self.values {
                points.push(SweepPoint {
                    config: self.axis.apply(&base, v)?,
                    axis_value: v,
                });
            }
        }
        Ok(points)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate().map_err(keyed)?;
        if self.values.is_empty() {
            return Err(CliError::value(
                "values",
                "at least one axis value is required",
            ));
        }
        if self.strategies.is_empty() {
            return Err(CliError::value(
                "strategies",
                "at least one strategy is required",
            ));
        }
        if self.n_trials == 0 {
            return Err(CliError::value("trials", "must be positive"));
        }
        if self.axis == Axis::Capacity && !self.capacity_curves.is_empty() {
            return Err(CliError::value(
                "curves_C",
                "cannot be combined with axis = C",
            ));
        }
        self.points().map(|_| ())
    }

    /// Every setting as `(key, value)` in a stable order.
    pub fn entries(&self) -> Vec<(String, String)> {
        let b = &self.base;
        let s = &b.solver;
        let list = |v: &[f64]| v.iter().map(|&x| real(x)).collect::<Vec<_>>().join(", ");
        let mut out: Vec<(&str, String)> = vec![
            ("N", b.pairs.to_string()),
            ("F", b.library_size.to_string()),
            ("L", b.subfiles.to_string()),
            ("S", real(b.file_bits)),
            ("mu", real(b.cache_fraction)),
            ("M", b.connectivity.to_string()),
            ("C", real(b.fronthaul_capacity)),
            ("P_dB", real(b.snr_db)),
            ("gamma", real(b.zipf_exponent)),
            ("alpha", real(b.path_loss)),
            ("nT", b.tx_antennas.to_string()),
            ("nR", b.rx_antennas.to_string()),
            (
                "nS",
                b.streams.map_or("auto".to_string(), |n| n.to_string()),
            ),
            ("axis", self.axis.key().to_string()),
            (
                "values",
                self.values
                    .iter()
                    .map(|&v| self.axis.format_value(v))
                    .collect::<Vec<_>>()
                    .join(", "),
            ),
            ("curves_C", list(&self.capacity_curves)),
            (
                "strategies",
                self.strategies
                    .iter()
                    .map(|s| s.name())
                    .collect::<Vec<_>>()
                    .join(", "),
            ),
            ("trials", self.n_trials.to_string()),
            ("seed", self.master_seed.to_string()),
            ("out", self.output_path.display().to_string()),
            ("solver.max_outer_iters", s.max_outer_iters.to_string()),
            ("solver.outer_tol", real(s.outer_tol)),
            ("solver.inner_max_iters", s.inner_max_iters.to_string()),
            ("solver.inner_tol", real(s.inner_tol)),
            ("solver.softmin_schedule", list(&s.softmin_schedule)),
            ("solver.step_backtrack", real(s.step_backtrack)),
            ("solver.seed_scale", real(s.seed_scale)),
        ];
        out.extend(self.notes.iter().map(|n| ("note", n.clone())));
        out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Human-readable settings header; defaults are marked.
    pub fn banner(&self) -> String {
        let mut s = String::from("# simulate: resolved settings\n");
        for (k, v) in self.entries() {
            let mark = if self.defaulted.contains(&k) {
                "  (default)"
            } else {
                ""
            };
            s.push_str(&format!("#   {k} = {v}{mark}\n"));
        }
        s
    }
}

/// Reads a config file and applies `overrides` on top.
pub fn parse_config(path: &Path, overrides: &[(String, String)]) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text, &path.display().to_string(), overrides)
}

/// Parses config text; `origin` names the source in error messages.
pub fn parse_config_text(
    text: &str,
    origin: &str,
    overrides: &[(String, String)],
) -> Result<SweepSpec> {
    let mut spec = SweepSpec::default();
    let mut seen = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| CliError::Syntax {
            origin: origin.to_string(),
            line: idx + 1,
            reason: format!("expected `key = value`, found {line:?}"),
        })?;
        let key = key.trim();
        if !is_known(key) {
            return Err(CliError::UnknownKey {
                key: key.to_string(),
                origin: origin.to_string(),
                line: idx + 1,
            });
        }
        if key != "note" && !seen.insert(key.to_string()) {
            return Err(CliError::Syntax {
                origin: origin.to_string(),
                line: idx + 1,
                reason: format!("\"{key}\" is set twice"),
            });
        }
        assign(&mut spec, key, value.trim())?;
    }
    for (key, value) in overrides {
        if !is_known(key) {
            return Err(CliError::UnknownKey {
                key: key.clone(),
                origin: "command line".to_string(),
                line: 0,
            });
        }
        seen.insert(key.clone());
        assign(&mut spec, key, value.trim())?;
    }
    spec.defaulted = SYSTEM_KEYS
        .iter()
        .chain(&SWEEP_KEYS)
        .chain(&["out"])
        .chain(&SOLVER_KEYS)
        .filter(|k| !seen.contains(**k))
        .map(|k| k.to_string())
        .collect();
    spec.validate()?;
    Ok(spec)
}

fn is_known(key: &str) -> bool {
    SYSTEM_KEYS.contains(&key)
        || SWEEP_KEYS.contains(&key)
        || SOLVER_KEYS.contains(&key)
        || key == "out"
        || key == "note"
}

fn assign(spec: &mut SweepSpec, key: &str, value: &str) -> Result<()> {
    let b = &mut spec.base;
    match key {
        "N" => b.pairs = parse_count(key, value)?,
        "F" => b.library_size = parse_count(key, value)?,
        "L" => b.subfiles = parse_count(key, value)?,
        "S" => b.file_bits = parse_real(key, value)?,
        "mu" => b.cache_fraction = parse_real(key, value)?,
        "M" => b.connectivity = parse_count(key, value)?,
        "C" => b.fronthaul_capacity = parse_real(key, value)?,
        "P_dB" => b.snr_db = parse_real(key, value)?,
        "gamma" => b.zipf_exponent = parse_real(key, value)?,
        "alpha" => b.path_loss = parse_real(key, value)?,
        "nT" => b.tx_antennas = parse_count(key, value)?,
        "nR" => b.rx_antennas = parse_count(key, value)?,
        "nS" => {
            b.streams = match value {
                "auto" => None,
                v => Some(parse_count(key, v)?),
            }
        }
        "solver.max_outer_iters" => b.solver.max_outer_iters = parse_count(key, value)?,
        "solver.outer_tol" => b.solver.outer_tol = parse_real(key, value)?,
        "solver.inner_max_iters" => b.solver.inner_max_iters = parse_count(key, value)?,
        "solver.inner_tol" => b.solver.inner_tol = parse_real(key, value)?,
        "solver.softmin_schedule" => b.solver.softmin_schedule = parse_list(key, value)?,
        "solver.step_backtrack" => b.solver.step_backtrack = parse_real(key, value)?,
        "solver.seed_scale" => b.solver.seed_scale = parse_real(key, value)?,
        "axis" => spec.axis = value.parse()?,
        "values" => spec.values = parse_list(key, value)?,
        "curves_C" => {
            spec.capacity_curves = if value.is_empty() {
                Vec::new()
            } else {
                parse_list(key, value)?
            }
        }
        "strategies" => {
            spec.strategies = value
                .split(',')
                .map(|s| {
                    s.parse::<Strategy>()
                        .map_err(|e| CliError::value(key, e.to_string()))
                })
                .collect::<Result<_>>()?;
            spec.strategies.sort();
            spec.strategies.dedup();
        }
        "trials" => spec.n_trials = parse_count(key, value)?,
        "seed" => {
            spec.master_seed = value.parse().map_err(|_| {
                CliError::value(key, format!("{value:?} is not an unsigned integer"))
            })?
        }
        "out" => {
            if value.is_empty() {
                return Err(CliError::value(key, "path is empty"));
            }
            spec.output_path = PathBuf::from(value);
        }
        "note" => spec.notes.push(value.to_string()),
        _ => unreachable!("key checked by is_known"),
    }
    Ok(())
}

fn parse_count(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| CliError::value(key, format!("{value:?} is not a non-negative integer")))
}

/// A finite real, optionally written as `a/b`.
fn parse_real(key: &str, value: &str) -> Result<f64> {
    let bad = || CliError::value(key, format!("{value:?} is not a finite number"));
    let x = match value.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            a / b
        }
        None => value.parse().map_err(|_| bad())?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad())
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| parse_real(key, v.trim()))
        .collect()
}
