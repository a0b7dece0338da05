//! Runs a sweep and writes its CSV table and run manifest.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use fran_core::sim::{
    edge_outcomes, edge_signature, run_experiment_with_edges, EdgeOutcome, StrategySummary,
};
use fran_core::{Strategy, SystemConfig};

use crate::config::{Axis, SweepPoint, SweepSpec};
use crate::error::{CliError, Result};
use crate::format::real;

pub const CSV_HEADER: [&str; 25] = [
    "strategy",
    "axis_name",
    "axis_value",
    "N",
    "F",
    "L",
    "S_bits",
    "mu",
    "M",
    "C",
    "P_dB",
    "gamma",
    "alpha",
    "nT",
    "nR",
    "nS",
    "n_trials",
    "seed",
    "TF_mean",
    "TF_ci95",
    "TE_mean",
    "TE_ci95",
    "Ttotal_mean",
    "Ttotal_ci95",
    "inf_trials",
];

pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Fraction of stalled solver runs above which a sweep is reported as failed.
pub const STALL_THRESHOLD: f64 = 0.05;

/// One (experiment, strategy) line of the output table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub strategy: Strategy,
    pub axis: Axis,
    pub axis_value: f64,
    pub config: SystemConfig,
    pub n_trials: usize,
    pub seed: u64,
    pub summary: StrategySummary,
}

impl SweepRow {
    /// CSV cells in [`CSV_HEADER`] order.
    pub fn record(&self) -> Vec<String> {
        let c = &self.config;
        let s = &self.summary;
        vec![
            self.strategy.name().to_string(),
            self.axis.key().to_string(),
            self.axis.format_value(self.axis_value),
            c.pairs.to_string(),
            c.library_size.to_string(),
            c.subfiles.to_string(),
            real(c.file_bits),
            real(c.cache_fraction),
            c.connectivity.to_string(),
            real(c.fronthaul_capacity),
            real(c.snr_db),
            real(c.zipf_exponent),
            real(c.path_loss),
            c.tx_antennas.to_string(),
            c.rx_antennas.to_string(),
            c.stream_count().to_string(),
            self.n_trials.to_string(),
            self.seed.to_string(),
            real(s.fronthaul.mean),
            real(s.fronthaul.ci95),
            real(s.edge.mean),
            real(s.edge.ci95),
            real(s.total.mean),
            real(s.total.ci95),
            s.infinite_trials.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// Distinct edge-optimizer runs (outcomes are shared between points
    /// that differ only in fronthaul parameters).
    pub solver_runs: usize,
    pub stalled_runs: usize,
}

impl SweepOutput {
    pub fn stall_fraction(&self) -> f64 {
        if self.solver_runs == 0 {
            0.0
        } else {
            self.stalled_runs as f64 / self.solver_runs as f64
        }
    }

    /// Errors when more than [`STALL_THRESHOLD`] of solver runs stalled.
    pub fn check_stalls(&self) -> Result<()> {
        if self.stall_fraction() > STALL_THRESHOLD {
            return Err(CliError::Stalled {
                stalled: self.stalled_runs,
                trials: self.solver_runs,
            });
        }
        Ok(())
    }
}

/// Computes every row of `spec` without touching the file system.
/// `progress(done, total, point)` is called after each experiment.
pub fn compute_sweep(
    spec: &SweepSpec,
    mut progress: impl FnMut(usize, usize, &SweepPoint),
) -> Result<SweepOutput> {
    spec.validate()?;
    let points = spec.points()?;
    let mut edges: HashMap<String, Vec<EdgeOutcome>> = HashMap::new();
    let mut rows = Vec::with_capacity(points.len() * spec.strategies.len());
    let mut stalled_runs = 0;
    for (n, point) in points.iter().enumerate() {
        let key = edge_signature(&point.config);
        if !edges.contains_key(&key) {
            let outcomes = edge_outcomes(&point.config, spec.n_trials, spec.master_seed)?;
            stalled_runs += outcomes.iter().filter(|o| o.stalled).count();
            edges.insert(key.clone(), outcomes);
        }
        let agg = run_experiment_with_edges(
            &point.config,
            spec.n_trials,
            spec.master_seed,
            Some(&edges[&key]),
        )?;
        for &s in &spec.strategies {
            rows.push(SweepRow {
                strategy: s,
                axis: spec.axis,
                axis_value: point.axis_value,
                config: point.config.clone(),
                n_trials: spec.n_trials,
                seed: spec.master_seed,
                summary: agg.summary(s).clone(),
            });
        }
        progress(n + 1, points.len(), point);
    }
    Ok(SweepOutput {
        rows,
        solver_runs: edges.len() * spec.n_trials,
        stalled_runs,
    })
}

/// Writes the header and `rows` as CSV.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()
}

/// Sidecar manifest path: `<out>.manifest`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

/// Key-value echo of the run: version, schema, every setting and the
/// stall count.
pub fn manifest_text(spec: &SweepSpec, output: &SweepOutput) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "version = fran-cli {}\n",
        env!("CARGO_PKG_VERSION")
    ));
    s.push_str(&format!("csv_schema = {CSV_SCHEMA_VERSION}\n"));
    for (k, v) in spec.entries() {
        s.push_str(&format!("{k} = {v}\n"));
    }
    s.push_str(&format!("rows = {}\n", output.rows.len()));
    s.push_str(&format!("solver_runs = {}\n", output.solver_runs));
    s.push_str(&format!("stalled_runs = {}\n", output.stalled_runs));
    s
}

/// Runs `spec` and writes the CSV and its manifest. Both files are opened
/// before any computation so an unwritable path fails fast.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    run_sweep_with_progress(spec, |_, _, _| {})
}

pub fn run_sweep_with_progress(
    spec: &SweepSpec,
    progress: impl FnMut(usize, usize, &SweepPoint),
) -> Result<SweepOutput> {
    spec.validate()?;
    let csv_path = spec.output_path.clone();
    let man_path = manifest_path(&csv_path);
    let csv_file = File::create(&csv_path).map_err(|e| CliError::io(&csv_path, e))?;
    let man_file = File::create(&man_path).map_err(|e| CliError::io(&man_path, e))?;

    let output = compute_sweep(spec, progress)?;

    write_csv(&output.rows, BufWriter::new(csv_file)).map_err(|e| CliError::io(&csv_path, e))?;
    let mut man = BufWriter::new(man_file);
    man.write_all(manifest_text(spec, &output).as_bytes())
        .and_then(|_| man.flush())
        .map_err(|e| CliError::io(&man_path, e))?;
    Ok(output)
}
