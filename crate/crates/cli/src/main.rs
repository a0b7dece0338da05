use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fran_cli::{parse_config, presets, run_sweep_with_progress, CliError, SweepSpec};

/// Monte Carlo delivery-latency sweeps for a cache-aided F-RAN downlink.
///
/// Exit status: 0 success, 2 configuration error, 3 I/O error, 4 more than
/// 5% of solver runs stalled.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// Experiment file with `key = value` lines.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment.
    #[arg(long, value_parser = presets::NAMES)]
    preset: Option<String>,
    /// Swept parameter: mu, M, L, P_dB or C.
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated axis values.
    #[arg(long)]
    values: Option<String>,
    /// Comma-separated subset of unicast, multicast, coded.
    #[arg(long)]
    strategies: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output CSV path; the manifest goes next to it.
    #[arg(long)]
    out: Option<String>,
    /// Number of UE/EN pairs.
    #[arg(long = "N")]
    pairs: Option<String>,
    /// Library size.
    #[arg(long = "F")]
    files: Option<String>,
    /// Subfiles per file.
    #[arg(long = "L")]
    subfiles: Option<String>,
    /// File size in bits.
    #[arg(long = "S")]
    file_bits: Option<String>,
    /// Fractional cache capacity.
    #[arg(long = "mu")]
    mu: Option<String>,
    /// Connectivity level.
    #[arg(long = "M")]
    connectivity: Option<String>,
    /// Fronthaul capacity in bits per symbol.
    #[arg(long = "C")]
    capacity: Option<String>,
    /// Per-EN power in dB.
    #[arg(long = "P_dB")]
    snr_db: Option<String>,
    /// Zipf exponent.
    #[arg(long = "gamma")]
    gamma: Option<String>,
    /// Path-loss base.
    #[arg(long = "alpha")]
    alpha: Option<String>,
    #[arg(long = "nT")]
    tx: Option<String>,
    #[arg(long = "nR")]
    rx: Option<String>,
    /// Streams per UE, or `auto`.
    #[arg(long = "nS")]
    streams: Option<String>,
    /// Any other setting, e.g. `solver.max_outer_iters=60`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Args {
    fn overrides(&self) -> Result<Vec<(String, String)>, CliError> {
        let named = [
            ("axis", &self.axis),
            ("values", &self.values),
            ("strategies", &self.strategies),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("out", &self.out),
            ("N", &self.pairs),
            ("F", &self.files),
            ("L", &self.subfiles),
            ("S", &self.file_bits),
            ("mu", &self.mu),
            ("M", &self.connectivity),
            ("C", &self.capacity),
            ("P_dB", &self.snr_db),
            ("gamma", &self.gamma),
            ("alpha", &self.alpha),
            ("nT", &self.tx),
            ("nR", &self.rx),
            ("nS", &self.streams),
        ];
        let mut out: Vec<(String, String)> = named
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }

    fn spec(&self) -> Result<SweepSpec, CliError> {
        let overrides = self.overrides()?;
        match (&self.config, &self.preset) {
            (Some(path), None) => parse_config(path, &overrides),
            (None, Some(name)) => presets::load(name, &overrides),
            _ => Err(CliError::Usage(
                "one of --config or --preset is required".into(),
            )),
        }
    }
}

fn run(args: &Args) -> Result<(), CliError> {
    let spec = args.spec()?;
    eprint!("{}", spec.banner());
    let output = run_sweep_with_progress(&spec, |done, total, point| {
        eprintln!(
            "[{done}/{total}] {} = {}  C = {}",
            spec.axis,
            spec.axis.format_value(point.axis_value),
            fran_cli::format::real(point.config.fronthaul_capacity)
        );
    })?;
    eprintln!(
        "wrote {} rows to {} ({} of {} solver runs stalled)",
        output.rows.len(),
        spec.output_path.display(),
        output.stalled_runs,
        output.solver_runs
    );
    output.check_stalls()
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
