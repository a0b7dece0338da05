//! Latency composition and seeded Monte Carlo trials.
//!
//! A trial draws a cache placement, a demand vector and a channel
//! realization from independent substreams, evaluates all three fronthaul
//! strategies on that realization, and solves the edge beamforming problem
//! once (the edge latency does not depend on the fronthaul strategy).

use rayon::prelude::*;

use crate::cache::populate_caches;
use crate::edge::maximize_min_rate;
use crate::error::{Error, Result};
use crate::fronthaul::{
    coded_bits, compute_requirements, multicast_bits, unicast_bits, FronthaulLoad, Strategy,
};
use crate::model::{sample_channel, sample_demand, zipf_pmf, SystemConfig};
use crate::rng::{substream, Purpose};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.96;

/// Edge latency S / min_k R_k; infinite when some rate is zero.
pub fn edge_latency(rates: &[f64], file_bits: f64) -> f64 {
    let min = rates.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        file_bits / min
    }
}

/// Fronthaul latency S_B / C. Nothing to send takes no time, even on a
/// zero-capacity link.
pub fn fronthaul_latency(bits: f64, capacity: f64) -> f64 {
    if bits == 0.0 {
        0.0
    } else if capacity == 0.0 {
        f64::INFINITY
    } else {
        bits / capacity
    }
}

/// Pipelined delivery: both links run concurrently.
pub fn total_latency(fronthaul: f64, edge: f64) -> f64 {
    fronthaul.max(edge)
}

/// Edge-link part of a trial.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeOutcome {
    pub rates: Vec<f64>,
    pub min_rate: f64,
    pub latency: f64,
    pub outer_iterations: usize,
    pub stalled: bool,
}

/// Fronthaul part of a trial, one load per strategy in [`Strategy::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct FronthaulOutcome {
    pub loads: [FronthaulLoad; 3],
}

/// Latencies of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_index: u64,
    /// T_F per strategy, [`Strategy::ALL`] order.
    pub fronthaul_latency: [f64; 3],
    pub edge_latency: f64,
    /// T_total per strategy.
    pub total_latency: [f64; 3],
    pub min_rate: f64,
    /// S_B per strategy.
    pub fronthaul_bits: [f64; 3],
    /// Coded subfiles n_sub.
    pub coded_subfiles: usize,
    pub outer_iterations: usize,
    pub stalled: bool,
}

impl TrialResult {
    pub fn fronthaul(&self, s: Strategy) -> f64 {
        self.fronthaul_latency[s.index()]
    }

    pub fn total(&self, s: Strategy) -> f64 {
        self.total_latency[s.index()]
    }

    pub fn bits(&self, s: Strategy) -> f64 {
        self.fronthaul_bits[s.index()]
    }
}

/// Solves the edge problem for trial `trial_index`.
pub fn edge_trial(master_seed: u64, trial_index: u64, cfg: &SystemConfig) -> Result<EdgeOutcome> {
    let mut rng = substream(master_seed, trial_index, Purpose::Channel);
    let channel = sample_channel(&mut rng, cfg);
    let serving = cfg.serving_sets()?;
    let sol = maximize_min_rate(&channel, &serving, cfg)?;
    Ok(EdgeOutcome {
        latency: edge_latency(&sol.rates, cfg.file_bits),
        min_rate: sol.min_rate,
        rates: sol.rates,
        outer_iterations: sol.relaxed.outer_iterations,
        stalled: sol.relaxed.stalled,
    })
}

/// Fronthaul loads of all strategies for trial `trial_index`.
pub fn fronthaul_trial(
    master_seed: u64,
    trial_index: u64,
    cfg: &SystemConfig,
) -> Result<FronthaulOutcome> {
    let cache = populate_caches(
        &mut substream(master_seed, trial_index, Purpose::Cache),
        cfg,
    );
    let pmf = zipf_pmf(cfg.library_size, cfg.zipf_exponent)?;
    let demand = sample_demand(
        &mut substream(master_seed, trial_index, Purpose::Demand),
        &pmf,
        cfg.pairs,
    );
    let serving = cfg.serving_sets()?;
    let req = compute_requirements(&cache, &demand, &serving);
    let sub = cfg.subfile_bits();
    Ok(FronthaulOutcome {
        loads: [
            unicast_bits(&req, sub),
            multicast_bits(&req, sub),
            coded_bits(&req, &cache, sub),
        ],
    })
}

/// Combines the two halves of a trial.
pub fn assemble(
    cfg: &SystemConfig,
    trial_index: u64,
    fronthaul: &FronthaulOutcome,
    edge: &EdgeOutcome,
) -> TrialResult {
    let tf = fronthaul
        .loads
        .map(|l| fronthaul_latency(l.bits, cfg.fronthaul_capacity));
    TrialResult {
        trial_index,
        fronthaul_latency: tf,
        edge_latency: edge.latency,
        total_latency: tf.map(|t| total_latency(t, edge.latency)),
        min_rate: edge.min_rate,
        fronthaul_bits: fronthaul.loads.map(|l| l.bits),
        coded_subfiles: fronthaul.loads[Strategy::Coded.index()].transmissions,
        outer_iterations: edge.outer_iterations,
        stalled: edge.stalled,
    }
}

pub fn run_trial(master_seed: u64, trial_index: u64, cfg: &SystemConfig) -> Result<TrialResult> {
    cfg.validate()?;
    let fronthaul = fronthaul_trial(master_seed, trial_index, cfg)?;
    let edge = edge_trial(master_seed, trial_index, cfg)?;
    Ok(assemble(cfg, trial_index, &fronthaul, &edge))
}

/// Edge outcomes of trials `0..n_trials`, computed in parallel.
pub fn edge_outcomes(
    cfg: &SystemConfig,
    n_trials: usize,
    master_seed: u64,
) -> Result<Vec<EdgeOutcome>> {
    cfg.validate()?;
    (0..n_trials as u64)
        .into_par_iter()
        .map(|t| edge_trial(master_seed, t, cfg))
        .collect()
}

/// A string identifying every parameter the edge outcome depends on. Two
/// configurations with equal signatures produce identical edge outcomes for
/// the same seed and trial index.
pub fn edge_signature(cfg: &SystemConfig) -> String {
    format!(
        "N={} M={} nT={} nR={} nS={} alpha={:?} P_dB={:?} solver={:?}",
        cfg.pairs,
        cfg.connectivity,
        cfg.tx_antennas,
        cfg.rx_antennas,
        cfg.stream_count(),
        cfg.path_loss,
        cfg.snr_db,
        cfg.solver
    )
}

/// Sample mean and 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub ci95: f64,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Estimate {
                mean: f64::INFINITY,
                ci95: f64::INFINITY,
            };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Estimate { mean, ci95: 0.0 };
        }
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Estimate {
            mean,
            ci95: Z95 * var.sqrt() / (n as f64).sqrt(),
        }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.ci95
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.ci95
    }
}

/// Averages of one strategy over the finite-latency trials.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub fronthaul: Estimate,
    pub edge: Estimate,
    pub total: Estimate,
    /// Trials with infinite total latency, excluded from the estimates.
    pub infinite_trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub config: SystemConfig,
    pub master_seed: u64,
    pub trials: usize,
    /// One entry per strategy, [`Strategy::ALL`] order.
    pub strategies: [StrategySummary; 3],
    pub stalled_trials: usize,
    pub results: Vec<TrialResult>,
}

impl AggregateResult {
    pub fn summary(&self, s: Strategy) -> &StrategySummary {
        &self.strategies[s.index()]
    }
}

/// Reduces trial results, in trial order, to per-strategy estimates.
pub fn aggregate(
    cfg: &SystemConfig,
    master_seed: u64,
    results: Vec<TrialResult>,
) -> AggregateResult {
    let strategies = Strategy::ALL.map(|s| {
        let finite: Vec<&TrialResult> = results.iter().filter(|r| r.total(s).is_finite()).collect();
        let pick =
            |f: &dyn Fn(&TrialResult) -> f64| -> Vec<f64> { finite.iter().map(|r| f(r)).collect() };
        StrategySummary {
            strategy: s,
            fronthaul: Estimate::from_samples(&pick(&|r| r.fronthaul(s))),
            edge: Estimate::from_samples(&pick(&|r| r.edge_latency)),
            total: Estimate::from_samples(&pick(&|r| r.total(s))),
            infinite_trials: results.len() - finite.len(),
        }
    });
    AggregateResult {
        config: cfg.clone(),
        master_seed,
        trials: results.len(),
        strategies,
        stalled_trials: results.iter().filter(|r| r.stalled).count(),
        results,
    }
}

/// Runs `n_trials` independent trials and aggregates them.
pub fn run_experiment(
    cfg: &SystemConfig,
    n_trials: usize,
    master_seed: u64,
) -> Result<AggregateResult> {
    run_experiment_with_edges(cfg, n_trials, master_seed, None)
}

/// Like [`run_experiment`], reusing precomputed edge outcomes when given.
/// They must come from [`edge_outcomes`] with a configuration of equal
/// [`edge_signature`] and the same seed.
pub fn run_experiment_with_edges(
    cfg: &SystemConfig,
    n_trials: usize,
    master_seed: u64,
    edges: Option<&[EdgeOutcome]>,
) -> Result<AggregateResult> {
    cfg.validate()?;
    if n_trials == 0 {
        return Err(Error::param("n_trials", "at least one trial is required"));
    }
    if let Some(e) = edges {
        if e.len() < n_trials {
            return Err(Error::param("edges", "fewer edge outcomes than trials"));
        }
    }
    let results = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let fronthaul = fronthaul_trial(master_seed, t, cfg)?;
            let edge = match edges {
                Some(e) => e[t as usize].clone(),
                None => edge_trial(master_seed, t, cfg)?,
            };
            Ok(assemble(cfg, t, &fronthaul, &edge))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(cfg, master_seed, results))
}
