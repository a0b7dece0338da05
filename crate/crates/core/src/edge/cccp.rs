//! Concave-convex procedure for the relaxed max-min rate problem.
//!
//! Outer loop: linearize every `f2_k` at the current covariances, which
//! gives concave surrogates that lower-bound the rates and are tight at the
//! linearization point. Inner loop: raise the minimum surrogate rate.
//!
//! The inner solver ascends a temperature-annealed softmin of the surrogate
//! rates over square factors `W_k` (covariance `W_k W_k^H`, PSD by
//! construction), scaling each EN's rows back onto its power budget after
//! every step. It returns the iterate with the best minimum surrogate rate,
//! never worse than its starting point, so the true minimum rate cannot
//! decrease from one outer iteration to the next.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ChannelRealization, SystemConfig};

use super::problem::{RateModel, Surrogate};
use super::rates::{user_rate, CMat};
use super::{extract_precoders, PrecoderSet, SolverParams};

const INITIAL_STEP: f64 = 0.25;
const MAX_STEP: f64 = 4.0;
const MIN_STEP: f64 = 1e-10;

/// Result of the relaxed (covariance-domain) solve.
#[derive(Debug, Clone)]
pub struct RelaxedSolution {
    /// Per-UE covariances over the serving blocks.
    pub covariances: Vec<CMat>,
    /// Relaxed rates g_k at `covariances`.
    pub rates: Vec<f64>,
    /// Minimum relaxed rate at the initial point and after each outer step.
    pub history: Vec<f64>,
    pub outer_iterations: usize,
    /// An inner solve returned a point that lowered the minimum rate.
    pub stalled: bool,
}

/// Beamforming solution after rank reduction.
#[derive(Debug, Clone)]
pub struct EdgeSolution {
    pub precoders: PrecoderSet,
    /// Rates recomputed from the extracted precoders.
    pub rates: Vec<f64>,
    pub min_rate: f64,
    pub relaxed: RelaxedSolution,
}

/// Solves the max-min problem for the scenario in `cfg` and extracts
/// rank-`nS` precoders. Reported rates come from the extracted precoders.
pub fn maximize_min_rate(
    ch: &ChannelRealization,
    serving: &[Vec<usize>],
    cfg: &SystemConfig,
) -> Result<EdgeSolution> {
    if ch.pairs() != cfg.pairs
        || ch.tx_antennas() != cfg.tx_antennas
        || ch.rx_antennas() != cfg.rx_antennas
    {
        return Err(Error::param(
            "H",
            "channel dimensions do not match the configuration",
        ));
    }
    if serving.iter().any(|s| s.len() != cfg.connectivity) {
        return Err(Error::param("serving", "every serving set must hold M ENs"));
    }
    cfg.solver.validate()?;
    let model = RateModel::new(ch, serving)?;
    let relaxed = solve_relaxed(&model, cfg.power(), &cfg.solver, |_, _| {});
    let blocks = extract_precoders(&relaxed.covariances, cfg.stream_count());
    let precoders = PrecoderSet::new(cfg.pairs, cfg.tx_antennas, serving.to_vec(), blocks)?
        .with_relaxed(relaxed.covariances.clone());
    let rates: Vec<f64> = (1..=cfg.pairs)
        .map(|k| user_rate(k, &precoders, ch))
        .collect();
    let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EdgeSolution {
        precoders,
        rates,
        min_rate,
        relaxed,
    })
}

/// Runs the CCCP iterations on `model` under per-EN power `power`.
///
/// `observer(t, covs)` is called at every linearization point, `t` counting
/// from zero.
pub fn solve_relaxed(
    model: &RateModel,
    power: f64,
    params: &SolverParams,
    mut observer: impl FnMut(usize, &[CMat]),
) -> RelaxedSolution {
    let layout = PowerLayout::new(model);
    let mut factors = layout.initial_factors(power * params.seed_scale);
    let mut covs = covariances(&factors);
    let mut rates = model.rates(&covs);
    let mut current = min_of(&rates);
    let mut history = vec![current];
    let mut stalled = false;
    let mut outer = 0;

    while outer < params.max_outer_iters {
        observer(outer, &covs);
        let surrogate = Surrogate::at(model, &covs);
        outer += 1;
        let next = ascend(model, &surrogate, &layout, factors.clone(), power, params);
        let next_covs = covariances(&next);
        let next_rates = model.rates(&next_covs);
        let next_min = min_of(&next_rates);
        if next_min.is_nan() || next_min < current - params.inner_tol {
            stalled = true;
            break;
        }
        let gain = (next_min - current) / current.abs().max(1e-12);
        factors = next;
        covs = next_covs;
        rates = next_rates;
        current = next_min;
        history.push(current);
        if gain < params.outer_tol {
            break;
        }
    }

    RelaxedSolution {
        covariances: covs,
        rates,
        history,
        outer_iterations: outer,
        stalled,
    }
}

fn covariances(factors: &[CMat]) -> Vec<CMat> {
    factors.iter().map(|w| w * w.adjoint()).collect()
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Softmin value `-tau * ln sum exp(-v/tau)` and its weights.
fn softmin(values: &[f64], tau: f64) -> (f64, Vec<f64>) {
    let m = min_of(values);
    let mut weights: Vec<f64> = values.iter().map(|v| (-(v - m) / tau).exp()).collect();
    let z: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= z);
    (m - tau * z.ln(), weights)
}

/// Which factor rows belong to which EN.
struct PowerLayout {
    tx: usize,
    // For each UE: 0-based EN of every slot in its serving block.
    slots: Vec<Vec<usize>>,
    // Number of UEs served by each EN.
    load: Vec<usize>,
}

impl PowerLayout {
    fn new(model: &RateModel) -> Self {
        let slots: Vec<Vec<usize>> = model
            .serving()
            .iter()
            .map(|s| s.iter().map(|&i| i - 1).collect())
            .collect();
        let mut load = vec![0; model.users()];
        for s in &slots {
            for &i in s {
                load[i] += 1;
            }
        }
        PowerLayout {
            tx: model.tx_antennas(),
            slots,
            load,
        }
    }

    /// Diagonal factors giving every EN exactly `budget` power, split
    /// evenly over the UEs it serves and its antennas.
    fn initial_factors(&self, budget: f64) -> Vec<CMat> {
        self.slots
            .iter()
            .map(|s| {
                let d = s.len() * self.tx;
                let mut w = CMat::zeros(d, d);
                for (slot, &i) in s.iter().enumerate() {
                    let amp = (budget / (self.tx * self.load[i]) as f64).sqrt();
                    for r in slot * self.tx..(slot + 1) * self.tx {
                        w[(r, r)] = Complex64::new(amp, 0.0);
                    }
                }
                w
            })
            .collect()
    }

    /// Scales each over-budget EN's rows down onto the budget.
    fn enforce(&self, factors: &mut [CMat], power: f64) {
        let mut used = vec![0.0; self.load.len()];
        for (w, s) in factors.iter().zip(&self.slots) {
            for (slot, &i) in s.iter().enumerate() {
                used[i] += w.rows(slot * self.tx, self.tx).norm_squared();
            }
        }
        for (w, s) in factors.iter_mut().zip(&self.slots) {
            for (slot, &i) in s.iter().enumerate() {
                if used[i] > power {
                    let f = (power / used[i]).sqrt();
                    w.rows_mut(slot * self.tx, self.tx).scale_mut(f);
                }
            }
        }
    }
}

/// Inner solve: raises the minimum surrogate rate starting from `factors`.
fn ascend(
    model: &RateModel,
    surrogate: &Surrogate,
    layout: &PowerLayout,
    mut factors: Vec<CMat>,
    power: f64,
    params: &SolverParams,
) -> Vec<CMat> {
    let c = model.contributions_from_factors(&factors);
    let (mut values, mut inverses) = surrogate.values_and_inverses(model, &c);
    let mut best_min = min_of(&values);
    let mut best = factors.clone();
    let scale = best_min.max(1e-3);
    let budget = (params.inner_max_iters / params.softmin_schedule.len()).max(1);
    let mut eta = INITIAL_STEP;

    for &t in &params.softmin_schedule {
        let tau = t * scale;
        let (mut level, mut weights) = softmin(&values, tau);
        for _ in 0..budget {
            let grads = surrogate.weighted_gradient(model, &weights, &inverses);
            let dirs: Vec<CMat> = grads.iter().zip(&factors).map(|(g, w)| g * w).collect();
            let dir_norm = dirs.iter().map(CMat::norm_squared).sum::<f64>().sqrt();
            let w_norm = factors.iter().map(CMat::norm_squared).sum::<f64>().sqrt();
            if !(dir_norm > 0.0 && dir_norm.is_finite()) {
                break;
            }

            let mut accepted = None;
            while eta > MIN_STEP {
                let step = eta * w_norm / dir_norm;
                let mut cand: Vec<CMat> = factors
                    .iter()
                    .zip(&dirs)
                    .map(|(w, d)| w + d.scale(step))
                    .collect();
                layout.enforce(&mut cand, power);
                let c = model.contributions_from_factors(&cand);
                let (vals, invs) = surrogate.values_and_inverses(model, &c);
                let (lvl, wts) = softmin(&vals, tau);
                if lvl > level {
                    accepted = Some((cand, vals, invs, lvl, wts));
                    break;
                }
                eta *= params.step_backtrack;
            }
            let Some((cand, vals, invs, lvl, wts)) = accepted else {
                break;
            };

            let gain = lvl - level;
            factors = cand;
            values = vals;
            inverses = invs;
            level = lvl;
            weights = wts;
            let m = min_of(&values);
            if m > best_min {
                best_min = m;
                best.clone_from(&factors);
            }
            eta = (eta / params.step_backtrack).min(MAX_STEP);
            if gain < params.inner_tol * level.abs().max(1e-3) {
                break;
            }
        }
    }
    best
}
