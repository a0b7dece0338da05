//! Max-min rate multi-connectivity beamforming on the wireless edge.

mod cccp;
mod problem;
mod rates;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

pub use cccp::{maximize_min_rate, solve_relaxed, EdgeSolution, RelaxedSolution};
pub use problem::{RateModel, Surrogate};
pub use rates::{phi, user_rate, CMat};

use crate::error::{Error, Result};

/// Knobs of the CCCP max-min solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub max_outer_iters: usize,
    /// Stop once the relative min-rate gain of an outer step falls below this.
    pub outer_tol: f64,
    /// Ascent steps per inner solve, shared across temperature stages.
    pub inner_max_iters: usize,
    /// Relative softmin gain below which a temperature stage ends.
    pub inner_tol: f64,
    /// Softmin temperatures, relative to the current minimum rate.
    pub softmin_schedule: Vec<f64>,
    /// Step shrink factor of the backtracking line search.
    pub step_backtrack: f64,
    /// Fraction of the power budget used by the initial point.
    pub seed_scale: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            max_outer_iters: 40,
            outer_tol: 1e-4,
            inner_max_iters: 120,
            inner_tol: 1e-7,
            softmin_schedule: vec![0.1, 0.02, 0.004],
            step_backtrack: 0.5,
            seed_scale: 0.5,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_outer_iters == 0 {
            return Err(Error::param("max_outer_iters", "must be positive"));
        }
        if self.inner_max_iters == 0 {
            return Err(Error::param("inner_max_iters", "must be positive"));
        }
        if !(self.outer_tol > 0.0 && self.outer_tol.is_finite()) {
            return Err(Error::param("outer_tol", "must be positive"));
        }
        if !(self.inner_tol > 0.0 && self.inner_tol.is_finite()) {
            return Err(Error::param("inner_tol", "must be positive"));
        }
        let s = &self.softmin_schedule;
        if s.is_empty() || s.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::param(
                "softmin_schedule",
                "needs positive temperatures",
            ));
        }
        if s.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::param(
                "softmin_schedule",
                "must be strictly decreasing",
            ));
        }
        if !(self.step_backtrack > 0.0 && self.step_backtrack < 1.0) {
            return Err(Error::param("step_backtrack", "must lie in (0, 1)"));
        }
        if !(self.seed_scale > 0.0 && self.seed_scale <= 1.0) {
            return Err(Error::param("seed_scale", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Per-UE precoders with their serving-EN support.
///
/// Rows outside the support are zero by construction: each precoder is
/// stored as its serving block and embedded into the full `N * nT` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSet {
    tx: usize,
    support: Vec<Vec<usize>>,
    blocks: Vec<CMat>,
    full: Vec<CMat>,
    relaxed: Vec<CMat>,
}

impl PrecoderSet {
    /// `blocks[k-1]` is the `(|support| * nT) x nS` precoder of UE k over its
    /// serving ENs `support[k-1]` (1-based, in order).
    pub fn new(
        pairs: usize,
        tx: usize,
        support: Vec<Vec<usize>>,
        blocks: Vec<CMat>,
    ) -> Result<Self> {
        if support.len() != blocks.len() {
            return Err(Error::param("precoders", "one block per UE is required"));
        }
        let mut full = Vec::with_capacity(blocks.len());
        for (s, b) in support.iter().zip(&blocks) {
            if b.nrows() != s.len() * tx {
                return Err(Error::param(
                    "precoders",
                    "block rows must equal |support| * nT",
                ));
            }
            let mut v = CMat::zeros(pairs * tx, b.ncols());
            for (slot, &i) in s.iter().enumerate() {
                if i == 0 || i > pairs {
                    return Err(Error::param("precoders", "support index out of range"));
                }
                v.view_mut(((i - 1) * tx, 0), (tx, b.ncols()))
                    .copy_from(&b.view((slot * tx, 0), (tx, b.ncols())));
            }
            full.push(v);
        }
        let relaxed = blocks.iter().map(|b| b * b.adjoint()).collect();
        Ok(PrecoderSet {
            tx,
            support,
            blocks,
            full,
            relaxed,
        })
    }

    /// Replaces the stored relaxed covariances (by default `V_k V_k^H`).
    pub fn with_relaxed(mut self, relaxed: Vec<CMat>) -> Self {
        self.relaxed = relaxed;
        self
    }

    pub fn users(&self) -> usize {
        self.full.len()
    }

    /// Full stacked precoder V_k of UE `k` (1-based).
    pub fn full(&self, k: usize) -> &CMat {
        &self.full[k - 1]
    }

    /// Precoder restricted to the serving block of UE `k`.
    pub fn block(&self, k: usize) -> &CMat {
        &self.blocks[k - 1]
    }

    pub fn support(&self, k: usize) -> &[usize] {
        &self.support[k - 1]
    }

    /// Relaxed covariance of UE `k` over its serving block.
    pub fn relaxed(&self, k: usize) -> &CMat {
        &self.relaxed[k - 1]
    }

    /// Sub-block V_{k,i}: rows of EN `i` in the precoder of UE `k`.
    pub fn en_block(&self, k: usize, i: usize) -> CMat {
        let v = &self.full[k - 1];
        v.rows((i - 1) * self.tx, self.tx).into_owned()
    }

    /// Transmit power of EN `i`, `sum_k tr(V_{k,i} V_{k,i}^H)`.
    pub fn en_power(&self, i: usize) -> f64 {
        (1..=self.users())
            .map(|k| self.en_block(k, i).norm_squared())
            .sum()
    }
}

/// Rank reduction: the `streams` leading eigenvectors of each relaxed
/// covariance, scaled by the square roots of their eigenvalues.
pub fn extract_precoders(relaxed: &[CMat], streams: usize) -> Vec<CMat> {
    relaxed
        .iter()
        .map(|cov| {
            let d = cov.nrows();
            let herm = (cov + cov.adjoint()).scale(0.5);
            let eig = SymmetricEigen::new(herm);
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let mut v = CMat::zeros(d, streams);
            for (col, &idx) in order.iter().take(streams).enumerate() {
                let s = eig.eigenvalues[idx].max(0.0).sqrt();
                for r in 0..d {
                    v[(r, col)] = eig.eigenvectors[(r, idx)] * Complex64::new(s, 0.0);
                }
            }
            v
        })
        .collect()
}
