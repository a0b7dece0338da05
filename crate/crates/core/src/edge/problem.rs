//! Rate functions over relaxed covariances and their CCCP surrogates.
//!
//! Each UE's relaxed covariance lives on the block of its serving ENs only,
//! a square matrix of side `M * nT`. The rate of UE k splits as
//! `g_k = f1_k - f2_k` with
//!
//! ```text
//! f1_k = log2 det(I + sum_l  H_k V_l H_k^H)
//! f2_k = log2 det(I + sum_{l != k} H_k V_l H_k^H)
//! ```
//!
//! both concave in the covariances. The surrogate replaces `f2_k` by its
//! tangent plane at a linearization point.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::model::ChannelRealization;

use super::rates::{log2det, log2det_inv, trace_product_re, CMat};

/// Channel data of one beamforming instance, restricted to serving blocks.
#[derive(Debug, Clone)]
pub struct RateModel {
    users: usize,
    rx: usize,
    tx: usize,
    serving: Vec<Vec<usize>>,
    // hsub[j * users + l]: columns of H_j for the ENs serving UE l.
    hsub: Vec<CMat>,
}

impl RateModel {
    /// `serving[k-1]` lists the 1-based ENs serving UE k; all sets must have
    /// the same size.
    pub fn new(ch: &ChannelRealization, serving: &[Vec<usize>]) -> Result<Self> {
        let users = ch.pairs();
        if serving.len() != users {
            return Err(Error::param(
                "serving",
                "one serving set per UE is required",
            ));
        }
        let m = serving[0].len();
        for s in serving {
            if s.len() != m || m == 0 {
                return Err(Error::param(
                    "serving",
                    "serving sets must share one non-zero size",
                ));
            }
            if s.iter().any(|&i| i == 0 || i > users) {
                return Err(Error::param("serving", "EN index out of range"));
            }
        }
        let mut hsub = Vec::with_capacity(users * users);
        for j in 1..=users {
            for s in serving {
                hsub.push(ch.columns_for(j, s.iter().copied()));
            }
        }
        Ok(RateModel {
            users,
            rx: ch.rx_antennas(),
            tx: ch.tx_antennas(),
            serving: serving.to_vec(),
            hsub,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    /// Side of each UE's covariance block, `M * nT`.
    pub fn block_dim(&self) -> usize {
        self.serving[0].len() * self.tx
    }

    pub fn tx_antennas(&self) -> usize {
        self.tx
    }

    pub fn serving(&self) -> &[Vec<usize>] {
        &self.serving
    }

    pub(crate) fn hsub(&self, j: usize, l: usize) -> &CMat {
        &self.hsub[j * self.users + l]
    }

    /// `H_j V_l H_j^H` for every (j, l), 0-based, row-major.
    pub(crate) fn contributions(&self, covs: &[CMat]) -> Vec<CMat> {
        let mut out = Vec::with_capacity(self.users * self.users);
        for j in 0..self.users {
            for (l, cov) in covs.iter().enumerate() {
                let h = self.hsub(j, l);
                out.push(h * cov * h.adjoint());
            }
        }
        out
    }

    /// Same as [`RateModel::contributions`] with `V_l = W_l W_l^H`.
    pub(crate) fn contributions_from_factors(&self, factors: &[CMat]) -> Vec<CMat> {
        let mut out = Vec::with_capacity(self.users * self.users);
        for j in 0..self.users {
            for (l, w) in factors.iter().enumerate() {
                let q = self.hsub(j, l) * w;
                out.push(&q * q.adjoint());
            }
        }
        out
    }

    /// `I + sum_l C[j, l]`, optionally skipping `l = j`.
    pub(crate) fn received(&self, contrib: &[CMat], j: usize, skip_own: bool) -> CMat {
        let mut m = CMat::identity(self.rx, self.rx);
        for l in 0..self.users {
            if !(skip_own && l == j) {
                m += &contrib[j * self.users + l];
            }
        }
        m
    }

    fn check_ue(&self, k: usize) {
        assert!(k >= 1 && k <= self.users, "UE {k} out of range");
    }

    /// f1 of UE `k` (1-based).
    pub fn f1(&self, k: usize, covs: &[CMat]) -> f64 {
        self.check_ue(k);
        let c = self.contributions(covs);
        log2det(self.received(&c, k - 1, false)).expect("received covariance is PD")
    }

    /// f2 of UE `k` (1-based).
    pub fn f2(&self, k: usize, covs: &[CMat]) -> f64 {
        self.check_ue(k);
        let c = self.contributions(covs);
        log2det(self.received(&c, k - 1, true)).expect("interference covariance is PD")
    }

    /// Relaxed rates g_k = f1_k - f2_k of all UEs.
    pub fn rates(&self, covs: &[CMat]) -> Vec<f64> {
        self.rates_from_contributions(&self.contributions(covs))
    }

    pub(crate) fn rates_from_contributions(&self, c: &[CMat]) -> Vec<f64> {
        (0..self.users)
            .map(|j| {
                let f1 = log2det(self.received(c, j, false)).expect("PD");
                let f2 = log2det(self.received(c, j, true)).expect("PD");
                (f1 - f2).max(0.0)
            })
            .collect()
    }

    /// Gradient of f1_k with respect to each V_l, as Hermitian matrices
    /// `G_l` such that `d f1 = Re tr(G_l dV_l)`.
    pub fn grad_f1(&self, k: usize, covs: &[CMat]) -> Vec<CMat> {
        self.check_ue(k);
        let c = self.contributions(covs);
        let (_, inv) = log2det_inv(self.received(&c, k - 1, false)).expect("PD");
        (0..self.users)
            .map(|l| self.sandwich(k - 1, l, &inv, 1.0 / LN_2))
            .collect()
    }

    /// Gradient of f2_k; the entry for `l = k` is zero.
    pub fn grad_f2(&self, k: usize, covs: &[CMat]) -> Vec<CMat> {
        self.check_ue(k);
        let c = self.contributions(covs);
        let (_, inv) = log2det_inv(self.received(&c, k - 1, true)).expect("PD");
        let d = self.block_dim();
        (0..self.users)
            .map(|l| {
                if l == k - 1 {
                    CMat::zeros(d, d)
                } else {
                    self.sandwich(k - 1, l, &inv, 1.0 / LN_2)
                }
            })
            .collect()
    }

    /// `scale * Hsub(j,l)^H M Hsub(j,l)`.
    pub(crate) fn sandwich(&self, j: usize, l: usize, m: &CMat, scale: f64) -> CMat {
        let h = self.hsub(j, l);
        (h.adjoint() * m * h).scale(scale)
    }

    /// Per-EN transmit power `sum_k tr(V_{k,i})`, indexed by EN (0-based).
    pub fn en_powers(&self, covs: &[CMat]) -> Vec<f64> {
        let mut p = vec![0.0; self.users];
        for (k, cov) in covs.iter().enumerate() {
            for (slot, &i) in self.serving[k].iter().enumerate() {
                for r in slot * self.tx..(slot + 1) * self.tx {
                    p[i - 1] += cov[(r, r)].re;
                }
            }
        }
        p
    }
}

/// Concave lower bounds of the rates, tight at a linearization point.
#[derive(Debug, Clone)]
pub struct Surrogate {
    // Inverse of the interference-plus-noise covariance at the point.
    interference_inv: Vec<CMat>,
    // f2_k at the point minus its linear term evaluated at the point.
    offset: Vec<f64>,
}

impl Surrogate {
    /// Linearizes every f2_k at `covs`.
    pub fn at(model: &RateModel, covs: &[CMat]) -> Self {
        Self::at_contributions(model, &model.contributions(covs))
    }

    pub(crate) fn at_contributions(model: &RateModel, c: &[CMat]) -> Self {
        let n = model.users();
        let mut interference_inv = Vec::with_capacity(n);
        let mut offset = Vec::with_capacity(n);
        for j in 0..n {
            let (f2, inv) = log2det_inv(model.received(c, j, true)).expect("PD");
            let linear = Self::linear_term(model, &inv, c, j);
            interference_inv.push(inv);
            offset.push(f2 - linear);
        }
        Surrogate {
            interference_inv,
            offset,
        }
    }

    fn linear_term(model: &RateModel, inv: &CMat, c: &[CMat], j: usize) -> f64 {
        let n = model.users();
        (0..n)
            .filter(|&l| l != j)
            .map(|l| trace_product_re(inv, &c[j * n + l]))
            .sum::<f64>()
            / LN_2
    }

    /// Surrogate rate of UE `k` (1-based) at `covs`.
    pub fn value(&self, model: &RateModel, k: usize, covs: &[CMat]) -> f64 {
        self.values_from_contributions(model, &model.contributions(covs))[k - 1]
    }

    pub fn values(&self, model: &RateModel, covs: &[CMat]) -> Vec<f64> {
        self.values_from_contributions(model, &model.contributions(covs))
    }

    pub(crate) fn values_from_contributions(&self, model: &RateModel, c: &[CMat]) -> Vec<f64> {
        (0..model.users())
            .map(|j| {
                let f1 = log2det(model.received(c, j, false)).expect("PD");
                f1 - self.offset[j] - Self::linear_term(model, &self.interference_inv[j], c, j)
            })
            .collect()
    }

    /// Like [`Surrogate::values_from_contributions`] but also returns the
    /// inverse of each UE's received covariance, for gradients.
    pub(crate) fn values_and_inverses(
        &self,
        model: &RateModel,
        c: &[CMat],
    ) -> (Vec<f64>, Vec<CMat>) {
        let mut vals = Vec::with_capacity(model.users());
        let mut invs = Vec::with_capacity(model.users());
        for j in 0..model.users() {
            let (f1, inv) = log2det_inv(model.received(c, j, false)).expect("PD");
            vals.push(
                f1 - self.offset[j] - Self::linear_term(model, &self.interference_inv[j], c, j),
            );
            invs.push(inv);
        }
        (vals, invs)
    }

    /// Hermitian gradient of `sum_j weights[j] * ghat_j` with respect to
    /// each V_l, given the received-covariance inverses at the current point.
    pub(crate) fn weighted_gradient(
        &self,
        model: &RateModel,
        weights: &[f64],
        received_inv: &[CMat],
    ) -> Vec<CMat> {
        let n = model.users();
        let d = model.block_dim();
        (0..n)
            .map(|l| {
                let mut g = CMat::zeros(d, d);
                for j in 0..n {
                    if weights[j] == 0.0 {
                        continue;
                    }
                    let m = if l == j {
                        received_inv[j].clone()
                    } else {
                        &received_inv[j] - &self.interference_inv[j]
                    };
                    g += model.sandwich(j, l, &m, weights[j] / LN_2);
                }
                g
            })
            .collect()
    }
}
