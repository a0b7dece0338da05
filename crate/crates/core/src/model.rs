//! Scenario configuration, demand model, serving sets and channel draws.
//!
//! UE, EN, file and subfile indices are 1-based on every public surface of
//! this crate. Storage is 0-based internally.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::edge::SolverParams;
use crate::error::{Error, Result};

/// Tolerance applied before flooring `mu * L`, so that decimal cache
/// fractions such as 0.3 or 1/3 are not pushed below an integer by
/// binary rounding.
const FLOOR_SLACK: f64 = 1e-9;

/// All scalar parameters of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Number of EN-UE pairs (N).
    pub pairs: usize,
    /// Library size in files (F).
    pub library_size: usize,
    /// Subfiles per file (L).
    pub subfiles: usize,
    /// File size in bits (S).
    pub file_bits: f64,
    /// Fractional caching capacity (mu), in [0, 1].
    pub cache_fraction: f64,
    /// Connectivity level (M): ENs jointly serving each UE.
    pub connectivity: usize,
    /// Multicast fronthaul capacity in bits/symbol (C).
    pub fronthaul_capacity: f64,
    /// Per-EN transmit power, in dB relative to unit noise power.
    pub snr_db: f64,
    /// Zipf popularity exponent (gamma).
    pub zipf_exponent: f64,
    /// Path-loss decay base (alpha), in (0, 1).
    pub path_loss: f64,
    /// Antennas per EN (nT).
    pub tx_antennas: usize,
    /// Antennas per UE (nR).
    pub rx_antennas: usize,
    /// Streams per UE (nS). `None` selects `min(M * nT, nR)`.
    pub streams: Option<usize>,
    pub solver: SolverParams,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            pairs: 4,
            library_size: 60,
            subfiles: 50,
            file_bits: 8e8,
            cache_fraction: 0.3,
            connectivity: 2,
            fronthaul_capacity: 2.0,
            snr_db: 20.0,
            zipf_exponent: 0.2,
            path_loss: 0.7,
            tx_antennas: 1,
            rx_antennas: 1,
            streams: None,
            solver: SolverParams::default(),
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pairs == 0 {
            return Err(Error::param("N", "must be a positive integer"));
        }
        if self.library_size == 0 {
            return Err(Error::param("F", "must be a positive integer"));
        }
        if self.subfiles == 0 {
            return Err(Error::param("L", "must be a positive integer"));
        }
        if !(self.file_bits.is_finite() && self.file_bits > 0.0) {
            return Err(Error::param("S", "must be positive and finite"));
        }
        if !(0.0..=1.0).contains(&self.cache_fraction) {
            return Err(Error::param(
                "mu",
                format!("{} is outside [0, 1]", self.cache_fraction),
            ));
        }
        if self.connectivity == 0 || self.connectivity > self.pairs {
            return Err(Error::param(
                "M",
                format!("{} is outside [1, N={}]", self.connectivity, self.pairs),
            ));
        }
        if !(self.fronthaul_capacity >= 0.0 && self.fronthaul_capacity.is_finite()) {
            return Err(Error::param("C", "must be non-negative and finite"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::param("P_dB", "must be finite"));
        }
        if !(self.zipf_exponent >= 0.0 && self.zipf_exponent.is_finite()) {
            return Err(Error::param("gamma", "must be non-negative and finite"));
        }
        if !(self.path_loss > 0.0 && self.path_loss < 1.0) {
            return Err(Error::param("alpha", "must lie in (0, 1)"));
        }
        if self.tx_antennas == 0 {
            return Err(Error::param("nT", "must be a positive integer"));
        }
        if self.rx_antennas == 0 {
            return Err(Error::param("nR", "must be a positive integer"));
        }
        if let Some(ns) = self.streams {
            let cap = (self.pairs * self.tx_antennas).min(self.rx_antennas);
            if ns == 0 || ns > cap {
                return Err(Error::param(
                    "nS",
                    format!("{ns} is outside [1, min(N*nT, nR)={cap}]"),
                ));
            }
        }
        self.solver.validate()
    }

    /// Subfile size S/L in bits.
    pub fn subfile_bits(&self) -> f64 {
        self.file_bits / self.subfiles as f64
    }

    /// Number of cached subfiles per file, floor(mu * L).
    pub fn cached_per_file(&self) -> usize {
        let raw = (self.cache_fraction * self.subfiles as f64 + FLOOR_SLACK).floor() as usize;
        raw.min(self.subfiles)
    }

    /// Cache capacity B = mu * F, in files.
    pub fn cache_capacity_files(&self) -> f64 {
        self.cache_fraction * self.library_size as f64
    }

    /// Linear per-EN power P.
    pub fn power(&self) -> f64 {
        db_to_linear(self.snr_db)
    }

    /// Effective number of streams per UE.
    pub fn stream_count(&self) -> usize {
        self.streams
            .unwrap_or_else(|| (self.connectivity * self.tx_antennas).min(self.rx_antennas))
    }

    /// Serving sets of all UEs, in UE order.
    pub fn serving_sets(&self) -> Result<Vec<Vec<usize>>> {
        (1..=self.pairs)
            .map(|k| serving_set(k, self.connectivity, self.pairs))
            .collect()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// ENs serving UE `k` at connectivity level `m` in a network of `n` pairs.
///
/// The window `k - floor((m-1)/2) ..= k + floor(m/2)` is shifted back inside
/// `[1, n]` near the edges, so every UE keeps exactly `m` serving ENs.
pub fn serving_set(k: usize, m: usize, n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::param("N", "must be a positive integer"));
    }
    if k == 0 || k > n {
        return Err(Error::param("k", format!("UE {k} is outside [1, {n}]")));
    }
    if m == 0 || m > n {
        return Err(Error::param("M", format!("{m} is outside [1, {n}]")));
    }
    let lo = k as i64 - ((m as i64 - 1) / 2);
    let hi = lo + m as i64 - 1;
    let start = if lo < 1 {
        1
    } else if hi > n as i64 {
        n as i64 - m as i64 + 1
    } else {
        lo
    } as usize;
    Ok((start..start + m).collect())
}

/// Zipf popularity law p(f) = c * f^-gamma over files 1..=F.
pub fn zipf_pmf(library_size: usize, exponent: f64) -> Result<Vec<f64>> {
    if library_size == 0 {
        return Err(Error::param("F", "must be a positive integer"));
    }
    if !(exponent >= 0.0 && exponent.is_finite()) {
        return Err(Error::param("gamma", "must be non-negative and finite"));
    }
    let weights: Vec<f64> = (1..=library_size)
        .map(|f| (f as f64).powf(-exponent))
        .collect();
    let norm: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / norm).collect())
}

/// The demand vector of one delivery slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Demand {
    files: Vec<usize>,
    requested: BTreeSet<usize>,
}

impl Demand {
    /// Builds a demand from 1-based file indices, one per UE.
    pub fn new(files: Vec<usize>) -> Self {
        let requested = files.iter().copied().collect();
        Demand { files, requested }
    }

    /// File requested by UE `k` (1-based).
    pub fn file_of(&self, k: usize) -> usize {
        self.files[k - 1]
    }

    pub fn files(&self) -> &[usize] {
        &self.files
    }

    /// Distinct requested files.
    pub fn requested(&self) -> &BTreeSet<usize> {
        &self.requested
    }
}

/// Draws `n` i.i.d. requests from `pmf` by inverse CDF.
pub fn sample_demand<R: Rng + ?Sized>(rng: &mut R, pmf: &[f64], n: usize) -> Demand {
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for p in pmf {
        acc += p;
        cdf.push(acc);
    }
    // Support ends at the last file with positive mass.
    let last = pmf.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let files = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let idx = cdf.partition_point(|&c| c <= u).min(last);
            idx + 1
        })
        .collect();
    Demand::new(files)
}

/// One realization of every EN-to-UE channel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pairs: usize,
    rx_antennas: usize,
    tx_antennas: usize,
    // Row-major over (UE, EN), 0-based.
    blocks: Vec<DMatrix<Complex64>>,
}

impl ChannelRealization {
    /// Builds a realization from `blocks[k][i]`, the nR x nT matrix from
    /// EN i+1 to UE k+1.
    pub fn from_blocks(blocks: Vec<Vec<DMatrix<Complex64>>>) -> Result<Self> {
        let pairs = blocks.len();
        if pairs == 0 {
            return Err(Error::param("H", "empty channel"));
        }
        let (rx, tx) = blocks[0]
            .first()
            .map(|b| b.shape())
            .ok_or_else(|| Error::param("H", "empty channel row"))?;
        let mut flat = Vec::with_capacity(pairs * pairs);
        for row in blocks {
            if row.len() != pairs {
                return Err(Error::param("H", "channel grid must be N x N"));
            }
            for b in row {
                if b.shape() != (rx, tx) {
                    return Err(Error::param("H", "inconsistent block dimensions"));
                }
                if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::param("H", "non-finite channel entry"));
                }
                flat.push(b);
            }
        }
        Ok(ChannelRealization {
            pairs,
            rx_antennas: rx,
            tx_antennas: tx,
            blocks: flat,
        })
    }

    /// Single-antenna channel from a gain grid `gains[k][i]`.
    pub fn scalar(gains: &[Vec<Complex64>]) -> Result<Self> {
        Self::from_blocks(
            gains
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&g| DMatrix::from_element(1, 1, g))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn rx_antennas(&self) -> usize {
        self.rx_antennas
    }

    pub fn tx_antennas(&self) -> usize {
        self.tx_antennas
    }

    /// Channel from EN `i` to UE `k` (both 1-based).
    pub fn block(&self, k: usize, i: usize) -> &DMatrix<Complex64> {
        &self.blocks[(k - 1) * self.pairs + (i - 1)]
    }

    /// The stacked channel H_k = [H_k1 ... H_kN] seen by UE `k` (1-based).
    pub fn ue_channel(&self, k: usize) -> DMatrix<Complex64> {
        self.columns_for(k, 1..=self.pairs)
    }

    /// Columns of H_k belonging to the given ENs, in the given order.
    pub fn columns_for(
        &self,
        k: usize,
        ens: impl IntoIterator<Item = usize>,
    ) -> DMatrix<Complex64> {
        let ens: Vec<usize> = ens.into_iter().collect();
        let nt = self.tx_antennas;
        let mut out = DMatrix::zeros(self.rx_antennas, ens.len() * nt);
        for (slot, &i) in ens.iter().enumerate() {
            out.view_mut((0, slot * nt), (self.rx_antennas, nt))
                .copy_from(self.block(k, i));
        }
        out
    }
}

/// Draws every entry of H_{k,i} as CN(0, alpha^|k-i|).
pub fn sample_channel<R: Rng + ?Sized>(rng: &mut R, cfg: &SystemConfig) -> ChannelRealization {
    let n = cfg.pairs;
    let (nr, nt) = (cfg.rx_antennas, cfg.tx_antennas);
    let mut blocks = Vec::with_capacity(n * n);
    for k in 0..n {
        for i in 0..n {
            let variance = cfg.path_loss.powi(k.abs_diff(i) as i32);
            let sd = (variance / 2.0).sqrt();
            let mut b = DMatrix::zeros(nr, nt);
            for r in 0..nr {
                for t in 0..nt {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    b[(r, t)] = Complex64::new(sd * re, sd * im);
                }
            }
            blocks.push(b);
        }
    }
    ChannelRealization {
        pairs: n,
        rx_antennas: nr,
        tx_antennas: nt,
        blocks,
    }
}
