use std::f64::consts::LN_2;

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ChannelRealization;

use super::PrecoderSet;

pub type CMat = DMatrix<Complex64>;

/// log2 det of a Hermitian positive-definite matrix, by Cholesky.
pub(crate) fn log2det(m: CMat) -> Option<f64> {
    let chol = Cholesky::new(m)?;
    let l = chol.l_dirty();
    let ln: f64 = (0..l.nrows()).map(|i| l[(i, i)].re.ln()).sum();
    Some(2.0 * ln / LN_2)
}

/// log2 det and inverse of a Hermitian positive-definite matrix.
pub(crate) fn log2det_inv(m: CMat) -> Option<(f64, CMat)> {
    let chol = Cholesky::new(m)?;
    let l = chol.l_dirty();
    let ln: f64 = (0..l.nrows()).map(|i| l[(i, i)].re.ln()).sum();
    Some((2.0 * ln / LN_2, chol.inverse()))
}

/// Real part of tr(A B) without forming the product.
pub(crate) fn trace_product_re(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..a.ncols() {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// phi(A, B) = log2 det(A + B) - log2 det(B), the rate of a Gaussian
/// signal with covariance A in Gaussian noise of covariance B.
pub fn phi(a: &CMat, b: &CMat) -> Result<f64> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::param(
            "phi",
            "A and B must be square with equal dimensions",
        ));
    }
    let noise = log2det(b.clone())
        .ok_or_else(|| Error::Numeric("phi: B is not positive definite".into()))?;
    let total = log2det(a + b)
        .ok_or_else(|| Error::Numeric("phi: A + B is not positive definite".into()))?;
    Ok((total - noise).max(0.0))
}

/// Rate of UE `k` (1-based) under `prec`, treating interference as noise.
pub fn user_rate(k: usize, prec: &PrecoderSet, ch: &ChannelRealization) -> f64 {
    let h = ch.ue_channel(k);
    let nr = h.nrows();
    let mut signal = CMat::zeros(nr, nr);
    let mut noise = CMat::identity(nr, nr);
    for l in 1..=prec.users() {
        let hv = &h * prec.full(l);
        let cov = &hv * hv.adjoint();
        if l == k {
            signal = cov;
        } else {
            noise += cov;
        }
    }
    phi(&signal, &noise).expect("interference-plus-noise covariance is at least the identity")
}
