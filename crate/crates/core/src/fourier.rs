//! Fourier projection on a uniform periodic grid and Parseval rms checks.
//!
//! All periodic waveforms in this crate are sampled at the half-offset grid
//! θ_k = 2π(k+0.5)/N. On that grid the Nyquist cosine vanishes identically,
//! so the full projection (orders 1..N/2−1 plus the alternating Nyquist sine
//! for even N) satisfies the discrete Parseval identity exactly; the
//! coefficient-space rms then doubles as an independent check of the time
//! quadrature.

use serde::Serialize;

use crate::error::{Error, Result};

/// Uniform half-offset sample grid over one period.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (k as f64 + 0.5) * std::f64::consts::TAU / n as f64)
        .collect()
}

/// Truncated Fourier series of a real periodic sample sequence.
///
/// `cos[m-1]`/`sin[m-1]` hold the order-m coefficients of
/// `x(θ) ≈ dc + Σ cos[m-1]·cos(mθ) + sin[m-1]·sin(mθ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub dc: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl Spectrum {
    pub fn order(&self) -> usize {
        self.cos.len()
    }

    /// Magnitude of the order-n harmonic (n ≥ 1).
    pub fn magnitude(&self, n: usize) -> f64 {
        let c = self.cos[n - 1];
        let s = self.sin[n - 1];
        (c * c + s * s).sqrt()
    }

    /// Phase φ̃_n of the order-n harmonic written as γ_n·cos(nθ + φ̃_n).
    pub fn phase(&self, n: usize) -> f64 {
        (-self.sin[n - 1]).atan2(self.cos[n - 1])
    }

    /// Parseval rms of the truncated series.
    pub fn rms(&self) -> f64 {
        let mut total = self.dc * self.dc;
        for m in 0..self.cos.len() {
            total += (self.cos[m] * self.cos[m] + self.sin[m] * self.sin[m]) / 2.0;
        }
        total.sqrt()
    }
}

/// Projects `samples` (taken on `theta_grid(samples.len())`) onto harmonics
/// 1..=order. Uniform-grid quadrature; on a periodic grid the rectangle and
/// trapezoid rules coincide.
pub fn project(samples: &[f64], order: usize) -> Result<Spectrum> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::domain("projection needs at least 2 samples"));
    }
    if order >= n {
        return Err(Error::domain(format!(
            "projection order {order} exceeds what {n} samples resolve"
        )));
    }
    let theta = theta_grid(n);
    let cos1: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
    let sin1: Vec<f64> = theta.iter().map(|t| t.sin()).collect();

    let dc = samples.iter().sum::<f64>() / n as f64;
    let mut cos_coeffs = Vec::with_capacity(order);
    let mut sin_coeffs = Vec::with_capacity(order);

    let mut cm = cos1.clone();
    let mut sm = sin1.clone();
    for m in 1..=order {
        if m > 1 {
            for k in 0..n {
                let c = cm[k] * cos1[k] - sm[k] * sin1[k];
                let s = sm[k] * cos1[k] + cm[k] * sin1[k];
                cm[k] = c;
                sm[k] = s;
            }
        }
        let mut cacc = 0.0;
        let mut sacc = 0.0;
        for k in 0..n {
            cacc += samples[k] * cm[k];
            sacc += samples[k] * sm[k];
        }
        cos_coeffs.push(2.0 * cacc / n as f64);
        sin_coeffs.push(2.0 * sacc / n as f64);
    }
    Ok(Spectrum {
        dc,
        cos: cos_coeffs,
        sin: sin_coeffs,
    })
}

/// Time-domain rms by direct quadrature.
pub fn time_rms(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    (samples.iter().map(|x| x * x).sum::<f64>() / n).sqrt()
}

/// Coefficient-space rms of the full resolvable projection: orders up to
/// ⌊(N−1)/2⌋ plus, for even N, the alternating Nyquist-sine component.
pub fn full_parseval_rms(samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    let spectrum = project(samples, (n - 1) / 2)?;
    let mut total = spectrum.rms().powi(2);
    if n % 2 == 0 {
        let nyq = samples
            .iter()
            .enumerate()
            .map(|(k, x)| if k % 2 == 0 { *x } else { -*x })
            .sum::<f64>()
            / n as f64;
        total += nyq * nyq;
    }
    Ok(total.sqrt())
}
