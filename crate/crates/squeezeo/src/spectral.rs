//! FFT-based spectral operators on uniformly sampled series.
//!
//! The spectral time derivative multiplies DFT bin `k` by `i·ω_k` with
//! `ω_k = 2π·m/(n·dt)`, `m = k` for `k ≤ n/2` and `m = k − n` above, and
//! zeroes the (sign-ambiguous) Nyquist bin for even `n`. It is exact for
//! signals that are band-limited and periodic on the grid — which both the
//! synthesized transients (edge-suppressed envelopes) and the band-limited
//! vacuum ensembles are, to working precision.
//!
//! A second-order central finite-difference derivative is provided as an
//! operator-independent cross-check.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Cached FFT plans plus the derivative multipliers for one grid size.
///
/// Building plans is not free; propagation loops construct one of these and
/// reuse it for every realization and z-step. All methods take `&self`, so
/// one instance can be shared across rayon workers.
pub struct SpectralDiff {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Angular frequency per bin [rad/s], Nyquist already zeroed.
    omega: Vec<f64>,
}

impl SpectralDiff {
    pub fn new(grid: &TimeGrid) -> Self {
        let n = grid.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let omega = angular_freqs_for_derivative(n, grid.dt());
        SpectralDiff {
            n,
            forward,
            inverse,
            omega,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Angular frequency of bin `k` [rad/s] (Nyquist bin reads 0).
    pub fn omega(&self, k: usize) -> f64 {
        self.omega[k]
    }

    /// Forward DFT into a caller-provided complex buffer.
    pub fn forward(&self, series: &[f64], out: &mut Vec<Complex<f64>>) {
        out.clear();
        out.extend(series.iter().map(|&x| Complex::new(x, 0.0)));
        self.forward.process(out);
    }

    /// Unnormalized inverse DFT in place; caller divides by n when needed.
    pub fn inverse_inplace(&self, buf: &mut [Complex<f64>]) {
        self.inverse.process(buf);
    }

    /// Forward DFT in place (buffer already complex).
    pub fn forward_inplace(&self, buf: &mut [Complex<f64>]) {
        self.forward.process(buf);
    }

    /// Multiply each bin by `i·ω_k` (time-derivative in the frequency
    /// domain).
    pub fn apply_derivative_multiplier(&self, buf: &mut [Complex<f64>]) {
        for (k, v) in buf.iter_mut().enumerate() {
            let w = self.omega[k];
            *v = Complex::new(-v.im * w, v.re * w);
        }
    }

    /// Spectral derivative of a real series.
    pub fn derivative(&self, series: &[f64]) -> Result<Vec<f64>> {
        if series.len() != self.n {
            return Err(Error::GridMismatch(format!(
                "series length {} vs grid length {}",
                series.len(),
                self.n
            )));
        }
        let mut buf: Vec<Complex<f64>> = Vec::with_capacity(self.n);
        self.forward(series, &mut buf);
        self.apply_derivative_multiplier(&mut buf);
        self.inverse_inplace(&mut buf);
        let scale = 1.0 / self.n as f64;
        Ok(buf.iter().map(|v| v.re * scale).collect())
    }
}

/// `i·ω` multiplier table: standard DFT ordering, Nyquist zeroed for even n.
fn angular_freqs_for_derivative(n: usize, dt: f64) -> Vec<f64> {
    let df = 1.0 / (n as f64 * dt);
    (0..n)
        .map(|k| {
            if n % 2 == 0 && k == n / 2 {
                0.0 // Nyquist: derivative sign is ambiguous, drop it
            } else if k <= n / 2 {
                2.0 * std::f64::consts::PI * (k as f64) * df
            } else {
                2.0 * std::f64::consts::PI * ((k as f64) - (n as f64)) * df
            }
        })
        .collect()
}

/// Second-order finite-difference derivative: central in the interior,
/// one-sided (still O(dt²)) at the two edges.
pub fn finite_difference_derivative(series: &[f64], grid: &TimeGrid) -> Result<Vec<f64>> {
    let n = grid.len();
    if series.len() != n {
        return Err(Error::GridMismatch(format!(
            "series length {} vs grid length {}",
            series.len(),
            n
        )));
    }
    let dt = grid.dt();
    let inv2dt = 1.0 / (2.0 * dt);
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * series[0] + 4.0 * series[1] - series[2]) * inv2dt;
    for k in 1..n - 1 {
        d[k] = (series[k + 1] - series[k - 1]) * inv2dt;
    }
    d[n - 1] = (3.0 * series[n - 1] - 4.0 * series[n - 2] + series[n - 3]) * inv2dt;
    Ok(d)
}

/// Amplitude-weighted mean frequency of the positive-frequency spectrum
/// [Hz]: centroid of |DFT| over bins `0..=n/2`.
pub fn spectrum_centroid(series: &[f64], grid: &TimeGrid) -> Result<f64> {
    let n = grid.len();
    if series.len() != n {
        return Err(Error::GridMismatch(format!(
            "series length {} vs grid length {}",
            series.len(),
            n
        )));
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex<f64>> = series.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft.process(&mut buf);
    let df = grid.freq_resolution();
    let mut wsum = 0.0;
    let mut fsum = 0.0;
    for (k, v) in buf.iter().enumerate().take(n / 2 + 1) {
        let a = v.norm();
        wsum += a;
        fsum += a * (k as f64) * df;
    }
    if wsum == 0.0 {
        return Err(Error::InvalidParam(
            "spectrum centroid of an identically zero series".into(),
        ));
    }
    Ok(fsum / wsum)
}
