//! Uniform time grids.
//!
//! Every sampled quantity in the crate (fields, squeezing factors, noise
//! patterns, delay scans) lives on a [`TimeGrid`]: `n` samples at
//! `t_k = t0 + k·dt`. Sample times are recomputed from `(t0, dt, k)` with
//! that exact expression everywhere, so two grids constructed from the same
//! numbers produce bit-identical time axes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of samples for a usable grid.
pub const MIN_SAMPLES: usize = 8;

/// A uniform time grid `t_k = t0 + k·dt`, `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    n: usize,
}

impl TimeGrid {
    /// Build a grid, validating `dt > 0` (finite) and `n >= 8`.
    ///
    /// Powers of two for `n` are preferred (FFT-heavy callers) but not
    /// required.
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !t0.is_finite() {
            return Err(Error::InvalidGrid(format!("t0 must be finite, got {t0}")));
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "dt must be positive and finite, got {dt}"
            )));
        }
        if n < MIN_SAMPLES {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_SAMPLES} samples, got {n}"
            )));
        }
        Ok(TimeGrid { t0, dt, n })
    }

    /// First sample time [s].
    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Sample spacing [s].
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 8 by construction
    }

    /// Time of sample `k` [s]; the one canonical expression `t0 + k·dt`.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + (k as f64) * self.dt
    }

    /// Last sample time [s].
    pub fn end(&self) -> f64 {
        self.time(self.n - 1)
    }

    /// Materialized time axis.
    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.time(k)).collect()
    }

    /// Total covered span `(n-1)·dt` [s].
    pub fn span(&self) -> f64 {
        (self.n - 1) as f64 * self.dt
    }

    /// Nyquist frequency `1/(2·dt)` [Hz].
    pub fn nyquist(&self) -> f64 {
        0.5 / self.dt
    }

    /// Frequency resolution of the implied DFT, `1/(n·dt)` [Hz].
    pub fn freq_resolution(&self) -> f64 {
        1.0 / (self.n as f64 * self.dt)
    }

    /// Whether `t` lies inside `[t0, end]` (inclusive).
    pub fn contains(&self, t: f64) -> bool {
        t >= self.t0 && t <= self.end()
    }

    /// Index of the grid sample nearest to `t` (clamped to the grid).
    pub fn nearest_index(&self, t: f64) -> usize {
        let raw = ((t - self.t0) / self.dt).round();
        raw.clamp(0.0, (self.n - 1) as f64) as usize
    }

    /// Error unless `other` has identical `(t0, dt, n)`.
    pub fn require_same(&self, other: &TimeGrid, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "{what}: ({}, {}, {}) vs ({}, {}, {})",
                self.t0, self.dt, self.n, other.t0, other.dt, other.n
            )));
        }
        Ok(())
    }
}

/// Free-function constructor mirroring the rest of the builder API.
pub fn make_grid(t0: f64, dt: f64, n: usize) -> Result<TimeGrid> {
    TimeGrid::new(t0, dt, n)
}
