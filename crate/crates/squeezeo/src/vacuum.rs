//! Bare vacuum-field statistics and Gaussian vacuum ensembles.
//!
//! The rms vacuum field probed by a gating pulse focused to waist `w` for a
//! window `Δt` inside a crystal of group index `n` is
//!
//! `ΔE_vac = sqrt( ħ / (ε₀ · ΔxΔy · Δz · Δt) )`,
//!
//! with transverse area `ΔxΔy = π·w²` and longitudinal extent
//! `Δz = c·Δt/n`. The product `ΔE_vac²·ε₀·ΔxΔy·Δz·Δt = ħ` is the
//! uncertainty-style invariant every [`VacuumStats`] instance carries by
//! construction.
//!
//! Monte Carlo realizations model the vacuum as a stationary Gaussian
//! process, spectrally flat over `(0, band_limit]` and zero outside, with
//! per-sample standard deviation exactly `ΔE_vac` in expectation. Rows are
//! synthesized in the frequency domain from per-realization ChaCha8 streams
//! (`seed` fixes the key, the realization index selects the stream), so the
//! ensemble is bit-reproducible regardless of how many threads build it.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::constants::PhysConstants;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::waveform::ProbeParams;

/// Maximum realization count accepted by the CSV exporter; bigger
/// ensembles belong in the binary format.
pub const CSV_MAX_REALIZATIONS: usize = 256;

/// Magic bytes opening the flat binary ensemble format.
pub const ENSEMBLE_MAGIC: [u8; 8] = *b"SQZENS1\0";

/// How a probe duration maps onto the temporal window Δt of the probed
/// space-time segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthConvention {
    /// Δt is the intensity-envelope FWHM itself (default).
    #[default]
    Fwhm,
    /// Δt is the rms width of the intensity envelope: FWHM / (2·sqrt(2 ln2)).
    Rms,
    /// Δt is the equivalent width ∫I dt / I_peak: FWHM · sqrt(π / (4 ln2)).
    Integral,
}

impl WidthConvention {
    /// Effective Δt [s] for a Gaussian intensity envelope of the given FWHM.
    pub fn effective_window(&self, fwhm: f64) -> f64 {
        match self {
            WidthConvention::Fwhm => fwhm,
            WidthConvention::Rms => fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt()),
            WidthConvention::Integral => {
                fwhm * (std::f64::consts::PI / (4.0 * std::f64::consts::LN_2)).sqrt()
            }
        }
    }
}

/// The probed space-time volume element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeSegment {
    /// Transverse area ΔxΔy [m²].
    pub dx_dy: f64,
    /// Longitudinal extent Δz [m].
    pub dz: f64,
    /// Temporal window Δt [s].
    pub dt: f64,
}

/// Vacuum rms amplitude together with the segment it refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VacuumStats {
    /// Vacuum rms field ΔE_vac [V/m].
    pub delta_e_vac: f64,
    pub segment: SpaceTimeSegment,
}

impl VacuumStats {
    /// Relative residual of the invariant
    /// `ΔE_vac²·ε₀·ΔxΔy·Δz·Δt / ħ − 1`; zero up to roundoff for any
    /// instance built by this module.
    pub fn product_residual(&self, consts: &PhysConstants) -> f64 {
        let product = self.delta_e_vac * self.delta_e_vac
            * consts.eps0
            * self.segment.dx_dy
            * self.segment.dz
            * self.segment.dt;
        product / consts.hbar - 1.0
    }
}

/// Vacuum amplitude for a probe focus, from the segment geometry.
///
/// `ΔxΔy = π·w²`, `Δz = c·Δt/n`, `Δt` per the width convention.
pub fn vacuum_amplitude(
    probe: &ProbeParams,
    consts: &PhysConstants,
    convention: WidthConvention,
) -> Result<VacuumStats> {
    let dt = convention.effective_window(probe.duration);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParam(format!(
            "probe window must be positive, got {dt}"
        )));
    }
    let dx_dy = std::f64::consts::PI * probe.waist * probe.waist;
    let dz = consts.c * dt / probe.group_index;
    let delta_e_vac = (consts.hbar / (consts.eps0 * dx_dy * dz * dt)).sqrt();
    Ok(VacuumStats {
        delta_e_vac,
        segment: SpaceTimeSegment { dx_dy, dz, dt },
    })
}

/// Build stats around a prescribed ΔE_vac (e.g. an experimentally quoted
/// 24 V/cm) by back-solving the transverse area of a synthetic segment, so
/// the ħ-product invariant holds by construction.
pub fn make_reference_vacuum(delta_e_vac: f64, consts: &PhysConstants) -> Result<VacuumStats> {
    if !(delta_e_vac.is_finite() && delta_e_vac > 0.0) {
        return Err(Error::InvalidParam(format!(
            "ΔE_vac must be positive, got {delta_e_vac}"
        )));
    }
    // Representative few-fs / few-µm scales; only the product matters.
    let dt = 1e-14;
    let dz = 1e-6;
    let dx_dy = consts.hbar / (delta_e_vac * delta_e_vac * consts.eps0 * dz * dt);
    Ok(VacuumStats {
        delta_e_vac,
        segment: SpaceTimeSegment { dx_dy, dz, dt },
    })
}

/// Deterministic generator of band-limited vacuum rows.
///
/// Row `i` is synthesized from DFT bins `1..=k_max` (DC and Nyquist stay
/// empty) with i.i.d. complex-Gaussian coefficients drawn from ChaCha8
/// stream `i`, scaled so each time sample has variance `ΔE_vac²` exactly in
/// expectation. One inverse FFT per row.
pub struct VacuumSampler {
    grid: TimeGrid,
    target_rms: f64,
    seed: u64,
    k_max: usize,
    /// Spectrum amplitude α = σ·n / (2·sqrt(k_max)).
    alpha: f64,
    inverse: std::sync::Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl VacuumSampler {
    pub fn new(
        grid: &TimeGrid,
        stats: &VacuumStats,
        band_limit: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(band_limit.is_finite() && band_limit > 0.0) {
            return Err(Error::BandLimit {
                band_thz: band_limit / 1e12,
                reason: "band limit must be positive".into(),
            });
        }
        if band_limit >= grid.nyquist() {
            return Err(Error::BandLimit {
                band_thz: band_limit / 1e12,
                reason: format!(
                    "band limit must stay below the grid Nyquist frequency {:.3} THz",
                    grid.nyquist() / 1e12
                ),
            });
        }
        let k_max = ((band_limit / grid.freq_resolution()).floor() as usize).min(grid.len() / 2 - 1);
        if k_max < 1 {
            return Err(Error::BandLimit {
                band_thz: band_limit / 1e12,
                reason: format!(
                    "band narrower than the grid's frequency resolution {:.3} THz; \
                     lengthen the window",
                    grid.freq_resolution() / 1e12
                ),
            });
        }
        let n = grid.len();
        let alpha = stats.delta_e_vac * (n as f64) / (2.0 * (k_max as f64).sqrt());
        let mut planner = FftPlanner::new();
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = inverse.get_inplace_scratch_len();
        Ok(VacuumSampler {
            grid: *grid,
            target_rms: stats.delta_e_vac,
            seed,
            k_max,
            alpha,
            inverse,
            scratch_len,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn target_rms(&self) -> f64 {
        self.target_rms
    }

    /// Highest populated DFT bin.
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Fill `out` with realization `index`, reusing caller-owned buffers
    /// (hot-loop form; `row` is the allocating convenience).
    pub fn fill_row(
        &self,
        index: usize,
        spectrum: &mut Vec<Complex<f64>>,
        scratch: &mut Vec<Complex<f64>>,
        out: &mut [f64],
    ) {
        let n = self.grid.len();
        debug_assert_eq!(out.len(), n);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);

        spectrum.clear();
        spectrum.resize(n, Complex::new(0.0, 0.0));
        for k in 1..=self.k_max {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            spectrum[k] = Complex::new(self.alpha * a, self.alpha * b);
            spectrum[n - k] = Complex::new(self.alpha * a, -self.alpha * b);
        }
        scratch.resize(self.scratch_len, Complex::new(0.0, 0.0));
        self.inverse.process_with_scratch(spectrum, scratch);
        let inv_n = 1.0 / n as f64;
        for (o, s) in out.iter_mut().zip(spectrum.iter()) {
            *o = s.re * inv_n;
        }
    }

    /// Allocate and return realization `index`.
    pub fn row(&self, index: usize) -> Vec<f64> {
        let mut spectrum = Vec::new();
        let mut scratch = Vec::new();
        let mut out = vec![0.0; self.grid.len()];
        self.fill_row(index, &mut spectrum, &mut scratch, &mut out);
        out
    }
}

/// A materialized ensemble of field realizations (row-major `m × n`).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldEnsemble {
    pub grid: TimeGrid,
    /// Row-major samples [V/m]: realization `i`, time sample `k` at
    /// `data[i·n + k]`.
    data: Vec<f64>,
    m: usize,
    /// Seed the ensemble was drawn from (provenance).
    pub seed: u64,
    /// Per-sample rms the ensemble was constructed to have [V/m].
    pub target_rms: f64,
}

impl FieldEnsemble {
    pub fn from_rows(
        grid: TimeGrid,
        data: Vec<f64>,
        seed: u64,
        target_rms: f64,
    ) -> Result<Self> {
        let n = grid.len();
        if n == 0 || data.len() % n != 0 || data.is_empty() {
            return Err(Error::GridMismatch(format!(
                "ensemble data length {} is not a positive multiple of grid length {n}",
                data.len()
            )));
        }
        let m = data.len() / n;
        Ok(FieldEnsemble {
            grid,
            data,
            m,
            seed,
            target_rms,
        })
    }

    /// Number of realizations.
    pub fn realizations(&self) -> usize {
        self.m
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.grid.len();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.grid.len())
    }

    pub fn rows_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.data.chunks_mut(self.grid.len())
    }

    /// Parallel iterator over rows (disjoint mutable chunks: results are
    /// independent of the thread count by construction).
    pub fn par_rows_mut(&mut self) -> rayon::slice::ChunksMut<'_, f64> {
        self.data.par_chunks_mut(self.grid.len())
    }

    /// Per-column rms about zero (the ensemble mean is zero by
    /// construction, so no mean subtraction).
    pub fn column_rms(&self) -> Vec<f64> {
        let n = self.grid.len();
        let mut sums = vec![0.0f64; n];
        for row in self.rows() {
            for (s, &x) in sums.iter_mut().zip(row) {
                *s += x * x;
            }
        }
        let inv_m = 1.0 / self.m as f64;
        sums.iter().map(|&s| (s * inv_m).sqrt()).collect()
    }

    /// Per-column ensemble mean.
    pub fn column_mean(&self) -> Vec<f64> {
        let n = self.grid.len();
        let mut sums = vec![0.0f64; n];
        for row in self.rows() {
            for (s, &x) in sums.iter_mut().zip(row) {
                *s += x;
            }
        }
        let inv_m = 1.0 / self.m as f64;
        sums.iter_mut().for_each(|s| *s *= inv_m);
        sums
    }

    /// Flat binary export: 8-byte magic, u64 m, u64 n, f64 dt, f64 t0
    /// (little-endian), then m·n row-major f64 samples.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(&ENSEMBLE_MAGIC)?;
        w.write_all(&(self.m as u64).to_le_bytes())?;
        w.write_all(&(self.grid.len() as u64).to_le_bytes())?;
        w.write_all(&self.grid.dt().to_le_bytes())?;
        w.write_all(&self.grid.t0().to_le_bytes())?;
        for &x in &self.data {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    /// Read the binary format back (inverse of [`write_binary`]; seed and
    /// target rms are not part of the format and are zeroed).
    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let io_err = |e: std::io::Error| Error::io("<ensemble stream>", e);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io_err)?;
        if magic != ENSEMBLE_MAGIC {
            return Err(Error::DataFormat {
                path: "<ensemble stream>".into(),
                reason: "bad magic bytes".into(),
            });
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8).map_err(io_err)?;
        let m = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8).map_err(io_err)?;
        let n = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8).map_err(io_err)?;
        let dt = f64::from_le_bytes(b8);
        r.read_exact(&mut b8).map_err(io_err)?;
        let t0 = f64::from_le_bytes(b8);
        let grid = TimeGrid::new(t0, dt, n)?;
        let mut data = vec![0.0f64; m * n];
        for x in data.iter_mut() {
            r.read_exact(&mut b8).map_err(io_err)?;
            *x = f64::from_le_bytes(b8);
        }
        FieldEnsemble::from_rows(grid, data, 0, 0.0)
    }

    /// CSV export for small ensembles: `t_fs` then one column per
    /// realization. Errors above [`CSV_MAX_REALIZATIONS`] rows.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        if self.m > CSV_MAX_REALIZATIONS {
            return Err(Error::InvalidParam(format!(
                "{} realizations is too many for CSV (limit {}); use the binary format",
                self.m, CSV_MAX_REALIZATIONS
            )));
        }
        let werr = |e: std::io::Error| Error::io("<ensemble csv>", e);
        write!(w, "t_fs").map_err(werr)?;
        for i in 0..self.m {
            write!(w, ",r{i}").map_err(werr)?;
        }
        writeln!(w).map_err(werr)?;
        for k in 0..self.grid.len() {
            write!(w, "{:.11e}", self.grid.time(k) / 1e-15).map_err(werr)?;
            for i in 0..self.m {
                write!(w, ",{:.11e}", self.row(i)[k]).map_err(werr)?;
            }
            writeln!(w).map_err(werr)?;
        }
        Ok(())
    }
}

/// Draw `m` band-limited vacuum realizations (see [`VacuumSampler`] for the
/// determinism contract).
pub fn sample_vacuum_ensemble(
    grid: &TimeGrid,
    stats: &VacuumStats,
    m: usize,
    seed: u64,
    band_limit: f64,
) -> Result<FieldEnsemble> {
    if m == 0 {
        return Err(Error::InvalidParam("need at least one realization".into()));
    }
    let sampler = VacuumSampler::new(grid, stats, band_limit, seed)?;
    let n = grid.len();
    let mut data = vec![0.0f64; m * n];
    data.par_chunks_mut(n).enumerate().for_each_init(
        || (Vec::new(), Vec::new()),
        |(spectrum, scratch), (i, row)| {
            sampler.fill_row(i, spectrum, scratch, row);
        },
    );
    FieldEnsemble::from_rows(*grid, data, seed, stats.delta_e_vac)
}

/// Variance-level vacuum admixture: each output row is
/// `sqrt(η)·row + sqrt(1−η)·fresh`, with `fresh` an independent vacuum
/// realization drawn from `fresh_seed`. Models scalar contamination of the
/// squeezed field by unsqueezed vacuum (η = 1 returns a plain copy).
pub fn admix_vacuum(
    ensemble: &FieldEnsemble,
    eta: f64,
    stats: &VacuumStats,
    band_limit: f64,
    fresh_seed: u64,
) -> Result<FieldEnsemble> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParam(format!(
            "contamination η must lie in [0, 1], got {eta}"
        )));
    }
    let sampler = VacuumSampler::new(&ensemble.grid, stats, band_limit, fresh_seed)?;
    let n = ensemble.grid.len();
    let (weight_old, weight_new) = (eta.sqrt(), (1.0 - eta).sqrt());
    let mut data = vec![0.0f64; ensemble.realizations() * n];
    data.par_chunks_mut(n).enumerate().for_each_init(
        || (Vec::new(), Vec::new(), vec![0.0f64; n]),
        |(spectrum, scratch, fresh), (i, out)| {
            sampler.fill_row(i, spectrum, scratch, fresh);
            for ((o, &x), &v) in out.iter_mut().zip(ensemble.row(i)).zip(fresh.iter()) {
                *o = weight_old * x + weight_new * v;
            }
        },
    );
    FieldEnsemble::from_rows(ensemble.grid, data, ensemble.seed, stats.delta_e_vac)
}
