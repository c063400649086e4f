//! Coherent mid-infrared transients and the parameter sets that shape them.
//!
//! Two generators are provided:
//!
//! * [`synthesize_transient`] — a carrier-envelope-phase-controlled
//!   few-cycle pulse `E(t) = gain·W·exp(−2 ln2 (t/τ)²)·cos(2π f₀ t + φ)`,
//!   the analytic stand-in for a phase-locked field transient of pump
//!   energy `W`;
//! * [`optical_rectification`] — the second time derivative of a Gaussian
//!   intensity envelope, the far-field waveform radiated by rectifying a
//!   short pump in a thin χ⁽²⁾ crystal. CEP-stable by construction (no
//!   carrier phase enters).
//!
//! Both validate that the envelope actually fits the grid (edge amplitude
//! below [`EDGE_TOLERANCE`] of the peak) and that the carrier is resolved.
//! Fields are in V/m, times in seconds.

use serde::{Deserialize, Serialize};

use crate::constants::units::{PM_PER_V, THZ, UM};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::spectral::{finite_difference_derivative, SpectralDiff};

/// Envelope must decay below this fraction of its peak at the grid edges.
pub const EDGE_TOLERANCE: f64 = 1e-6;

/// Which derivative operator acts on sampled series.
///
/// `Spectral` is the default everywhere (exact for band-limited periodic
/// series); `FiniteDifference` is the O(dt²) cross-check. Whatever a caller
/// picks must be used consistently across f(t), Δn(t) and propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivMode {
    #[default]
    Spectral,
    FiniteDifference,
}

/// A sampled phase-stable field transient.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentTransient {
    /// Sampling grid (co-moving time).
    pub grid: TimeGrid,
    /// Field samples [V/m]; real by construction.
    pub field: Vec<f64>,
    /// Carrier (or characteristic) frequency [Hz].
    pub center_freq: f64,
    /// Carrier-envelope phase [rad] (0 for rectification waveforms).
    pub cep: f64,
    /// Pump energy that produced the transient [J].
    pub pump_energy: f64,
}

impl CoherentTransient {
    /// Wrap raw samples, enforcing the edge-suppression invariant.
    pub fn from_samples(
        grid: TimeGrid,
        field: Vec<f64>,
        center_freq: f64,
        cep: f64,
        pump_energy: f64,
    ) -> Result<Self> {
        if field.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "field length {} vs grid length {}",
                field.len(),
                grid.len()
            )));
        }
        let peak = field.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if peak > 0.0 {
            let edge = field[0].abs().max(field[field.len() - 1].abs());
            let ratio = edge / peak;
            if ratio >= EDGE_TOLERANCE {
                return Err(Error::EdgeLeakage {
                    edge_ratio: ratio,
                    tolerance: EDGE_TOLERANCE,
                });
            }
        }
        Ok(CoherentTransient {
            grid,
            field,
            center_freq,
            cep,
            pump_energy,
        })
    }

    /// Largest |E| on the grid [V/m].
    pub fn peak_field(&self) -> f64 {
        self.field.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    /// Time derivative of the field [V/m/s] with the chosen operator.
    pub fn derivative(&self, mode: DerivMode) -> Result<Vec<f64>> {
        time_derivative(&self.field, &self.grid, mode)
    }
}

/// Grid-free description of a transient's shape; used as the template for
/// gain calibration and scenario sweeps (energy and gain supplied per use).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransientSpec {
    /// Carrier frequency [Hz].
    pub center_freq: f64,
    /// Carrier-envelope phase [rad].
    pub cep: f64,
    /// Intensity-envelope FWHM [s].
    pub env_fwhm: f64,
}

impl TransientSpec {
    /// Synthesize on a grid at the given pump energy and gain.
    pub fn synthesize(
        &self,
        grid: &TimeGrid,
        pump_energy: f64,
        gain: f64,
    ) -> Result<CoherentTransient> {
        synthesize_transient(
            grid,
            pump_energy,
            self.cep,
            self.center_freq,
            self.env_fwhm,
            gain,
        )
    }
}

/// Gating probe pulse: duration, focus size and the group index of the
/// detection crystal it propagates through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    /// Probe intensity-envelope duration [s]; interpreted through a
    /// width-convention choice where a single temporal window is needed.
    pub duration: f64,
    /// Gaussian beam waist (1/e² intensity radius) [m].
    pub waist: f64,
    /// Group refractive index in the detection crystal (sets the probed
    /// longitudinal extent Δz = c·Δt/n).
    pub group_index: f64,
}

impl ProbeParams {
    pub fn new(duration: f64, waist: f64, group_index: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidParam(format!(
                "probe duration must be positive, got {duration}"
            )));
        }
        if !(waist.is_finite() && waist > 0.0) {
            return Err(Error::InvalidParam(format!(
                "probe waist must be positive, got {waist}"
            )));
        }
        if !(group_index.is_finite() && group_index >= 1.0) {
            return Err(Error::InvalidParam(format!(
                "group index must be ≥ 1, got {group_index}"
            )));
        }
        Ok(ProbeParams {
            duration,
            waist,
            group_index,
        })
    }

    /// The 5.8 fs / 3.6 µm few-cycle probe used by the bundled scenarios.
    pub fn few_cycle() -> Self {
        ProbeParams {
            duration: 5.8e-15,
            waist: 3.6 * UM,
            group_index: 2.6,
        }
    }
}

/// Electro-optic crystal parameters for generation/propagation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrystalParams {
    /// Effective second-order coefficient [m/V], signed. The default sign
    /// convention is d_eff < 0, which puts noise maxima on the maximally
    /// negative slopes of the driving field.
    pub d_eff: f64,
    /// Refractive index at the relevant band (dimensionless).
    pub n: f64,
    /// Propagation length [m].
    pub length: f64,
    /// Human-readable material tag for provenance headers.
    pub label: String,
}

impl CrystalParams {
    pub fn new(d_eff: f64, n: f64, length: f64, label: impl Into<String>) -> Result<Self> {
        if !d_eff.is_finite() || d_eff == 0.0 {
            return Err(Error::InvalidParam(format!(
                "d_eff must be finite and nonzero, got {d_eff}"
            )));
        }
        if !(n.is_finite() && n >= 1.0) {
            return Err(Error::InvalidParam(format!(
                "refractive index must be ≥ 1, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParam(format!(
                "crystal length must be positive, got {length}"
            )));
        }
        Ok(CrystalParams {
            d_eff,
            n,
            length,
            label: label.into(),
        })
    }

    /// Thin gallium selenide emitter: 16 µm, n = 2.6, d_eff = −54 pm/V
    /// (literature-scale magnitude; the calibrated gain absorbs any
    /// amplitude rescaling, so only the sign is load-bearing).
    pub fn gase_16um() -> Self {
        CrystalParams {
            d_eff: -54.0 * PM_PER_V,
            n: 2.6,
            length: 16.0 * UM,
            label: "GaSe".into(),
        }
    }
}

/// Reduce a carrier-envelope phase modulo π with an explicit sign factor:
/// a flip by π becomes a pure sign on the carrier instead of a phase the
/// cosine must resolve, so flipped twins are negations of each other to
/// roundoff — and bitwise-exact negations whenever the shifted phase is
/// exactly representable (as for the 0 ↔ π pair; a generic `cep + π` sum
/// rounds, which moves the residual phase by ~1 ulp).
fn reduce_cep(cep: f64) -> (f64, f64) {
    let half_turns = (cep / std::f64::consts::PI).round();
    let residual = cep - half_turns * std::f64::consts::PI;
    let sign = if (half_turns as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    (residual, sign)
}

/// Phase-locked few-cycle transient.
///
/// `E(t) = gain·pump_energy·exp(−2 ln2 (t/env_fwhm)²)·cos(2π f₀ t + cep)`.
/// `gain` is the field-per-pump-energy scale [V/m per J]; the field is
/// exactly linear in `gain·pump_energy`, and `cep → cep + π` negates every
/// sample exactly.
pub fn synthesize_transient(
    grid: &TimeGrid,
    pump_energy: f64,
    cep: f64,
    center_freq: f64,
    env_fwhm: f64,
    gain: f64,
) -> Result<CoherentTransient> {
    if !(pump_energy.is_finite() && pump_energy >= 0.0) {
        return Err(Error::InvalidParam(format!(
            "pump energy must be ≥ 0, got {pump_energy}"
        )));
    }
    if !(center_freq.is_finite() && center_freq > 0.0) {
        return Err(Error::InvalidParam(format!(
            "center frequency must be positive, got {center_freq}"
        )));
    }
    if !(env_fwhm.is_finite() && env_fwhm > 0.0) {
        return Err(Error::InvalidParam(format!(
            "envelope FWHM must be positive, got {env_fwhm}"
        )));
    }
    if !cep.is_finite() || !gain.is_finite() {
        return Err(Error::InvalidParam(
            "cep and gain must be finite".to_string(),
        ));
    }
    // Carrier must be resolved: at least 2 samples per cycle.
    let samples_per_cycle = 1.0 / (center_freq * grid.dt());
    if samples_per_cycle <= 2.0 {
        return Err(Error::GridTooCoarse {
            samples_per_cycle,
            freq_thz: center_freq / THZ,
            required: 2.0,
        });
    }

    let times = grid.times();
    let decay = 2.0 * std::f64::consts::LN_2 / (env_fwhm * env_fwhm);
    let envelope: Vec<f64> = times.iter().map(|&t| (-decay * t * t).exp()).collect();
    check_envelope_edges(&envelope)?;

    let (cep_r, sign) = reduce_cep(cep);
    let w = 2.0 * std::f64::consts::PI * center_freq;
    let amplitude = gain * pump_energy;
    let field: Vec<f64> = times
        .iter()
        .zip(&envelope)
        .map(|(&t, &env)| amplitude * env * (sign * (w * t + cep_r).cos()))
        .collect();

    Ok(CoherentTransient {
        grid: *grid,
        field,
        center_freq,
        cep,
        pump_energy,
    })
}

/// Far-field optical-rectification waveform: normalized second time
/// derivative of a Gaussian intensity envelope,
/// `E(t) = gain·pump_energy·(1 − 2a t²)·exp(−a t²)` with
/// `a = 4 ln2 / fwhm²` (peak normalized to +1 at t = 0, zero time
/// integral). No carrier phase enters, so the waveform is CEP-stable by
/// construction; `center_freq` is set to the analytic spectral centroid
/// `(2/π)·sqrt(a/π)`.
pub fn optical_rectification(
    grid: &TimeGrid,
    pump_env_fwhm: f64,
    pump_energy: f64,
    gain: f64,
) -> Result<CoherentTransient> {
    if !(pump_env_fwhm.is_finite() && pump_env_fwhm > 0.0) {
        return Err(Error::InvalidParam(format!(
            "pump envelope FWHM must be positive, got {pump_env_fwhm}"
        )));
    }
    if !(pump_energy.is_finite() && pump_energy >= 0.0) {
        return Err(Error::InvalidParam(format!(
            "pump energy must be ≥ 0, got {pump_energy}"
        )));
    }
    if !gain.is_finite() {
        return Err(Error::InvalidParam("gain must be finite".to_string()));
    }
    let a = 4.0 * std::f64::consts::LN_2 / (pump_env_fwhm * pump_env_fwhm);
    // Spectral centroid of ω²·exp(−ω²/4a) over positive frequencies.
    let centroid = (2.0 / std::f64::consts::PI) * (a / std::f64::consts::PI).sqrt();
    let samples_per_cycle = 1.0 / (centroid * grid.dt());
    if samples_per_cycle < 8.0 {
        return Err(Error::GridTooCoarse {
            samples_per_cycle,
            freq_thz: centroid / THZ,
            required: 8.0,
        });
    }

    let times = grid.times();
    let shape: Vec<f64> = times
        .iter()
        .map(|&t| (1.0 - 2.0 * a * t * t) * (-a * t * t).exp())
        .collect();
    check_envelope_edges(&shape)?;

    let amplitude = gain * pump_energy;
    let field: Vec<f64> = shape.iter().map(|&s| amplitude * s).collect();
    Ok(CoherentTransient {
        grid: *grid,
        field,
        center_freq: centroid,
        cep: 0.0,
        pump_energy,
    })
}

fn check_envelope_edges(envelope: &[f64]) -> Result<()> {
    let peak = envelope.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let edge = envelope[0].abs().max(envelope[envelope.len() - 1].abs());
    let ratio = edge / peak;
    if !(ratio < EDGE_TOLERANCE) {
        return Err(Error::EdgeLeakage {
            edge_ratio: ratio,
            tolerance: EDGE_TOLERANCE,
        });
    }
    Ok(())
}

/// Time derivative of a sampled series with the chosen operator.
pub fn time_derivative(series: &[f64], grid: &TimeGrid, mode: DerivMode) -> Result<Vec<f64>> {
    match mode {
        DerivMode::Spectral => SpectralDiff::new(grid).derivative(series),
        DerivMode::FiniteDifference => finite_difference_derivative(series, grid),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::units::{FS, NJ, THZ};
    use crate::grid::make_grid;

    fn test_grid() -> TimeGrid {
        // ±409.6 fs at 0.4 fs: plenty of room for a 90 fs envelope.
        make_grid(-409.6 * FS, 0.4 * FS, 2048).unwrap()
    }

    #[test]
    fn zero_pump_energy_gives_identically_zero_field() {
        let tr =
            synthesize_transient(&test_grid(), 0.0, 0.3, 44.0 * THZ, 90.0 * FS, 1e16).unwrap();
        assert!(tr.field.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn field_is_exactly_linear_in_pump_energy() {
        let g = test_grid();
        let a = synthesize_transient(&g, 1.75 * NJ, 0.5, 44.0 * THZ, 90.0 * FS, 1e16).unwrap();
        let b = synthesize_transient(&g, 3.5 * NJ, 0.5, 44.0 * THZ, 90.0 * FS, 1e16).unwrap();
        for k in 0..g.len() {
            // Bitwise: doubling the energy doubles every sample exactly
            // (multiplication by 2 commutes with rounding).
            assert_eq!(b.field[k], 2.0 * a.field[k], "sample {k} not doubled");
        }
    }

    #[test]
    fn cep_pi_flip_negates_every_sample_exactly() {
        let g = test_grid();
        let plus = synthesize_transient(&g, 3.5 * NJ, 0.0, 44.0 * THZ, 90.0 * FS, 1e16).unwrap();
        let minus = synthesize_transient(
            &g,
            3.5 * NJ,
            std::f64::consts::PI,
            44.0 * THZ,
            90.0 * FS,
            1e16,
        )
        .unwrap();
        for k in 0..g.len() {
            let sum = plus.field[k] + minus.field[k];
            assert_eq!(sum, 0.0, "sample {k}: sum {sum:e} not exactly zero");
        }
    }

    #[test]
    fn envelope_leaking_off_the_grid_is_rejected() {
        // 90 fs FWHM on a ±128 fs window: edge amplitude ~6e-2 of peak.
        let g = make_grid(-128.0 * FS, 0.5 * FS, 512).unwrap();
        let err = synthesize_transient(&g, 1.0 * NJ, 0.0, 44.0 * THZ, 90.0 * FS, 1e16);
        assert!(
            matches!(err, Err(Error::EdgeLeakage { .. })),
            "expected edge-leakage error, got {err:?}"
        );
    }

    #[test]
    fn unresolved_carrier_is_rejected() {
        // 44 THz has a 22.7 fs period; dt = 12 fs leaves <2 samples/cycle.
        let g = make_grid(-768.0 * FS, 12.0 * FS, 128).unwrap();
        let err = synthesize_transient(&g, 1.0 * NJ, 0.0, 44.0 * THZ, 200.0 * FS, 1e16);
        assert!(
            matches!(err, Err(Error::GridTooCoarse { .. })),
            "expected grid-too-coarse error, got {err:?}"
        );
    }

    #[test]
    fn rectification_waveform_has_zero_time_integral() {
        let g = make_grid(-256.0 * FS, 0.25 * FS, 2048).unwrap();
        let tr = optical_rectification(&g, 12.0 * FS, 1.0 * NJ, 1e16).unwrap();
        let integral: f64 = tr.field.iter().sum::<f64>() * g.dt();
        let bound = 1e-9 * tr.peak_field() * g.span();
        assert!(
            integral.abs() < bound,
            "time integral {integral:.3e} exceeds {bound:.3e}"
        );
    }

    #[test]
    fn rectification_is_cep_stable_by_construction() {
        let g = make_grid(-256.0 * FS, 0.25 * FS, 2048).unwrap();
        let tr = optical_rectification(&g, 12.0 * FS, 1.0 * NJ, 1e16).unwrap();
        assert_eq!(tr.cep, 0.0, "no carrier phase parameter exists");
    }

    #[test]
    fn rectification_centroid_matches_independent_dft_oracle() {
        // Frozen regression value for a 12 fs envelope on this exact grid,
        // computed with a plain O(n²) DFT (and cross-checked against the
        // closed form (2/π)·sqrt(a/π) = 49.8387 THz).
        const FROZEN_CENTROID_HZ: f64 = 49.838_698_722e12;

        let g = make_grid(-256.0 * FS, 0.25 * FS, 2048).unwrap();
        let tr = optical_rectification(&g, 12.0 * FS, 1.0 * NJ, 1e16).unwrap();

        // Independent oracle: direct DFT magnitudes, no FFT library.
        let n = g.len();
        let mut wsum = 0.0;
        let mut fsum = 0.0;
        for k in 0..=n / 2 {
            let mut re = 0.0;
            let mut im = 0.0;
            for (j, &x) in tr.field.iter().enumerate() {
                let ph = -2.0 * std::f64::consts::PI * (k as f64) * (j as f64) / (n as f64);
                re += x * ph.cos();
                im += x * ph.sin();
            }
            let mag = (re * re + im * im).sqrt();
            wsum += mag;
            fsum += mag * (k as f64) * g.freq_resolution();
        }
        let oracle = fsum / wsum;
        assert!(
            (oracle - FROZEN_CENTROID_HZ).abs() < 1e9,
            "oracle centroid {oracle:.6e} drifted from frozen {FROZEN_CENTROID_HZ:.6e}"
        );

        let implemented = crate::spectral::spectrum_centroid(&tr.field, &g).unwrap();
        assert!(
            (implemented - FROZEN_CENTROID_HZ).abs() < 1e9,
            "implementation centroid {implemented:.6e} vs frozen {FROZEN_CENTROID_HZ:.6e}"
        );
        // Closed-form sanity: discrete centroid within 0.1% of analytic.
        assert!(
            (implemented / tr.center_freq - 1.0).abs() < 1e-3,
            "discrete centroid {implemented:.4e} vs analytic {:.4e}",
            tr.center_freq
        );
    }

    #[test]
    fn rectification_rejects_coarse_grids() {
        // 12 fs envelope radiates around 50 THz (20 fs period); dt = 3 fs
        // leaves fewer than 8 samples per cycle.
        let g = make_grid(-384.0 * FS, 3.0 * FS, 256).unwrap();
        let err = optical_rectification(&g, 12.0 * FS, 1.0 * NJ, 1e16);
        assert!(
            matches!(err, Err(Error::GridTooCoarse { .. })),
            "expected grid-too-coarse error, got {err:?}"
        );
    }

    #[test]
    fn derivative_operators_agree_on_a_smooth_transient() {
        // dt = 0.2 fs keeps the O((ω dt)²/6) finite-difference error of the
        // 44 THz carrier near 5e-4 — both operators must agree to 1e-3 of
        // the derivative peak.
        let g = make_grid(-409.6 * FS, 0.2 * FS, 4096).unwrap();
        let tr = synthesize_transient(&g, 3.5 * NJ, 0.0, 44.0 * THZ, 90.0 * FS, 1e16).unwrap();
        let ds = tr.derivative(DerivMode::Spectral).unwrap();
        let df = tr.derivative(DerivMode::FiniteDifference).unwrap();
        let peak = ds.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let worst = ds
            .iter()
            .zip(&df)
            .fold(0.0f64, |m, (&a, &b)| m.max((a - b).abs()));
        assert!(
            worst < 1e-3 * peak,
            "spectral vs finite-difference disagree by {:.3e} of peak",
            worst / peak
        );
    }

    #[test]
    fn cep_is_reduced_with_exact_sign_bookkeeping() {
        let (r0, s0) = reduce_cep(0.0);
        assert_eq!((r0, s0), (0.0, 1.0));
        let (r1, s1) = reduce_cep(std::f64::consts::PI);
        assert_eq!((r1, s1), (0.0, -1.0));
        let (r2, s2) = reduce_cep(-std::f64::consts::PI);
        assert_eq!((r2, s2), (0.0, -1.0));
        let (r3, s3) = reduce_cep(2.0 * std::f64::consts::PI);
        assert_eq!(s3, 1.0);
        assert!(r3.abs() < 1e-15);
    }
}
