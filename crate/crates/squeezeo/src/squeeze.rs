//! Time-local squeezing of the vacuum field by a co-propagating transient.
//!
//! A χ⁽²⁾ crystal of length `l`, index `n` and effective coefficient
//! `d_eff` driven by a strong transient `E(t)` rescales co-propagating
//! vacuum fluctuations by the time-local factor
//!
//! `f(t) = (d_eff·l / (n·c)) · ∂E/∂t`,
//!
//! so the exit noise pattern is `ΔE_rms(t) = exp(f(t))·ΔE_vac`: squeezed
//! below the bare vacuum where `f < 0`, anti-squeezed above it where
//! `f > 0`. Because `f` is odd under a CEP flip of the driver, the two
//! patterns multiply back to the bare vacuum variance sample by sample —
//! the working form of the uncertainty product for this interaction.
//!
//! The same physics reads as a Pockels-type velocity modulation: the
//! transient modulates the index by `Δn(t) = r·n³·E(t)` with
//! `r = −d_eff/n⁴`, and `f(t) = −(l/c)·∂n/∂t` reproduces the squeezing
//! factor identically ([`pockels_velocity`]).

use crate::constants::PhysConstants;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::vacuum::VacuumStats;
use crate::waveform::{CoherentTransient, CrystalParams, DerivMode, TransientSpec};

/// Relative tolerance of the gain calibration bisection.
pub const CALIBRATION_REL_TOL: f64 = 1e-9;

/// A sampled squeezing-factor profile, optionally annotated with the
/// resulting analytic noise pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingProfile {
    pub grid: TimeGrid,
    /// Dimensionless squeezing factor f(t) per sample.
    pub f: Vec<f64>,
    /// Noise pattern ΔE_rms(t) [V/m]; `None` until filled by
    /// [`analytic_noise`] (or an ensemble-derived estimate).
    pub delta_e_rms: Option<Vec<f64>>,
    /// Largest |f| on the grid (useful for stability bounds).
    pub max_abs_f: f64,
    /// Driving transient (kept for provenance and figure guides).
    pub transient: CoherentTransient,
    /// Crystal the profile was computed for.
    pub crystal: CrystalParams,
}

impl SqueezingProfile {
    /// The filled noise pattern, or an error naming the missing step.
    pub fn rms(&self) -> Result<&[f64]> {
        self.delta_e_rms.as_deref().ok_or_else(|| {
            Error::InvalidParam(
                "noise pattern not filled yet; call analytic_noise first".into(),
            )
        })
    }

    /// Degrade the (filled) noise pattern by scalar vacuum admixture at
    /// the variance level: ΔE² ← η·ΔE² + (1−η)·ΔE_vac².
    pub fn contaminate(&mut self, eta: f64, vacuum: &VacuumStats) -> Result<()> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParam(format!(
                "contamination η must lie in [0, 1], got {eta}"
            )));
        }
        let rms = self.delta_e_rms.as_mut().ok_or_else(|| {
            Error::InvalidParam(
                "noise pattern not filled yet; call analytic_noise before contaminate".into(),
            )
        })?;
        let v_vac = vacuum.delta_e_vac * vacuum.delta_e_vac;
        for x in rms.iter_mut() {
            *x = (eta * (*x) * (*x) + (1.0 - eta) * v_vac).sqrt();
        }
        Ok(())
    }
}

/// Location and values of the noise-pattern extrema.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseExtrema {
    pub idx_max: usize,
    pub idx_min: usize,
    /// Delay of maximum noise [s].
    pub t_max: f64,
    /// Delay of minimum noise [s].
    pub t_min: f64,
    /// ΔE_rms at the maximum [V/m].
    pub rms_max: f64,
    /// ΔE_rms at the minimum [V/m].
    pub rms_min: f64,
}

/// Squeezing factor f(t) = (d_eff·l/(n·c))·∂E/∂t of a transient in a
/// crystal, using the chosen derivative operator (spectral is the
/// default; whatever is chosen here must be reused for Δn and propagation
/// cross-checks).
pub fn squeezing_factor(
    transient: &CoherentTransient,
    crystal: &CrystalParams,
    consts: &PhysConstants,
    mode: DerivMode,
) -> Result<SqueezingProfile> {
    let deriv = transient.derivative(mode)?;
    let coef = crystal.d_eff * crystal.length / (crystal.n * consts.c);
    let f: Vec<f64> = deriv.iter().map(|&d| coef * d).collect();
    let max_abs_f = f.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    Ok(SqueezingProfile {
        grid: transient.grid,
        f,
        delta_e_rms: None,
        max_abs_f,
        transient: transient.clone(),
        crystal: crystal.clone(),
    })
}

/// Calibrate the synthesis gain so that `min_t f(t) = target_f_min`
/// (a negative number) at the stated pump energy.
///
/// f is linear in the gain, so bisection converges geometrically; it runs
/// to [`CALIBRATION_REL_TOL`] relative accuracy on the target. The
/// returned gain then scales `min f` linearly with pump energy.
pub fn calibrate_gain(
    target_f_min: f64,
    at_pump_energy: f64,
    template: &TransientSpec,
    grid: &TimeGrid,
    crystal: &CrystalParams,
    consts: &PhysConstants,
    mode: DerivMode,
) -> Result<f64> {
    if !(target_f_min.is_finite() && target_f_min < 0.0) {
        return Err(Error::InvalidParam(format!(
            "calibration target must be negative (a squeezing minimum), got {target_f_min}"
        )));
    }
    if !(at_pump_energy.is_finite() && at_pump_energy > 0.0) {
        return Err(Error::InvalidParam(format!(
            "calibration pump energy must be positive, got {at_pump_energy}"
        )));
    }

    let min_f_at = |gain: f64| -> Result<f64> {
        let tr = template.synthesize(grid, at_pump_energy, gain)?;
        let prof = squeezing_factor(&tr, crystal, consts, mode)?;
        Ok(prof.f.iter().fold(f64::INFINITY, |m, &x| m.min(x)))
    };

    // A unit-gain probe fixes the (negative) slope of min f vs gain.
    let probe = min_f_at(1.0)?;
    if !(probe < 0.0) {
        return Err(Error::Fit(format!(
            "gain calibration impossible: min f at unit gain is {probe:.3e} (≥ 0); \
             check d_eff sign and transient shape"
        )));
    }

    // Bracket [0, hi] with min_f(hi) below the target, then bisect.
    let mut hi = target_f_min / probe; // linear estimate
    let mut guard = 0;
    while min_f_at(hi)? > target_f_min {
        hi *= 2.0;
        guard += 1;
        if guard > 64 {
            return Err(Error::Fit("gain bracket expansion failed".into()));
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = min_f_at(mid)?;
        if v > target_f_min {
            lo = mid;
        } else {
            hi = mid;
        }
        if (v / target_f_min - 1.0).abs() < CALIBRATION_REL_TOL {
            return Ok(mid);
        }
    }
    Err(Error::Fit(format!(
        "gain bisection did not reach {CALIBRATION_REL_TOL:e} relative accuracy"
    )))
}

/// Fill the analytic noise pattern `ΔE_rms(t) = exp(f(t))·ΔE_vac`.
pub fn analytic_noise(mut profile: SqueezingProfile, vacuum: &VacuumStats) -> SqueezingProfile {
    let rms: Vec<f64> = profile
        .f
        .iter()
        .map(|&f| f.exp() * vacuum.delta_e_vac)
        .collect();
    profile.delta_e_rms = Some(rms);
    profile
}

/// Locate the extrema of the (filled) noise pattern; ties resolve to the
/// earliest delay. Errors if the pattern is flat (e.g. f ≡ 0), which has
/// no meaningful extremal delays.
pub fn extrema_of_noise(profile: &SqueezingProfile) -> Result<NoiseExtrema> {
    let rms = profile.rms()?;
    let mut idx_max = 0;
    let mut idx_min = 0;
    for (k, &v) in rms.iter().enumerate() {
        if v > rms[idx_max] {
            idx_max = k;
        }
        if v < rms[idx_min] {
            idx_min = k;
        }
    }
    let spread = rms[idx_max] - rms[idx_min];
    if !(spread > 1e-12 * rms[idx_max]) {
        return Err(Error::NoExtrema(format!(
            "pattern spread {spread:.3e} is flat at the {:.3e} level",
            rms[idx_max]
        )));
    }
    Ok(NoiseExtrema {
        idx_max,
        idx_min,
        t_max: profile.grid.time(idx_max),
        t_min: profile.grid.time(idx_min),
        rms_max: rms[idx_max],
        rms_min: rms[idx_min],
    })
}

/// The Pockels/velocity reading of the same interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityProfile {
    pub grid: TimeGrid,
    /// Index modulation Δn(t) = r·n³·E(t) (dimensionless).
    pub delta_n: Vec<f64>,
    /// Local phase velocity v(t) = c/(n + Δn(t)) [m/s].
    pub v_loc: Vec<f64>,
    /// f recomputed as −(l/c)·∂n/∂t; equals the squeezing factor.
    pub f_from_velocity: Vec<f64>,
    /// Effective electro-optic coefficient r = −d_eff/n⁴ [m/V].
    pub pockels_r: f64,
}

/// Compute the velocity view: Δn, v_loc and the squeezing factor expressed
/// through the index slew. Uses the same derivative operator as
/// [`squeezing_factor`], so `f_from_velocity` matches `f` to roundoff.
pub fn pockels_velocity(
    transient: &CoherentTransient,
    crystal: &CrystalParams,
    consts: &PhysConstants,
    mode: DerivMode,
) -> Result<VelocityProfile> {
    let r = -crystal.d_eff / crystal.n.powi(4);
    let rn3 = r * crystal.n.powi(3);
    let delta_n: Vec<f64> = transient.field.iter().map(|&e| rn3 * e).collect();
    let max_dn = delta_n.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if max_dn >= 0.5 * crystal.n {
        return Err(Error::ModelBreakdown {
            delta_n_max: max_dn,
            n: crystal.n,
        });
    }
    let v_loc: Vec<f64> = delta_n.iter().map(|&dn| consts.c / (crystal.n + dn)).collect();
    let dn_dt = crate::waveform::time_derivative(&delta_n, &transient.grid, mode)?;
    let scale = -crystal.length / consts.c;
    let f_from_velocity: Vec<f64> = dn_dt.iter().map(|&d| scale * d).collect();
    Ok(VelocityProfile {
        grid: transient.grid,
        delta_n,
        v_loc,
        f_from_velocity,
        pockels_r: r,
    })
}
