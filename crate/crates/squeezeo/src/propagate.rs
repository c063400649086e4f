//! Co-propagation of field fluctuations with the driving transient.
//!
//! In the frame co-moving with the transient, a fluctuation δE obeys
//!
//! `∂δE/∂z = (d_eff/(n·c)) · ∂_t [E(t)·δE(t, z)]`
//!
//! through the crystal (the driver `E` itself is treated as stiff over the
//! short interaction length). Expanding the time derivative gives a local
//! gain term `E′·δE` — whose accumulated effect over the length `l` is
//! exactly the exit map `exp(f(t))` with `f = (d_eff·l/(n·c))·E′` — plus a
//! shear term `E·∂_t δE` that slightly advects the fluctuation in time.
//!
//! Three interchangeable routes to the crystal exit:
//!
//! * [`PropagationMethod::Analytic`] — apply `exp(f(t))` per sample
//!   (the closed form when the shear term is dropped);
//! * [`PropagationMethod::TimeDomain`] — midpoint (RK2) z-stepping on the
//!   time samples, the shear derivative evaluated spectrally;
//! * [`PropagationMethod::Spectral`] — the same march with the state kept
//!   as a spectrum, the product formed in the time domain each step.
//!
//! The two numeric routes discretize the identical ODE system, so on
//! band-limited inputs they agree to roundoff — a cheap self-check that
//! the product rule was applied consistently. Both enforce the analytic
//! energy-growth bound `exp(2·max|f|)` per realization and report
//! [`Error::Unstable`] when a too-coarse z-march amplifies
//! high-frequency content beyond it.

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::constants::PhysConstants;
use crate::error::{Error, Result};
use crate::spectral::SpectralDiff;
use crate::squeeze::SqueezingProfile;
use crate::vacuum::FieldEnsemble;
use rayon::prelude::*;

/// Headroom multiplier on the analytic energy-growth bound before a march
/// is declared unstable (covers benign transient growth of the shear
/// term).
pub const GROWTH_SLACK: f64 = 1.02;

/// How to carry fluctuations through the crystal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PropagationMethod {
    /// Per-sample exit map exp(f(t)); exact for the gain-only equation.
    #[default]
    Analytic,
    /// RK2 z-march on time samples.
    TimeDomain,
    /// RK2 z-march on the spectrum.
    Spectral,
}

/// Numerical-propagation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub method: PropagationMethod,
    /// Number of z-steps across the crystal length (numeric methods).
    pub z_steps: usize,
    /// Keep the shear term E·∂_t δE (true) or integrate the gain term
    /// only (false), whose exact solution is the analytic exit map.
    pub include_second_term: bool,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            method: PropagationMethod::Analytic,
            z_steps: 256,
            include_second_term: true,
        }
    }
}

/// Per-sample exit gains exp(f(t)) of a squeezing profile.
pub fn exit_gains(profile: &SqueezingProfile) -> Vec<f64> {
    profile.f.iter().map(|&f| f.exp()).collect()
}

/// Apply precomputed exit gains to one realization in place.
pub fn apply_exit_gains(row: &mut [f64], gains: &[f64]) -> Result<()> {
    if row.len() != gains.len() {
        return Err(Error::GridMismatch(format!(
            "realization length {} vs gain table length {}",
            row.len(),
            gains.len()
        )));
    }
    for (x, &g) in row.iter_mut().zip(gains) {
        *x *= g;
    }
    Ok(())
}

/// Reusable z-marcher for one squeezing profile (shared across rayon
/// workers; all methods take `&self`).
pub struct Propagator {
    n: usize,
    /// d_eff/(n·c) [m/V·(s/m) net], the coupling in front of ∂_t(E·δE).
    coef: f64,
    /// z-step [m].
    dz: f64,
    z_steps: usize,
    include_second_term: bool,
    method: PropagationMethod,
    /// Driver samples E(t) [V/m].
    e_field: Vec<f64>,
    /// Spectral derivative E′(t) [V/(m·s)].
    e_deriv: Vec<f64>,
    /// Energy-ratio ceiling exp(2·max|f|)·slack.
    energy_bound: f64,
    fft: SpectralDiff,
}

/// Per-worker scratch buffers for [`Propagator::propagate_row`].
#[derive(Default)]
pub struct PropagatorScratch {
    c1: Vec<Complex<f64>>,
    c2: Vec<Complex<f64>>,
    c3: Vec<Complex<f64>>,
    r1: Vec<f64>,
    r2: Vec<f64>,
    r3: Vec<f64>,
}

impl Propagator {
    /// Build a marcher for `profile` (driver, crystal and f all come from
    /// it). `method` must be one of the numeric routes.
    pub fn new(
        profile: &SqueezingProfile,
        consts: &PhysConstants,
        config: &PropagationConfig,
    ) -> Result<Self> {
        if config.method == PropagationMethod::Analytic {
            return Err(Error::InvalidParam(
                "Propagator drives the numeric methods; use exit_gains for the analytic map"
                    .into(),
            ));
        }
        if config.z_steps == 0 {
            return Err(Error::InvalidParam("z_steps must be at least 1".into()));
        }
        let crystal = &profile.crystal;
        let coef = crystal.d_eff / (crystal.n * consts.c);
        let fft = SpectralDiff::new(&profile.grid);
        let e_field = profile.transient.field.clone();
        let e_deriv = fft.derivative(&e_field)?;
        Ok(Propagator {
            n: profile.grid.len(),
            coef,
            dz: crystal.length / config.z_steps as f64,
            z_steps: config.z_steps,
            include_second_term: config.include_second_term,
            method: config.method,
            e_field,
            e_deriv,
            energy_bound: (2.0 * profile.max_abs_f).exp() * GROWTH_SLACK,
            fft,
        })
    }

    /// March one realization to the crystal exit in place.
    pub fn propagate_row(&self, row: &mut [f64], s: &mut PropagatorScratch) -> Result<()> {
        if row.len() != self.n {
            return Err(Error::GridMismatch(format!(
                "realization length {} vs grid length {}",
                row.len(),
                self.n
            )));
        }
        let energy_in: f64 = row.iter().map(|&x| x * x).sum();
        match self.method {
            PropagationMethod::TimeDomain => self.march_time_domain(row, s),
            PropagationMethod::Spectral => self.march_spectral(row, s),
            PropagationMethod::Analytic => unreachable!("rejected in new()"),
        }
        let energy_out: f64 = row.iter().map(|&x| x * x).sum();
        if energy_in > 0.0 && energy_out > self.energy_bound * energy_in {
            return Err(Error::Unstable {
                growth: energy_out / energy_in,
                bound: self.energy_bound,
                z_steps: self.z_steps,
            });
        }
        Ok(())
    }

    /// March every realization of an ensemble in parallel. Rows are
    /// independent, so the result does not depend on the worker count.
    pub fn propagate_ensemble(&self, ensemble: &mut FieldEnsemble) -> Result<()> {
        ensemble
            .par_rows_mut()
            .try_for_each_init(PropagatorScratch::default, |scratch, row| {
                self.propagate_row(row, scratch)
            })
    }

    /// Gain term of the right-hand side: coef·E′·y, plus the shear term
    /// coef·E·D[y] when enabled. Real-state variant.
    fn rhs_time(&self, y: &[f64], out: &mut Vec<f64>, s: &mut PropagatorScratch) {
        out.clear();
        out.extend(
            y.iter()
                .zip(&self.e_deriv)
                .map(|(&v, &ep)| self.coef * ep * v),
        );
        if self.include_second_term {
            // D[y] spectrally: forward, ×iω, inverse, /n.
            self.fft.forward(y, &mut s.c1);
            self.fft.apply_derivative_multiplier(&mut s.c1);
            self.fft.inverse_inplace(&mut s.c1);
            let scale = 1.0 / self.n as f64;
            for ((o, &e), c) in out.iter_mut().zip(&self.e_field).zip(&s.c1) {
                *o += self.coef * e * c.re * scale;
            }
        }
    }

    fn march_time_domain(&self, row: &mut [f64], s: &mut PropagatorScratch) {
        let h = self.dz;
        for _ in 0..self.z_steps {
            // Midpoint rule: y ← y + h·rhs(y + (h/2)·rhs(y)). Buffers are
            // taken out of the scratch to keep the borrows disjoint.
            let mut k1 = std::mem::take(&mut s.r1);
            self.rhs_time(row, &mut k1, s);
            let mut mid = std::mem::take(&mut s.r2);
            mid.clear();
            mid.extend(row.iter().zip(&k1).map(|(&y, &k)| y + 0.5 * h * k));
            let mut k2 = std::mem::take(&mut s.r3);
            self.rhs_time(&mid, &mut k2, s);
            for (y, &k) in row.iter_mut().zip(&k2) {
                *y += h * k;
            }
            s.r1 = k1;
            s.r2 = mid;
            s.r3 = k2;
        }
    }

    /// Right-hand side with the state held as an (unnormalized) spectrum:
    /// back to time, multiply by E (shear on) or E′ (shear off), forward,
    /// and ×iω when the product sat inside the derivative.
    fn rhs_spectral(&self, ys: &[Complex<f64>], out: &mut Vec<Complex<f64>>) {
        out.clear();
        out.extend_from_slice(ys);
        self.fft.inverse_inplace(out);
        let scale = 1.0 / self.n as f64;
        let weights = if self.include_second_term {
            &self.e_field
        } else {
            &self.e_deriv
        };
        for (v, &w) in out.iter_mut().zip(weights) {
            *v *= self.coef * w * scale;
        }
        self.fft.forward_inplace(out);
        if self.include_second_term {
            self.fft.apply_derivative_multiplier(out);
        }
    }

    fn march_spectral(&self, row: &mut [f64], s: &mut PropagatorScratch) {
        let h = self.dz;
        self.fft.forward(row, &mut s.c1);
        let state = &mut s.c1;
        let k = &mut s.c2;
        let mid = &mut s.c3;
        for _ in 0..self.z_steps {
            self.rhs_spectral(state, k);
            mid.clear();
            mid.extend(
                state
                    .iter()
                    .zip(k.iter())
                    .map(|(&y, &kv)| y + kv * Complex::new(0.5 * h, 0.0)),
            );
            self.rhs_spectral(mid, k);
            for (y, &kv) in state.iter_mut().zip(k.iter()) {
                *y += kv * Complex::new(h, 0.0);
            }
        }
        self.fft.inverse_inplace(state);
        let scale = 1.0 / self.n as f64;
        for (x, c) in row.iter_mut().zip(state.iter()) {
            *x = c.re * scale;
        }
    }
}

/// March a whole ensemble to the crystal exit with the configured method
/// (the analytic map included).
pub fn propagate_ensemble(
    ensemble: &mut FieldEnsemble,
    profile: &SqueezingProfile,
    consts: &PhysConstants,
    config: &PropagationConfig,
) -> Result<()> {
    ensemble.grid.require_same(&profile.grid, "ensemble vs squeezing profile")?;
    match config.method {
        PropagationMethod::Analytic => {
            let gains = exit_gains(profile);
            ensemble
                .par_rows_mut()
                .try_for_each(|row| apply_exit_gains(row, &gains))
        }
        _ => Propagator::new(profile, consts, config)?.propagate_ensemble(ensemble),
    }
}
