//! Parameter recovery from pump-energy sweeps of the RDN extrema.
//!
//! At each pump energy `U` the noise pattern's extremal delays give two
//! read-outs: the anti-squeezed branch `RDN_max` and the squeezed branch
//! `RDN_min`. The forward model treats the extremal squeezing factor as
//! linear in the pump energy, `f_± = ±g·U`, and allows a stationary
//! vacuum admixture `η` (mode-matching and timing imperfections pull a
//! fraction `1−η` of the probed segment back to the bare vacuum):
//!
//! `ΔE²_± = η·(e^{±gU}·ΔE_vac)² + (1−η)·ΔE_vac²`,
//!
//! pushed through the exact RDN formula. [`fit_sweep`] recovers `(g, η)`
//! jointly by weighted least squares over both branches of every energy,
//! using a multi-start Nelder–Mead search on `(ln g, logit η)` so both
//! parameters stay in range without hard constraints.
//!
//! The two branches do not mirror each other: their sum
//! ([`branch_asymmetry`]) is strictly positive and grows quadratically
//! for small `gU` — squeezing saturates while anti-squeezing compounds —
//! which is what makes the branch pair informative about `η`.

use crate::detect::rdn_exact;
use crate::error::{Error, Result};

/// One pump energy of a sweep: the RDN read at the two extremal delays,
/// with optional statistical uncertainties (all-or-none across a sweep).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// Pump energy [J].
    pub energy: f64,
    /// RDN at the anti-squeezed extremal delay.
    pub rdn_max: f64,
    /// RDN at the squeezed extremal delay.
    pub rdn_min: f64,
    /// One-sigma uncertainty of `rdn_max`.
    pub stderr_max: Option<f64>,
    /// One-sigma uncertainty of `rdn_min`.
    pub stderr_min: Option<f64>,
}

/// Outcome of a sweep fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Extremal squeezing factor per pump energy, d f_max/dU [1/J].
    pub gain_rate: f64,
    /// Recovered squeezed-vacuum fraction of the probed segment.
    pub eta: f64,
    /// Plain rms of the 2N fit residuals (RDN units).
    pub residual_rms: f64,
    /// Correlation of the (g, η) estimates from the local quadratic
    /// approximation; `None` if the curvature matrix was degenerate.
    pub g_eta_correlation: Option<f64>,
    /// Objective evaluations spent across all starts.
    pub evaluations: usize,
    /// Per input energy: (energy [J], model squeezing percent
    /// `100·(1 − e^{−gU})`, the noise-amplitude reduction at the best
    /// delay).
    pub squeezing_curve: Vec<(f64, f64)>,
}

/// Model branches at one working point: (RDN_max, RDN_min) for extremal
/// squeezing factor `g_e = g·U` and admixture `eta`.
pub fn model_branches(g_e: f64, eta: f64, delta_e_vac: f64, delta_e_sn: f64) -> (f64, f64) {
    let v2 = delta_e_vac * delta_e_vac;
    // Variances; the max(0) guards finite-difference probes of η slightly
    // outside [0, 1].
    let var_max = (eta * (2.0 * g_e).exp() * v2 + (1.0 - eta) * v2).max(0.0);
    let var_min = (eta * (-2.0 * g_e).exp() * v2 + (1.0 - eta) * v2).max(0.0);
    (
        rdn_exact(var_max.sqrt(), delta_e_vac, delta_e_sn),
        rdn_exact(var_min.sqrt(), delta_e_vac, delta_e_sn),
    )
}

/// Sum of the two branches, RDN_max + RDN_min: zero only at g_e = 0 (or
/// η = 0), positive otherwise, growing ∝ (g_e)² while g_e is small.
pub fn branch_asymmetry(g_e: f64, eta: f64, delta_e_vac: f64, delta_e_sn: f64) -> f64 {
    let (mx, mn) = model_branches(g_e, eta, delta_e_vac, delta_e_sn);
    mx + mn
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Jointly fit `(gain_rate, eta)` to a sweep of branch read-outs.
///
/// Residuals are weighted by 1/stderr² when uncertainties are given
/// (they must then be given for every branch of every point), uniformly
/// otherwise.
pub fn fit_sweep(points: &[SweepPoint], delta_e_vac: f64, delta_e_sn: f64) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::Fit(format!(
            "sweep fit needs at least 2 energies, got {}",
            points.len()
        )));
    }
    if !(delta_e_vac.is_finite() && delta_e_vac > 0.0 && delta_e_sn.is_finite() && delta_e_sn > 0.0)
    {
        return Err(Error::Fit(
            "vacuum amplitude and shot-noise floor must be positive".into(),
        ));
    }
    let with_err = points.iter().filter(|p| p.stderr_max.is_some()).count();
    let with_err_min = points.iter().filter(|p| p.stderr_min.is_some()).count();
    if !(with_err == 0 && with_err_min == 0
        || with_err == points.len() && with_err_min == points.len())
    {
        return Err(Error::Fit(
            "uncertainties must be given for every branch of every point, or for none".into(),
        ));
    }
    let mut u_max = 0.0f64;
    for p in points {
        if !(p.energy.is_finite() && p.energy > 0.0) {
            return Err(Error::Fit(format!(
                "pump energies must be positive, got {:.3e}",
                p.energy
            )));
        }
        if !(p.rdn_max.is_finite() && p.rdn_min.is_finite()) {
            return Err(Error::Fit("non-finite RDN read-out in sweep".into()));
        }
        for s in [p.stderr_max, p.stderr_min].into_iter().flatten() {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Fit(format!(
                    "uncertainties must be positive, got {s:.3e}"
                )));
            }
        }
        u_max = u_max.max(p.energy);
    }

    // Weights: 1/σ² or 1.
    let weights: Vec<(f64, f64)> = points
        .iter()
        .map(|p| match (p.stderr_max, p.stderr_min) {
            (Some(a), Some(b)) => (1.0 / (a * a), 1.0 / (b * b)),
            _ => (1.0, 1.0),
        })
        .collect();

    let objective = |z: &[f64]| -> f64 {
        let g = z[0].exp();
        let eta = sigmoid(z[1]);
        let mut sse = 0.0;
        for (p, &(wx, wn)) in points.iter().zip(&weights) {
            let (mx, mn) = model_branches(g * p.energy, eta, delta_e_vac, delta_e_sn);
            sse += wx * (mx - p.rdn_max).powi(2) + wn * (mn - p.rdn_min).powi(2);
        }
        if sse.is_finite() {
            sse
        } else {
            f64::INFINITY
        }
    };

    // Multi-start grid: extremal gU at the largest energy in
    // {0.2, 0.7, 1.4}, admixture in {0.3, 0.7, 0.95}.
    let opts = nelder_mead::Options {
        ftol_abs: 1e-24,
        xtol: 1e-10,
        max_evals: 4000,
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut evaluations = 0usize;
    for &ge in &[0.2, 0.7, 1.4] {
        for &eta0 in &[0.3, 0.7, 0.95] {
            let x0 = [(ge / u_max).ln(), logit(eta0)];
            let (x, fval, evals) =
                nelder_mead::minimize(&mut { |z: &[f64]| objective(z) }, &x0, &[0.5, 0.5], &opts);
            evaluations += evals;
            if best.as_ref().map_or(true, |(_, fb)| fval < *fb) {
                best = Some((x, fval));
            }
        }
    }
    let (z_best, _) = best.expect("at least one start ran");
    let gain_rate = z_best[0].exp();
    let eta = sigmoid(z_best[1]);
    if !(gain_rate.is_finite() && eta.is_finite()) {
        return Err(Error::Fit("search did not settle on finite parameters".into()));
    }

    // Plain rms over all 2N residuals at the optimum.
    let mut ss = 0.0;
    for p in points {
        let (mx, mn) = model_branches(gain_rate * p.energy, eta, delta_e_vac, delta_e_sn);
        ss += (mx - p.rdn_max).powi(2) + (mn - p.rdn_min).powi(2);
    }
    let residual_rms = (ss / (2.0 * points.len() as f64)).sqrt();

    let g_eta_correlation =
        parameter_correlation(points, &weights, gain_rate, eta, delta_e_vac, delta_e_sn);

    let squeezing_curve = points
        .iter()
        .map(|p| {
            let u = p.energy;
            (u, 100.0 * (1.0 - (-gain_rate * u).exp()))
        })
        .collect();

    Ok(FitResult {
        gain_rate,
        eta,
        residual_rms,
        g_eta_correlation,
        evaluations,
        squeezing_curve,
    })
}

/// Correlation of the two estimates from the Gauss–Newton curvature
/// (JᵀWJ)⁻¹ at the optimum, with J from central differences.
fn parameter_correlation(
    points: &[SweepPoint],
    weights: &[(f64, f64)],
    gain_rate: f64,
    eta: f64,
    delta_e_vac: f64,
    delta_e_sn: f64,
) -> Option<f64> {
    let dg = 1e-6 * gain_rate;
    let de = 1e-6;
    // Accumulate JᵀWJ over the 2N residuals.
    let mut h = [[0.0f64; 2]; 2];
    for (p, &(wx, wn)) in points.iter().zip(weights) {
        let branches =
            |g: f64, e: f64| model_branches(g * p.energy, e, delta_e_vac, delta_e_sn);
        let (mx_gp, mn_gp) = branches(gain_rate + dg, eta);
        let (mx_gm, mn_gm) = branches(gain_rate - dg, eta);
        let (mx_ep, mn_ep) = branches(gain_rate, eta + de);
        let (mx_em, mn_em) = branches(gain_rate, eta - de);
        let rows = [
            (wx, (mx_gp - mx_gm) / (2.0 * dg), (mx_ep - mx_em) / (2.0 * de)),
            (wn, (mn_gp - mn_gm) / (2.0 * dg), (mn_ep - mn_em) / (2.0 * de)),
        ];
        for (w, jg, je) in rows {
            h[0][0] += w * jg * jg;
            h[0][1] += w * jg * je;
            h[1][1] += w * je * je;
        }
    }
    h[1][0] = h[0][1];
    let det = h[0][0] * h[1][1] - h[0][1] * h[0][1];
    if !(det > 0.0 && det.is_finite()) {
        return None;
    }
    // Covariance ∝ H⁻¹; the correlation needs no overall scale.
    let c00 = h[1][1] / det;
    let c11 = h[0][0] / det;
    let c01 = -h[0][1] / det;
    let denom = (c00 * c11).sqrt();
    if denom > 0.0 && denom.is_finite() {
        Some((c01 / denom).clamp(-1.0, 1.0))
    } else {
        None
    }
}

/// Derivative-free simplex minimizer (Nelder–Mead with the standard
/// reflection/expansion/contraction/shrink coefficients 1, 2, ½, ½).
pub mod nelder_mead {
    /// Termination settings.
    pub struct Options {
        /// Stop when the simplex's objective spread falls below this.
        pub ftol_abs: f64,
        /// Stop when every simplex edge is shorter than this.
        pub xtol: f64,
        /// Hard evaluation budget.
        pub max_evals: usize,
    }

    /// Minimize `f` from `x0` with initial per-coordinate steps `steps`.
    /// Returns (best point, best value, evaluations used).
    pub fn minimize(
        f: &mut dyn FnMut(&[f64]) -> f64,
        x0: &[f64],
        steps: &[f64],
        opts: &Options,
    ) -> (Vec<f64>, f64, usize) {
        assert_eq!(x0.len(), steps.len(), "one step per coordinate");
        let n = x0.len();
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
            *evals += 1;
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };

        // Initial simplex: x0 plus one step along each axis.
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let f0 = eval(x0, &mut evals);
        simplex.push((x0.to_vec(), f0));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += steps[i];
            let fx = eval(&x, &mut evals);
            simplex.push((x, fx));
        }

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[n].1 - simplex[0].1;
            let mut max_edge = 0.0f64;
            for v in &simplex[1..] {
                let d: f64 = v.0
                    .iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                max_edge = max_edge.max(d.sqrt());
            }
            if spread <= opts.ftol_abs || max_edge <= opts.xtol || evals >= opts.max_evals {
                return (simplex[0].0.clone(), simplex[0].1, evals);
            }

            // Centroid of all but the worst.
            let mut centroid = vec![0.0; n];
            for v in &simplex[..n] {
                for (c, &x) in centroid.iter_mut().zip(&v.0) {
                    *c += x;
                }
            }
            for c in centroid.iter_mut() {
                *c /= n as f64;
            }
            let worst = simplex[n].clone();
            let lerp = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(&c, &w)| c + t * (c - w))
                    .collect()
            };

            let xr = lerp(1.0);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = lerp(2.0);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let xc = if fr < worst.1 { lerp(0.5) } else { lerp(-0.5) };
                let fc = eval(&xc, &mut evals);
                if fc < fr.min(worst.1) {
                    simplex[n] = (xc, fc);
                } else {
                    // Shrink toward the best vertex.
                    let best = simplex[0].0.clone();
                    for v in simplex.iter_mut().skip(1) {
                        for (x, &b) in v.0.iter_mut().zip(&best) {
                            *x = b + 0.5 * (*x - b);
                        }
                        v.1 = eval(&v.0.clone(), &mut evals);
                    }
                }
            }
        }
    }
}
