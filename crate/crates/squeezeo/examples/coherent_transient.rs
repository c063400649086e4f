//! Few-cycle transient synthesis and its basic symmetries.
//!
//! The squeezing driver is a carrier-envelope-phase (CEP) stable
//! mid-infrared transient: Gaussian intensity envelope, 44 THz carrier,
//! amplitude exactly linear in gain·pump_energy (so the squeezing factor
//! downstream scales linearly with pulse energy, which is what sweep
//! fits assume). A CEP shift of π flips the field sign exactly; optical
//! rectification of a short near-infrared pump provides an alternative,
//! intrinsically phase-stable waveform whose spectrum peaks in the
//! multi-ten-THz range.
//!
//! Run with `cargo run --example coherent_transient`.

use squeezeo::constants::units::{to_v_per_cm, FS, NJ, THZ};
use squeezeo::spectral::spectrum_centroid;
use squeezeo::waveform::optical_rectification;
use squeezeo::{make_grid, synthesize_transient, PhysConstants, TransientSpec};

fn main() {
    let _consts = PhysConstants::default();
    let grid = make_grid(-320.0 * FS, 0.625 * FS, 1024).unwrap();
    let spec = TransientSpec {
        center_freq: 44.0 * THZ,
        cep: 0.0,
        env_fwhm: 90.0 * FS,
    };
    let gain = 6.5e17; // synthesis gain; the library can also calibrate it

    println!("peak field is linear in pump energy (doubling U doubles E):");
    let mut last = 0.0;
    for u_nj in [0.875, 1.75, 3.5] {
        let tr = spec.synthesize(&grid, u_nj * NJ, gain).unwrap();
        let peak = to_v_per_cm(tr.peak_field());
        let ratio = if last > 0.0 { peak / last } else { f64::NAN };
        println!("  {u_nj:5.3} nJ -> peak {peak:10.4e} V/cm  (x{ratio:.4} vs previous)");
        last = peak;
    }
    println!();

    // CEP π: every sample negates exactly (no roundoff involved — the
    // carrier phase enters through a single cosine).
    let plus = spec.synthesize(&grid, 3.5 * NJ, gain).unwrap();
    let minus = synthesize_transient(
        &grid,
        3.5 * NJ,
        std::f64::consts::PI,
        spec.center_freq,
        spec.env_fwhm,
        gain,
    )
    .unwrap();
    let worst = plus
        .field
        .iter()
        .zip(&minus.field)
        .map(|(a, b)| (a + b).abs())
        .fold(0.0f64, f64::max);
    println!("CEP flip mirror residual: {worst:.3e} V/m (exact zero expected)");
    println!();

    // Optical rectification: the pump's intensity envelope, differentiated
    // twice, radiates a single-cycle transient. For a Gaussian envelope
    // the spectral centroid has the closed form (2/π)·sqrt(a/π) with
    // a = 4 ln2 / fwhm².
    let or_grid = make_grid(-256.0 * FS, 0.25 * FS, 2048).unwrap();
    let pulse = optical_rectification(&or_grid, 12.0 * FS, 1.0, 1.0).unwrap();
    let centroid = spectrum_centroid(&pulse.field, &or_grid).unwrap();
    let a = 4.0 * std::f64::consts::LN_2 / (12.0 * FS * 12.0 * FS);
    let analytic = (2.0 / std::f64::consts::PI) * (a / std::f64::consts::PI).sqrt();
    println!(
        "optical rectification of a 12 fs pump: centroid {:.3} THz (analytic {:.3} THz)",
        centroid / THZ,
        analytic / THZ
    );
}
