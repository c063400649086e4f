//! Bare vacuum amplitude of a probed space-time segment.
//!
//! Electro-optic sampling with a focused few-femtosecond probe reads the
//! field averaged over one space-time segment: transverse area
//! ΔxΔy = π·w², longitudinal extent Δz = c·Δt/n and duration Δt. The
//! uncertainty principle assigns that segment a minimum field variance,
//! ΔE_vac² · ε₀ · ΔxΔy · Δz · Δt = ħ — squeezing it below that value at
//! some delay necessarily raises it above at another.
//!
//! Run with `cargo run --example vacuum_amplitude`.

use squeezeo::constants::units::to_v_per_cm;
use squeezeo::vacuum::WidthConvention;
use squeezeo::{make_reference_vacuum, vacuum_amplitude, vacuum_fraction, PhysConstants, ProbeParams};

fn main() {
    let consts = PhysConstants::default();
    let probe = ProbeParams::few_cycle(); // 5.8 fs, 3.6 um waist, n_g = 2.6

    println!("probe: {:.1} fs duration, {:.1} um waist, group index {:.1}",
             probe.duration * 1e15, probe.waist * 1e6, probe.group_index);
    println!();

    // The temporal window Δt depends on how the probe duration is read.
    println!("vacuum amplitude by width convention:");
    for convention in [
        WidthConvention::Fwhm,
        WidthConvention::Rms,
        WidthConvention::Integral,
    ] {
        let stats = vacuum_amplitude(&probe, &consts, convention).unwrap();
        println!(
            "  {convention:>8?}: dt = {:5.2} fs, dz = {:5.2} um  ->  dE_vac = {:7.3} V/cm",
            stats.segment.dt * 1e15,
            stats.segment.dz * 1e6,
            to_v_per_cm(stats.delta_e_vac)
        );
        // The ħ-product must close exactly, whatever the convention.
        let residual = stats.product_residual(&consts);
        assert!(residual.abs() < 1e-12, "uncertainty product violated: {residual}");
    }
    println!();

    // An experiment calibrates its own effective segment; a quoted
    // amplitude can be wrapped in consistent statistics directly.
    let reference = make_reference_vacuum(2400.0, &consts).unwrap(); // 24 V/cm
    println!(
        "reference vacuum: {:.1} V/cm (product residual {:.1e})",
        to_v_per_cm(reference.delta_e_vac),
        reference.product_residual(&consts)
    );

    // Against an 81 V/cm shot-noise floor, the bare vacuum contributes a
    // few percent of the total read-out noise — the scale every
    // squeezing signature lives on.
    let frac = vacuum_fraction(reference.delta_e_vac, 8100.0);
    println!(
        "vacuum fraction of the total noise at dE_SN = 81 V/cm: {:.4} ({:.2} %)",
        frac,
        100.0 * frac
    );
}
