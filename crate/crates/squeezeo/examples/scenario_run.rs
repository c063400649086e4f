//! Driving the full pipeline from a scenario file.
//!
//! The `squeezeo` binary executes TOML scenarios; this example does the
//! same through the library API: load, resolve (units to SI, defaults,
//! gain calibration), run into a directory, and inspect the manifest the
//! run leaves behind. Re-running the resolved scenario — or the
//! manifest, which embeds it — reproduces every data file byte for byte.
//!
//! Run with `cargo run --example scenario_run`.

use std::path::Path;

use squeezeo::scenario::{load_manifest, GainSource};
use squeezeo::{load_scenario, resolve, run_resolved, scenario_hash, PhysConstants};

fn main() {
    let consts = PhysConstants::default();
    // The bundled scenarios live at the workspace root.
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/cep_flip.toml");
    let scenario = load_scenario(&path).expect("bundled scenario parses");
    let resolved = resolve(&scenario, &consts).expect("scenario resolves");

    match resolved.gain_source {
        GainSource::Calibrated { target_f_min, .. } => println!(
            "gain {:.4e}, calibrated for min f = {:.4}",
            resolved.gain, target_f_min
        ),
        GainSource::Explicit => println!("gain {:.4e} (explicit)", resolved.gain),
    }
    println!("scenario hash {}", scenario_hash(&resolved));

    let dir = std::env::temp_dir().join("squeezeo_scenario_run_example");
    let manifest = run_resolved(&resolved, &dir, &consts).expect("run completes");
    println!(
        "\nwrote {} files to {} in {:.2} s:",
        manifest.files.len(),
        dir.display(),
        manifest.wall_clock_s
    );
    for f in &manifest.files {
        println!("  {}  {}", &f.sha256[..12], f.name);
    }

    // The manifest round-trips and its embedded scenario re-hashes to
    // the same value: the run directory is self-describing.
    let back = load_manifest(&dir.join("manifest.json")).expect("manifest loads");
    assert_eq!(back.scenario_hash, scenario_hash(&back.resolved));
    println!("\nmanifest round-trip ok; `squeezeo run {}/manifest.json` re-runs it", dir.display());
}
