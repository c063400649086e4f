//! # squeezeo
//!
//! Time-domain simulator for subcycle squeezing of the mid-infrared
//! vacuum field and its electro-optic readout.
//!
//! A few-cycle transient co-propagating with vacuum fluctuations through
//! a thin χ⁽²⁾ crystal rescales the fluctuation amplitude by a
//! time-local factor `exp(f(t))` with `f ∝ ∂E/∂t`: noise is squeezed
//! below the bare vacuum on one slope of each field cycle and
//! anti-squeezed on the other. A second, phase-locked few-femtosecond
//! probe then samples the resulting noise pattern electro-optically as a
//! delay-dependent relative deviation of its shot-noise floor.
//!
//! The crate models that chain end to end: waveform synthesis, the bare
//! vacuum amplitude of the probed space-time segment, the squeezing
//! profile and its propagation through the crystal (analytic map or
//! explicit z-march), statistical electro-optic detection with
//! shot-noise, and parameter recovery from simulated pump-energy sweeps.
//!
//! Start with the runnable programs in `examples/` — one per capability —
//! or the `squeezeo` binary, which executes TOML scenario files.

pub mod constants;
pub mod detect;
pub mod error;
pub mod export;
pub mod figures;
pub mod fit;
pub mod grid;
pub mod propagate;
pub mod scenario;
pub mod spectral;
pub mod squeeze;
pub mod vacuum;
pub mod waveform;

pub use constants::PhysConstants;
pub use detect::{
    analytic_rdn_trace, coherent_readout, rdn_exact, rdn_linearized, simulate_lockin_rdn,
    simulate_rdn_at, vacuum_fraction, CoherentReadout, DetectionParams, RdnMode, RdnTrace,
};
pub use error::{Error, ErrorKind, Result};
pub use fit::{branch_asymmetry, fit_sweep, model_branches, FitResult, SweepPoint};
pub use grid::{make_grid, TimeGrid};
pub use propagate::{propagate_ensemble, PropagationConfig, PropagationMethod, Propagator};
pub use scenario::{
    load_manifest, load_scenario, resolve, run_resolved, scenario_hash, scenario_or_manifest,
    sweep_resolved, ResolvedScenario, RunManifest, Scenario,
};
pub use squeeze::{
    analytic_noise, calibrate_gain, extrema_of_noise, pockels_velocity, squeezing_factor,
    NoiseExtrema, SqueezingProfile, VelocityProfile,
};
pub use vacuum::{
    admix_vacuum, make_reference_vacuum, sample_vacuum_ensemble, vacuum_amplitude, FieldEnsemble,
    VacuumSampler, VacuumStats, WidthConvention,
};
pub use waveform::{
    optical_rectification, synthesize_transient, CoherentTransient, CrystalParams, DerivMode,
    ProbeParams, TransientSpec,
};
