//! Scenario files, their resolution to SI quantities, and the run drivers.
//!
//! A scenario is a TOML document whose keys carry explicit units
//! (`dt_fs`, `waist_um`, `delta_e_sn_vcm`, …). Parsing is strict —
//! unknown keys are errors — and resolution converts everything to SI,
//! applies defaults (thin GaSe emitter, few-cycle probe), and settles the
//! synthesis gain either from an explicit value or by calibrating a
//! target squeezing-factor minimum at an anchor pump energy.
//!
//! Every run writes a `manifest.json` recording the tool version, the
//! fully resolved scenario, a SHA-256 hash of its canonical form, and the
//! name + SHA-256 of every data file produced. Re-running a manifest
//! reproduces the same bytes (wall-clock time aside), which makes run
//! directories self-describing and diffable.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::units::{to_v_per_cm, to_v_per_m, FS, NJ, PM_PER_V, THZ, UM};
use crate::constants::PhysConstants;
use crate::detect::{
    analytic_rdn_trace, coherent_readout, simulate_lockin_rdn, simulate_rdn_at, DetectionParams,
    RdnTrace,
};
use crate::error::{Error, Result};
use crate::export;
use crate::figures;
use crate::fit::{fit_sweep, SweepPoint};
use crate::grid::{make_grid, TimeGrid};
use crate::propagate::{propagate_ensemble, PropagationConfig, PropagationMethod};
use crate::squeeze::{
    analytic_noise, calibrate_gain, pockels_velocity, squeezing_factor, SqueezingProfile,
};
use crate::vacuum::{
    make_reference_vacuum, sample_vacuum_ensemble, vacuum_amplitude, VacuumStats, WidthConvention,
};
use crate::waveform::{CrystalParams, DerivMode, ProbeParams, TransientSpec};

/// Environment variable overriding the output directory (itself overridden
/// by an explicit `--out-dir` flag).
pub const OUT_DIR_ENV: &str = "SQUEEZEO_OUT_DIR";

// ---------------------------------------------------------------------------
// TOML schema (unit-suffixed keys, strict parsing)
// ---------------------------------------------------------------------------

/// Top-level scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub grid: GridSection,
    pub transient: TransientSection,
    #[serde(default)]
    pub crystal: Option<CrystalSection>,
    #[serde(default)]
    pub probe: Option<ProbeSection>,
    pub detection: DetectionSection,
    #[serde(default)]
    pub propagation: Option<PropagationSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// `[grid]`: uniform delay/time axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t0_fs: f64,
    pub dt_fs: f64,
    pub n: usize,
}

/// `[transient]`: the squeezing driver. Exactly one of `gain` or the
/// `[transient.calibration]` subsection must be present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransientSection {
    pub center_freq_thz: f64,
    pub envelope_fwhm_fs: f64,
    #[serde(default)]
    pub cep_rad: f64,
    pub pump_energy_nj: f64,
    #[serde(default)]
    pub gain: Option<f64>,
    #[serde(default)]
    pub calibration: Option<CalibrationSection>,
}

/// `[transient.calibration]`: pin `min_t f(t)` to a (negative) target at
/// an anchor pump energy; the gain needed is found by bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSection {
    pub target_squeezing_factor: f64,
    pub anchor_energy_nj: f64,
}

/// `[crystal]`: generation crystal. Defaults to thin GaSe when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub d_eff_pm_per_v: f64,
    pub refractive_index: f64,
    pub length_um: f64,
    #[serde(default = "default_crystal_label")]
    pub label: String,
}

fn default_crystal_label() -> String {
    "crystal".into()
}

/// `[probe]`: sampling probe. Defaults to the few-cycle probe when absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub duration_fs: f64,
    pub waist_um: f64,
    pub group_index: f64,
    #[serde(default)]
    pub width_convention: WidthConvention,
}

/// `[detection]`: balanced electro-optic read-out settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionSection {
    /// Shot-noise floor referred to the field [V/cm].
    pub delta_e_sn_vcm: f64,
    /// Vacuum amplitude [V/cm]; derived from the probe geometry when
    /// absent.
    #[serde(default)]
    pub delta_e_vac_vcm: Option<f64>,
    #[serde(default = "default_samples_per_point")]
    pub samples_per_point: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub probe_smearing: bool,
    /// Fraction of the detected variance carried by the squeezed field;
    /// the remainder is plain vacuum.
    #[serde(default = "default_eta")]
    pub contamination_eta: f64,
    #[serde(default)]
    pub mode: ScanMode,
}

fn default_samples_per_point() -> usize {
    20_000
}
fn default_seed() -> u64 {
    1
}
fn default_eta() -> f64 {
    1.0
}

/// Which read-out flavors a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    /// Closed-form RDN only.
    Analytic,
    /// Statistical lock-in estimate only.
    MonteCarlo,
    /// Both traces.
    #[default]
    Both,
}

impl ScanMode {
    pub fn includes_analytic(self) -> bool {
        matches!(self, ScanMode::Analytic | ScanMode::Both)
    }
    pub fn includes_monte_carlo(self) -> bool {
        matches!(self, ScanMode::MonteCarlo | ScanMode::Both)
    }
}

/// `[propagation]`: how the noise pattern is obtained — the analytic exit
/// map, or a numerically marched vacuum ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSection {
    #[serde(default)]
    pub method: PropagationMethod,
    #[serde(default = "default_z_steps")]
    pub z_steps: usize,
    #[serde(default = "default_true")]
    pub include_second_term: bool,
    /// Vacuum realizations marched when the method is numerical.
    #[serde(default = "default_ensemble_size")]
    pub ensemble_size: usize,
    /// Band limit of the sampled vacuum [THz]; default 2.5× the carrier
    /// frequency, capped at 0.45 of the grid Nyquist frequency. The guard
    /// band matters for the numerical methods: the shear term spreads
    /// each realization's spectrum by the transient's bandwidth per
    /// product, and content pushed past Nyquist aliases back, degrading
    /// the march or tripping its energy-growth guard.
    #[serde(default)]
    pub band_limit_thz: Option<f64>,
}

fn default_z_steps() -> usize {
    256
}
fn default_true() -> bool {
    true
}
fn default_ensemble_size() -> usize {
    512
}

impl Default for PropagationSection {
    fn default() -> Self {
        PropagationSection {
            method: PropagationMethod::Analytic,
            z_steps: default_z_steps(),
            include_second_term: true,
            ensemble_size: default_ensemble_size(),
            band_limit_thz: None,
        }
    }
}

/// `[sweep]`: pump energies for the branch-extrema sweep and per-energy
/// trace panels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub energies_nj: Vec<f64>,
    /// Samples per extremal delay of the sweep read-out; inherits
    /// `[detection]` when absent.
    #[serde(default)]
    pub samples_per_point: Option<usize>,
}

/// `[output]`: where and what to write.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory; overridable by `--out-dir` and [`OUT_DIR_ENV`].
    #[serde(default)]
    pub dir: Option<String>,
    /// Subset of `["csv", "svg"]`; both by default.
    #[serde(default)]
    pub formats: Option<Vec<OutputFormat>>,
    /// Also emit the carrier-envelope-phase-flipped twin of every trace.
    #[serde(default)]
    pub emit_cep_flipped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Svg,
}

// ---------------------------------------------------------------------------
// Resolved scenario (SI units, canonical form for hashing)
// ---------------------------------------------------------------------------

/// Where the synthesis gain came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainSource {
    Explicit,
    Calibrated {
        target_f_min: f64,
        /// Anchor pump energy [J].
        anchor_energy: f64,
    },
}

/// Where the vacuum amplitude came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VacSource {
    Prescribed,
    DerivedFromProbe,
}

/// Resolved propagation settings (SI).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedPropagation {
    pub method: PropagationMethod,
    pub z_steps: usize,
    pub include_second_term: bool,
    pub ensemble_size: usize,
    /// Band limit of sampled vacuum [Hz].
    pub band_limit: f64,
}

/// Resolved sweep settings (SI).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedSweep {
    /// Pump energies [J].
    pub energies: Vec<f64>,
    pub samples_per_point: usize,
}

/// A scenario with every quantity in SI units and every default applied;
/// the canonical object that gets hashed and embedded in manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedScenario {
    pub grid: TimeGrid,
    pub transient: TransientSpec,
    /// Pump energy [J].
    pub pump_energy: f64,
    /// Synthesis gain (field amplitude per unit pump energy [V/m per J]).
    pub gain: f64,
    pub gain_source: GainSource,
    pub crystal: CrystalParams,
    pub probe: ProbeParams,
    pub width_convention: WidthConvention,
    /// Vacuum amplitude [V/m].
    pub delta_e_vac: f64,
    pub vac_source: VacSource,
    /// Shot-noise floor [V/m].
    pub delta_e_sn: f64,
    pub samples_per_point: usize,
    pub seed: u64,
    pub probe_smearing: bool,
    pub contamination_eta: f64,
    pub scan_mode: ScanMode,
    pub propagation: ResolvedPropagation,
    pub sweep: Option<ResolvedSweep>,
    pub emit_cep_flipped: bool,
    pub formats: Vec<OutputFormat>,
}

impl ResolvedScenario {
    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

/// A produced file and the SHA-256 of its bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

/// The self-describing record every run leaves behind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// "run" or "sweep".
    pub kind: String,
    /// SHA-256 of the canonical resolved scenario.
    pub scenario_hash: String,
    pub seed: u64,
    /// Elapsed wall-clock seconds; informational only, not covered by any
    /// determinism guarantee.
    pub wall_clock_s: f64,
    pub resolved: ResolvedScenario,
    pub files: Vec<FileEntry>,
}

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Canonical hash of a resolved scenario: SHA-256 over its compact JSON
/// form (struct field order is fixed, so the serialization is canonical).
pub fn scenario_hash(resolved: &ResolvedScenario) -> String {
    let json = serde_json::to_string(resolved).expect("resolved scenario serializes");
    sha256_hex(json.as_bytes())
}

// ---------------------------------------------------------------------------
// Loading and resolution
// ---------------------------------------------------------------------------

/// Parse a scenario TOML file (strict: unknown keys are errors).
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Parse a run manifest back from JSON.
pub fn load_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| Error::DataFormat {
        path: path.display().to_string(),
        reason: format!("not a run manifest: {e}"),
    })
}

/// Accept either a scenario TOML or a manifest JSON (re-run), returning
/// the resolved scenario to execute.
pub fn scenario_or_manifest(path: &Path, consts: &PhysConstants) -> Result<ResolvedScenario> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Ok(load_manifest(path)?.resolved),
        Some("toml") => resolve(&load_scenario(path)?, consts),
        _ => Err(Error::Config(format!(
            "{}: expected a .toml scenario or a .json manifest",
            path.display()
        ))),
    }
}

/// Resolve a parsed scenario: units to SI, defaults applied, gain
/// calibrated, and everything validated.
pub fn resolve(scenario: &Scenario, consts: &PhysConstants) -> Result<ResolvedScenario> {
    let g = &scenario.grid;
    let grid = make_grid(g.t0_fs * FS, g.dt_fs * FS, g.n)?;

    let t = &scenario.transient;
    if !(t.center_freq_thz.is_finite() && t.center_freq_thz > 0.0) {
        return Err(Error::Config(format!(
            "[transient] center_freq_thz must be positive, got {}",
            t.center_freq_thz
        )));
    }
    if !(t.envelope_fwhm_fs.is_finite() && t.envelope_fwhm_fs > 0.0) {
        return Err(Error::Config(format!(
            "[transient] envelope_fwhm_fs must be positive, got {}",
            t.envelope_fwhm_fs
        )));
    }
    if !(t.pump_energy_nj.is_finite() && t.pump_energy_nj > 0.0) {
        return Err(Error::Config(format!(
            "[transient] pump_energy_nj must be positive, got {}",
            t.pump_energy_nj
        )));
    }
    let transient = TransientSpec {
        center_freq: t.center_freq_thz * THZ,
        cep: t.cep_rad,
        env_fwhm: t.envelope_fwhm_fs * FS,
    };
    let pump_energy = t.pump_energy_nj * NJ;

    let crystal = match &scenario.crystal {
        Some(c) => CrystalParams::new(
            c.d_eff_pm_per_v * PM_PER_V,
            c.refractive_index,
            c.length_um * UM,
            c.label.clone(),
        )?,
        None => CrystalParams::gase_16um(),
    };

    let (probe, width_convention) = match &scenario.probe {
        Some(p) => (
            ProbeParams::new(p.duration_fs * FS, p.waist_um * UM, p.group_index)?,
            p.width_convention,
        ),
        None => (ProbeParams::few_cycle(), WidthConvention::default()),
    };

    let (gain, gain_source) = match (t.gain, t.calibration) {
        (Some(gain), None) => {
            if !(gain.is_finite() && gain > 0.0) {
                return Err(Error::Config(format!(
                    "[transient] gain must be positive, got {gain}"
                )));
            }
            (gain, GainSource::Explicit)
        }
        (None, Some(cal)) => {
            let anchor = cal.anchor_energy_nj * NJ;
            let gain = calibrate_gain(
                cal.target_squeezing_factor,
                anchor,
                &transient,
                &grid,
                &crystal,
                consts,
                DerivMode::Spectral,
            )?;
            (
                gain,
                GainSource::Calibrated {
                    target_f_min: cal.target_squeezing_factor,
                    anchor_energy: anchor,
                },
            )
        }
        (None, None) => {
            return Err(Error::Config(
                "[transient] needs exactly one of `gain` or a [transient.calibration] \
                 subsection; neither is present"
                    .into(),
            ))
        }
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "[transient] needs exactly one of `gain` or [transient.calibration], not both"
                    .into(),
            ))
        }
    };

    let d = &scenario.detection;
    let delta_e_sn = to_v_per_m(d.delta_e_sn_vcm);
    let (delta_e_vac, vac_source) = match d.delta_e_vac_vcm {
        Some(v) => {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "[detection] delta_e_vac_vcm must be positive, got {v}"
                )));
            }
            (to_v_per_m(v), VacSource::Prescribed)
        }
        None => (
            vacuum_amplitude(&probe, consts, width_convention)?.delta_e_vac,
            VacSource::DerivedFromProbe,
        ),
    };
    if !(0.0..=1.0).contains(&d.contamination_eta) {
        return Err(Error::Config(format!(
            "[detection] contamination_eta must lie in [0, 1], got {}",
            d.contamination_eta
        )));
    }
    // Surface parameter problems here rather than mid-run.
    DetectionParams::new(
        delta_e_sn,
        d.samples_per_point,
        d.seed,
        probe,
        d.probe_smearing,
    )?;

    let p = scenario.propagation.unwrap_or_default();
    if p.z_steps == 0 {
        return Err(Error::Config(
            "[propagation] z_steps must be at least 1".into(),
        ));
    }
    if p.method != PropagationMethod::Analytic && p.ensemble_size < 2 {
        return Err(Error::Config(format!(
            "[propagation] ensemble_size must be at least 2 for a numerical method, got {}",
            p.ensemble_size
        )));
    }
    let band_limit = match p.band_limit_thz {
        Some(b) => {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::Config(format!(
                    "[propagation] band_limit_thz must be positive, got {b}"
                )));
            }
            b * THZ
        }
        // Wide enough to span the squeezing structure (a couple of carrier
        // widths), narrow enough that sheared spectra stay clear of
        // Nyquist, where aliased products would pollute the marches.
        None => (2.5 * t.center_freq_thz * THZ).min(0.45 * grid.nyquist()),
    };
    let propagation = ResolvedPropagation {
        method: p.method,
        z_steps: p.z_steps,
        include_second_term: p.include_second_term,
        ensemble_size: p.ensemble_size,
        band_limit,
    };

    let sweep = match &scenario.sweep {
        Some(s) => {
            if s.energies_nj.is_empty() {
                return Err(Error::Config(
                    "[sweep] energies_nj must not be empty".into(),
                ));
            }
            for &u in &s.energies_nj {
                if !(u.is_finite() && u > 0.0) {
                    return Err(Error::Config(format!(
                        "[sweep] energies must be positive, got {u}"
                    )));
                }
            }
            Some(ResolvedSweep {
                energies: s.energies_nj.iter().map(|&u| u * NJ).collect(),
                samples_per_point: s.samples_per_point.unwrap_or(d.samples_per_point),
            })
        }
        None => None,
    };

    let formats = scenario
        .output
        .formats
        .clone()
        .unwrap_or_else(|| vec![OutputFormat::Csv, OutputFormat::Svg]);
    if formats.is_empty() {
        return Err(Error::Config(
            "[output] formats must not be empty; use [\"csv\"], [\"svg\"] or both".into(),
        ));
    }

    Ok(ResolvedScenario {
        grid,
        transient,
        pump_energy,
        gain,
        gain_source,
        crystal,
        probe,
        width_convention,
        delta_e_vac,
        vac_source,
        delta_e_sn,
        samples_per_point: d.samples_per_point,
        seed: d.seed,
        probe_smearing: d.probe_smearing,
        contamination_eta: d.contamination_eta,
        scan_mode: d.mode,
        propagation,
        sweep,
        emit_cep_flipped: scenario.output.emit_cep_flipped,
        formats,
    })
}

/// Resolve the output directory. Precedence: CLI flag, then the
/// [`OUT_DIR_ENV`] environment value, then the scenario's `[output] dir`,
/// then `out/<scenario stem>/<kind>`.
pub fn resolve_out_dir(
    cli: Option<&Path>,
    env: Option<&str>,
    scenario_dir: Option<&str>,
    scenario_path: &Path,
    kind: &str,
) -> PathBuf {
    if let Some(p) = cli {
        return p.to_path_buf();
    }
    if let Some(e) = env {
        return PathBuf::from(e);
    }
    if let Some(d) = scenario_dir {
        return PathBuf::from(d);
    }
    let stem = scenario_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario");
    PathBuf::from("out").join(stem).join(kind)
}

// ---------------------------------------------------------------------------
// Run drivers
// ---------------------------------------------------------------------------

/// Independent random stream for ensemble sampling, decoupled from the
/// per-delay detection streams that share the scenario seed.
fn ensemble_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

/// Per-energy detection seed: distinct energies must draw independent
/// noise, otherwise sweep residuals correlate across the whole curve.
fn energy_seed(seed: u64, energy_index: usize) -> u64 {
    seed.wrapping_add(1 + energy_index as u64)
}

/// Deterministic energy tag used in file names and panel labels, e.g.
/// `"3.500"` for 3.5 nJ.
pub fn energy_label(energy_j: f64) -> String {
    format!("{:.3}", energy_j * 1e9)
}

/// Synthesize the driver at `(cep, pump_energy)` and fill its noise
/// pattern by the configured route (analytic exit map or marched vacuum
/// ensemble), then apply vacuum contamination.
fn noise_profile(
    res: &ResolvedScenario,
    cep: f64,
    pump_energy: f64,
    vacuum: &VacuumStats,
    consts: &PhysConstants,
) -> Result<SqueezingProfile> {
    let spec = TransientSpec {
        cep,
        ..res.transient
    };
    let transient = spec.synthesize(&res.grid, pump_energy, res.gain)?;
    let profile = squeezing_factor(&transient, &res.crystal, consts, DerivMode::Spectral)?;
    let mut profile = match res.propagation.method {
        PropagationMethod::Analytic => analytic_noise(profile, vacuum),
        _ => {
            let mut ensemble = sample_vacuum_ensemble(
                &res.grid,
                vacuum,
                res.propagation.ensemble_size,
                ensemble_seed(res.seed),
                res.propagation.band_limit,
            )?;
            let config = PropagationConfig {
                method: res.propagation.method,
                z_steps: res.propagation.z_steps,
                include_second_term: res.propagation.include_second_term,
            };
            propagate_ensemble(&mut ensemble, &profile, consts, &config)?;
            let mut p = profile;
            p.delta_e_rms = Some(ensemble.column_rms());
            p
        }
    };
    if res.contamination_eta < 1.0 {
        profile.contaminate(res.contamination_eta, vacuum)?;
    }
    Ok(profile)
}

fn save_file(dir: &Path, name: &str, content: &str, files: &mut Vec<FileEntry>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| Error::io(path.display().to_string(), e))?;
    files.push(FileEntry {
        name: name.to_string(),
        sha256: sha256_hex(content.as_bytes()),
    });
    Ok(())
}

/// Provenance block shared by every CSV of a run.
fn common_meta(res: &ResolvedScenario, hash: &str) -> Vec<(&'static str, String)> {
    vec![
        ("tool", format!("squeezeo {}", env!("CARGO_PKG_VERSION"))),
        ("scenario_hash", hash.to_string()),
        ("crystal", res.crystal.label.clone()),
        (
            "center_freq_thz",
            export::format_float(res.transient.center_freq / THZ),
        ),
        (
            "envelope_fwhm_fs",
            export::format_float(res.transient.env_fwhm / FS),
        ),
        ("gain", export::format_float(res.gain)),
        (
            "delta_e_vac_vcm",
            export::format_float(to_v_per_cm(res.delta_e_vac)),
        ),
        (
            "delta_e_sn_vcm",
            export::format_float(to_v_per_cm(res.delta_e_sn)),
        ),
        ("contamination_eta", export::format_float(res.contamination_eta)),
        ("probe_smearing", res.probe_smearing.to_string()),
        ("seed", res.seed.to_string()),
    ]
}

fn trace_series(trace: &RdnTrace) -> figures::RdnSeries {
    figures::RdnSeries {
        t_fs: trace.grid.times().iter().map(|t| t * 1e15).collect(),
        rdn: trace.rdn.clone(),
        stderr: trace.stderr.clone(),
    }
}

/// Argmax/argmin indices of a slice (first occurrence on ties).
fn extremal_indices(values: &[f64]) -> (usize, usize) {
    let mut i_max = 0;
    let mut i_min = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[i_max] {
            i_max = k;
        }
        if v < values[i_min] {
            i_min = k;
        }
    }
    (i_max, i_min)
}

/// Emit the full trace set of one CEP variant (data files and the
/// overview figure), appending produced files to `files`.
fn emit_variant(
    res: &ResolvedScenario,
    cep: f64,
    suffix: &str,
    dir: &Path,
    vacuum: &VacuumStats,
    consts: &PhysConstants,
    hash: &str,
    files: &mut Vec<FileEntry>,
) -> Result<()> {
    let spec = TransientSpec {
        cep,
        ..res.transient
    };
    let transient = spec.synthesize(&res.grid, res.pump_energy, res.gain)?;
    let profile = noise_profile(res, cep, res.pump_energy, vacuum, consts)?;
    let det = DetectionParams::new(
        res.delta_e_sn,
        res.samples_per_point,
        res.seed,
        res.probe,
        res.probe_smearing,
    )?;

    let mut meta = common_meta(res, hash);
    meta.push(("cep_rad", export::format_float(cep)));
    meta.push((
        "pump_energy_nj",
        export::format_float(res.pump_energy / NJ),
    ));

    // The detection-flavored analytic trace is always computed: it fixes
    // the extremal-delay guides even when only the statistical trace is
    // written.
    let analytic = analytic_rdn_trace(&profile, vacuum, &det, false)?;
    let (i_max, i_min) = extremal_indices(&analytic.rdn);
    let guides = (
        res.grid.time(i_max) * 1e15,
        res.grid.time(i_min) * 1e15,
    );

    let csv = res.wants(OutputFormat::Csv);
    if csv {
        // Raw physics table: unsmeared pattern and its pointwise RDN.
        let rms = profile.rms()?;
        let rdn_raw: Vec<f64> = rms
            .iter()
            .map(|&s| crate::detect::rdn_exact(s, vacuum.delta_e_vac, res.delta_e_sn))
            .collect();
        let times = res.grid.times();
        save_file(
            dir,
            &format!("profile{suffix}.csv"),
            &export::profile_csv(&times, &transient.field, &profile.f, rms, &rdn_raw, &meta),
            files,
        )?;

        let vel = pockels_velocity(&transient, &res.crystal, consts, DerivMode::Spectral)?;
        save_file(
            dir,
            &format!("velocity{suffix}.csv"),
            &export::velocity_csv(
                &times,
                &transient.field,
                &vel.delta_n,
                &vel.v_loc,
                &vel.f_from_velocity,
                &meta,
            ),
            files,
        )?;
    }

    let coherent = coherent_readout(&transient, &res.probe, res.probe_smearing)?;
    if csv {
        save_file(
            dir,
            &format!("coherent{suffix}.csv"),
            &export::coherent_csv(&res.grid.times(), &coherent.field, &meta),
            files,
        )?;
        if res.scan_mode.includes_analytic() {
            save_file(
                dir,
                &format!("rdn_analytic{suffix}.csv"),
                &export::rdn_trace_csv(&analytic, &meta),
                files,
            )?;
        }
    }

    let mc = if res.scan_mode.includes_monte_carlo() {
        let trace = simulate_lockin_rdn(&profile, vacuum, &det)?;
        if csv {
            save_file(
                dir,
                &format!("rdn_monte_carlo{suffix}.csv"),
                &export::rdn_trace_csv(&trace, &meta),
                files,
            )?;
        }
        Some(trace)
    } else {
        None
    };

    if res.wants(OutputFormat::Svg) {
        let coh_vcm: Vec<f64> = coherent.field.iter().map(|&e| to_v_per_cm(e)).collect();
        let t_fs: Vec<f64> = res.grid.times().iter().map(|t| t * 1e15).collect();
        let title = format!(
            "{} nJ transient, CEP {:.3} rad",
            energy_label(res.pump_energy),
            cep
        );
        let svg = figures::overview_svg(
            &title,
            &t_fs,
            &coh_vcm,
            res.scan_mode
                .includes_analytic()
                .then(|| trace_series(&analytic))
                .as_ref(),
            mc.as_ref().map(|t| trace_series(t)).as_ref(),
            Some(guides),
        );
        save_file(dir, &format!("overview{suffix}.svg"), &svg, files)?;
    }
    Ok(())
}

/// Execute a resolved scenario: single-energy trace set (plus the CEP
/// flip twin if requested), per-energy panels when a sweep is declared,
/// figures, and the manifest.
pub fn run_resolved(
    res: &ResolvedScenario,
    dir: &Path,
    consts: &PhysConstants,
) -> Result<RunManifest> {
    let start = Instant::now();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let vacuum = make_reference_vacuum(res.delta_e_vac, consts)?;
    let hash = scenario_hash(res);
    let mut files = Vec::new();

    emit_variant(res, res.transient.cep, "", dir, &vacuum, consts, &hash, &mut files)?;
    if res.emit_cep_flipped {
        emit_variant(
            res,
            res.transient.cep + std::f64::consts::PI,
            "_cep_flipped",
            dir,
            &vacuum,
            consts,
            &hash,
            &mut files,
        )?;
    }

    if let Some(sweep) = res.sweep.clone() {
        let mut panels = Vec::new();
        for (ei, &energy) in sweep.energies.iter().enumerate() {
            let profile = noise_profile(res, res.transient.cep, energy, &vacuum, consts)?;
            let det = DetectionParams::new(
                res.delta_e_sn,
                res.samples_per_point,
                energy_seed(res.seed, ei),
                res.probe,
                res.probe_smearing,
            )?;
            let label = energy_label(energy);
            let mut meta = common_meta(res, &hash);
            meta.push(("cep_rad", export::format_float(res.transient.cep)));
            meta.push(("pump_energy_nj", export::format_float(energy / NJ)));

            let analytic = analytic_rdn_trace(&profile, &vacuum, &det, false)?;
            let mut panel = figures::Panel {
                label: format!("{label} nJ"),
                analytic: None,
                mc: None,
            };
            if res.scan_mode.includes_analytic() {
                if res.wants(OutputFormat::Csv) {
                    save_file(
                        dir,
                        &format!("rdn_analytic_{label}nJ.csv"),
                        &export::rdn_trace_csv(&analytic, &meta),
                        &mut files,
                    )?;
                }
                panel.analytic = Some(trace_series(&analytic));
            }
            if res.scan_mode.includes_monte_carlo() {
                let trace = simulate_lockin_rdn(&profile, &vacuum, &det)?;
                if res.wants(OutputFormat::Csv) {
                    save_file(
                        dir,
                        &format!("rdn_monte_carlo_{label}nJ.csv"),
                        &export::rdn_trace_csv(&trace, &meta),
                        &mut files,
                    )?;
                }
                panel.mc = Some(trace_series(&trace));
            }
            panels.push(panel);
        }
        if res.wants(OutputFormat::Svg) {
            let svg = figures::panels_svg("Noise traces across pump energy", &panels);
            save_file(dir, "energy_panels.svg", &svg, &mut files)?;
        }
    }

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        kind: "run".into(),
        scenario_hash: hash,
        seed: res.seed,
        wall_clock_s: start.elapsed().as_secs_f64(),
        resolved: res.clone(),
        files,
    };
    write_manifest(&manifest, dir)?;
    Ok(manifest)
}

/// Execute the sweep: per energy, read out the two extremal delays,
/// assemble the branch curves, fit the gain-rate/efficiency model, and
/// emit points, fit report, figure and manifest.
pub fn sweep_resolved(
    res: &ResolvedScenario,
    dir: &Path,
    consts: &PhysConstants,
) -> Result<RunManifest> {
    let start = Instant::now();
    let sweep = res.sweep.clone().ok_or_else(|| {
        Error::Config("sweep requested but the scenario has no [sweep] section".into())
    })?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let vacuum = make_reference_vacuum(res.delta_e_vac, consts)?;
    let hash = scenario_hash(res);
    let mut files = Vec::new();

    let mut points = Vec::with_capacity(sweep.energies.len());
    for (ei, &energy) in sweep.energies.iter().enumerate() {
        let profile = noise_profile(res, res.transient.cep, energy, &vacuum, consts)?;
        let guide_det = DetectionParams::new(
            res.delta_e_sn,
            res.samples_per_point,
            energy_seed(res.seed, ei),
            res.probe,
            res.probe_smearing,
        )?;
        // Delay positions come from the deterministic trace; only the
        // values at those two delays are read out statistically. Taking
        // max/min over a full noisy scan would ride the extreme-value
        // bias upward instead.
        let analytic = analytic_rdn_trace(&profile, &vacuum, &guide_det, false)?;
        let (i_max, i_min) = extremal_indices(&analytic.rdn);
        let point = if res.scan_mode == ScanMode::Analytic {
            SweepPoint {
                energy,
                rdn_max: analytic.rdn[i_max],
                rdn_min: analytic.rdn[i_min],
                stderr_max: None,
                stderr_min: None,
            }
        } else {
            let det = DetectionParams::new(
                res.delta_e_sn,
                sweep.samples_per_point,
                energy_seed(res.seed, ei),
                res.probe,
                res.probe_smearing,
            )?;
            let vals = simulate_rdn_at(&profile, &vacuum, &det, &[i_max, i_min])?;
            SweepPoint {
                energy,
                rdn_max: vals[0].0,
                rdn_min: vals[1].0,
                stderr_max: Some(vals[0].1),
                stderr_min: Some(vals[1].1),
            }
        };
        points.push(point);
    }

    let mut meta = common_meta(res, &hash);
    meta.push((
        "sweep_samples_per_point",
        sweep.samples_per_point.to_string(),
    ));
    if res.wants(OutputFormat::Csv) {
        save_file(
            dir,
            "sweep_points.csv",
            &export::sweep_points_csv(&points, &meta),
            &mut files,
        )?;
    }

    let fit = fit_sweep(&points, res.delta_e_vac, res.delta_e_sn)?;
    save_file(
        dir,
        "fit_report.json",
        &export::fit_report_json(&fit, res.delta_e_vac, res.delta_e_sn),
        &mut files,
    )?;
    if res.wants(OutputFormat::Svg) {
        let svg = figures::sweep_svg(
            "Branch extrema vs pump energy",
            &points,
            &fit,
            res.delta_e_vac,
            res.delta_e_sn,
        );
        save_file(dir, "sweep_fit.svg", &svg, &mut files)?;
    }

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        kind: "sweep".into(),
        scenario_hash: hash,
        seed: res.seed,
        wall_clock_s: start.elapsed().as_secs_f64(),
        resolved: res.clone(),
        files,
    };
    write_manifest(&manifest, dir)?;
    Ok(manifest)
}

fn write_manifest(manifest: &RunManifest, dir: &Path) -> Result<()> {
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes") + "\n";
    std::fs::write(&path, json).map_err(|e| Error::io(path.display().to_string(), e))
}

// ---------------------------------------------------------------------------
// Validation report
// ---------------------------------------------------------------------------

/// Human-readable resolution report for the `validate` verb: derived
/// quantities a user should sanity-check before a long run.
pub fn describe(res: &ResolvedScenario, consts: &PhysConstants) -> Result<String> {
    use std::fmt::Write as _;
    let vacuum = make_reference_vacuum(res.delta_e_vac, consts)?;
    let profile = noise_profile(res, res.transient.cep, res.pump_energy, &vacuum, consts)?;
    let extrema = crate::squeeze::extrema_of_noise(&profile)?;
    let peak = profile.transient.peak_field();

    let mut s = String::new();
    let g = &res.grid;
    writeln!(
        s,
        "grid: {} samples, dt = {:.4} fs, span {:.1} fs ({:.1} to {:.1} fs)",
        g.len(),
        g.dt() / FS,
        g.span() / FS,
        g.t0() / FS,
        g.end() / FS
    )
    .ok();
    writeln!(
        s,
        "carrier: {:.2} THz ({:.2} samples per cycle), envelope FWHM {:.1} fs, CEP {:.3} rad",
        res.transient.center_freq / THZ,
        1.0 / (res.transient.center_freq * g.dt()),
        res.transient.env_fwhm / FS,
        res.transient.cep
    )
    .ok();
    match res.gain_source {
        GainSource::Explicit => {
            writeln!(s, "gain: {:.6e} (explicit)", res.gain).ok();
        }
        GainSource::Calibrated {
            target_f_min,
            anchor_energy,
        } => {
            writeln!(
                s,
                "gain: {:.6e} (calibrated: min f = {:.6} at {} nJ)",
                res.gain,
                target_f_min,
                energy_label(anchor_energy)
            )
            .ok();
        }
    }
    writeln!(
        s,
        "crystal: {} (d_eff {:.1} pm/V, n {:.3}, length {:.1} um)",
        res.crystal.label,
        res.crystal.d_eff / PM_PER_V,
        res.crystal.n,
        res.crystal.length / UM
    )
    .ok();
    writeln!(
        s,
        "vacuum amplitude: {:.4} V/cm ({}), shot-noise floor {:.4} V/cm",
        to_v_per_cm(res.delta_e_vac),
        match res.vac_source {
            VacSource::Prescribed => "prescribed",
            VacSource::DerivedFromProbe => "derived from probe geometry",
        },
        to_v_per_cm(res.delta_e_sn)
    )
    .ok();
    writeln!(
        s,
        "uncertainty-product residual of the probed segment: {:.3e}",
        vacuum.product_residual(consts)
    )
    .ok();
    writeln!(
        s,
        "at {} nJ: peak field {:.4e} V/cm, max |f| = {:.6}",
        energy_label(res.pump_energy),
        to_v_per_cm(peak),
        profile.max_abs_f
    )
    .ok();
    writeln!(
        s,
        "noise extrema: max {:.4} V/cm at {:.2} fs, min {:.4} V/cm at {:.2} fs",
        to_v_per_cm(extrema.rms_max),
        extrema.t_max / FS,
        to_v_per_cm(extrema.rms_min),
        extrema.t_min / FS
    )
    .ok();
    if let Some(sweep) = &res.sweep {
        let labels: Vec<String> = sweep.energies.iter().map(|&u| energy_label(u)).collect();
        writeln!(
            s,
            "sweep: {} energies [{}] nJ, {} samples per extremal delay",
            sweep.energies.len(),
            labels.join(", "),
            sweep.samples_per_point
        )
        .ok();
    }
    writeln!(
        s,
        "read-out: {:?} mode, {} samples per delay, seed {}, smearing {}, eta {:.4}",
        res.scan_mode,
        res.samples_per_point,
        res.seed,
        res.probe_smearing,
        res.contamination_eta
    )
    .ok();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONSTS: PhysConstants = PhysConstants::CODATA2018;

    fn minimal_toml() -> String {
        r#"
            [grid]
            t0_fs = -128.0
            dt_fs = 1.0
            n = 256

            [transient]
            center_freq_thz = 44.0
            envelope_fwhm_fs = 36.0
            pump_energy_nj = 3.5
            gain = 2.0e13

            [detection]
            delta_e_sn_vcm = 81.0
            samples_per_point = 200
            seed = 7
            mode = "both"
        "#
        .to_string()
    }

    fn parse(text: &str) -> Scenario {
        toml::from_str(text).expect("scenario parses")
    }

    #[test]
    fn minimal_scenario_resolves_with_defaults() {
        let res = resolve(&parse(&minimal_toml()), &CONSTS).unwrap();
        assert_eq!(res.crystal.label, "GaSe", "default crystal is the GaSe emitter");
        assert!(
            (res.probe.duration / FS - 5.8).abs() < 1e-12,
            "default probe is the few-cycle probe"
        );
        // Default vacuum amplitude follows from the probe geometry.
        assert!(
            (res.delta_e_vac / 8.684295791137e3 - 1.0).abs() < 1e-9,
            "derived vacuum amplitude off: {}",
            res.delta_e_vac
        );
        assert_eq!(res.vac_source, VacSource::DerivedFromProbe);
        assert_eq!(res.scan_mode, ScanMode::Both);
        assert_eq!(res.propagation.method, PropagationMethod::Analytic);
        assert!(res.wants(OutputFormat::Csv) && res.wants(OutputFormat::Svg));
        assert!((res.contamination_eta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = minimal_toml().replace("[grid]", "[grid]\nt1_fs = 3.0");
        let err = toml::from_str::<Scenario>(&text).unwrap_err();
        assert!(
            err.to_string().contains("t1_fs"),
            "error should name the offending key: {err}"
        );
    }

    #[test]
    fn gain_and_calibration_are_mutually_exclusive() {
        let both = minimal_toml().replace(
            "gain = 2.0e13",
            "gain = 2.0e13\n[transient.calibration]\ntarget_squeezing_factor = -0.69\nanchor_energy_nj = 3.5",
        );
        // TOML ordering: the subsection must come after scalar keys of
        // [transient]; the replacement above keeps that true only because
        // `gain` is the last scalar. Re-parse and expect a config error.
        let scenario = parse(&both);
        match resolve(&scenario, &CONSTS) {
            Err(Error::Config(msg)) => assert!(msg.contains("not both"), "got: {msg}"),
            other => panic!("expected a config error, got {other:?}"),
        }

        let neither = minimal_toml().replace("gain = 2.0e13", "");
        match resolve(&parse(&neither), &CONSTS) {
            Err(Error::Config(msg)) => assert!(msg.contains("neither"), "got: {msg}"),
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn calibration_resolves_to_the_requested_minimum() {
        let text = minimal_toml().replace(
            "gain = 2.0e13",
            "[transient.calibration]\ntarget_squeezing_factor = -0.6931471805599453\nanchor_energy_nj = 3.5",
        );
        let res = resolve(&parse(&text), &CONSTS).unwrap();
        assert!(matches!(res.gain_source, GainSource::Calibrated { .. }));
        // Re-derive min f at the anchor energy with the resolved gain.
        let tr = res
            .transient
            .synthesize(&res.grid, 3.5 * NJ, res.gain)
            .unwrap();
        let prof = squeezing_factor(&tr, &res.crystal, &CONSTS, DerivMode::Spectral).unwrap();
        let min_f = prof.f.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        assert!(
            (min_f / -std::f64::consts::LN_2 - 1.0).abs() < 1e-8,
            "calibrated minimum off target: {min_f}"
        );
    }

    #[test]
    fn scenario_hash_is_stable_and_sensitive() {
        let a = resolve(&parse(&minimal_toml()), &CONSTS).unwrap();
        let b = resolve(&parse(&minimal_toml()), &CONSTS).unwrap();
        assert_eq!(scenario_hash(&a), scenario_hash(&b), "resolution must be deterministic");
        let other = resolve(
            &parse(&minimal_toml().replace("pump_energy_nj = 3.5", "pump_energy_nj = 2.5")),
            &CONSTS,
        )
        .unwrap();
        assert_ne!(
            scenario_hash(&a),
            scenario_hash(&other),
            "hash must react to parameter changes"
        );
    }

    #[test]
    fn run_emits_hashed_files_and_reruns_identically() {
        let res = resolve(&parse(&minimal_toml()), &CONSTS).unwrap();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let a = run_resolved(&res, dir_a.path(), &CONSTS).unwrap();
        assert_eq!(a.kind, "run");
        assert!(!a.files.is_empty());
        for entry in &a.files {
            let bytes = std::fs::read(dir_a.path().join(&entry.name)).unwrap();
            assert_eq!(
                sha256_hex(&bytes),
                entry.sha256,
                "{} hash mismatch",
                entry.name
            );
        }
        let names: Vec<&str> = a.files.iter().map(|f| f.name.as_str()).collect();
        for expected in [
            "profile.csv",
            "velocity.csv",
            "coherent.csv",
            "rdn_analytic.csv",
            "rdn_monte_carlo.csv",
            "overview.svg",
        ] {
            assert!(names.contains(&expected), "missing {expected} in {names:?}");
        }

        let b = run_resolved(&res, dir_b.path(), &CONSTS).unwrap();
        assert_eq!(
            a.files, b.files,
            "re-running the same resolved scenario must reproduce every byte"
        );

        // The manifest loads back and re-resolves to the same hash.
        let manifest = load_manifest(&dir_a.path().join("manifest.json")).unwrap();
        assert_eq!(manifest.resolved, res);
        assert_eq!(scenario_hash(&manifest.resolved), a.scenario_hash);
    }

    #[test]
    fn cep_flip_twin_files_appear_on_request() {
        let text = minimal_toml() + "\n[output]\nemit_cep_flipped = true\n";
        let res = resolve(&parse(&text), &CONSTS).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let m = run_resolved(&res, dir.path(), &CONSTS).unwrap();
        let names: Vec<&str> = m.files.iter().map(|f| f.name.as_str()).collect();
        assert!(names.contains(&"rdn_monte_carlo_cep_flipped.csv"), "{names:?}");
        assert!(names.contains(&"overview_cep_flipped.svg"), "{names:?}");
    }

    #[test]
    fn sweep_emits_points_fit_and_figure() {
        let text = minimal_toml()
            + "\n[sweep]\nenergies_nj = [1.0, 2.0, 3.5]\nsamples_per_point = 2000\n";
        let res = resolve(&parse(&text), &CONSTS).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let m = sweep_resolved(&res, dir.path(), &CONSTS).unwrap();
        assert_eq!(m.kind, "sweep");
        let names: Vec<&str> = m.files.iter().map(|f| f.name.as_str()).collect();
        for expected in ["sweep_points.csv", "fit_report.json", "sweep_fit.svg"] {
            assert!(names.contains(&expected), "missing {expected} in {names:?}");
        }
        let (points, meta) =
            export::read_sweep_points(&dir.path().join("sweep_points.csv")).unwrap();
        assert_eq!(points.len(), 3);
        assert!(
            points.iter().all(|p| p.stderr_max.is_some()),
            "statistical sweep must carry uncertainties"
        );
        assert!(
            points[2].rdn_max > points[0].rdn_max,
            "anti-squeezed branch must grow with pump energy: {points:?}"
        );
        // The metadata block carries what `fit` needs to re-run.
        assert!(meta.contains_key("delta_e_sn_vcm"));
        assert!(meta.contains_key("delta_e_vac_vcm"));
    }

    #[test]
    fn out_dir_precedence_is_cli_env_scenario_default() {
        let path = Path::new("scenarios/demo.toml");
        let cli = PathBuf::from("cli_dir");
        assert_eq!(
            resolve_out_dir(Some(&cli), Some("env_dir"), Some("scen_dir"), path, "run"),
            cli
        );
        assert_eq!(
            resolve_out_dir(None, Some("env_dir"), Some("scen_dir"), path, "run"),
            PathBuf::from("env_dir")
        );
        assert_eq!(
            resolve_out_dir(None, None, Some("scen_dir"), path, "run"),
            PathBuf::from("scen_dir")
        );
        assert_eq!(
            resolve_out_dir(None, None, None, path, "sweep"),
            PathBuf::from("out").join("demo").join("sweep")
        );
    }

    #[test]
    fn describe_reports_the_derived_quantities() {
        let res = resolve(&parse(&minimal_toml()), &CONSTS).unwrap();
        let report = describe(&res, &CONSTS).unwrap();
        assert!(report.contains("samples per cycle"), "{report}");
        assert!(report.contains("noise extrema"), "{report}");
        assert!(report.contains("86.84"), "vacuum amplitude in V/cm: {report}");
    }
}
