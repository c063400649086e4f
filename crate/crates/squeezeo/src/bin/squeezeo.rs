//! Command-line front end: execute scenario files, sweep pump energies,
//! refit sweep data, regenerate figures, and validate configurations.
//!
//! Exit codes: 0 on success, 2 for configuration/input problems, 3 for
//! numerical failures (instability, breakdown, non-convergent fits).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use squeezeo::constants::units::to_v_per_m;
use squeezeo::error::{Error, Result};
use squeezeo::scenario::{
    self, load_manifest, load_scenario, resolve, resolve_out_dir, run_resolved,
    scenario_or_manifest, sweep_resolved, RunManifest, OUT_DIR_ENV,
};
use squeezeo::{export, figures, fit_sweep, PhysConstants};

#[derive(Parser)]
#[command(
    name = "squeezeo",
    version,
    about = "Subcycle vacuum squeezing and its electro-optic read-out",
    long_about = "Simulates how a few-cycle mid-infrared transient squeezes the vacuum \
                  field inside a thin nonlinear crystal and how a phase-locked probe \
                  reads the resulting sub-cycle noise pattern out electro-optically."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario TOML file, or a manifest.json to re-run its embedded
    /// scenario.
    scenario: PathBuf,
    /// Output directory (overrides SQUEEZEO_OUT_DIR and [output] dir).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores). Results are identical for
    /// any thread count.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario: traces, figures and a manifest.
    Run(RunArgs),
    /// Sweep the scenario's pump energies and fit the gain/efficiency
    /// model to the branch extrema.
    Sweep(RunArgs),
    /// Fit the model to an existing sweep_points.csv.
    Fit {
        /// sweep_points.csv produced by `squeezeo sweep`.
        points: PathBuf,
        /// Shot-noise floor [V/cm]; taken from the file's metadata when
        /// omitted.
        #[arg(long)]
        delta_e_sn_vcm: Option<f64>,
        /// Vacuum amplitude [V/cm]; taken from the file's metadata when
        /// omitted.
        #[arg(long)]
        delta_e_vac_vcm: Option<f64>,
        /// Where to write fit_report.json (default: next to the input).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the figures of a finished run from its data files.
    Figures {
        /// manifest.json of the run directory.
        manifest: PathBuf,
    },
    /// Parse, resolve and report a scenario without running it.
    Validate {
        /// Scenario TOML file.
        scenario: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn install_thread_pool(threads: Option<usize>) -> Result<()> {
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn report_manifest(manifest: &RunManifest, dir: &std::path::Path) {
    println!(
        "{}: {} files in {} ({:.2} s)",
        manifest.kind,
        manifest.files.len(),
        dir.display(),
        manifest.wall_clock_s
    );
    for f in &manifest.files {
        println!("  {}  {}", &f.sha256[..12], f.name);
    }
    println!("  scenario hash {}", manifest.scenario_hash);
}

fn dispatch(cli: Cli) -> Result<()> {
    let consts = PhysConstants::default();
    match cli.command {
        Command::Run(args) => {
            install_thread_pool(args.threads)?;
            let res = scenario_or_manifest(&args.scenario, &consts)?;
            let dir = out_dir(&args, &res, "run")?;
            let manifest = run_resolved(&res, &dir, &consts)?;
            report_manifest(&manifest, &dir);
            Ok(())
        }
        Command::Sweep(args) => {
            install_thread_pool(args.threads)?;
            let res = scenario_or_manifest(&args.scenario, &consts)?;
            let dir = out_dir(&args, &res, "sweep")?;
            let manifest = sweep_resolved(&res, &dir, &consts)?;
            report_manifest(&manifest, &dir);
            Ok(())
        }
        Command::Fit {
            points,
            delta_e_sn_vcm,
            delta_e_vac_vcm,
            out,
        } => {
            let origin = points.display().to_string();
            let (data, meta) = export::read_sweep_points(&points)?;
            let from_meta = |key: &str, flag: Option<f64>| -> Result<f64> {
                if let Some(v) = flag {
                    return Ok(to_v_per_m(v));
                }
                let doc = export::CsvDoc {
                    meta: meta.clone(),
                    header: String::new(),
                    rows: Vec::new(),
                };
                Ok(to_v_per_m(doc.meta_float(key, &origin)?))
            };
            let sn = from_meta("delta_e_sn_vcm", delta_e_sn_vcm)?;
            let vac = from_meta("delta_e_vac_vcm", delta_e_vac_vcm)?;
            let fit = fit_sweep(&data, vac, sn)?;
            let report = export::fit_report_json(&fit, vac, sn);
            let out_path = out.unwrap_or_else(|| {
                points
                    .parent()
                    .unwrap_or_else(|| std::path::Path::new("."))
                    .join("fit_report.json")
            });
            std::fs::write(&out_path, &report)
                .map_err(|e| Error::io(out_path.display().to_string(), e))?;
            println!(
                "fit: gain rate {:.6e} /J, eta = {:.6}, residual rms {:.3e} over {} points",
                fit.gain_rate,
                fit.eta,
                fit.residual_rms,
                data.len()
            );
            for (u, pct) in &fit.squeezing_curve {
                println!(
                    "  {} nJ: {:.2} % field squeezing at the noise minimum",
                    scenario::energy_label(*u),
                    pct
                );
            }
            println!("report written to {}", out_path.display());
            Ok(())
        }
        Command::Figures { manifest } => {
            let m = load_manifest(&manifest)?;
            let dir = manifest
                .parent()
                .unwrap_or_else(|| std::path::Path::new("."))
                .to_path_buf();
            let written = figures::regenerate(&m, &dir)?;
            if written.is_empty() {
                println!("no figure inputs among the manifest's data files");
            }
            for f in &written {
                println!("  {}  {}", &f.sha256[..12], f.name);
            }
            Ok(())
        }
        Command::Validate { scenario } => {
            let parsed = load_scenario(&scenario)?;
            let res = resolve(&parsed, &consts)?;
            print!("{}", scenario::describe(&res, &consts)?);
            println!("scenario hash {}", scenario::scenario_hash(&res));
            println!("ok: {}", scenario.display());
            Ok(())
        }
    }
}

/// Output-directory resolution for run/sweep, honoring the scenario's
/// `[output] dir` only when the input was a TOML scenario.
fn out_dir(
    args: &RunArgs,
    res: &scenario::ResolvedScenario,
    kind: &str,
) -> Result<PathBuf> {
    // The [output] dir of the *scenario file* is not part of the resolved
    // form (it must not influence the scenario hash), so re-read it when
    // the input was a TOML file.
    let scenario_dir = match args.scenario.extension().and_then(|e| e.to_str()) {
        Some("toml") => load_scenario(&args.scenario)?.output.dir,
        _ => None,
    };
    let _ = res;
    let env = std::env::var(OUT_DIR_ENV).ok();
    Ok(resolve_out_dir(
        args.out_dir.as_deref(),
        env.as_deref(),
        scenario_dir.as_deref(),
        &args.scenario,
        kind,
    ))
}
