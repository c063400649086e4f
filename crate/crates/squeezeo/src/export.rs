//! Plain-text data formats of the tool.
//!
//! Every tabular output is CSV with a fixed column set, floats printed as
//! `{:.11e}` (full round-trip precision, locale-independent), and a block
//! of `# key = value` comment lines up front carrying the provenance a
//! reader needs to interpret or re-fit the numbers (field calibrations,
//! seeds, scenario hash). Writers build the whole document as a string so
//! callers can hash and persist it atomically; readers parse strictly and
//! report malformed files as [`Error::DataFormat`].

use std::collections::BTreeMap;
use std::path::Path;

use crate::detect::{RdnMode, RdnTrace};
use crate::error::{Error, Result};
use crate::fit::{FitResult, SweepPoint};

/// Canonical float formatting of all CSV payloads: 12 significant digits
/// in scientific notation, enough to round-trip f64 values that matter.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Exact column set of each CSV kind, also used to recognize files.
pub mod columns {
    pub const PROFILE: &str = "t_fs,E_Vcm,f,dErms_Vcm,RDN_analytic";
    pub const VELOCITY: &str = "t_fs,E_Vcm,delta_n,v_loc_m_per_s,f_from_velocity";
    pub const RDN_TRACE: &str = "t_D_fs,RDN,RDN_stderr,mode";
    pub const COHERENT: &str = "t_D_fs,E_Vcm";
    pub const SWEEP_POINTS: &str = "energy_nJ,rdn_max,rdn_min,stderr_max,stderr_min";
}

fn push_meta(out: &mut String, meta: &[(&str, String)]) {
    for (k, v) in meta {
        out.push_str("# ");
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(v);
        out.push('\n');
    }
}

/// Squeezing-profile table: driver field, squeezing factor, noise
/// pattern and its analytic RDN, one row per grid sample (times in fs,
/// fields in V/cm).
pub fn profile_csv(
    times: &[f64],
    field: &[f64],
    f: &[f64],
    rms: &[f64],
    rdn: &[f64],
    meta: &[(&str, String)],
) -> String {
    let mut out = String::new();
    push_meta(&mut out, meta);
    out.push_str(columns::PROFILE);
    out.push('\n');
    for k in 0..times.len() {
        out.push_str(&format_float(times[k] * 1e15));
        out.push(',');
        out.push_str(&format_float(field[k] / 100.0));
        out.push(',');
        out.push_str(&format_float(f[k]));
        out.push(',');
        out.push_str(&format_float(rms[k] / 100.0));
        out.push(',');
        out.push_str(&format_float(rdn[k]));
        out.push('\n');
    }
    out
}

/// Velocity-view table: index modulation and local phase velocity along
/// with the squeezing factor recomputed from the velocity slew.
pub fn velocity_csv(
    times: &[f64],
    field: &[f64],
    delta_n: &[f64],
    v_loc: &[f64],
    f_from_velocity: &[f64],
    meta: &[(&str, String)],
) -> String {
    let mut out = String::new();
    push_meta(&mut out, meta);
    out.push_str(columns::VELOCITY);
    out.push('\n');
    for k in 0..times.len() {
        out.push_str(&format_float(times[k] * 1e15));
        out.push(',');
        out.push_str(&format_float(field[k] / 100.0));
        out.push(',');
        out.push_str(&format_float(delta_n[k]));
        out.push(',');
        out.push_str(&format_float(v_loc[k]));
        out.push(',');
        out.push_str(&format_float(f_from_velocity[k]));
        out.push('\n');
    }
    out
}

/// Delay-resolved RDN trace; statistical uncertainty is `NaN` where the
/// mode has none (analytic scans).
pub fn rdn_trace_csv(trace: &RdnTrace, meta: &[(&str, String)]) -> String {
    let mut out = String::new();
    push_meta(&mut out, meta);
    out.push_str(columns::RDN_TRACE);
    out.push('\n');
    for k in 0..trace.rdn.len() {
        out.push_str(&format_float(trace.grid.time(k) * 1e15));
        out.push(',');
        out.push_str(&format_float(trace.rdn[k]));
        out.push(',');
        let stderr = trace.stderr.as_ref().map_or(f64::NAN, |s| s[k]);
        out.push_str(&format_float(stderr));
        out.push(',');
        out.push_str(trace.mode.token());
        out.push('\n');
    }
    out
}

/// Coherent electro-optic read-out: detected field per delay [V/cm].
pub fn coherent_csv(times: &[f64], field: &[f64], meta: &[(&str, String)]) -> String {
    let mut out = String::new();
    push_meta(&mut out, meta);
    out.push_str(columns::COHERENT);
    out.push('\n');
    for k in 0..times.len() {
        out.push_str(&format_float(times[k] * 1e15));
        out.push(',');
        out.push_str(&format_float(field[k] / 100.0));
        out.push('\n');
    }
    out
}

/// Pump-energy sweep of the branch extrema (energies in nJ).
pub fn sweep_points_csv(points: &[SweepPoint], meta: &[(&str, String)]) -> String {
    let mut out = String::new();
    push_meta(&mut out, meta);
    out.push_str(columns::SWEEP_POINTS);
    out.push('\n');
    for p in points {
        out.push_str(&format_float(p.energy * 1e9));
        out.push(',');
        out.push_str(&format_float(p.rdn_max));
        out.push(',');
        out.push_str(&format_float(p.rdn_min));
        out.push(',');
        out.push_str(&format_float(p.stderr_max.unwrap_or(f64::NAN)));
        out.push(',');
        out.push_str(&format_float(p.stderr_min.unwrap_or(f64::NAN)));
        out.push('\n');
    }
    out
}

/// Fit outcome as pretty JSON (stable field order).
pub fn fit_report_json(fit: &FitResult, delta_e_vac: f64, delta_e_sn: f64) -> String {
    // Assembled by hand to keep a stable, unit-suffixed schema without a
    // dedicated serde mirror type.
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!(
        "  \"gain_rate_per_j\": {},\n",
        format_float(fit.gain_rate)
    ));
    out.push_str(&format!("  \"eta\": {},\n", format_float(fit.eta)));
    out.push_str(&format!(
        "  \"residual_rms\": {},\n",
        format_float(fit.residual_rms)
    ));
    match fit.g_eta_correlation {
        Some(c) => out.push_str(&format!(
            "  \"g_eta_correlation\": {},\n",
            format_float(c)
        )),
        None => out.push_str("  \"g_eta_correlation\": null,\n"),
    }
    out.push_str(&format!("  \"evaluations\": {},\n", fit.evaluations));
    out.push_str(&format!(
        "  \"delta_e_vac_vcm\": {},\n",
        format_float(delta_e_vac / 100.0)
    ));
    out.push_str(&format!(
        "  \"delta_e_sn_vcm\": {},\n",
        format_float(delta_e_sn / 100.0)
    ));
    out.push_str("  \"squeezing_curve\": [\n");
    for (i, (u, pct)) in fit.squeezing_curve.iter().enumerate() {
        out.push_str(&format!(
            "    {{ \"energy_nj\": {}, \"squeezing_percent\": {} }}{}\n",
            format_float(u * 1e9),
            format_float(*pct),
            if i + 1 < fit.squeezing_curve.len() { "," } else { "" }
        ));
    }
    out.push_str("  ]\n}\n");
    out
}

/// A parsed CSV document: comment metadata, the column-header line, and
/// rows of raw cells.
#[derive(Debug, Clone)]
pub struct CsvDoc {
    pub meta: BTreeMap<String, String>,
    pub header: String,
    pub rows: Vec<Vec<String>>,
}

/// Strict reader for the crate's own CSV dialect.
pub fn read_csv(path: &Path) -> Result<CsvDoc> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_csv(&text, &path.display().to_string())
}

fn parse_csv(text: &str, origin: &str) -> Result<CsvDoc> {
    let mut meta = BTreeMap::new();
    let mut header: Option<String> = None;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        match &header {
            None => header = Some(line.to_string()),
            Some(h) => {
                let cells: Vec<String> = line.split(',').map(|c| c.to_string()).collect();
                let expected = h.split(',').count();
                if cells.len() != expected {
                    return Err(Error::DataFormat {
                        path: origin.to_string(),
                        reason: format!(
                            "line {}: {} cells where the header names {expected} columns",
                            lineno + 1,
                            cells.len()
                        ),
                    });
                }
                rows.push(cells);
            }
        }
    }
    let header = header.ok_or_else(|| Error::DataFormat {
        path: origin.to_string(),
        reason: "no column-header line found".into(),
    })?;
    Ok(CsvDoc {
        meta,
        header,
        rows,
    })
}

impl CsvDoc {
    /// Insist on an exact column set.
    pub fn require_columns(&self, expected: &str, origin: &str) -> Result<()> {
        if self.header != expected {
            return Err(Error::DataFormat {
                path: origin.to_string(),
                reason: format!("columns are '{}', expected '{expected}'", self.header),
            });
        }
        Ok(())
    }

    /// Parse column `idx` as floats (`NaN` passes through).
    pub fn float_column(&self, idx: usize, origin: &str) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row[idx].parse::<f64>().map_err(|_| Error::DataFormat {
                    path: origin.to_string(),
                    reason: format!("row {}: '{}' is not a number", r + 1, row[idx]),
                })
            })
            .collect()
    }

    /// A metadata value parsed as a float.
    pub fn meta_float(&self, key: &str, origin: &str) -> Result<f64> {
        let raw = self.meta.get(key).ok_or_else(|| Error::DataFormat {
            path: origin.to_string(),
            reason: format!("missing '# {key} = …' metadata line"),
        })?;
        raw.parse::<f64>().map_err(|_| Error::DataFormat {
            path: origin.to_string(),
            reason: format!("metadata '{key}' = '{raw}' is not a number"),
        })
    }
}

/// Read a sweep-points file back into fit inputs, along with its
/// metadata block.
pub fn read_sweep_points(path: &Path) -> Result<(Vec<SweepPoint>, BTreeMap<String, String>)> {
    let origin = path.display().to_string();
    let doc = read_csv(path)?;
    doc.require_columns(columns::SWEEP_POINTS, &origin)?;
    let energy = doc.float_column(0, &origin)?;
    let rdn_max = doc.float_column(1, &origin)?;
    let rdn_min = doc.float_column(2, &origin)?;
    let stderr_max = doc.float_column(3, &origin)?;
    let stderr_min = doc.float_column(4, &origin)?;
    let to_opt = |x: f64| if x.is_finite() { Some(x) } else { None };
    let points = (0..energy.len())
        .map(|i| SweepPoint {
            energy: energy[i] * 1e-9,
            rdn_max: rdn_max[i],
            rdn_min: rdn_min[i],
            stderr_max: to_opt(stderr_max[i]),
            stderr_min: to_opt(stderr_min[i]),
        })
        .collect();
    Ok((points, doc.meta))
}

/// A re-read RDN trace: delays [s], values, uncertainties (`None` for
/// analytic scans), and the mode token.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceData {
    pub t: Vec<f64>,
    pub rdn: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
    pub mode: RdnMode,
}

/// Read an RDN trace file back.
pub fn read_rdn_trace(path: &Path) -> Result<(TraceData, BTreeMap<String, String>)> {
    let origin = path.display().to_string();
    let doc = read_csv(path)?;
    doc.require_columns(columns::RDN_TRACE, &origin)?;
    let t: Vec<f64> = doc.float_column(0, &origin)?.iter().map(|x| x * 1e-15).collect();
    let rdn = doc.float_column(1, &origin)?;
    let stderr_raw = doc.float_column(2, &origin)?;
    let mode_token = doc
        .rows
        .first()
        .map(|r| r[3].clone())
        .ok_or_else(|| Error::DataFormat {
            path: origin.clone(),
            reason: "trace has no rows".into(),
        })?;
    let mode = match mode_token.as_str() {
        "analytic" => RdnMode::Analytic,
        "monte_carlo" => RdnMode::MonteCarlo,
        other => {
            return Err(Error::DataFormat {
                path: origin,
                reason: format!("unknown mode token '{other}'"),
            })
        }
    };
    let stderr = if stderr_raw.iter().all(|x| x.is_finite()) {
        Some(stderr_raw)
    } else {
        None
    };
    Ok((
        TraceData {
            t,
            rdn,
            stderr,
            mode,
        },
        doc.meta,
    ))
}

/// Read a coherent read-out file back: delays [s] and fields [V/m].
pub fn read_coherent(path: &Path) -> Result<(Vec<f64>, Vec<f64>, BTreeMap<String, String>)> {
    let origin = path.display().to_string();
    let doc = read_csv(path)?;
    doc.require_columns(columns::COHERENT, &origin)?;
    let t = doc.float_column(0, &origin)?.iter().map(|x| x * 1e-15).collect();
    let e = doc.float_column(1, &origin)?.iter().map(|x| x * 100.0).collect();
    Ok((t, e, doc.meta))
}
