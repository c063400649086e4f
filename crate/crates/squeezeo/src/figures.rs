//! Deterministic SVG figures, hand-assembled (no drawing dependency).
//!
//! Every figure is a pure function of its input data: coordinates are
//! formatted with fixed precision and tick positions are integer
//! multiples of a decimal step, so identical inputs produce identical
//! bytes. Three layouts exist — a two-panel run overview (coherent
//! read-out above the delay-resolved RDN), a stack of per-energy RDN
//! panels, and the pump-energy sweep with its fitted branch curves and a
//! secondary squeezing axis.

use std::path::Path;

use crate::error::{Error, Result};
use crate::export;
use crate::fit::{fit_sweep, model_branches, FitResult, SweepPoint};
use crate::scenario::{energy_label, FileEntry, RunManifest};

/// A delay-resolved RDN series prepared for plotting (times in fs).
#[derive(Debug, Clone, PartialEq)]
pub struct RdnSeries {
    pub t_fs: Vec<f64>,
    pub rdn: Vec<f64>,
    /// One-sigma error bars (statistical series).
    pub stderr: Option<Vec<f64>>,
}

/// One per-energy panel of the stacked figure.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub label: String,
    pub analytic: Option<RdnSeries>,
    pub mc: Option<RdnSeries>,
}

/// Pixel-coordinate formatting; two decimals keep files compact while
/// staying far below visible resolution.
fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Tick-label formatting: plain decimal trimmed of trailing zeros, or
/// compact scientific notation outside [1e-4, 1e5).
fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-4..1e5).contains(&a) {
        return format!("{v:.2e}");
    }
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// Decimal-friendly tick positions covering [min, max] with about
/// `target` intervals; every position is an integer multiple of the step.
fn nice_ticks(min: f64, max: f64, target: usize) -> Vec<f64> {
    let (min, max) = if max > min {
        (min, max)
    } else {
        (min - 1.0, min + 1.0)
    };
    let raw = (max - min) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| raw <= s)
        .unwrap_or(10.0 * mag);
    let mut ticks = Vec::new();
    let mut k = (min / step).ceil() as i64;
    while (k as f64) * step <= max + 1e-9 * step {
        ticks.push(k as f64 * step);
        k += 1;
    }
    ticks
}

/// A plot box: pixel rectangle plus the data ranges mapped onto it.
#[derive(Debug, Clone, Copy)]
struct Axes {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Axes {
    fn sx(&self, x: f64) -> f64 {
        self.left + (x - self.x0) / (self.x1 - self.x0) * self.width
    }

    fn sy(&self, y: f64) -> f64 {
        self.top + self.height - (y - self.y0) / (self.y1 - self.y0) * self.height
    }

    fn frame(&self, out: &mut String) {
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" \
             stroke=\"#333\" stroke-width=\"1\"/>\n",
            px(self.left),
            px(self.top),
            px(self.width),
            px(self.height)
        ));
    }

    fn polyline(&self, xs: &[f64], ys: &[f64], style: &str, out: &mut String) {
        if xs.is_empty() {
            return;
        }
        out.push_str("<polyline fill=\"none\" ");
        out.push_str(style);
        out.push_str(" points=\"");
        for (x, y) in xs.iter().zip(ys) {
            out.push_str(&px(self.sx(*x)));
            out.push(',');
            out.push_str(&px(self.sy(*y)));
            out.push(' ');
        }
        out.push_str("\"/>\n");
    }

    /// Fill between the curve and y = 0, keeping only the lobes of one
    /// sign (`positive` selects which).
    fn zero_clamped_fill(&self, xs: &[f64], ys: &[f64], positive: bool, fill: &str, out: &mut String) {
        if xs.is_empty() {
            return;
        }
        let clamp = |y: f64| {
            if positive {
                y.max(0.0)
            } else {
                y.min(0.0)
            }
        };
        let zero = self.sy(0.0);
        let mut d = String::new();
        d.push_str(&format!("M {} {}", px(self.sx(xs[0])), px(zero)));
        for (x, y) in xs.iter().zip(ys) {
            d.push_str(&format!(" L {} {}", px(self.sx(*x)), px(self.sy(clamp(*y)))));
        }
        d.push_str(&format!(" L {} {} Z", px(self.sx(xs[xs.len() - 1])), px(zero)));
        out.push_str(&format!(
            "<path d=\"{d}\" fill=\"{fill}\" fill-opacity=\"0.5\" stroke=\"none\"/>\n"
        ));
    }

    fn zero_line(&self, out: &mut String) {
        if self.y0 < 0.0 && self.y1 > 0.0 {
            let y = px(self.sy(0.0));
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#999\" \
                 stroke-width=\"0.8\"/>\n",
                px(self.left),
                px(self.left + self.width)
            ));
        }
    }

    fn vline(&self, x: f64, style: &str, out: &mut String) {
        if x < self.x0 || x > self.x1 {
            return;
        }
        let sx = px(self.sx(x));
        out.push_str(&format!(
            "<line x1=\"{sx}\" y1=\"{}\" x2=\"{sx}\" y2=\"{}\" {style}/>\n",
            px(self.top),
            px(self.top + self.height)
        ));
    }

    fn x_ticks(&self, label: &str, out: &mut String) {
        for t in nice_ticks(self.x0, self.x1, 7) {
            let sx = px(self.sx(t));
            let ybase = self.top + self.height;
            out.push_str(&format!(
                "<line x1=\"{sx}\" y1=\"{}\" x2=\"{sx}\" y2=\"{}\" stroke=\"#333\" \
                 stroke-width=\"1\"/>\n",
                px(ybase),
                px(ybase + 5.0)
            ));
            out.push_str(&format!(
                "<text x=\"{sx}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" \
                 fill=\"#333\">{}</text>\n",
                px(ybase + 18.0),
                fmt_tick(t)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" \
             fill=\"#111\">{label}</text>\n",
            px(self.left + self.width / 2.0),
            px(self.top + self.height + 36.0)
        ));
    }

    fn y_ticks(&self, label: &str, out: &mut String) {
        for t in nice_ticks(self.y0, self.y1, 5) {
            let sy = px(self.sy(t));
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{sy}\" x2=\"{}\" y2=\"{sy}\" stroke=\"#333\" \
                 stroke-width=\"1\"/>\n",
                px(self.left - 5.0),
                px(self.left)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\" \
                 fill=\"#333\">{}</text>\n",
                px(self.left - 8.0),
                px(self.sy(t) + 3.5),
                fmt_tick(t)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" \
             fill=\"#111\" transform=\"rotate(-90 {} {})\">{label}</text>\n",
            px(self.left - 58.0),
            px(self.top + self.height / 2.0),
            px(self.left - 58.0),
            px(self.top + self.height / 2.0)
        ));
    }

    /// Statistical series: dots with one-sigma error bars.
    fn points_with_errors(
        &self,
        xs: &[f64],
        ys: &[f64],
        errs: Option<&[f64]>,
        color: &str,
        out: &mut String,
    ) {
        for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
            let sx = px(self.sx(*x));
            if let Some(errs) = errs {
                let lo = self.sy(y - errs[i]);
                let hi = self.sy(y + errs[i]);
                out.push_str(&format!(
                    "<line x1=\"{sx}\" y1=\"{}\" x2=\"{sx}\" y2=\"{}\" stroke=\"{color}\" \
                     stroke-width=\"0.6\" stroke-opacity=\"0.6\"/>\n",
                    px(hi),
                    px(lo)
                ));
            }
            out.push_str(&format!(
                "<circle cx=\"{sx}\" cy=\"{}\" r=\"1.4\" fill=\"{color}\"/>\n",
                px(self.sy(*y))
            ));
        }
    }
}

fn svg_open(width: f64, height: f64, title: &str, out: &mut String) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n",
        w = px(width),
        h = px(height)
    ));
    out.push_str(&format!(
        "<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
        px(width),
        px(height)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\" \
         fill=\"#111\">{title}</text>\n",
        px(width / 2.0)
    ));
}

fn range_of(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (-1.0, 1.0)
    } else {
        (lo, hi)
    }
}

/// Pad a range by 8% on each side, always including zero.
fn padded_with_zero(lo: f64, hi: f64) -> (f64, f64) {
    let lo = lo.min(0.0);
    let hi = hi.max(0.0);
    let pad = 0.08 * (hi - lo).max(1e-30);
    (lo - pad, hi + pad)
}

const GUIDE_STYLE: &str =
    "stroke=\"#555\" stroke-width=\"1\" stroke-dasharray=\"6,4\"";
const ANALYTIC_STYLE: &str = "stroke=\"#1a1a1a\" stroke-width=\"1.3\"";
const COHERENT_STYLE: &str = "stroke=\"#c0392b\" stroke-width=\"1.3\"";
const MC_COLOR: &str = "#4a4a4a";
const FILL_POS: &str = "#f1c40f";
const FILL_NEG: &str = "#2980b9";

/// Draw the RDN content of one axes box: fills, analytic line, MC dots,
/// guides.
fn draw_rdn_content(
    ax: &Axes,
    analytic: Option<&RdnSeries>,
    mc: Option<&RdnSeries>,
    guides_fs: Option<(f64, f64)>,
    out: &mut String,
) {
    // Fills come from the smooth series when available.
    if let Some(series) = analytic.or(mc) {
        ax.zero_clamped_fill(&series.t_fs, &series.rdn, true, FILL_POS, out);
        ax.zero_clamped_fill(&series.t_fs, &series.rdn, false, FILL_NEG, out);
    }
    ax.zero_line(out);
    if let Some((t_max, t_min)) = guides_fs {
        ax.vline(t_max, GUIDE_STYLE, out);
        ax.vline(t_min, GUIDE_STYLE, out);
    }
    if let Some(a) = analytic {
        ax.polyline(&a.t_fs, &a.rdn, ANALYTIC_STYLE, out);
    }
    if let Some(m) = mc {
        ax.points_with_errors(&m.t_fs, &m.rdn, m.stderr.as_deref(), MC_COLOR, out);
    }
}

fn rdn_range(analytic: Option<&RdnSeries>, mc: Option<&RdnSeries>) -> (f64, f64) {
    let it = analytic
        .iter()
        .chain(mc.iter())
        .flat_map(|s| s.rdn.iter().copied());
    let (lo, hi) = range_of(it);
    padded_with_zero(lo, hi)
}

/// Two-panel run overview: the coherent read-out above the delay-resolved
/// RDN, sharing the delay axis, with dashed guides at the extremal
/// delays.
pub fn overview_svg(
    title: &str,
    t_fs: &[f64],
    e_vcm: &[f64],
    analytic: Option<&RdnSeries>,
    mc: Option<&RdnSeries>,
    guides_fs: Option<(f64, f64)>,
) -> String {
    let (width, height) = (880.0, 640.0);
    let mut out = String::new();
    svg_open(width, height, title, &mut out);

    let (tlo, thi) = range_of(t_fs.iter().copied());
    let emax = e_vcm.iter().fold(0.0f64, |m, &v| m.max(v.abs())).max(1e-30);
    let top = Axes {
        left: 90.0,
        top: 50.0,
        width: 750.0,
        height: 230.0,
        x0: tlo,
        x1: thi,
        y0: -1.08 * emax,
        y1: 1.08 * emax,
    };
    top.zero_clamped_fill(t_fs, e_vcm, true, "#e8b4ae", &mut out);
    top.zero_clamped_fill(t_fs, e_vcm, false, "#e8b4ae", &mut out);
    top.zero_line(&mut out);
    if let Some((t_max, t_min)) = guides_fs {
        top.vline(t_max, GUIDE_STYLE, &mut out);
        top.vline(t_min, GUIDE_STYLE, &mut out);
    }
    top.polyline(t_fs, e_vcm, COHERENT_STYLE, &mut out);
    top.frame(&mut out);
    top.y_ticks("E (V/cm)", &mut out);

    let (ylo, yhi) = rdn_range(analytic, mc);
    let bottom = Axes {
        left: 90.0,
        top: 330.0,
        width: 750.0,
        height: 240.0,
        x0: tlo,
        x1: thi,
        y0: ylo,
        y1: yhi,
    };
    draw_rdn_content(&bottom, analytic, mc, guides_fs, &mut out);
    bottom.frame(&mut out);
    bottom.y_ticks("RDN", &mut out);
    bottom.x_ticks("delay t_D (fs)", &mut out);

    out.push_str("</svg>\n");
    out
}

/// Stack of per-energy RDN panels sharing the delay axis.
pub fn panels_svg(title: &str, panels: &[Panel]) -> String {
    let width = 880.0;
    let panel_h = 150.0;
    let gap = 26.0;
    let top0 = 46.0;
    let height = top0 + panels.len() as f64 * (panel_h + gap) + 50.0;
    let mut out = String::new();
    svg_open(width, height, title, &mut out);

    let (tlo, thi) = range_of(
        panels
            .iter()
            .flat_map(|p| p.analytic.iter().chain(p.mc.iter()))
            .flat_map(|s| s.t_fs.iter().copied()),
    );
    // A common vertical range keeps the growth with pump energy visible.
    let (ylo, yhi) = {
        let (lo, hi) = range_of(
            panels
                .iter()
                .flat_map(|p| p.analytic.iter().chain(p.mc.iter()))
                .flat_map(|s| s.rdn.iter().copied()),
        );
        padded_with_zero(lo, hi)
    };

    for (i, panel) in panels.iter().enumerate() {
        let ax = Axes {
            left: 90.0,
            top: top0 + i as f64 * (panel_h + gap),
            width: 750.0,
            height: panel_h,
            x0: tlo,
            x1: thi,
            y0: ylo,
            y1: yhi,
        };
        draw_rdn_content(&ax, panel.analytic.as_ref(), panel.mc.as_ref(), None, &mut out);
        ax.frame(&mut out);
        ax.y_ticks("RDN", &mut out);
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\" \
             fill=\"#111\">{}</text>\n",
            px(ax.left + ax.width - 8.0),
            px(ax.top + 16.0),
            panel.label
        ));
        if i + 1 == panels.len() {
            ax.x_ticks("delay t_D (fs)", &mut out);
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Pump-energy sweep: measured branch extrema with error bars, the
/// fitted branch curves, and the implied squeezing on a secondary
/// percent axis.
pub fn sweep_svg(
    title: &str,
    points: &[SweepPoint],
    fit: &FitResult,
    delta_e_vac: f64,
    delta_e_sn: f64,
) -> String {
    let (width, height) = (880.0, 540.0);
    let mut out = String::new();
    svg_open(width, height, title, &mut out);

    let umax = points.iter().fold(0.0f64, |m, p| m.max(p.energy)).max(1e-30);
    let x1 = 1.08 * umax * 1e9;
    // Sample the fitted branches across the axis for the curve overlay.
    let samples = 200;
    let mut cx = Vec::with_capacity(samples + 1);
    let mut cmax = Vec::with_capacity(samples + 1);
    let mut cmin = Vec::with_capacity(samples + 1);
    let mut csq = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        let u_nj = x1 * k as f64 / samples as f64;
        let g_e = fit.gain_rate * u_nj * 1e-9;
        let (hi, lo) = model_branches(g_e, fit.eta, delta_e_vac, delta_e_sn);
        cx.push(u_nj);
        cmax.push(hi);
        cmin.push(lo);
        csq.push(100.0 * (1.0 - (-g_e).exp()));
    }

    let (ylo, yhi) = {
        let pts = points
            .iter()
            .flat_map(|p| [p.rdn_max, p.rdn_min])
            .chain(cmax.iter().copied())
            .chain(cmin.iter().copied());
        let (lo, hi) = range_of(pts);
        padded_with_zero(lo, hi)
    };
    let ax = Axes {
        left: 90.0,
        top: 56.0,
        width: 700.0,
        height: 400.0,
        x0: 0.0,
        x1,
        y0: ylo,
        y1: yhi,
    };
    ax.zero_line(&mut out);
    ax.polyline(&cx, &cmax, "stroke=\"#c0392b\" stroke-width=\"1.4\"", &mut out);
    ax.polyline(&cx, &cmin, "stroke=\"#2980b9\" stroke-width=\"1.4\"", &mut out);

    // Squeezing percentage against a right-hand 0–100 axis.
    let sq = Axes { y0: 0.0, y1: 100.0, ..ax };
    sq.polyline(
        &cx,
        &csq,
        "stroke=\"#27ae60\" stroke-width=\"1.4\" stroke-dasharray=\"7,4\"",
        &mut out,
    );
    for t in [0.0, 25.0, 50.0, 75.0, 100.0] {
        let sy = px(sq.sy(t));
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{sy}\" x2=\"{}\" y2=\"{sy}\" stroke=\"#27ae60\" \
             stroke-width=\"1\"/>\n",
            px(ax.left + ax.width),
            px(ax.left + ax.width + 5.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"start\" \
             fill=\"#27ae60\">{}%</text>\n",
            px(ax.left + ax.width + 9.0),
            px(sq.sy(t) + 3.5),
            fmt_tick(t)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" fill=\"#27ae60\" \
         transform=\"rotate(90 {} {})\">field squeezing (%)</text>\n",
        px(ax.left + ax.width + 62.0),
        px(ax.top + ax.height / 2.0),
        px(ax.left + ax.width + 62.0),
        px(ax.top + ax.height / 2.0)
    ));

    // Measured points on top of the curves.
    let ux: Vec<f64> = points.iter().map(|p| p.energy * 1e9).collect();
    let ymax: Vec<f64> = points.iter().map(|p| p.rdn_max).collect();
    let ymin: Vec<f64> = points.iter().map(|p| p.rdn_min).collect();
    let emax: Option<Vec<f64>> = points.iter().map(|p| p.stderr_max).collect();
    let emin: Option<Vec<f64>> = points.iter().map(|p| p.stderr_min).collect();
    for (i, u) in ux.iter().enumerate() {
        for (y, e, color) in [
            (ymax[i], emax.as_ref().map(|v| v[i]), "#c0392b"),
            (ymin[i], emin.as_ref().map(|v| v[i]), "#2980b9"),
        ] {
            let sx = px(ax.sx(*u));
            if let Some(e) = e {
                out.push_str(&format!(
                    "<line x1=\"{sx}\" y1=\"{}\" x2=\"{sx}\" y2=\"{}\" stroke=\"{color}\" \
                     stroke-width=\"1\"/>\n",
                    px(ax.sy(y + e)),
                    px(ax.sy(y - e))
                ));
            }
            out.push_str(&format!(
                "<circle cx=\"{sx}\" cy=\"{}\" r=\"3.2\" fill=\"{color}\" stroke=\"#fff\" \
                 stroke-width=\"0.8\"/>\n",
                px(ax.sy(y))
            ));
        }
    }
    ax.frame(&mut out);
    ax.y_ticks("RDN at the extremal delays", &mut out);
    ax.x_ticks("pump energy (nJ)", &mut out);

    // Fit annotation.
    let g_umax = fit.gain_rate * umax;
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#111\">fit: g·U = {:.4} at {} nJ, \
         eta = {:.4}, residual rms = {:.2e}</text>\n",
        px(ax.left + 10.0),
        px(ax.top + 20.0),
        g_umax,
        energy_label(umax),
        fit.eta,
        fit.residual_rms
    ));

    out.push_str("</svg>\n");
    out
}

// ---------------------------------------------------------------------------
// Regeneration from a run directory
// ---------------------------------------------------------------------------

fn series_from_trace(data: &export::TraceData) -> RdnSeries {
    RdnSeries {
        t_fs: data.t.iter().map(|t| t * 1e15).collect(),
        rdn: data.rdn.clone(),
        stderr: data.stderr.clone(),
    }
}

fn guides_from(series: &RdnSeries) -> Option<(f64, f64)> {
    if series.rdn.is_empty() {
        return None;
    }
    let mut i_max = 0;
    let mut i_min = 0;
    for (k, &v) in series.rdn.iter().enumerate() {
        if v > series.rdn[i_max] {
            i_max = k;
        }
        if v < series.rdn[i_min] {
            i_min = k;
        }
    }
    Some((series.t_fs[i_max], series.t_fs[i_min]))
}

/// Rebuild every figure of a run directory from its CSV data files.
///
/// Drives purely off the manifest's file list, re-reading traces and
/// sweep points; returns the figures written (same names as the
/// originals).
pub fn regenerate(manifest: &RunManifest, dir: &Path) -> Result<Vec<FileEntry>> {
    let names: Vec<&str> = manifest.files.iter().map(|f| f.name.as_str()).collect();
    let have = |n: &str| names.contains(&n);
    let mut written = Vec::new();
    let mut save = |name: &str, content: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, &content)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        written.push(FileEntry {
            name: name.to_string(),
            sha256: crate::scenario::sha256_hex(content.as_bytes()),
        });
        Ok(())
    };

    // Overview figures, primary and CEP-flipped.
    for suffix in ["", "_cep_flipped"] {
        let coherent_name = format!("coherent{suffix}.csv");
        if !have(&coherent_name) {
            continue;
        }
        let (t, e, meta) = export::read_coherent(&dir.join(&coherent_name))?;
        let t_fs: Vec<f64> = t.iter().map(|x| x * 1e15).collect();
        let e_vcm: Vec<f64> = e.iter().map(|x| x / 100.0).collect();
        let analytic_name = format!("rdn_analytic{suffix}.csv");
        let analytic = if have(&analytic_name) {
            Some(series_from_trace(
                &export::read_rdn_trace(&dir.join(&analytic_name))?.0,
            ))
        } else {
            None
        };
        let mc_name = format!("rdn_monte_carlo{suffix}.csv");
        let mc = if have(&mc_name) {
            Some(series_from_trace(
                &export::read_rdn_trace(&dir.join(&mc_name))?.0,
            ))
        } else {
            None
        };
        let guides = analytic.as_ref().or(mc.as_ref()).and_then(guides_from);
        let origin = dir.join(&coherent_name).display().to_string();
        let doc_energy = meta
            .get("pump_energy_nj")
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| Error::DataFormat {
                path: origin.clone(),
                reason: "missing pump_energy_nj metadata".into(),
            })?;
        let cep = meta
            .get("cep_rad")
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| Error::DataFormat {
                path: origin,
                reason: "missing cep_rad metadata".into(),
            })?;
        let title = format!(
            "{} nJ transient, CEP {:.3} rad",
            energy_label(doc_energy * 1e-9),
            cep
        );
        let svg = overview_svg(
            &title,
            &t_fs,
            &e_vcm,
            analytic.as_ref(),
            mc.as_ref(),
            guides,
        );
        save(&format!("overview{suffix}.svg"), svg)?;
    }

    // Per-energy panels, ordered by parsed energy.
    let mut energies: Vec<(f64, String)> = Vec::new();
    for name in &names {
        for prefix in ["rdn_analytic_", "rdn_monte_carlo_"] {
            if let Some(rest) = name.strip_prefix(prefix) {
                if let Some(label) = rest.strip_suffix("nJ.csv") {
                    if let Ok(u) = label.parse::<f64>() {
                        if !energies.iter().any(|(_, l)| l == label) {
                            energies.push((u, label.to_string()));
                        }
                    }
                }
            }
        }
    }
    energies.sort_by(|a, b| a.0.total_cmp(&b.0));
    if !energies.is_empty() {
        let mut panels = Vec::new();
        for (_, label) in &energies {
            let a_name = format!("rdn_analytic_{label}nJ.csv");
            let m_name = format!("rdn_monte_carlo_{label}nJ.csv");
            panels.push(Panel {
                label: format!("{label} nJ"),
                analytic: if have(&a_name) {
                    Some(series_from_trace(
                        &export::read_rdn_trace(&dir.join(&a_name))?.0,
                    ))
                } else {
                    None
                },
                mc: if have(&m_name) {
                    Some(series_from_trace(
                        &export::read_rdn_trace(&dir.join(&m_name))?.0,
                    ))
                } else {
                    None
                },
            });
        }
        save(
            "energy_panels.svg",
            panels_svg("Noise traces across pump energy", &panels),
        )?;
    }

    // Sweep figure: points re-read, fit re-run (deterministic).
    if have("sweep_points.csv") {
        let path = dir.join("sweep_points.csv");
        let origin = path.display().to_string();
        let (points, meta) = export::read_sweep_points(&path)?;
        let doc = export::CsvDoc {
            meta,
            header: String::new(),
            rows: Vec::new(),
        };
        let sn = doc.meta_float("delta_e_sn_vcm", &origin)? * 100.0;
        let vac = doc.meta_float("delta_e_vac_vcm", &origin)? * 100.0;
        let fit = fit_sweep(&points, vac, sn)?;
        save(
            "sweep_fit.svg",
            sweep_svg("Branch extrema vs pump energy", &points, &fit, vac, sn),
        )?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_series(n: usize) -> RdnSeries {
        let t_fs: Vec<f64> = (0..n).map(|k| -100.0 + k as f64 * 2.0).collect();
        let rdn: Vec<f64> = t_fs
            .iter()
            .map(|t| 0.03 * (t / 30.0).sin() * (-t * t / 8000.0f64).exp())
            .collect();
        RdnSeries {
            t_fs,
            rdn,
            stderr: None,
        }
    }

    #[test]
    fn tick_labels_are_clean_and_deterministic() {
        assert_eq!(fmt_tick(0.0), "0");
        assert_eq!(fmt_tick(0.25), "0.25");
        assert_eq!(fmt_tick(-0.5), "-0.5");
        assert_eq!(fmt_tick(3.0), "3");
        assert_eq!(fmt_tick(2.26e7), "2.26e7");
        assert_eq!(fmt_tick(4.0e-5), "4.00e-5");
        let ticks = nice_ticks(-0.047, 0.12, 5);
        assert!(
            ticks.contains(&0.0) && ticks.len() >= 3,
            "ticks should bracket zero: {ticks:?}"
        );
        for w in ticks.windows(2) {
            assert!(w[1] > w[0], "ticks must increase: {ticks:?}");
        }
    }

    #[test]
    fn overview_figure_is_deterministic_and_structured() {
        let series = demo_series(101);
        let e: Vec<f64> = series.t_fs.iter().map(|t| 5e4 * (t / 12.0).cos()).collect();
        let a = overview_svg(
            "demo",
            &series.t_fs,
            &e,
            Some(&series),
            None,
            Some((10.0, -20.0)),
        );
        let b = overview_svg(
            "demo",
            &series.t_fs,
            &e,
            Some(&series),
            None,
            Some((10.0, -20.0)),
        );
        assert_eq!(a, b, "same inputs must give identical bytes");
        assert!(a.starts_with("<svg"), "must open an svg document");
        assert!(a.contains("stroke-dasharray=\"6,4\""), "guides must be dashed");
        assert!(a.contains(FILL_POS) && a.contains(FILL_NEG), "both fills present");
        assert!(a.contains("delay t_D (fs)"));
        assert!(a.ends_with("</svg>\n"));
    }

    #[test]
    fn panel_stack_scales_with_panel_count() {
        let p = Panel {
            label: "1.000 nJ".into(),
            analytic: Some(demo_series(51)),
            mc: None,
        };
        let two = panels_svg("stack", &[p.clone(), p.clone()]);
        let three = panels_svg("stack", &[p.clone(), p.clone(), p]);
        assert_eq!(two.matches("1.000 nJ").count(), 2);
        assert_eq!(three.matches("1.000 nJ").count(), 3);
        assert!(three.len() > two.len());
    }

    #[test]
    fn run_directory_figures_regenerate_from_data_files() {
        use crate::constants::PhysConstants;
        use crate::scenario::{load_manifest, resolve, run_resolved, Scenario};
        let consts = PhysConstants::CODATA2018;
        let text = r#"
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
            [sweep]
            energies_nj = [1.0, 3.5]
        "#;
        let scenario: Scenario = toml::from_str(text).unwrap();
        let res = resolve(&scenario, &consts).unwrap();
        let dir = tempfile::tempdir().unwrap();
        run_resolved(&res, dir.path(), &consts).unwrap();
        let manifest = load_manifest(&dir.path().join("manifest.json")).unwrap();
        let originals: Vec<&FileEntry> = manifest
            .files
            .iter()
            .filter(|f| f.name.ends_with(".svg"))
            .collect();
        assert!(
            originals.iter().any(|f| f.name == "energy_panels.svg"),
            "run with a sweep section must emit the panel stack"
        );
        for f in &originals {
            std::fs::remove_file(dir.path().join(&f.name)).unwrap();
        }
        let rebuilt = regenerate(&manifest, dir.path()).unwrap();
        for f in &originals {
            let again = rebuilt
                .iter()
                .find(|r| r.name == f.name)
                .unwrap_or_else(|| panic!("{} was not regenerated", f.name));
            let bytes = std::fs::read(dir.path().join(&again.name)).unwrap();
            assert!(
                bytes.starts_with(b"<svg"),
                "{} must be an svg document",
                f.name
            );
            assert_eq!(
                again.sha256, f.sha256,
                "{} should rebuild byte-identically from full-precision CSVs",
                f.name
            );
        }
    }

    #[test]
    fn sweep_figure_includes_fit_annotation_and_percent_axis() {
        let points = vec![
            SweepPoint {
                energy: 1.0e-9,
                rdn_max: 0.01,
                rdn_min: -0.004,
                stderr_max: Some(2e-4),
                stderr_min: Some(2e-4),
            },
            SweepPoint {
                energy: 3.5e-9,
                rdn_max: 0.039,
                rdn_min: -0.010,
                stderr_max: Some(2e-4),
                stderr_min: Some(2e-4),
            },
        ];
        let fit = FitResult {
            gain_rate: 0.693 / 3.5e-9,
            eta: 0.33,
            residual_rms: 1e-4,
            g_eta_correlation: Some(-0.8),
            evaluations: 321,
            squeezing_curve: vec![],
        };
        let svg = sweep_svg("sweep", &points, &fit, 2400.0, 8100.0);
        assert!(svg.contains("eta = 0.3300"));
        assert!(svg.contains("field squeezing (%)"));
        assert!(svg.contains("50%"), "percent ticks labeled");
        assert!(svg.contains("pump energy (nJ)"));
    }
}
