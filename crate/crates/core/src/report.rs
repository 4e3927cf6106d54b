//! CSV and SVG output for sweeps.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bounds::{CheckRow, ExperimentRecord};
use crate::error::{Error, Result};

pub const RECORDS_HEADER: &str =
    "family,n,omega,omega_bar,b,k,sigma,r_main,perrin_ratio,hh_lhs,hh_rhs,iso_ratio";
pub const CHECKS_HEADER: &str = "check,family,k,value,threshold,verdict";

pub const RECORDS_FILE: &str = "records.csv";
pub const CHECKS_FILE: &str = "checks.csv";
pub const PLOT_FILE: &str = "decay.svg";

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Long format, one row per `(n, k)`.
pub fn records_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::new();
    out.push_str(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        for (i, (s, rm)) in r.sigma.iter().zip(&r.r_main).enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.family,
                r.n,
                r.omega,
                r.omega_bar,
                r.b,
                i + 1,
                fmt_f64(*s),
                fmt_f64(*rm),
                fmt_f64(r.perrin_ratio),
                fmt_opt(r.hh_lhs),
                fmt_opt(r.hh_rhs),
                fmt_f64(r.iso_ratio),
            );
        }
    }
    out
}

pub fn checks_csv(rows: &[CheckRow]) -> String {
    let mut out = String::new();
    out.push_str(CHECKS_HEADER);
    out.push('\n');
    for c in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.check,
            c.family,
            c.k.map(|k| k.to_string()).unwrap_or_default(),
            fmt_f64(c.value),
            fmt_opt(c.threshold),
            if c.pass { "PASS" } else { "FAIL" },
        );
    }
    out
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Scatter of `ln σ_k` against `ln |B|`, one series per `k`, with a
/// reference line of slope `-1/(d-1)` through the first `σ_1` point.
pub fn decay_plot_svg(records: &[ExperimentRecord]) -> String {
    let (w, h, pad) = (640.0, 480.0, 60.0);
    let k_count = records.iter().map(|r| r.sigma.len()).min().unwrap_or(0);
    let pts: Vec<Vec<(f64, f64)>> = (0..k_count)
        .map(|k| {
            records
                .iter()
                .map(|r| ((r.b as f64).ln(), r.sigma[k].ln()))
                .collect()
        })
        .collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<path d="M{pad} {pad} V{} H{}" stroke="black" fill="none"/>"#,
        h - pad,
        w - pad
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">ln |B|</text>"#,
        w / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" font-size="14" transform="rotate(-90 15 {})" text-anchor="middle">ln sigma_k</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (k, series) in pts.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(out, r#"<g class="series" data-k="{}" fill="{color}">"#, k + 1);
        for &(x, y) in series {
            let _ = writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="3"/>"#, sx(x), sy(y));
        }
        let _ = writeln!(out, "</g>");
    }
    if let (Some(first), Some(r0)) = (pts.first().and_then(|s| s.first()), records.first()) {
        let slope = -1.0 / (r0.d.as_f64() - 1.0);
        let (xa, ya) = *first;
        let yb = ya + slope * (x1 - xa);
        let _ = writeln!(
            out,
            r#"<line class="reference" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-dasharray="6 4"/>"#,
            sx(xa),
            sy(ya),
            sx(x1),
            sy(yb)
        );
    }
    let _ = writeln!(out, "</svg>");
    out
}

/// Paths written by [`emit_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub records: PathBuf,
    pub checks: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

/// Writes `records.csv`; when checks were run, also `checks.csv` and the
/// decay plot.
pub fn emit_report(dir: &Path, records: &[ExperimentRecord], checks: &[CheckRow]) -> Result<ReportFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, body: String| -> Result<PathBuf> {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    };
    let records_path = write(RECORDS_FILE, records_csv(records))?;
    if checks.is_empty() {
        return Ok(ReportFiles {
            records: records_path,
            checks: None,
            plot: None,
        });
    }
    let checks_path = write(CHECKS_FILE, checks_csv(checks))?;
    let plot_path = write(PLOT_FILE, decay_plot_svg(records))?;
    Ok(ReportFiles {
        records: records_path,
        checks: Some(checks_path),
        plot: Some(plot_path),
    })
}
