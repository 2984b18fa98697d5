//! Output formatting shared by the commands.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::Context;
use herd_core::{BandMetric, ComplianceReport};
use num_fmt::sci;
use serde::Serialize;

pub mod num_fmt {
    /// Fixed 12 significant digits, so identical runs give identical bytes.
    pub fn sci(v: f64) -> String {
        if v == 0.0 {
            "0".into()
        } else if v.is_finite() {
            format!("{v:.11e}")
        } else {
            v.to_string()
        }
    }

    pub fn opt(v: Option<f64>) -> String {
        v.map(sci).unwrap_or_default()
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn json<T: Serialize>(doc: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

/// Renders rows of numbers as CSV under `header`.
pub fn csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn ghz(v: f64) -> String {
    if v.is_finite() {
        format!("{:.3}", v / 1e9)
    } else {
        "inf".into()
    }
}

pub fn metrics_text(named: &[(String, Option<BandMetric>)]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<10} {:>22} {:>7} {:>11} {:>11} {:>10} {:>12}",
        "band", "range_GHz", "points", "max_IL_dB", "min_att_dB", "ripple_dB", "worst_RL_dB"
    );
    for (name, m) in named {
        match m {
            Some(m) => {
                let _ = writeln!(
                    s,
                    "{:<10} {:>22} {:>7} {:>11.4} {:>11.4} {:>10.4} {:>12.4}",
                    name,
                    format!("{} - {}", ghz(m.band.low), ghz(m.band.high)),
                    m.points,
                    m.max_insertion_loss_db,
                    m.min_attenuation_db,
                    m.max_ripple_db,
                    m.worst_return_loss_db
                );
            }
            None => {
                let _ = writeln!(s, "{name:<10} (no grid points)");
            }
        }
    }
    s
}

pub fn claims_text(profile: &str, report: &ComplianceReport, deviations: Option<&[Option<f64>]>) -> String {
    let mut s = format!("claims ({profile}):\n");
    for (i, r) in report.rows.iter().enumerate() {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        let observed = match (r.observed_db, &r.error) {
            (Some(v), _) => format!("observed {v:.4} dB"),
            (None, Some(e)) => format!("error: {e}"),
            (None, None) => String::new(),
        };
        let _ = write!(s, "  {verdict}  {:<44} {observed}", r.claim.description);
        if let Some(dev) = deviations.and_then(|d| d.get(i).copied().flatten()) {
            let _ = write!(s, "  max |IL_meas - IL_model| {dev:.4} dB");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "overall: {}", if report.passed() { "PASS" } else { "FAIL" });
    s
}

pub fn design_summary(d: &herd_core::FilterDesign) -> String {
    format!(
        "a = {:.4} mm, b = {:.4} mm, d = {:.4} mm, r_i = {:.4} mm, r_o = {:.4} mm, \
         aperture eps_r = {}, {} x {} apertures, kappa = {}",
        d.aperture.width_a * 1e3,
        d.aperture.height_b * 1e3,
        d.aperture.depth_d * 1e3,
        d.coax.r_inner * 1e3,
        d.coax.r_outer * 1e3,
        d.aperture_fill.eps_r,
        d.sections,
        d.apertures_per_section,
        d.stopband_kappa,
    )
}

pub fn sci_row(vals: &[f64]) -> Vec<String> {
    vals.iter().map(|v| sci(*v)).collect()
}
