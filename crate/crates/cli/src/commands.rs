use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde::Serialize;

use herd_core::cascade::{attenuation_vs_sections, filter_response_with, CascadeOptions};
use herd_core::exec::{map_points, Execution};
use herd_core::kvfile::{parse_design, parse_spec, write_design};
use herd_core::tsio::{claims_profile, max_il_deviation};
use herd_core::{
    band_metrics, check_claims, coax_char_impedance, coax_first_higher_mode_cutoff, corner_frequency,
    inband_transmission, mode_chart, parse_touchstone, solve_inner_radius, synthesize as run_synthesis, write_touchstone,
    Band, BandMetric, DB_FLOOR, Claim, ComplianceReport, DataFormat, FilterDesign, FrequencyGrid, FrequencyUnit, HerdError,
    Material, ModeEntry, SParamTable, SynthesisReport,
};

use crate::args::{AnalyzeArgs, CompareArgs, Format, ModesArgs, SectionsArgs, SweepArgs, SynthesizeArgs};
use crate::render::{self, num_fmt::opt, num_fmt::sci, sci_row};
use crate::Failure;

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_design(path: &Path) -> anyhow::Result<FilterDesign> {
    parse_design(&read(path)?).with_context(|| format!("design file {}", path.display()))
}

fn load_claims(profile: &str) -> anyhow::Result<Vec<Claim>> {
    claims_profile(profile).ok_or_else(|| anyhow!("unknown claims profile `{profile}` (expected default or strict12)"))
}

fn reject_touchstone(format: Format, command: &str) -> anyhow::Result<()> {
    if format == Format::Touchstone {
        return Err(anyhow!("`{command}` has no touchstone output; use text, csv or json"));
    }
    Ok(())
}

#[derive(Serialize)]
struct ModeRow {
    m: u32,
    n: u32,
    cutoff_hz: f64,
}

impl From<&ModeEntry> for ModeRow {
    fn from(e: &ModeEntry) -> Self {
        ModeRow {
            m: e.index.m,
            n: e.index.n,
            cutoff_hz: e.cutoff_hz,
        }
    }
}

#[derive(Serialize)]
struct ModesDoc {
    command: &'static str,
    z0_ohm: f64,
    single_mode_limit_hz: f64,
    r_inner_m: f64,
    r_outer_m: f64,
    corner_frequency_hz: Option<f64>,
    mode_chart_fmax_hz: Option<f64>,
    modes: Vec<ModeRow>,
}

pub fn modes(args: ModesArgs) -> Outcome {
    let format = args.output.format.unwrap_or(Format::Text);
    reject_touchstone(format, "modes")?;

    let doc = if let Some(path) = &args.design {
        let design = load_design(path)?;
        let corner = corner_frequency(&design);
        let fmax = args.fmax.unwrap_or(2.0 * corner);
        ModesDoc {
            command: "modes",
            z0_ohm: coax_char_impedance(&design.coax, &design.coax_fill)?,
            single_mode_limit_hz: coax_first_higher_mode_cutoff(&design.coax, &design.coax_fill)?,
            r_inner_m: design.coax.r_inner,
            r_outer_m: design.coax.r_outer,
            corner_frequency_hz: Some(corner),
            mode_chart_fmax_hz: Some(fmax),
            modes: mode_chart(&design.aperture, &design.aperture_fill, fmax).iter().map(ModeRow::from).collect(),
        }
    } else if let (Some(z0), Some(f)) = (args.z0, args.single_mode) {
        let fill = Material::dielectric(args.coax_eps_r);
        let coax = solve_inner_radius(z0, f, &fill)?;
        ModesDoc {
            command: "modes",
            z0_ohm: coax_char_impedance(&coax, &fill)?,
            single_mode_limit_hz: coax_first_higher_mode_cutoff(&coax, &fill)?,
            r_inner_m: coax.r_inner,
            r_outer_m: coax.r_outer,
            corner_frequency_hz: None,
            mode_chart_fmax_hz: None,
            modes: Vec::new(),
        }
    } else {
        return Err(anyhow!("modes needs --design <path> or --z0 <ohm> --single-mode <Hz>").into());
    };

    let text = match format {
        Format::Json => render::json(&doc)?,
        Format::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "# z0_ohm = {}", sci(doc.z0_ohm));
            let _ = writeln!(s, "# single_mode_limit_hz = {}", sci(doc.single_mode_limit_hz));
            let _ = writeln!(s, "# r_inner_m = {}", sci(doc.r_inner_m));
            let _ = writeln!(s, "# r_outer_m = {}", sci(doc.r_outer_m));
            if let Some(c) = doc.corner_frequency_hz {
                let _ = writeln!(s, "# corner_frequency_hz = {}", sci(c));
            }
            let rows: Vec<Vec<String>> =
                doc.modes.iter().map(|m| vec![m.m.to_string(), m.n.to_string(), sci(m.cutoff_hz)]).collect();
            s + &render::csv(&["m".into(), "n".into(), "cutoff_hz".into()], &rows)
        }
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "coax impedance      {:.3} ohm", doc.z0_ohm);
            let _ = writeln!(s, "coax radii          r_i = {:.4} mm, r_o = {:.4} mm (ratio {:.4})",
                doc.r_inner_m * 1e3, doc.r_outer_m * 1e3, doc.r_outer_m / doc.r_inner_m);
            let _ = writeln!(s, "single-mode limit   {:.3} GHz", doc.single_mode_limit_hz / 1e9);
            if let (Some(c), Some(fmax)) = (doc.corner_frequency_hz, doc.mode_chart_fmax_hz) {
                let _ = writeln!(s, "corner frequency    {:.3} GHz", c / 1e9);
                let _ = writeln!(s, "aperture TE modes up to {:.3} GHz:", fmax / 1e9);
                for m in &doc.modes {
                    let _ = writeln!(s, "  TE{}{}  {:>10.3} GHz", m.m, m.n, m.cutoff_hz / 1e9);
                }
            }
            s
        }
    };
    render::emit(args.output.out.as_deref(), &text)?;
    Ok(())
}

#[derive(Serialize)]
struct PointRow {
    f_hz: f64,
    s11_db: f64,
    s11_deg: f64,
    s21_db: f64,
    s21_deg: f64,
    s12_db: f64,
    s12_deg: f64,
    s22_db: f64,
    s22_deg: f64,
}

fn point_rows(table: &SParamTable) -> Vec<PointRow> {
    let db = |z: num_complex::Complex64| (20.0 * z.norm().log10()).max(DB_FLOOR);
    let deg = |z: num_complex::Complex64| z.arg().to_degrees();
    table
        .iter()
        .map(|(f, e)| PointRow {
            f_hz: f,
            s11_db: db(e.s11),
            s11_deg: deg(e.s11),
            s21_db: db(e.s21),
            s21_deg: deg(e.s21),
            s12_db: db(e.s12),
            s12_deg: deg(e.s12),
            s22_db: db(e.s22),
            s22_deg: deg(e.s22),
        })
        .collect()
}

#[derive(Serialize)]
struct NamedMetric {
    name: String,
    metric: Option<BandMetric>,
}

#[derive(Serialize)]
struct ClaimsDoc<'a> {
    profile: &'a str,
    passed: bool,
    report: &'a ComplianceReport,
}

#[derive(Serialize)]
struct AnalyzeDoc<'a> {
    command: &'static str,
    design: &'a FilterDesign,
    spacing: &'static str,
    points: Vec<PointRow>,
    metrics: Vec<NamedMetric>,
    claims: Option<ClaimsDoc<'a>>,
}

pub fn analyze(args: AnalyzeArgs) -> Outcome {
    let mut design = load_design(&args.design)?;
    if let Some(n) = args.sections {
        design = design.with_sections(n);
        if let Some(v) = herd_core::validate(&design).first() {
            return Err(anyhow!("--sections: {v}").into());
        }
    }
    let corner = corner_frequency(&design);
    let fstart = args.range.fstart.unwrap_or(0.1e9);
    let fstop = args.range.fstop.unwrap_or(145e9);
    let points = args.range.points.unwrap_or(1000);
    let log = args.range.log || (!args.range.linear && fstop > corner);
    let grid = if log {
        FrequencyGrid::log(fstart, fstop, points)
    } else {
        FrequencyGrid::linear(fstart, fstop, points)
    }?;

    let opts = CascadeOptions {
        return_loss_floor_db: args.mismatch,
        ..CascadeOptions::default()
    };
    let table = filter_response_with(&design, &grid, &opts, Execution::Parallel)?;

    let half = 0.5 * opts.transition_width;
    let bands = [
        ("passband", Band::new(0.0, corner * (1.0 - half))?),
        ("stopband", Band::new(corner * (1.0 + half), f64::INFINITY)?),
    ];
    let metrics: Vec<NamedMetric> = bands
        .iter()
        .map(|(name, band)| NamedMetric {
            name: name.to_string(),
            metric: band_metrics(&table, *band).ok(),
        })
        .collect();

    let profile = args.claims.clone().or_else(|| args.require_claims.then(|| "default".to_string()));
    let report = match &profile {
        Some(p) => Some(check_claims(&table, &load_claims(p)?)),
        None => None,
    };

    let format = args.output.format.unwrap_or(Format::Csv);
    let mut summary = render::metrics_text(
        &metrics.iter().map(|m| (m.name.clone(), m.metric)).collect::<Vec<_>>(),
    );
    if let (Some(p), Some(r)) = (&profile, &report) {
        summary.push_str(&render::claims_text(p, r, None));
    }

    let data = match format {
        Format::Text => None,
        Format::Touchstone => Some(write_touchstone(&table, DataFormat::DB, FrequencyUnit::GHz)?),
        Format::Csv => {
            let header: Vec<String> = ["f_hz", "s11_db", "s11_deg", "s21_db", "s21_deg", "s12_db", "s12_deg", "s22_db", "s22_deg"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            let rows: Vec<Vec<String>> = point_rows(&table)
                .iter()
                .map(|r| sci_row(&[r.f_hz, r.s11_db, r.s11_deg, r.s21_db, r.s21_deg, r.s12_db, r.s12_deg, r.s22_db, r.s22_deg]))
                .collect();
            Some(render::csv(&header, &rows))
        }
        Format::Json => {
            let doc = AnalyzeDoc {
                command: "analyze",
                design: &design,
                spacing: if log { "log" } else { "linear" },
                points: point_rows(&table),
                metrics,
                claims: match (&profile, &report) {
                    (Some(p), Some(r)) => Some(ClaimsDoc { profile: p, passed: r.passed(), report: r }),
                    _ => None,
                },
            };
            Some(render::json(&doc)?)
        }
    };

    match (data, &args.output.out) {
        (None, out) => render::emit(out.as_deref(), &summary)?,
        (Some(d), Some(path)) => {
            render::emit(Some(path), &d)?;
            if format != Format::Json {
                print!("{summary}");
            }
        }
        (Some(d), None) => {
            render::emit(None, &d)?;
            if format != Format::Json {
                eprint!("{summary}");
            }
        }
    }

    match report {
        Some(r) if !r.passed() => Err(Failure::Compliance),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct SweepRow {
    value_m: f64,
    corner_frequency_hz: f64,
    il_db_at_fref: Option<f64>,
}

#[derive(Serialize)]
struct SweepDoc {
    command: &'static str,
    param: &'static str,
    fref_hz: f64,
    rows: Vec<SweepRow>,
}

pub fn sweep(args: SweepArgs) -> Outcome {
    let format = args.output.format.unwrap_or(Format::Csv);
    reject_touchstone(format, "sweep")?;
    let design = load_design(&args.design)?;
    if !(args.from > 0.0 && args.to > 0.0 && args.from.is_finite() && args.to.is_finite()) {
        return Err(anyhow!("sweep bounds must be positive").into());
    }
    if args.steps < 2 {
        return Err(anyhow!("--steps must be at least 2").into());
    }
    if !(args.fref > 0.0) {
        return Err(anyhow!("--fref must be positive").into());
    }
    let values: Vec<f64> = (0..args.steps)
        .map(|i| args.from + (args.to - args.from) * i as f64 / (args.steps - 1) as f64)
        .collect();
    let rows = map_points(Execution::Parallel, &values, |&v| {
        let mut d = design;
        match args.param {
            crate::args::SweepParam::A => d.aperture.width_a = v,
            crate::args::SweepParam::B => d.aperture.height_b = v,
            crate::args::SweepParam::D => d.aperture.depth_d = v,
        }
        SweepRow {
            value_m: v,
            corner_frequency_hz: corner_frequency(&d),
            il_db_at_fref: inband_transmission(&d, args.fref).ok().map(|b| b.insertion_loss_db),
        }
    });
    let doc = SweepDoc {
        command: "sweep",
        param: args.param.name(),
        fref_hz: args.fref,
        rows,
    };
    let text = match format {
        Format::Json => render::json(&doc)?,
        Format::Csv => {
            let header = vec![format!("{}_m", doc.param), "corner_hz".into(), "il_db_at_fref".into()];
            let rows: Vec<Vec<String>> = doc
                .rows
                .iter()
                .map(|r| vec![sci(r.value_m), sci(r.corner_frequency_hz), opt(r.il_db_at_fref)])
                .collect();
            render::csv(&header, &rows)
        }
        _ => {
            let mut s = format!("{:>10} {:>12} {:>16}\n", format!("{}_mm", doc.param), "corner_GHz", "IL_dB_at_fref");
            for r in &doc.rows {
                let il = r.il_db_at_fref.map(|v| format!("{v:.5}")).unwrap_or_else(|| "-".into());
                let _ = writeln!(s, "{:>10.4} {:>12.4} {:>16}", r.value_m * 1e3, r.corner_frequency_hz / 1e9, il);
            }
            s
        }
    };
    render::emit(args.output.out.as_deref(), &text)?;
    Ok(())
}

#[derive(Serialize)]
struct SectionsDoc {
    command: &'static str,
    frequencies_hz: Vec<f64>,
    /// `attenuation_db[i][j]`: i+1 sections at frequency j.
    attenuation_db: Vec<Vec<f64>>,
}

pub fn sections(args: SectionsArgs) -> Outcome {
    let format = args.output.format.unwrap_or(Format::Csv);
    reject_touchstone(format, "sections")?;
    let design = load_design(&args.design)?;
    if args.max_sections < 1 {
        return Err(anyhow!("--max-sections must be at least 1").into());
    }
    let opts = CascadeOptions::default();
    let columns = args
        .freqs
        .iter()
        .map(|&f| attenuation_vs_sections(&design, f, args.max_sections, &opts))
        .collect::<Result<Vec<_>, HerdError>>()?;
    let attenuation_db: Vec<Vec<f64>> = (0..args.max_sections as usize)
        .map(|i| columns.iter().map(|c| c[i].1).collect())
        .collect();
    let doc = SectionsDoc {
        command: "sections",
        frequencies_hz: args.freqs.clone(),
        attenuation_db,
    };
    let text = match format {
        Format::Json => render::json(&doc)?,
        Format::Csv => {
            let mut header = vec!["sections".to_string()];
            header.extend(doc.frequencies_hz.iter().map(|f| format!("att_db_{f}Hz")));
            let rows: Vec<Vec<String>> = doc
                .attenuation_db
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let mut r = vec![(i + 1).to_string()];
                    r.extend(sci_row(row));
                    r
                })
                .collect();
            render::csv(&header, &rows)
        }
        _ => {
            let mut s = format!("{:>8}", "sections");
            for f in &doc.frequencies_hz {
                let _ = write!(s, " {:>12}", format!("{:.3}GHz", f / 1e9));
            }
            s.push('\n');
            for (i, row) in doc.attenuation_db.iter().enumerate() {
                let _ = write!(s, "{:>8}", i + 1);
                for v in row {
                    let _ = write!(s, " {v:>12.3}");
                }
                s.push('\n');
            }
            s
        }
    };
    render::emit(args.output.out.as_deref(), &text)?;
    Ok(())
}

#[derive(Serialize)]
struct SynthesisDoc<'a> {
    command: &'static str,
    report: &'a SynthesisReport,
}

pub fn synthesize(args: SynthesizeArgs) -> Outcome {
    let format = args.output.format.unwrap_or(Format::Text);
    reject_touchstone(format, "synthesize")?;
    let spec = parse_spec(&read(&args.spec)?).with_context(|| format!("spec file {}", args.spec.display()))?;
    let report = match run_synthesis(&spec) {
        Ok(r) => r,
        Err(e @ HerdError::Infeasible { .. }) => return Err(Failure::Infeasible(e.into())),
        Err(e) => return Err(e.into()),
    };
    let design_text = write_design(&report.design);
    if let Some(path) = &args.output.out {
        render::emit(Some(path), &design_text)?;
    }
    let text = match format {
        Format::Json => render::json(&SynthesisDoc {
            command: "synthesize",
            report: &report,
        })?,
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "design: {}", render::design_summary(&report.design));
            let _ = writeln!(s, "corner frequency  {:.4} GHz", corner_frequency(&report.design) / 1e9);
            let _ = writeln!(s, "passband margin   {:.4} dB", report.margin_passband_db);
            let _ = writeln!(s, "stopband margin   {:.4} dB", report.margin_stopband_db);
            let _ = writeln!(s, "section length    {:.2} mm", report.total_length * 1e3);
            if args.output.out.is_none() {
                s.push('\n');
                s.push_str(&design_text);
            }
            s
        }
    };
    render::emit(None, &text)?;
    Ok(())
}

#[derive(Serialize)]
struct CompareDoc<'a> {
    command: &'static str,
    phase_absent: bool,
    points: usize,
    claims: ClaimsDoc<'a>,
    /// Per claim row: largest |IL_measured - IL_model| in the claim's band.
    max_il_deviation_db: Vec<Option<f64>>,
}

pub fn compare(args: CompareArgs) -> Outcome {
    let format = args.output.format.unwrap_or(Format::Text);
    reject_touchstone(format, "compare")?;
    let measured = parse_touchstone(&read(&args.measured)?)
        .with_context(|| format!("touchstone file {}", args.measured.display()))?;
    let design = load_design(&args.design)?;
    let claims = load_claims(&args.claims)?;
    let model = filter_response_with(&design, measured.grid(), &CascadeOptions::default(), Execution::Parallel)?;
    let report = check_claims(&measured, &claims);
    let deviations: Vec<Option<f64>> =
        claims.iter().map(|c| max_il_deviation(&measured, &model, c.band).ok()).collect();

    let text = match format {
        Format::Json => render::json(&CompareDoc {
            command: "compare",
            phase_absent: measured.phase_absent,
            points: measured.len(),
            claims: ClaimsDoc {
                profile: &args.claims,
                passed: report.passed(),
                report: &report,
            },
            max_il_deviation_db: deviations,
        })?,
        _ => {
            let mut s = format!("measured: {} points", measured.len());
            if measured.phase_absent {
                s.push_str(" (phase absent: magnitude-only data)");
            }
            s.push('\n');
            s + &render::claims_text(&args.claims, &report, Some(&deviations))
        }
    };
    render::emit(args.output.out.as_deref(), &text)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Compliance)
    }
}
