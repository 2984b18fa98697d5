//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use herd_core::cascade::{attenuation_vs_sections, calibrate_kappa, filter_response, CascadeOptions, Provenance};
use herd_core::kvfile::write_design;
use herd_core::model::C0;
use herd_core::{
    coax_ratio_for_impedance, corner_frequency, inband_transmission, min_depth_for_budget, mismatch_loss_db,
    parse_touchstone, prototype_design, solve_inner_radius, synthesize, verify, write_touchstone, DataFormat,
    DesignSpec, FilterDesign, FrequencyGrid, FrequencyUnit, HerdError, Material, SParamTable, TwoPort,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn within(name: &str, value: f64, lo: f64, hi: f64) -> Check {
    if value >= lo && value <= hi {
        Ok(format!("{name} = {value:.6}"))
    } else {
        Err(format!("{name} = {value:.6} outside [{lo}, {hi}]"))
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn impedance_ratio() -> Check {
    within("b/a", coax_ratio_for_impedance(50.0, &Material::AIR).map_err(fail)?, 2.301, 2.304)
}

fn inner_radius() -> Check {
    let g = solve_inner_radius(50.0, 10e9, &Material::AIR).map_err(fail)?;
    within("r_i [mm]", g.r_inner * 1e3, 2.88, 2.90)
}

fn mismatch_loss() -> Check {
    within("mismatch loss [dB]", mismatch_loss_db(-20.0).map_err(fail)?, 0.0431, 0.0441)
}

fn prototype_inband() -> Check {
    let il = inband_transmission(&prototype_design(), 10e9).map_err(fail)?.insertion_loss_db;
    let frozen = 0.127_267_896_42;
    if (il - frozen).abs() > 1e-9 {
        return Err(format!("IL = {il:.12} dB differs from the high-precision value {frozen}"));
    }
    let line = within("IL(10 GHz) [dB]", il, 0.122, 0.132)?;
    if il > 0.15 {
        return Err(format!("IL = {il:.4} dB exceeds 0.15 dB"));
    }
    Ok(line)
}

fn depth_inversion() -> Check {
    let d = min_depth_for_budget(&prototype_design(), 10e9, 0.127).map_err(fail)?;
    within("d_min [mm]", d * 1e3, 4.83, 4.87)
}

fn stopband_calibration() -> Check {
    let design = prototype_design();
    let kappa = calibrate_kappa(&design, 70e9, 60.0, &CascadeOptions::default()).map_err(fail)?;
    let line = within("kappa", kappa, 0.3495, 0.3515)?;
    let grid = FrequencyGrid::linear(70e9, 145e9, 1000).map_err(fail)?;
    let start = Instant::now();
    let table = filter_response(&design, &grid).map_err(fail)?;
    let elapsed = start.elapsed();
    let worst = table.entries().iter().map(TwoPort::insertion_loss_db).fold(f64::INFINITY, f64::min);
    if worst < 60.0 {
        return Err(format!("{line}; minimum attenuation {worst:.4} dB below 60 dB"));
    }
    if elapsed > Duration::from_secs(1) {
        return Err(format!("{line}; 1000-point response took {elapsed:?}"));
    }
    Ok(format!("{line}; min attenuation 70-145 GHz = {worst:.4} dB in {elapsed:?}"))
}

fn section_scaling() -> Check {
    let design = prototype_design();
    let mut steps = Vec::new();
    for f in [40e9, 60e9, 70e9] {
        let rows = attenuation_vs_sections(&design, f, 8, &CascadeOptions::default()).map_err(fail)?;
        let first = rows[1].1 - rows[0].1;
        for w in rows.windows(2) {
            let diff = w[1].1 - w[0].1;
            if (diff - first).abs() > 1e-9 {
                return Err(format!("at {} GHz step {} -> {} is {diff} dB, expected {first}", f / 1e9, w[0].0, w[1].0));
            }
        }
        steps.push(format!("{:.4}", first));
    }
    Ok(format!("dB per section at 40/60/70 GHz = {}", steps.join("/")))
}

fn corner_properties() -> Check {
    let proto = prototype_design();
    let fc = corner_frequency(&proto);
    let line = within("corner [GHz]", fc / 1e9, 25.21, 25.31)?;
    let closed_form = C0 / (2.0 * proto.aperture.width_a * 2.2f64.sqrt());
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    if rel(fc, closed_form) > 1e-12 {
        return Err(format!("corner {fc} differs from closed form {closed_form}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let start = Instant::now();
    for i in 0..200 {
        let mut d = proto;
        d.aperture.width_a = rng.gen_range(1e-3..1e-2);
        d.aperture.height_b = rng.gen_range(1e-4..0.999) * d.aperture.width_a;
        d.aperture_fill = Material::dielectric(rng.gen_range(1.0..10.0));
        let base = corner_frequency(&d);

        let mut b_changed = d;
        b_changed.aperture.height_b = rng.gen_range(1e-4..0.999) * d.aperture.width_a;
        let k = rng.gen_range(1.01..4.0);
        let mut wider = d;
        wider.aperture.width_a *= k;
        let mut denser = d;
        denser.aperture_fill.eps_r *= k;

        let checks = [
            ("b invariance", corner_frequency(&b_changed), base),
            ("1/a scaling", corner_frequency(&wider), base / k),
            ("1/sqrt(eps) scaling", corner_frequency(&denser), base / k.sqrt()),
        ];
        for (what, got, want) in checks {
            if got != want && rel(got, want) > 1e-9 {
                return Err(format!("geometry {i}: {what} violated ({got} vs {want})"));
            }
        }
    }
    Ok(format!("{line}; 200 random geometries in {:?}", start.elapsed()))
}

fn random_table(rng: &mut ChaCha8Rng) -> SParamTable {
    let n = rng.gen_range(1..40);
    let mut f = rng.gen_range(1e3..1e9);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        points.push(f);
        f *= rng.gen_range(1.001..1.5);
    }
    let value = |rng: &mut ChaCha8Rng| {
        let mag = 10f64.powf(rng.gen_range(-6.0..0.0));
        Complex64::from_polar(mag, rng.gen_range(-PI..PI))
    };
    let entries = (0..n)
        .map(|_| TwoPort::new(value(rng), value(rng), value(rng), value(rng), 50.0))
        .collect();
    SParamTable::new(FrequencyGrid::new(points).unwrap(), entries, Provenance::Measured, "random").unwrap()
}

fn tables_agree(a: &SParamTable, b: &SParamTable, tol: f64) -> Result<(), String> {
    if a.len() != b.len() {
        return Err(format!("length {} vs {}", a.len(), b.len()));
    }
    let close = |x: Complex64, y: Complex64| (x - y).norm() <= tol * x.norm().max(y.norm());
    for ((fa, ea), (fb, eb)) in a.iter().zip(b.iter()) {
        if ((fa - fb) / fa).abs() > tol {
            return Err(format!("frequency {fa} vs {fb}"));
        }
        let pairs = [(ea.s11, eb.s11), (ea.s12, eb.s12), (ea.s21, eb.s21), (ea.s22, eb.s22)];
        if !pairs.iter().all(|&(x, y)| close(x, y)) {
            return Err(format!("entry at {fa} Hz differs: {ea:?} vs {eb:?}"));
        }
    }
    Ok(())
}

fn touchstone_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let start = Instant::now();
    let mut count = 0;
    for i in 0..1000 {
        let format = DataFormat::ALL[i % 3];
        let unit = FrequencyUnit::ALL[(i / 3) % 4];
        let original = random_table(&mut rng);
        let first = parse_touchstone(&write_touchstone(&original, format, unit).map_err(fail)?).map_err(fail)?;
        let second = parse_touchstone(&write_touchstone(&first, format, unit).map_err(fail)?).map_err(fail)?;
        tables_agree(&original, &first, 1e-9).map_err(|e| format!("table {i} ({format:?}, {unit:?}) write/parse: {e}"))?;
        tables_agree(&first, &second, 1e-9).map_err(|e| format!("table {i} ({format:?}, {unit:?}) re-parse: {e}"))?;
        count += 1;
    }
    Ok(format!("{count} tables over 3 formats x 4 units in {:?}", start.elapsed()))
}

fn random_spec(rng: &mut ChaCha8Rng) -> DesignSpec {
    let f_pass = rng.gen_range(2e9..15e9);
    DesignSpec {
        z0: rng.gen_range(30.0..75.0),
        f_passband_top: f_pass,
        passband_il_budget_db: rng.gen_range(0.05..0.5),
        f_stopband_start: f_pass * rng.gen_range(1.5..4.0),
        stopband_min_attenuation_db: rng.gen_range(20.0..80.0),
        aperture_fill: Material::dielectric(rng.gen_range(1.0..4.0)),
        coax_fill: Material::AIR,
        apertures_per_section: rng.gen_range(4..12),
    }
}

fn synthesis_closure() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut feasible, mut skipped) = (0, 0);
    while feasible < 50 {
        if feasible + skipped > 5000 {
            return Err(format!("only {feasible} feasible specs in {skipped} attempts"));
        }
        let spec = random_spec(&mut rng);
        let report = match synthesize(&spec) {
            Ok(r) => r,
            Err(HerdError::Infeasible { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(format!("{spec:?}: {e}")),
        };
        let check = verify(&report.design, &spec).map_err(fail)?;
        if check.margin_passband_db < 0.0 || check.margin_stopband_db < 0.0 {
            return Err(format!(
                "{spec:?}: margins {} / {} dB",
                check.margin_passband_db, check.margin_stopband_db
            ));
        }
        feasible += 1;
    }

    let reference = synthesize(&DesignSpec::reference()).map_err(fail)?;
    let d = reference.design;
    let a_mm = d.aperture.width_a * 1e3;
    let d_mm = d.aperture.depth_d * 1e3;
    if (a_mm - 4.0).abs() > 0.1 || d.sections != 4 || !(4.5..=5.2).contains(&d_mm) {
        return Err(format!("reference design a = {a_mm:.4} mm, sections = {}, d = {d_mm:.4} mm", d.sections));
    }
    Ok(format!(
        "{feasible} random specs closed ({skipped} infeasible skipped); reference a = {a_mm:.4} mm, {} sections, d = {d_mm:.4} mm",
        d.sections
    ))
}

fn run_analyze(design: &FilterDesign) -> Result<i32, String> {
    let dir = tempfile::tempdir().map_err(fail)?;
    let path = dir.path().join("design.cfg");
    std::fs::write(&path, write_design(design)).map_err(fail)?;
    let out = Command::new(env!("CARGO_BIN_EXE_herd"))
        .args(["analyze", "--design"])
        .arg(&path)
        .args(["--claims", "default", "--format", "text"])
        .output()
        .map_err(fail)?;
    out.status.code().ok_or_else(|| "terminated by signal".to_string())
}

fn end_to_end() -> Check {
    let start = Instant::now();
    let four = run_analyze(&prototype_design())?;
    let two = run_analyze(&prototype_design().with_sections(2))?;
    let elapsed = start.elapsed();
    if four != 0 || two != 1 {
        return Err(format!("exit codes {four} (4 sections) and {two} (2 sections), expected 0 and 1"));
    }
    Ok(format!("exit 0 with 4 sections, exit 1 with 2 sections in {elapsed:?}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("impedance ratio", impedance_ratio),
        ("inner-radius solve", inner_radius),
        ("mismatch loss", mismatch_loss),
        ("prototype in-band loss", prototype_inband),
        ("depth inversion", depth_inversion),
        ("stopband calibration", stopband_calibration),
        ("section scaling", section_scaling),
        ("corner-frequency properties", corner_properties),
        ("touchstone round-trip", touchstone_round_trip),
        ("synthesis closure", synthesis_closure),
        ("end-to-end", end_to_end),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
