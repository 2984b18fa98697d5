//! Touchstone v1 two-port files, band metrics and compliance claims.
//!
//! Grammar: optional `!` comment lines, exactly one option line
//! `# <unit> S <format> R <z>`, then data rows of nine numbers
//! `f S11 S21 S12 S22` with each S-parameter as a pair. Angles are degrees.
//! The nonstandard comment `!MAGONLY` marks magnitude-only data: angles are
//! ignored and the table is flagged as phase-absent.

use std::fmt::{self, Write as _};

use num_complex::Complex64;
use serde::Serialize;

use crate::cascade::{Provenance, SParamTable, TwoPort};
use crate::error::{HerdError, Result};
use crate::model::FrequencyGrid;

/// Written in place of `20 log10 0` in DB-format files.
pub const DB_FLOOR: f64 = -999.0;

const MAGONLY_DIRECTIVE: &str = "MAGONLY";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FrequencyUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FrequencyUnit {
    pub const ALL: [FrequencyUnit; 4] = [Self::Hz, Self::KHz, Self::MHz, Self::GHz];

    pub fn scale(self) -> f64 {
        match self {
            Self::Hz => 1.0,
            Self::KHz => 1e3,
            Self::MHz => 1e6,
            Self::GHz => 1e9,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Self::Hz => "HZ",
            Self::KHz => "KHZ",
            Self::MHz => "MHZ",
            Self::GHz => "GHZ",
        }
    }

    fn from_token(t: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|u| u.token() == t)
    }
}

/// How each complex value is written as a number pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DataFormat {
    /// Real, imaginary.
    RI,
    /// Linear magnitude, angle.
    MA,
    /// Magnitude in dB, angle.
    DB,
}

impl DataFormat {
    pub const ALL: [DataFormat; 3] = [Self::RI, Self::MA, Self::DB];

    pub fn token(self) -> &'static str {
        match self {
            Self::RI => "RI",
            Self::MA => "MA",
            Self::DB => "DB",
        }
    }

    fn from_token(t: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|u| u.token() == t)
    }

    fn decode(self, x: f64, y: f64, magnitude_only: bool) -> Complex64 {
        let (mag, deg) = match self {
            Self::RI if magnitude_only => (Complex64::new(x, y).norm(), 0.0),
            Self::RI => return Complex64::new(x, y),
            Self::MA => (x, y),
            Self::DB => (10f64.powf(x / 20.0), y),
        };
        let deg = if magnitude_only { 0.0 } else { deg };
        Complex64::from_polar(mag, deg.to_radians())
    }

    fn encode(self, z: Complex64) -> (f64, f64) {
        match self {
            Self::RI => (z.re, z.im),
            Self::MA => (z.norm(), z.arg().to_degrees()),
            Self::DB => {
                let mag = z.norm();
                let db = if mag > 0.0 { (20.0 * mag.log10()).max(DB_FLOOR) } else { DB_FLOOR };
                (db, z.arg().to_degrees())
            }
        }
    }
}

struct OptionLine {
    unit: FrequencyUnit,
    format: DataFormat,
    z_ref: f64,
}

fn parse_option_line(body: &str, line: usize) -> Result<OptionLine> {
    let mut opt = OptionLine {
        unit: FrequencyUnit::GHz,
        format: DataFormat::MA,
        z_ref: 50.0,
    };
    let mut tokens = body.split_whitespace().map(str::to_ascii_uppercase);
    while let Some(tok) = tokens.next() {
        if let Some(u) = FrequencyUnit::from_token(&tok) {
            opt.unit = u;
        } else if let Some(f) = DataFormat::from_token(&tok) {
            opt.format = f;
        } else if tok == "S" {
        } else if matches!(tok.as_str(), "Y" | "Z" | "H" | "G") {
            return Err(HerdError::parse(line, format!("only S parameters are supported, found `{tok}`")));
        } else if tok == "R" {
            let z = tokens
                .next()
                .and_then(|v| v.parse::<f64>().ok())
                .filter(|z| z.is_finite() && *z > 0.0)
                .ok_or_else(|| HerdError::parse(line, "`R` must be followed by a positive impedance"))?;
            opt.z_ref = z;
        } else {
            return Err(HerdError::parse(line, format!("malformed option line: unexpected `{tok}`")));
        }
    }
    Ok(opt)
}

/// Parses Touchstone v1 two-port text into a measured table.
pub fn parse_touchstone(text: &str) -> Result<SParamTable> {
    let mut option: Option<OptionLine> = None;
    let mut magnitude_only = false;
    let mut freqs = Vec::new();
    let mut entries = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('!') {
            if comment.trim().eq_ignore_ascii_case(MAGONLY_DIRECTIVE) {
                if !freqs.is_empty() {
                    return Err(HerdError::parse(line_no, "!MAGONLY must precede the data"));
                }
                magnitude_only = true;
            }
            continue;
        }
        let content = trimmed.split('!').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            return Err(HerdError::Unsupported(format!(
                "line {line_no}: Touchstone v2 keyword `{content}`; only v1 files are read"
            )));
        }
        if let Some(body) = content.strip_prefix('#') {
            if option.is_some() {
                return Err(HerdError::parse(line_no, "more than one option line"));
            }
            option = Some(parse_option_line(body, line_no)?);
            continue;
        }
        let opt = option
            .as_ref()
            .ok_or_else(|| HerdError::parse(line_no, "data row before the option line"))?;

        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 9 {
            return Err(HerdError::parse(
                line_no,
                format!("expected 9 fields for a two-port row, found {}", fields.len()),
            ));
        }
        let mut nums = [0.0f64; 9];
        for (slot, field) in nums.iter_mut().zip(&fields) {
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| HerdError::parse(line_no, format!("`{field}` is not a finite number")))?;
        }
        let f = nums[0] * opt.unit.scale();
        if !(f > 0.0) {
            return Err(HerdError::parse(line_no, format!("frequency must be positive, got {}", nums[0])));
        }
        if let Some(&prev) = freqs.last() {
            if f <= prev {
                return Err(HerdError::parse(line_no, "frequencies must be strictly increasing"));
            }
        }
        let v = |k: usize| opt.format.decode(nums[1 + 2 * k], nums[2 + 2 * k], magnitude_only);
        // Two-port column order is S11 S21 S12 S22.
        entries.push(TwoPort::new(v(0), v(2), v(1), v(3), opt.z_ref));
        freqs.push(f);
        last_line = line_no;
    }

    if option.is_none() {
        return Err(HerdError::parse(last_line.max(1), "missing option line"));
    }
    if freqs.is_empty() {
        return Err(HerdError::parse(text.lines().count().max(1), "no data rows"));
    }
    let grid = FrequencyGrid::new(freqs)?;
    let mut table = SParamTable::new(grid, entries, Provenance::Measured, "")?;
    table.phase_absent = magnitude_only;
    Ok(table)
}

/// Formats with 17 significant digits; zero is written as `0`.
fn num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Renders `table` as Touchstone v1 text.
pub fn write_touchstone(table: &SParamTable, format: DataFormat, unit: FrequencyUnit) -> Result<String> {
    let first = table
        .entries()
        .first()
        .ok_or_else(|| HerdError::domain("cannot write an empty table"))?;
    if let Some(e) = table.entries().iter().find(|e| e.z_ref != first.z_ref) {
        return Err(HerdError::domain(format!(
            "mixed reference impedances {} and {} ohm",
            first.z_ref, e.z_ref
        )));
    }
    let label: String = table.label.chars().map(|c| if c.is_control() { ' ' } else { c }).collect();
    let mut out = String::new();
    let _ = writeln!(out, "! herd {} : {}", env!("CARGO_PKG_VERSION"), label);
    if table.phase_absent {
        let _ = writeln!(out, "!{MAGONLY_DIRECTIVE}");
    }
    let _ = writeln!(out, "# {} S {} R {}", unit.token(), format.token(), first.z_ref);
    for (f, e) in table.iter() {
        let _ = write!(out, "{}", num(f / unit.scale()));
        for z in [e.s11, e.s21, e.s12, e.s22] {
            let (x, y) = format.encode(z);
            let _ = write!(out, " {} {}", num(x), num(y));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Closed frequency band `[low, high]` in Hz; `high` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub low: f64,
    pub high: f64,
}

impl Band {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low >= 0.0 && high > low) {
            return Err(HerdError::domain(format!("band needs 0 <= low < high, got [{low}, {high}]")));
        }
        Ok(Band { low, high })
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.low && f <= self.high
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ghz = |v: f64| {
            if v.is_infinite() {
                "inf".to_string()
            } else {
                format!("{}", v / 1e9)
            }
        };
        write!(f, "[{}, {}] GHz", ghz(self.low), ghz(self.high))
    }
}

/// Magnitude statistics over the grid points inside a band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandMetric {
    pub band: Band,
    pub points: usize,
    pub max_insertion_loss_db: f64,
    pub min_attenuation_db: f64,
    pub max_ripple_db: f64,
    pub worst_return_loss_db: f64,
}

pub fn band_metrics(table: &SParamTable, band: Band) -> Result<BandMetric> {
    let mut points = 0;
    let mut max_il = f64::NEG_INFINITY;
    let mut min_il = f64::INFINITY;
    let mut worst_rl = DB_FLOOR;
    for (_, e) in table.iter().filter(|(f, _)| band.contains(*f)) {
        let il = e.insertion_loss_db();
        max_il = max_il.max(il);
        min_il = min_il.min(il);
        worst_rl = worst_rl.max(e.return_loss_db());
        points += 1;
    }
    if points == 0 {
        return Err(HerdError::domain(format!("no data points in band {band}")));
    }
    Ok(BandMetric {
        band,
        points,
        max_insertion_loss_db: max_il,
        min_attenuation_db: min_il,
        max_ripple_db: max_il - min_il,
        worst_return_loss_db: worst_rl,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClaimKind {
    /// Largest insertion loss in band must not exceed the threshold.
    MaxIl,
    /// Smallest attenuation in band must reach the threshold.
    MinAtt,
    /// Insertion-loss ripple in band must not exceed the threshold.
    MaxRipple,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub description: String,
    pub band: Band,
    pub kind: ClaimKind,
    pub threshold_db: f64,
}

impl Claim {
    pub fn new(description: impl Into<String>, band: Band, kind: ClaimKind, threshold_db: f64) -> Self {
        Claim {
            description: description.into(),
            band,
            kind,
            threshold_db,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimResult {
    pub claim: Claim,
    pub observed_db: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplianceReport {
    pub rows: Vec<ClaimResult>,
}

impl ComplianceReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

pub fn check_claims(table: &SParamTable, claims: &[Claim]) -> ComplianceReport {
    let rows = claims
        .iter()
        .map(|claim| match band_metrics(table, claim.band) {
            Err(e) => ClaimResult {
                claim: claim.clone(),
                observed_db: None,
                pass: false,
                error: Some(e.to_string()),
            },
            Ok(m) => {
                let (observed, pass) = match claim.kind {
                    ClaimKind::MaxIl => (m.max_insertion_loss_db, m.max_insertion_loss_db <= claim.threshold_db),
                    ClaimKind::MinAtt => (m.min_attenuation_db, m.min_attenuation_db >= claim.threshold_db),
                    ClaimKind::MaxRipple => (m.max_ripple_db, m.max_ripple_db <= claim.threshold_db),
                };
                ClaimResult {
                    claim: claim.clone(),
                    observed_db: Some(observed),
                    pass,
                    error: None,
                }
            }
        })
        .collect();
    ComplianceReport { rows }
}

fn band(low: f64, high: f64) -> Band {
    Band::new(low, high).expect("static band")
}

/// Published performance: < 0.15 dB to 10 GHz, > 60 dB above 70 GHz,
/// ripple under 0.1 dB across 4-8 GHz.
pub fn default_claims() -> Vec<Claim> {
    vec![
        Claim::new("insertion loss <= 0.15 dB up to 10 GHz", band(0.0, 10e9), ClaimKind::MaxIl, 0.15),
        Claim::new("attenuation >= 60 dB above 70 GHz", band(70e9, f64::INFINITY), ClaimKind::MinAtt, 60.0),
        Claim::new("ripple <= 0.1 dB in 4-8 GHz", band(4e9, 8e9), ClaimKind::MaxRipple, 0.1),
    ]
}

/// As [`default_claims`] with the insertion-loss limit extended to 12 GHz.
pub fn strict12_claims() -> Vec<Claim> {
    let mut claims = default_claims();
    claims[0] = Claim::new("insertion loss <= 0.15 dB up to 12 GHz", band(0.0, 12e9), ClaimKind::MaxIl, 0.15);
    claims
}

/// Looks up a claim profile by name (`default` or `strict12`).
pub fn claims_profile(name: &str) -> Option<Vec<Claim>> {
    match name {
        "default" => Some(default_claims()),
        "strict12" => Some(strict12_claims()),
        _ => None,
    }
}

/// Largest `|IL_a - IL_b|` over points of `band`; both tables must share a grid.
pub fn max_il_deviation(a: &SParamTable, b: &SParamTable, band: Band) -> Result<f64> {
    if a.frequencies() != b.frequencies() {
        return Err(HerdError::domain("tables are on different frequency grids"));
    }
    let devs: Vec<f64> = a
        .iter()
        .zip(b.entries())
        .filter(|((f, _), _)| band.contains(*f))
        .map(|((_, x), y)| (x.insertion_loss_db() - y.insertion_loss_db()).abs())
        .collect();
    if devs.is_empty() {
        return Err(HerdError::domain(format!("no data points in band {band}")));
    }
    Ok(devs.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(points: &[(f64, f64)]) -> SParamTable {
        let grid = FrequencyGrid::new(points.iter().map(|p| p.0).collect()).unwrap();
        let entries = points
            .iter()
            .map(|&(_, il)| TwoPort::matched(10f64.powf(-il / 10.0), 0.0, 50.0))
            .collect();
        SParamTable::new(grid, entries, Provenance::Model, "t").unwrap()
    }

    #[test]
    fn parses_db_row() {
        let t = parse_touchstone("# GHZ S DB R 50\n10 -0.05 -10 -60.2 120 -60.2 120 -0.05 -10\n").unwrap();
        assert_eq!(t.frequencies(), &[1e10]);
        let e = t.entries()[0];
        assert!((e.s21.norm() - 10f64.powf(-60.2 / 20.0)).abs() < 1e-15);
        assert!((e.s21.arg().to_degrees() - 120.0).abs() < 1e-12);
        assert_eq!(t.provenance, Provenance::Measured);
    }

    #[test]
    fn parses_ri_row_with_comments() {
        let text = "! vna export\n!\n# HZ S RI R 50\n1e9 0.1 0 0.99 0 0.99 0 0.1 0 ! trailing\n";
        let t = parse_touchstone(text).unwrap();
        assert_eq!(t.entries()[0].s21, Complex64::new(0.99, 0.0));
        assert_eq!(t.frequencies(), &[1e9]);
    }

    #[test]
    fn option_defaults_and_case() {
        let t = parse_touchstone("#\n1 1 0 1 0 1 0 1 0\n").unwrap();
        assert_eq!(t.frequencies(), &[1e9]);
        let t = parse_touchstone("# mhz s ri r 75\n1 0 0 1 0 1 0 0 0\n").unwrap();
        assert_eq!(t.frequencies(), &[1e6]);
        assert_eq!(t.entries()[0].z_ref, 75.0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("# GHZ S XX R 50\n", 1),
            ("# GHZ Z RI R 50\n", 1),
            ("# GHZ S RI R\n", 1),
            ("# GHZ S RI R 50\n1 0 0 1 0 1 0 0\n", 2),
            ("# GHZ S RI R 50\n2 0 0 1 0 1 0 0 0\n1 0 0 1 0 1 0 0 0\n", 3),
            ("# GHZ S RI R 50\n1 0 0 1 0 1 0 0 x\n", 2),
            ("1 0 0 1 0 1 0 0 0\n", 1),
            ("# GHZ S RI R 50\n# GHZ S RI R 50\n", 2),
        ];
        for (text, line) in cases {
            match parse_touchstone(text) {
                Err(HerdError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(parse_touchstone("! only comments\n").is_err());
        assert!(parse_touchstone("# GHZ S RI R 50\n").is_err());
        assert!(matches!(
            parse_touchstone("[Version] 2.0\n# GHZ S RI R 50\n"),
            Err(HerdError::Unsupported(_))
        ));
    }

    #[test]
    fn magnitude_only_directive() {
        let t = parse_touchstone("!MAGONLY\n# GHZ S DB R 50\n80 -20 33 -70 -45 -70 -45 -20 12\n").unwrap();
        assert!(t.phase_absent);
        let e = t.entries()[0];
        assert_eq!(e.s21.im, 0.0);
        assert!((e.insertion_loss_db() - 70.0).abs() < 1e-12);
        let text = write_touchstone(&t, DataFormat::DB, FrequencyUnit::GHz).unwrap();
        assert!(text.contains("!MAGONLY"));
        assert!(parse_touchstone(&text).unwrap().phase_absent);
    }

    #[test]
    fn identity_db_row() {
        let grid = FrequencyGrid::single(1e9).unwrap();
        let t = SParamTable::new(grid, vec![TwoPort::identity(50.0)], Provenance::Model, "id").unwrap();
        let text = write_touchstone(&t, DataFormat::DB, FrequencyUnit::GHz).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("! herd {} : id", env!("CARGO_PKG_VERSION")));
        assert_eq!(lines[1], "# GHZ S DB R 50");
        let fields: Vec<&str> = lines[2].split_whitespace().collect();
        assert_eq!(fields.len(), 9);
        assert_eq!(&fields[3..5], &["0", "0"]);
        assert_eq!(fields[1], num(DB_FLOOR));
    }

    #[test]
    fn unit_scaling_is_exact() {
        let grid = FrequencyGrid::new(vec![1.5e9, 2.25e9]).unwrap();
        let t = SParamTable::new(grid, vec![TwoPort::identity(50.0); 2], Provenance::Model, "").unwrap();
        let text = write_touchstone(&t, DataFormat::RI, FrequencyUnit::GHz).unwrap();
        let first: f64 = text.lines().nth(2).unwrap().split_whitespace().next().unwrap().parse().unwrap();
        assert_eq!(first, 1.5);
        let back = parse_touchstone(&text).unwrap();
        assert_eq!(back.frequencies(), t.frequencies());
    }

    #[test]
    fn empty_table_cannot_be_written() {
        // Tables are never empty by construction; the guard is on entries.
        let grid = FrequencyGrid::single(1e9).unwrap();
        assert!(SParamTable::new(grid, vec![], Provenance::Model, "").is_err());
    }

    #[test]
    fn metrics_examples() {
        let flat = table(&[(1e9, 0.0873), (2e9, 0.0873), (3e9, 0.0873)]);
        let m = band_metrics(&flat, Band::new(0.0, 5e9).unwrap()).unwrap();
        assert_eq!(m.max_ripple_db, 0.0);
        assert_eq!(m.points, 3);

        let two = table(&[(4e9, 0.10), (8e9, 0.05)]);
        let m = band_metrics(&two, Band::new(4e9, 8e9).unwrap()).unwrap();
        assert!((m.max_ripple_db - 0.05).abs() < 1e-12);
        assert!((m.max_insertion_loss_db - 0.10).abs() < 1e-12);
        assert!((m.min_attenuation_db - 0.05).abs() < 1e-12);
        assert!(band_metrics(&two, Band::new(9e9, 10e9).unwrap()).is_err());
        assert!(Band::new(2.0, 1.0).is_err());
    }

    #[test]
    fn claim_rows() {
        let t = table(&[(1e9, 0.01), (2e9, 0.02)]);
        let claims = vec![
            Claim::new("lossless", Band::new(0.0, 3e9).unwrap(), ClaimKind::MaxIl, 0.0),
            Claim::new("empty band", Band::new(50e9, 60e9).unwrap(), ClaimKind::MinAtt, 10.0),
            Claim::new("ok", Band::new(0.0, 3e9).unwrap(), ClaimKind::MaxIl, 0.1),
        ];
        let r = check_claims(&t, &claims);
        assert_eq!(r.rows.len(), 3);
        assert!(!r.rows[0].pass);
        assert!(r.rows[1].error.as_deref().unwrap().contains("[50, 60] GHz"));
        assert!(r.rows[2].pass);
        assert!(!r.passed());
        assert!(claims_profile("default").is_some());
        assert!(claims_profile("strict12").is_some());
        assert!(claims_profile("lax").is_none());
    }
}
