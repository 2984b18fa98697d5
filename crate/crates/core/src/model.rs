//! Shared domain types, physical constants and the reference prototype.
//!
//! Every quantity is stored in SI units: metres, hertz, ohms, nepers per
//! metre. Decibels only appear in the reporting layers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{HerdError, Result};

/// Speed of light in vacuum, m/s.
pub const C0: f64 = 299_792_458.0;
/// Wave impedance of free space, ohms (CODATA 2018).
pub const ETA0: f64 = 376.730_313_668;
/// Planck constant, J s.
pub const PLANCK_H: f64 = 6.626_070_15e-34;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Default axial spacing between consecutive sections.
pub const DEFAULT_SECTION_PITCH: f64 = 0.010;
/// Default per-aperture power drain above the aperture cutoff.
///
/// Rounded up from the value that gives exactly 60 dB with 4 sections of
/// 8 apertures, so the reference design clears 60 dB with a small margin.
pub const DEFAULT_STOPBAND_KAPPA: f64 = 0.351;
/// Apertures per section on the octagonal body: two rings of four faces.
pub const DEFAULT_APERTURES_PER_SECTION: u32 = 8;

/// Electromagnetic properties of a fill medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub eps_r: f64,
    pub mu_r: f64,
    pub loss_tangent: f64,
}

impl Material {
    pub const AIR: Material = Material {
        eps_r: 1.0,
        mu_r: 1.0,
        loss_tangent: 0.0,
    };

    /// PTFE as used for the aperture slabs.
    pub const PTFE: Material = Material {
        eps_r: 2.2,
        mu_r: 1.0,
        loss_tangent: 4e-4,
    };

    /// Lossless, non-magnetic dielectric.
    pub fn dielectric(eps_r: f64) -> Self {
        Material {
            eps_r,
            ..Material::AIR
        }
    }

    /// `sqrt(eps_r * mu_r)`, the factor by which the medium slows a wave.
    pub fn refractive_index(&self) -> f64 {
        (self.eps_r * self.mu_r).sqrt()
    }

    /// Wave impedance relative to free space, `sqrt(mu_r / eps_r)`.
    pub fn relative_impedance(&self) -> f64 {
        (self.mu_r / self.eps_r).sqrt()
    }

    fn check(&self, prefix: &str, out: &mut Vec<Violation>) {
        if !(self.eps_r.is_finite() && self.eps_r >= 1.0) {
            out.push(Violation::new(format!("{prefix}.eps_r"), "must be finite and >= 1"));
        }
        if !(self.mu_r.is_finite() && self.mu_r >= 1.0) {
            out.push(Violation::new(format!("{prefix}.mu_r"), "must be finite and >= 1"));
        }
        if !(self.loss_tangent.is_finite() && self.loss_tangent >= 0.0) {
            out.push(Violation::new(
                format!("{prefix}.loss_tangent"),
                "must be finite and >= 0",
            ));
        }
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let mut v = Vec::new();
        self.check("material", &mut v);
        first_violation(v)
    }
}

/// Radii of a cylindrical coaxial line, metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoaxGeometry {
    pub r_inner: f64,
    pub r_outer: f64,
}

impl CoaxGeometry {
    pub fn new(r_inner: f64, r_outer: f64) -> Result<Self> {
        let g = CoaxGeometry { r_inner, r_outer };
        g.ensure_valid()?;
        Ok(g)
    }

    pub fn ratio(&self) -> f64 {
        self.r_outer / self.r_inner
    }

    fn check(&self, out: &mut Vec<Violation>) {
        let finite = self.r_inner.is_finite() && self.r_outer.is_finite();
        if !(finite && self.r_inner > 0.0) {
            out.push(Violation::new("coax.r_inner", "must be finite and > 0"));
        }
        if !(finite && self.r_outer > self.r_inner) {
            out.push(Violation::new("coax.r_outer", "must be greater than coax.r_inner"));
        }
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let mut v = Vec::new();
        self.check(&mut v);
        first_violation(v)
    }
}

/// Rectangular hollow-waveguide aperture: width `a`, height `b`, depth `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectAperture {
    pub width_a: f64,
    pub height_b: f64,
    pub depth_d: f64,
}

impl RectAperture {
    fn check(&self, out: &mut Vec<Violation>) {
        for (name, v) in [
            ("aperture.width_a", self.width_a),
            ("aperture.height_b", self.height_b),
            ("aperture.depth_d", self.depth_d),
        ] {
            if !(v.is_finite() && v > 0.0) {
                out.push(Violation::new(name, "must be finite and > 0"));
            }
        }
    }
}

/// Aperture axis along which the dominant (stopband-setting) mode varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ModeAxis {
    Width,
    Height,
}

impl ModeAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModeAxis::Width => "WIDTH",
            ModeAxis::Height => "HEIGHT",
        }
    }
}

impl std::str::FromStr for ModeAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "WIDTH" => Ok(ModeAxis::Width),
            "HEIGHT" => Ok(ModeAxis::Height),
            other => Err(format!("unknown mode axis `{other}` (expected WIDTH or HEIGHT)")),
        }
    }
}

/// A complete leaky-coax filter: coax line, aperture lattice and stopband
/// coupling parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterDesign {
    pub coax: CoaxGeometry,
    pub coax_fill: Material,
    pub aperture: RectAperture,
    pub aperture_fill: Material,
    pub apertures_per_section: u32,
    pub sections: u32,
    pub section_pitch: f64,
    pub stopband_kappa: f64,
    pub dominant_mode_axis: ModeAxis,
}

impl FilterDesign {
    /// Total number of leaking apertures over all sections.
    pub fn total_apertures(&self) -> u64 {
        u64::from(self.apertures_per_section) * u64::from(self.sections)
    }

    pub fn with_sections(mut self, sections: u32) -> Self {
        self.sections = sections;
        self
    }

    pub fn with_depth(mut self, depth: f64) -> Self {
        self.aperture.depth_d = depth;
        self
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        first_violation(validate(self))
    }
}

/// The fabricated four-section prototype.
pub fn prototype_design() -> FilterDesign {
    FilterDesign {
        coax: CoaxGeometry {
            r_inner: 1.59e-3,
            r_outer: 3.65e-3,
        },
        coax_fill: Material::AIR,
        aperture: RectAperture {
            width_a: 4.0e-3,
            height_b: 5.0e-3,
            depth_d: 4.85e-3,
        },
        aperture_fill: Material::PTFE,
        apertures_per_section: DEFAULT_APERTURES_PER_SECTION,
        sections: 4,
        section_pitch: DEFAULT_SECTION_PITCH,
        stopband_kappa: DEFAULT_STOPBAND_KAPPA,
        dominant_mode_axis: ModeAxis::Width,
    }
}

/// A broken invariant: the offending field and the rule it breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub constraint: String,
}

impl Violation {
    fn new(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            constraint: constraint.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.field, self.constraint)
    }
}

fn first_violation(v: Vec<Violation>) -> Result<()> {
    match v.into_iter().next() {
        None => Ok(()),
        Some(v) => Err(HerdError::Domain(v.to_string())),
    }
}

/// Lists every broken invariant of `design`; empty when the design is valid.
pub fn validate(design: &FilterDesign) -> Vec<Violation> {
    let mut out = Vec::new();
    design.coax.check(&mut out);
    design.coax_fill.check("coax_fill", &mut out);
    design.aperture.check(&mut out);
    design.aperture_fill.check("aperture_fill", &mut out);
    if design.apertures_per_section < 1 {
        out.push(Violation::new("apertures_per_section", "must be >= 1"));
    }
    if design.sections < 1 {
        out.push(Violation::new("sections", "must be >= 1"));
    }
    if !(design.section_pitch.is_finite() && design.section_pitch > 0.0) {
        out.push(Violation::new("section_pitch", "must be finite and > 0"));
    }
    if !(design.stopband_kappa > 0.0 && design.stopband_kappa < 1.0) {
        out.push(Violation::new("stopband_kappa", "must lie in (0, 1)"));
    }
    out
}

/// Strictly increasing list of positive frequencies, Hz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(HerdError::domain("frequency grid is empty"));
        }
        if let Some(bad) = points.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(HerdError::domain(format!(
                "frequency {bad} Hz is not finite and positive"
            )));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(HerdError::domain(format!(
                "frequencies not strictly increasing at {} Hz -> {} Hz",
                w[0], w[1]
            )));
        }
        Ok(FrequencyGrid { points })
    }

    pub fn single(f: f64) -> Result<Self> {
        Self::new(vec![f])
    }

    /// `n` evenly spaced points from `start` to `stop` inclusive.
    pub fn linear(start: f64, stop: f64, n: usize) -> Result<Self> {
        check_range(start, stop, n)?;
        let step = (stop - start) / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n).map(|i| start + step * i as f64).collect();
        pts[n - 1] = stop;
        Self::new(pts)
    }

    /// `n` logarithmically spaced points from `start` to `stop` inclusive.
    pub fn log(start: f64, stop: f64, n: usize) -> Result<Self> {
        check_range(start, stop, n)?;
        let (l0, l1) = (start.ln(), stop.ln());
        let step = (l1 - l0) / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n).map(|i| (l0 + step * i as f64).exp()).collect();
        pts[0] = start;
        pts[n - 1] = stop;
        Self::new(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_range(start: f64, stop: f64, n: usize) -> Result<()> {
    if !(start > 0.0 && stop > start && stop.is_finite()) {
        return Err(HerdError::domain(format!(
            "frequency range requires stop > start > 0 (got {start} .. {stop})"
        )));
    }
    if n < 2 {
        return Err(HerdError::domain("a frequency range needs at least 2 points"));
    }
    Ok(())
}
