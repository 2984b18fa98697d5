//! Full-band S-parameter prediction by chaining identical section
//! two-ports.
//!
//! Each section drains power through its apertures: below the corner
//! frequency by evanescent tunnelling, above it by a fixed per-aperture
//! fraction `stopband_kappa`. A normalized logistic blend joins the two
//! regimes across a band of fractional width `transition_width` centred on
//! the corner. Sections are separated by an ideal line of length
//! `section_pitch`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{HerdError, Result};
use crate::exec::{try_map_points, Execution};
use crate::leakage::{evanescent_amplitude, transmission_for_count};
use crate::model::{FilterDesign, FrequencyGrid, C0};
use crate::modes::corner_frequency;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Steepness of the logistic used for the cutoff transition.
const BLEND_STEEPNESS: f64 = 10.0;

/// Scattering matrix of a two-port at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPort {
    pub s11: Complex64,
    pub s12: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
    /// Reference impedance of both ports, ohms.
    pub z_ref: f64,
}

impl TwoPort {
    pub fn new(s11: Complex64, s12: Complex64, s21: Complex64, s22: Complex64, z_ref: f64) -> Self {
        TwoPort { s11, s12, s21, s22, z_ref }
    }

    /// Reciprocal two-port (`s12 = s21`).
    pub fn reciprocal(s11: Complex64, s21: Complex64, s22: Complex64, z_ref: f64) -> Self {
        Self::new(s11, s21, s21, s22, z_ref)
    }

    /// Zero-length matched through connection.
    pub fn identity(z_ref: f64) -> Self {
        Self::reciprocal(ZERO, ONE, ZERO, z_ref)
    }

    /// Matched line section with power transmission `power` and phase delay `phase_rad`.
    pub fn matched(power: f64, phase_rad: f64, z_ref: f64) -> Self {
        let s21 = Complex64::from_polar(power.sqrt(), -phase_rad);
        Self::reciprocal(ZERO, s21, ZERO, z_ref)
    }

    /// Largest singular value of the S matrix; at most 1 for a passive network.
    pub fn max_singular_value(&self) -> f64 {
        // Largest eigenvalue of S S^H; the discriminant is a sum of squares.
        let p = self.s11.norm_sqr() + self.s12.norm_sqr();
        let q = self.s21.norm_sqr() + self.s22.norm_sqr();
        let r = self.s11 * self.s21.conj() + self.s12 * self.s22.conj();
        let disc = ((p - q) * (p - q) + 4.0 * r.norm_sqr()).sqrt();
        (0.5 * (p + q + disc)).sqrt()
    }

    pub fn is_passive(&self) -> bool {
        self.max_singular_value() <= 1.0 + 1e-9
    }

    pub fn is_reciprocal(&self) -> bool {
        self.s12 == self.s21
    }

    /// `-20 log10 |s21|`.
    pub fn insertion_loss_db(&self) -> f64 {
        -20.0 * self.s21.norm().log10()
    }

    /// `20 log10 |s11|`.
    pub fn return_loss_db(&self) -> f64 {
        20.0 * self.s11.norm().log10()
    }

    /// Wave-cascading matrix `[[t11, t12], [t21, t22]]`, relating port-1 waves
    /// to port-2 waves so that chains multiply left to right.
    fn to_t(self) -> Result<[[Complex64; 2]; 2]> {
        if self.s21 == ZERO {
            return Err(HerdError::domain("two-port with s21 = 0 has no transmission matrix"));
        }
        let det = self.s11 * self.s22 - self.s12 * self.s21;
        let inv = ONE / self.s21;
        Ok([[-det * inv, self.s11 * inv], [-self.s22 * inv, inv]])
    }

    fn from_t(t: [[Complex64; 2]; 2], z_ref: f64) -> Self {
        let inv = ONE / t[1][1];
        let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
        TwoPort {
            s11: t[0][1] * inv,
            s12: det * inv,
            s21: inv,
            s22: -t[1][0] * inv,
            z_ref,
        }
    }
}

fn mat_mul(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Chains two-ports in order (port 2 of each feeds port 1 of the next).
pub fn cascade(ports: &[TwoPort]) -> Result<TwoPort> {
    let (first, rest) = ports
        .split_first()
        .ok_or_else(|| HerdError::domain("cannot cascade an empty list of two-ports"))?;
    if let Some(p) = rest.iter().find(|p| p.z_ref != first.z_ref) {
        return Err(HerdError::domain(format!(
            "reference impedance mismatch: {} ohm vs {} ohm",
            first.z_ref, p.z_ref
        )));
    }
    if rest.is_empty() {
        return Ok(*first);
    }
    let mut t = first.to_t()?;
    for p in rest {
        t = mat_mul(t, p.to_t()?);
    }
    let mut out = TwoPort::from_t(t, first.z_ref);
    if ports.iter().all(TwoPort::is_reciprocal) {
        // A chain of reciprocal networks is reciprocal; drop the rounding
        // difference between the two transfer terms.
        out.s12 = out.s21;
    }
    Ok(out)
}

/// Knobs of the section model that are not part of the filter geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CascadeOptions {
    /// Width of the cutoff transition as a fraction of the corner frequency.
    pub transition_width: f64,
    /// Constant port reflection, as a (negative) return loss in dB. `None`
    /// keeps every section matched.
    pub return_loss_floor_db: Option<f64>,
}

impl Default for CascadeOptions {
    fn default() -> Self {
        CascadeOptions {
            transition_width: 0.10,
            return_loss_floor_db: None,
        }
    }
}

impl CascadeOptions {
    /// Matched model plus a constant mismatch at the usual -20 dB design target.
    pub fn with_mismatch() -> Self {
        CascadeOptions {
            return_loss_floor_db: Some(-20.0),
            ..Self::default()
        }
    }
}

/// Weight of the above-cutoff regime at `f`: 0 below the transition band,
/// 1 above it, 1/2 at the corner.
pub fn stopband_weight(corner: f64, f: f64, transition_width: f64) -> f64 {
    if transition_width <= 0.0 {
        return match f.partial_cmp(&corner) {
            Some(std::cmp::Ordering::Less) => 0.0,
            Some(std::cmp::Ordering::Equal) => 0.5,
            _ => 1.0,
        };
    }
    let x = (f - corner) / (transition_width * corner);
    if x <= -0.5 {
        return 0.0;
    }
    if x >= 0.5 {
        return 1.0;
    }
    // Logistic rescaled to hit exactly 0 and 1 at the band edges, written
    // through tanh so the corner maps to exactly 1/2.
    let edge = (0.25 * BLEND_STEEPNESS).tanh();
    (0.5 * (1.0 + (0.5 * BLEND_STEEPNESS * x).tanh() / edge)).clamp(0.0, 1.0)
}

/// Power transmission of one section before any mismatch.
pub fn section_power_transmission(design: &FilterDesign, f: f64, opts: &CascadeOptions) -> Result<f64> {
    design.ensure_valid()?;
    if !(f.is_finite() && f > 0.0) {
        return Err(HerdError::domain(format!("frequency must be positive, got {f}")));
    }
    let n = u64::from(design.apertures_per_section);
    let corner = corner_frequency(design);
    let w = stopband_weight(corner, f, opts.transition_width);
    let below = if f < corner && w < 1.0 {
        let amp = evanescent_amplitude(design, f)?;
        transmission_for_count(amp * amp, n)
    } else {
        // The dominant mode propagates freely through the aperture.
        0.0
    };
    let above = transmission_for_count(design.stopband_kappa, n);
    Ok((1.0 - w) * below + w * above)
}

/// Reference impedance of every model two-port, ohms.
const MODEL_Z_REF: f64 = 50.0;

/// One section reduced to its power transmission, line phase and
/// (optional) reflection magnitude.
struct SectionParts {
    power: f64,
    phase: f64,
    reflection: Option<f64>,
}

impl SectionParts {
    fn new(design: &FilterDesign, f: f64, opts: &CascadeOptions) -> Result<Self> {
        let power = section_power_transmission(design, f, opts)?;
        let phase = 2.0 * PI * f * design.section_pitch * design.coax_fill.refractive_index() / C0;
        let reflection = match opts.return_loss_floor_db {
            None => None,
            Some(rl) if rl < 0.0 => Some(10f64.powf(rl / 20.0)),
            Some(rl) => {
                return Err(HerdError::domain(format!("return-loss floor must be negative dB, got {rl}")));
            }
        };
        Ok(SectionParts { power, phase, reflection })
    }

    fn two_port(&self) -> TwoPort {
        match self.reflection {
            None => TwoPort::matched(self.power, self.phase, MODEL_Z_REF),
            Some(rho) => {
                let s21 = Complex64::from_polar((self.power * (1.0 - rho * rho)).sqrt(), -self.phase);
                // Reflection in quadrature with transmission keeps the section passive.
                let s11 = Complex64::from_polar(rho, -self.phase + PI / 2.0);
                TwoPort::reciprocal(s11, s21, s11, MODEL_Z_REF)
            }
        }
    }

    /// `count` identical sections in a row.
    fn chain(&self, count: u32) -> Result<TwoPort> {
        if count <= 1 {
            return Ok(self.two_port());
        }
        if self.reflection.is_none() {
            // Matched chain: powers multiply and phases add.
            let mag = self.power.sqrt().powi(count as i32);
            let s21 = Complex64::from_polar(mag, -self.phase * f64::from(count));
            return Ok(TwoPort::reciprocal(ZERO, s21, ZERO, MODEL_Z_REF));
        }
        let section = self.two_port();
        let mut chain = section;
        for _ in 1..count {
            chain = cascade(&[chain, section])?;
        }
        Ok(chain)
    }
}

/// S-parameters of one section at `f`.
pub fn section_two_port(design: &FilterDesign, f: f64, opts: &CascadeOptions) -> Result<TwoPort> {
    Ok(SectionParts::new(design, f, opts)?.two_port())
}

/// Whether a table came from a model or from an instrument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    Model,
    Measured,
}

/// Two-port S-parameters over a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SParamTable {
    grid: FrequencyGrid,
    entries: Vec<TwoPort>,
    pub provenance: Provenance,
    pub label: String,
    /// Set when only magnitudes were measured; stored phases are zero.
    pub phase_absent: bool,
}

impl SParamTable {
    pub fn new(
        grid: FrequencyGrid,
        entries: Vec<TwoPort>,
        provenance: Provenance,
        label: impl Into<String>,
    ) -> Result<Self> {
        if grid.len() != entries.len() {
            return Err(HerdError::domain(format!(
                "table has {} frequencies but {} entries",
                grid.len(),
                entries.len()
            )));
        }
        Ok(SParamTable {
            grid,
            entries,
            provenance,
            label: label.into(),
            phase_absent: false,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn frequencies(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn entries(&self) -> &[TwoPort] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(frequency, two-port)` pairs in grid order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &TwoPort)> {
        self.grid.points().iter().copied().zip(self.entries.iter())
    }
}

/// Predicted S-parameters of the complete filter.
pub fn filter_response(design: &FilterDesign, grid: &FrequencyGrid) -> Result<SParamTable> {
    filter_response_with(design, grid, &CascadeOptions::default(), Execution::default())
}

pub fn filter_response_with(
    design: &FilterDesign,
    grid: &FrequencyGrid,
    opts: &CascadeOptions,
    exec: Execution,
) -> Result<SParamTable> {
    design.ensure_valid()?;
    let entries = try_map_points(exec, grid.points(), |&f| {
        SectionParts::new(design, f, opts)?.chain(design.sections)
    })?;
    let label = format!("model: {} sections", design.sections);
    SParamTable::new(grid.clone(), entries, Provenance::Model, label)
}

/// Attenuation in dB of 1..=`max_sections` sections at `f`.
pub fn attenuation_vs_sections(
    design: &FilterDesign,
    f: f64,
    max_sections: u32,
    opts: &CascadeOptions,
) -> Result<Vec<(u32, f64)>> {
    let section = SectionParts::new(design, f, opts)?;
    (1..=max_sections)
        .map(|n| Ok((n, section.chain(n)?.insertion_loss_db())))
        .collect()
}

/// Per-aperture stopband drain that makes the design reach `target_total_db`
/// at `f_ref`. `f_ref` must lie above the cutoff transition band.
pub fn calibrate_kappa(design: &FilterDesign, f_ref: f64, target_total_db: f64, opts: &CascadeOptions) -> Result<f64> {
    design.ensure_valid()?;
    if !(target_total_db >= 0.0 && target_total_db.is_finite()) {
        return Err(HerdError::domain(format!(
            "target attenuation must be non-negative, got {target_total_db}"
        )));
    }
    let corner = corner_frequency(design);
    if stopband_weight(corner, f_ref, opts.transition_width) < 1.0 {
        return Err(HerdError::domain(format!(
            "calibration frequency {f_ref:.6e} Hz is not above the cutoff transition near {corner:.6e} Hz"
        )));
    }
    let count = design.total_apertures() as f64;
    Ok(-(-target_total_db * std::f64::consts::LN_10 / (10.0 * count)).exp_m1())
}

/// Stopband attenuation of a single section for a given `kappa`, dB.
pub fn section_stopband_db(apertures_per_section: u32, kappa: f64) -> f64 {
    -10.0 * f64::from(apertures_per_section) * (1.0 - kappa).log10()
}
