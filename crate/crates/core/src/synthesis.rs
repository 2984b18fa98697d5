//! Inverse design: performance targets to a filter geometry.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cascade::{filter_response_with, section_stopband_db, CascadeOptions};
use crate::error::{HerdError, Result};
use crate::exec::Execution;
use crate::leakage::min_depth_for_budget;
use crate::model::{
    FilterDesign, FrequencyGrid, Material, ModeAxis, RectAperture, C0, DEFAULT_APERTURES_PER_SECTION,
    DEFAULT_SECTION_PITCH, DEFAULT_STOPBAND_KAPPA, ELEMENTARY_CHARGE, PLANCK_H,
};
use crate::modes::solve_inner_radius;

/// Photon frequency that breaks Cooper pairs across a gap `gap_energy_ev`
/// (electron-volts): `2 Delta / h`, in Hz.
pub fn pair_breaking_frequency(gap_energy_ev: f64) -> Result<f64> {
    if !(gap_energy_ev.is_finite() && gap_energy_ev > 0.0) {
        return Err(HerdError::domain(format!(
            "superconducting gap must be positive, got {gap_energy_ev} eV"
        )));
    }
    Ok(2.0 * gap_energy_ev * ELEMENTARY_CHARGE / PLANCK_H)
}

/// Performance targets for a new filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignSpec {
    /// Line impedance, ohms.
    pub z0: f64,
    /// Upper passband edge, which is also where the coax must stay single-mode.
    pub f_passband_top: f64,
    pub passband_il_budget_db: f64,
    pub f_stopband_start: f64,
    pub stopband_min_attenuation_db: f64,
    pub aperture_fill: Material,
    pub coax_fill: Material,
    pub apertures_per_section: u32,
}

impl DesignSpec {
    /// Targets of the published prototype: < 0.15 dB to 10 GHz, > 60 dB from
    /// a 25.3 GHz corner, PTFE-filled apertures in an air coax.
    pub fn reference() -> Self {
        DesignSpec {
            z0: 50.0,
            f_passband_top: 10e9,
            passband_il_budget_db: 0.15,
            f_stopband_start: 25.3e9,
            stopband_min_attenuation_db: 60.0,
            aperture_fill: Material::PTFE,
            coax_fill: Material::AIR,
            apertures_per_section: DEFAULT_APERTURES_PER_SECTION,
        }
    }

    fn ensure_valid(&self) -> Result<()> {
        let positive = [
            ("z0", self.z0),
            ("f_passband_top", self.f_passband_top),
            ("passband_il_budget_db", self.passband_il_budget_db),
            ("f_stopband_start", self.f_stopband_start),
            ("stopband_min_attenuation_db", self.stopband_min_attenuation_db),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(HerdError::domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.apertures_per_section < 1 {
            return Err(HerdError::domain("apertures_per_section must be >= 1"));
        }
        self.aperture_fill.ensure_valid()?;
        self.coax_fill.ensure_valid()
    }
}

/// Procedure constants the targets do not pin down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynthesisOptions {
    /// Single-mode limit as a multiple of the passband top.
    pub margin_factor: f64,
    /// Aperture height over width.
    pub height_ratio: f64,
    /// Stopband drain per aperture used to count sections.
    pub kappa: f64,
    /// Faces of the polygonal outer body carrying apertures.
    pub faces: u32,
    pub section_pitch: f64,
    /// Depth is rounded up to a multiple of this, metres.
    pub depth_resolution: f64,
    pub cascade: CascadeOptions,
    /// Samples per band when checking margins.
    pub verify_points: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            margin_factor: 1.0,
            height_ratio: 1.25,
            kappa: DEFAULT_STOPBAND_KAPPA,
            faces: 8,
            section_pitch: DEFAULT_SECTION_PITCH,
            depth_resolution: 1e-6,
            cascade: CascadeOptions::default(),
            verify_points: 256,
        }
    }
}

/// A design together with its forward-model margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynthesisReport {
    pub design: FilterDesign,
    /// Passband budget minus worst passband insertion loss, dB.
    pub margin_passband_db: f64,
    /// Worst stopband attenuation minus the target, dB.
    pub margin_stopband_db: f64,
    /// Axial length occupied by the sections, metres.
    pub total_length: f64,
}

impl SynthesisReport {
    pub fn meets_targets(&self) -> bool {
        self.margin_passband_db >= 0.0 && self.margin_stopband_db >= 0.0
    }
}

/// Largest aperture width that fits on one face of the polygonal body.
pub fn max_aperture_width(r_outer: f64, faces: u32) -> f64 {
    2.0 * r_outer * (PI / f64::from(faces)).tan()
}

pub fn synthesize(spec: &DesignSpec) -> Result<SynthesisReport> {
    synthesize_with(spec, &SynthesisOptions::default())
}

pub fn synthesize_with(spec: &DesignSpec, opts: &SynthesisOptions) -> Result<SynthesisReport> {
    spec.ensure_valid()?;
    if spec.f_stopband_start <= spec.f_passband_top {
        return Err(HerdError::Infeasible {
            constraint: format!(
                "stopband start {:.6e} Hz must lie above passband top {:.6e} Hz",
                spec.f_stopband_start, spec.f_passband_top
            ),
        });
    }
    if opts.faces < 3 {
        return Err(HerdError::domain("outer body needs at least 3 faces"));
    }

    let coax = solve_inner_radius(spec.z0, spec.f_passband_top * opts.margin_factor, &spec.coax_fill)?;

    let width = C0 / (2.0 * spec.f_stopband_start * spec.aperture_fill.refractive_index());
    let max_width = max_aperture_width(coax.r_outer, opts.faces);
    if width >= max_width {
        return Err(HerdError::Infeasible {
            constraint: format!(
                "aperture width {:.4} mm does not fit a face of the {}-sided body \
                 (a < 2 r_outer tan(pi/{}) = {:.4} mm)",
                width * 1e3,
                opts.faces,
                opts.faces,
                max_width * 1e3
            ),
        });
    }

    let per_section = section_stopband_db(spec.apertures_per_section, opts.kappa);
    let sections = (spec.stopband_min_attenuation_db / per_section - 1e-9).ceil().max(1.0);
    if sections > f64::from(u32::MAX) {
        return Err(HerdError::Infeasible {
            constraint: "section count overflows".into(),
        });
    }

    let mut design = FilterDesign {
        coax,
        coax_fill: spec.coax_fill,
        aperture: RectAperture {
            width_a: width,
            height_b: opts.height_ratio * width,
            depth_d: 1.0,
        },
        aperture_fill: spec.aperture_fill,
        apertures_per_section: spec.apertures_per_section,
        sections: sections as u32,
        section_pitch: opts.section_pitch,
        stopband_kappa: opts.kappa,
        dominant_mode_axis: ModeAxis::Width,
    };

    let depth = min_depth_for_budget(&design, spec.f_passband_top, spec.passband_il_budget_db)?;
    // Next whole step strictly above the exact depth.
    design.aperture.depth_d = ((depth / opts.depth_resolution).floor() + 1.0) * opts.depth_resolution;

    let report = verify_with(&design, spec, opts)?;
    if report.margin_passband_db < 0.0 {
        return Err(HerdError::Infeasible {
            constraint: format!(
                "passband loss exceeds budget by {:.4} dB (passband too close to the corner)",
                -report.margin_passband_db
            ),
        });
    }
    if report.margin_stopband_db < 0.0 {
        return Err(HerdError::Infeasible {
            constraint: format!("stopband attenuation short by {:.4} dB", -report.margin_stopband_db),
        });
    }
    Ok(report)
}

/// Forward-model margins of `design` against `spec`. Negative margins are
/// reported, not raised.
pub fn verify(design: &FilterDesign, spec: &DesignSpec) -> Result<SynthesisReport> {
    verify_with(design, spec, &SynthesisOptions::default())
}

pub fn verify_with(design: &FilterDesign, spec: &DesignSpec, opts: &SynthesisOptions) -> Result<SynthesisReport> {
    spec.ensure_valid()?;
    let n = opts.verify_points.max(2);
    let pass_grid = FrequencyGrid::linear(spec.f_passband_top / n as f64, spec.f_passband_top, n)?;
    let stop_grid = FrequencyGrid::linear(spec.f_stopband_start, 2.0 * spec.f_stopband_start, n)?;
    let exec = Execution::default();

    let pass = filter_response_with(design, &pass_grid, &opts.cascade, exec)?;
    let worst_il = pass
        .entries()
        .iter()
        .map(|e| e.insertion_loss_db())
        .fold(f64::NEG_INFINITY, f64::max);

    let stop = filter_response_with(design, &stop_grid, &opts.cascade, exec)?;
    let min_att = stop
        .entries()
        .iter()
        .map(|e| e.insertion_loss_db())
        .fold(f64::INFINITY, f64::min);

    Ok(SynthesisReport {
        design: *design,
        margin_passband_db: spec.passband_il_budget_db - worst_il,
        margin_stopband_db: min_att - spec.stopband_min_attenuation_db,
        total_length: f64::from(design.sections) * design.section_pitch,
    })
}
