//! In-band leakage: evanescent tunnelling through each aperture, with the
//! loss of all apertures combined additively in power.

use serde::Serialize;

use crate::error::{HerdError, Result};
use crate::exec::{try_map_points, Execution};
use crate::model::{FilterDesign, FrequencyGrid};
use crate::modes::{corner_frequency, rect_gamma, ModeIndex};

/// Leakage figures at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InbandLossBreakdown {
    pub frequency: f64,
    /// `|F|^2`, power tunnelling through one aperture.
    pub per_aperture_leak_power: f64,
    /// `(1 - |F|^2)^A` over all `A` apertures.
    pub total_transmission: f64,
    pub insertion_loss_db: f64,
}

/// Attenuation constant of the dominant aperture mode, Np/m. Errors at or
/// above the corner frequency where the mode propagates.
fn dominant_gamma(design: &FilterDesign, f: f64) -> Result<f64> {
    design.ensure_valid()?;
    let fc = corner_frequency(design);
    if !(f > 0.0 && f < fc) {
        return Err(HerdError::domain(format!(
            "evanescent model needs 0 < f < corner frequency {fc:.6e} Hz, got {f:.6e} Hz"
        )));
    }
    let index = ModeIndex::fundamental(design.dominant_mode_axis);
    Ok(rect_gamma(index, &design.aperture, &design.aperture_fill, f)?.re)
}

/// Field amplitude `exp(-gamma d)` left after the aperture depth.
pub fn evanescent_amplitude(design: &FilterDesign, f: f64) -> Result<f64> {
    let gamma = dominant_gamma(design, f)?;
    Ok((-gamma * design.aperture.depth_d).exp())
}

pub(crate) fn transmission_for_count(leak_power: f64, count: u64) -> f64 {
    // powf over powi: counts beyond i32 are still valid designs.
    (1.0 - leak_power).powf(count as f64)
}

/// Total in-band transmission of all apertures at `f`.
pub fn inband_transmission(design: &FilterDesign, f: f64) -> Result<InbandLossBreakdown> {
    let amp = evanescent_amplitude(design, f)?;
    let leak = amp * amp;
    let t = transmission_for_count(leak, design.total_apertures());
    Ok(InbandLossBreakdown {
        frequency: f,
        per_aperture_leak_power: leak,
        total_transmission: t,
        insertion_loss_db: -10.0 * t.log10(),
    })
}

/// Insertion loss implied by a reflection of `return_loss_db` (negative dB).
pub fn mismatch_loss_db(return_loss_db: f64) -> Result<f64> {
    if !(return_loss_db < 0.0) {
        return Err(HerdError::domain(format!(
            "return loss must be negative dB, got {return_loss_db}"
        )));
    }
    let reflected = 10f64.powf(return_loss_db / 10.0);
    Ok(-10.0 * (-reflected).ln_1p() / std::f64::consts::LN_10)
}

/// Shallowest aperture depth keeping the in-band loss at `f` within `budget_db`.
pub fn min_depth_for_budget(design: &FilterDesign, f: f64, budget_db: f64) -> Result<f64> {
    if !(budget_db > 0.0) {
        return Err(HerdError::domain(format!(
            "loss budget must be positive, got {budget_db}"
        )));
    }
    let gamma = dominant_gamma(design, f)?;
    let count = design.total_apertures() as f64;
    // Required per-aperture leak power; exp_m1 keeps small budgets accurate.
    let leak = -(-budget_db * std::f64::consts::LN_10 / (10.0 * count)).exp_m1();
    if !(leak > 0.0) {
        return Err(HerdError::Infeasible {
            constraint: format!("loss budget {budget_db} dB is too small to resolve"),
        });
    }
    let depth = -0.5 * leak.ln() / gamma;
    Ok(depth.max(0.0))
}

/// In-band loss at every grid point.
pub fn inband_loss_curve(design: &FilterDesign, grid: &FrequencyGrid) -> Result<Vec<InbandLossBreakdown>> {
    inband_loss_curve_with(design, grid, Execution::default())
}

pub fn inband_loss_curve_with(
    design: &FilterDesign,
    grid: &FrequencyGrid,
    exec: Execution,
) -> Result<Vec<InbandLossBreakdown>> {
    try_map_points(exec, grid.points(), |&f| inband_transmission(design, f))
}
