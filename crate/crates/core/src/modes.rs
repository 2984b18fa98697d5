//! Closed-form mode arithmetic for the coaxial line and the rectangular
//! apertures.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{HerdError, Result};
use crate::model::{CoaxGeometry, FilterDesign, Material, ModeAxis, RectAperture, C0, ETA0};

/// TE mode index: `m` half-waves across the width `a`, `n` across the height `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ModeIndex {
    pub m: u32,
    pub n: u32,
}

impl ModeIndex {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        let idx = ModeIndex { m, n };
        idx.ensure_valid()?;
        Ok(idx)
    }

    /// Single half-wave along the given aperture axis.
    pub fn fundamental(axis: ModeAxis) -> Self {
        match axis {
            ModeAxis::Width => ModeIndex { m: 1, n: 0 },
            ModeAxis::Height => ModeIndex { m: 0, n: 1 },
        }
    }

    fn ensure_valid(&self) -> Result<()> {
        if self.m == 0 && self.n == 0 {
            return Err(HerdError::domain("TE00 is not a waveguide mode"));
        }
        Ok(())
    }
}

/// An aperture mode and its cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeEntry {
    pub index: ModeIndex,
    pub cutoff_hz: f64,
}

/// Characteristic impedance of the coaxial line, ohms.
pub fn coax_char_impedance(geom: &CoaxGeometry, fill: &Material) -> Result<f64> {
    geom.ensure_valid()?;
    fill.ensure_valid()?;
    Ok(ETA0 / (2.0 * PI) * fill.relative_impedance() * geom.ratio().ln())
}

/// Outer/inner radius ratio that realizes impedance `z0`.
pub fn coax_ratio_for_impedance(z0: f64, fill: &Material) -> Result<f64> {
    if !(z0.is_finite() && z0 > 0.0) {
        return Err(HerdError::domain(format!("impedance must be positive, got {z0}")));
    }
    fill.ensure_valid()?;
    Ok((2.0 * PI * z0 / (ETA0 * fill.relative_impedance())).exp())
}

/// Onset of the first higher-order coax mode, where the wavelength in the
/// fill equals the mean circumference `pi (r_o + r_i)`.
pub fn coax_first_higher_mode_cutoff(geom: &CoaxGeometry, fill: &Material) -> Result<f64> {
    geom.ensure_valid()?;
    fill.ensure_valid()?;
    Ok(C0 / (fill.refractive_index() * PI * (geom.r_outer + geom.r_inner)))
}

/// Coax radii with impedance `z0` whose first higher-order mode starts
/// exactly at `f_single_mode`.
pub fn solve_inner_radius(z0: f64, f_single_mode: f64, fill: &Material) -> Result<CoaxGeometry> {
    if !(f_single_mode.is_finite() && f_single_mode > 0.0) {
        return Err(HerdError::domain(format!(
            "single-mode frequency must be positive, got {f_single_mode}"
        )));
    }
    let ratio = coax_ratio_for_impedance(z0, fill)?;
    let r_inner = C0 / (fill.refractive_index() * f_single_mode * PI * (1.0 + ratio));
    CoaxGeometry::new(r_inner, ratio * r_inner)
}

/// Geometric cutoff wavenumber of the aperture cross-section, rad/m.
fn cutoff_wavenumber(index: ModeIndex, ap: &RectAperture) -> f64 {
    let kx = f64::from(index.m) * PI / ap.width_a;
    let ky = f64::from(index.n) * PI / ap.height_b;
    kx.hypot(ky)
}

/// Cutoff frequency of TE mode `index` in an aperture filled with `fill`.
pub fn rect_cutoff(index: ModeIndex, ap: &RectAperture, fill: &Material) -> Result<f64> {
    index.ensure_valid()?;
    let m = f64::from(index.m) / ap.width_a;
    let n = f64::from(index.n) / ap.height_b;
    Ok(C0 / (2.0 * fill.refractive_index()) * m.hypot(n))
}

/// Propagation constant of mode `index` at frequency `f`.
///
/// Below cutoff the result is real (attenuation, Np/m); above cutoff it is
/// purely imaginary (phase constant, rad/m).
pub fn rect_gamma(index: ModeIndex, ap: &RectAperture, fill: &Material, f: f64) -> Result<Complex64> {
    index.ensure_valid()?;
    if !(f.is_finite() && f > 0.0) {
        return Err(HerdError::domain(format!("frequency must be positive, got {f}")));
    }
    let kc = cutoff_wavenumber(index, ap);
    let k0 = 2.0 * PI * f * fill.refractive_index() / C0;
    let g2 = (kc - k0) * (kc + k0);
    Ok(if g2 >= 0.0 {
        Complex64::new(g2.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-g2).sqrt())
    })
}

/// All TE modes of the aperture with cutoff at or below `f_max`, ascending.
pub fn mode_chart(ap: &RectAperture, fill: &Material, f_max: f64) -> Vec<ModeEntry> {
    if !(f_max.is_finite() && f_max > 0.0) {
        return Vec::new();
    }
    let bound = |dim: f64| (2.0 * f_max * dim * fill.refractive_index() / C0).ceil() as u32 + 1;
    let (max_m, max_n) = (bound(ap.width_a), bound(ap.height_b));
    let mut out = Vec::new();
    for m in 0..=max_m {
        for n in 0..=max_n {
            let Ok(index) = ModeIndex::new(m, n) else {
                continue;
            };
            let cutoff_hz = rect_cutoff(index, ap, fill).expect("index is valid");
            if cutoff_hz <= f_max {
                out.push(ModeEntry { index, cutoff_hz });
            }
        }
    }
    out.sort_by(|a, b| a.cutoff_hz.total_cmp(&b.cutoff_hz).then(a.index.cmp(&b.index)));
    out
}

/// Onset of stopband leakage: cutoff of the dominant aperture mode.
pub fn corner_frequency(design: &FilterDesign) -> f64 {
    let index = ModeIndex::fundamental(design.dominant_mode_axis);
    rect_cutoff(index, &design.aperture, &design.aperture_fill).expect("fundamental index")
}
