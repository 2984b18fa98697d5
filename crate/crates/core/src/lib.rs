//! Models for leaky-coaxial low-pass filters with ultra-wide stopbands.
//!
//! A coaxial line whose outer conductor carries rings of rectangular
//! hollow-waveguide apertures passes signals below the aperture cutoff and
//! drains power above it. This crate provides:
//!
//! * [`modes`]: coax impedance and single-mode limit, aperture mode cutoffs;
//! * [`leakage`]: in-band evanescent loss and aperture depth budgeting;
//! * [`cascade`]: full-band S-parameters from chained section two-ports;
//! * [`synthesis`]: targets to geometry, and margin verification;
//! * [`tsio`]: Touchstone v1 I/O, band metrics and compliance claims;
//! * [`kvfile`]: the `key = value` design and spec files.
//!
//! Grid evaluations run on rayon when the `parallel` feature is enabled.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cascade;
pub mod error;
pub mod exec;
pub mod kvfile;
pub mod leakage;
pub mod model;
pub mod modes;
pub mod synthesis;
pub mod tsio;

pub use cascade::{
    attenuation_vs_sections, calibrate_kappa, cascade, filter_response, filter_response_with, section_two_port,
    CascadeOptions, Provenance, SParamTable, TwoPort,
};
pub use error::{HerdError, Result};
pub use exec::Execution;
pub use leakage::{
    evanescent_amplitude, inband_loss_curve, inband_transmission, min_depth_for_budget, mismatch_loss_db,
    InbandLossBreakdown,
};
pub use model::{
    prototype_design, validate, CoaxGeometry, FilterDesign, FrequencyGrid, Material, ModeAxis, RectAperture,
    Violation,
};
pub use modes::{
    coax_char_impedance, coax_first_higher_mode_cutoff, coax_ratio_for_impedance, corner_frequency, mode_chart,
    rect_cutoff, rect_gamma, solve_inner_radius, ModeEntry, ModeIndex,
};
pub use synthesis::{pair_breaking_frequency, synthesize, verify, DesignSpec, SynthesisReport};
pub use tsio::{
    band_metrics, check_claims, parse_touchstone, write_touchstone, Band, BandMetric, Claim, ClaimKind,
    ComplianceReport, DataFormat, FrequencyUnit, DB_FLOOR,
};
