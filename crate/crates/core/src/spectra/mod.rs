//! Joint spectral amplitude of the photon pair and its projections.
//!
//! `f(ω_s, ω_i) = α(ω_s, ω_i)·φ(ω_s, ω_i)`: a Gaussian pump envelope times the
//! phase-matching function of the spliced assembly. For a homogeneous piece
//! `φ = L sinc(ΔkL/2) exp(iΔkL/2)`; for an assembly the pieces add
//! coherently, each carrying the phase accumulated in the segments before it.

mod assembly;
mod grid;
mod jsa;
mod spectrum;

pub use assembly::{delta_k, phi_assembly, phi_homogeneous, phi_signal, AssemblySegment, AssemblySpec, ModelMode};
pub use grid::{auto_grid, check_resolution, phase_steps, FrequencyGrid, GridOptions, UniformAxis, MAX_PHASE_STEP};
pub use jsa::{build_jsa, pump_envelope, JsaGrid};
pub use spectrum::{
    filter_scan_assembly, filter_scan_jsa, marginal, FilterScan, FilterSpec, MarginalAxis, Normalization, Spectrum1D,
    SpectrumAxis,
};
