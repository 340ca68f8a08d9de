//! Spectral modelling of photon pairs from pulse-pumped spontaneous four-wave
//! mixing in homogeneous and spliced (multi-segment) photonic crystal fibers.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs; file formats, configuration and the command line
//! live in the companion `sfwm` crate.
//!
//! Pipeline, bottom-up:
//!
//! * [`material`] and [`dispersion`]: fused-silica index, step-index
//!   equivalent of the fiber, propagation constant `k(ω)` and its
//!   derivatives, zero-dispersion wavelengths, structure fit.
//! * [`phasematch`]: nondegenerate phase-matched signal/idler pair for a
//!   pump, linearisation `(τs, τi, θ)`, pump sweeps.
//! * [`spectra`]: pump envelope, phase-matching function of a spliced
//!   assembly, joint spectral amplitude on a grid, marginals and filter scans.
//! * [`correlation`]: unheralded `g²` of one daughter field and the Schmidt
//!   decomposition.
//! * [`planner`]: choose and order segments from a pool to maximise `g²`.

#![no_std]
#![warn(missing_debug_implementations)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod math;

pub mod bessel;
pub mod correlation;
pub mod dispersion;
pub mod error;
pub mod fit;
pub mod interp;
pub mod material;
pub mod phasematch;
pub mod planner;
pub mod reference;
pub mod roots;
pub mod spectra;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use correlation::{g2_quadrature, g2_table, schmidt_decompose, G2Configuration, G2Row, SchmidtResult};
pub use dispersion::{
    CladdingRule, DispersionCurve, DispersionModel, FiberSegment, GvdSample, ModeModel, Provenance, Structure,
};
pub use fit::{fit_structure, FitOptions, FitResult};
pub use phasematch::{
    agvm_roots, gvm_curve, solve_phase_match, AgvmRoots, Gain, GvmPoint, PhaseMatchPoint, PhaseMatchSolution, PumpSpec,
};
pub use planner::{
    evaluate_plan, plan_exhaustive, plan_greedy, Candidate, LengthConstraint, PlanEvaluation, PlannerOptions,
    SegmentPool, SplicePlan,
};
pub use spectra::{
    build_jsa, delta_k, filter_scan_assembly, filter_scan_jsa, marginal, phi_assembly, phi_homogeneous, phi_signal,
    pump_envelope, AssemblySegment, AssemblySpec, FilterScan, FilterSpec, FrequencyGrid, GridOptions, JsaGrid,
    MarginalAxis, ModelMode, Normalization, Spectrum1D, SpectrumAxis, UniformAxis,
};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
