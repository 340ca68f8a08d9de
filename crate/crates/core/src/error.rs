use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{quantity} = {value} outside the valid window [{min}, {max}]")]
    Domain {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("mode cutoff: no guided fundamental mode at {wavelength_nm} nm")]
    ModeCutoff { wavelength_nm: f64 },

    #[error("{what} did not converge (residual {residual:e})")]
    NoConvergence { what: &'static str, residual: f64 },

    #[error("no phase matching: no nondegenerate root for pump at {pump_nm} nm")]
    NoPhaseMatch { pump_nm: f64 },

    #[error("grid too coarse to resolve the phase-matching oscillations; need at least {required_ns} x {required_ni} points")]
    GridTooCoarse { required_ns: usize, required_ni: usize },

    #[error("joint spectral amplitude is identically zero; correlation undefined")]
    ZeroAmplitude,

    #[error(
        "structure fit did not converge; best so far r = {core_radius_nm} nm, f = {air_fill}, residual {residual:e}"
    )]
    FitFailed {
        core_radius_nm: f64,
        air_fill: f64,
        residual: f64,
    },

    #[error("{count} feasible ordered subsets exceed the cap of {cap}; use the greedy planner")]
    CombinatorialCap { count: usize, cap: usize },

    #[error("no feasible plan: {reason}")]
    Infeasible { reason: String },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
