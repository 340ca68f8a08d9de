use serde::Serialize;

/// Where a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    /// Reading, parsing or validating the configuration.
    Config,
    /// Reading auxiliary input files named by the configuration.
    Input,
    Compute,
    /// Writing results.
    Output,
}

impl Stage {
    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Config => 2,
            Stage::Input => 3,
            Stage::Compute => 4,
            Stage::Output => 5,
        }
    }
}

/// Machine-readable failure record, printed to stderr as one JSON line.
#[derive(Debug, Clone, PartialEq, Serialize, thiserror::Error)]
#[error("{message}")]
pub struct RunError {
    pub stage: Stage,
    pub message: String,
}

impl RunError {
    pub fn new(stage: Stage, message: impl Into<String>) -> Self {
        Self {
            stage,
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error record serializes")
    }
}

/// Tags a numerical-core error with what was being computed.
pub(crate) fn compute(context: impl std::fmt::Display) -> impl FnOnce(sfwm_core::Error) -> RunError {
    move |e| RunError::new(Stage::Compute, format!("{context}: {e}"))
}
