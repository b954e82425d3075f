use thiserror::Error;

use crate::state::StateReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid subsystem label {0:?} (expected A or B)")]
    InvalidSubsystem(String),

    #[error("non-physical state: eigenvalue {min_eigenvalue:e} below clamping window")]
    NonPhysicalState { min_eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(StateReport),

    #[error("amplitudes not normalized: |psi| = {norm}")]
    NotNormalized { norm: f64 },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid emitter geometry: {0}")]
    InvalidGeometry(String),

    #[error("singular separation z = {z:e}")]
    SingularSeparation { z: f64 },

    #[error(
        "separation r12/lambda0 = {r12_over_lambda0} outside small-separation window (< {limit})"
    )]
    OutsideApplicability { r12_over_lambda0: f64, limit: f64 },

    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    #[error("closed-form evolution unavailable: {0}")]
    AnalyticUnavailable(&'static str),

    #[error("coefficients ({h1}, {h2}, {h3}) do not give a positive Bell-diagonal state (min eigenvalue {min_eigenvalue:e})")]
    InvalidBellDiagonal {
        h1: f64,
        h2: f64,
        h3: f64,
        min_eigenvalue: f64,
    },

    #[error("measurement outcome has probability {probability:e}; conditional state undefined")]
    ConditionalUndefined { probability: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("matrix is not X-structured (defect {defect:e})")]
    NotXState { defect: f64 },

    #[error("integrator failure at t = {t}: {reason}")]
    Integrator { t: f64, reason: String },

    #[error("propagation diverged at sample {index} (t = {t}): {report}")]
    PropagationDiverged {
        index: usize,
        t: f64,
        report: StateReport,
    },

    #[error("scenario: {0}")]
    Scenario(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonPhysicalState { .. }
                | Error::NumericalFailure(_)
                | Error::Integrator { .. }
                | Error::PropagationDiverged { .. }
        )
    }
}
