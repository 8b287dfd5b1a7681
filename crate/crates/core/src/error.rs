use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping of failures, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input itself is malformed or outside the supported class.
    Input,
    /// The input is well formed but the curve degenerates numerically.
    Numerical,
    /// Frenet integration drifted off the pseudo-orthonormal frame bundle.
    Drift,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("vector is null (|g(u,u)| = {value:e})")]
    NullVector { value: f64 },

    #[error("tangent is null at s = {s}")]
    NullTangent { s: f64 },

    #[error("curve is not unit speed: max ||g(a',a')| - 1| = {deviation:e} exceeds {tol:e}")]
    UnitSpeed { deviation: f64, tol: f64 },

    #[error("frame vector V_{index} is null at s = {s}")]
    NullFrameVector { index: usize, s: f64 },

    #[error("curvature k_{index} = {value:e} below floor at s = {s}")]
    DegenerateCurvature { index: usize, value: f64, s: f64 },

    #[error("Frenet closure residual {residual:e} exceeds tolerance at s = {s}")]
    FrenetClosure { residual: f64, s: f64 },

    #[error("frame is not pseudo-orthonormal: defect {defect:e} exceeds tolerance at s = {s}")]
    FrameDefect { defect: f64, s: f64 },

    #[error("frame sign pattern changes between samples at s = {s}")]
    SignFlip { s: f64 },

    #[error("insufficient jet order: need {needed}, have {available}")]
    InsufficientJetOrder { needed: usize, available: usize },

    #[error("no admissible initial frame after {0} restarts")]
    ExhaustedRetries(usize),

    #[error("frame re-orthonormalization correction {correction:e} exceeds limit at s = {s}")]
    Drift { correction: f64, s: f64 },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Dimension { .. }
            | Error::InvalidSpec(_)
            | Error::Parse(_)
            | Error::UnitSpeed { .. }
            | Error::InsufficientJetOrder { .. }
            | Error::UnsupportedDimension(_)
            | Error::Json(_) => ErrorClass::Input,
            Error::Drift { .. } => ErrorClass::Drift,
            Error::Eval(_)
            | Error::NullVector { .. }
            | Error::NullTangent { .. }
            | Error::NullFrameVector { .. }
            | Error::DegenerateCurvature { .. }
            | Error::FrenetClosure { .. }
            | Error::FrameDefect { .. }
            | Error::SignFlip { .. }
            | Error::ExhaustedRetries(_) => ErrorClass::Numerical,
        }
    }

    /// Stable machine-readable name, as written into JSON error objects.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "DimensionError",
            Error::InvalidSpec(_) => "InvalidSpecError",
            Error::Parse(_) => "ParseError",
            Error::Eval(_) => "EvalError",
            Error::NullVector { .. } => "NullVectorError",
            Error::NullTangent { .. } => "NullTangentError",
            Error::UnitSpeed { .. } => "UnitSpeedError",
            Error::NullFrameVector { .. } => "NullFrameVectorError",
            Error::DegenerateCurvature { .. } => "DegenerateCurvatureError",
            Error::FrenetClosure { .. } => "FrenetClosureError",
            Error::FrameDefect { .. } => "FrameDefectError",
            Error::SignFlip { .. } => "SignFlipError",
            Error::InsufficientJetOrder { .. } => "InsufficientJetOrderError",
            Error::ExhaustedRetries(_) => "ExhaustedRetriesError",
            Error::Drift { .. } => "DriftError",
            Error::UnsupportedDimension(_) => "UnsupportedDimensionError",
            Error::Json(_) => "ParseError",
        }
    }
}
