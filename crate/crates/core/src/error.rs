use thiserror::Error;

/// Which contour of a bivariate Mellin-Barnes integral an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    S,
    T,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::S => f.write_str("s"),
            Axis::T => f.write_str("t"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {re}{im:+}i is within {distance:.3e} of a pole of the gamma function")]
    PoleProximity { re: f64, im: f64, distance: f64 },

    #[error("invalid Meijer G specification: {0}")]
    InvalidSpec(String),

    #[error("Mellin-Barnes integral does not converge (delta = {delta}){}", axis_suffix(*.axis))]
    NonConvergent { delta: f64, axis: Option<Axis> },

    #[error("no vertical contour separates the pole sets (left {left}, right {right}){}", axis_suffix(*.axis))]
    ContourBlocked {
        left: f64,
        right: f64,
        axis: Option<Axis>,
    },

    #[error("contour abscissa {abscissa} is outside the legal strip ({left}, {right})")]
    InvalidContour {
        abscissa: f64,
        left: f64,
        right: f64,
    },

    #[error("accuracy not reached: estimate {estimate:e}, residual {residual:e} after {panels} panels{}", axis_suffix(*.axis))]
    AccuracyNotReached {
        estimate: f64,
        residual: f64,
        panels: usize,
        axis: Option<Axis>,
    },

    #[error("pointing-error jitter is zero; psi is infinite")]
    DegenerateJitter,

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    QuadratureFailed { estimate: f64, error: f64 },

    #[error("insufficient samples: {requested} requested, at least {minimum} needed for a reported interval")]
    InsufficientSamples { requested: u64, minimum: u64 },
}

fn axis_suffix(axis: Option<Axis>) -> String {
    match axis {
        Some(a) => format!(" on the {a} axis"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Short machine-friendly name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::PoleProximity { .. } => "PoleProximity",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::ContourBlocked { .. } => "ContourBlocked",
            Error::InvalidContour { .. } => "InvalidContour",
            Error::AccuracyNotReached { .. } => "AccuracyNotReached",
            Error::DegenerateJitter => "DegenerateJitter",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::QuadratureFailed { .. } => "QuadratureFailed",
            Error::InsufficientSamples { .. } => "InsufficientSamples",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
