use std::fmt;

use thiserror::Error;

/// Stage of the composite law, used to tag failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Angle of attack / sideslip command (inverts `g0`).
    AlphaBeta,
    /// Body-rate command (inverts `g1`).
    BodyRate,
    /// Fin command (inverts `g2`).
    Fin,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::AlphaBeta => "alpha/beta command",
            Stage::BodyRate => "body-rate command",
            Stage::Fin => "fin command",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("{matrix} is singular or ill-conditioned (condition number {condition:.3e})")]
    Singular {
        matrix: &'static str,
        condition: f64,
    },

    #[error("range r = {r} m is outside the admissible domain")]
    Range { r: f64 },

    #[error("{name} = {value} rad breached the guard band of {limit} rad")]
    AngleGuard {
        name: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("{stage} failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<ModelError>,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

impl ModelError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn at_stage(self, stage: Stage) -> Self {
        ModelError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
