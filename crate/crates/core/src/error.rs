use std::path::PathBuf;

use thiserror::Error;

use crate::control::Trajectory;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("convex hull of an empty point set")]
    EmptyPointSet,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("polygon vertices do not form a convex loop")]
    NotConvex,
    #[error("invalid ball radius {radius}")]
    InvalidBall { radius: f64 },
}

/// Problems found while reading or validating a scenario.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("obstacle {index}: {source}")]
    Obstacle {
        index: usize,
        #[source]
        source: GeomError,
    },
    #[error("start pose not free")]
    StartNotFree,
    #[error("goal pose not free")]
    GoalNotFree,
}

impl ScenarioError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        ScenarioError::Invalid {
            field,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("free space too small: no collision-free sample after {tries} tries")]
    FreeSpaceTooSmall { tries: usize },
}

#[derive(Debug, Error)]
pub enum ControlError {
    #[error("start pose lies in neither the forward nor the backward control domain")]
    OutsideDomain,
    #[error("no convergence within the {horizon} s horizon")]
    NotConverged {
        horizon: f64,
        partial: Box<Trajectory>,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PredictionError {
    #[error("pose is not in the requested control domain")]
    OutsideDomain,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("nearest neighbor of an empty pose set")]
    EmptySet,
    #[error("distance weights must be nonnegative and not both zero (alpha={alpha}, beta={beta})")]
    InvalidWeights { alpha: f64, beta: f64 },
    #[error("kappa must lie in (0, 1/2), got {0}")]
    InvalidKappa(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("goal pose is not a vertex of the motion graph")]
    GoalAbsent,
    #[error("vertex {0} has no path to the start")]
    Unreachable(usize),
    #[error("malformed graph dump: {0}")]
    Malformed(String),
}

#[derive(Debug, Error)]
pub enum ExecError {
    #[error("no motion graph vertex is safely reachable from the current pose")]
    Disconnected,
    #[error("motion graph has no path to the goal")]
    NoPlan,
    #[error("execution horizon of {horizon} s exceeded")]
    HorizonExceeded { horizon: f64 },
}
