use thiserror::Error;

use crate::graph::EdgeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("flow is not conserved at nodes {nodes:?}")]
    NotConserved { nodes: Vec<String> },

    #[error("more than {cap} s-t paths")]
    PathExplosion { cap: usize },

    #[error("problem is infeasible")]
    Infeasible,

    #[error("no strictly robust solution: empty bound intersection on edges {edges:?}")]
    StrictInfeasible { edges: Vec<EdgeId> },

    #[error("exact variant requires lower == upper on every edge")]
    BadVariant,

    #[error("malformed assignment: {0}")]
    MalformedAssignment(String),

    #[error("time limit reached")]
    TimeLimit,

    #[error("scenario {index} is infeasible")]
    InfeasibleAt { index: usize },

    #[error("graph has {available} distinct s-t paths, {required} required")]
    TooFewPaths { available: usize, required: usize },

    #[error("scenario generation stalled after {attempts} rejected candidates")]
    RejectionLimit { attempts: usize },

    #[error("sizes sum to {sum}, expected b*B = {expected}")]
    BadSizes { sum: u64, expected: u64 },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("backend error: {0}")]
    Backend(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable snake-case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGraph(_) => "invalid_graph",
            Error::InvalidInstance(_) => "invalid_instance",
            Error::NotConserved { .. } => "not_conserved",
            Error::PathExplosion { .. } => "path_explosion",
            Error::Infeasible => "infeasible",
            Error::StrictInfeasible { .. } => "strict_infeasible",
            Error::BadVariant => "bad_variant",
            Error::MalformedAssignment(_) => "malformed_assignment",
            Error::TimeLimit => "time_limit",
            Error::InfeasibleAt { .. } => "infeasible_at",
            Error::TooFewPaths { .. } => "too_few_paths",
            Error::RejectionLimit { .. } => "rejection_limit",
            Error::BadSizes { .. } => "bad_sizes",
            Error::InvalidNetwork(_) => "invalid_network",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Parse(_) => "parse",
            Error::Backend(_) => "backend",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code: 2 bad input, 3 infeasible, 4 time limit, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible | Error::InfeasibleAt { .. } | Error::StrictInfeasible { .. } => 3,
            Error::TimeLimit => 4,
            Error::InvalidGraph(_)
            | Error::InvalidInstance(_)
            | Error::NotConserved { .. }
            | Error::BadVariant
            | Error::BadSizes { .. }
            | Error::InvalidConfig(_)
            | Error::Parse(_)
            | Error::Io(_) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
