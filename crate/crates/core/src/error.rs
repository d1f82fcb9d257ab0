use std::fmt;

/// Named structural invariant of a [`crate::graph::TorusGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    TwinInvolution,
    TwinDisplacement,
    Rotation,
    DeclaredDegree,
    ThreeRegular,
    Triangulation,
    EulerCharacteristic,
    FaceClosure,
    Connectivity,
    PeriodLattice,
    Positions,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Invariant::TwinInvolution => "twin involution",
            Invariant::TwinDisplacement => "twin displacement negation",
            Invariant::Rotation => "rotation system",
            Invariant::DeclaredDegree => "declared degree",
            Invariant::ThreeRegular => "3-regularity",
            Invariant::Triangulation => "triangular faces",
            Invariant::EulerCharacteristic => "Euler characteristic V-E+F=0",
            Invariant::FaceClosure => "face displacement closure",
            Invariant::Connectivity => "connectivity",
            Invariant::PeriodLattice => "period lattice equals Z^2",
            Invariant::Positions => "vertex positions",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invariant violated ({invariant}): {detail}")]
    Invariant { invariant: Invariant, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: u64, residual: f64 },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("insufficient trials: {0}")]
    InsufficientTrials(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("graph file: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invariant(invariant: Invariant, detail: impl Into<String>) -> Self {
        Error::Invariant { invariant, detail: detail.into() }
    }

    pub(crate) fn input(detail: impl Into<String>) -> Self {
        Error::InvalidInput(detail.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
