//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong while building or evolving a spin system.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent configuration document.
    #[error("{0}")]
    Config(String),

    /// Constraint violation on an otherwise well-formed input.
    #[error("{0}")]
    Invalid(String),

    #[error("spin count {0} outside supported range 1..={max}", max = crate::operator::MAX_SPINS)]
    SpinCount(usize),

    #[error("site {site} out of range 1..={n}")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("site {0} listed more than once in product factors")]
    RepeatedSite(usize),

    #[error("m_neighbors = {m} out of range 1..={max} for a {geometry} of {n} spins")]
    NeighborsOutOfRange {
        m: usize,
        max: usize,
        geometry: &'static str,
        n: usize,
    },

    #[error("model `{found}` not accepted here (expected {expected})")]
    ModelMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("model `{model}` requires {geometry} geometry")]
    GeometryMismatch {
        model: &'static str,
        geometry: &'static str,
    },

    #[error("pair distance must be positive, got r = {0}")]
    NonPositiveDistance(f64),

    #[error("no gyromagnetic ratio given for species `{0}`")]
    MissingGamma(char),

    #[error("dimension mismatch: operator dim {op} vs state dim {state}")]
    DimensionMismatch { op: usize, state: usize },

    #[error("operator is not Hermitian (max entrywise deviation {dev:.3e})")]
    NotHermitian { dev: f64 },

    #[error("time step dt = {dt} exceeds the maximum {max} allowed for this source")]
    StepTooLarge { dt: f64, max: f64 },

    #[error("state norm deviates from 1 by {drift:.3e} (tolerance {tol:.0e})")]
    NormDrift { drift: f64, tol: f64 },

    #[error("energy expectation drifted by {drift:.3e} (tolerance {tol:.0e})")]
    EnergyDrift { drift: f64, tol: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code class: 2 for configuration/validation errors, 3 for
    /// numeric failures, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Config(_) | Invalid(_) | SpinCount(_) | SiteOutOfRange { .. } | RepeatedSite(_)
            | NeighborsOutOfRange { .. } | ModelMismatch { .. } | GeometryMismatch { .. }
            | NonPositiveDistance(_) | MissingGamma(_) | StepTooLarge { .. } => 2,
            DimensionMismatch { .. } | NotHermitian { .. } | NormDrift { .. }
            | EnergyDrift { .. } => 3,
            Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
