//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Coil geometry that cannot describe a physical spiral.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation point coincides with (or is too close to) a conductor.
    #[error("singularity: {0}")]
    Singularity(String),

    /// Coupling coefficient at or above 1; the (M, L1, L2) triple is unphysical.
    #[error("unphysical coupling: k = {k} >= 1")]
    UnphysicalCoupling { k: f64 },

    /// Circuit system matrix is exactly singular.
    #[error("numerically singular circuit system at f = {frequency} Hz")]
    SingularSystem { frequency: f64 },

    /// Input impedance is undefined because no current flows.
    #[error("undefined impedance: source current is zero")]
    UndefinedImpedance,

    /// Inverse design could not reach the target within tolerance.
    #[error("unreachable target inductance: closest achievable {closest:.4e} H at {turns} turns")]
    UnreachableTarget { closest: f64, turns: u32 },

    /// Fit or inversion precondition not met.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Config file failed validation; every offending key is listed.
    #[error("invalid config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    /// Config file is not parseable at all.
    #[error("config parse error: {0}")]
    ConfigParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
