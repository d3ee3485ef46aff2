use thiserror::Error;

/// Failure modes shared by every module of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A formula hit one of its coordinate singularities (a vanishing
    /// denominator such as `sin(theta)`, `Sin_k(r)`, `Cos_k(r)` or a
    /// κ-Cartesian coordinate).
    #[error("domain singularity: {0}")]
    DomainSingularity(String),

    /// Off-diagonal Fradkin entries requested for a system with nonlinear terms.
    #[error("unsupported entry: {0}")]
    UnsupportedEntry(String),

    /// A construction needing `sqrt(2 k_i)` was asked for with `k_i < 0`.
    #[error("negative coupling k{index} = {value} where k{index} >= 0 is required")]
    NegativeCoupling { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("implicit stage did not converge after {iterations} iterations (last update {last_update:e})")]
    NonConvergence { iterations: usize, last_update: f64 },

    #[error("orbit left the bounded region at t = {t} (r = {r})")]
    Unbounded { t: f64, r: f64 },

    #[error("no return to the initial state before t_max = {t_max}")]
    NoReturn { t_max: f64 },

    #[error("unknown name: {0}")]
    UnknownName(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn singular(what: impl Into<String>) -> Error {
    Error::DomainSingularity(what.into())
}
