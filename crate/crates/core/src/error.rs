use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A query point lies outside the interval on which the object is defined.
    #[error("{what}: {value} outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Construction data violate a structural invariant.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// Proposed time step exceeds the CFL limit.
    #[error("time step {dt} exceeds CFL limit {limit}")]
    StepSize { dt: f64, limit: f64 },

    /// Requested boundary flow exceeds road capacity.
    #[error("inflow {flow} cars/s exceeds capacity {capacity} cars/s")]
    Infeasible { flow: f64, capacity: f64 },

    /// Solver produced a non-finite state or failed a conservation check.
    #[error("numerical failure at t = {t}: {reason}")]
    Numerical { t: f64, reason: String },

    /// An exact oracle was queried outside its validity window.
    #[error("oracle invalid: {0}")]
    OracleInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Error {
    Error::Invalid {
        what,
        reason: reason.into(),
    }
}
