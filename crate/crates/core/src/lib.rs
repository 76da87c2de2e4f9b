//! Solver and verification toolkit for scalar conservation laws
//! `∂ₜu + ∂ₓ(v(t) g(u)) = 0` on a segment or a truncated half line, with
//! possibly discontinuous speed factor `v`.
//!
//! * [`flux`]: speed profiles, flux factors, the time rescaling `Γ`.
//! * [`ibvp`]: problem data, hulls, total variation functionals.
//! * [`solver`]: Lax–Friedrichs with Godunov boundary fluxes.
//! * [`verify`]: exact Riemann oracles and certificate checks.
//! * [`traffic`]: the traffic-light speed-limit experiment.

pub mod error;
pub mod exec;
pub mod flux;
pub mod ibvp;
pub mod solver;
pub mod step;
pub mod traffic;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use flux::{FluxModel, LinearFlux, LwrFlux, SharedFlux, SpeedProfile};
pub use ibvp::{DomainKind, HullInterval, IbvpProblem, TvFunctionalValue};
pub use solver::{solve, solve_via_gamma, GridSpec, SolutionField, SolverConfig};
pub use step::StepFn;
