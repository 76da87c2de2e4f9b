//! Oracles and certificate checks.
//!
//! [`riemann`] holds exact LWR solutions, [`bounds`] the closed-form
//! stability estimates, [`entropy`] a discrete entropy-inequality check and
//! [`certificates`] the per-run report set. [`random`] generates seeded
//! problems for batch checks.

pub mod bounds;
pub mod certificates;
pub mod entropy;
pub mod random;
pub mod riemann;

pub use bounds::{data_stability_bound, data_stability_bound_for, flux_stability_bound, StabilityBound};
pub use certificates::{
    certify_batch, data_stability_certificate, flux_stability_certificate, random_problems, run_certificates,
    run_certificates_with, Allowances,
    CertificateReport,
};
pub use entropy::{check_entropy_inequality, BumpTest, EntropyConfig, EntropyResidual};
pub use riemann::{exact_riemann_lwr, glue_riemann, riemann_at, GluedRiemann, RiemannSolution, WaveKind};
