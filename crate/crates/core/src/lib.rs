//! Exit probabilities of symmetric α-stable Lévy flights from bounded
//! domains.
//!
//! The stable process is replaced by a Brownian motion (small jumps) plus a
//! compound Poisson process (jumps of size at least ε). The resulting
//! terminal-value problem is solved backward in time with Gauss–Hermite and
//! trapezoid quadrature on a PCHIP-interpolated mesh. Forward Monte Carlo
//! estimators of both processes serve as references.

pub mod approx;
pub mod error;
pub mod forward;
pub mod interp;
pub mod output;
pub mod problem;
pub mod quadrature;
pub mod rng;
pub mod solver;
pub mod special;
pub mod stable;
pub mod stats;

pub use approx::{build_approx, jump_cdf, poisson_weights, sample_jump, ApproxParams, JumpLaw};
pub use error::{Error, Result};
pub use forward::{
    dmc_exit, empirical_logpdf, log_histogram, simulate_exit, simulate_msd, terminal_samples, Bins, ExitRecord, ProcessKind,
    SimConfig,
};
pub use interp::{pchip_build, pchip_eval, BoundaryMode, Grid1D, InterpOrder, Interpolant};
pub use problem::{velocity, Boundary, Drift, Noise, ProblemSpec};
pub use quadrature::{brownian_expectation, hermite_rule, jump_rule_for_point, HermiteRule, JumpRule};
pub use rng::{stream_id, stream_rng, StreamRng};
pub use solver::{build_mesh, solve, BackwardScheme, DriftStep, Mesh, ProbField, Solution, SolverConfig};
pub use stats::{ks_two_sample, loglog_slope};
pub use stable::{char_fn, levy_constant, sample_sas, LevyMeasure1D, StableParams, SymmetricStable};
