//! How much does the prior matter?
//!
//! Two analysts observe the same data but start from different priors. Each
//! ends up with a posterior; the gap between those posteriors, measured in
//! Wasserstein-1 distance, is a concrete, interpretable answer to "how much
//! did the choice of prior matter here?". Computing that distance exactly is
//! usually hopeless, but when one prior is absolutely continuous with respect
//! to the other (densities `p2 = c * rho * p1` for a ratio function `rho`),
//! the distance is sandwiched by two expectations under the *first* posterior:
//!
//! ```text
//!   |E[tau1(T) rho'(T)]|            E[tau1(T) |rho'(T)|]
//!   --------------------  <=  d_W  <=  -------------------
//!        E[rho(T)]                        E[rho(T)]
//! ```
//!
//! where `tau1` is the Stein kernel of the first posterior. The lower bound
//! always equals the difference of posterior means, and when `rho` is monotone
//! the two sides collapse and the distance is known *exactly*. This crate
//! implements that machinery end to end:
//!
//! | module        | contents                                                        |
//! |---------------|-----------------------------------------------------------------|
//! | [`numerics`]  | log-gamma, incomplete gamma/beta, adaptive quadrature, sup-norms |
//! | [`dist`]      | Gamma / inverse-gamma / Beta posteriors with Stein kernels       |
//! | [`engine`]    | the generic bound engine over a nested density pair              |
//! | [`models`]    | three worked conjugate models with closed-form bounds            |
//! | [`wasserstein`] | brute-force W1 oracle (CDF integral and quantile integral)     |
//! | [`sweep`]     | seeded data generation, n-sweeps, CSV emission, decay-slope fits |
//!
//! The `priorgap` binary exposes `bounds`, `verify`, and `sweep` subcommands
//! over the same machinery.
//!
//! With the default `parallel` feature, sweeps fan out over rayon; disabling
//! it swaps in a sequential fallback with identical output (row seeds are
//! derived from the plan, never from execution order).

use thiserror::Error;

pub mod dist;
pub mod engine;
pub mod models;
pub mod numerics;
pub mod sweep;
pub mod wasserstein;

pub use dist::Distribution;
pub use engine::{BoundsResult, ConditionReport, NestedPair};
pub use models::ModelCase;
pub use numerics::{Interval, QuadratureSettings};
pub use sweep::{SweepPlan, SweepRow};
pub use wasserstein::{w1_crosscheck, w1_distance, OracleSettings};

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Adaptive quadrature exhausted its refinement budget. Carries the last
    /// estimate and the remaining error bound so callers can triage.
    #[error("quadrature did not converge: estimate {estimate:.9e}, error bound {error:.3e}")]
    Convergence { estimate: f64, error: f64 },
    /// A model case violated its constraints (bad prior parameters, degenerate
    /// data, unsupported sample size).
    #[error("invalid model case: {0}")]
    Model(String),
    /// The two independent Wasserstein oracle methods disagreed beyond
    /// tolerance; neither value should be trusted.
    #[error(
        "oracle methods disagree: cdf-integral {cdf_value:.12e} vs quantile-integral {quantile_value:.12e}"
    )]
    OracleMismatch { cdf_value: f64, quantile_value: f64 },
    /// A sweep row failed the hard lower <= oracle <= upper assertion.
    #[error(
        "sandwich violated for {model} at n={n} replicate {replicate}: \
         lower {lower:.9e}, oracle {oracle:.9e}, upper {upper:.9e}"
    )]
    Sandwich {
        model: &'static str,
        n: u64,
        replicate: u32,
        lower: f64,
        oracle: f64,
        upper: f64,
    },
    /// A decay-slope fit was requested on unusable data (non-positive values,
    /// too few distinct sample sizes).
    #[error("slope fit failed: {0}")]
    Fit(String),
    /// Reading or writing an output file failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
