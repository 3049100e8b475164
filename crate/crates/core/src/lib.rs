//! Partial-identification bounds for nonseparable triangular models
//! `Y = g(X, ε)`, `X = h(Z, η)` with a binary instrument `Z`.
//!
//! The crate is organised bottom-up:
//!
//! * [`dist`]: conditional distribution providers ([`dist::CondModel`]),
//!   including the fitted empirical model and assumption diagnostics.
//! * [`transport`]: the quantile transport `π`, its orbits, the outcome
//!   transports built from conditional CDF/quantile pairs, and the
//!   [`transport::MonotoneMap`] algebra everything else is written in.
//! * [`pisets`]: the finite index-pair sets used to combine transports.
//! * [`bounds`]: bound curves under monotonicity, concavity, both, and the
//!   weakly-monotone (discrete / censored outcome) extension.
//! * [`sim`]: closed-form data generating processes with samplers, and an
//!   independent brute-force bound oracle.
//!
//! Bound computations fan out over x-grid points; with the default
//! `parallel` feature that fan-out runs on rayon, otherwise sequentially.

pub mod bounds;
pub mod dist;
pub mod error;
pub mod exec;
pub mod grid;
pub mod normal;
pub mod pisets;
pub mod sim;
pub mod transport;

pub use bounds::{
    bounds_c, bounds_g, bounds_m, bounds_mc, detect_point_id, BoundCurve, BoundsConfig, Method,
};
pub use dist::{
    fit_empirical, validate_assumptions, Arm, AssumptionReport, CondModel, Dataset, FitConfig,
    Side, SupportInterval,
};
pub use error::{Error, Result};
pub use exec::ExecPolicy;
pub use grid::YGrid;
pub use pisets::{pi_set, t_weight, PiSet, PiSetKind};
pub use sim::{make_analytic, oracle_bounds, sample, true_g, AnalyticModel, DgpSpec, Family};
pub use transport::{orbit, pi, t_hat_check, t_tilde, Direction, MonotoneMap, PiOrbit};

/// Version tag written as the first line of every CSV this crate emits.
pub const SCHEMA_TAG: &str = "# bound-id v1";
