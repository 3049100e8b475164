//! Closed-form DGPs with exact samplers, plus an independent brute-force
//! oracle for the bound pipeline.

mod analytic;
mod dgp;
mod oracle;
mod sample;

pub use analytic::{make_analytic, AnalyticLaw, AnalyticModel};
pub use dgp::{true_g, DgpConfig, DgpSpec, Family};
pub use oracle::{oracle_bounds, Oracle};
pub use sample::sample;
