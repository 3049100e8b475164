use super::engine::{BoundsEngine, Needs, Rule};
use super::{one_curve, BoundCurve, BoundsConfig, Method};
use crate::dist::CondModel;
use crate::error::Result;
use crate::transport::MonotoneMap;

/// Concavity bounds on `g(·, e)` over `x_grid`.
pub fn bounds_c<M: CondModel + ?Sized>(
    model: &M,
    e: f64,
    x_grid: &[f64],
    cfg: &BoundsConfig,
) -> Result<BoundCurve> {
    one_curve(model, e, x_grid, cfg, Method::C)
}

/// Bounds under monotonicity and concavity jointly.
pub fn bounds_mc<M: CondModel + ?Sized>(
    model: &M,
    e: f64,
    x_grid: &[f64],
    cfg: &BoundsConfig,
) -> Result<BoundCurve> {
    one_curve(model, e, x_grid, cfg, Method::MC)
}

/// Upper and lower concavity transports `T^{CU}_{x',x}`, `T^{CL}_{x',x}`.
pub fn t_c<M: CondModel + ?Sized>(
    model: &M,
    xp: f64,
    x: f64,
    cfg: &BoundsConfig,
) -> Result<(MonotoneMap, MonotoneMap)> {
    let eng = BoundsEngine::new(model, &BoundsConfig { quad_nodes: 1, ..cfg.clone() }, Needs { tilde: true, general: false })?;
    eng.transports(xp, x, &[Rule::ConcUpper], &[Rule::ConcLower])
}
