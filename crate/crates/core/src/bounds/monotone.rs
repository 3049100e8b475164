use super::engine::{BoundsEngine, Needs, Rule};
use super::{one_curve, BoundCurve, BoundsConfig, Method};
use crate::dist::CondModel;
use crate::error::Result;
use crate::grid::YGrid;
use crate::transport::MonotoneMap;

/// Monotonicity bounds on `g(·, e)` over `x_grid`.
pub fn bounds_m<M: CondModel + ?Sized>(
    model: &M,
    e: f64,
    x_grid: &[f64],
    cfg: &BoundsConfig,
) -> Result<BoundCurve> {
    one_curve(model, e, x_grid, cfg, Method::M)
}

/// Upper and lower monotonicity transports `T^{MU}_{x',x}`, `T^{ML}_{x',x}`.
pub fn t_m<M: CondModel + ?Sized>(
    model: &M,
    xp: f64,
    x: f64,
    cfg: &BoundsConfig,
) -> Result<(MonotoneMap, MonotoneMap)> {
    let eng = BoundsEngine::new(model, &BoundsConfig { quad_nodes: 1, ..cfg.clone() }, Needs { tilde: true, general: false })?;
    eng.transports(xp, x, &[Rule::MonoUpper], &[Rule::MonoLower])
}

/// Which mixture of [`g_mix`] to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mix {
    /// Built from the upper transport; drives the lower bound.
    Lower,
    /// Built from the lower transport; drives the upper bound.
    Upper,
}

/// Monotonicity mixture `G^{ML}_x` or `G^{MU}_x` tabulated on the outcome grid.
pub fn g_mix<M: CondModel + ?Sized>(model: &M, x: f64, which: Mix, cfg: &BoundsConfig) -> Result<MonotoneMap> {
    let eng = BoundsEngine::new(model, cfg, Needs { tilde: true, general: false })?;
    let plan = eng.plan(x, &[Rule::MonoUpper], &[Rule::MonoLower])?;
    let grid: YGrid = eng.grid();
    Ok(MonotoneMap::from_fn(grid, |u| match which {
        Mix::Lower => eng.g_lower(&plan, u),
        Mix::Upper => eng.g_upper(&plan, u),
    }))
}
