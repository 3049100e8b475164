use super::engine::{BoundsEngine, Needs, Rule};
use super::{one_curve, BoundCurve, BoundsConfig, Method};
use crate::dist::CondModel;
use crate::error::Result;
use crate::transport::MonotoneMap;

/// Bounds for weakly monotone `g`, valid with discrete or censored outcomes.
///
/// The lower bound mixes `F⁺` over the upper transport and the upper bound
/// mixes `F⁻` over the lower transport.
pub fn bounds_g<M: CondModel + ?Sized>(
    model: &M,
    e: f64,
    x_grid: &[f64],
    cfg: &BoundsConfig,
) -> Result<BoundCurve> {
    one_curve(model, e, x_grid, cfg, Method::G)
}

/// Upper and lower weakly-monotone transports `T^{GU}_{x',x}`, `T^{GL}_{x',x}`.
pub fn t_g<M: CondModel + ?Sized>(
    model: &M,
    xp: f64,
    x: f64,
    cfg: &BoundsConfig,
) -> Result<(MonotoneMap, MonotoneMap)> {
    let eng = BoundsEngine::new(model, &BoundsConfig { quad_nodes: 1, ..cfg.clone() }, Needs { tilde: false, general: true })?;
    eng.transports(xp, x, &[Rule::GenUpper], &[Rule::GenLower])
}
