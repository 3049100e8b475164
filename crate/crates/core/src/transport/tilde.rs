use super::map::MonotoneMap;
use super::orbit::{orbit, PiOrbit};
use crate::dist::{Arm, CondModel, OutcomeLaw, Side};
use crate::error::{Error, Result};
use crate::grid::YGrid;

/// Which CDF/quantile sides a one-step outcome transport uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// `Q⁻ ∘ F⁺`, the continuous-outcome transport.
    Tilde,
    /// `Q⁻ ∘ F⁻`.
    Hat,
    /// `Q⁺ ∘ F⁺`.
    Check,
}

impl StepKind {
    fn sides(self) -> (Side, Side) {
        match self {
            StepKind::Tilde => (Side::Right, Side::Right),
            StepKind::Hat => (Side::Left, Side::Right),
            StepKind::Check => (Side::Right, Side::Left),
        }
    }
}

/// All n-step outcome transports along one orbit, tabulated on a grid.
#[derive(Debug, Clone)]
pub struct TransportFamily {
    pub orbit: PiOrbit,
    maps: Vec<MonotoneMap>,
}

impl TransportFamily {
    pub fn get(&self, n: i32) -> Option<&MonotoneMap> {
        let k = n - self.orbit.min_n;
        (k >= 0).then(|| self.maps.get(k as usize)).flatten()
    }

    /// Map for index `n`, which must lie in the orbit.
    pub(crate) fn at(&self, n: i32) -> &MonotoneMap {
        &self.maps[(n - self.orbit.min_n) as usize]
    }
}

/// Build every n-step transport of `kind` along a precomputed orbit.
///
/// Step `k → k + 1` pushes the tabulated values of the k-step map through
/// the exact one-step map at `π^k(x)`, so each composite is resampled on the
/// grid once per step.
pub fn transport_family<M: CondModel + ?Sized>(
    model: &M,
    orbit: &PiOrbit,
    kind: StepKind,
    grid: YGrid,
) -> TransportFamily {
    let (fs, qs) = kind.sides();
    let zero = (-orbit.min_n) as usize;
    let len = orbit.len();
    let mut maps: Vec<Option<MonotoneMap>> = vec![None; len];
    let id = MonotoneMap::identity(grid);
    maps[zero] = Some(id.clone());

    // Forward: F at (π^k x, z=0), Q at (π^{k+1} x, z=1).
    let mut cur = id.clone();
    for k in zero..len - 1 {
        let from = model.law(orbit.values[k], Arm::Z0);
        let to = model.law(orbit.values[k + 1], Arm::Z1);
        cur = MonotoneMap::from_values(
            grid,
            cur.values().iter().map(|&y| to.quantile(from.cdf(y, fs), qs)).collect(),
        );
        maps[k + 1] = Some(cur.clone());
    }
    // Backward: F at (π^k x, z=1), Q at (π^{k-1} x, z=0).
    let mut cur = id;
    for k in (1..=zero).rev() {
        let from = model.law(orbit.values[k], Arm::Z1);
        let to = model.law(orbit.values[k - 1], Arm::Z0);
        cur = MonotoneMap::from_values(
            grid,
            cur.values().iter().map(|&y| to.quantile(from.cdf(y, fs), qs)).collect(),
        );
        maps[k - 1] = Some(cur.clone());
    }
    TransportFamily { orbit: orbit.clone(), maps: maps.into_iter().map(Option::unwrap).collect() }
}

fn checked_orbit<M: CondModel + ?Sized>(model: &M, x: f64, n: i32) -> Result<PiOrbit> {
    let o = orbit(model, x)?;
    if !o.contains(n) {
        return Err(Error::OrbitRange { x, n });
    }
    Ok(o)
}

/// The n-step continuous-outcome transport anchored at `x`.
pub fn t_tilde<M: CondModel + ?Sized>(model: &M, x: f64, n: i32, grid: YGrid) -> Result<MonotoneMap> {
    let o = checked_orbit(model, x, n)?;
    Ok(transport_family(model, &o, StepKind::Tilde, grid).at(n).clone())
}

/// The n-step `(Q⁻∘F⁻, Q⁺∘F⁺)` transports anchored at `x`.
pub fn t_hat_check<M: CondModel + ?Sized>(
    model: &M,
    x: f64,
    n: i32,
    grid: YGrid,
) -> Result<(MonotoneMap, MonotoneMap)> {
    let o = checked_orbit(model, x, n)?;
    let hat = transport_family(model, &o, StepKind::Hat, grid).at(n).clone();
    let check = transport_family(model, &o, StepKind::Check, grid).at(n).clone();
    Ok((hat, check))
}
