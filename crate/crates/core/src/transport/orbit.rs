use crate::dist::{Arm, CondModel};
use crate::error::{Error, Result};
use serde::Serialize;

/// Maximum number of steps taken in either direction from the anchor.
pub const ORBIT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `π(x) = Q_{X|Z}(F_{X|Z}(x|0) | 1)`, defined on the `z = 0` support.
    Forward,
    /// `π⁻¹(x) = Q_{X|Z}(F_{X|Z}(x|1) | 0)`, defined on the `z = 1` support.
    Backward,
}

impl Direction {
    fn source(self) -> Arm {
        match self {
            Direction::Forward => Arm::Z0,
            Direction::Backward => Arm::Z1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

/// One step of the quantile transport between the arms.
pub fn pi<M: CondModel + ?Sized>(model: &M, x: f64, dir: Direction) -> Result<f64> {
    let from = dir.source();
    if !model.x_support(from).contains(x) {
        return Err(Error::DomainError { x, direction: dir.name() });
    }
    Ok(model.quantile_x(model.cdf_x(x, from), from.other()))
}

/// The finite orbit `{π^n(x)}` of an anchor, indexed by consecutive `n`.
///
/// Iterates are strictly decreasing in `n` when `z = 0` dominates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiOrbit {
    pub anchor: f64,
    /// Smallest index present; `values[k]` is `π^{min_n + k}(anchor)`.
    pub min_n: i32,
    pub values: Vec<f64>,
}

impl PiOrbit {
    pub fn max_n(&self) -> i32 {
        self.min_n + self.values.len() as i32 - 1
    }

    pub fn get(&self, n: i32) -> Option<f64> {
        let k = n - self.min_n;
        (k >= 0).then(|| self.values.get(k as usize).copied()).flatten()
    }

    pub fn contains(&self, n: i32) -> bool {
        n >= self.min_n && n <= self.max_n()
    }

    /// `(n, π^n(x))` pairs in increasing `n`.
    pub fn entries(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.values.iter().enumerate().map(move |(k, &v)| (self.min_n + k as i32, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Compute the orbit of `x`: forward while the iterate is in the `z = 0`
/// support, backward while it is in the `z = 1` support.
pub fn orbit<M: CondModel + ?Sized>(model: &M, x: f64) -> Result<PiOrbit> {
    let s0 = model.x_support(Arm::Z0);
    let s1 = model.x_support(Arm::Z1);
    if !(s0.contains(x) || s1.contains(x)) {
        return Err(Error::DomainError { x, direction: "orbit" });
    }
    let walk = |dir: Direction, support: &crate::dist::SupportInterval| -> Result<Vec<f64>> {
        let mut out = Vec::new();
        let mut cur = x;
        while support.contains(cur) {
            if out.len() >= ORBIT_CAP {
                return Err(Error::NonTermination { x, cap: ORBIT_CAP });
            }
            cur = pi(model, cur, dir)?;
            out.push(cur);
        }
        Ok(out)
    };
    let fwd = walk(Direction::Forward, &s0)?;
    let bwd = walk(Direction::Backward, &s1)?;
    let min_n = -(bwd.len() as i32);
    let mut values = Vec::with_capacity(fwd.len() + bwd.len() + 1);
    values.extend(bwd.iter().rev());
    values.push(x);
    values.extend(fwd);
    Ok(PiOrbit { anchor: x, min_n, values })
}
