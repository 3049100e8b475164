use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform grid on a closed outcome range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YGrid {
    lo: f64,
    hi: f64,
    len: usize,
}

impl YGrid {
    pub fn new(lo: f64, hi: f64, len: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidGrid(format!("range [{lo}, {hi}] is not a proper interval")));
        }
        if len < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {len}")));
        }
        Ok(Self { lo, hi, len })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.len - 1) as f64
    }

    /// The i-th node; the last node is exactly `hi`.
    pub fn node(&self, i: usize) -> f64 {
        if i + 1 >= self.len {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.node(i))
    }

    /// Cell index `i` and fraction `t ∈ [0, 1]` with `y = node(i) + t·step`;
    /// `y` is clamped to the range first.
    pub(crate) fn locate(&self, y: f64) -> (usize, f64) {
        let pos = ((y - self.lo) / self.step()).clamp(0.0, (self.len - 1) as f64);
        let i = (pos.floor() as usize).min(self.len - 2);
        (i, pos - i as f64)
    }

    /// Index of the node closest to `y`.
    pub fn nearest(&self, y: f64) -> usize {
        let (i, t) = self.locate(y);
        if t > 0.5 {
            i + 1
        } else {
            i
        }
    }
}

/// `n` cell midpoints of `(lo, hi)`; every point is strictly interior.
pub fn midpoint_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect()
}
