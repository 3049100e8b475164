//! Tabulated nondecreasing maps on a closed interval.
//!
//! A [`MonotoneMap`] is the piecewise-linear interpolant of
//! `(knot_i, value_i)`. Knots are either a uniform [`YGrid`] or an explicit
//! nondecreasing list; repeated explicit knots encode jumps, and the
//! map's continuity side decides which of the repeated values is taken at
//! the jump. Queries outside the knot range return the end values.
//!
//! Generalized inverses are exact for the interpolant:
//! the right inverse is `sup{y : M(y) ≤ v}` capped at the upper end of the
//! domain, the left inverse is `inf{y : M(y) ≥ v}` floored at the lower end.

use crate::dist::Side;
use crate::grid::YGrid;

#[derive(Debug, Clone, PartialEq)]
enum Knots {
    Uniform(YGrid),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneMap {
    knots: Knots,
    values: Vec<f64>,
    continuity: Side,
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    (a + t * (b - a)).clamp(a.min(b), a.max(b))
}

impl MonotoneMap {
    /// Tabulate `f` on the grid; the tabulated values are made monotone with
    /// a running maximum so rounding noise cannot break the ordering.
    pub fn from_fn(grid: YGrid, mut f: impl FnMut(f64) -> f64) -> Self {
        Self::from_values(grid, grid.nodes().map(&mut f).collect())
    }

    pub fn from_values(grid: YGrid, mut values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "one value per grid node");
        for i in 1..values.len() {
            if values[i] < values[i - 1] {
                values[i] = values[i - 1];
            }
        }
        Self { knots: Knots::Uniform(grid), values, continuity: Side::Right }
    }

    pub fn identity(grid: YGrid) -> Self {
        Self::from_values(grid, grid.nodes().collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn continuity(&self) -> Side {
        self.continuity
    }

    /// The uniform grid, if the knots are uniform.
    pub fn grid(&self) -> Option<YGrid> {
        match self.knots {
            Knots::Uniform(g) => Some(g),
            Knots::Explicit(_) => None,
        }
    }

    #[inline]
    pub fn knot(&self, i: usize) -> f64 {
        match &self.knots {
            Knots::Uniform(g) => g.node(i),
            Knots::Explicit(k) => k[i],
        }
    }

    pub fn knots(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.knot(i)).collect()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knot(0), self.knot(self.len() - 1))
    }

    /// Map value at `y`.
    #[inline]
    pub fn evaluate(&self, y: f64) -> f64 {
        let v = &self.values;
        let n = v.len();
        match &self.knots {
            Knots::Uniform(g) => {
                let (i, t) = g.locate(y);
                lerp(v[i], v[i + 1], t)
            }
            Knots::Explicit(k) => {
                let i = match self.continuity {
                    Side::Right => k.partition_point(|&x| x <= y),
                    Side::Left => k.partition_point(|&x| x < y),
                };
                if i == 0 {
                    return v[0];
                }
                if i == n {
                    return v[n - 1];
                }
                let span = k[i] - k[i - 1];
                let t = if span > 0.0 { (y - k[i - 1]) / span } else { 1.0 };
                lerp(v[i - 1], v[i], t.clamp(0.0, 1.0))
            }
        }
    }

    /// `self ∘ inner`, tabulated on `inner`'s knots.
    pub fn compose(&self, inner: &MonotoneMap) -> MonotoneMap {
        let mut values: Vec<f64> = inner.values.iter().map(|&v| self.evaluate(v)).collect();
        for i in 1..values.len() {
            if values[i] < values[i - 1] {
                values[i] = values[i - 1];
            }
        }
        MonotoneMap { knots: inner.knots.clone(), values, continuity: inner.continuity }
    }

    /// Tabulated generalized inverse; swaps knots and values.
    pub fn invert(&self, side: Side) -> MonotoneMap {
        MonotoneMap {
            knots: Knots::Explicit(self.values.clone()),
            values: self.knots(),
            continuity: side,
        }
    }

    /// Generalized inverse at a single value, without tabulation.
    #[inline]
    pub fn inverse_at(&self, v: f64, side: Side) -> f64 {
        inverse_by(self.len(), |i| self.values[i], |i| self.knot(i), v, side)
    }

    /// Whether the tabulated values are strictly increasing.
    pub fn is_strict(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }

    /// Pointwise `t·a + (1 − t)·b` of two maps on the same knots.
    pub fn convex_combination(t: f64, a: &MonotoneMap, b: &MonotoneMap) -> MonotoneMap {
        assert_eq!(a.knots, b.knots, "combination needs shared knots");
        let values = a.values.iter().zip(&b.values).map(|(&x, &y)| t * x + (1.0 - t) * y).collect();
        MonotoneMap { knots: a.knots.clone(), values, continuity: a.continuity }
    }

    /// Inverse of `t·a + (1 − t)·b` at `v`, computing the combination lazily.
    #[inline]
    pub fn combination_inverse_at(t: f64, a: &MonotoneMap, b: &MonotoneMap, v: f64, side: Side) -> f64 {
        let (av, bv) = (&a.values, &b.values);
        inverse_by(a.len(), |i| t * av[i] + (1.0 - t) * bv[i], |i| a.knot(i), v, side)
    }

    pub fn pointwise_min(a: &MonotoneMap, b: &MonotoneMap) -> MonotoneMap {
        Self::pointwise(a, b, f64::min)
    }

    pub fn pointwise_max(a: &MonotoneMap, b: &MonotoneMap) -> MonotoneMap {
        Self::pointwise(a, b, f64::max)
    }

    fn pointwise(a: &MonotoneMap, b: &MonotoneMap, f: fn(f64, f64) -> f64) -> MonotoneMap {
        assert_eq!(a.knots, b.knots, "pointwise operations need shared knots");
        let values = a.values.iter().zip(&b.values).map(|(&x, &y)| f(x, y)).collect();
        MonotoneMap { knots: a.knots.clone(), values, continuity: a.continuity }
    }
}

/// Generalized inverse of the interpolant through `(knot(i), value(i))`.
#[inline]
fn inverse_by(n: usize, value: impl Fn(usize) -> f64, knot: impl Fn(usize) -> f64, v: f64, side: Side) -> f64 {
    let count = |pred: &dyn Fn(f64) -> bool| {
        let (mut lo, mut hi) = (0, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if pred(value(mid)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    };
    match side {
        Side::Right => {
            let k = count(&|a| a <= v);
            if k == 0 {
                return knot(0);
            }
            if k == n {
                return knot(n - 1);
            }
            let (a, b) = (value(k - 1), value(k));
            lerp(knot(k - 1), knot(k), (v - a) / (b - a))
        }
        Side::Left => {
            let k = count(&|a| a < v);
            if k == 0 {
                return knot(0);
            }
            if k == n {
                return knot(n - 1);
            }
            let (a, b) = (value(k - 1), value(k));
            lerp(knot(k - 1), knot(k), (v - a) / (b - a))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> YGrid {
        YGrid::new(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn identity_and_linear() {
        let g = grid(11);
        let id = MonotoneMap::identity(g);
        assert_eq!(id.evaluate(0.37), 0.37);
        let f = MonotoneMap::from_fn(g, |y| 2.0 * y + 1.0);
        assert!((f.evaluate(0.25) - 1.5).abs() < 1e-15);
        assert_eq!(f.evaluate(-1.0), 1.0);
        assert_eq!(f.evaluate(2.0), 3.0);
        let inv = f.invert(Side::Right);
        assert!((inv.evaluate(1.5) - 0.25).abs() < 1e-15);
        assert!((f.inverse_at(1.5, Side::Right) - 0.25).abs() < 1e-15);
        assert!((f.inverse_at(1.5, Side::Left) - 0.25).abs() < 1e-15);
        assert_eq!(f.inverse_at(0.0, Side::Right), 0.0);
        assert_eq!(f.inverse_at(9.0, Side::Left), 1.0);
    }

    #[test]
    fn flats_and_jumps() {
        let g = grid(5);
        // Flat at 0.5 on [0.25, 0.75], then a jump to 1 at the end.
        let m = MonotoneMap::from_values(g, vec![0.0, 0.5, 0.5, 0.5, 1.0]);
        assert_eq!(m.inverse_at(0.5, Side::Right), 0.75);
        assert_eq!(m.inverse_at(0.5, Side::Left), 0.25);
        let r = m.invert(Side::Right);
        let l = m.invert(Side::Left);
        assert_eq!(r.evaluate(0.5), 0.75);
        assert_eq!(l.evaluate(0.5), 0.25);
        // Inverse of the inverse recovers the jump as a flat.
        let back = r.invert(Side::Right);
        assert!((back.evaluate(0.5) - 0.5).abs() < 1e-15);
        let step = MonotoneMap::from_values(g, vec![0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(step.inverse_at(0.0, Side::Right), 0.25);
        assert_eq!(step.inverse_at(1.0, Side::Left), 0.5);
        assert_eq!(step.inverse_at(0.5, Side::Left), step.inverse_at(0.5, Side::Right));
    }

    #[test]
    fn compose_and_combine() {
        let g = grid(101);
        let a = MonotoneMap::from_fn(g, |y| y * y);
        let b = MonotoneMap::from_fn(g, |y| 0.5 * y);
        let ab = a.compose(&b);
        assert!((ab.evaluate(0.8) - 0.16).abs() < 1e-4);
        let c = MonotoneMap::convex_combination(0.25, &a, &b);
        let v = c.evaluate(0.6);
        assert!((MonotoneMap::combination_inverse_at(0.25, &a, &b, v, Side::Right) - 0.6).abs() < 1e-12);
        assert!((c.inverse_at(v, Side::Left) - 0.6).abs() < 1e-12);
        assert_eq!(MonotoneMap::pointwise_min(&a, &b).evaluate(0.2), a.evaluate(0.2));
        assert!(!MonotoneMap::from_values(g, vec![0.0; 101]).is_strict());
        assert!(a.is_strict());
    }
}
