//! Index-pair sets that decide which transports are combined when bounding
//! `T_{x',x}`.
//!
//! For orbits of `x'` and `x`:
//!
//! * `M`: pairs `(n, m)` with `π^n(x') ≤ π^m(x)`.
//! * `C`: pairs with `π^n(x') ≤ π^m(x) ≤ π^{n−1}(x')`, each carrying the
//!   interpolation weight
//!   `t = (π^{n−1}(x') − π^m(x)) / (π^{n−1}(x') − π^n(x'))`.
//!
//! Comparisons use a relative tolerance taken from the model.

use crate::dist::CondModel;
use crate::error::{Error, Result};
use crate::transport::{orbit, PiOrbit};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PiSetKind {
    M,
    C,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiSet {
    pub kind: PiSetKind,
    pub xp: f64,
    pub x: f64,
    /// Pairs ordered by descending `n`, then descending `m`.
    pub pairs: Vec<(i32, i32)>,
    /// Interpolation weights, aligned with `pairs`, for `C` sets.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[inline]
pub(crate) fn approx_le(a: f64, b: f64, tol: f64) -> bool {
    a <= b + tol * a.abs().max(b.abs()).max(1.0)
}

/// `M` pairs from precomputed orbits of `x'` (`op`) and `x` (`ox`).
pub(crate) fn m_pairs(op: &PiOrbit, ox: &PiOrbit, tol: f64) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for (n, a) in op.entries().collect::<Vec<_>>().into_iter().rev() {
        for (m, b) in ox.entries().collect::<Vec<_>>().into_iter().rev() {
            if approx_le(a, b, tol) {
                out.push((n, m));
            }
        }
    }
    out
}

/// `C` pairs with their weights from precomputed orbits.
pub(crate) fn c_pairs(op: &PiOrbit, ox: &PiOrbit, tol: f64) -> Vec<((i32, i32), f64)> {
    let mut out = Vec::new();
    for n in (op.min_n + 1..=op.max_n()).rev() {
        let (lo, hi) = (op.get(n).unwrap(), op.get(n - 1).unwrap());
        for (m, b) in ox.entries().collect::<Vec<_>>().into_iter().rev() {
            if approx_le(lo, b, tol) && approx_le(b, hi, tol) {
                out.push(((n, m), weight(hi, lo, b)));
            }
        }
    }
    out
}

fn weight(prev: f64, cur: f64, target: f64) -> f64 {
    ((prev - target) / (prev - cur)).clamp(0.0, 1.0)
}

/// The `M` or `C` index set for the pair `(x', x)`.
pub fn pi_set<M: CondModel + ?Sized>(model: &M, xp: f64, x: f64, kind: PiSetKind) -> Result<PiSet> {
    let op = orbit(model, xp)?;
    let ox = orbit(model, x)?;
    let tol = model.comparison_tol();
    Ok(match kind {
        PiSetKind::M => PiSet { kind, xp, x, pairs: m_pairs(&op, &ox, tol), weights: None },
        PiSetKind::C => {
            let (pairs, w) = c_pairs(&op, &ox, tol).into_iter().unzip();
            PiSet { kind, xp, x, pairs, weights: Some(w) }
        }
    })
}

/// Interpolation weight of a `C` pair; errors if the pair is not a member.
pub fn t_weight<M: CondModel + ?Sized>(model: &M, xp: f64, x: f64, n: i32, m: i32) -> Result<f64> {
    let op = orbit(model, xp)?;
    let ox = orbit(model, x)?;
    c_pairs(&op, &ox, model.comparison_tol())
        .into_iter()
        .find(|&(p, _)| p == (n, m))
        .map(|(_, t)| t)
        .ok_or(Error::NotInPiC { n, m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{make_analytic, DgpSpec};

    #[test]
    fn reference_sets() {
        let m = make_analytic(&DgpSpec::power_exp()).unwrap();
        let s = pi_set(&m, 0.6, 0.8, PiSetKind::M).unwrap();
        assert_eq!(s.pairs, vec![(1, 1), (1, 0), (1, -1), (0, 0), (0, -1), (-1, -1)]);
        let c = pi_set(&m, 0.6, 0.8, PiSetKind::C).unwrap();
        assert_eq!(c.pairs, vec![(1, 1), (0, 0)]);
        for w in c.weights.unwrap() {
            assert!((w - 0.6).abs() < 1e-12);
        }
        assert!((t_weight(&m, 0.6, 0.8, 1, 1).unwrap() - 0.6).abs() < 1e-12);
        assert!(matches!(t_weight(&m, 0.6, 0.8, 1, 0), Err(Error::NotInPiC { n: 1, m: 0 })));
    }

    #[test]
    fn identical_points_pair_every_index_with_itself() {
        let m = make_analytic(&DgpSpec::power_exp()).unwrap();
        let o = orbit(&m, 0.8).unwrap();
        let c = pi_set(&m, 0.8, 0.8, PiSetKind::C).unwrap();
        for n in o.min_n + 1..=o.max_n() {
            let k = c.pairs.iter().position(|&p| p == (n, n)).expect("diagonal pair");
            assert!((c.weights.as_ref().unwrap()[k] - 1.0).abs() < 1e-12);
        }
    }
}
