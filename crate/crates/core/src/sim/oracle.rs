//! Brute-force reference implementation of the bound pipeline for the
//! closed-form DGPs.
//!
//! It shares only the closed-form conditional laws with the library. Inner
//! transports are exact pointwise chains, outer transports are tabulated
//! on a dense outcome grid and inverted by taking the extreme qualifying
//! grid point, the `x'` integral uses composite Gauss–Legendre quadrature,
//! and all envelopes are naive loops.

use super::analytic::{make_analytic, AnalyticLaw, AnalyticModel};
use super::dgp::DgpSpec;
use crate::bounds::{BoundCurve, Method};
use crate::dist::{Arm, CondModel, OutcomeLaw, Side};
use crate::error::{Error, Result};

const DENSE: usize = 10_000;
const PANELS: usize = 64;
const BISECTIONS: usize = 44;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Chain {
    Tilde,
    Hat,
    Check,
}

impl Chain {
    fn sides(self) -> (Side, Side) {
        match self {
            Chain::Tilde => (Side::Right, Side::Right),
            Chain::Hat => (Side::Left, Side::Right),
            Chain::Check => (Side::Right, Side::Left),
        }
    }
}

struct Point {
    /// `(n, π^n(x))` for every index in the orbit.
    orbit: Vec<(i32, f64)>,
}

impl Point {
    fn at(&self, n: i32) -> Option<f64> {
        self.orbit.iter().find(|p| p.0 == n).map(|p| p.1)
    }
}

struct QNode {
    weight: f64,
    x: f64,
    arm: Arm,
    point: Point,
    /// Dense tabulations per chain kind and orbit index.
    tables: Vec<(Chain, i32, Vec<f64>)>,
}

impl QNode {
    fn table(&self, kind: Chain, n: i32) -> &[f64] {
        &self.tables.iter().find(|t| t.0 == kind && t.1 == n).expect("tabulated").2
    }
}

struct Anchor<'p, 'a> {
    point: &'p Point,
    steps: &'p Steps<'a>,
    laws: &'p [AnalyticLaw<'a>],
}

pub struct Oracle {
    spec: DgpSpec,
    model: AnalyticModel,
    dense: Vec<f64>,
    nodes: Vec<QNode>,
}

impl Oracle {
    /// Precompute dense outer transports at every quadrature node.
    /// `general` also tabulates the weakly-monotone chains.
    pub fn new(spec: &DgpSpec, general: bool) -> Result<Self> {
        let model = make_analytic(spec)?;
        if !(spec.c > 0.0 && spec.c < 1.0) {
            return Err(Error::AssumptionViolated(format!("oracle needs 0 < c < 1, got {}", spec.c)));
        }
        let (lo, hi) = spec.y_range();
        let dense: Vec<f64> = (0..DENSE).map(|i| lo + (hi - lo) * i as f64 / (DENSE - 1) as f64).collect();
        let kinds: &[Chain] = if general { &[Chain::Tilde, Chain::Hat, Chain::Check] } else { &[Chain::Tilde] };
        let gl = [(-(0.6f64).sqrt(), 5.0 / 9.0), (0.0, 8.0 / 9.0), ((0.6f64).sqrt(), 5.0 / 9.0)];
        let mut nodes = Vec::new();
        for arm in Arm::BOTH {
            let (xlo, _) = spec.x_support(arm.label());
            let p = model.arm_prob(arm);
            for k in 0..PANELS {
                for &(r, w) in &gl {
                    let v = (k as f64 + 0.5 + 0.5 * r) / PANELS as f64;
                    let x = xlo + v;
                    let point = orbit_of(spec, x);
                    let steps = Steps::new(&model, &point);
                    let mut tables = Vec::new();
                    for &kind in kinds {
                        for &(n, _) in &point.orbit {
                            let vals = dense.iter().map(|&y| steps.chain(kind, n, y)).collect();
                            tables.push((kind, n, vals));
                        }
                    }
                    nodes.push(QNode { weight: p * w / (2.0 * PANELS as f64), x, arm, point, tables });
                }
            }
        }
        Ok(Self { spec: *spec, model, dense, nodes })
    }

    /// Reference bound curve on an x-grid.
    pub fn bounds(&self, e: f64, x_grid: &[f64], method: Method) -> Result<BoundCurve> {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::EOutOfRange { e });
        }
        let (lo, hi) = self.spec.y_range();
        let laws: Vec<AnalyticLaw> = self.nodes.iter().map(|n| self.model.law(n.x, n.arm)).collect();
        let mut sl = Vec::new();
        let mut su = Vec::new();
        for &x in x_grid {
            let anchor = orbit_of(&self.spec, x);
            if anchor.orbit.is_empty() {
                return Err(Error::XOutOfSupport { x, arm: 0 });
            }
            let steps = Steps::new(&self.model, &anchor);
            let ctx = Anchor { point: &anchor, steps: &steps, laws: &laws };
            let gl = |u: f64| self.mixture(&ctx, method, u, true);
            let gu = |u: f64| self.mixture(&ctx, method, u, false);
            // Lower: inf{u : G(u) ≥ e}.
            let (mut a, mut b) = (lo, hi);
            let l = if gl(lo) >= e {
                lo
            } else {
                for _ in 0..BISECTIONS {
                    let m = 0.5 * (a + b);
                    if gl(m) >= e { b = m } else { a = m }
                }
                b
            };
            // Upper: sup{u : G(u) ≤ e}.
            let (mut a, mut b) = (lo, hi);
            let h = if gu(hi) <= e {
                hi
            } else {
                for _ in 0..BISECTIONS {
                    let m = 0.5 * (a + b);
                    if gu(m) <= e { a = m } else { b = m }
                }
                a
            };
            sl.push(l);
            su.push(h);
        }
        let n = x_grid.len();
        let mono_l: Vec<f64> = (0..n).map(|j| (0..=j).map(|i| sl[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
        let mono_u: Vec<f64> = (0..n).map(|j| (j..n).map(|i| su[i]).fold(f64::INFINITY, f64::min)).collect();
        let conc_l: Vec<f64> = (0..n)
            .map(|j| {
                let mut best = sl[j];
                for i in 0..=j {
                    for k in j..n {
                        if i < k {
                            let slope = (sl[k] - sl[i]) / (x_grid[k] - x_grid[i]);
                            best = best.max(sl[i] + (x_grid[j] - x_grid[i]) * slope);
                        }
                    }
                }
                best
            })
            .collect();
        let conc_u: Vec<f64> = (0..n)
            .map(|j| {
                let mut best = su[j];
                for i in 0..n {
                    for k in 0..n {
                        let ordered = (j < i && i < k) || (k < i && i < j);
                        if ordered {
                            let slope = (conc_l[k] - su[i]) / (x_grid[k] - x_grid[i]);
                            best = best.min(su[i] + (x_grid[j] - x_grid[i]) * slope);
                        }
                    }
                }
                best
            })
            .collect();
        let (mut lower, mut upper): (Vec<f64>, Vec<f64>) = match method {
            Method::M | Method::G => (mono_l, mono_u),
            Method::C => (conc_l, conc_u),
            Method::MC => (
                (0..n).map(|j| mono_l[j].max(conc_l[j])).collect(),
                (0..n).map(|j| mono_u[j].min(conc_u[j])).collect(),
            ),
        };
        let mut crossed = vec![false; n];
        for j in 0..n {
            if lower[j] > upper[j] {
                let mid = 0.5 * (lower[j] + upper[j]);
                lower[j] = mid;
                upper[j] = mid;
                crossed[j] = true;
            }
        }
        let point_identified = (0..n).map(|j| upper[j] - lower[j] <= 1e-3 * (hi - lo)).collect();
        Ok(BoundCurve {
            e,
            method,
            x_grid: x_grid.to_vec(),
            lower,
            upper,
            stage_lower: sl,
            stage_upper: su,
            point_identified,
            crossed,
            y_range: (lo, hi),
        })
    }

    /// `Σ w F(T(u) | x')` with the upper transport (`for_lower`) or the lower one.
    fn mixture(&self, ctx: &Anchor, method: Method, u: f64, for_lower: bool) -> f64 {
        let anchor = ctx.point;
        let inner = |kind: Chain| -> Vec<(i32, f64)> {
            anchor.orbit.iter().map(|&(n, _)| (n, ctx.steps.chain(kind, n, u))).collect()
        };
        let inner = match method {
            Method::G => [inner(Chain::Hat), inner(Chain::Check)],
            _ => [inner(Chain::Tilde), Vec::new()],
        };
        let side = if for_lower { Side::Right } else { Side::Left };
        let mut total = 0.0;
        for (node, law) in self.nodes.iter().zip(ctx.laws) {
            let t = self.transport(node, anchor, &inner, method, for_lower);
            total += node.weight * law.cdf(t, side);
        }
        total
    }

    fn transport(&self, node: &QNode, anchor: &Point, inner: &[Vec<(i32, f64)>; 2], method: Method, upper: bool) -> f64 {
        let value = |kind: Chain, n: i32| {
            let list = if kind == Chain::Check { &inner[1] } else { &inner[0] };
            list.iter().find(|p| p.0 == n).expect("anchor index").1
        };
        let (lo, hi) = self.spec.y_range();
        let mono = matches!(method, Method::M | Method::MC);
        let conc = matches!(method, Method::C | Method::MC);
        let xp = &node.point;
        let mut vals = Vec::new();
        if upper {
            if mono || method == Method::G {
                let (outer, inner_kind) = if method == Method::G { (Chain::Hat, Chain::Check) } else { (Chain::Tilde, Chain::Tilde) };
                for &(n, a) in &xp.orbit {
                    for &(m, b) in &anchor.orbit {
                        if le(a, b) {
                            let v = value(inner_kind, m);
                            vals.push(sup_below(&self.dense, node.table(outer, n), None, v));
                        }
                    }
                }
            }
            if conc {
                for &(n, a) in &xp.orbit {
                    let Some(prev) = xp.at(n - 1) else { continue };
                    for &(m, b) in &anchor.orbit {
                        if le(a, b) && le(b, prev) {
                            let t = ((prev - b) / (prev - a)).clamp(0.0, 1.0);
                            let v = value(Chain::Tilde, m);
                            let mix = (t, node.table(Chain::Tilde, n - 1));
                            vals.push(sup_below(&self.dense, node.table(Chain::Tilde, n), Some(mix), v));
                        }
                    }
                }
            }
            vals.into_iter().fold(hi, f64::min)
        } else {
            if mono || method == Method::G {
                let (outer, inner_kind) = if method == Method::G { (Chain::Check, Chain::Hat) } else { (Chain::Tilde, Chain::Tilde) };
                for &(n, a) in &anchor.orbit {
                    for &(m, b) in &xp.orbit {
                        if le(a, b) {
                            let v = value(inner_kind, n);
                            vals.push(inf_above(&self.dense, node.table(outer, m), v));
                        }
                    }
                }
            }
            if conc {
                for &(n, a) in &anchor.orbit {
                    let Some(prev) = anchor.at(n - 1) else { continue };
                    for &(m, b) in &xp.orbit {
                        if le(a, b) && le(b, prev) {
                            let t = ((prev - b) / (prev - a)).clamp(0.0, 1.0);
                            let v = t * value(Chain::Tilde, n) + (1.0 - t) * value(Chain::Tilde, n - 1);
                            vals.push(inf_above(&self.dense, node.table(Chain::Tilde, m), v));
                        }
                    }
                }
            }
            vals.into_iter().fold(lo, f64::max)
        }
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b + 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Orbit by direct iteration of the uniform first stage: `π(x) = x − c`.
fn orbit_of(spec: &DgpSpec, x: f64) -> Point {
    let (a0, b0) = spec.x_support(0);
    let (a1, b1) = spec.x_support(1);
    let in0 = |v: f64| v > a0 && v < b0;
    let in1 = |v: f64| v > a1 && v < b1;
    let mut orbit = Vec::new();
    if !(in0(x) || in1(x)) {
        return Point { orbit };
    }
    orbit.push((0, x));
    let (mut n, mut v) = (0, x);
    while in0(v) {
        v = a1 + (v - a0);
        n += 1;
        orbit.push((n, v));
    }
    let (mut n, mut v) = (0, x);
    while in1(v) {
        v = a0 + (v - a1);
        n -= 1;
        orbit.push((n, v));
    }
    orbit.sort_by_key(|p| p.0);
    Point { orbit }
}

/// Conditional laws along an orbit: `fwd[k]` maps `π^k → π^{k+1}` and
/// `bwd[k]` maps `π^{-k} → π^{-k-1}`.
struct Steps<'a> {
    fwd: Vec<(AnalyticLaw<'a>, AnalyticLaw<'a>)>,
    bwd: Vec<(AnalyticLaw<'a>, AnalyticLaw<'a>)>,
}

impl<'a> Steps<'a> {
    fn new(model: &'a AnalyticModel, p: &Point) -> Self {
        let max = p.orbit.iter().map(|q| q.0).max().unwrap_or(0);
        let min = p.orbit.iter().map(|q| q.0).min().unwrap_or(0);
        let fwd = (0..max)
            .map(|k| (model.law(p.at(k).unwrap(), Arm::Z0), model.law(p.at(k + 1).unwrap(), Arm::Z1)))
            .collect();
        let bwd = (0..-min)
            .map(|k| (model.law(p.at(-k).unwrap(), Arm::Z1), model.law(p.at(-k - 1).unwrap(), Arm::Z0)))
            .collect();
        Self { fwd, bwd }
    }

    /// n-step transport at `y` by chaining exact one-step maps.
    fn chain(&self, kind: Chain, n: i32, y: f64) -> f64 {
        let (fs, qs) = kind.sides();
        let steps = if n >= 0 { &self.fwd } else { &self.bwd };
        let mut y = y;
        for (from, to) in steps.iter().take(n.unsigned_abs() as usize) {
            y = to.quantile(from.cdf(y, fs), qs);
        }
        y
    }
}

/// `sup{y_i : A(y_i) ≤ v}` over the dense grid, with `A` optionally mixed
/// as `t·A + (1 − t)·B`; the lowest grid point when no point qualifies.
fn sup_below(dense: &[f64], a: &[f64], mix: Option<(f64, &[f64])>, v: f64) -> f64 {
    let val = |i: usize| match mix {
        Some((t, b)) => t * a[i] + (1.0 - t) * b[i],
        None => a[i],
    };
    let (mut lo, mut hi) = (0usize, dense.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if val(mid) <= v { lo = mid + 1 } else { hi = mid }
    }
    if lo == 0 { dense[0] } else { dense[lo - 1] }
}

/// `inf{y_i : A(y_i) ≥ v}` over the dense grid; the highest point when none qualifies.
fn inf_above(dense: &[f64], a: &[f64], v: f64) -> f64 {
    let idx = a.partition_point(|&w| w < v);
    dense[idx.min(dense.len() - 1)]
}

/// Convenience wrapper that builds an [`Oracle`] for a single curve.
pub fn oracle_bounds(spec: &DgpSpec, e: f64, x_grid: &[f64], method: Method) -> Result<BoundCurve> {
    Oracle::new(spec, method == Method::G)?.bounds(e, x_grid, method)
}
