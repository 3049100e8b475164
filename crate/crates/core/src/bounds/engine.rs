//! Shared machinery for every bound method.
//!
//! The engine fixes the outcome grid and the quadrature over `x'`, and
//! precomputes orbits and tabulated transports at every quadrature node.
//! For an anchor `x` it then builds, per node, the list of terms whose
//! pointwise min (upper transport) or max (lower transport) defines
//! `T_{x',x}(u)`, and inverts the mixtures
//! `G(u) = Σ_z p_z ∫ F_{Y|X,Z}(T_{x',x}(u) | x', z) dF_{X|Z}(x'|z)` at the
//! requested quantile level by bisection.

use super::BoundsConfig;
use crate::dist::{validate_assumptions, Arm, CondModel, Dominance, OutcomeLaw, Side};
use crate::error::{Error, Result};
use crate::exec;
use crate::grid::YGrid;
use crate::pisets::{c_pairs, m_pairs};
use crate::transport::{orbit, transport_family, MonotoneMap, PiOrbit, StepKind, TransportFamily};

/// One member of the family a transport bound is the min or max of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rule {
    /// `(T̃_{x'}^{(n)})^{-1} ∘ T̃_x^{(m)}` over `M(x', x)`.
    MonoUpper,
    /// `(T̃_{x'}^{(m)})^{-1} ∘ T̃_x^{(n)}` over `M(x, x')`.
    MonoLower,
    /// Inverse of the interpolated `x'` transports applied to `T̃_x^{(m)}` over `C(x', x)`.
    ConcUpper,
    /// `(T̃_{x'}^{(m)})^{-1}` applied to the interpolated `x` transports over `C(x, x')`.
    ConcLower,
    /// `(T̂_{x'}^{(n)})^{→} ∘ Ť_x^{(m)}` over `M(x', x)`.
    GenUpper,
    /// `(Ť_{x'}^{(m)})^{←} ∘ T̂_x^{(n)}` over `M(x, x')`.
    GenLower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fam {
    Tilde,
    Hat,
    Check,
}

#[derive(Debug, Clone, Copy)]
enum Form {
    Plain,
    OuterMix,
    InnerMix,
}

/// Precomputed term; indices are offsets into orbit-indexed families.
#[derive(Debug, Clone, Copy)]
struct Term {
    form: Form,
    outer_fam: Fam,
    outer: u32,
    outer_prev: u32,
    inner_fam: Fam,
    inner: u32,
    inner_prev: u32,
    t: f64,
}

/// Orbit and tabulated transports at one point.
#[derive(Debug, Clone)]
pub(crate) struct Families {
    pub orbit: PiOrbit,
    tilde: Option<TransportFamily>,
    hat: Option<TransportFamily>,
    check: Option<TransportFamily>,
}

impl Families {
    fn fam(&self, f: Fam) -> &TransportFamily {
        match f {
            Fam::Tilde => self.tilde.as_ref(),
            Fam::Hat => self.hat.as_ref(),
            Fam::Check => self.check.as_ref(),
        }
        .expect("transport family was not precomputed")
    }

    fn map(&self, f: Fam, idx: u32) -> &MonotoneMap {
        self.fam(f).get(self.orbit.min_n + idx as i32).expect("index inside orbit")
    }
}

struct Node<L> {
    weight: f64,
    law: L,
    fam: Families,
}

/// Which transport families to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Needs {
    pub tilde: bool,
    pub general: bool,
}

pub struct BoundsEngine<'m, M: CondModel + ?Sized> {
    model: &'m M,
    grid: YGrid,
    cfg: BoundsConfig,
    needs: Needs,
    nodes: Vec<Node<M::Law<'m>>>,
}

/// Inner-map values at one `u`, per family.
#[derive(Default)]
struct InnerValues {
    tilde: Vec<f64>,
    hat: Vec<f64>,
    check: Vec<f64>,
}

impl InnerValues {
    fn get(&self, f: Fam) -> &[f64] {
        match f {
            Fam::Tilde => &self.tilde,
            Fam::Hat => &self.hat,
            Fam::Check => &self.check,
        }
    }
}

/// Per-anchor precomputation for a fixed set of rules.
pub(crate) struct AnchorPlan {
    fam: Families,
    /// Per node: terms of the upper transport (min).
    upper: Vec<Vec<Term>>,
    /// Per node: terms of the lower transport (max).
    lower: Vec<Vec<Term>>,
}

impl<'m, M: CondModel + ?Sized> BoundsEngine<'m, M> {
    pub(crate) fn new(model: &'m M, cfg: &BoundsConfig, needs: Needs) -> Result<Self> {
        let report = validate_assumptions(model, None);
        if report.direction != Dominance::Z0Dominates || !report.endpoint_order {
            return Err(Error::AssumptionViolated(report.summary()));
        }
        if cfg.quad_nodes == 0 {
            return Err(Error::InvalidGrid("need at least one quadrature node per arm".into()));
        }
        let (lo, hi) = model.y_range();
        let grid = YGrid::new(lo, hi, cfg.y_grid.unwrap_or_else(|| model.default_y_grid()))?;
        let k = cfg.quad_nodes;
        let specs: Vec<(f64, f64, Arm)> = Arm::BOTH
            .iter()
            .flat_map(|&arm| {
                let w = model.arm_prob(arm) / k as f64;
                (0..k).map(move |i| (model.quantile_x((i as f64 + 0.5) / k as f64, arm), w, arm))
            })
            .collect();
        let fams = exec::try_map_indexed(cfg.exec, specs.len(), |i| {
            families(model, specs[i].0, grid, needs)
        })?;
        let nodes = specs
            .into_iter()
            .zip(fams)
            .map(|((x, weight, arm), fam)| Node { weight, law: model.law(x, arm), fam })
            .collect();
        Ok(Self { model, grid, cfg: cfg.clone(), needs, nodes })
    }

    pub fn grid(&self) -> YGrid {
        self.grid
    }

    pub fn model(&self) -> &'m M {
        self.model
    }

    pub(crate) fn config(&self) -> &BoundsConfig {
        &self.cfg
    }

    pub(crate) fn families_at(&self, x: f64) -> Result<Families> {
        families(self.model, x, self.grid, self.needs)
    }

    pub(crate) fn plan(&self, x: f64, upper: &[Rule], lower: &[Rule]) -> Result<AnchorPlan> {
        let fam = self.families_at(x)?;
        let tol = self.model.comparison_tol();
        let terms = |rules: &[Rule]| -> Vec<Vec<Term>> {
            self.nodes.iter().map(|n| pair_terms(&n.fam.orbit, &fam.orbit, rules, tol)).collect()
        };
        Ok(AnchorPlan { upper: terms(upper), lower: terms(lower), fam })
    }

    fn inner_values(&self, plan: &AnchorPlan, u: f64) -> InnerValues {
        let vals = |f: &Option<TransportFamily>| match f {
            Some(tf) => (plan.fam.orbit.min_n..=plan.fam.orbit.max_n())
                .map(|n| tf.at(n).evaluate(u))
                .collect(),
            None => Vec::new(),
        };
        InnerValues { tilde: vals(&plan.fam.tilde), hat: vals(&plan.fam.hat), check: vals(&plan.fam.check) }
    }

    /// Mixture behind the lower bound: `Σ w F⁺(T^{upper}(u) | x')`.
    pub(crate) fn g_lower(&self, plan: &AnchorPlan, u: f64) -> f64 {
        let iv = self.inner_values(plan, u);
        let mut acc = 0.0;
        for (node, terms) in self.nodes.iter().zip(&plan.upper) {
            let t = eval_terms(&node.fam, terms, &iv, Side::Right, self.grid.hi());
            acc += node.weight * node.law.cdf(t, Side::Right);
        }
        acc
    }

    /// Mixture behind the upper bound: `Σ w F⁻(T^{lower}(u) | x')`.
    pub(crate) fn g_upper(&self, plan: &AnchorPlan, u: f64) -> f64 {
        let iv = self.inner_values(plan, u);
        let mut acc = 0.0;
        for (node, terms) in self.nodes.iter().zip(&plan.lower) {
            let t = eval_terms(&node.fam, terms, &iv, Side::Left, self.grid.lo());
            acc += node.weight * node.law.cdf(t, Side::Left);
        }
        acc
    }

    /// Stage-one `(lower, upper)` values at anchor `x`.
    pub(crate) fn stage(&self, x: f64, e: f64, upper: &[Rule], lower: &[Rule]) -> Result<(f64, f64)> {
        let plan = self.plan(x, upper, lower)?;
        let (lo, hi) = (self.grid.lo(), self.grid.hi());
        let tol = self.cfg.level_tol * (hi - lo);
        let l = level_inf(|u| self.g_lower(&plan, u), e, lo, hi, tol);
        let h = level_sup(|u| self.g_upper(&plan, u), e, lo, hi, tol);
        Ok((l, h))
    }

    /// Upper and lower transports `T_{x',x}` tabulated on the grid.
    pub(crate) fn transports(
        &self,
        xp: f64,
        x: f64,
        upper: &[Rule],
        lower: &[Rule],
    ) -> Result<(MonotoneMap, MonotoneMap)> {
        let fp = self.families_at(xp)?;
        let fx = self.families_at(x)?;
        let tol = self.model.comparison_tol();
        let ut = pair_terms(&fp.orbit, &fx.orbit, upper, tol);
        let lt = pair_terms(&fp.orbit, &fx.orbit, lower, tol);
        let plan = AnchorPlan { fam: fx, upper: Vec::new(), lower: Vec::new() };
        let (lo, hi) = (self.grid.lo(), self.grid.hi());
        let up = MonotoneMap::from_fn(self.grid, |y| {
            eval_terms(&fp, &ut, &self.inner_values(&plan, y), Side::Right, hi)
        });
        let dn = MonotoneMap::from_fn(self.grid, |y| {
            eval_terms(&fp, &lt, &self.inner_values(&plan, y), Side::Left, lo)
        });
        Ok((up, dn))
    }
}

fn families<M: CondModel + ?Sized>(model: &M, x: f64, grid: YGrid, needs: Needs) -> Result<Families> {
    let o = orbit(model, x)?;
    let build = |k| Some(transport_family(model, &o, k, grid));
    Ok(Families {
        tilde: if needs.tilde { build(StepKind::Tilde) } else { None },
        hat: if needs.general { build(StepKind::Hat) } else { None },
        check: if needs.general { build(StepKind::Check) } else { None },
        orbit: o,
    })
}

/// Terms of the given rules for node orbit `op` (`x'`) and anchor orbit `ox` (`x`).
fn pair_terms(op: &PiOrbit, ox: &PiOrbit, rules: &[Rule], tol: f64) -> Vec<Term> {
    let ip = |n: i32| (n - op.min_n) as u32;
    let ix = |n: i32| (n - ox.min_n) as u32;
    let mut out = Vec::new();
    for &rule in rules {
        match rule {
            Rule::MonoUpper | Rule::GenUpper => {
                let (of, inf) = if rule == Rule::MonoUpper { (Fam::Tilde, Fam::Tilde) } else { (Fam::Hat, Fam::Check) };
                for (n, m) in m_pairs(op, ox, tol) {
                    out.push(Term {
                        form: Form::Plain,
                        outer_fam: of,
                        outer: ip(n),
                        outer_prev: 0,
                        inner_fam: inf,
                        inner: ix(m),
                        inner_prev: 0,
                        t: 1.0,
                    });
                }
            }
            Rule::MonoLower | Rule::GenLower => {
                let (of, inf) = if rule == Rule::MonoLower { (Fam::Tilde, Fam::Tilde) } else { (Fam::Check, Fam::Hat) };
                for (n, m) in m_pairs(ox, op, tol) {
                    out.push(Term {
                        form: Form::Plain,
                        outer_fam: of,
                        outer: ip(m),
                        outer_prev: 0,
                        inner_fam: inf,
                        inner: ix(n),
                        inner_prev: 0,
                        t: 1.0,
                    });
                }
            }
            Rule::ConcUpper => {
                for ((n, m), t) in c_pairs(op, ox, tol) {
                    out.push(Term {
                        form: Form::OuterMix,
                        outer_fam: Fam::Tilde,
                        outer: ip(n),
                        outer_prev: ip(n - 1),
                        inner_fam: Fam::Tilde,
                        inner: ix(m),
                        inner_prev: 0,
                        t,
                    });
                }
            }
            Rule::ConcLower => {
                for ((n, m), t) in c_pairs(ox, op, tol) {
                    out.push(Term {
                        form: Form::InnerMix,
                        outer_fam: Fam::Tilde,
                        outer: ip(m),
                        outer_prev: 0,
                        inner_fam: Fam::Tilde,
                        inner: ix(n),
                        inner_prev: ix(n - 1),
                        t,
                    });
                }
            }
        }
    }
    out
}

/// Min (right side) or max (left side) over terms; `empty` if there are none.
#[inline]
fn eval_terms(node: &Families, terms: &[Term], iv: &InnerValues, side: Side, empty: f64) -> f64 {
    let mut best = empty;
    let mut first = true;
    for term in terms {
        let inner = iv.get(term.inner_fam);
        let v = match term.form {
            Form::InnerMix => {
                term.t * inner[term.inner as usize] + (1.0 - term.t) * inner[term.inner_prev as usize]
            }
            _ => inner[term.inner as usize],
        };
        let a = node.map(term.outer_fam, term.outer);
        let val = match term.form {
            Form::OuterMix => {
                let b = node.map(term.outer_fam, term.outer_prev);
                MonotoneMap::combination_inverse_at(term.t, a, b, v, side)
            }
            _ => a.inverse_at(v, side),
        };
        if first {
            best = val;
            first = false;
        } else if side == Side::Right {
            best = best.min(val);
        } else {
            best = best.max(val);
        }
    }
    best
}

/// `inf{u ∈ [lo, hi] : G(u) ≥ e}` for nondecreasing `G`, capped at `hi`.
///
/// Returns the midpoint of the final bracket.
pub(crate) fn level_inf(g: impl Fn(f64) -> f64, e: f64, lo: f64, hi: f64, tol: f64) -> f64 {
    if g(lo) >= e {
        return lo;
    }
    if g(hi) < e {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if g(mid) >= e {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// `sup{u ∈ [lo, hi] : G(u) ≤ e}` for nondecreasing `G`, floored at `lo`.
pub(crate) fn level_sup(g: impl Fn(f64) -> f64, e: f64, lo: f64, hi: f64, tol: f64) -> f64 {
    if g(hi) <= e {
        return hi;
    }
    if g(lo) > e {
        return lo;
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if g(mid) <= e {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_search_on_a_step() {
        let g = |u: f64| if u >= 0.3 { 1.0 } else { 0.0 };
        let l = level_inf(g, 0.5, 0.0, 1.0, 1e-9);
        let h = level_sup(g, 0.5, 0.0, 1.0, 1e-9);
        assert!((l - 0.3).abs() < 1e-9 && (h - 0.3).abs() < 1e-9);
        assert_eq!(level_inf(|u| u, 0.0, 0.0, 1.0, 1e-9), 0.0);
        assert_eq!(level_sup(|u| u, 1.0, 0.0, 1.0, 1e-9), 1.0);
        assert_eq!(level_inf(|_| 0.2, 0.5, 0.0, 1.0, 1e-9), 1.0);
        // A flat section at the level: inf and sup bracket it.
        let flat = |u: f64| (u * 2.0).min(0.5).max(u * 2.0 - 0.5);
        assert!((level_inf(flat, 0.5, 0.0, 1.0, 1e-9) - 0.25).abs() < 1e-8);
        assert!((level_sup(flat, 0.5, 0.0, 1.0, 1e-9) - 0.5).abs() < 1e-8);
    }
}
