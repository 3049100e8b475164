//! Bound curves `x ↦ [lower(x), upper(x)]` for the structural quantile
//! `g(x, e)` under monotonicity (`M`), concavity (`C`), both (`MC`), and
//! weak monotonicity with discrete or censored outcomes (`G`).
//!
//! Each method runs in two stages. Stage one inverts, at every x-grid
//! point, the mixtures built from the transport bounds at level `e`.
//! Stage two tightens the stage-one values across the grid with the
//! shape restriction's envelope.

mod concave;
mod engine;
mod envelope;
mod general;
mod monotone;

pub use concave::{bounds_c, bounds_mc, t_c};
pub use engine::BoundsEngine;
pub use envelope::{concave_lower, concave_upper, running_max, running_min};
pub use general::{bounds_g, t_g};
pub use monotone::{bounds_m, g_mix, t_m, Mix};

use crate::dist::{joint_x_support, CondModel, Provenance};
use crate::error::{Error, Result};
use crate::exec::{self, ExecPolicy};
use crate::grid::midpoint_grid;
use crate::SCHEMA_TAG;
use engine::{Needs, Rule};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsConfig {
    /// Outcome grid size; the model's preference when `None`.
    pub y_grid: Option<usize>,
    /// Quadrature nodes per instrument arm.
    pub quad_nodes: usize,
    /// Bisection tolerance as a fraction of the outcome range.
    pub level_tol: f64,
    /// Point-identification threshold as a fraction of the outcome range.
    pub point_id_tol: f64,
    /// Crossings up to this many outcome-grid steps are collapsed to their
    /// midpoint; larger ones are reported as assumption violations. When
    /// `None`, closed-form models allow 2 steps and fitted models collapse
    /// every crossing, since there it reflects sampling noise.
    pub crossing_steps: Option<f64>,
    pub exec: ExecPolicy,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            y_grid: None,
            quad_nodes: 256,
            level_tol: 1e-6,
            point_id_tol: 1e-3,
            crossing_steps: None,
            exec: ExecPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    M,
    C,
    MC,
    G,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::M, Method::C, Method::MC, Method::G];

    pub fn name(self) -> &'static str {
        match self {
            Method::M => "M",
            Method::C => "C",
            Method::MC => "MC",
            Method::G => "G",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Self::ALL.into_iter().find(|m| m.name().eq_ignore_ascii_case(s))
    }

    fn rules(self) -> (&'static [Rule], &'static [Rule]) {
        match self {
            Method::M => (&[Rule::MonoUpper], &[Rule::MonoLower]),
            Method::C => (&[Rule::ConcUpper], &[Rule::ConcLower]),
            Method::MC => (&[Rule::MonoUpper, Rule::ConcUpper], &[Rule::MonoLower, Rule::ConcLower]),
            Method::G => (&[Rule::GenUpper], &[Rule::GenLower]),
        }
    }

    fn needs(self) -> Needs {
        Needs { tilde: self != Method::G, general: self == Method::G }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub e: f64,
    pub method: Method,
    pub x_grid: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Stage-one values before the shape envelope.
    pub stage_lower: Vec<f64>,
    pub stage_upper: Vec<f64>,
    pub point_identified: Vec<bool>,
    /// Points where the bounds crossed and were collapsed to the midpoint.
    pub crossed: Vec<bool>,
    pub y_range: (f64, f64),
}

impl BoundCurve {
    pub fn width(&self) -> Vec<f64> {
        self.upper.iter().zip(&self.lower).map(|(u, l)| u - l).collect()
    }

    pub fn max_width(&self) -> f64 {
        self.width().into_iter().fold(0.0, f64::max)
    }

    /// Write `x,e,lower,upper,method,point_id` rows.
    pub fn write_csv<W: Write>(curves: &[BoundCurve], mut w: W) -> Result<()> {
        writeln!(w, "{SCHEMA_TAG}")?;
        writeln!(w, "x,e,lower,upper,method,point_id")?;
        for c in curves {
            for j in 0..c.x_grid.len() {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    c.x_grid[j],
                    c.e,
                    c.lower[j],
                    c.upper[j],
                    c.method,
                    u8::from(c.point_identified[j])
                )?;
            }
        }
        Ok(())
    }
}

/// One row of the bounds CSV written by [`BoundCurve::write_csv`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub x: f64,
    pub e: f64,
    pub lower: f64,
    pub upper: f64,
    pub method: Method,
    #[serde(with = "flag01")]
    pub point_id: bool,
}

mod flag01 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(serde::de::Error::custom(format!("point_id must be 0 or 1, got {v}"))),
        }
    }
}

/// Read rows written by [`BoundCurve::write_csv`], checking the schema tag.
pub fn read_bounds_csv<R: Read>(mut reader: R) -> Result<Vec<BoundRow>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    if text.lines().next() != Some(SCHEMA_TAG) {
        return Err(Error::Parse(format!("expected schema tag '{SCHEMA_TAG}'")));
    }
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Flags grid points whose bound width is at most `tol·(ȳ − y̲)`.
pub fn detect_point_id(curve: &BoundCurve, tol: f64) -> Vec<bool> {
    let scale = curve.y_range.1 - curve.y_range.0;
    curve.width().into_iter().map(|w| w <= tol * scale).collect()
}

/// `n` midpoints over the joint regressor support.
pub fn default_x_grid<M: CondModel + ?Sized>(model: &M, n: usize) -> Vec<f64> {
    let s = joint_x_support(model);
    midpoint_grid(s.lo, s.hi, n)
}

fn check_inputs<M: CondModel + ?Sized>(model: &M, e: f64, x_grid: &[f64], method: Method) -> Result<()> {
    if !(e > 0.0 && e < 1.0) {
        return Err(Error::EOutOfRange { e });
    }
    if x_grid.is_empty() {
        return Err(Error::InvalidGrid("empty x-grid".into()));
    }
    if x_grid.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::InvalidGrid("x-grid must be strictly increasing".into()));
    }
    let s0 = model.x_support(crate::dist::Arm::Z0);
    let s1 = model.x_support(crate::dist::Arm::Z1);
    if let Some(&x) = x_grid.iter().find(|&&x| !(s0.contains(x) || s1.contains(x))) {
        return Err(Error::XOutOfSupport { x, arm: if x <= s1.lo { 1 } else { 0 } });
    }
    if method != Method::G && model.has_outcome_atoms() {
        return Err(Error::RequiresContinuousOutcome);
    }
    Ok(())
}

impl<'m, M: CondModel + ?Sized> BoundsEngine<'m, M> {
    /// Engine with the transport families every method in `methods` needs.
    pub fn for_methods(model: &'m M, cfg: &BoundsConfig, methods: &[Method]) -> Result<Self> {
        let needs = methods.iter().fold(Needs { tilde: false, general: false }, |a, m| {
            let b = m.needs();
            Needs { tilde: a.tilde || b.tilde, general: a.general || b.general }
        });
        Self::new(model, cfg, needs)
    }

    /// Bound curve for one method on a strictly increasing x-grid.
    pub fn curve(&self, e: f64, x_grid: &[f64], method: Method) -> Result<BoundCurve> {
        check_inputs(self.model(), e, x_grid, method)?;
        let (upper_rules, lower_rules) = method.rules();
        let stages = exec::try_map_indexed(self.config().exec, x_grid.len(), |j| {
            self.stage(x_grid[j], e, upper_rules, lower_rules)
        })?;
        let (sl, su): (Vec<f64>, Vec<f64>) = stages.into_iter().unzip();
        let (mut lower, mut upper) = match method {
            Method::M | Method::G => (running_max(&sl), running_min(&su)),
            Method::C => {
                let bl = concave_lower(x_grid, &sl);
                let bu = concave_upper(x_grid, &su, &bl);
                (bl, bu)
            }
            Method::MC => {
                let (ml, mu) = (running_max(&sl), running_min(&su));
                let cl = concave_lower(x_grid, &sl);
                let cu = concave_upper(x_grid, &su, &cl);
                (
                    ml.iter().zip(&cl).map(|(a, b)| a.max(*b)).collect(),
                    mu.iter().zip(&cu).map(|(a, b)| a.min(*b)).collect(),
                )
            }
        };
        let (ylo, yhi) = (self.grid().lo(), self.grid().hi());
        let steps = self.config().crossing_steps.unwrap_or(match self.model().provenance() {
            Provenance::Analytic { .. } => 2.0,
            Provenance::Empirical { .. } => f64::INFINITY,
        });
        let slack = steps * self.grid().step();
        let mut crossed = vec![false; x_grid.len()];
        for j in 0..x_grid.len() {
            lower[j] = lower[j].max(ylo);
            upper[j] = upper[j].min(yhi);
            if lower[j] > upper[j] {
                if lower[j] - upper[j] > slack {
                    return Err(Error::BoundsCrossed { x: x_grid[j], lower: lower[j], upper: upper[j] });
                }
                let mid = 0.5 * (lower[j] + upper[j]);
                lower[j] = mid;
                upper[j] = mid;
                crossed[j] = true;
            }
        }
        let mut curve = BoundCurve {
            e,
            method,
            x_grid: x_grid.to_vec(),
            lower,
            upper,
            stage_lower: sl,
            stage_upper: su,
            point_identified: Vec::new(),
            crossed,
            y_range: (ylo, yhi),
        };
        curve.point_identified = detect_point_id(&curve, self.config().point_id_tol);
        Ok(curve)
    }
}

pub(crate) fn one_curve<M: CondModel + ?Sized>(
    model: &M,
    e: f64,
    x_grid: &[f64],
    cfg: &BoundsConfig,
    method: Method,
) -> Result<BoundCurve> {
    check_inputs(model, e, x_grid, method)?;
    BoundsEngine::for_methods(model, cfg, &[method])?.curve(e, x_grid, method)
}
