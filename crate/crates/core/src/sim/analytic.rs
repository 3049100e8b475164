use super::dgp::{DgpSpec, Family};
use crate::dist::{Arm, CondModel, OutcomeLaw, Provenance, Side, SupportInterval};
use crate::error::Result;
use crate::normal;

/// Closed-form [`CondModel`] of a [`DgpSpec`].
#[derive(Debug, Clone)]
pub struct AnalyticModel {
    spec: DgpSpec,
    s: f64,
    y_range: (f64, f64),
    /// The outcome window cuts off an unbounded upper tail.
    truncated: bool,
}

/// Build the analytic model of a DGP.
///
/// Specs with `c ≤ 0` are accepted so that assumption diagnostics can be
/// exercised on them; bound computations reject them later.
pub fn make_analytic(spec: &DgpSpec) -> Result<AnalyticModel> {
    spec.check()?;
    Ok(AnalyticModel {
        spec: *spec,
        s: (1.0 - spec.rho * spec.rho).sqrt(),
        y_range: spec.y_range(),
        truncated: matches!(spec.family, Family::PowerExp { .. } | Family::Censored { .. }),
    })
}

impl AnalyticModel {
    pub fn spec(&self) -> &DgpSpec {
        &self.spec
    }

    fn shift(&self, arm: Arm) -> f64 {
        self.spec.d + if arm == Arm::Z0 { self.spec.c } else { 0.0 }
    }
}

/// Outcome law of an analytic model at a fixed `(x, z)`.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticLaw<'a> {
    model: &'a AnalyticModel,
    x: f64,
    /// `ρ·Φ⁻¹(F_{X|Z}(x|z))`, the conditional mean of the latent outcome.
    mean: f64,
}

impl OutcomeLaw for AnalyticLaw<'_> {
    fn cdf(&self, y: f64, side: Side) -> f64 {
        // Mass beyond a truncated outcome window is placed at its top.
        if self.model.truncated && y >= self.model.y_range.1 {
            return 1.0;
        }
        let u = self.model.spec.latent_threshold(self.x, y, side == Side::Right);
        normal::cdf((u - self.mean) / self.model.s)
    }

    fn quantile(&self, tau: f64, side: Side) -> f64 {
        let (lo, hi) = self.model.y_range;
        match side {
            Side::Right if tau <= 0.0 => return lo,
            Side::Left if tau >= 1.0 => return hi,
            _ => {}
        }
        if self.model.spec.family.has_atoms() {
            // Compare against the mass at zero directly so ties at atom
            // levels follow the inf/sup conventions exactly.
            let p0 = self.cdf(0.0, Side::Right);
            let at_zero = match side {
                Side::Right => tau <= p0,
                Side::Left => tau < p0,
            };
            if at_zero {
                return 0.0f64.clamp(lo, hi);
            }
            if let Family::BinaryLogit { .. } = self.model.spec.family {
                return 1.0f64.clamp(lo, hi);
            }
        }
        let u = self.mean + self.model.s * normal::quantile(tau);
        self.model.spec.latent_quantile(self.x, u, side == Side::Right).clamp(lo, hi)
    }
}

impl CondModel for AnalyticModel {
    type Law<'a> = AnalyticLaw<'a>;

    fn x_support(&self, arm: Arm) -> SupportInterval {
        let lo = self.shift(arm);
        SupportInterval::open(lo, lo + 1.0)
    }

    fn y_range(&self) -> (f64, f64) {
        self.y_range
    }

    fn arm_prob(&self, arm: Arm) -> f64 {
        match arm {
            Arm::Z0 => 1.0 - self.spec.p,
            Arm::Z1 => self.spec.p,
        }
    }

    fn cdf_x(&self, x: f64, arm: Arm) -> f64 {
        (x - self.shift(arm)).clamp(0.0, 1.0)
    }

    fn quantile_x(&self, tau: f64, arm: Arm) -> f64 {
        self.shift(arm) + tau.clamp(0.0, 1.0)
    }

    fn law(&self, x: f64, arm: Arm) -> AnalyticLaw<'_> {
        let v = self.cdf_x(x, arm);
        let w = normal::quantile(v).clamp(-40.0, 40.0);
        AnalyticLaw { model: self, x, mean: self.spec.rho * w }
    }

    fn has_outcome_atoms(&self) -> bool {
        self.spec.family.has_atoms()
    }

    fn comparison_tol(&self) -> f64 {
        1e-12
    }

    fn default_y_grid(&self) -> usize {
        if self.has_outcome_atoms() {
            2048
        } else {
            512
        }
    }

    fn provenance(&self) -> Provenance {
        Provenance::Analytic { family: self.spec.family.name().to_string() }
    }
}
