//! Closed-form data generating processes.
//!
//! Every family shares the first stage `X = d + c(1 − Z) + η` with
//! `η ~ U(0, 1)`, and a Gaussian copula with correlation `ρ` between the
//! latent normals behind `η` and the outcome rank `ε`. With
//! `U = Φ⁻¹(ε)` and `V = Φ⁻¹(η)`, `U | V = v ~ N(ρv, 1 − ρ²)`.

use crate::error::{Error, Result};
use crate::normal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `g(x, e) = x^{1/3} exp(α + β Φ⁻¹(e))`.
    PowerExp { alpha: f64, beta: f64 },
    /// `g(x, e) = e`.
    Flat,
    /// `g(x, e) = (a0 + b0 e) + (a1 + b1 e) x`.
    LinearQr { a0: f64, b0: f64, a1: f64, b1: f64 },
    /// `g(x, e) = 1{e > Λ(x)}` with `Λ(x) = 1 / (1 + exp(β0 + β1 x))`.
    BinaryLogit { beta0: f64, beta1: f64 },
    /// `g(x, e) = max(0, x^{1/3} exp(α + β Φ⁻¹(e)) − κ)`.
    Censored { alpha: f64, beta: f64, kappa: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::PowerExp { .. } => "power_exp",
            Family::Flat => "flat",
            Family::LinearQr { .. } => "linear_qr",
            Family::BinaryLogit { .. } => "binary_logit",
            Family::Censored { .. } => "censored",
        }
    }

    pub fn has_atoms(&self) -> bool {
        matches!(self, Family::BinaryLogit { .. } | Family::Censored { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub family: Family,
    pub c: f64,
    pub d: f64,
    pub rho: f64,
    /// `P(Z = 1)`.
    pub p: f64,
    /// Upper outcome window for unbounded families ends at `g(x̄, 1 − tail)`.
    pub tail: f64,
}

/// Flat key/value form of a [`DgpSpec`]; absent keys take family defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    pub family: Option<String>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub kappa: Option<f64>,
    pub a0: Option<f64>,
    pub b0: Option<f64>,
    pub a1: Option<f64>,
    pub b1: Option<f64>,
    pub beta0: Option<f64>,
    pub beta1: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub rho: Option<f64>,
    pub p: Option<f64>,
    pub tail: Option<f64>,
}

impl DgpConfig {
    pub fn into_spec(self) -> Result<DgpSpec> {
        let family_name = self.family.as_deref().unwrap_or("power_exp");
        let family = match family_name {
            "power_exp" => Family::PowerExp {
                alpha: self.alpha.unwrap_or(0.5),
                beta: self.beta.unwrap_or(0.5),
            },
            "flat" => Family::Flat,
            "linear_qr" => Family::LinearQr {
                a0: self.a0.unwrap_or(0.0),
                b0: self.b0.unwrap_or(1.0),
                a1: self.a1.unwrap_or(1.0),
                b1: self.b1.unwrap_or(1.0),
            },
            "binary_logit" => Family::BinaryLogit {
                beta0: self.beta0.unwrap_or(0.0),
                beta1: self.beta1.unwrap_or(1.0),
            },
            "censored" => Family::Censored {
                alpha: self.alpha.unwrap_or(0.5),
                beta: self.beta.unwrap_or(0.5),
                kappa: self.kappa.unwrap_or(1.2),
            },
            other => return Err(Error::InvalidSpec(format!("unknown family '{other}'"))),
        };
        // The binary family shifts X so that the logit's midpoint x = 0 is
        // inside the support overlap.
        let d_default = if family_name == "binary_logit" { -0.75 } else { 0.05 };
        let spec = DgpSpec {
            family,
            c: self.c.unwrap_or(0.5),
            d: self.d.unwrap_or(d_default),
            rho: self.rho.unwrap_or(0.3),
            p: self.p.unwrap_or(0.5),
            tail: self.tail.unwrap_or(1e-6),
        };
        spec.check()?;
        Ok(spec)
    }
}

impl DgpSpec {
    /// Spec with every parameter at its family default.
    pub fn default_for(family: &str) -> Result<Self> {
        DgpConfig { family: Some(family.to_string()), ..DgpConfig::default() }.into_spec()
    }

    pub fn power_exp() -> Self {
        Self::default_for("power_exp").unwrap()
    }

    pub fn to_config(&self) -> DgpConfig {
        let mut cfg = DgpConfig {
            family: Some(self.family.name().to_string()),
            c: Some(self.c),
            d: Some(self.d),
            rho: Some(self.rho),
            p: Some(self.p),
            tail: Some(self.tail),
            ..DgpConfig::default()
        };
        match self.family {
            Family::PowerExp { alpha, beta } => {
                cfg.alpha = Some(alpha);
                cfg.beta = Some(beta);
            }
            Family::Flat => {}
            Family::LinearQr { a0, b0, a1, b1 } => {
                (cfg.a0, cfg.b0, cfg.a1, cfg.b1) = (Some(a0), Some(b0), Some(a1), Some(b1));
            }
            Family::BinaryLogit { beta0, beta1 } => {
                cfg.beta0 = Some(beta0);
                cfg.beta1 = Some(beta1);
            }
            Family::Censored { alpha, beta, kappa } => {
                (cfg.alpha, cfg.beta, cfg.kappa) = (Some(alpha), Some(beta), Some(kappa));
            }
        }
        cfg
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if !(self.c.is_finite() && self.d.is_finite()) {
            return bad(format!("c={} and d={} must be finite", self.c, self.d));
        }
        if !(self.rho > -1.0 && self.rho < 1.0) {
            return bad(format!("rho={} must lie in (-1, 1)", self.rho));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return bad(format!("p={} must lie in (0, 1)", self.p));
        }
        if !(self.tail > 0.0 && self.tail < 0.5) {
            return bad(format!("tail={} must lie in (0, 0.5)", self.tail));
        }
        let (xlo, xhi) = self.x_range();
        match self.family {
            Family::PowerExp { alpha, beta } | Family::Censored { alpha, beta, .. } => {
                if !(alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
                    return bad(format!("need finite alpha and beta > 0, got {alpha}, {beta}"));
                }
                if xhi <= 0.0 {
                    return bad("power families need some positive regressor values".into());
                }
                if let Family::Censored { kappa, .. } = self.family {
                    if kappa.is_nan() || kappa < 0.0 || self.upper_quantile_level(xhi) <= kappa {
                        return bad(format!("kappa={kappa} censors the whole outcome window"));
                    }
                }
            }
            Family::Flat => {}
            Family::LinearQr { b0, b1, .. } => {
                if !(b0 + b1 * xlo > 0.0 && b0 + b1 * xhi > 0.0) {
                    return bad("linear_qr needs b0 + b1·x > 0 on the regressor support".into());
                }
            }
            Family::BinaryLogit { beta0, beta1 } => {
                if !(beta0.is_finite() && beta1.is_finite()) {
                    return bad("logit coefficients must be finite".into());
                }
            }
        }
        Ok(())
    }

    /// Support `(lo, hi)` of `X | Z = z`.
    pub fn x_support(&self, z: u8) -> (f64, f64) {
        let lo = self.d + if z == 0 { self.c } else { 0.0 };
        (lo, lo + 1.0)
    }

    /// Closure of the union of both regressor supports.
    pub fn x_range(&self) -> (f64, f64) {
        let (a, b) = self.x_support(0);
        let (c, d) = self.x_support(1);
        (a.min(c), b.max(d))
    }

    fn upper_quantile_level(&self, x: f64) -> f64 {
        match self.family {
            Family::PowerExp { alpha, beta } | Family::Censored { alpha, beta, .. } => {
                power_part(x, alpha, beta, normal::quantile(1.0 - self.tail))
            }
            _ => f64::NAN,
        }
    }

    /// Closed outcome range used for clamping and tabulation.
    pub fn y_range(&self) -> (f64, f64) {
        let (xlo, xhi) = self.x_range();
        match self.family {
            Family::PowerExp { .. } => (0.0, self.upper_quantile_level(xhi)),
            Family::Censored { kappa, .. } => (0.0, self.upper_quantile_level(xhi) - kappa),
            Family::Flat | Family::BinaryLogit { .. } => (0.0, 1.0),
            Family::LinearQr { a0, b0, a1, b1 } => {
                let lo = (a0 + a1 * xlo).min(a0 + a1 * xhi);
                let hi = (a0 + b0 + (a1 + b1) * xlo).max(a0 + b0 + (a1 + b1) * xhi);
                (lo, hi)
            }
        }
    }

    /// Structural function in latent-normal units, `g(x, Φ(u))`.
    pub(crate) fn g_latent(&self, x: f64, u: f64) -> f64 {
        match self.family {
            Family::PowerExp { alpha, beta } => power_part(x, alpha, beta, u),
            Family::Flat => normal::cdf(u),
            Family::LinearQr { a0, b0, a1, b1 } => a0 + a1 * x + (b0 + b1 * x) * normal::cdf(u),
            Family::BinaryLogit { .. } => {
                if u > self.logit_threshold(x) {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Censored { alpha, beta, kappa } => (power_part(x, alpha, beta, u) - kappa).max(0.0),
        }
    }

    /// `Φ⁻¹(Λ(x))`: the latent cut of the binary family.
    pub(crate) fn logit_threshold(&self, x: f64) -> f64 {
        match self.family {
            Family::BinaryLogit { beta0, beta1 } => normal::quantile(1.0 / (1.0 + (beta0 + beta1 * x).exp())),
            _ => f64::NAN,
        }
    }

    /// Latent threshold `sup{u : g(x, Φ(u)) ≤ y}` (`right`) or
    /// `sup{u : g(x, Φ(u)) < y}` (`!right`).
    pub(crate) fn latent_threshold(&self, x: f64, y: f64, right: bool) -> f64 {
        let ninf = f64::NEG_INFINITY;
        match self.family {
            Family::PowerExp { alpha, beta } => {
                if y <= 0.0 {
                    ninf
                } else {
                    (y.ln() - alpha - pos(x).ln() / 3.0) / beta
                }
            }
            Family::Flat => normal::quantile(y),
            Family::LinearQr { a0, b0, a1, b1 } => normal::quantile((y - a0 - a1 * x) / (b0 + b1 * x)),
            Family::BinaryLogit { .. } => {
                let below = if right { y < 0.0 } else { y <= 0.0 };
                let above = if right { y >= 1.0 } else { y > 1.0 };
                if below {
                    ninf
                } else if above {
                    f64::INFINITY
                } else {
                    self.logit_threshold(x)
                }
            }
            Family::Censored { alpha, beta, kappa } => {
                let below = if right { y < 0.0 } else { y <= 0.0 };
                if below {
                    ninf
                } else {
                    ((y + kappa).ln() - alpha - pos(x).ln() / 3.0) / beta
                }
            }
        }
    }

    /// Latent-unit outcome quantile: `inf{y : threshold⁺(y) ≥ u}` for
    /// `right`, `sup{y : threshold⁻(y) ≤ u}` otherwise.
    pub(crate) fn latent_quantile(&self, x: f64, u: f64, right: bool) -> f64 {
        match self.family {
            Family::BinaryLogit { .. } => {
                let cut = self.logit_threshold(x);
                let one = if right { u > cut } else { u >= cut };
                if one {
                    1.0
                } else {
                    0.0
                }
            }
            _ => self.g_latent(x, u),
        }
    }
}

fn pos(x: f64) -> f64 {
    x.max(f64::MIN_POSITIVE)
}

fn power_part(x: f64, alpha: f64, beta: f64, u: f64) -> f64 {
    pos(x).cbrt() * (alpha + beta * u).exp()
}

/// The structural quantile `g(x, e)` of a DGP.
pub fn true_g(spec: &DgpSpec, x: f64, e: f64) -> f64 {
    match spec.family {
        Family::Flat => e,
        Family::LinearQr { a0, b0, a1, b1 } => a0 + b0 * e + (a1 + b1 * e) * x,
        Family::BinaryLogit { beta0, beta1 } => {
            if e > 1.0 / (1.0 + (beta0 + beta1 * x).exp()) {
                1.0
            } else {
                0.0
            }
        }
        _ => spec.g_latent(x, normal::quantile(e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_values() {
        let s = DgpSpec::power_exp();
        for (x, want) in [
            (0.8, 1.530_537_248),
            (0.3, 1.103_708_344),
            (1.3, 1.799_402_661),
            (0.6, 1.390_585_376),
            (1.0, 1.648_721_271),
        ] {
            assert!((true_g(&s, x, 0.5) - want).abs() < 1e-9, "g({x})");
        }
        let lin = DgpSpec::default_for("linear_qr").unwrap();
        assert!((true_g(&lin, 0.5, 0.25) - (0.25 + 1.25 * 0.5)).abs() < 1e-15);
        assert_eq!(lin.y_range(), (0.05, 1.0 + 2.0 * 1.55));
    }

    #[test]
    fn config_defaults_and_validation() {
        let b = DgpSpec::default_for("binary_logit").unwrap();
        assert_eq!(b.d, -0.75);
        let (lo, hi) = b.x_support(0);
        assert!(lo < 0.0 && hi > 0.0);
        let bad = DgpConfig { rho: Some(1.0), ..Default::default() };
        assert!(bad.into_spec().is_err());
        let unknown = DgpConfig { family: Some("cubic".into()), ..Default::default() };
        assert!(unknown.into_spec().is_err());
        let s = DgpSpec::power_exp();
        assert_eq!(s.to_config().into_spec().unwrap(), s);
    }

    #[test]
    fn thresholds_invert_the_structural_function() {
        for fam in ["power_exp", "flat", "linear_qr", "censored"] {
            let s = DgpSpec::default_for(fam).unwrap();
            for &e in &[0.45, 0.7, 0.9] {
                let u = normal::quantile(e);
                let y = s.g_latent(0.9, u);
                assert!((s.latent_threshold(0.9, y, true) - u).abs() < 1e-9, "{fam}");
                assert_eq!(s.latent_quantile(0.9, u, true), y);
            }
        }
    }
}
