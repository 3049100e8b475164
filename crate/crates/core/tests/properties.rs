use bound_id::bounds::{concave_lower, concave_upper, running_max, running_min, t_m};
use bound_id::dist::{EmpiricalModel, OutcomeLaw, OutcomeMode};
use bound_id::*;
use proptest::prelude::*;
use std::sync::OnceLock;

fn power_exp() -> &'static AnalyticModel {
    static M: OnceLock<AnalyticModel> = OnceLock::new();
    M.get_or_init(|| make_analytic(&DgpSpec::power_exp()).unwrap())
}

fn binary() -> &'static AnalyticModel {
    static M: OnceLock<AnalyticModel> = OnceLock::new();
    M.get_or_init(|| make_analytic(&DgpSpec::default_for("binary_logit").unwrap()).unwrap())
}

fn fitted(discrete: bool) -> &'static EmpiricalModel {
    static C: OnceLock<EmpiricalModel> = OnceLock::new();
    static D: OnceLock<EmpiricalModel> = OnceLock::new();
    let (cell, family, outcome) = if discrete {
        (&D, "binary_logit", OutcomeMode::Discrete)
    } else {
        (&C, "power_exp", OutcomeMode::Continuous)
    };
    cell.get_or_init(|| {
        let data = sample(&DgpSpec::default_for(family).unwrap(), 20_000, 99);
        fit_empirical(&data, &FitConfig { outcome, ..FitConfig::default() }).unwrap()
    })
}

/// Nondecreasing values on `[0, 1]`, with ties more likely than chance.
fn monotone_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..0.2f64], 2..40).prop_map(|inc| {
        let total: f64 = inc.iter().sum::<f64>().max(1e-9);
        let mut acc = 0.0;
        inc.iter().map(|d| {
            acc += d / total;
            acc.min(1.0)
        })
        .collect()
    })
}

fn strictly_increasing() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01..1.0f64, 2..14).prop_map(|gaps| {
        let mut acc = 0.0;
        gaps.iter().map(|g| {
            acc += g;
            acc
        })
        .collect()
    })
}

fn in_x_support(m: &AnalyticModel, u: f64) -> f64 {
    let s = dist::joint_x_support(m);
    s.lo + s.width() * (0.005 + 0.99 * u)
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maps_preserve_order(values in monotone_values(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let grid = YGrid::new(0.0, 1.0, values.len()).unwrap();
        let map = MonotoneMap::from_values(grid, values);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(map.evaluate(lo) <= map.evaluate(hi));
        for side in [Side::Left, Side::Right] {
            prop_assert!(map.inverse_at(lo, side) <= map.inverse_at(hi, side));
        }
    }

    #[test]
    fn inverse_sandwich(values in monotone_values(), y in 0.0..1.0f64) {
        let grid = YGrid::new(0.0, 1.0, values.len()).unwrap();
        let map = MonotoneMap::from_values(grid, values);
        let v = map.evaluate(y);
        let eps = 1e-12;
        prop_assert!(map.inverse_at(v, Side::Left) <= y + eps);
        prop_assert!(y <= map.inverse_at(v, Side::Right) + eps);
        prop_assert!(map.invert(Side::Left).evaluate(v) <= y + eps);
        prop_assert!(y <= map.invert(Side::Right).evaluate(v) + eps);
    }

    #[test]
    fn compositions_stay_monotone(a in monotone_values(), b in monotone_values()) {
        let ga = YGrid::new(0.0, 1.0, a.len()).unwrap();
        let gb = YGrid::new(0.0, 1.0, b.len()).unwrap();
        let c = MonotoneMap::from_values(ga, a).compose(&MonotoneMap::from_values(gb, b));
        prop_assert!(c.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn running_envelopes_are_monotone(v in prop::collection::vec(-5.0..5.0f64, 1..50)) {
        let hi = running_max(&v);
        let lo = running_min(&v);
        prop_assert!(hi.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(lo.windows(2).all(|w| w[0] <= w[1]));
        for i in 0..v.len() {
            prop_assert!(hi[i] >= v[i] && lo[i] <= v[i]);
        }
    }

    #[test]
    fn concave_lower_is_the_best_chord(x in strictly_increasing(), seed in prop::collection::vec(-3.0..3.0f64, 14)) {
        let l: Vec<f64> = seed[..x.len()].to_vec();
        let got = concave_lower(&x, &l);
        for j in 0..x.len() {
            let mut best = l[j];
            for i in 0..j {
                for k in j + 1..x.len() {
                    let t = (x[j] - x[i]) / (x[k] - x[i]);
                    best = best.max((1.0 - t) * l[i] + t * l[k]);
                }
            }
            prop_assert!(approx_eq(got[j], best), "j={} got {} want {}", j, got[j], best);
        }
    }

    #[test]
    fn concave_upper_is_the_best_extrapolation(
        x in strictly_increasing(),
        up in prop::collection::vec(0.0..3.0f64, 14),
        gap in prop::collection::vec(0.0..1.0f64, 14),
    ) {
        let n = x.len();
        let u: Vec<f64> = up[..n].to_vec();
        let b: Vec<f64> = (0..n).map(|i| u[i] - gap[i]).collect();
        let got = concave_upper(&x, &u, &b);
        for j in 0..n {
            let mut best = u[j];
            for i in 0..n {
                for k in 0..n {
                    let line = u[i] + (x[j] - x[i]) * (b[k] - u[i]) / (x[k] - x[i]);
                    if (j < i && i < k) || (k < i && i < j) {
                        best = best.min(line);
                    }
                }
            }
            prop_assert!(approx_eq(got[j], best), "j={} got {} want {}", j, got[j], best);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hat_lies_below_check(u in 0.0..1.0f64, n in prop_oneof![Just(-1), Just(1), Just(2)], y in 0.0..1.0f64) {
        let m = binary();
        let (lo, hi) = m.y_range();
        let grid = YGrid::new(lo, hi, m.default_y_grid()).unwrap();
        let x = in_x_support(m, u);
        match t_hat_check(m, x, n, grid) {
            Ok((hat, check)) => {
                for v in [y, lo, hi, 0.5] {
                    prop_assert!(hat.evaluate(v) <= check.evaluate(v) + 1e-12);
                }
            }
            Err(Error::OrbitRange { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn monotone_transports_are_ordered(a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let m = power_exp();
        let (xp, x) = (in_x_support(m, a), in_x_support(m, b));
        let (up, lo) = t_m(m, xp, x, &BoundsConfig::default()).unwrap();
        // Ordering holds at structural values; outcomes whose transports
        // leave the outcome window are clamped and carry no information.
        let spec = DgpSpec::power_exp();
        for i in 0..=64 {
            let e = 0.001 + 0.998 * i as f64 / 64.0;
            let y = true_g(&spec, x, e);
            prop_assert!(lo.evaluate(y) <= up.evaluate(y) + 1e-9 * y.max(1.0), "e={}", e);
        }
        prop_assert!(up.values().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(lo.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn index_set_members_satisfy_their_inequalities(
        a in 0.0..1.0f64,
        b in 0.0..1.0f64,
        c in 0.15..0.9f64,
    ) {
        let m = make_analytic(&DgpSpec { c, ..DgpSpec::power_exp() }).unwrap();
        let (xp, x) = (in_x_support(&m, a), in_x_support(&m, b));
        let op = orbit(&m, xp).unwrap();
        let ox = orbit(&m, x).unwrap();
        let tol = 1e-12;
        let le = |p: f64, q: f64| p <= q + tol * p.abs().max(q.abs()).max(1.0);
        let ms = pi_set(&m, xp, x, PiSetKind::M).unwrap();
        prop_assert!(!ms.pairs.is_empty() && ms.pairs.len() <= op.len() * ox.len());
        for &(n, k) in &ms.pairs {
            prop_assert!(le(op.get(n).unwrap(), ox.get(k).unwrap()));
        }
        let cs = pi_set(&m, xp, x, PiSetKind::C).unwrap();
        for (&(n, k), &w) in cs.pairs.iter().zip(cs.weights.as_ref().unwrap()) {
            prop_assert!(ms.pairs.contains(&(n, k)));
            prop_assert!(le(ox.get(k).unwrap(), op.get(n - 1).unwrap()));
            prop_assert!((0.0..=1.0).contains(&w));
        }
    }

    #[test]
    fn empirical_laws_are_ordered_and_galois(u in 0.0..1.0f64, tau in 0.001..0.999f64, discrete in any::<bool>()) {
        let m = fitted(discrete);
        let arm = if u < 0.5 { Arm::Z0 } else { Arm::Z1 };
        let s = m.x_support(arm);
        let x = s.lo + (s.hi - s.lo) * (0.02 + 0.96 * (2.0 * u).fract());
        let law = m.law(x, arm);
        let grid = m.y_grid();
        let mut prev = 0.0;
        for y in grid.nodes() {
            let (l, r) = (law.cdf(y, Side::Left), law.cdf(y, Side::Right));
            prop_assert!(l <= r && prev <= l + 1e-12);
            prop_assert!(law.quantile(r, Side::Right) <= y + 1e-9);
            prop_assert!(y <= law.quantile(l, Side::Left) + 1e-9);
            prev = r;
        }
        let eps = 1e-9;
        let qinf = law.quantile(tau, Side::Right);
        prop_assert!(law.cdf(qinf, Side::Right) >= tau - eps);
        let below = qinf - grid.step() * 1e-3;
        if below >= grid.lo() {
            prop_assert!(law.cdf(below, Side::Right) <= tau + eps);
        }
        let qsup = law.quantile(tau, Side::Left);
        prop_assert!(qinf <= qsup + eps);
        prop_assert!(law.cdf(qsup, Side::Left) <= tau + eps);
        let above = qsup + grid.step() * 1e-3;
        if above <= grid.hi() {
            prop_assert!(law.cdf(above, Side::Left) >= tau - eps);
        }
    }

    #[test]
    fn analytic_laws_satisfy_galois(u in 0.0..1.0f64, y in 0.0..1.0f64, fam in 0usize..2) {
        let m = if fam == 0 { binary() } else { power_exp() };
        let x = in_x_support(m, u);
        let arm = if m.x_support(Arm::Z0).contains(x) { Arm::Z0 } else { Arm::Z1 };
        let (lo, hi) = m.y_range();
        let y = lo + (hi - lo) * y;
        let law = m.law(x, arm);
        let eps = 1e-9 * hi;
        // A probability 1 − δ stores δ with relative error ulp(1)/δ, so the
        // check stops at the outcome window's own tail level.
        let (fr, fl) = (law.cdf(y, Side::Right), law.cdf(y, Side::Left));
        if fr < 1.0 - 1e-6 {
            prop_assert!(law.quantile(fr, Side::Right) <= y + eps);
        }
        if fl < 1.0 - 1e-6 {
            prop_assert!(y <= law.quantile(fl, Side::Left) + eps);
        }
        for t in [0.1, 0.5, 0.9] {
            prop_assert!(law.quantile(t, Side::Right) <= law.quantile(t, Side::Left) + eps);
        }
    }
}
