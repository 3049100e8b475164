use bound_id::bounds::{default_x_grid, BoundsEngine};
use bound_id::dist::cdf_y;
use bound_id::*;

fn variants() -> Vec<DgpSpec> {
    let base = DgpSpec::power_exp();
    vec![
        base,
        DgpSpec { rho: -0.5, ..base },
        DgpSpec { rho: 0.7, c: 0.3, ..base },
        DgpSpec { family: Family::PowerExp { alpha: 0.0, beta: 1.0 }, ..base },
    ]
}

fn step_of<M: CondModel>(m: &M) -> f64 {
    let (lo, hi) = m.y_range();
    (hi - lo) / (m.default_y_grid() - 1) as f64
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] <= w[1])
}

#[test]
fn monotone_bounds_contain_truth_across_dgps() {
    let cfg = BoundsConfig::default();
    for spec in variants() {
        let m = make_analytic(&spec).unwrap();
        let xs = default_x_grid(&m, 60);
        let tol = 2.0 * step_of(&m);
        for e in [0.25, 0.5, 0.75] {
            let c = bounds_m(&m, e, &xs, &cfg).unwrap();
            for (j, &x) in xs.iter().enumerate() {
                let g = true_g(&spec, x, e);
                assert!(c.lower[j] <= g + tol && g <= c.upper[j] + tol, "{spec:?} x={x} e={e}");
            }
        }
    }
}

#[test]
fn envelopes_are_monotone_and_tighten_stage_values() {
    let cfg = BoundsConfig::default();
    let m = make_analytic(&DgpSpec::power_exp()).unwrap();
    let xs = default_x_grid(&m, 80);
    let eng = BoundsEngine::for_methods(&m, &cfg, &Method::ALL).unwrap();
    for e in [0.2, 0.6] {
        for method in Method::ALL {
            let c = eng.curve(e, &xs, method).unwrap();
            assert!(c.lower.iter().zip(&c.upper).all(|(l, u)| l <= u));
            assert!(c.crossed.iter().all(|&x| !x));
            for j in 0..xs.len() {
                let capped_lo = c.stage_lower[j].max(c.y_range.0);
                let capped_hi = c.stage_upper[j].min(c.y_range.1);
                assert!(c.lower[j] >= capped_lo && c.upper[j] <= capped_hi, "{method} j={j}");
                assert!(c.lower[j] >= c.y_range.0 && c.upper[j] <= c.y_range.1);
            }
            if matches!(method, Method::M | Method::MC | Method::G) {
                assert!(nondecreasing(&c.lower) && nondecreasing(&c.upper), "{method}");
            }
        }
    }
}

#[test]
fn combined_bounds_are_weakly_tighter() {
    let cfg = BoundsConfig::default();
    let m = make_analytic(&DgpSpec::power_exp()).unwrap();
    let xs = default_x_grid(&m, 80);
    let eng = BoundsEngine::for_methods(&m, &cfg, &[Method::MC]).unwrap();
    let (bm, bc, bmc) = (
        eng.curve(0.5, &xs, Method::M).unwrap(),
        eng.curve(0.5, &xs, Method::C).unwrap(),
        eng.curve(0.5, &xs, Method::MC).unwrap(),
    );
    for j in 0..xs.len() {
        assert!(bmc.lower[j] >= bm.lower[j].max(bc.lower[j]));
        assert!(bmc.upper[j] <= bm.upper[j].min(bc.upper[j]));
    }
}

#[test]
fn general_bounds_respect_caps_on_atomic_outcomes() {
    let cfg = BoundsConfig::default();
    for name in ["binary_logit", "censored"] {
        let spec = DgpSpec::default_for(name).unwrap();
        let m = make_analytic(&spec).unwrap();
        let xs = default_x_grid(&m, 40);
        for e in [0.3, 0.6, 0.9] {
            let c = bounds_g(&m, e, &xs, &cfg).unwrap();
            for (j, &x) in xs.iter().enumerate() {
                assert!(c.y_range.0 <= c.lower[j] && c.lower[j] <= c.upper[j] && c.upper[j] <= c.y_range.1);
                let g = true_g(&spec, x, e);
                let tol = 2.0 * step_of(&m);
                assert!(c.lower[j] <= g + tol && g <= c.upper[j] + tol, "{name} x={x} e={e}");
            }
        }
    }
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let m = make_analytic(&DgpSpec::power_exp()).unwrap();
    let xs = default_x_grid(&m, 48);
    let seq = BoundsConfig { exec: ExecPolicy::Sequential, ..BoundsConfig::default() };
    let par = BoundsConfig { exec: ExecPolicy::Parallel, ..BoundsConfig::default() };
    for method in Method::ALL {
        let a = BoundsEngine::for_methods(&m, &seq, &[method]).unwrap().curve(0.4, &xs, method).unwrap();
        let b = BoundsEngine::for_methods(&m, &par, &[method]).unwrap().curve(0.4, &xs, method).unwrap();
        assert_eq!(a, b, "{method}");
    }
}

#[test]
fn analytic_laws_are_valid_distributions() {
    for name in ["power_exp", "flat", "linear_qr", "censored"] {
        let m = make_analytic(&DgpSpec::default_for(name).unwrap()).unwrap();
        let (lo, hi) = m.y_range();
        for (x, arm) in [(0.3, Arm::Z1), (0.8, Arm::Z0), (0.8, Arm::Z1), (1.4, Arm::Z0)] {
            let mut prev = 0.0;
            for i in 0..=400 {
                let y = lo + (hi - lo) * i as f64 / 400.0;
                let r = cdf_y(&m, y, x, arm, Side::Right).unwrap();
                let l = cdf_y(&m, y, x, arm, Side::Left).unwrap();
                assert!(l <= r && r >= prev, "{name}");
                if name != "censored" || y > 0.0 {
                    assert!((r - l).abs() < 1e-12, "{name} y={y}");
                }
                prev = r;
            }
            assert!(cdf_y(&m, lo - 1.0, x, arm, Side::Right).unwrap() == 0.0);
            assert!(cdf_y(&m, hi, x, arm, Side::Left).unwrap() == 1.0);
        }
    }
}

#[test]
fn tilde_transports_are_surjective_and_orbits_decrease() {
    let m = make_analytic(&DgpSpec::power_exp()).unwrap();
    let (lo, hi) = m.y_range();
    let grid = YGrid::new(lo, hi, 512).unwrap();
    for x in [0.1, 0.45, 0.8, 1.2, 1.5] {
        let o = orbit(&m, x).unwrap();
        let pts: Vec<(i32, f64)> = o.entries().collect();
        assert!(pts.windows(2).all(|w| w[0].0 + 1 == w[1].0 && w[0].1 > w[1].1));
        for (n, _) in pts {
            let t = t_tilde(&m, x, n, grid).unwrap();
            assert!((t.evaluate(lo) - lo).abs() < 1e-6 * (hi - lo));
            assert!((t.evaluate(hi) - hi).abs() < 1e-6 * (hi - lo));
        }
    }
}

#[test]
fn empirical_regressor_cdf_converges() {
    let spec = DgpSpec::power_exp();
    let mut gaps = Vec::new();
    for n in [1_000, 10_000, 100_000] {
        let fm = fit_empirical(&sample(&spec, n, 17), &FitConfig::default()).unwrap();
        let mut gap: f64 = 0.0;
        for arm in [Arm::Z0, Arm::Z1] {
            let shift = spec.d + if arm == Arm::Z0 { spec.c } else { 0.0 };
            for i in 0..=500 {
                let x = shift - 0.1 + 1.2 * i as f64 / 500.0;
                gap = gap.max((fm.cdf_x(x, arm) - (x - shift).clamp(0.0, 1.0)).abs());
            }
        }
        gaps.push(gap);
    }
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

/// The per-seed sup-norm gap is noisy at these sample sizes, so the halving
/// is checked on the gap averaged over eight seeds.
#[test]
fn empirical_bounds_gap_halves() {
    let spec = DgpSpec::power_exp();
    let cfg = BoundsConfig::default();
    let m = make_analytic(&spec).unwrap();
    let xs = default_x_grid(&m, 100);
    let truth = bounds_m(&m, 0.5, &xs, &cfg).unwrap();
    let mean_gap = |n: usize| {
        let total: f64 = (1..=8u64)
            .map(|seed| {
                let fm = fit_empirical(&sample(&spec, n, seed), &FitConfig::default()).unwrap();
                let c = bounds_m(&fm, 0.5, &xs, &cfg).unwrap();
                (0..xs.len())
                    .map(|j| (c.lower[j] - truth.lower[j]).abs().max((c.upper[j] - truth.upper[j]).abs()))
                    .fold(0.0, f64::max)
            })
            .sum();
        total / 8.0
    };
    let (small, large) = (mean_gap(10_000), mean_gap(40_000));
    let ratio = large / small;
    assert!((0.35..=0.65).contains(&ratio), "mean gaps {small:.4} -> {large:.4}, ratio {ratio:.3}");
}
