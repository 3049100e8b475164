use bound_id::bounds::{default_x_grid, BoundsEngine};
use bound_id::{make_analytic, BoundsConfig, DgpSpec, ExecPolicy, Method};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn policies(c: &mut Criterion) {
    let model = make_analytic(&DgpSpec::power_exp()).unwrap();
    let xs = default_x_grid(&model, 100);
    let mut group = c.benchmark_group("bounds");
    group.sample_size(10);
    for method in [Method::M, Method::C] {
        for exec in [ExecPolicy::Sequential, ExecPolicy::Parallel] {
            let cfg = BoundsConfig { exec, ..BoundsConfig::default() };
            let engine = BoundsEngine::for_methods(&model, &cfg, &[method]).unwrap();
            group.bench_with_input(BenchmarkId::new(method.name(), format!("{exec:?}")), &xs, |b, xs| {
                b.iter(|| engine.curve(black_box(0.5), xs, method).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, policies);
criterion_main!(benches);
