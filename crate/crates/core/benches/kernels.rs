use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use prismstrat::closedform::{conjecture_residual, verify_commutative};
use prismstrat::coefficients::{qf, FieldDesc};
use prismstrat::cosimplicial::CosimpCtx;
use prismstrat::rings::Trunc;
use prismstrat::stratification::{cocycle_report, Seeds};

fn setup() -> (CosimpCtx, Seeds) {
    let f = FieldDesc::from_ints(3, &[-3, 0, 1]).unwrap();
    let ctx = CosimpCtx::new(&f, Trunc::new(4, 6).unwrap()).unwrap();
    let seeds = Seeds::scalars(
        &f,
        [qf(-1, 2), qf(2, 3), qf(5, 7), qf(-3, 4)].into_iter().map(|x| f.from_q(x)).collect(),
    )
    .unwrap();
    (ctx, seeds)
}

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("1-thread", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("default", rayon::ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn kernels(c: &mut Criterion) {
    let (ctx, seeds) = setup();
    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_with_input(BenchmarkId::new("cocycle_residual", name), &pool, |b, pool| {
            b.iter(|| pool.install(|| cocycle_report(&seeds, &ctx).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("verify_commutative", name), &pool, |b, pool| {
            b.iter(|| pool.install(|| verify_commutative(&seeds, &ctx, 3, 10).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("conjecture_residual", name), &pool, |b, pool| {
            b.iter(|| pool.install(|| conjecture_residual(&seeds, &ctx, 3).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
