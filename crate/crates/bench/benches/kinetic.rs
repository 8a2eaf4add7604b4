use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use repop_bench::{domain_1d, domain_2d, gaussian, unit_rate, unit_tophat, wavy};
use repop_core::{
    solve, solve_picard, Convolver, KineticConfig, Method, PicardOptions, RhsVariant, ScalarField,
};

fn bench_convolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("convolve");
    for cells in [128usize, 512] {
        let dom = domain_1d(cells);
        let conv = Convolver::new(&dom, &unit_tophat()).unwrap();
        let rho = wavy(dom);
        group.bench_with_input(BenchmarkId::new("fft_1d", cells), &cells, |b, _| {
            b.iter(|| conv.apply(black_box(&rho)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("direct_1d", cells), &cells, |b, _| {
            b.iter(|| conv.apply_direct(black_box(&rho)).unwrap())
        });
    }
    let dom = domain_2d(64);
    let conv = Convolver::new(&dom, &gaussian()).unwrap();
    let rho = wavy(dom);
    group.bench_function("fft_2d_64x64", |b| {
        b.iter(|| conv.apply(black_box(&rho)).unwrap())
    });
    group.finish();
}

fn bench_solvers(c: &mut Criterion) {
    let dom = domain_1d(128);
    let cfg = KineticConfig {
        domain: dom,
        potential: unit_tophat(),
        rate: unit_rate(),
        initial: ScalarField::zeros(dom),
        dt: 0.01,
        t_end: 1.0,
        method: Method::Rk4,
        rhs_variant: RhsVariant::Kinetic,
        snapshot_times: Some(vec![1.0]),
    };
    c.bench_function("rk4_100_steps_128_cells", |b| {
        b.iter(|| solve(black_box(&cfg)).unwrap())
    });
    let picard_cfg = KineticConfig {
        t_end: 0.9,
        snapshot_times: Some(vec![0.9]),
        ..cfg.clone()
    };
    c.bench_function("picard_segment_128_cells", |b| {
        b.iter(|| {
            solve_picard(
                black_box(&picard_cfg),
                PicardOptions {
                    segment_t: Some(0.9),
                    ..Default::default()
                },
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, bench_convolve, bench_solvers);
criterion_main!(benches);
