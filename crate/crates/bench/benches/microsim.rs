use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use repop_bench::{domain_1d, unit_rate};
use repop_core::microsim::{simulate, CellList};
use repop_core::Potential;

fn bench_simulate(c: &mut Criterion) {
    let dom = domain_1d(64);
    let rate = unit_rate();
    let pot = Potential::top_hat(1.0, 1.0).unwrap();
    let mut group = c.benchmark_group("simulate");
    for t_end in [10.0, 100.0] {
        group.bench_with_input(
            BenchmarkId::new("tophat_1d", t_end as u64),
            &t_end,
            |b, &t| b.iter(|| simulate(&dom, &rate, &pot, black_box(t), 42, 0).unwrap()),
        );
    }
    group.bench_function("free_case_t100", |b| {
        b.iter(|| simulate(&dom, &rate, &Potential::zero(), black_box(100.0), 42, 0).unwrap())
    });
    group.finish();
}

fn bench_cell_list(c: &mut Criterion) {
    let dom = domain_1d(64);
    let pot = Potential::top_hat(1.0, 1.0).unwrap();
    let mut list = CellList::new(dom, pot.range_cutoff());
    for k in 0..2000 {
        list.insert([(k as f64 * 0.005) % 10.0, 0.0]);
    }
    c.bench_function("cell_list_sum_2000_points", |b| {
        b.iter(|| list.potential_sum(&pot, black_box([5.0, 0.0])))
    });
}

criterion_group!(benches, bench_simulate, bench_cell_list);
criterion_main!(benches);
