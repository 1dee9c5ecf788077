use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use layercake::verify::{exhaustive_2x2_oracle, fairness_report};
use layercake::Protocol;
use layercake_bench::{random, shared_triples, uniform, SHAPES};

fn protocols(c: &mut Criterion) {
    let mut g = c.benchmark_group("protocols");
    for (p, n, m) in SHAPES {
        let instances = random(n, m, 3, 8);
        g.bench_with_input(BenchmarkId::new(p.id(), format!("n{n}_m{m}")), &instances, |b, xs| {
            b.iter(|| {
                for inst in xs {
                    black_box(p.run(inst).unwrap());
                }
            })
        });
    }
    let triples = shared_triples(3, 8);
    g.bench_function("ef3x2/n3_m2", |b| {
        b.iter(|| {
            for inst in &triples {
                black_box(Protocol::EnvyFree3x2.run(inst).unwrap());
            }
        })
    });
    g.finish();
}

fn scaling(c: &mut Criterion) {
    let mut g = c.benchmark_group("prop_cells");
    for cells in [1usize, 4, 16] {
        let instances = random(6, 6, cells, 4);
        g.bench_with_input(BenchmarkId::from_parameter(cells), &instances, |b, xs| {
            b.iter(|| {
                for inst in xs {
                    black_box(Protocol::Prop.run(inst).unwrap());
                }
            })
        });
    }
    g.finish();
}

fn verification(c: &mut Criterion) {
    let inst = uniform(12, 12);
    let r = Protocol::Prop.run(&inst).unwrap();
    c.bench_function("fairness_report/n12_m12", |b| {
        b.iter(|| black_box(fairness_report(&inst, &r.allocation).unwrap()))
    });
    let two = random(2, 2, 4, 1).remove(0);
    c.bench_function("grid_oracle/32", |b| {
        b.iter(|| black_box(exhaustive_2x2_oracle(&two, 32).unwrap()))
    });
}

criterion_group!(benches, protocols, scaling, verification);
criterion_main!(benches);
