//! Sequential vs rayon execution of the same computations.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use koszul_core::koszul::{betti_table, build_differential};
use koszul_core::resolution::{minimal_resolution, required_degree_bound};
use koszul_core::sections::projective_system;
use koszul_core::{Exec, LinAlg};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn rank(c: &mut Criterion) {
    let sys = projective_system(2, &[0], 3).unwrap();
    // δ_{5,1}: H^0(O(3)) ⊗ ∧^5 → H^0(O(6)) ⊗ ∧^4, the largest wedge block
    let m = build_differential(&sys, 5, 1).unwrap();
    let mut g = c.benchmark_group("rank P2 O(3) d_{5,1}");
    for (name, exec) in MODES {
        let la = LinAlg::default().with_exec(exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| la.rank(&m).unwrap())
        });
    }
    g.finish();
}

fn table(c: &mut Criterion) {
    let sys = projective_system(2, &[0], 3).unwrap();
    let mut g = c.benchmark_group("betti_table P2 O(3)");
    g.sample_size(10);
    for (name, exec) in MODES {
        let la = LinAlg::default().with_exec(exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| betti_table(&sys, sys.h0_l(), 0..=3, &la).unwrap())
        });
    }
    g.finish();
}

fn resolution(c: &mut Criterion) {
    let sys = projective_system(2, &[0], 2).unwrap();
    let p_max = sys.h0_l();
    let bound = required_degree_bound(&sys, p_max);
    let mut g = c.benchmark_group("minimal_resolution P2 O(2)");
    g.sample_size(10);
    for (name, exec) in MODES {
        let la = LinAlg::default().with_exec(exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| minimal_resolution(&sys, p_max, bound, &la).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, rank, table, resolution);
criterion_main!(benches);
