use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use lctk_core::algebra::{parse_tf, rational, Binding};
use lctk_core::exec::Execution;
use lctk_core::laplace::{laplace_numeric, TimeExpr};
use lctk_core::margins::{bode_sweep, SweepRange};
use lctk_core::ufss::{ufss_pitch_tf, UfssParams};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bode(c: &mut Criterion) {
    let tf = ufss_pitch_tf(&UfssParams::numeric(rational::int(2), rational::int(3)));
    let range = SweepRange::new(1e-3, 1e3, 2000).unwrap();
    let b = Binding::default();
    let mut group = c.benchmark_group("bode_sweep_12k_points");
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |bench| {
            bench.iter(|| bode_sweep(black_box(&tf), &b, &range, exec).unwrap())
        });
    }
    group.finish();
}

fn quadrature_batch(c: &mut Criterion) {
    let exprs: Vec<TimeExpr> = [
        "(sin 3)",
        "(expmul -1 (pow 2))",
        "(shift 1 (cos 2))",
        "(modcos 2 (exp -1))",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect();
    let jobs: Vec<(usize, Complex64)> = (0..exprs.len())
        .flat_map(|i| (0..8).map(move |k| (i, Complex64::new(2.0 + k as f64 * 0.5, k as f64 - 4.0))))
        .collect();
    let mut group = c.benchmark_group("laplace_numeric_batch");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |bench| {
            bench.iter(|| exec.map(&jobs, |&(i, s)| laplace_numeric(&exprs[i], s, 1e-6).unwrap()))
        });
    }
    group.finish();
}

fn closed_loop(c: &mut Criterion) {
    let g = parse_tf("10/(s*(s + 1)*(s + 5))").unwrap();
    let range = SweepRange::new(1e-2, 1e2, 5000).unwrap();
    let b = Binding::default();
    let mut group = c.benchmark_group("margin_sweep");
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |bench| {
            bench.iter(|| {
                lctk_core::margins::margin_report(&g, &lctk_core::algebra::TransferFunction::one(), &b, &range, exec)
                    .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bode, quadrature_batch, closed_loop);
criterion_main!(benches);
