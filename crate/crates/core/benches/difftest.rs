use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use seair::corpus;
use seair::harness::{run_commutation_test, run_operator_suite, stamp_soundness, Execution, RunOptions};
use seair::optimizer::Phase;

fn modes() -> Vec<(&'static str, Execution)> {
    let mut m = vec![("sequential", Execution::Sequential)];
    if cfg!(feature = "parallel") {
        m.push(("parallel", Execution::Parallel { jobs: 0 }));
    }
    m
}

fn operator_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("operator_suite");
    for (name, execution) in modes() {
        let opts = RunOptions { execution, seed: None };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_operator_suite(opts))
        });
    }
    group.finish();
}

fn soundness(c: &mut Criterion) {
    let mut group = c.benchmark_group("stamp_soundness_4bit");
    group.sample_size(10);
    for (name, execution) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| stamp_soundness(4, execution))
        });
    }
    group.finish();
}

fn commutation(c: &mut Criterion) {
    let programs: Vec<_> = corpus::all().into_iter().map(|(_, p)| p).collect();
    let phases = [Phase::CondElim, Phase::Canonicalize];
    let mut group = c.benchmark_group("corpus_commutation");
    for (name, execution) in modes() {
        let opts = RunOptions { execution, seed: None };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                programs
                    .iter()
                    .map(|p| run_commutation_test(p, &phases, opts).summary.total)
                    .sum::<usize>()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, operator_suite, soundness, commutation);
criterion_main!(benches);
