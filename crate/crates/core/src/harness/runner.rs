//! Test execution: embedded tests, the operator suite, and phase
//! commutation checks.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::equivalence::structurally_equivalent;
use crate::interp::{ExecError, Interpreter};
use crate::ir::{IRGraph, Program};
use crate::optimizer::{run_phases, Phase};
use crate::stamp::{unrestricted, Stamp};
use crate::value::{int, Value};

use super::generate::{gen_op_tests, stamp_boundary_values};
use super::report::{DiffReport, ExpectedSource, Row, Verdict};
use super::Operator;

/// How independent test cases are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// `jobs == 0` uses every available core. Runs sequentially when the
    /// crate is built without the `parallel` feature.
    Parallel {
        jobs: usize,
    },
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel { jobs: 0 }
        } else {
            Execution::Sequential
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub execution: Execution,
    /// Shuffles execution order. Reports are sorted, so the seed never
    /// changes the output.
    pub seed: Option<u64>,
}

impl RunOptions {
    pub fn sequential() -> Self {
        RunOptions {
            execution: Execution::Sequential,
            seed: None,
        }
    }
}

/// Maps `f` over `items`, in parallel when requested and available.
pub fn par_map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel { jobs } => {
            use rayon::prelude::*;
            if jobs == 0 {
                items.par_iter().map(f).collect()
            } else {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build()
                    .expect("thread pool")
                    .install(|| items.par_iter().map(f).collect())
            }
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel { .. } => items.iter().map(f).collect(),
    }
}

fn shuffled<T>(mut items: Vec<T>, seed: Option<u64>) -> Vec<T> {
    if let Some(seed) = seed {
        items.shuffle(&mut StdRng::seed_from_u64(seed));
    }
    items
}

fn show(r: &Result<Value, ExecError>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

/// Runs every embedded test of `p` through `static_test`.
pub fn run_difftest(p: &Program) -> DiffReport {
    run_difftest_with(p, ExpectedSource::Embedded, RunOptions::default())
}

pub fn run_difftest_with(p: &Program, source: ExpectedSource, opts: RunOptions) -> DiffReport {
    let interp = Interpreter::new(p);
    let tests = shuffled(p.tests.iter().collect::<Vec<_>>(), opts.seed);
    let rows = par_map(opts.execution, &tests, |t| {
        let out = interp.static_test(&t.method, &t.args, t.expect);
        Row {
            method: t.method.clone(),
            phases: None,
            args: t.args.clone(),
            source,
            expected: t.expect.to_string(),
            actual: show(&out.actual),
            verdict: if out.pass { Verdict::Pass } else { Verdict::Fail },
        }
    });
    DiffReport::from_rows(rows)
}

/// Generated boundary-value tests for every arithmetic operator at 32 and
/// 64 bits.
pub fn run_operator_suite(opts: RunOptions) -> DiffReport {
    let programs: Vec<Program> = Operator::ARITHMETIC
        .into_iter()
        .flat_map(|op| [32, 64].map(|bits| gen_op_tests(op, bits).expect("supported width")))
        .collect();
    let inner = RunOptions {
        execution: Execution::Sequential,
        ..opts
    };
    DiffReport::merge(par_map(opts.execution, &programs, |p| {
        run_difftest_with(p, ExpectedSource::Oracle, inner)
    }))
}

fn phase_list(phases: &[Phase]) -> String {
    phases.iter().map(|p| p.name()).collect::<Vec<_>>().join(",")
}

/// Parameter assignments covering the boundary values of every parameter's
/// stamp, as a cross product.
pub fn boundary_assignments(g: &IRGraph) -> Vec<Vec<Value>> {
    let mut out: Vec<Vec<Value>> = vec![Vec::new()];
    for i in 0..g.parameter_count() {
        let s = match g.parameter_stamp(i) {
            Some(Stamp::Integer(s)) => s,
            _ => unrestricted(32),
        };
        let vals: Vec<Value> = stamp_boundary_values(s).into_iter().map(|v| int(s.bits(), v)).collect();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(*v);
                    p
                })
            })
            .collect();
    }
    out
}

fn same_outcome(before: &Result<Value, ExecError>, after: &Result<Value, ExecError>) -> Verdict {
    match (before, after) {
        (Ok(a), Ok(b)) if a == b => Verdict::Pass,
        (Err(a), Err(b)) if a.class() == "step-limit" && b.class() == "step-limit" => Verdict::Skip,
        (Err(a), Err(b)) if a.class() == b.class() && a.class() != "error" => Verdict::Pass,
        _ => Verdict::Fail,
    }
}

/// Checks that optimizing with `phases` commutes with execution: stored
/// golden graphs must match the optimizer's output, and every method must
/// compute the same results before and after optimization on its embedded
/// test inputs and on all boundary-value parameter assignments.
pub fn run_commutation_test(p: &Program, phases: &[Phase], opts: RunOptions) -> DiffReport {
    let label = phase_list(phases);
    let mut rows = Vec::new();
    let mut optimized = p.clone();
    for (name, g) in &p.methods {
        match run_phases(g, phases) {
            Ok(out) => {
                optimized.methods.insert(name.clone(), out);
            }
            Err(e) => rows.push(Row {
                method: name.clone(),
                phases: Some(label.clone()),
                args: Vec::new(),
                source: ExpectedSource::PreOptimization,
                expected: "well-formed graph".into(),
                actual: e.to_string(),
                verdict: Verdict::Fail,
            }),
        }
    }
    for gd in p.goldens.iter().filter(|gd| gd.phases == phases) {
        let (expected, actual, verdict) = match optimized.method(&gd.method) {
            Some(out) => {
                let r = structurally_equivalent(out, &gd.graph);
                match r.first_difference {
                    None => ("equivalent to golden".into(), "equivalent".into(), Verdict::Pass),
                    Some(d) => ("equivalent to golden".into(), d.to_string(), Verdict::Fail),
                }
            }
            None => ("equivalent to golden".into(), "no such method".into(), Verdict::Fail),
        };
        rows.push(Row {
            method: gd.method.clone(),
            phases: Some(label.clone()),
            args: Vec::new(),
            source: ExpectedSource::Golden,
            expected,
            actual,
            verdict,
        });
    }

    let mut inputs: Vec<(String, Vec<Value>)> = Vec::new();
    for (name, g) in &p.methods {
        let mut seen = std::collections::BTreeSet::new();
        for args in p.tests_for(name).map(|t| t.args.clone()).chain(boundary_assignments(g)) {
            if seen.insert(args.clone()) {
                inputs.push((name.clone(), args));
            }
        }
    }
    let inputs = shuffled(inputs, opts.seed);
    let (before, after) = (Interpreter::new(p), Interpreter::new(&optimized));
    rows.extend(par_map(opts.execution, &inputs, |(method, args)| {
        let b = before.run(method, args);
        let a = after.run(method, args);
        Row {
            method: method.clone(),
            phases: Some(label.clone()),
            args: args.clone(),
            source: ExpectedSource::PreOptimization,
            expected: show(&b),
            actual: show(&a),
            verdict: same_outcome(&b, &a),
        }
    }));
    DiffReport::from_rows(rows)
}
