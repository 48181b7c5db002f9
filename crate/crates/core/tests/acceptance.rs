//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use seair::corpus;
use seair::equivalence::{permute_ids, structurally_equivalent};
use seair::harness::{
    gen_op_tests, run_commutation_test, run_difftest, run_operator_suite, stamp_soundness, Execution, Operator,
    RunOptions,
};
use seair::ir::{reachable, IRGraph, IRNode, NodeId};
use seair::optimizer::{canonicalize, conditional_elimination, Phase};
use seair::value::{int, mk_int, SUPPORTED_BITS};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn graphs() -> Vec<(String, IRGraph)> {
    corpus::all()
        .into_iter()
        .flat_map(|(f, p)| p.methods.into_iter().map(move |(m, g)| (format!("{f}/{m}"), g)))
        .collect()
}

fn operator_suite() -> Outcome {
    let mut expected_total = 0;
    for op in Operator::ARITHMETIC {
        let want = match op.arity() {
            1 => 9,
            _ if op.is_fixed() => 72,
            _ => 81,
        };
        for bits in [32, 64] {
            let n = gen_op_tests(op, bits).map_err(|e| e.to_string())?.tests.len();
            ensure(n == want, || {
                format!("{} at {bits} bits has {n} tests, expected {want}", op.name())
            })?;
            expected_total += n;
        }
    }
    let t = Instant::now();
    let report = run_operator_suite(RunOptions::default());
    let elapsed = t.elapsed();
    ensure(report.passed(), || format!("{report}"))?;
    ensure(report.summary.total == expected_total, || {
        format!("ran {} tests, expected {expected_total}", report.summary.total)
    })?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{} tests passed in {elapsed:.2?}", report.summary.total))
}

fn left_shift_tests() -> Outcome {
    let p = corpus::left_shift_program();
    ensure(p.tests.len() == 3, || format!("{} tests embedded", p.tests.len()))?;
    for (a, b, want) in [(2, 2, 8), (1, 2, 4), (0, 2, 0)] {
        let got = seair::interp::run(&p, "leftShiftNode32", &[int(32, a), int(32, b)]);
        ensure(got == Ok(int(32, want)), || {
            format!("({a}, {b}) gave {got:?}, expected {want}")
        })?;
    }
    let r = run_difftest(&p);
    ensure(r.passed() && r.summary.pass == 3, || format!("{r}"))?;
    Ok("3/3 embedded tests".into())
}

fn condelim_reproduces_compiler_output() -> Outcome {
    let (initial, fin) = (corpus::test1_initial(), corpus::test1_final());
    // the recorded output is the input plus one constant-true node 19
    ensure(initial.len() == 19 && fin.len() == 20, || {
        format!("graphs have {} and {} nodes", initial.len(), fin.len())
    })?;
    ensure(
        fin.node(NodeId(19)) == Some(&IRNode::Constant { value: int(1, 1) }) && !initial.contains(NodeId(19)),
        || "node 19 is not a new constant true".into(),
    )?;
    let out = conditional_elimination(&initial);
    let r = structurally_equivalent(&out, &fin);
    match r.first_difference {
        None => Ok("output equivalent to the recorded graph".into()),
        Some(d) => Err(d.to_string()),
    }
}

fn count_ifs(g: &IRGraph) -> usize {
    reachable(g)
        .into_iter()
        .filter(|id| matches!(g.node(*id), Some(IRNode::If { .. })))
        .count()
}

fn phase_separation() -> Outcome {
    let all = graphs();
    for (name, g) in &all {
        let out = conditional_elimination(g);
        for (id, node, _) in g.iter() {
            let after = out.node(id).ok_or_else(|| format!("{name}: node {id} removed"))?;
            ensure(node.successors() == after.successors(), || {
                format!("{name}: successors of {id} changed")
            })?;
        }
    }
    // the decided branch in test1 survives condelim and goes only under canonicalize
    let decided = conditional_elimination(&corpus::test1_initial());
    let (before, after_ce, after_canon) = (
        count_ifs(&decided),
        count_ifs(&conditional_elimination(&decided)),
        count_ifs(&canonicalize(&decided)),
    );
    ensure(before == after_ce && after_canon < before, || {
        format!("If count {before} -> condelim {after_ce}, canonicalize {after_canon}")
    })?;
    Ok(format!("{} graphs, no successor edge changed", all.len()))
}

fn commutation() -> Outcome {
    let lists = [
        vec![Phase::CondElim],
        vec![Phase::Canonicalize],
        vec![Phase::CondElim, Phase::Canonicalize],
    ];
    let mut checks = 0;
    for (file, p) in corpus::all() {
        for phases in &lists {
            let r = run_commutation_test(&p, phases, RunOptions::default());
            ensure(r.passed(), || format!("{file}: {r}"))?;
            checks += r.summary.total;
        }
    }
    Ok(format!("{checks} comparisons, zero failures"))
}

fn permutation_invariance() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let all = graphs();
    for (name, g) in &all {
        for i in 0..100 {
            let h = permute_ids(g, &mut rng);
            ensure(structurally_equivalent(g, &h).equivalent, || {
                format!("{name}: permutation {i}")
            })?;
        }
        let ids: Vec<_> = reachable(g).into_iter().collect();
        let id = ids[rng.gen_range(0..ids.len())];
        let m = common::mutate(g, id, rng.gen_range(0..2));
        ensure(!structurally_equivalent(g, &m).equivalent, || {
            format!("{name}: mutation of {id} missed")
        })?;
    }
    Ok(format!(
        "{} graphs x 100 permutations, every mutation detected",
        all.len()
    ))
}

fn stamp_soundness_4() -> Outcome {
    let t = Instant::now();
    let r = stamp_soundness(4, Execution::default());
    let elapsed = t.elapsed();
    ensure(r.sound(), || {
        format!(
            "{} contradictions, first: {}",
            r.contradictions.len(),
            r.contradictions[0]
        )
    })?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} stamp pairs, {} checks in {elapsed:.2?}",
        r.stamp_pairs, r.checks
    ))
}

fn masking() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    for op in Operator::ALL {
        for _ in 0..10_000 {
            let bits = SUPPORTED_BITS[rng.gen_range(0..SUPPORTED_BITS.len())];
            let b32 = u32::from(bits);
            let a = mk_int(b32, common::random_signed(&mut rng, b32)).unwrap();
            let b = mk_int(b32, common::random_signed(&mut rng, b32)).unwrap();
            let Ok(r) = common::eval_op(op, a, (op.arity() == 2).then_some(b)) else {
                continue;
            };
            let rb = r.bits().ok_or_else(|| format!("{} gave {r}", op.name()))?;
            ensure(common::payload(r) & !common::mask(rb) == 0, || {
                format!("{} at {bits} bits: {r} has upper bits set", op.name())
            })?;
        }
    }
    Ok(format!("{} operators x 10000 applications", Operator::ALL.len()))
}

fn regressions() -> Outcome {
    let mut failed = Vec::new();
    for (name, check) in common::regress::ALL {
        if panic::catch_unwind(AssertUnwindSafe(check)).is_err() {
            failed.push(*name);
        }
    }
    ensure(failed.is_empty(), || format!("failed: {}", failed.join(", ")))?;
    Ok(format!("{} named checks", common::regress::ALL.len()))
}

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 9] = [
        ("operator differential suite", operator_suite),
        ("left shift method tests", left_shift_tests),
        ("conditional elimination output", condelim_reproduces_compiler_output),
        ("phase separation", phase_separation),
        ("optimization commutes with execution", commutation),
        ("equivalence under renumbering", permutation_invariance),
        ("exhaustive 4-bit stamp soundness", stamp_soundness_4),
        ("result masking", masking),
        ("named regressions", regressions),
    ];
    let mut all_ok = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {}: {name} ({detail})", i + 1),
            Err(e) => {
                all_ok = false;
                println!("FAIL {}: {name}: {e}", i + 1);
            }
        }
    }
    if !all_ok {
        std::process::exit(1);
    }
}
