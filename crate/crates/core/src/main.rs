use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use seair::equivalence::{structurally_equivalent, structurally_equivalent_ignoring_stamps};
use seair::format::{parse_program, serialize_program};
use seair::harness::{
    gen_op_tests, run_commutation_test, run_difftest_with, DiffReport, Execution, ExpectedSource, Operator, RunOptions,
};
use seair::interp::Interpreter;
use seair::ir::Program;
use seair::optimizer::{parse_phases, run_phases};
use seair::value::{mk_int, Value};

#[derive(Parser)]
#[command(
    name = "seair",
    version,
    about = "Sea-of-nodes IR interpreter, optimizer and differential tester"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method and print its result.
    Run {
        file: PathBuf,
        #[arg(long)]
        method: String,
        /// Argument as BITS:VALUE, e.g. 32:-5. Repeatable.
        #[arg(long = "arg", value_parser = parse_arg)]
        args: Vec<Value>,
        /// Exit 1 unless the result equals this BITS:VALUE.
        #[arg(long, value_parser = parse_arg)]
        expect: Option<Value>,
    },
    /// Optimize one method and write the resulting program.
    Opt {
        file: PathBuf,
        #[arg(long)]
        method: String,
        /// Comma-separated phases: condelim, canonicalize.
        #[arg(long)]
        phase: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exit 0 iff a method's graphs in two files are structurally equivalent.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long)]
        ignore_stamps: bool,
    },
    /// Write a boundary-value test program for one operator.
    Gentests {
        #[arg(long)]
        op: Operator,
        #[arg(long)]
        bits: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run embedded tests and, with --phases, the commutation checks.
    Difftest {
        file: PathBuf,
        /// Comma-separated phases to check for semantics preservation.
        #[arg(long)]
        phases: Option<String>,
        /// Worker threads; 0 uses every core, 1 runs sequentially.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// Shuffle execution order with this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn parse_arg(s: &str) -> Result<Value, String> {
    let (bits, n) = s.split_once(':').ok_or("expected BITS:VALUE")?;
    let bits: u32 = bits.parse().map_err(|e| format!("bad bit count: {e}"))?;
    let n: i128 = n.parse().map_err(|e| format!("bad value: {e}"))?;
    mk_int(bits, n).map_err(|e| e.to_string())
}

fn load(path: &Path) -> Result<Program, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let p = parse_program(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let problems = p.validate();
    if !problems.is_empty() {
        return Err(format!("{}: {}", path.display(), problems.join("; ")));
    }
    Ok(p)
}

fn write(path: &Path, p: &Program) -> Result<(), String> {
    fs::write(path, serialize_program(p)).map_err(|e| format!("{}: {e}", path.display()))
}

/// Exit status 0, 1 (test failure / not equivalent) or 2 (error).
fn execute(cmd: Command) -> Result<u8, String> {
    match cmd {
        Command::Run {
            file,
            method,
            args,
            expect,
        } => {
            let p = load(&file)?;
            let v = Interpreter::new(&p).run(&method, &args).map_err(|e| e.to_string())?;
            println!("{v}");
            Ok(match expect {
                Some(e) if e != v => {
                    eprintln!("expected {e}");
                    1
                }
                _ => 0,
            })
        }
        Command::Opt {
            file,
            method,
            phase,
            out,
        } => {
            let mut p = load(&file)?;
            let phases = parse_phases(&phase).map_err(|e| e.to_string())?;
            let g = p.method(&method).ok_or_else(|| format!("no method {method}"))?;
            let optimized = run_phases(g, &phases).map_err(|e| e.to_string())?;
            p.methods.insert(method, optimized);
            write(&out, &p)?;
            Ok(0)
        }
        Command::Equiv {
            a,
            b,
            method,
            ignore_stamps,
        } => {
            let (pa, pb) = (load(&a)?, load(&b)?);
            let ga = pa
                .method(&method)
                .ok_or_else(|| format!("{}: no method {method}", a.display()))?;
            let gb = pb
                .method(&method)
                .ok_or_else(|| format!("{}: no method {method}", b.display()))?;
            let r = if ignore_stamps {
                structurally_equivalent_ignoring_stamps(ga, gb)
            } else {
                structurally_equivalent(ga, gb)
            };
            match r.first_difference {
                None => {
                    eprintln!("equivalent");
                    Ok(0)
                }
                Some(d) => {
                    eprintln!("{d}");
                    Ok(1)
                }
            }
        }
        Command::Gentests { op, bits, out } => {
            let p = gen_op_tests(op, bits).map_err(|e| e.to_string())?;
            write(&out, &p)?;
            Ok(0)
        }
        Command::Difftest {
            file,
            phases,
            jobs,
            json,
            seed,
        } => {
            let p = load(&file)?;
            let execution = if jobs == 1 {
                Execution::Sequential
            } else {
                Execution::Parallel { jobs }
            };
            let opts = RunOptions { execution, seed };
            let mut reports = vec![run_difftest_with(&p, ExpectedSource::Embedded, opts)];
            if let Some(list) = phases {
                let phases = parse_phases(&list).map_err(|e| e.to_string())?;
                reports.push(run_commutation_test(&p, &phases, opts));
            }
            let report = DiffReport::merge(reports);
            if json {
                println!("{}", report.to_json());
            } else {
                println!("{report}");
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
