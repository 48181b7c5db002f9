//! Test generation, the reference semantics, and differential test runners.

pub mod generate;
pub mod ops;
pub mod oracle;
pub mod report;
pub mod runner;
pub mod soundness;

pub use generate::{boundary_values, gen_op_tests, stamp_boundary_values, GenError};
pub use ops::Operator;
pub use oracle::{oracle_eval, OracleResult};
pub use report::{DiffReport, ExpectedSource, Row, Summary, Verdict};
pub use runner::{
    boundary_assignments, par_map, run_commutation_test, run_difftest, run_difftest_with, run_operator_suite,
    Execution, RunOptions,
};
pub use soundness::{stamp_soundness, SoundnessReport};
