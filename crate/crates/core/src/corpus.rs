//! Example programs shipped with the crate.

use crate::format::parse_program;
use crate::ir::{IRGraph, Program};
use crate::optimizer::Phase;

/// File name and contents of every corpus program.
pub const FILES: [(&str, &str); 9] = [
    (
        "left_shift_node32.json",
        include_str!("../corpus/left_shift_node32.json"),
    ),
    ("test1.json", include_str!("../corpus/test1.json")),
    ("nested_negation.json", include_str!("../corpus/nested_negation.json")),
    ("stamp_fold.json", include_str!("../corpus/stamp_fold.json")),
    ("loop_sum.json", include_str!("../corpus/loop_sum.json")),
    ("static_field.json", include_str!("../corpus/static_field.json")),
    ("helper_call.json", include_str!("../corpus/helper_call.json")),
    ("small_params.json", include_str!("../corpus/small_params.json")),
    ("folding.json", include_str!("../corpus/folding.json")),
];

fn load(name: &str) -> Program {
    let (_, text) = FILES
        .iter()
        .find(|(n, _)| *n == name)
        .unwrap_or_else(|| panic!("no corpus file {name}"));
    parse_program(text).unwrap_or_else(|e| panic!("corpus file {name}: {e}"))
}

pub fn all() -> Vec<(&'static str, Program)> {
    FILES.iter().map(|(n, _)| (*n, load(n))).collect()
}

pub fn left_shift_program() -> Program {
    load("left_shift_node32.json")
}

pub fn left_shift_node32() -> IRGraph {
    left_shift_program().methods["leftShiftNode32"].clone()
}

/// The branch-on-the-same-condition-twice example, with its expected
/// optimizer outputs as goldens.
pub fn test1_program() -> Program {
    load("test1.json")
}

pub fn test1_initial() -> IRGraph {
    test1_program().methods["test1"].clone()
}

/// `test1` after conditional elimination.
pub fn test1_final() -> IRGraph {
    test1_program()
        .goldens
        .into_iter()
        .find(|g| g.phases == [Phase::CondElim])
        .expect("condelim golden")
        .graph
}

pub fn nested_negation_program() -> Program {
    load("nested_negation.json")
}

pub fn single_if() -> IRGraph {
    nested_negation_program().methods["singleIf"].clone()
}

pub fn stamp_fold_program() -> Program {
    load("stamp_fold.json")
}
