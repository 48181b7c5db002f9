//! Checks for known operator and interpreter bugs. Each one exercises the
//! real implementation and shows that the matching broken copy in
//! [`super::buggy`] fails it. Shared by the regression tests and the
//! acceptance runner.

use super::{buggy, mask, payload};
use seair::corpus;
use seair::interp::{apply_pure, run, static_test};
use seair::ir::{build_graph, ArithOp, IRNode, NodeId, Program};
use seair::stamp::{unrestricted, Stamp};
use seair::value::{
    eval_binary, eval_compare, eval_convert, eval_divrem, eval_shift, int, BinaryOp, CompareOp, ConvertOp, DivRemOp,
    ShiftOp, Value,
};

const MIN32: i128 = -2147483648;

pub fn signed_not_unsigned_division() {
    let (a, b) = (int(32, -7), int(32, 2));
    let expected = int(32, -3);
    assert_eq!(eval_divrem(DivRemOp::SignedDiv, a, b), Ok(expected));
    assert_ne!(buggy::unsigned_div(a, b), expected);
}

pub fn min_divided_by_minus_one_wraps() {
    for bits in [32, 64] {
        let min = -(1i128 << (bits - 1));
        let (a, b) = (int(bits, min), int(bits, -1));
        assert_eq!(eval_divrem(DivRemOp::SignedDiv, a, b), Ok(int(bits, min)));
        assert_eq!(eval_divrem(DivRemOp::SignedRem, a, b), Ok(int(bits, 0)));
        assert_eq!(buggy::checked_div(a, b), None);
    }
}

pub fn xor_result_is_masked() {
    let (a, b) = (int(32, -1), int(32, 1));
    let r = eval_binary(BinaryOp::Xor, a, b);
    assert_eq!(r, int(32, -2));
    assert_eq!(payload(r), 0xFFFF_FFFE);
    assert_eq!(payload(r) & !mask(32), 0);
    assert_ne!(buggy::xor_sign_extended(a, b), payload(r));
}

pub fn right_shift_propagates_sign_of_negative_input() {
    let a = int(32, -8);
    let r = eval_shift(ShiftOp::RightShift, a, int(32, 1));
    assert_eq!(r, int(32, -4));
    assert_eq!(
        eval_shift(ShiftOp::RightShift, int(32, MIN32), int(32, 31)),
        int(32, -1)
    );
    assert_ne!(buggy::shr_on_payload(a, 1), r);
}

pub fn right_shift_keeps_positive_input_positive() {
    let a = int(32, 8);
    let r = eval_shift(ShiftOp::RightShift, a, int(32, 1));
    assert_eq!(r, int(32, 4));
    assert_eq!(
        eval_shift(ShiftOp::RightShift, int(32, 2147483647), int(32, 30)),
        int(32, 1)
    );
    assert_ne!(buggy::shr_fill_ones(a, 1), r);
}

pub fn signed_division_runs_in_control_flow_order() {
    // d = f / 2; f = 100; return d
    let s32 = Stamp::Integer(unrestricted(32));
    let g = build_graph(vec![
        (
            NodeId(0),
            IRNode::Start {
                frame_state: None,
                next: NodeId(3),
            },
            Stamp::Void,
        ),
        (NodeId(1), IRNode::LoadField { field: "f".into() }, s32),
        (NodeId(2), IRNode::Constant { value: int(32, 2) }, s32),
        (
            NodeId(3),
            IRNode::DivRem {
                op: DivRemOp::SignedDiv,
                x: NodeId(1),
                y: NodeId(2),
                next: NodeId(4),
            },
            s32,
        ),
        (
            NodeId(4),
            IRNode::StoreField {
                field: "f".into(),
                value: NodeId(5),
                next: NodeId(6),
            },
            Stamp::Void,
        ),
        (NodeId(5), IRNode::Constant { value: int(32, 100) }, s32),
        (NodeId(6), IRNode::Return { value: Some(NodeId(3)) }, s32),
    ])
    .unwrap();
    let mut p = Program::single("divThenStore", g);
    p.fields.insert("f".into(), int(32, 10));
    assert_eq!(run(&p, "divThenStore", &[]), Ok(int(32, 5)));
    assert_ne!(buggy::floating_division(&p, "divThenStore", &[], NodeId(3)), int(32, 5));

    // a zero divisor traps before the store
    p.fields.insert("f".into(), int(32, 10));
    let mut zero = p.clone();
    let g = zero.methods["divThenStore"].with_node(
        NodeId(2),
        IRNode::Constant { value: int(32, 0) },
        Stamp::Integer(unrestricted(32)),
    );
    zero.methods.insert("divThenStore".into(), g);
    assert_eq!(run(&zero, "divThenStore", &[]).unwrap_err().class(), "division-by-zero");
}

pub fn signed_less_than_at_32_bits() {
    let (a, b) = (int(32, -1), int(32, 0));
    assert_eq!(eval_compare(CompareOp::IntegerLessThan, a, b), int(1, 1));
    assert_eq!(
        eval_compare(CompareOp::IntegerLessThan, int(32, MIN32), int(32, 2147483647)),
        int(1, 1)
    );
    assert!(!buggy::less_than_unsigned(a, b));
}

pub fn sign_extend_reads_the_top_bit() {
    let a = int(8, 255);
    let r = eval_convert(ConvertOp::SignExtend, 8, 32, a);
    assert_eq!(r, int(32, -1));
    assert_eq!(eval_convert(ConvertOp::SignExtend, 8, 32, int(8, 127)), int(32, 127));
    assert_ne!(buggy::sign_extend_off_by_one(a, 32), r);
}

pub fn shifts_use_unary_promotion() {
    let shl = IRNode::Arith {
        op: ArithOp::Shift(ShiftOp::LeftShift),
        x: NodeId(0),
        y: NodeId(1),
    };
    // int << long stays int, distance masked to 5 bits
    let (a, b) = (int(32, 1), int(64, 33));
    let r = apply_pure(&shl, &[a, b]).unwrap();
    assert_eq!(r, int(32, 2));
    assert_ne!(buggy::shift_binary_promotion(a, b), r);
    // byte << int is computed at 32 bits
    assert_eq!(apply_pure(&shl, &[int(8, 1), int(32, 7)]), Some(int(32, 128)));
}

pub fn small_parameters_are_widened() {
    let p = corpus::all()
        .into_iter()
        .find(|(n, _)| *n == "small_params.json")
        .unwrap()
        .1;
    let byte = int(8, -1);
    assert!(static_test(&p, "byteInc", &[byte], int(32, 0)).pass);
    assert_ne!(buggy::widen_zero_always(byte), int(32, -1));
    let ch = int(16, -1);
    assert!(static_test(&p, "charInc", &[ch], int(32, 65536)).pass);
    assert_ne!(buggy::widen_sign_always(ch), int(32, 65535));
    assert!(static_test(&p, "boolNot", &[int(1, 1)], int(32, 0)).pass);
}

pub fn boolean_results_are_returned_as_int() {
    let p = corpus::all()
        .into_iter()
        .find(|(n, _)| *n == "helper_call.json")
        .unwrap()
        .1;
    let args = [int(32, 1), int(32, 2)];
    let r = run(&p, "isLess", &args).unwrap();
    assert_eq!(r, int(32, 1));
    assert_eq!(r.signed(), Some(1));
    let raw: Value = int(1, 1);
    assert_ne!(buggy::no_boolean_coercion(raw), r);
    // inside a caller the helper's result is still a 1-bit truth value
    assert_eq!(run(&p, "helperCall", &args), Ok(int(32, 1)));
}

/// Every check, by name.
pub const ALL: &[(&str, fn())] = &[
    ("signed_not_unsigned_division", signed_not_unsigned_division),
    ("min_divided_by_minus_one_wraps", min_divided_by_minus_one_wraps),
    ("xor_result_is_masked", xor_result_is_masked),
    (
        "right_shift_propagates_sign_of_negative_input",
        right_shift_propagates_sign_of_negative_input,
    ),
    (
        "right_shift_keeps_positive_input_positive",
        right_shift_keeps_positive_input_positive,
    ),
    (
        "signed_division_runs_in_control_flow_order",
        signed_division_runs_in_control_flow_order,
    ),
    ("signed_less_than_at_32_bits", signed_less_than_at_32_bits),
    ("sign_extend_reads_the_top_bit", sign_extend_reads_the_top_bit),
    ("shifts_use_unary_promotion", shifts_use_unary_promotion),
    ("small_parameters_are_widened", small_parameters_are_widened),
    (
        "boolean_results_are_returned_as_int",
        boolean_results_are_returned_as_int,
    ),
];
