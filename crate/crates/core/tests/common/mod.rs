//! Shared helpers for the integration tests, including deliberately broken
//! copies of operator semantics. Each regression test checks the real
//! implementation against the expected value and shows that the matching
//! broken copy gets it wrong:
//!
//! | broken copy               | mistake                                                   |
//! |---------------------------|-----------------------------------------------------------|
//! | `unsigned_div`            | divides the unsigned payloads                             |
//! | `checked_div`             | reports overflow for `MIN / -1` instead of wrapping       |
//! | `xor_sign_extended`       | keeps operands sign-extended to 64 bits, so upper bits leak |
//! | `shr_on_payload`          | arithmetic shift of the 64-bit payload (sign bit is bit 63) |
//! | `shr_fill_ones`           | always shifts in ones                                     |
//! | `less_than_unsigned`      | compares payloads without sign                            |
//! | `sign_extend_off_by_one`  | reads the sign from bit `bits` instead of `bits - 1`      |
//! | `shift_binary_promotion`  | widens the shift distance's width into the result         |
//! | `widen_zero_always`       | zero-extends every narrow argument                        |
//! | `widen_sign_always`       | sign-extends every narrow argument                        |
//! | `no_boolean_coercion`     | returns 1-bit results unchanged                           |
//! | `floating_division`       | evaluates a division where its value is used, not where control reaches it |
#![allow(dead_code)]

use seair::interp::{Interpreter, Step};
use seair::ir::{IRNode, NodeId, Program};
use seair::value::{eval_divrem, int, mk_int, DivRemOp, IntVal, Value};

pub fn payload(v: Value) -> u64 {
    v.as_int().expect("integer").raw()
}

pub fn mask(bits: u8) -> u64 {
    if bits == 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

pub mod regress;

pub mod buggy {
    use super::*;

    pub fn unsigned_div(a: Value, b: Value) -> Value {
        let (x, y) = (a.as_int().unwrap(), b.as_int().unwrap());
        Value::Int(IntVal::from_raw(u32::from(x.bits()), x.raw() / y.raw()).unwrap())
    }

    pub fn checked_div(a: Value, b: Value) -> Option<Value> {
        let (x, y) = (a.as_int().unwrap(), b.as_int().unwrap());
        let bits = u32::from(x.bits());
        let q = i128::from(x.signed()) / i128::from(y.signed());
        let max = (1i128 << (bits - 1)) - 1;
        (q <= max).then(|| mk_int(bits, q).unwrap())
    }

    /// Raw 64-bit result of xor over sign-extended operands.
    pub fn xor_sign_extended(a: Value, b: Value) -> u64 {
        (a.signed().unwrap() ^ b.signed().unwrap()) as u64
    }

    pub fn shr_on_payload(a: Value, s: u32) -> Value {
        let x = a.as_int().unwrap();
        let r = ((x.raw() as i64) >> s) as u64 & mask(x.bits());
        Value::Int(IntVal::from_raw(u32::from(x.bits()), r).unwrap())
    }

    pub fn shr_fill_ones(a: Value, s: u32) -> Value {
        let x = a.as_int().unwrap();
        let bits = u32::from(x.bits());
        let fill = if s == 0 {
            0
        } else {
            mask(x.bits()) & !(mask(x.bits()) >> s)
        };
        Value::Int(IntVal::from_raw(bits, (x.raw() >> s) | fill).unwrap())
    }

    pub fn less_than_unsigned(a: Value, b: Value) -> bool {
        payload(a) < payload(b)
    }

    pub fn sign_extend_off_by_one(a: Value, out_bits: u32) -> Value {
        let x = a.as_int().unwrap();
        let bits = x.bits();
        let negative = bits < 64 && (x.raw() >> bits) & 1 == 1;
        let raw = if negative { x.raw() | !mask(bits) } else { x.raw() };
        Value::Int(IntVal::from_raw(out_bits, raw & mask(out_bits as u8)).unwrap())
    }

    /// Left shift computed at the wider of the two operand widths.
    pub fn shift_binary_promotion(a: Value, b: Value) -> Value {
        let bits = a.bits().unwrap().max(b.bits().unwrap());
        let s = (b.signed().unwrap() & if bits == 64 { 63 } else { 31 }) as u32;
        mk_int(u32::from(bits), i128::from(a.signed().unwrap()) << s).unwrap()
    }

    pub fn widen_zero_always(v: Value) -> Value {
        Value::Int(IntVal::from_raw(32, payload(v)).unwrap())
    }

    pub fn widen_sign_always(v: Value) -> Value {
        int(32, i128::from(v.signed().unwrap()))
    }

    pub fn no_boolean_coercion(v: Value) -> Value {
        v
    }

    /// Runs `method`, then re-evaluates the `SignedDiv` node `div` from the
    /// final state as if it were a floating expression.
    pub fn floating_division(p: &Program, method: &str, args: &[Value], div: NodeId) -> Value {
        let it = Interpreter::new(p);
        let g = p.method(method).unwrap();
        let mut state = it.initial_state(method, args.to_vec()).unwrap();
        while let Step::Continue(next) = it.step(state.clone()).unwrap() {
            state = next;
        }
        let IRNode::DivRem { x, y, .. } = g.node(div).unwrap() else {
            panic!("not a division")
        };
        let a = it.eval_expr(g, &state, *x).unwrap();
        let b = it.eval_expr(g, &state, *y).unwrap();
        eval_divrem(DivRemOp::SignedDiv, a, b).unwrap()
    }
}

/// Applies an operator through the `value` module directly.
pub fn eval_op(
    op: seair::harness::Operator,
    a: Value,
    b: Option<Value>,
) -> Result<Value, seair::value::DivisionByZero> {
    use seair::value::*;
    let b = || b.expect("binary operator");
    Ok(match op.floating_node(NodeId(0), NodeId(1)) {
        Some(IRNode::Arith {
            op: ArithOp::Binary(o), ..
        }) => eval_binary(o, a, b()),
        Some(IRNode::Arith {
            op: ArithOp::Shift(o), ..
        }) => eval_shift(o, a, b()),
        Some(IRNode::Unary { op: o, .. }) => eval_unary(o, a),
        Some(IRNode::Compare { op: o, .. }) => eval_compare(o, a, b()),
        _ => eval_divrem(op.divrem_op().expect("division"), a, b())?,
    })
}

use seair::ir::ArithOp;

/// Random signed value of `bits`, biased toward the range ends and zero.
pub fn random_signed(rng: &mut impl rand::Rng, bits: u32) -> i128 {
    let min = -(1i128 << (bits - 1));
    let max = (1i128 << (bits - 1)) - 1;
    match rng.gen_range(0..4) {
        0 => min + rng.gen_range(0..4),
        1 => max - rng.gen_range(0..4),
        2 => rng.gen_range(-4..=4).clamp(min, max),
        _ => rng.gen_range(min..=max),
    }
}

use seair::ir::IRGraph;
use seair::stamp::{IntegerStamp, Stamp};

/// A different but equally valid stamp.
pub fn other_stamp(s: Stamp) -> Stamp {
    match s {
        Stamp::Void => Stamp::Illegal,
        Stamp::Illegal => Stamp::Void,
        Stamp::Integer(i) => {
            let (lo, hi) = if i.hi() > i.lo() {
                (i.lo(), i.hi() - 1)
            } else if i.hi() < seair::stamp::signed_max(i.bits()) {
                (i.lo(), i.hi() + 1)
            } else {
                (i.lo() - 1, i.hi())
            };
            Stamp::Integer(IntegerStamp::new(i.bits(), lo, hi).unwrap())
        }
    }
}

/// Changes one thing about node `id`: its kind where a sibling kind with the
/// same inputs exists, a constant's payload, or otherwise its stamp.
pub fn mutate(g: &IRGraph, id: NodeId, which: usize) -> IRGraph {
    use seair::value::{BinaryOp, CompareOp, ShiftOp};
    let node = g.node(id).unwrap().clone();
    let stamp = g.stamp(id).unwrap();
    let changed = match (&node, which % 2) {
        (IRNode::Constant { value: Value::Int(v) }, 0) => Some(IRNode::Constant {
            value: int(u32::from(v.bits()), i128::from(v.signed()) ^ 1),
        }),
        (IRNode::Arith { op, x, y }, 0) => Some(IRNode::Arith {
            op: match op {
                ArithOp::Binary(BinaryOp::Add) => ArithOp::Binary(BinaryOp::Sub),
                ArithOp::Binary(_) => ArithOp::Binary(BinaryOp::Add),
                ArithOp::Shift(ShiftOp::LeftShift) => ArithOp::Shift(ShiftOp::RightShift),
                ArithOp::Shift(_) => ArithOp::Shift(ShiftOp::LeftShift),
            },
            x: *x,
            y: *y,
        }),
        (IRNode::Compare { op, x, y }, 0) => Some(IRNode::Compare {
            op: match op {
                CompareOp::IntegerEquals => CompareOp::IntegerLessThan,
                CompareOp::IntegerLessThan => CompareOp::IntegerEquals,
            },
            x: *x,
            y: *y,
        }),
        (IRNode::Parameter { index }, 0) => Some(IRNode::Parameter { index: index + 7 }),
        _ => None,
    };
    match changed {
        Some(n) => g.with_node(id, n, stamp),
        None => g.with_node(id, node, other_stamp(stamp)),
    }
}
