//! Boundary-value test programs for single operators.

use thiserror::Error;

use crate::ir::{build_graph, IRNode, NodeId, Program, TestCase};
use crate::stamp::{signed_max, signed_min, unrestricted, IntegerStamp, Stamp};
use crate::value::int;

use super::oracle::{oracle_eval, OracleResult};
use super::Operator;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("operator tests are generated for 32 or 64 bits, not {0}")]
    Bits(u32),
}

/// The nine signed boundary values of `bits`:
/// MIN, MIN+1, -2, -1, 0, 1, 2, MAX-1, MAX.
pub fn boundary_values(bits: u32) -> Vec<i128> {
    let (min, max) = (i128::from(signed_min(bits)), i128::from(signed_max(bits)));
    vec![min, min + 1, -2, -1, 0, 1, 2, max - 1, max]
}

/// Boundary values restricted to a stamp's range: its endpoints, their
/// neighbours, and the small values around zero that it contains.
pub fn stamp_boundary_values(s: IntegerStamp) -> Vec<i128> {
    let (lo, hi) = (i128::from(s.lo()), i128::from(s.hi()));
    let mut out: Vec<i128> = [lo, lo + 1, -2, -1, 0, 1, 2, hi - 1, hi]
        .into_iter()
        .filter(|v| (lo..=hi).contains(v))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// A one-operator method over its parameters, with the boundary-value
/// cross product as embedded tests whose expectations come from the
/// reference semantics.
pub fn gen_op_tests(op: Operator, bits: u32) -> Result<Program, GenError> {
    if bits != 32 && bits != 64 {
        return Err(GenError::Bits(bits));
    }
    let full = Stamp::Integer(unrestricted(bits));
    let result = if op.is_compare() { Stamp::Void } else { full };
    let (p0, p1) = (NodeId(1), NodeId(2));
    let nodes = if op.arity() == 1 {
        vec![
            (
                NodeId(0),
                IRNode::Start {
                    frame_state: Some(NodeId(2)),
                    next: NodeId(4),
                },
                Stamp::Void,
            ),
            (p0, IRNode::Parameter { index: 0 }, full),
            (NodeId(2), IRNode::FrameState, Stamp::Illegal),
            (NodeId(3), op.floating_node(p0, p0).expect("unary ops float"), result),
            (NodeId(4), IRNode::Return { value: Some(NodeId(3)) }, result),
        ]
    } else if let Some(dr) = op.divrem_op() {
        vec![
            (
                NodeId(0),
                IRNode::Start {
                    frame_state: Some(NodeId(3)),
                    next: NodeId(4),
                },
                Stamp::Void,
            ),
            (p0, IRNode::Parameter { index: 0 }, full),
            (p1, IRNode::Parameter { index: 1 }, full),
            (NodeId(3), IRNode::FrameState, Stamp::Illegal),
            (
                NodeId(4),
                IRNode::DivRem {
                    op: dr,
                    x: p0,
                    y: p1,
                    next: NodeId(5),
                },
                full,
            ),
            (NodeId(5), IRNode::Return { value: Some(NodeId(4)) }, full),
        ]
    } else {
        vec![
            (
                NodeId(0),
                IRNode::Start {
                    frame_state: Some(NodeId(3)),
                    next: NodeId(5),
                },
                Stamp::Void,
            ),
            (p0, IRNode::Parameter { index: 0 }, full),
            (p1, IRNode::Parameter { index: 1 }, full),
            (NodeId(3), IRNode::FrameState, Stamp::Illegal),
            (NodeId(4), op.floating_node(p0, p1).expect("floating op"), result),
            (NodeId(5), IRNode::Return { value: Some(NodeId(4)) }, result),
        ]
    };
    let graph = build_graph(nodes).expect("generated graph has one start and unique ids");
    let method = op.method_name(bits);

    let values = boundary_values(bits);
    let inputs: Vec<Vec<i128>> = if op.arity() == 1 {
        values.iter().map(|a| vec![*a]).collect()
    } else {
        let mut v = Vec::new();
        for a in &values {
            for b in &values {
                // the division tests leave out a zero divisor
                if !(op.is_fixed() && *b == 0) {
                    v.push(vec![*a, *b]);
                }
            }
        }
        v
    };
    let out_bits = if op.is_compare() { 32 } else { bits };
    let tests = inputs
        .into_iter()
        .map(|args| {
            let expect = match oracle_eval(op, bits, &args) {
                OracleResult::Value(v) => int(out_bits, v.try_into().expect("in range")),
                OracleResult::DivisionByZero => unreachable!("zero divisors are excluded"),
            };
            TestCase {
                method: method.clone(),
                args: args.iter().map(|a| int(bits, *a)).collect(),
                expect,
            }
        })
        .collect();
    let mut p = Program::single(method, graph);
    p.tests = tests;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::equivalence::structurally_equivalent;

    #[test]
    fn boundary_set() {
        assert_eq!(
            boundary_values(32),
            vec![-2147483648, -2147483647, -2, -1, 0, 1, 2, 2147483646, 2147483647]
        );
        let b64 = boundary_values(64);
        assert_eq!(b64[0], -(1i128 << 63));
        assert_eq!(b64[8], (1i128 << 63) - 1);
        let mut d = b64.clone();
        d.dedup();
        assert_eq!(d.len(), 9);
    }

    #[test]
    fn stamp_restricted_values() {
        let s = IntegerStamp::new(32, 0, 5).unwrap();
        assert_eq!(stamp_boundary_values(s), vec![0, 1, 2, 4, 5]);
        assert_eq!(stamp_boundary_values(unrestricted(32)), boundary_values(32));
    }

    #[test]
    fn left_shift_program_matches_corpus() {
        let p = gen_op_tests(Operator::LeftShift, 32).unwrap();
        let g = p.method("leftShiftNode32").unwrap();
        assert!(structurally_equivalent(g, &corpus::left_shift_node32()).equivalent);
        assert_eq!(p.tests.len(), 81);
        assert!(p
            .tests
            .iter()
            .any(|t| t.args == vec![int(32, 2), int(32, 2)] && t.expect == int(32, 8)));
    }

    #[test]
    fn test_counts() {
        assert_eq!(gen_op_tests(Operator::SignedDiv, 32).unwrap().tests.len(), 72);
        assert_eq!(gen_op_tests(Operator::SignedRem, 64).unwrap().tests.len(), 72);
        assert_eq!(gen_op_tests(Operator::Negate, 64).unwrap().tests.len(), 9);
        assert_eq!(gen_op_tests(Operator::Add, 16), Err(GenError::Bits(16)));
    }

    #[test]
    fn division_sits_on_the_control_path() {
        let p = gen_op_tests(Operator::SignedDiv, 32).unwrap();
        let g = p.method("signedDivNode32").unwrap();
        let IRNode::Start { next, .. } = g.node(g.start()).unwrap() else {
            panic!()
        };
        assert!(matches!(g.node(*next), Some(IRNode::DivRem { .. })));
    }
}
