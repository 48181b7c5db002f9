//! The operators covered by generated test programs.

use std::fmt;
use std::str::FromStr;

use crate::ir::{ArithOp, IRNode, NodeId};
use crate::value::{BinaryOp, CompareOp, DivRemOp, ShiftOp, UnaryOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Add,
    Sub,
    Mul,
    SignedDiv,
    SignedRem,
    And,
    Or,
    Xor,
    LeftShift,
    RightShift,
    UnsignedRightShift,
    Negate,
    Not,
    Abs,
    IntegerEquals,
    IntegerLessThan,
}

impl Operator {
    pub const ALL: [Operator; 16] = [
        Operator::Add,
        Operator::Sub,
        Operator::Mul,
        Operator::SignedDiv,
        Operator::SignedRem,
        Operator::And,
        Operator::Or,
        Operator::Xor,
        Operator::LeftShift,
        Operator::RightShift,
        Operator::UnsignedRightShift,
        Operator::Negate,
        Operator::Not,
        Operator::Abs,
        Operator::IntegerEquals,
        Operator::IntegerLessThan,
    ];

    /// The arithmetic operators whose results are full-width integers.
    pub const ARITHMETIC: [Operator; 14] = [
        Operator::Add,
        Operator::Sub,
        Operator::Mul,
        Operator::SignedDiv,
        Operator::SignedRem,
        Operator::And,
        Operator::Or,
        Operator::Xor,
        Operator::LeftShift,
        Operator::RightShift,
        Operator::UnsignedRightShift,
        Operator::Negate,
        Operator::Not,
        Operator::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operator::Add => "Add",
            Operator::Sub => "Sub",
            Operator::Mul => "Mul",
            Operator::SignedDiv => "SignedDiv",
            Operator::SignedRem => "SignedRem",
            Operator::And => "And",
            Operator::Or => "Or",
            Operator::Xor => "Xor",
            Operator::LeftShift => "LeftShift",
            Operator::RightShift => "RightShift",
            Operator::UnsignedRightShift => "UnsignedRightShift",
            Operator::Negate => "Negate",
            Operator::Not => "Not",
            Operator::Abs => "Abs",
            Operator::IntegerEquals => "IntegerEquals",
            Operator::IntegerLessThan => "IntegerLessThan",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Operator::Negate | Operator::Not | Operator::Abs => 1,
            _ => 2,
        }
    }

    pub fn is_fixed(self) -> bool {
        matches!(self, Operator::SignedDiv | Operator::SignedRem)
    }

    pub fn is_compare(self) -> bool {
        matches!(self, Operator::IntegerEquals | Operator::IntegerLessThan)
    }

    /// The floating operator node over `x` (and `y`). `None` for the fixed
    /// division operators.
    pub fn floating_node(self, x: NodeId, y: NodeId) -> Option<IRNode> {
        let arith = |op| Some(IRNode::Arith { op, x, y });
        let unary = |op| Some(IRNode::Unary { op, x });
        let compare = |op| Some(IRNode::Compare { op, x, y });
        match self {
            Operator::Add => arith(ArithOp::Binary(BinaryOp::Add)),
            Operator::Sub => arith(ArithOp::Binary(BinaryOp::Sub)),
            Operator::Mul => arith(ArithOp::Binary(BinaryOp::Mul)),
            Operator::And => arith(ArithOp::Binary(BinaryOp::And)),
            Operator::Or => arith(ArithOp::Binary(BinaryOp::Or)),
            Operator::Xor => arith(ArithOp::Binary(BinaryOp::Xor)),
            Operator::LeftShift => arith(ArithOp::Shift(ShiftOp::LeftShift)),
            Operator::RightShift => arith(ArithOp::Shift(ShiftOp::RightShift)),
            Operator::UnsignedRightShift => arith(ArithOp::Shift(ShiftOp::UnsignedRightShift)),
            Operator::Negate => unary(UnaryOp::Negate),
            Operator::Not => unary(UnaryOp::Not),
            Operator::Abs => unary(UnaryOp::Abs),
            Operator::IntegerEquals => compare(CompareOp::IntegerEquals),
            Operator::IntegerLessThan => compare(CompareOp::IntegerLessThan),
            Operator::SignedDiv | Operator::SignedRem => None,
        }
    }

    pub fn divrem_op(self) -> Option<DivRemOp> {
        match self {
            Operator::SignedDiv => Some(DivRemOp::SignedDiv),
            Operator::SignedRem => Some(DivRemOp::SignedRem),
            _ => None,
        }
    }

    /// Method name used for generated programs, e.g. `leftShiftNode32`.
    pub fn method_name(self, bits: u32) -> String {
        let name = self.name();
        let mut chars = name.chars();
        let first = chars.next().expect("non-empty").to_ascii_lowercase();
        format!("{first}{}Node{bits}", chars.as_str())
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Operator::ALL
            .into_iter()
            .find(|op| op.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unsupported operator {s:?}"))
    }
}
