//! Integer stamps: per-node static bounds, and the range reasoning used by
//! conditional elimination.

use std::fmt;

use thiserror::Error;

use crate::ir::{IRNode, NodeId};
use crate::value::{CompareOp, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StampError {
    #[error("stamp bit count {0} out of range")]
    Bits(u32),
    #[error("stamp bounds [{lo}, {hi}] invalid for {bits} bits")]
    Bounds { bits: u32, lo: i64, hi: i64 },
}

/// Signed range `[lo, hi]` of a `bits`-wide integer.
///
/// Any width in `1..=64` is accepted so the range algebra can be checked
/// exhaustively at small widths; IR graphs only use the widths in
/// [`crate::value::SUPPORTED_BITS`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegerStamp {
    bits: u8,
    lo: i64,
    hi: i64,
}

pub fn signed_min(bits: u32) -> i64 {
    i64::MIN >> (64 - bits)
}

pub fn signed_max(bits: u32) -> i64 {
    i64::MAX >> (64 - bits)
}

impl IntegerStamp {
    pub fn new(bits: u32, lo: i64, hi: i64) -> Result<Self, StampError> {
        if !(1..=64).contains(&bits) {
            return Err(StampError::Bits(bits));
        }
        if lo > hi || lo < signed_min(bits) || hi > signed_max(bits) {
            return Err(StampError::Bounds { bits, lo, hi });
        }
        Ok(IntegerStamp {
            bits: bits as u8,
            lo,
            hi,
        })
    }

    pub fn bits(&self) -> u32 {
        u32::from(self.bits)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn singleton(&self) -> Option<i64> {
        (self.lo == self.hi).then_some(self.lo)
    }

    // Clamps an i128 range into this width; `None` if empty.
    fn clamped(bits: u32, lo: i128, hi: i128) -> Option<Self> {
        let lo = lo.max(i128::from(signed_min(bits)));
        let hi = hi.min(i128::from(signed_max(bits)));
        (lo <= hi).then_some(IntegerStamp {
            bits: bits as u8,
            lo: lo as i64,
            hi: hi as i64,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stamp {
    Void,
    Illegal,
    Integer(IntegerStamp),
}

impl Stamp {
    pub fn integer(bits: u32, lo: i64, hi: i64) -> Result<Self, StampError> {
        IntegerStamp::new(bits, lo, hi).map(Stamp::Integer)
    }

    pub fn as_integer(&self) -> Option<IntegerStamp> {
        match self {
            Stamp::Integer(s) => Some(*s),
            _ => None,
        }
    }
}

impl fmt::Display for Stamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stamp::Void => f.write_str("VoidStamp"),
            Stamp::Illegal => f.write_str("IllegalStamp"),
            Stamp::Integer(s) => write!(f, "IntegerStamp {} [{}, {}]", s.bits, s.lo, s.hi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriState {
    AlwaysTrue,
    AlwaysFalse,
    Unknown,
}

impl TriState {
    pub fn decided(self) -> Option<bool> {
        match self {
            TriState::AlwaysTrue => Some(true),
            TriState::AlwaysFalse => Some(false),
            TriState::Unknown => None,
        }
    }
}

/// The full signed range of `bits`.
pub fn unrestricted(bits: u32) -> IntegerStamp {
    IntegerStamp::new(bits, signed_min(bits), signed_max(bits)).expect("bits in 1..=64")
}

pub fn constant_stamp(v: Value) -> Option<IntegerStamp> {
    let v = v.as_int()?;
    let n = v.signed();
    Some(IntegerStamp {
        bits: v.bits(),
        lo: n,
        hi: n,
    })
}

/// `None` when the ranges do not overlap or the widths differ.
pub fn intersect(a: IntegerStamp, b: IntegerStamp) -> Option<IntegerStamp> {
    if a.bits != b.bits {
        return None;
    }
    let lo = a.lo.max(b.lo);
    let hi = a.hi.min(b.hi);
    (lo <= hi).then_some(IntegerStamp { bits: a.bits, lo, hi })
}

pub fn fold_compare(op: CompareOp, a: IntegerStamp, b: IntegerStamp) -> TriState {
    if a.bits != b.bits {
        return TriState::Unknown;
    }
    match op {
        CompareOp::IntegerLessThan => {
            if a.hi < b.lo {
                TriState::AlwaysTrue
            } else if a.lo >= b.hi {
                TriState::AlwaysFalse
            } else {
                TriState::Unknown
            }
        }
        CompareOp::IntegerEquals => match (a.singleton(), b.singleton()) {
            (Some(x), Some(y)) if x == y => TriState::AlwaysTrue,
            _ if a.hi < b.lo || b.hi < a.lo => TriState::AlwaysFalse,
            _ => TriState::Unknown,
        },
    }
}

/// Which stamp a refinement starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RefineBase {
    /// The node's stamp as declared in the graph. This is what the compiler
    /// itself does.
    #[default]
    Original,
    /// The most refined stamp currently known on the dominator path.
    StackTop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refinement {
    /// Tightened stamps, at most one per node.
    Stamps(Vec<(NodeId, IntegerStamp)>),
    /// No value assignment satisfies the condition with this polarity.
    Infeasible,
}

/// Bounds implied for the operands of `cond` when it evaluates to
/// `polarity`. `lookup` supplies the base stamp of each operand.
pub fn refine_by_condition(
    cond: &IRNode,
    polarity: bool,
    lookup: impl Fn(NodeId) -> Option<IntegerStamp>,
) -> Refinement {
    let IRNode::Compare { op, x, y } = *cond else {
        return Refinement::Stamps(Vec::new());
    };
    let (Some(sx), Some(sy)) = (lookup(x), lookup(y)) else {
        return Refinement::Stamps(Vec::new());
    };
    if sx.bits != sy.bits {
        return Refinement::Stamps(Vec::new());
    }
    let bits = sx.bits();
    let (lx, hx) = (i128::from(sx.lo), i128::from(sx.hi));
    let (ly, hy) = (i128::from(sy.lo), i128::from(sy.hi));

    let ranges: [(NodeId, i128, i128); 2] = match (op, polarity) {
        // x < y
        (CompareOp::IntegerLessThan, true) => [(x, lx, hy - 1), (y, lx + 1, hy)],
        // x >= y
        (CompareOp::IntegerLessThan, false) => [(x, ly, hx), (y, ly, hx)],
        (CompareOp::IntegerEquals, true) => [(x, ly, hy), (y, lx, hx)],
        (CompareOp::IntegerEquals, false) => return Refinement::Stamps(Vec::new()),
    };

    let mut out: Vec<(NodeId, IntegerStamp)> = Vec::with_capacity(2);
    for (node, lo, hi) in ranges {
        let base = if node == x { sx } else { sy };
        let Some(bound) = IntegerStamp::clamped(bits, lo, hi) else {
            return Refinement::Infeasible;
        };
        let Some(mut refined) = intersect(base, bound) else {
            return Refinement::Infeasible;
        };
        // x and y may be the same node
        if let Some(prev) = out.iter_mut().find(|(n, _)| *n == node) {
            match intersect(prev.1, refined) {
                Some(s) => refined = s,
                None => return Refinement::Infeasible,
            }
            prev.1 = refined;
        } else {
            out.push((node, refined));
        }
    }
    Refinement::Stamps(out)
}
