//! Runtime values and Java-faithful fixed-width integer operators.
//!
//! Every integer carries its significant bit count and a 64-bit payload whose
//! bits above the width are always zero. All signed interpretation goes
//! through [`IntVal::signed`].

use std::fmt;

use thiserror::Error;

/// Bit widths an integer value may have.
pub const SUPPORTED_BITS: [u8; 5] = [1, 8, 16, 32, 64];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("unsupported bit count {0}")]
    UnsupportedBits(u32),
    #[error("payload {raw} has bits set above width {bits}")]
    UnmaskedPayload { bits: u8, raw: u64 },
}

/// Raised by signed division or remainder when the divisor is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("division by zero")]
pub struct DivisionByZero;

pub fn is_supported_bits(bits: u32) -> bool {
    SUPPORTED_BITS.iter().any(|&b| u32::from(b) == bits)
}

/// All-ones mask covering the low `bits` bits.
#[inline]
pub fn width_mask(bits: u8) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// An integer of `bits` significant bits stored in a zero-padded 64-bit word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVal {
    bits: u8,
    raw: u64,
}

impl IntVal {
    /// Builds a value from an already-masked payload.
    pub fn from_raw(bits: u32, raw: u64) -> Result<Self, ValueError> {
        if !is_supported_bits(bits) {
            return Err(ValueError::UnsupportedBits(bits));
        }
        let bits = bits as u8;
        if raw & !width_mask(bits) != 0 {
            return Err(ValueError::UnmaskedPayload { bits, raw });
        }
        Ok(IntVal { bits, raw })
    }

    // Callers guarantee a supported width.
    fn wrap(bits: u8, raw: u64) -> Self {
        IntVal {
            bits,
            raw: raw & width_mask(bits),
        }
    }

    pub fn bits(self) -> u8 {
        self.bits
    }

    pub fn raw(self) -> u64 {
        self.raw
    }

    /// Two's-complement reading of the low `bits` bits.
    pub fn signed(self) -> i64 {
        let shift = 64 - u32::from(self.bits);
        ((self.raw << shift) as i64) >> shift
    }

    pub fn is_zero(self) -> bool {
        self.raw == 0
    }
}

/// A runtime value: undefined, or a fixed-width integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Value {
    #[default]
    Undef,
    Int(IntVal),
}

impl Value {
    pub fn as_int(self) -> Option<IntVal> {
        match self {
            Value::Int(v) => Some(v),
            Value::Undef => None,
        }
    }

    pub fn bits(self) -> Option<u8> {
        self.as_int().map(IntVal::bits)
    }

    pub fn signed(self) -> Option<i64> {
        self.as_int().map(IntVal::signed)
    }

    /// Truth value as used by `If` and `Conditional`: nonzero is true.
    pub fn truthy(self) -> Option<bool> {
        self.as_int().map(|v| !v.is_zero())
    }
}

impl From<IntVal> for Value {
    fn from(v: IntVal) -> Self {
        Value::Int(v)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Undef => f.write_str("undef"),
            Value::Int(v) => write!(f, "{}:{}", v.bits, v.signed()),
        }
    }
}

/// `n mod 2^bits`, stored in the low bits.
pub fn mk_int(bits: u32, n: i128) -> Result<Value, ValueError> {
    if !is_supported_bits(bits) {
        return Err(ValueError::UnsupportedBits(bits));
    }
    Ok(Value::Int(IntVal::wrap(bits as u8, n as u64)))
}

/// Shorthand for tests and corpus builders: panics on an unsupported width.
pub fn int(bits: u32, n: i128) -> Value {
    mk_int(bits, n).expect("supported bit width")
}

/// Signed reading of an integer value; `None` for `Undef`.
pub fn signed(v: Value) -> Option<i64> {
    v.signed()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    And,
    Or,
    Xor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DivRemOp {
    SignedDiv,
    SignedRem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShiftOp {
    LeftShift,
    RightShift,
    UnsignedRightShift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    Negate,
    Not,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompareOp {
    IntegerEquals,
    IntegerLessThan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConvertOp {
    SignExtend,
    ZeroExtend,
    Narrow,
}

fn same_width(a: Value, b: Value) -> Option<(IntVal, IntVal)> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) if x.bits == y.bits => Some((x, y)),
        _ => None,
    }
}

pub fn eval_binary(op: BinaryOp, a: Value, b: Value) -> Value {
    let Some((x, y)) = same_width(a, b) else {
        return Value::Undef;
    };
    let raw = match op {
        BinaryOp::Add => x.raw.wrapping_add(y.raw),
        BinaryOp::Sub => x.raw.wrapping_sub(y.raw),
        BinaryOp::Mul => x.raw.wrapping_mul(y.raw),
        BinaryOp::And => x.raw & y.raw,
        BinaryOp::Or => x.raw | y.raw,
        BinaryOp::Xor => x.raw ^ y.raw,
    };
    Value::Int(IntVal::wrap(x.bits, raw))
}

/// Java `/` and `%`: truncating quotient, remainder takes the dividend's
/// sign, `MIN / -1` wraps to `MIN`.
pub fn eval_divrem(op: DivRemOp, a: Value, b: Value) -> Result<Value, DivisionByZero> {
    let Some((x, y)) = same_width(a, b) else {
        return Ok(Value::Undef);
    };
    let (n, d) = (x.signed(), y.signed());
    if d == 0 {
        return Err(DivisionByZero);
    }
    let r = match op {
        DivRemOp::SignedDiv => n.wrapping_div(d),
        DivRemOp::SignedRem => n.wrapping_rem(d),
    };
    Ok(Value::Int(IntVal::wrap(x.bits, r as u64)))
}

/// Java shifts. The result width is the left operand's; the distance is the
/// signed right operand masked to 6 bits for 64-bit values and 5 otherwise.
pub fn eval_shift(op: ShiftOp, a: Value, b: Value) -> Value {
    let (Value::Int(x), Value::Int(y)) = (a, b) else {
        return Value::Undef;
    };
    let distance_mask = if x.bits == 64 { 63 } else { 31 };
    let s = (y.signed() & distance_mask) as u32;
    let raw = match op {
        ShiftOp::LeftShift => x.raw << s,
        // sign bits come from bit `bits - 1`, zeros for non-negative inputs
        ShiftOp::RightShift => (x.signed() >> s) as u64,
        ShiftOp::UnsignedRightShift => x.raw >> s,
    };
    Value::Int(IntVal::wrap(x.bits, raw))
}

pub fn eval_unary(op: UnaryOp, a: Value) -> Value {
    let Value::Int(x) = a else {
        return Value::Undef;
    };
    let raw = match op {
        UnaryOp::Negate => x.raw.wrapping_neg(),
        UnaryOp::Not => !x.raw,
        UnaryOp::Abs if x.signed() < 0 => x.raw.wrapping_neg(),
        UnaryOp::Abs => x.raw,
    };
    Value::Int(IntVal::wrap(x.bits, raw))
}

/// Yields `Int(1, 1)` or `Int(1, 0)`.
pub fn eval_compare(op: CompareOp, a: Value, b: Value) -> Value {
    let Some((x, y)) = same_width(a, b) else {
        return Value::Undef;
    };
    let holds = match op {
        CompareOp::IntegerEquals => x.raw == y.raw,
        CompareOp::IntegerLessThan => x.signed() < y.signed(),
    };
    Value::Int(IntVal::wrap(1, holds as u64))
}

pub fn eval_convert(op: ConvertOp, in_bits: u32, out_bits: u32, a: Value) -> Value {
    let Value::Int(x) = a else {
        return Value::Undef;
    };
    if u32::from(x.bits) != in_bits || !is_supported_bits(out_bits) {
        return Value::Undef;
    }
    let out = out_bits as u8;
    match op {
        ConvertOp::SignExtend if in_bits < out_bits => Value::Int(IntVal::wrap(out, x.signed() as u64)),
        ConvertOp::ZeroExtend if in_bits < out_bits => Value::Int(IntVal::wrap(out, x.raw)),
        ConvertOp::Narrow if in_bits > out_bits => Value::Int(IntVal::wrap(out, x.raw)),
        _ => Value::Undef,
    }
}
