//! Reference integer semantics computed with unbounded integers. Shares no
//! code with the `value` module so the two can be checked against each
//! other.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Operator;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    Value(BigInt),
    DivisionByZero,
}

fn pow2(n: u32) -> BigInt {
    BigInt::one() << n
}

/// Reduces `x` into the signed range of `bits`.
pub fn wrap(x: &BigInt, bits: u32) -> BigInt {
    let half = pow2(bits - 1);
    (x + &half).mod_floor(&pow2(bits)) - half
}

/// Two's-complement bit pattern of an in-range signed value.
fn unsigned(x: &BigInt, bits: u32) -> BigInt {
    x.mod_floor(&pow2(bits))
}

fn from_unsigned(x: &BigInt, bits: u32) -> BigInt {
    wrap(x, bits)
}

fn shift_distance(y: &BigInt, bits: u32) -> u32 {
    let mask = if bits == 64 { 63 } else { 31 };
    y.mod_floor(&BigInt::from(64)).to_u32().expect("small") & mask
}

/// Evaluates `op` on signed operands of width `bits`. Comparisons yield 0 or 1.
pub fn oracle_eval(op: Operator, bits: u32, args: &[i128]) -> OracleResult {
    let a: Vec<BigInt> = args.iter().map(|n| BigInt::from(*n)).collect();
    let x = &a[0];
    let y = a.get(1);
    let r = match op {
        Operator::Add => wrap(&(x + y.unwrap()), bits),
        Operator::Sub => wrap(&(x - y.unwrap()), bits),
        Operator::Mul => wrap(&(x * y.unwrap()), bits),
        Operator::SignedDiv | Operator::SignedRem => {
            let y = y.unwrap();
            if y.is_zero() {
                return OracleResult::DivisionByZero;
            }
            // truncation toward zero, remainder follows the dividend's sign
            let q = x.abs() / y.abs();
            let q = if x.is_negative() != y.is_negative() { -q } else { q };
            if op == Operator::SignedDiv {
                wrap(&q, bits)
            } else {
                wrap(&(x - q * y), bits)
            }
        }
        Operator::And => from_unsigned(&(unsigned(x, bits) & unsigned(y.unwrap(), bits)), bits),
        Operator::Or => from_unsigned(&(unsigned(x, bits) | unsigned(y.unwrap(), bits)), bits),
        Operator::Xor => from_unsigned(&(unsigned(x, bits) ^ unsigned(y.unwrap(), bits)), bits),
        Operator::LeftShift => wrap(&(x * pow2(shift_distance(y.unwrap(), bits))), bits),
        Operator::RightShift => x.div_floor(&pow2(shift_distance(y.unwrap(), bits))),
        Operator::UnsignedRightShift => {
            from_unsigned(&(unsigned(x, bits) / pow2(shift_distance(y.unwrap(), bits))), bits)
        }
        Operator::Negate => wrap(&-x, bits),
        Operator::Not => -x - 1,
        Operator::Abs => wrap(&x.abs(), bits),
        Operator::IntegerEquals => BigInt::from(u8::from(x == y.unwrap())),
        Operator::IntegerLessThan => BigInt::from(u8::from(x < y.unwrap())),
    };
    OracleResult::Value(r)
}

impl OracleResult {
    pub fn as_i128(&self) -> Option<i128> {
        match self {
            OracleResult::Value(v) => v.to_i128(),
            OracleResult::DivisionByZero => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(op: Operator, bits: u32, args: &[i128]) -> i128 {
        oracle_eval(op, bits, args).as_i128().unwrap()
    }

    #[test]
    fn wraps() {
        assert_eq!(wrap(&BigInt::from(1i64 << 31), 32), BigInt::from(-(1i64 << 31)));
        assert_eq!(wrap(&BigInt::from(-1), 32), BigInt::from(-1));
        assert_eq!(eval(Operator::Add, 32, &[2147483647, 1]), -2147483648);
    }

    #[test]
    fn division() {
        assert_eq!(eval(Operator::SignedDiv, 32, &[-2147483648, -1]), -2147483648);
        assert_eq!(eval(Operator::SignedDiv, 32, &[-7, 2]), -3);
        assert_eq!(eval(Operator::SignedRem, 32, &[-7, 2]), -1);
        assert_eq!(eval(Operator::SignedRem, 32, &[7, -2]), 1);
        assert_eq!(eval(Operator::SignedRem, 32, &[-2147483648, -1]), 0);
        assert_eq!(
            oracle_eval(Operator::SignedDiv, 32, &[1, 0]),
            OracleResult::DivisionByZero
        );
    }

    #[test]
    fn shifts() {
        assert_eq!(eval(Operator::LeftShift, 32, &[2, 2]), 8);
        assert_eq!(eval(Operator::LeftShift, 32, &[1, 33]), 2);
        assert_eq!(eval(Operator::LeftShift, 64, &[1, 33]), 1 << 33);
        assert_eq!(eval(Operator::RightShift, 32, &[-8, 1]), -4);
        assert_eq!(eval(Operator::RightShift, 32, &[-1, 31]), -1);
        assert_eq!(eval(Operator::UnsignedRightShift, 32, &[-1, 28]), 15);
        assert_eq!(eval(Operator::UnsignedRightShift, 32, &[-1, -1]), 1);
    }

    #[test]
    fn logic_and_unary() {
        assert_eq!(eval(Operator::Xor, 32, &[-1, 1]), -2);
        assert_eq!(eval(Operator::And, 64, &[-2, 3]), 2);
        assert_eq!(eval(Operator::Not, 32, &[0]), -1);
        assert_eq!(eval(Operator::Abs, 32, &[-2147483648]), -2147483648);
        assert_eq!(
            eval(Operator::Negate, 64, &[i128::from(i64::MIN)]),
            i128::from(i64::MIN)
        );
        assert_eq!(eval(Operator::IntegerLessThan, 32, &[-1, 0]), 1);
    }
}
