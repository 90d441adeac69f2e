//! Reference interval arithmetic.
//!
//! A value is a pair `[lo, hi]` that absolutely bounds the true value.
//! Endpoints are rounded outward by one ulp after every operation so that
//! containment survives the underlying double rounding.

use crate::value::ErrorCode;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IntervalValue {
    Val { lo: f64, hi: f64 },
    Error(ErrorCode),
}

impl IntervalValue {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        IntervalValue::Val { lo, hi }
    }

    pub fn exact(x: f64) -> Self {
        IntervalValue::Val { lo: x, hi: x }
    }

    pub fn error(code: ErrorCode) -> Self {
        IntervalValue::Error(code)
    }

    pub fn endpoints(&self) -> Option<(f64, f64)> {
        match self {
            IntervalValue::Val { lo, hi } => Some((*lo, *hi)),
            IntervalValue::Error(_) => None,
        }
    }

    pub fn error_code(&self) -> Option<ErrorCode> {
        match self {
            IntervalValue::Error(code) => Some(*code),
            _ => None,
        }
    }

    pub fn midpoint(&self) -> f64 {
        match self {
            IntervalValue::Val { lo, hi } => 0.5 * (lo + hi),
            IntervalValue::Error(_) => f64::NAN,
        }
    }

    pub fn half_width(&self) -> f64 {
        match self {
            IntervalValue::Val { lo, hi } => 0.5 * (hi - lo),
            IntervalValue::Error(_) => f64::NAN,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match self {
            IntervalValue::Val { lo, hi } => *lo <= x && x <= *hi,
            IntervalValue::Error(_) => false,
        }
    }

    /// Significant iff the interval excludes zero.
    pub fn is_significant(&self) -> bool {
        match self {
            IntervalValue::Val { lo, hi } => *lo > 0.0 || *hi < 0.0,
            IntervalValue::Error(_) => false,
        }
    }
}

fn outward(lo: f64, hi: f64) -> IntervalValue {
    IntervalValue::Val {
        lo: lo.next_down(),
        hi: hi.next_up(),
    }
}

fn both(a: &IntervalValue, b: &IntervalValue) -> Result<((f64, f64), (f64, f64)), IntervalValue> {
    match (a, b) {
        (IntervalValue::Error(c), _) => Err(IntervalValue::Error(*c)),
        (_, IntervalValue::Error(c)) => Err(IntervalValue::Error(*c)),
        (IntervalValue::Val { lo: a0, hi: a1 }, IntervalValue::Val { lo: b0, hi: b1 }) => {
            Ok(((*a0, *a1), (*b0, *b1)))
        }
    }
}

pub fn add(a: &IntervalValue, b: &IntervalValue) -> IntervalValue {
    match both(a, b) {
        Err(e) => e,
        Ok(((a0, a1), (b0, b1))) => outward(a0 + b0, a1 + b1),
    }
}

pub fn sub(a: &IntervalValue, b: &IntervalValue) -> IntervalValue {
    match both(a, b) {
        Err(e) => e,
        Ok(((a0, a1), (b0, b1))) => outward(a0 - b1, a1 - b0),
    }
}

pub fn mul(a: &IntervalValue, b: &IntervalValue) -> IntervalValue {
    match both(a, b) {
        Err(e) => e,
        Ok(((a0, a1), (b0, b1))) => {
            let products = [a0 * b0, a0 * b1, a1 * b0, a1 * b1];
            let lo = products.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = products.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            outward(lo, hi)
        }
    }
}

pub fn div(a: &IntervalValue, b: &IntervalValue) -> IntervalValue {
    match both(a, b) {
        Err(e) => e,
        Ok(((a0, a1), (b0, b1))) => {
            if b0 <= 0.0 && b1 >= 0.0 {
                return IntervalValue::Error(ErrorCode::DivByInsignificant);
            }
            let quotients = [a0 / b0, a0 / b1, a1 / b0, a1 / b1];
            let lo = quotients.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = quotients.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            outward(lo, hi)
        }
    }
}

/// Multiplication of an interval with itself: the lower endpoint is
/// floored at zero.
pub fn self_mul(a: &IntervalValue) -> IntervalValue {
    match a {
        IntervalValue::Error(c) => IntervalValue::Error(*c),
        IntervalValue::Val { .. } => match mul(a, a) {
            IntervalValue::Val { lo, hi } => IntervalValue::Val {
                lo: lo.max(0.0),
                hi,
            },
            e => e,
        },
    }
}

pub fn neg(a: &IntervalValue) -> IntervalValue {
    match a {
        IntervalValue::Error(c) => IntervalValue::Error(*c),
        IntervalValue::Val { lo, hi } => IntervalValue::Val { lo: -hi, hi: -lo },
    }
}

/// Square root; an interval touching or crossing zero has no significant
/// square root.
pub fn sqrt(a: &IntervalValue) -> IntervalValue {
    match a {
        IntervalValue::Error(c) => IntervalValue::Error(*c),
        IntervalValue::Val { lo, hi } => {
            if *lo <= 0.0 {
                return IntervalValue::Error(ErrorCode::SqrtOfInsignificant);
            }
            outward(lo.sqrt(), hi.sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> IntervalValue {
        IntervalValue::new(lo, hi)
    }

    fn close(v: &IntervalValue, lo: f64, hi: f64) {
        let (a, b) = v.endpoints().unwrap();
        assert!((a - lo).abs() <= 1e-12 && (b - hi).abs() <= 1e-12, "{v:?}");
        assert!(a <= lo && b >= hi, "not outward: {v:?}");
    }

    #[test]
    fn endpoint_rules() {
        close(&add(&iv(1.0, 2.0), &iv(3.0, 5.0)), 4.0, 7.0);
        close(&sub(&iv(1.0, 2.0), &iv(3.0, 5.0)), -4.0, -1.0);
        close(&mul(&iv(-1.0, 2.0), &iv(3.0, 5.0)), -5.0, 10.0);
        close(&div(&iv(1.0, 2.0), &iv(4.0, 8.0)), 0.125, 0.5);
    }

    #[test]
    fn self_multiplication_floors_at_zero() {
        let sq = self_mul(&iv(-1.0, 2.0));
        let (lo, hi) = sq.endpoints().unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi >= 4.0 && hi < 4.0 + 1e-12);
    }

    #[test]
    fn zero_straddling_divisor_is_an_error() {
        let q = div(&iv(1.0, 2.0), &iv(-1.0, 1.0));
        assert_eq!(q.error_code(), Some(ErrorCode::DivByInsignificant));
    }

    #[test]
    fn dependence_problem_witness() {
        // x^2 - x versus its completed square (x - 1/2)^2 - 1/4 on
        // [0.44, 0.56]: the naive form is dozens of times wider.
        let x = iv(0.44, 0.56);
        let naive = sub(&self_mul(&x), &x);
        let half = IntervalValue::exact(0.5);
        let quarter = IntervalValue::exact(0.25);
        let completed = sub(&self_mul(&sub(&x, &half)), &quarter);
        let ratio = naive.half_width() / completed.half_width();
        assert!(ratio > 50.0, "ratio {ratio}");
    }

    #[test]
    fn significance_and_errors() {
        assert!(iv(1.0, 2.0).is_significant());
        assert!(!iv(-0.5, 0.5).is_significant());
        assert_eq!(
            sqrt(&iv(-1.0, 1.0)).error_code(),
            Some(ErrorCode::SqrtOfInsignificant)
        );
        let e = add(&IntervalValue::error(ErrorCode::ZeroTrap), &iv(0.0, 1.0));
        assert_eq!(e.error_code(), Some(ErrorCode::ZeroTrap));
    }
}
