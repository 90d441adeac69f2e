//! Arithmetic on precision values: carry combination, operand alignment,
//! and post-operation normalization.
//!
//! Binary operations always treat their operands as carrying independent
//! uncertainty. Operations between a value and itself have dedicated
//! entry points ([`self_subtract`], [`self_divide`], [`square`],
//! [`double`]); no aliasing detection is attempted.

use num_bigint::BigUint;
use rand::Rng;

use crate::config::{ArithmeticConfig, CarryPolicy};
use crate::value::{Carry, ErrorCode, PrecisionValue, HALF_RANGE_NUM, RANGE_DENOM};

/// Result `~` for `S1~1R1@E + S2~2R2@E`: equal carries keep the carry, an
/// unknown loses to a definite one, opposing definite carries resolve by
/// the larger range, and a tie is unknown.
fn combine_carries(c1: Carry, r1: u128, c2: Carry, r2: u128) -> Carry {
    match (c1, c2) {
        (Carry::Error(e), _) | (_, Carry::Error(e)) => Carry::Error(e),
        (a, b) if a == b => a,
        (Carry::Unknown, d) => d,
        (d, Carry::Unknown) => d,
        (a, b) => {
            if r1 > r2 {
                a
            } else if r2 > r1 {
                b
            } else {
                Carry::Unknown
            }
        }
    }
}

/// Carry of the signed value: the stored carry tracks the significand
/// magnitude, so it flips with the sign.
fn signed_carry(v: &PrecisionValue) -> Carry {
    if v.sign() < 0 {
        v.carry().negated()
    } else {
        v.carry()
    }
}

fn propagate_errors(a: &PrecisionValue, b: &PrecisionValue) -> Option<PrecisionValue> {
    if a.carry().is_error() {
        return Some(*a);
    }
    if b.carry().is_error() {
        return Some(*b);
    }
    None
}

/// Addition per `S1~1R1@E ± S2~2R2@E = (S1±S2)~(R1+R2)@E`; the operand
/// with the larger exponent is first rounded down to the other exponent.
pub fn add<R: Rng + ?Sized>(
    a: &PrecisionValue,
    b: &PrecisionValue,
    cfg: &ArithmeticConfig,
    rng: &mut R,
) -> PrecisionValue {
    if let Some(err) = propagate_errors(a, b) {
        return err;
    }
    let target = a.exponent().min(b.exponent());
    let a = a.round_down_to_exponent(target);
    let b = b.round_down_to_exponent(target);
    if let Some(err) = propagate_errors(&a, &b) {
        return err;
    }
    let (sa, sb) = match (to_signed(&a), to_signed(&b)) {
        (Some(x), Some(y)) => (x, y),
        _ => return PrecisionValue::error(ErrorCode::SignificandOverflow),
    };
    let sum = match sa.checked_add(sb) {
        Some(s) => s,
        None => return PrecisionValue::error(ErrorCode::SignificandOverflow),
    };
    let range = match a.range_num().checked_add(b.range_num()) {
        Some(r) => r,
        None => return PrecisionValue::error(ErrorCode::SignificandOverflow),
    };
    let combined = combine_carries(
        signed_carry(&a),
        a.range_num(),
        signed_carry(&b),
        b.range_num(),
    );
    let sign = if sum < 0 { -1 } else { 1 };
    let carry = if sign < 0 { combined.negated() } else { combined };
    PrecisionValue::new(sign, sum.unsigned_abs(), target, carry, range).normalize(cfg, rng)
}

pub fn subtract<R: Rng + ?Sized>(
    a: &PrecisionValue,
    b: &PrecisionValue,
    cfg: &ArithmeticConfig,
    rng: &mut R,
) -> PrecisionValue {
    add(a, &b.negated(), cfg, rng)
}

/// Subtracting an operand from itself results in precise 0.
pub fn self_subtract(a: &PrecisionValue) -> PrecisionValue {
    if a.carry().is_error() {
        return *a;
    }
    PrecisionValue::zero()
}

/// Doubling is exact power-of-2 scaling: precision is unchanged.
pub fn double<R: Rng + ?Sized>(
    a: &PrecisionValue,
    cfg: &ArithmeticConfig,
    rng: &mut R,
) -> PrecisionValue {
    multiply(a, &PrecisionValue::from_integer(2), cfg, rng)
}

fn to_signed(v: &PrecisionValue) -> Option<i128> {
    let s = i128::try_from(v.significand()).ok()?;
    Some(if v.sign() < 0 { -s } else { s })
}

/// The three uncertainty terms of a product, as range numerators at the
/// product exponent: `R1*S2^2`, `R2*S1^2` and `R1*R2`.
fn product_range_terms(a: &PrecisionValue, b: &PrecisionValue) -> (BigUint, BigUint, BigUint) {
    let s1 = BigUint::from(a.significand());
    let s2 = BigUint::from(b.significand());
    let r1 = BigUint::from(a.range_num());
    let r2 = BigUint::from(b.range_num());
    let t1 = &r1 * (&s2 * &s2);
    let t2 = &r2 * (&s1 * &s1);
    let cross = (&r1 * &r2 + BigUint::from(RANGE_DENOM - 1)) / RANGE_DENOM;
    (t1, t2, cross)
}

/// Rounds a wide intermediate up by deviation until its range fits the
/// normalized window, then packs it into a value.
fn normalize_wide<R: Rng + ?Sized>(
    sign: i8,
    mut s: BigUint,
    mut e: i32,
    mut carry: Carry,
    mut r: BigUint,
    cfg: &ArithmeticConfig,
    rng: &mut R,
) -> PrecisionValue {
    let upper = BigUint::from(cfg.window_upper_num());
    let one = BigUint::from(1u8);
    let half = BigUint::from(HALF_RANGE_NUM);
    let three = BigUint::from(3u8);
    while r >= upper {
        let odd = (&s & &one) == one;
        if odd {
            let up = match carry {
                Carry::Positive => true,
                Carry::Negative => false,
                Carry::Unknown => match cfg.carry_policy {
                    CarryPolicy::AlwaysPositive => true,
                    CarryPolicy::AlwaysNegative => false,
                    CarryPolicy::Random => rng.gen::<bool>(),
                },
                Carry::Error(code) => return PrecisionValue::error(code),
            };
            s >>= 1;
            if up {
                s += 1u8;
                carry = Carry::Negative;
            } else {
                carry = Carry::Positive;
            }
            r = (r + &three) >> 2;
            r += &half;
        } else {
            s >>= 1;
            r = (r + &three) >> 2;
        }
        e += 1;
    }
    let s = match u128::try_from(&s) {
        Ok(s) => s,
        Err(_) => return PrecisionValue::error(ErrorCode::SignificandOverflow),
    };
    let r = u128::try_from(&r).expect("range below window upper bound fits u128");
    PrecisionValue::new(sign, s, e, carry, r).normalize(cfg, rng)
}

/// Multiplication: `S = S1*S2`, `E = E1+E2`, range `R1*S2^2 + R2*S1^2 +
/// R1*R2`, carry taken from the dominant uncertainty term, normalized.
pub fn multiply<R: Rng + ?Sized>(
    a: &PrecisionValue,
    b: &PrecisionValue,
    cfg: &ArithmeticConfig,
    rng: &mut R,
) -> PrecisionValue {
    if let Some(err) = propagate_errors(a, b) {
        return err;
    }
    let sign = a.sign() * b.sign();
    let e = a.exponent() + b.exponent();
    let (t1, t2, cross) = product_range_terms(a, b);
    let carry = match t1.cmp(&t2) {
        std::cmp::Ordering::Greater => a.carry(),
        std::cmp::Ordering::Less => b.carry(),
        std::cmp::Ordering::Equal => {
            if a.carry() == b.carry() {
                a.carry()
            } else {
                Carry::Unknown
            }
        }
    };
    let r = t1 + t2 + cross;
    let s = BigUint::from(a.significand()) * BigUint::from(b.significand());
    normalize_wide(sign, s, e, carry, r, cfg, rng)
}

/// Self-multiplication widens by the squared-variable rule instead of the
/// independent-operand rule: range `4*R*S^2 + 3*R^2` at exponent `2E`.
pub fn square<R: Rng + ?Sized>(
    a: &PrecisionValue,
    cfg: &ArithmeticConfig,
    rng: &mut R,
) -> PrecisionValue {
    if a.carry().is_error() {
        return *a;
    }
    let s1 = BigUint::from(a.significand());
    let r1 = BigUint::from(a.range_num());
    let s = &s1 * &s1;
    let r = BigUint::from(4u8) * &r1 * &s
        + BigUint::from(3u8) * ((&r1 * &r1 + BigUint::from(RANGE_DENOM - 1)) / RANGE_DENOM);
    normalize_wide(1, s, 2 * a.exponent(), a.carry(), r, cfg, rng)
}

/// Nearest-integer quotient with the carry set by the rounding direction
/// (positive carry: representation below the true quotient).
fn quotient_nearest<R: Rng + ?Sized>(
    num: &BigUint,
    den: &BigUint,
    policy: CarryPolicy,
    rng: &mut R,
) -> (BigUint, Carry, bool) {
    let q = num / den;
    let rem = num - &q * den;
    if rem == BigUint::from(0u8) {
        return (q, Carry::Unknown, false);
    }
    let twice = &rem * 2u8;
    let round_up = match twice.cmp(den) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => match policy {
            CarryPolicy::AlwaysPositive => true,
            CarryPolicy::AlwaysNegative => false,
            CarryPolicy::Random => rng.gen::<bool>(),
        },
    };
    if round_up {
        (q + 1u8, Carry::Negative, true)
    } else {
        (q, Carry::Positive, true)
    }
}

/// `1 / (S2~R2@E2)`: the reciprocal range `R2/S2^4`, rounded down until
/// normalized; dividing the original by the result returns the original
/// up to one normalization quantum.
pub fn reciprocal<R: Rng + ?Sized>(
    b: &PrecisionValue,
    cfg: &ArithmeticConfig,
    rng: &mut R,
) -> PrecisionValue {
    if b.carry().is_error() {
        return *b;
    }
    if !b.is_significant() {
        return PrecisionValue::error(ErrorCode::DivByInsignificant);
    }
    let s2 = b.significand();
    if b.range_num() == 0 {
        if s2.is_power_of_two() {
            let shift = s2.trailing_zeros() as i32;
            return PrecisionValue::precise(b.sign(), 1, -b.exponent() - shift);
        }
        // Irrational-free but non-terminating binary quotient: keep about
        // a double's worth of bits and mark it nearly precise.
        let k = 53 + bits_u128(s2) as i32;
        let num = BigUint::from(1u8) << k as u32;
        let (q, carry, inexact) = quotient_nearest(&num, &BigUint::from(s2), cfg.carry_policy, rng);
        let s = u128::try_from(&q).expect("reciprocal quotient fits");
        let r = if inexact { HALF_RANGE_NUM } else { 0 };
        return PrecisionValue::new(b.sign(), s, -b.exponent() - k, carry, r);
    }
    let den = {
        let s = BigUint::from(s2);
        let sq = &s * &s;
        &sq * &sq
    };
    let r2 = BigUint::from(b.range_num());
    let upper = BigUint::from(cfg.window_upper_num());
    let lower = BigUint::from(cfg.window_lower_num());
    let range_at = |k: u32| -> BigUint { ((&r2 << (2 * k)) + &den - 1u8) / &den };
    let mut k = {
        let target_bits = den.bits() as i64 + cfg.window_upper_num().ilog2() as i64 - 1
            - r2.bits() as i64;
        (target_bits.max(0) as u32) / 2
    };
    while range_at(k) >= upper {
        if k == 0 {
            break;
        }
        k -= 1;
    }
    while range_at(k) < lower {
        k += 1;
    }
    let range = range_at(k);
    let (q, qcarry, inexact) = quotient_nearest(
        &(BigUint::from(1u8) << k),
        &BigUint::from(s2),
        cfg.carry_policy,
        rng,
    );
    let s = match u128::try_from(&q) {
        Ok(s) => s,
        Err(_) => return PrecisionValue::error(ErrorCode::SignificandOverflow),
    };
    let mut range = u128::try_from(&range).expect("normalized range fits");
    // The divisor's carry enters negated (a high divisor means a low
    // quotient); the integerization error is weighted like any other term.
    let mut carry = b.carry().negated();
    if inexact {
        carry = combine_carries(carry, range, qcarry, HALF_RANGE_NUM);
        range += HALF_RANGE_NUM;
    }
    PrecisionValue::new(b.sign(), s, -b.exponent() - k as i32, carry, range).normalize(cfg, rng)
}

/// Division `a / b`, computed as `a * reciprocal(b)` when the divisor is
/// imprecise; a precise divisor uses the direct scaling rule with the
/// result rounded down until normalized.
pub fn divide<R: Rng + ?Sized>(
    a: &PrecisionValue,
    b: &PrecisionValue,
    cfg: &ArithmeticConfig,
    rng: &mut R,
) -> PrecisionValue {
    if let Some(err) = propagate_errors(a, b) {
        return err;
    }
    if !b.is_significant() {
        return PrecisionValue::error(ErrorCode::DivByInsignificant);
    }
    if b.range_num() > 0 {
        let rec = reciprocal(b, cfg, rng);
        return multiply(a, &rec, cfg, rng);
    }
    let sign = a.sign() * b.sign();
    let s1 = a.significand();
    let s2 = b.significand();
    let e = a.exponent() - b.exponent();
    if a.range_num() == 0 {
        if s2 != 0 && s1 % s2 == 0 {
            return PrecisionValue::precise(sign, s1 / s2, e);
        }
        if s2.is_power_of_two() {
            let shift = s2.trailing_zeros() as i32;
            return PrecisionValue::precise(sign, s1, e - shift);
        }
        let k = (53 + bits_u128(s2) as i32 - bits_u128(s1.max(1)) as i32).max(1) as u32;
        let num = BigUint::from(s1) << k;
        let (q, carry, inexact) = quotient_nearest(&num, &BigUint::from(s2), cfg.carry_policy, rng);
        let s = match u128::try_from(&q) {
            Ok(s) => s,
            Err(_) => return PrecisionValue::error(ErrorCode::SignificandOverflow),
        };
        let r = if inexact { HALF_RANGE_NUM } else { 0 };
        return PrecisionValue::new(sign, s, e - k as i32, carry, r);
    }
    // Imprecise dividend over a precise divisor: R' = R1/S2^2, rounded
    // down until normalized.
    let den = {
        let s = BigUint::from(s2);
        &s * &s
    };
    let r1 = BigUint::from(a.range_num());
    let upper = BigUint::from(cfg.window_upper_num());
    let lower = BigUint::from(cfg.window_lower_num());
    let range_at = |k: u32| -> BigUint { ((&r1 << (2 * k)) + &den - 1u8) / &den };
    let mut k = {
        let target_bits =
            den.bits() as i64 + cfg.window_upper_num().ilog2() as i64 - 1 - r1.bits() as i64;
        (target_bits.max(0) as u32) / 2
    };
    while range_at(k) >= upper {
        if k == 0 {
            break;
        }
        k -= 1;
    }
    while range_at(k) < lower {
        k += 1;
    }
    let range = range_at(k);
    let (q, qcarry, inexact) = quotient_nearest(
        &(BigUint::from(s1) << k),
        &BigUint::from(s2),
        cfg.carry_policy,
        rng,
    );
    let s = match u128::try_from(&q) {
        Ok(s) => s,
        Err(_) => return PrecisionValue::error(ErrorCode::SignificandOverflow),
    };
    let mut range = u128::try_from(&range).expect("normalized range fits");
    let mut carry = a.carry();
    if inexact {
        carry = combine_carries(carry, range, qcarry, HALF_RANGE_NUM);
        range += HALF_RANGE_NUM;
    }
    PrecisionValue::new(sign, s, e - k as i32, carry, range).normalize(cfg, rng)
}

/// Dividing an operand by itself results in precise 1.
pub fn self_divide(a: &PrecisionValue) -> PrecisionValue {
    if a.carry().is_error() {
        return *a;
    }
    PrecisionValue::one()
}

fn bits_u128(x: u128) -> u32 {
    128 - x.leading_zeros()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComparisonResult {
    Less,
    Equal,
    Greater,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComparePolicy {
    ByExpectedValue,
    /// Orders only when the means differ by more than `level` combined
    /// deviations.
    ByConfidence(f64),
}

pub fn compare(
    a: &PrecisionValue,
    b: &PrecisionValue,
    policy: ComparePolicy,
    cfg: &ArithmeticConfig,
) -> ComparisonResult {
    if a.carry().is_error() || b.carry().is_error() {
        return ComparisonResult::Indeterminate;
    }
    match policy {
        ComparePolicy::ByExpectedValue => compare_expected(a, b),
        ComparePolicy::ByConfidence(level) => {
            let diff = a.expected() - b.expected();
            let combined = (a.deviation(cfg).powi(2) + b.deviation(cfg).powi(2)).sqrt();
            if diff.abs() > level * combined {
                if diff < 0.0 {
                    ComparisonResult::Less
                } else {
                    ComparisonResult::Greater
                }
            } else {
                ComparisonResult::Indeterminate
            }
        }
    }
}

fn compare_expected(a: &PrecisionValue, b: &PrecisionValue) -> ComparisonResult {
    use std::cmp::Ordering;
    let za = a.significand() == 0;
    let zb = b.significand() == 0;
    let ord = match (za, zb, a.sign(), b.sign()) {
        (true, true, _, _) => Ordering::Equal,
        (true, false, _, sb) => {
            if sb > 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
        (false, true, sa, _) => {
            if sa > 0 {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
        (false, false, sa, sb) if sa != sb => {
            if sa < sb {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
        (false, false, sa, _) => {
            let mag = compare_magnitude(a, b);
            if sa > 0 {
                mag
            } else {
                mag.reverse()
            }
        }
    };
    match ord {
        Ordering::Less => ComparisonResult::Less,
        Ordering::Equal => ComparisonResult::Equal,
        Ordering::Greater => ComparisonResult::Greater,
    }
}

fn compare_magnitude(a: &PrecisionValue, b: &PrecisionValue) -> std::cmp::Ordering {
    let wa = bits_u128(a.significand()) as i64 + a.exponent() as i64;
    let wb = bits_u128(b.significand()) as i64 + b.exponent() as i64;
    if wa != wb {
        return wa.cmp(&wb);
    }
    // Same magnitude width: align exactly via big integers.
    let (na, nb) = if a.exponent() >= b.exponent() {
        (
            BigUint::from(a.significand()) << (a.exponent() - b.exponent()) as u32,
            BigUint::from(b.significand()),
        )
    } else {
        (
            BigUint::from(a.significand()),
            BigUint::from(b.significand()) << (b.exponent() - a.exponent()) as u32,
        )
    };
    na.cmp(&nb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ArithmeticConfig, CarryPolicy};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg0() -> ArithmeticConfig {
        ArithmeticConfig::new(16, 0, CarryPolicy::Random, 7)
    }

    #[test]
    fn addition_of_symmetric_roundings_is_precise_one() {
        // 1/3 + 2/3 with deviation 0.001 each: the two rounded-up thirds
        // carry opposite carries and sum to an exact 1024@-10.
        let cfg = cfg0();
        let mut rng = cfg.rng();
        let a = PrecisionValue::new(1, 341, -10, Carry::Positive, 1611);
        let b = PrecisionValue::new(1, 683, -10, Carry::Negative, 1611);
        let sum = add(&a, &b, &cfg, &mut rng);
        assert_eq!(sum.render(), "1024?12.58@-10");
        assert!((sum.expected() - 1.0).abs() < 1e-12);
        assert!((sum.deviation(&cfg) - 0.0014).abs() < 5e-5);
    }

    #[test]
    fn addition_identity_and_carry_table() {
        let cfg = cfg0();
        let mut rng = cfg.rng();
        let x = PrecisionValue::new(1, 512, -10, Carry::Positive, 1611);
        let zero = PrecisionValue::zero();
        let sum = add(&x, &zero, &cfg, &mut rng);
        assert_eq!(sum.expected(), x.expected());
        assert_eq!(sum.range_num(), x.range_num());
        assert_eq!(sum.carry(), x.carry());

        let a = PrecisionValue::new(1, 5, 0, Carry::Positive, 2 * 256);
        let b = PrecisionValue::new(1, 3, 0, Carry::Positive, 256);
        let sum = add(&a, &b, &cfg, &mut rng);
        assert_eq!(sum.render(), "8+3.00@0");
    }

    #[test]
    fn subtraction_carry_and_imprecise_zero() {
        let cfg = cfg0();
        let mut rng = cfg.rng();
        let a = PrecisionValue::new(1, 5, 0, Carry::Positive, 2 * 256);
        let b = PrecisionValue::new(1, 3, 0, Carry::Negative, 256);
        let diff = subtract(&a, &b, &cfg, &mut rng);
        assert_eq!(diff.render(), "2+3.00@0");

        let x = PrecisionValue::new(1, 5, 0, Carry::Unknown, 2 * 256);
        let d = subtract(&x, &x.clone(), &cfg, &mut rng);
        assert_eq!(d.significand(), 0);
        assert_eq!(d.range_num(), 4 * 256);
        assert!(!d.is_significant());

        assert_eq!(self_subtract(&x), PrecisionValue::zero());
    }

    #[test]
    fn alignment_rounds_the_larger_exponent_down() {
        let cfg = cfg0();
        let mut rng = cfg.rng();
        let a = PrecisionValue::new(1, 3, 2, Carry::Unknown, HALF_RANGE_NUM);
        let b = PrecisionValue::new(1, 1, 0, Carry::Unknown, 256);
        let sum = add(&a, &b, &cfg, &mut rng);
        // 3@2 rounds down to 12@0 with its range scaled by 4 per step.
        assert_eq!(sum.expected(), 13.0);
        assert_eq!(sum.range_num(), 16 * HALF_RANGE_NUM + 256);
        assert_eq!(sum.exponent(), 0);
    }

    #[test]
    fn multiplication_examples() {
        let cfg = cfg0();
        let mut rng = cfg.rng();
        let a = PrecisionValue::new(1, 3, 0, Carry::Unknown, HALF_RANGE_NUM);
        let five = PrecisionValue::from_integer(5);
        let p = multiply(&a, &five, &cfg, &mut rng);
        assert_eq!(p.significand(), 15);
        assert_eq!(p.range_num(), 25 * HALF_RANGE_NUM);
        assert_eq!(p.exponent(), 0);
        // Deviation scaled five-fold.
        assert!((p.deviation(&cfg) / a.deviation(&cfg) - 5.0).abs() < 1e-12);

        let x = PrecisionValue::new(1, 512, -10, Carry::Positive, 1611);
        let ident = multiply(&x, &PrecisionValue::one(), &cfg, &mut rng);
        assert_eq!(ident, x);
    }

    #[test]
    fn power_of_two_scaling_is_exact() {
        let cfg = cfg0();
        let mut rng = cfg.rng();
        let x = PrecisionValue::new(1, 512, -10, Carry::Positive, 1611);
        let two = PrecisionValue::from_exact_f64(2.0);
        let scaled = multiply(&x, &two, &cfg, &mut rng);
        assert_eq!(scaled.significand(), 512);
        assert_eq!(scaled.exponent(), -9);
        assert_eq!(scaled.range_num(), 1611);
        assert_eq!(scaled.carry(), Carry::Positive);
        // Same through an unreduced integer 2.
        let scaled = multiply(&x, &PrecisionValue::from_integer(2), &cfg, &mut rng);
        assert_eq!(scaled.significand(), 512);
        assert_eq!(scaled.exponent(), -9);
        assert_eq!(scaled.range_num(), 1611);
        let d = double(&x, &cfg, &mut rng);
        assert_eq!(d, scaled);
    }

    #[test]
    fn square_is_wider_than_independent_product() {
        let cfg = cfg0();
        let mut rng = cfg.rng();
        let k = PrecisionValue::from_integer(9);
        let sq = square(&k, &cfg, &mut rng);
        assert_eq!(sq.render(), "81@0");

        let z = PrecisionValue::new(1, 0, -3, Carry::Unknown, 2 * 256);
        let zz = square(&z, &cfg, &mut rng);
        assert_eq!(zz.significand(), 0);
        assert_eq!(zz.range_num(), 3 * 4 * 256);
        assert_eq!(zz.exponent(), -6);

        let x = PrecisionValue::new(1, 100, -5, Carry::Unknown, 1200);
        let sq = square(&x, &cfg, &mut rng);
        let prod = multiply(&x, &x.clone(), &cfg, &mut rng);
        assert!(sq.deviation(&cfg) > prod.deviation(&cfg));
    }

    #[test]
    fn division_exact_and_self_rules() {
        let cfg = cfg0();
        let mut rng = cfg.rng();
        let a = PrecisionValue::from_integer(12);
        let b = PrecisionValue::from_integer(3);
        let q = divide(&a, &b, &cfg, &mut rng);
        assert_eq!(q.render(), "4@0");

        let x = PrecisionValue::new(1, 512, -10, Carry::Unknown, 1611);
        assert_eq!(self_divide(&x).render(), "1@0");

        let zero_ish = PrecisionValue::new(1, 2, 0, Carry::Unknown, 6 * 256);
        let res = divide(&a, &zero_ish, &cfg, &mut rng);
        assert_eq!(res.error_code(), Some(ErrorCode::DivByInsignificant));
    }

    #[test]
    fn reciprocal_of_reciprocal_restores_value() {
        let cfg = cfg0();
        let mut rng = cfg.rng();
        let x = PrecisionValue::new(1, 512, -10, Carry::Unknown, 1611);
        let r = reciprocal(&x, &cfg, &mut rng);
        assert!((r.expected() - 2.0).abs() < 1e-9);
        let rr = reciprocal(&r, &cfg, &mut rng);
        assert_eq!(rr.significand(), x.significand());
        assert_eq!(rr.exponent(), x.exponent());
        let drift = (rr.range_num() as f64 - x.range_num() as f64).abs();
        assert!(drift <= HALF_RANGE_NUM as f64 + 2.0, "drift {drift}");
    }

    #[test]
    fn division_matches_scaled_reciprocal() {
        let cfg = cfg0();
        let mut rng = cfg.rng();
        let one = PrecisionValue::one();
        for (s, e, r) in [(512u128, -10i32, 1611u128), (777, -4, 2900), (9, 3, 1100)] {
            let x = PrecisionValue::new(1, s, e, Carry::Unknown, r);
            let via_div = divide(&one, &x, &cfg, &mut rng);
            let via_rec = reciprocal(&x, &cfg, &mut rng);
            assert!((via_div.expected() - via_rec.expected()).abs() <= via_rec.bounding_range());
        }
    }

    #[test]
    fn motivating_large_product_difference_is_insignificant() {
        let cfg = ArithmeticConfig::default();
        let mut rng = cfg.rng();
        let a = PrecisionValue::from_float(64919121.0);
        let b = PrecisionValue::from_float(205117922.0);
        let c = PrecisionValue::from_float(159018721.0);
        let d = PrecisionValue::from_float(83739041.0);
        let left = multiply(&a, &b, &cfg, &mut rng);
        let right = multiply(&c, &d, &cfg, &mut rng);
        let diff = subtract(&left, &right, &cfg, &mut rng);
        assert!(!diff.is_significant());
        // The true answer 1 lies inside the bounding range.
        assert!((diff.expected() - 1.0).abs() <= diff.bounding_range());
    }

    #[test]
    fn comparison_policies() {
        let cfg = cfg0();
        let mut rng = cfg.rng();
        let x = PrecisionValue::from_mean_deviation(0.5, 0.001, &cfg, &mut rng);
        assert_eq!(
            compare(&x, &x.clone(), ComparePolicy::ByExpectedValue, &cfg),
            ComparisonResult::Equal
        );
        let lo = PrecisionValue::from_mean_deviation(0.0, 0.01, &cfg, &mut rng);
        let hi = PrecisionValue::from_mean_deviation(1.0, 0.01, &cfg, &mut rng);
        assert_eq!(
            compare(&lo, &hi, ComparePolicy::ByConfidence(6.0), &cfg),
            ComparisonResult::Less
        );
        let nearby = PrecisionValue::from_mean_deviation(0.01, 0.01, &cfg, &mut rng);
        assert_eq!(
            compare(&lo, &nearby, ComparePolicy::ByConfidence(6.0), &cfg),
            ComparisonResult::Indeterminate
        );
        assert_eq!(
            compare(&lo, &hi, ComparePolicy::ByExpectedValue, &cfg),
            ComparisonResult::Less
        );
    }

    #[test]
    fn multiplication_precision_follows_closed_form() {
        let cfg = cfg0();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut op_rng = cfg.rng();
        for _ in 0..1000 {
            let m1 = rng.gen_range(0.5..4.0);
            let m2 = rng.gen_range(0.5..4.0);
            let p1 = 10f64.powf(rng.gen_range(-6.0..-2.0));
            let p2 = 10f64.powf(rng.gen_range(-6.0..-2.0));
            let a = PrecisionValue::from_mean_deviation(m1, m1 * p1, &cfg, &mut op_rng);
            let b = PrecisionValue::from_mean_deviation(m2, m2 * p2, &cfg, &mut op_rng);
            let pa = a.deviation(&cfg) / a.expected().abs();
            let pb = b.deviation(&cfg) / b.expected().abs();
            let prod = multiply(&a, &b, &cfg, &mut op_rng);
            let measured = prod.deviation(&cfg) / prod.expected().abs();
            let closed = (pa * pa + pb * pb + 6.0 * pa * pa * pb * pb).sqrt();
            let ratio = measured / closed;
            assert!(
                (0.45..2.2).contains(&ratio),
                "multiply precision ratio {ratio}"
            );

            let q = divide(&a, &b, &cfg, &mut op_rng);
            let measured = q.deviation(&cfg) / q.expected().abs();
            let ratio = measured / closed;
            assert!(
                (0.45..2.2).contains(&ratio),
                "divide precision ratio {ratio}"
            );
        }
    }

}
