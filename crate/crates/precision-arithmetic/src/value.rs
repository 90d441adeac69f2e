//! The precision value representation `S~R@E` and its rounding rules.
//!
//! A value is a signed integer significand `S` at a binary exponent `E`,
//! a carry `~` recording the sign of the accumulated rounding error
//! (positive carry means the true value sits above the representation),
//! and a bounding range `R` for that error in units of the significand LSB.
//! `R` is stored as an integer numerator over a fixed denominator of 256.

use rand::Rng;
use std::fmt;

use crate::config::{ArithmeticConfig, CarryPolicy};

/// Fixed denominator of the bounding-range grid.
pub const RANGE_DENOM: u128 = 256;
/// Numerator equal to one half on the range grid.
pub const HALF_RANGE_NUM: u128 = RANGE_DENOM / 2;

/// Error codes carried inside a value; an operand error transfers to the
/// result unchanged so illegal operations can be traced to their source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    DivByInsignificant,
    SqrtOfInsignificant,
    NonfiniteInput,
    NegativeDeviation,
    SignificandOverflow,
    ZeroTrap,
}

impl ErrorCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorCode::DivByInsignificant => "DIV_BY_INSIGNIFICANT",
            ErrorCode::SqrtOfInsignificant => "SQRT_OF_INSIGNIFICANT",
            ErrorCode::NonfiniteInput => "NONFINITE_INPUT",
            ErrorCode::NegativeDeviation => "NEGATIVE_DEVIATION",
            ErrorCode::SignificandOverflow => "SIGNIFICAND_OVERFLOW",
            ErrorCode::ZeroTrap => "ZERO_TRAP",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sign of the accumulated rounding error of the significand magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Carry {
    Positive,
    Negative,
    Unknown,
    Error(ErrorCode),
}

impl Carry {
    pub fn negated(self) -> Carry {
        match self {
            Carry::Positive => Carry::Negative,
            Carry::Negative => Carry::Positive,
            other => other,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Carry::Error(_))
    }
}

/// Which invariant a single round-up preserves: half the range or half
/// the deviation (a quarter of the range).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundUpMode {
    ByRange,
    ByDeviation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionValue {
    sign: i8,
    significand: u128,
    exponent: i32,
    carry: Carry,
    /// Bounding range numerator over [`RANGE_DENOM`].
    range_num: u128,
}

impl PrecisionValue {
    pub fn new(sign: i8, significand: u128, exponent: i32, carry: Carry, range_num: u128) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        let sign = if significand == 0 && !carry.is_error() {
            1
        } else {
            sign
        };
        Self {
            sign,
            significand,
            exponent,
            carry,
            range_num,
        }
    }

    pub fn precise(sign: i8, significand: u128, exponent: i32) -> Self {
        Self::new(sign, significand, exponent, Carry::Unknown, 0)
    }

    pub fn error(code: ErrorCode) -> Self {
        Self {
            sign: 1,
            significand: 0,
            exponent: 0,
            carry: Carry::Error(code),
            range_num: 0,
        }
    }

    pub fn zero() -> Self {
        Self::precise(1, 0, 0)
    }

    pub fn one() -> Self {
        Self::precise(1, 1, 0)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn significand(&self) -> u128 {
        self.significand
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn carry(&self) -> Carry {
        self.carry
    }

    pub fn range_num(&self) -> u128 {
        self.range_num
    }

    pub fn error_code(&self) -> Option<ErrorCode> {
        match self.carry {
            Carry::Error(code) => Some(code),
            _ => None,
        }
    }

    /// A precise value has no rounding error.
    pub fn is_precise(&self) -> bool {
        self.range_num == 0 && !self.carry.is_error()
    }

    /// Imprecise but with a range below the normalized window.
    pub fn is_nearly_precise(&self, cfg: &ArithmeticConfig) -> bool {
        self.range_num > 0 && self.range_num < cfg.window_lower_num()
    }

    pub fn is_normalized(&self, cfg: &ArithmeticConfig) -> bool {
        self.range_num >= cfg.window_lower_num() && self.range_num < cfg.window_upper_num()
    }

    /// Significant iff the bounding interval `[x - R*2^E, x + R*2^E]`
    /// excludes zero, i.e. `S > R` strictly.
    pub fn is_significant(&self) -> bool {
        if self.carry.is_error() {
            return false;
        }
        match self.significand.checked_mul(RANGE_DENOM) {
            Some(scaled) => scaled > self.range_num,
            None => true,
        }
    }

    /// Mathematically expected value `sign * S * 2^E` as a double.
    pub fn expected(&self) -> f64 {
        if self.carry.is_error() {
            return f64::NAN;
        }
        self.sign as f64 * (self.significand as f64) * exp2i(self.exponent)
    }

    /// Uncertainty deviation `sqrt(R/6 * 2^-chi) * 2^(E+chi)`.
    pub fn deviation(&self, cfg: &ArithmeticConfig) -> f64 {
        if self.carry.is_error() {
            return f64::NAN;
        }
        let r = self.range_num as f64 / RANGE_DENOM as f64;
        (r / 6.0 * exp2i(-(cfg.chi as i32))).sqrt() * exp2i(self.exponent + cfg.chi as i32)
    }

    /// Uncertainty bounding range `R * 2^E`.
    pub fn bounding_range(&self) -> f64 {
        if self.carry.is_error() {
            return f64::NAN;
        }
        (self.range_num as f64 / RANGE_DENOM as f64) * exp2i(self.exponent)
    }

    pub fn negated(&self) -> Self {
        let mut v = *self;
        if v.significand != 0 || v.carry.is_error() {
            v.sign = -v.sign;
        }
        v
    }

    /// One application of the round-up rule: the exponent is incremented
    /// and the significand halves, with an odd significand resolved by the
    /// carry so the new half-LSB error cancels the tracked one.
    pub fn round_up_once<R: Rng + ?Sized>(
        &self,
        mode: RoundUpMode,
        policy: CarryPolicy,
        rng: &mut R,
    ) -> Self {
        if self.carry.is_error() {
            return *self;
        }
        let odd = self.significand & 1 == 1;
        let (new_s, new_carry) = if !odd {
            (self.significand / 2, self.carry)
        } else {
            let up = match self.carry {
                Carry::Positive => true,
                Carry::Negative => false,
                Carry::Unknown => match policy {
                    CarryPolicy::AlwaysPositive => true,
                    CarryPolicy::AlwaysNegative => false,
                    CarryPolicy::Random => rng.gen::<bool>(),
                },
                Carry::Error(_) => unreachable!(),
            };
            if up {
                (self.significand / 2 + 1, Carry::Negative)
            } else {
                (self.significand / 2, Carry::Positive)
            }
        };
        let mut new_r = match mode {
            // Inexact numerators round up so the range never under-reports.
            RoundUpMode::ByRange => self.range_num.div_ceil(2),
            RoundUpMode::ByDeviation => self.range_num.div_ceil(4),
        };
        if odd {
            new_r += HALF_RANGE_NUM;
        }
        Self::new(self.sign, new_s, self.exponent + 1, new_carry, new_r)
    }

    /// One application of the round-down rule: `S~R@E` becomes `2S~4R@E-1`.
    pub fn round_down_once(&self) -> Self {
        if self.carry.is_error() {
            return *self;
        }
        let (s, r) = match (
            self.significand.checked_mul(2),
            self.range_num.checked_mul(4),
        ) {
            (Some(s), Some(r)) => (s, r),
            _ => return Self::error(ErrorCode::SignificandOverflow),
        };
        Self::new(self.sign, s, self.exponent - 1, self.carry, r)
    }

    /// Round down repeatedly until the exponent reaches `target` (<= E).
    pub fn round_down_to_exponent(&self, target: i32) -> Self {
        let mut v = *self;
        while !v.carry.is_error() && v.exponent > target {
            v = v.round_down_once();
        }
        v
    }

    /// Round up by deviation until the stored range is inside the
    /// normalized window. Never rounds down: a nearly precise value is
    /// left untouched.
    pub fn normalize<R: Rng + ?Sized>(&self, cfg: &ArithmeticConfig, rng: &mut R) -> Self {
        let mut v = *self;
        let upper = cfg.window_upper_num();
        while !v.carry.is_error() && v.range_num >= upper {
            v = v.round_up_once(RoundUpMode::ByDeviation, cfg.carry_policy, rng);
        }
        v
    }

    /// An integer is a precise value `S@0`.
    pub fn from_integer(i: i128) -> Self {
        let sign = if i < 0 { -1 } else { 1 };
        Self::precise(sign, i.unsigned_abs(), 0)
    }

    /// A binary64 value holds its significand to half a bit, so the cast
    /// is the nearly precise value `S?1/2@E` with the exact decoded fields.
    /// Zero casts at the unit-scale exponent rather than the subnormal
    /// floor, so it aligns against ordinary operands.
    pub fn from_float(x: f64) -> Self {
        if !x.is_finite() {
            return Self::error(ErrorCode::NonfiniteInput);
        }
        if x == 0.0 {
            return Self::new(1, 0, -52, Carry::Unknown, HALF_RANGE_NUM);
        }
        let (sign, s, e) = decode_f64(x);
        Self::new(sign, s as u128, e, Carry::Unknown, HALF_RANGE_NUM)
    }

    /// A double that is an exact mathematical result decodes to a precise
    /// value with the significand reduced to odd (or zero).
    pub fn from_exact_f64(x: f64) -> Self {
        if !x.is_finite() {
            return Self::error(ErrorCode::NonfiniteInput);
        }
        let (sign, mut s, mut e) = decode_f64(x);
        while s != 0 && s & 1 == 0 {
            s >>= 1;
            e += 1;
        }
        Self::precise(sign, s as u128, if s == 0 { 0 } else { e })
    }

    /// Initializes from a mean-deviation pair: the deviation is rounded up
    /// until it sits on the range grid inside the normalized window, which
    /// fixes `R` and `E`; the mean is then rounded to exponent `E` with the
    /// carry set by the final round-up.
    pub fn from_mean_deviation<R: Rng + ?Sized>(
        mean: f64,
        deviation: f64,
        cfg: &ArithmeticConfig,
        rng: &mut R,
    ) -> Self {
        if !mean.is_finite() || !deviation.is_finite() {
            return Self::error(ErrorCode::NonfiniteInput);
        }
        if deviation < 0.0 {
            return Self::error(ErrorCode::NegativeDeviation);
        }
        if deviation == 0.0 {
            return Self::from_float(mean);
        }
        let upper = cfg.window_upper_num() as f64 / RANGE_DENOM as f64;
        // R(E) = 6 * dx^2 * 2^(-chi - 2E); pick E so R lands in the window.
        let t = 6.0 * deviation * deviation * exp2i(-(cfg.chi as i32));
        let mut e = ((t / upper).log2() / 2.0).ceil() as i32;
        while range_at(t, e) >= upper {
            e += 1;
        }
        while range_at(t, e) < upper / 4.0 {
            e -= 1;
        }
        let mut range_num = (range_at(t, e) * RANGE_DENOM as f64).ceil() as u128;
        if range_num >= cfg.window_upper_num() {
            e += 1;
            range_num = (range_at(t, e) * RANGE_DENOM as f64).ceil() as u128;
        }

        let (sign, s0, e0) = decode_f64(mean);
        if s0 == 0 {
            return Self::new(1, 0, e, Carry::Unknown, range_num);
        }
        let (s, carry) = if e <= e0 {
            let shift = (e0 - e) as u32;
            if shift > 120 || (s0 as u128).leading_zeros() < shift {
                return Self::error(ErrorCode::SignificandOverflow);
            }
            ((s0 as u128) << shift, Carry::Unknown)
        } else {
            let mut s = s0 as u128;
            let mut carry = Carry::Unknown;
            for _ in 0..(e - e0) {
                let odd = s & 1 == 1;
                if !odd {
                    s /= 2;
                } else {
                    let up = match carry {
                        Carry::Positive => true,
                        Carry::Negative => false,
                        _ => match cfg.carry_policy {
                            CarryPolicy::AlwaysPositive => true,
                            CarryPolicy::AlwaysNegative => false,
                            CarryPolicy::Random => rng.gen::<bool>(),
                        },
                    };
                    if up {
                        s = s / 2 + 1;
                        carry = Carry::Negative;
                    } else {
                        s /= 2;
                        carry = Carry::Positive;
                    }
                }
            }
            (s, carry)
        };
        Self::new(sign, s, e, carry, range_num)
    }

    /// Renders in the `S~R@E` notation, e.g. `512?6.29@-10`; a precise
    /// value prints as `S@E` and an error value as `#CODE`.
    pub fn render(&self) -> String {
        if let Carry::Error(code) = self.carry {
            return format!("#{code}");
        }
        let sign = if self.sign < 0 { "-" } else { "" };
        if self.is_precise() {
            return format!("{sign}{}@{}", self.significand, self.exponent);
        }
        let carry = match self.carry {
            Carry::Positive => '+',
            Carry::Negative => '-',
            Carry::Unknown => '?',
            Carry::Error(_) => unreachable!(),
        };
        let whole = self.range_num / RANGE_DENOM;
        let hundredths = (self.range_num % RANGE_DENOM) * 100 / RANGE_DENOM;
        format!(
            "{sign}{}{carry}{whole}.{hundredths:02}@{}",
            self.significand, self.exponent
        )
    }

    /// Parses the `render` notation back into a value. The range decimal
    /// is mapped to the smallest grid numerator that renders identically.
    pub fn parse(text: &str) -> Result<Self, ParseValueError> {
        let text = text.trim();
        if let Some(code) = text.strip_prefix('#') {
            let code = match code {
                "DIV_BY_INSIGNIFICANT" => ErrorCode::DivByInsignificant,
                "SQRT_OF_INSIGNIFICANT" => ErrorCode::SqrtOfInsignificant,
                "NONFINITE_INPUT" => ErrorCode::NonfiniteInput,
                "NEGATIVE_DEVIATION" => ErrorCode::NegativeDeviation,
                "SIGNIFICAND_OVERFLOW" => ErrorCode::SignificandOverflow,
                "ZERO_TRAP" => ErrorCode::ZeroTrap,
                _ => return Err(ParseValueError::BadErrorCode),
            };
            return Ok(Self::error(code));
        }
        let (sign, rest) = match text.strip_prefix('-') {
            Some(rest) => (-1i8, rest),
            None => (1i8, text),
        };
        let at = rest.rfind('@').ok_or(ParseValueError::MissingExponent)?;
        let exponent: i32 = rest[at + 1..]
            .parse()
            .map_err(|_| ParseValueError::BadExponent)?;
        let body = &rest[..at];
        let carry_pos = body.find(['+', '-', '?']);
        match carry_pos {
            None => {
                let s: u128 = body.parse().map_err(|_| ParseValueError::BadSignificand)?;
                Ok(Self::precise(sign, s, exponent))
            }
            Some(pos) => {
                let s: u128 = body[..pos]
                    .parse()
                    .map_err(|_| ParseValueError::BadSignificand)?;
                let carry = match &body[pos..pos + 1] {
                    "+" => Carry::Positive,
                    "-" => Carry::Negative,
                    _ => Carry::Unknown,
                };
                let r: f64 = body[pos + 1..]
                    .parse()
                    .map_err(|_| ParseValueError::BadRange)?;
                let range_num = (r * RANGE_DENOM as f64).ceil() as u128;
                Ok(Self::new(sign, s, exponent, carry, range_num))
            }
        }
    }
}

fn range_at(t: f64, e: i32) -> f64 {
    t * exp2i(-2 * e)
}

/// `2^e` as a double without going through powi's loop.
pub fn exp2i(e: i32) -> f64 {
    f64::exp2(e as f64)
}

/// Exact (sign, significand, exponent) decode of a finite double, hidden
/// bit included, so `sign * s * 2^e` reproduces the input bit-exactly.
pub fn decode_f64(x: f64) -> (i8, u64, i32) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp_field = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_field == 0 {
        (sign, frac, -1074)
    } else {
        (sign, frac | (1u64 << 52), exp_field - 1023 - 52)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseValueError {
    #[error("missing '@' exponent separator")]
    MissingExponent,
    #[error("malformed exponent")]
    BadExponent,
    #[error("malformed significand")]
    BadSignificand,
    #[error("malformed bounding range")]
    BadRange,
    #[error("unknown error code")]
    BadErrorCode,
}

impl fmt::Display for PrecisionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ArithmeticConfig, CarryPolicy};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg_chi(chi: u32) -> ArithmeticConfig {
        ArithmeticConfig::new(16, chi, CarryPolicy::Random, 7)
    }

    #[test]
    fn integer_init_is_precise() {
        let v = PrecisionValue::from_integer(7);
        assert_eq!(v.render(), "7@0");
        assert!(v.is_precise());
        let z = PrecisionValue::from_integer(0);
        assert_eq!(z.render(), "0@0");
        assert!(!z.is_significant());
        let n = PrecisionValue::from_integer(-3);
        assert_eq!(n.render(), "-3@0");
        assert_eq!(n.sign(), -1);
    }

    #[test]
    fn float_init_decodes_exactly() {
        let v = PrecisionValue::from_float(1.0);
        assert_eq!(v.significand(), 1u128 << 52);
        assert_eq!(v.exponent(), -52);
        assert_eq!(v.range_num(), HALF_RANGE_NUM);
        let v = PrecisionValue::from_float(0.5);
        assert_eq!(v.significand(), 1u128 << 52);
        assert_eq!(v.exponent(), -53);
        // 0.1 decodes to the nearest representable double.
        let v = PrecisionValue::from_float(0.1);
        assert_eq!(v.expected(), 0.1);
        let (_, s, e) = decode_f64(0.1);
        assert_eq!(v.significand(), s as u128);
        assert_eq!(v.exponent(), e);
        assert!(PrecisionValue::from_float(f64::INFINITY).carry().is_error());
    }

    #[test]
    fn mean_deviation_golden_renderings() {
        // Rmax = 16 column with chi = 0 and chi = 2.
        let cases = [
            (0.5, 0.001, 0, "512?6.29@-10"),
            (1.0, 0.001, 0, "1024?6.29@-10"),
            (1.0, 0.002, 0, "512?6.29@-9"),
            (0.5, 0.001, 2, "2048?25.16@-12"),
            (1.0, 0.001, 2, "4096?25.16@-12"),
            (1.0, 0.002, 2, "2048?25.16@-11"),
        ];
        for (mean, dev, chi, expect) in cases {
            let cfg = cfg_chi(chi);
            let mut rng = cfg.rng();
            let v = PrecisionValue::from_mean_deviation(mean, dev, &cfg, &mut rng);
            assert_eq!(v.render(), expect, "({mean}, {dev}) chi={chi}");
            assert!(v.is_normalized(&cfg));
        }
    }

    #[test]
    fn deviation_inverts_initialization() {
        for chi in [0u32, 2] {
            let cfg = cfg_chi(chi);
            let mut rng = cfg.rng();
            let v = PrecisionValue::from_mean_deviation(0.5, 0.001, &cfg, &mut rng);
            let dev = v.deviation(&cfg);
            assert!(
                (dev - 0.001).abs() / 0.001 < 1e-3,
                "chi={chi} deviation {dev}"
            );
        }
        let cfg = cfg_chi(0);
        assert_eq!(PrecisionValue::from_integer(5).deviation(&cfg), 0.0);
    }

    #[test]
    fn negative_deviation_is_an_error() {
        let cfg = cfg_chi(0);
        let mut rng = cfg.rng();
        let v = PrecisionValue::from_mean_deviation(1.0, -0.5, &cfg, &mut rng);
        assert_eq!(v.error_code(), Some(ErrorCode::NegativeDeviation));
    }

    #[test]
    fn round_up_even_and_odd_cases() {
        let cfg = cfg_chi(0);
        let mut rng = cfg.rng();
        let v = PrecisionValue::new(1, 6, 0, Carry::Unknown, 4 * 256);
        let up = v.round_up_once(RoundUpMode::ByRange, cfg.carry_policy, &mut rng);
        assert_eq!(
            (up.significand(), up.exponent(), up.range_num()),
            (3, 1, 2 * 256)
        );
        assert_eq!(up.carry(), Carry::Unknown);

        let v = PrecisionValue::new(1, 7, 0, Carry::Positive, 4 * 256);
        let up = v.round_up_once(RoundUpMode::ByRange, cfg.carry_policy, &mut rng);
        assert_eq!(up.significand(), 4);
        assert_eq!(up.carry(), Carry::Negative);
        assert_eq!(up.range_num(), 2 * 256 + HALF_RANGE_NUM);

        let v = PrecisionValue::new(1, 7, 0, Carry::Negative, 4 * 256);
        let up = v.round_up_once(RoundUpMode::ByRange, cfg.carry_policy, &mut rng);
        assert_eq!(up.significand(), 3);
        assert_eq!(up.carry(), Carry::Positive);
        assert_eq!(up.range_num(), 2 * 256 + HALF_RANGE_NUM);
    }

    #[test]
    fn round_down_then_up_by_deviation_is_identity_for_even() {
        let cfg = cfg_chi(0);
        let mut rng = cfg.rng();
        let v = PrecisionValue::new(1, 3, 5, Carry::Unknown, 256);
        let down = v.round_down_once();
        assert_eq!(
            (down.significand(), down.exponent(), down.range_num()),
            (6, 4, 4 * 256)
        );
        let back = down.round_up_once(RoundUpMode::ByDeviation, cfg.carry_policy, &mut rng);
        assert_eq!(back, v);
        // Zero significand round-down.
        let z = PrecisionValue::new(1, 0, 0, Carry::Unknown, HALF_RANGE_NUM);
        let dz = z.round_down_once();
        assert_eq!((dz.significand(), dz.exponent(), dz.range_num()), (0, -1, 512));
    }

    #[test]
    fn round_down_overflow_reports_error() {
        let v = PrecisionValue::precise(1, u128::MAX / 2 + 1, 0);
        assert_eq!(
            v.round_down_once().error_code(),
            Some(ErrorCode::SignificandOverflow)
        );
    }

    #[test]
    fn normalize_rounds_down_never_up() {
        let cfg = cfg_chi(0);
        let mut rng = cfg.rng();
        // R = 20 with Rmax = 16: one round-up by deviation, R in [5, 5.5].
        let v = PrecisionValue::new(1, 100, 0, Carry::Unknown, 20 * 256);
        let n = v.normalize(&cfg, &mut rng);
        assert!(n.range_num() >= 5 * 256 && n.range_num() <= 5 * 256 + HALF_RANGE_NUM);
        assert_eq!(n.exponent(), 1);
        // Already normalized and nearly precise values are untouched.
        let v = PrecisionValue::new(1, 512, -10, Carry::Unknown, 1611);
        assert_eq!(v.normalize(&cfg, &mut rng), v);
        let p = PrecisionValue::from_integer(3);
        assert_eq!(p.normalize(&cfg, &mut rng), p);
    }

    #[test]
    fn significance_criterion_is_strict() {
        let cfg = cfg_chi(0);
        let mut rng = cfg.rng();
        let v = PrecisionValue::from_mean_deviation(0.5, 0.001, &cfg, &mut rng);
        assert!(v.is_significant());
        let v = PrecisionValue::new(1, 3, 0, Carry::Unknown, 6 * 256);
        assert!(!v.is_significant());
        assert!(!PrecisionValue::zero().is_significant());
    }

    #[test]
    fn ratio_of_range_to_deviation_follows_sqrt_6r() {
        let cfg = cfg_chi(0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let r_num = rng.gen_range(1u128..16 * 256);
            let v = PrecisionValue::new(1, 1000, -5, Carry::Unknown, r_num);
            let r = r_num as f64 / 256.0;
            let ratio = v.bounding_range() / v.deviation(&cfg);
            assert!((ratio - (6.0 * r).sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn render_parse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let v = PrecisionValue::new(
                if rng.gen::<bool>() { 1 } else { -1 },
                rng.gen_range(0u128..1 << 60),
                rng.gen_range(-900..900),
                match rng.gen_range(0..3) {
                    0 => Carry::Positive,
                    1 => Carry::Negative,
                    _ => Carry::Unknown,
                },
                rng.gen_range(1u128..16 * 256),
            );
            let text = v.render();
            let parsed = PrecisionValue::parse(&text).unwrap();
            assert_eq!(parsed.render(), text);
        }
        let p = PrecisionValue::parse("512?6.29@-10").unwrap();
        assert_eq!(p.render(), "512?6.29@-10");
        assert_eq!(PrecisionValue::parse("7@0").unwrap(), PrecisionValue::from_integer(7));
    }

    #[test]
    fn exact_f64_reduces_to_odd_significand() {
        let v = PrecisionValue::from_exact_f64(2.0);
        assert_eq!((v.significand(), v.exponent()), (1, 1));
        assert!(v.is_precise());
        let v = PrecisionValue::from_exact_f64(-0.75);
        assert_eq!((v.sign(), v.significand(), v.exponent()), (-1, 3, -2));
        assert_eq!(v.expected(), -0.75);
    }
}
