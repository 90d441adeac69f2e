//! A common interface over the three uncertainty-bearing arithmetics, so
//! every harness is generic over which one it exercises.
//!
//! Instances resolve from short names: `Prec<chi>[+|-]` for precision
//! arithmetic (suffix selects the deterministic round-up flavor),
//! `Intv<sigma>` for interval arithmetic and `Indp<sigma>` for
//! independence arithmetic, e.g. `Prec2`, `Intv6`, `Indp6`.

use rand_chacha::ChaCha8Rng;

use crate::config::{ArithmeticConfig, CarryPolicy};
use crate::funceval;
use crate::independence::{self, IndependentValue};
use crate::interval::{self, IntervalValue};
use crate::ops;
use crate::value::{ErrorCode, PrecisionValue};

/// The operations a harness needs from an uncertainty-bearing arithmetic.
///
/// Uncertainty is read back in two forms: `deviation` (statistical) and
/// `bounding_range` (hard bound). Arithmetics missing one natively derive
/// it through the sigma rule (see [`deviation_to_range`]).
pub trait Arithmetic {
    type Value: Clone + std::fmt::Debug;

    fn name(&self) -> String;
    /// Casts an exact mathematical constant.
    fn from_exact(&mut self, x: f64) -> Self::Value;
    /// Casts a double, trusting it to half an ulp.
    fn from_float(&mut self, x: f64) -> Self::Value;
    /// Casts a measured mean with a known deviation.
    fn from_mean_deviation(&mut self, mean: f64, deviation: f64) -> Self::Value;

    fn add(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn sub(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn div(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn square(&mut self, a: &Self::Value) -> Self::Value;
    fn sqrt(&mut self, a: &Self::Value) -> Self::Value;
    fn neg(&mut self, a: &Self::Value) -> Self::Value;

    fn expected(&self, v: &Self::Value) -> f64;
    fn deviation(&self, v: &Self::Value) -> f64;
    fn bounding_range(&self, v: &Self::Value) -> f64;
    fn is_significant(&self, v: &Self::Value) -> bool;
    fn error_of(&self, v: &Self::Value) -> Option<ErrorCode>;
    fn render(&self, v: &Self::Value) -> String;
}

/// Deviation to range under an n-sigma rule: `[x - n*dx, x + n*dx]`.
pub fn deviation_to_range(mean: f64, deviation: f64, sigma_rule: f64) -> (f64, f64) {
    (mean - sigma_rule * deviation, mean + sigma_rule * deviation)
}

/// Range to deviation under an n-sigma rule: `dx = (hi - lo) / (2n)`.
pub fn range_to_deviation(lo: f64, hi: f64, sigma_rule: f64) -> (f64, f64) {
    (0.5 * (lo + hi), (hi - lo) / (2.0 * sigma_rule))
}

pub struct PrecisionArithmetic {
    pub cfg: ArithmeticConfig,
    rng: ChaCha8Rng,
}

impl PrecisionArithmetic {
    pub fn new(cfg: ArithmeticConfig) -> Self {
        let rng = cfg.rng();
        Self { cfg, rng }
    }

    pub fn with_seed(cfg: ArithmeticConfig, seed: u64) -> Self {
        let cfg = ArithmeticConfig::new(cfg.r_max(), cfg.chi, cfg.carry_policy, seed);
        Self::new(cfg)
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Expression-level polynomial evaluation on an uncertain input.
    pub fn eval_polynomial(
        &mut self,
        coeffs: &[f64],
        x: &PrecisionValue,
    ) -> PrecisionValue {
        funceval::eval_polynomial(coeffs, x, &self.cfg, &mut self.rng)
    }
}

impl Arithmetic for PrecisionArithmetic {
    type Value = PrecisionValue;

    fn name(&self) -> String {
        self.cfg.short_name()
    }

    fn from_exact(&mut self, x: f64) -> Self::Value {
        PrecisionValue::from_exact_f64(x)
    }

    fn from_float(&mut self, x: f64) -> Self::Value {
        PrecisionValue::from_float(x)
    }

    fn from_mean_deviation(&mut self, mean: f64, deviation: f64) -> Self::Value {
        PrecisionValue::from_mean_deviation(mean, deviation, &self.cfg, &mut self.rng)
    }

    fn add(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        ops::add(a, b, &self.cfg, &mut self.rng)
    }

    fn sub(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        ops::subtract(a, b, &self.cfg, &mut self.rng)
    }

    fn mul(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        ops::multiply(a, b, &self.cfg, &mut self.rng)
    }

    fn div(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        ops::divide(a, b, &self.cfg, &mut self.rng)
    }

    fn square(&mut self, a: &Self::Value) -> Self::Value {
        ops::square(a, &self.cfg, &mut self.rng)
    }

    fn sqrt(&mut self, a: &Self::Value) -> Self::Value {
        funceval::precision_sqrt(a, &self.cfg, &mut self.rng)
    }

    fn neg(&mut self, a: &Self::Value) -> Self::Value {
        a.negated()
    }

    fn expected(&self, v: &Self::Value) -> f64 {
        v.expected()
    }

    fn deviation(&self, v: &Self::Value) -> f64 {
        v.deviation(&self.cfg)
    }

    fn bounding_range(&self, v: &Self::Value) -> f64 {
        v.bounding_range()
    }

    fn is_significant(&self, v: &Self::Value) -> bool {
        v.is_significant()
    }

    fn error_of(&self, v: &Self::Value) -> Option<ErrorCode> {
        v.error_code()
    }

    fn render(&self, v: &Self::Value) -> String {
        v.render()
    }
}

pub struct IntervalArithmetic {
    pub sigma_rule: u32,
}

impl IntervalArithmetic {
    pub fn new(sigma_rule: u32) -> Self {
        Self { sigma_rule }
    }
}

impl Arithmetic for IntervalArithmetic {
    type Value = IntervalValue;

    fn name(&self) -> String {
        format!("Intv{}", self.sigma_rule)
    }

    fn from_exact(&mut self, x: f64) -> Self::Value {
        IntervalValue::exact(x)
    }

    fn from_float(&mut self, x: f64) -> Self::Value {
        let half_ulp = 0.5 * (x.abs().next_up() - x.abs());
        IntervalValue::new(x - half_ulp, x + half_ulp)
    }

    fn from_mean_deviation(&mut self, mean: f64, deviation: f64) -> Self::Value {
        let (lo, hi) = deviation_to_range(mean, deviation, self.sigma_rule as f64);
        IntervalValue::new(lo, hi)
    }

    fn add(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        interval::add(a, b)
    }

    fn sub(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        interval::sub(a, b)
    }

    fn mul(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        interval::mul(a, b)
    }

    fn div(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        interval::div(a, b)
    }

    fn square(&mut self, a: &Self::Value) -> Self::Value {
        interval::self_mul(a)
    }

    fn sqrt(&mut self, a: &Self::Value) -> Self::Value {
        interval::sqrt(a)
    }

    fn neg(&mut self, a: &Self::Value) -> Self::Value {
        interval::neg(a)
    }

    fn expected(&self, v: &Self::Value) -> f64 {
        v.midpoint()
    }

    fn deviation(&self, v: &Self::Value) -> f64 {
        match v.endpoints() {
            Some((lo, hi)) => range_to_deviation(lo, hi, self.sigma_rule as f64).1,
            None => f64::NAN,
        }
    }

    fn bounding_range(&self, v: &Self::Value) -> f64 {
        v.half_width()
    }

    fn is_significant(&self, v: &Self::Value) -> bool {
        v.is_significant()
    }

    fn error_of(&self, v: &Self::Value) -> Option<ErrorCode> {
        v.error_code()
    }

    fn render(&self, v: &Self::Value) -> String {
        match v.endpoints() {
            Some((lo, hi)) => format!("[{lo:.17e}, {hi:.17e}]"),
            None => format!("#{}", v.error_code().unwrap()),
        }
    }
}

pub struct IndependenceArithmetic {
    pub sigma_rule: u32,
}

impl IndependenceArithmetic {
    pub fn new(sigma_rule: u32) -> Self {
        Self { sigma_rule }
    }
}

impl Arithmetic for IndependenceArithmetic {
    type Value = IndependentValue;

    fn name(&self) -> String {
        format!("Indp{}", self.sigma_rule)
    }

    fn from_exact(&mut self, x: f64) -> Self::Value {
        IndependentValue::exact(x)
    }

    fn from_float(&mut self, x: f64) -> Self::Value {
        let half_ulp = 0.5 * (x.abs().next_up() - x.abs());
        IndependentValue::new(x, half_ulp / 3f64.sqrt())
    }

    fn from_mean_deviation(&mut self, mean: f64, deviation: f64) -> Self::Value {
        IndependentValue::new(mean, deviation)
    }

    fn add(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        independence::add(a, b)
    }

    fn sub(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        independence::sub(a, b)
    }

    fn mul(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        independence::mul(a, b)
    }

    fn div(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        independence::div(a, b, self.sigma_rule as f64)
    }

    fn square(&mut self, a: &Self::Value) -> Self::Value {
        independence::mul(a, a)
    }

    fn sqrt(&mut self, a: &Self::Value) -> Self::Value {
        independence::sqrt(a, self.sigma_rule as f64)
    }

    fn neg(&mut self, a: &Self::Value) -> Self::Value {
        independence::neg(a)
    }

    fn expected(&self, v: &Self::Value) -> f64 {
        v.mean()
    }

    fn deviation(&self, v: &Self::Value) -> f64 {
        v.deviation()
    }

    fn bounding_range(&self, v: &Self::Value) -> f64 {
        self.sigma_rule as f64 * v.deviation()
    }

    fn is_significant(&self, v: &Self::Value) -> bool {
        v.is_significant(self.sigma_rule as f64)
    }

    fn error_of(&self, v: &Self::Value) -> Option<ErrorCode> {
        v.error_code()
    }

    fn render(&self, v: &Self::Value) -> String {
        match v {
            IndependentValue::Val { mean, deviation } => format!("{mean:.17e}±{deviation:.17e}"),
            IndependentValue::Error(code) => format!("#{code}"),
        }
    }
}

/// A parsed arithmetic short name, ready to instantiate per task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithmeticSpec {
    Precision { chi: u32, policy: CarryPolicy },
    Interval { sigma_rule: u32 },
    Independence { sigma_rule: u32 },
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown arithmetic short name `{0}` (expected Prec<chi>[+|-], Intv<sigma> or Indp<sigma>)")]
pub struct UnknownArithmetic(pub String);

impl ArithmeticSpec {
    pub fn parse(name: &str) -> Result<Self, UnknownArithmetic> {
        let bad = || UnknownArithmetic(name.to_string());
        if let Some(rest) = name.strip_prefix("Prec") {
            let (digits, policy) = if let Some(d) = rest.strip_suffix('+') {
                (d, CarryPolicy::AlwaysPositive)
            } else if let Some(d) = rest.strip_suffix('-') {
                (d, CarryPolicy::AlwaysNegative)
            } else {
                (rest, CarryPolicy::Random)
            };
            let chi: u32 = digits.parse().map_err(|_| bad())?;
            if chi > 8 {
                return Err(bad());
            }
            return Ok(ArithmeticSpec::Precision { chi, policy });
        }
        if let Some(digits) = name.strip_prefix("Intv") {
            let sigma_rule: u32 = digits.parse().map_err(|_| bad())?;
            return Ok(ArithmeticSpec::Interval { sigma_rule });
        }
        if let Some(digits) = name.strip_prefix("Indp") {
            let sigma_rule: u32 = digits.parse().map_err(|_| bad())?;
            return Ok(ArithmeticSpec::Independence { sigma_rule });
        }
        Err(bad())
    }

    pub fn short_name(&self) -> String {
        match self {
            ArithmeticSpec::Precision { chi, policy } => ArithmeticConfig::new(
                16,
                *chi,
                *policy,
                0,
            )
            .short_name(),
            ArithmeticSpec::Interval { sigma_rule } => format!("Intv{sigma_rule}"),
            ArithmeticSpec::Independence { sigma_rule } => format!("Indp{sigma_rule}"),
        }
    }

    pub fn precision_config(&self, seed: u64) -> Option<ArithmeticConfig> {
        match self {
            ArithmeticSpec::Precision { chi, policy } => {
                Some(ArithmeticConfig::new(16, *chi, *policy, seed))
            }
            _ => None,
        }
    }
}
