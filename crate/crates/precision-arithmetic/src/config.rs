//! Configuration shared by all precision-value operations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// How the round-up rule resolves an odd significand whose carry is unknown.
///
/// `Random` picks either direction with equal probability; the two
/// deterministic flavors always resolve as if the carry were `+` or `-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CarryPolicy {
    Random,
    AlwaysPositive,
    AlwaysNegative,
}

/// Parameters of a precision-arithmetic instance.
///
/// `r_max` bounds the stored bounding range: after normalization the
/// effective range `R / 2^chi` lies in `[r_max/4, r_max)`. `chi` is the
/// number of significand bits kept below the uncertainty level.
#[derive(Clone, Debug)]
pub struct ArithmeticConfig {
    r_max: u32,
    pub chi: u32,
    pub carry_policy: CarryPolicy,
    pub rng_seed: u64,
}

impl ArithmeticConfig {
    pub fn new(r_max: u32, chi: u32, carry_policy: CarryPolicy, rng_seed: u64) -> Self {
        assert!(
            r_max >= 4 && r_max.is_power_of_two(),
            "r_max must be a power of two >= 4, got {r_max}"
        );
        assert!(chi <= 8, "chi must be small, got {chi}");
        Self {
            r_max,
            chi,
            carry_policy,
            rng_seed,
        }
    }

    pub fn r_max(&self) -> u32 {
        self.r_max
    }

    /// Upper edge of the normalized window for the stored range numerator
    /// (range in units of 1/256, scaled by `2^chi`).
    pub fn window_upper_num(&self) -> u128 {
        (self.r_max as u128) * super::value::RANGE_DENOM << self.chi
    }

    /// Lower edge of the normalized window for the stored range numerator.
    pub fn window_lower_num(&self) -> u128 {
        self.window_upper_num() / 4
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.rng_seed)
    }

    /// Short name in the `Prec<chi>[+|-]` convention.
    pub fn short_name(&self) -> String {
        let suffix = match self.carry_policy {
            CarryPolicy::Random => "",
            CarryPolicy::AlwaysPositive => "+",
            CarryPolicy::AlwaysNegative => "-",
        };
        format!("Prec{}{}", self.chi, suffix)
    }
}

impl Default for ArithmeticConfig {
    /// `r_max = 16` with two bits calculated inside uncertainty.
    fn default() -> Self {
        Self::new(16, 2, CarryPolicy::Random, 0)
    }
}

/// A measured value as a mean plus sample deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanDeviation {
    pub mean: f64,
    pub deviation: f64,
}

impl MeanDeviation {
    pub fn new(mean: f64, deviation: f64) -> Self {
        Self { mean, deviation }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_edges_scale_with_chi() {
        let cfg = ArithmeticConfig::new(16, 0, CarryPolicy::Random, 0);
        assert_eq!(cfg.window_upper_num(), 16 * 256);
        assert_eq!(cfg.window_lower_num(), 4 * 256);
        let cfg = ArithmeticConfig::new(16, 2, CarryPolicy::Random, 0);
        assert_eq!(cfg.window_upper_num(), 64 * 256);
        assert_eq!(cfg.window_lower_num(), 16 * 256);
    }

    #[test]
    #[should_panic]
    fn rejects_non_power_of_two_r_max() {
        let _ = ArithmeticConfig::new(12, 0, CarryPolicy::Random, 0);
    }
}
