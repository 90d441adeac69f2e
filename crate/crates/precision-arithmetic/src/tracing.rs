//! Rounding-error distribution studies: Monte-Carlo round-up densities,
//! their convolutions under addition and subtraction chains, the
//! deviation-range law, and round-up leakage.

use rand::Rng;

use crate::config::CarryPolicy;
use crate::value::{PrecisionValue, RoundUpMode, RANGE_DENOM};

/// Probability distribution of rounding error in LSB units, as point
/// masses on a `1/256`-LSB lattice symmetric about zero. Lattice points
/// convolve onto lattice points, so chained distributions stay exact.
#[derive(Clone, Debug)]
pub struct ErrorDensity {
    /// Mass per lattice point, left to right; sums to one.
    pub masses: Vec<f64>,
    pub step: f64,
    pub half_width: f64,
}

impl ErrorDensity {
    /// Bins raw samples to the nearest lattice point, on a lattice wide
    /// enough for `nominal_half_width` and any outliers.
    pub fn from_samples(samples: &[f64], nominal_half_width: f64) -> Self {
        let step = 1.0 / RANGE_DENOM as f64;
        let max_abs = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let half_width = nominal_half_width.max((max_abs / step).ceil() * step);
        let n = (2.0 * half_width / step).round() as usize + 1;
        let mut counts = vec![0u64; n];
        for &s in samples {
            let idx = (((s + half_width) / step).round() as isize).clamp(0, n as isize - 1);
            counts[idx as usize] += 1;
        }
        let total = samples.len() as f64;
        Self {
            masses: counts.iter().map(|&c| c as f64 / total).collect(),
            step,
            half_width,
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.step
    }

    /// Total probability; one within 1e-9 for a well-formed density.
    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.masses
            .iter()
            .enumerate()
            .map(|(i, &m)| m * self.point(i))
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.masses
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                let d = self.point(i) - mu;
                m * d * d
            })
            .sum()
    }

    pub fn deviation(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Probability density at lattice point `i` (mass over step).
    pub fn density(&self, i: usize) -> f64 {
        self.masses[i] / self.step
    }

    /// Support half-width measured from the outermost occupied points.
    pub fn measured_half_width(&self) -> f64 {
        let first = self.masses.iter().position(|&m| m > 0.0);
        let last = self.masses.iter().rposition(|&m| m > 0.0);
        match (first, last) {
            (Some(a), Some(b)) => 0.5 * (self.point(b) - self.point(a)) + 0.5 * self.step,
            _ => 0.0,
        }
    }

    pub fn mirrored(&self) -> Self {
        let mut masses = self.masses.clone();
        masses.reverse();
        Self {
            masses,
            step: self.step,
            half_width: self.half_width,
        }
    }
}

/// Exact convolution of two lattice distributions; supports add.
pub fn convolve_density(a: &ErrorDensity, b: &ErrorDensity) -> ErrorDensity {
    assert!((a.step - b.step).abs() < 1e-12, "incompatible lattices");
    let n = a.masses.len() + b.masses.len() - 1;
    let mut masses = vec![0.0f64; n];
    for (i, &ma) in a.masses.iter().enumerate() {
        if ma == 0.0 {
            continue;
        }
        for (j, &mb) in b.masses.iter().enumerate() {
            masses[i + j] += ma * mb;
        }
    }
    ErrorDensity {
        masses,
        step: a.step,
        half_width: a.half_width + b.half_width,
    }
}

/// Subtraction chains convolve against the mirror image of the second
/// operand's distribution.
pub fn convolve_density_sub(a: &ErrorDensity, b: &ErrorDensity) -> ErrorDensity {
    convolve_density(a, &b.mirrored())
}

/// Converts random positive integers to precise values and rounds them up
/// by range while the significand stays above the threshold, histogramming
/// `(true - represented)` in final-LSB units.
pub fn monte_carlo_roundup<R: Rng + ?Sized>(
    threshold: u32,
    trials: usize,
    rng: &mut R,
) -> ErrorDensity {
    let mut samples = Vec::with_capacity(trials);
    for _ in 0..trials {
        let s0 = rng.gen_range(1u32..(1 << 31)) as u128;
        let mut v = PrecisionValue::from_integer(s0 as i128);
        while v.significand() > 2 * threshold as u128 + 1 {
            v = v.round_up_once(RoundUpMode::ByRange, CarryPolicy::Random, rng);
        }
        let repr = v.significand() as f64 * crate::value::exp2i(v.exponent());
        let err = (s0 as f64 - repr) * crate::value::exp2i(-v.exponent());
        samples.push(err);
    }
    ErrorDensity::from_samples(&samples, 0.5)
}

/// Measured deviation, support half-width, and the law ratio
/// `sigma^2 * 6 / R`, which is one when the deviation is determined by
/// the bounding range.
pub fn deviation_range_law(d: &ErrorDensity) -> (f64, f64, f64) {
    let sigma = d.deviation();
    let r = d.measured_half_width();
    (sigma, r, sigma * sigma * 6.0 / r)
}

/// Probability mass that one round-up by deviation cuts off: the tails of
/// the stable truncated-normal density outside half the original range.
/// Computed by numeric integration of the density.
pub fn round_up_leakage(r: f64) -> f64 {
    assert!(r >= 1.0, "leakage defined for R >= 1, got {r}");
    let sigma = (r / 6.0).sqrt();
    let inner = integrate_normal(-r / 2.0, r / 2.0, sigma);
    let full = integrate_normal(-r, r, sigma);
    (1.0 - inner / full).max(0.0)
}

/// Simpson integration of the normal density with deviation `sigma`.
fn integrate_normal(lo: f64, hi: f64, sigma: f64) -> f64 {
    let steps = 40_000usize;
    let h = (hi - lo) / steps as f64;
    let density = |y: f64| {
        let z = y / sigma;
        (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    };
    let mut sum = density(lo) + density(hi);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * density(lo + i as f64 * h);
    }
    sum * h / 3.0
}

/// Idealized single-round-up distribution: uniform on `[-1/2, 1/2]`,
/// discretized with half-weight endpoints.
pub fn uniform_half_density() -> ErrorDensity {
    let step = 1.0 / RANGE_DENOM as f64;
    let n = RANGE_DENOM as usize + 1;
    let mut masses = vec![1.0 / RANGE_DENOM as f64; n];
    masses[0] *= 0.5;
    masses[n - 1] *= 0.5;
    ErrorDensity {
        masses,
        step,
        half_width: 0.5,
    }
}

/// How a chain of single-round-up distributions is combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainMethod {
    /// Repeated addition.
    Add,
    /// Repeated subtraction.
    Sub,
    /// Alternating addition then subtraction.
    AddSub,
}

impl ChainMethod {
    pub fn file_tag(&self) -> &'static str {
        match self {
            ChainMethod::Add => "p",
            ChainMethod::Sub => "m",
            ChainMethod::AddSub => "pm",
        }
    }
}

/// Distribution with bounding range `copies/2` built by convolving copies
/// of a base distribution under the chosen chain method.
pub fn chain_density(base: &ErrorDensity, copies: usize, method: ChainMethod) -> ErrorDensity {
    assert!(copies >= 1);
    let mut acc = base.clone();
    for i in 1..copies {
        let subtract = match method {
            ChainMethod::Add => false,
            ChainMethod::Sub => true,
            ChainMethod::AddSub => i % 2 == 1,
        };
        acc = if subtract {
            convolve_density_sub(&acc, base)
        } else {
            convolve_density(&acc, base)
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_convolution_is_triangular() {
        let u = uniform_half_density();
        let tri = convolve_density(&u, &u);
        assert!((tri.half_width - 1.0).abs() < 1e-12);
        assert!((tri.total_mass() - 1.0).abs() < 1e-9);
        // Peak density 1 at zero.
        let mid = tri.masses.len() / 2;
        assert!((tri.density(mid) - 1.0).abs() < 0.01);
        // Variance additivity.
        assert!((tri.variance() - 2.0 * u.variance()).abs() < 1e-9);
    }

    #[test]
    fn convolution_order_does_not_matter() {
        let u = uniform_half_density();
        let two = convolve_density(&u, &u);
        let three_a = convolve_density(&two, &u);
        let three_b = convolve_density(&u, &two);
        for (a, b) in three_a.masses.iter().zip(&three_b.masses) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn law_ratio_for_ideal_densities() {
        let u = uniform_half_density();
        // sigma^2 = 1/12 = (1/2)/6 at R = 1/2.
        let (sigma, r, ratio) = deviation_range_law(&u);
        assert!((sigma * sigma - 1.0 / 12.0).abs() < 5e-6);
        assert!((r - 0.5).abs() < 0.01);
        assert!((ratio - 1.0).abs() < 0.02);
        // Three convolved uniforms have variance 3/12.
        let three = chain_density(&u, 3, ChainMethod::Add);
        assert!((three.variance() - 0.25).abs() < 1e-5);
    }

    #[test]
    fn monte_carlo_high_threshold_is_nearly_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let d = monte_carlo_roundup(16, 200_000, &mut rng);
        assert!((d.total_mass() - 1.0).abs() < 1e-9);
        let (_, r, ratio) = deviation_range_law(&d);
        assert!((r - 0.5).abs() < 0.02, "support {r}");
        assert!((ratio - 1.0).abs() < 0.03, "law ratio {ratio}");
    }

    #[test]
    fn monte_carlo_mean_shrinks_with_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // In the near-uniform regime the mean is far below the deviation;
        // the sparse grids at thresholds 0 and 1 keep a visible bias.
        let mut prev_ratio = f64::INFINITY;
        for threshold in [0u32, 1, 4, 16] {
            let d = monte_carlo_roundup(threshold, 100_000, &mut rng);
            let ratio = d.mean().abs() / d.deviation();
            assert!(ratio < prev_ratio, "threshold {threshold}: ratio {ratio}");
            if threshold >= 4 {
                assert!(ratio <= 0.1, "threshold {threshold}: ratio {ratio}");
            } else {
                assert!(ratio < 0.35, "threshold {threshold}: ratio {ratio}");
            }
            prev_ratio = ratio;
        }
    }

    #[test]
    fn low_threshold_bias_exceeds_high_threshold_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rough = monte_carlo_roundup(0, 100_000, &mut rng);
        let fine = monte_carlo_roundup(16, 100_000, &mut rng);
        // Distance from uniform measured by the density spread.
        let spread = |d: &ErrorDensity| {
            let nonzero: Vec<f64> = (0..d.masses.len())
                .filter(|&i| d.masses[i] > 0.0)
                .map(|i| d.density(i))
                .collect();
            let max = nonzero.iter().cloned().fold(0.0f64, f64::max);
            let min = nonzero.iter().cloned().fold(f64::INFINITY, f64::min);
            max - min
        };
        assert!(spread(&rough) > 2.0 * spread(&fine));
    }

    #[test]
    fn leakage_values_and_monotonicity() {
        // One round-up by deviation from R = 8 leaks about 0.05%.
        let l8 = round_up_leakage(8.0);
        assert!((l8 - 5.3e-4).abs() < 2e-4, "leakage(8) = {l8}");
        // Normalization at Rmax = 16 leaks at most 1e-6.
        let l16 = round_up_leakage(16.0);
        assert!(l16 <= 1e-6, "leakage(16) = {l16}");
        let mut prev = f64::INFINITY;
        for r in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let l = round_up_leakage(r);
            assert!(l < prev);
            prev = l;
        }
    }

    #[test]
    fn addition_and_subtraction_chains_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let base = monte_carlo_roundup(0, 100_000, &mut rng);
        let plus = chain_density(&base, 3, ChainMethod::Add);
        let minus = chain_density(&base, 3, ChainMethod::Sub);
        let mixed = chain_density(&base, 3, ChainMethod::AddSub);
        for d in [&plus, &minus, &mixed] {
            assert!((d.half_width - 3.0 * base.half_width).abs() < 1e-9);
        }
        let s = plus.deviation();
        assert!((minus.deviation() - s).abs() / s < 0.02);
        assert!((mixed.deviation() - s).abs() / s < 0.02);
    }

    #[test]
    fn central_limit_convergence_toward_truncated_normal() {
        // Kolmogorov-Smirnov distance to the matching normal decreases
        // monotonically over n in {2, 4, 8, 16}.
        let u = uniform_half_density();
        let mut prev = f64::INFINITY;
        for n in [2usize, 4, 8, 16] {
            let d = chain_density(&u, n, ChainMethod::Add);
            let sigma = d.deviation();
            let mut cdf = 0.0;
            let mut ks: f64 = 0.0;
            for (i, &m) in d.masses.iter().enumerate() {
                // Compare mid-jump, where a lattice CDF meets a continuous one.
                let x = d.point(i);
                let target = 0.5 * (1.0 + erf_approx(x / (sigma * 2f64.sqrt())));
                ks = ks.max((cdf + 0.5 * m - target).abs());
                cdf += m;
            }
            assert!(ks < prev, "n = {n}: KS {ks} vs previous {prev}");
            prev = ks;
        }
    }

    fn erf_approx(x: f64) -> f64 {
        // Abramowitz-Stegun 7.1.26, enough for a monotonicity check.
        let sign = x.signum();
        let x = x.abs();
        let t = 1.0 / (1.0 + 0.3275911 * x);
        let y = 1.0
            - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
                + 0.254829592)
                * t
                * (-x * x).exp();
        sign * y
    }
}
