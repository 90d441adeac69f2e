//! Uncertainty of function values: normal moments, truncated Taylor-series
//! variance for one and two variables, polynomial evaluation with uncertain
//! input, and quantile sampling of black-box functions.

use rand::Rng;

use crate::config::ArithmeticConfig;
use crate::value::{ErrorCode, PrecisionValue};

/// Highest total power of the input deviation kept in the truncated
/// variance sums; higher terms are below representation noise at the
/// precisions the harnesses use.
const MAX_DEVIATION_POWER: usize = 8;

/// nth moment of the standard normal distribution: odd moments vanish,
/// `M(2j+2) = 1 * 3 * ... * (2j+1)`.
pub fn normal_moment(n: u32) -> u128 {
    if n % 2 == 1 {
        return 0;
    }
    let mut m = 1u128;
    let mut k = 1u128;
    while k + 1 <= n as u128 {
        m *= k;
        k += 2;
    }
    m
}

/// Truncated Taylor coefficients `f^(n)(x)/n!` for `n = 0..=N` around the
/// expansion point.
#[derive(Clone, Debug)]
pub struct DerivativeSeries {
    pub coeffs: Vec<f64>,
}

impl DerivativeSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(coeffs.len() >= 2, "need at least f and f'");
        Self { coeffs }
    }
}

/// Variance of `f(x + y) - f(x)` for `y` normal with deviation `delta_x`:
/// the double sum of `c_n c_j dx^(n+j) M(n+j)` over the supplied
/// coefficients.
pub fn taylor_variance1(series: &DerivativeSeries, delta_x: f64) -> f64 {
    taylor_variance1_diag(series, delta_x).0
}

/// As [`taylor_variance1`], also reporting whether successive even-power
/// term magnitudes grew, which flags a series evaluated outside its
/// convergence region.
pub fn taylor_variance1_diag(series: &DerivativeSeries, delta_x: f64) -> (f64, bool) {
    let c = &series.coeffs;
    let mut by_power = vec![0.0f64; MAX_DEVIATION_POWER + 1];
    for n in 1..c.len() {
        for j in 1..c.len() {
            let p = n + j;
            if p > MAX_DEVIATION_POWER {
                continue;
            }
            let m = normal_moment(p as u32);
            if m == 0 {
                continue;
            }
            by_power[p] += c[n] * c[j] * m as f64;
        }
    }
    let mut total = 0.0;
    let mut prev_mag: Option<f64> = None;
    let mut grew = false;
    for (p, coeff) in by_power.iter().enumerate() {
        if *coeff == 0.0 {
            continue;
        }
        let term = coeff * delta_x.powi(p as i32);
        if let Some(prev) = prev_mag {
            if term.abs() > prev {
                grew = true;
            }
        }
        prev_mag = Some(term.abs());
        total += term;
    }
    (total.max(0.0), grew)
}

/// Two-variable form: `partials[m][n]` holds `f^(m,n)(x1,x2) / (m! n!)`,
/// indices from zero; the `(0,0)` entry is ignored.
pub fn taylor_variance2(partials: &[Vec<f64>], delta_x1: f64, delta_x2: f64) -> f64 {
    let rows = partials.len();
    let mut total = 0.0;
    for m in 0..rows {
        for n in 0..partials[m].len() {
            if m == 0 && n == 0 {
                continue;
            }
            for i in 0..rows {
                for j in 0..partials[i].len() {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    if m + i > MAX_DEVIATION_POWER || n + j > MAX_DEVIATION_POWER {
                        continue;
                    }
                    let m1 = normal_moment((m + i) as u32);
                    let m2 = normal_moment((n + j) as u32);
                    if m1 == 0 || m2 == 0 {
                        continue;
                    }
                    total += partials[m][n]
                        * partials[i][j]
                        * delta_x1.powi((m + i) as i32)
                        * delta_x2.powi((n + j) as i32)
                        * (m1 as f64)
                        * (m2 as f64);
                }
            }
        }
    }
    total.max(0.0)
}

/// Taylor coefficients of a polynomial `sum a_k x^k` at the point `x`:
/// entry `n` is `p^(n)(x)/n!`.
pub fn polynomial_derivative_series(coeffs: &[f64], x: f64) -> DerivativeSeries {
    let deg = coeffs.len().saturating_sub(1);
    let mut out = vec![0.0f64; deg + 2];
    for (k, a) in coeffs.iter().enumerate() {
        for (n, slot) in out.iter_mut().enumerate().take(k + 1) {
            *slot += a * binomial(k, n) as f64 * x.powi((k - n) as i32);
        }
    }
    DerivativeSeries::new(out)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut r = 1u128;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

/// Evaluates a polynomial with exact constant coefficients at an uncertain
/// input as a single expression: the expected value comes from the exact
/// polynomial at the input's expected value and the deviation from the
/// truncated variance sum, so repeated appearances of `x` cost nothing.
pub fn eval_polynomial<R: Rng + ?Sized>(
    coeffs: &[f64],
    x: &PrecisionValue,
    cfg: &ArithmeticConfig,
    rng: &mut R,
) -> PrecisionValue {
    if let Some(code) = x.error_code() {
        return PrecisionValue::error(code);
    }
    let mean_x = x.expected();
    let dx = x.deviation(cfg);
    let mean = horner(coeffs, mean_x);
    if dx == 0.0 {
        return PrecisionValue::from_exact_f64(mean);
    }
    let series = polynomial_derivative_series(coeffs, mean_x);
    let var = taylor_variance1(&series, dx);
    if var == 0.0 {
        return PrecisionValue::from_exact_f64(mean);
    }
    PrecisionValue::from_mean_deviation(mean, var.sqrt(), cfg, rng)
}

/// Square root of a precision value through the series route, with the
/// double-rounding floor of the computed root folded into the deviation.
pub fn precision_sqrt<R: Rng + ?Sized>(
    x: &PrecisionValue,
    cfg: &ArithmeticConfig,
    rng: &mut R,
) -> PrecisionValue {
    if let Some(code) = x.error_code() {
        return PrecisionValue::error(code);
    }
    if !x.is_significant() || x.sign() < 0 {
        return PrecisionValue::error(ErrorCode::SqrtOfInsignificant);
    }
    let mean_x = x.expected();
    let root = mean_x.sqrt();
    let dx = x.deviation(cfg);
    if dx == 0.0 && root * root == mean_x {
        return PrecisionValue::from_exact_f64(root);
    }
    if dx == 0.0 {
        return PrecisionValue::from_float(root);
    }
    let series = DerivativeSeries::new(vec![
        root,
        0.5 / root,
        -1.0 / (8.0 * root.powi(3)),
        1.0 / (16.0 * root.powi(5)),
    ]);
    let var = taylor_variance1(&series, dx);
    let ulp = root.next_up() - root;
    let var = var + ulp * ulp / 12.0;
    PrecisionValue::from_mean_deviation(root, var.sqrt(), cfg, rng)
}

/// Maximal correlation between two identities that still leaves them
/// virtually independent at their uncertainty level: the gamma solving
/// `(1/gamma_p - 1) = (1/gamma - 1) / p^2`.
pub fn max_allowed_correlation(p: f64, gamma_p: f64) -> f64 {
    assert!(p > 0.0 && p <= 1.0, "precision out of range: {p}");
    assert!(gamma_p > 0.0 && gamma_p < 1.0, "threshold out of range: {gamma_p}");
    1.0 / (1.0 + p * p * (1.0 / gamma_p - 1.0))
}

/// Inverse standard-normal CDF: a rational approximation good to about
/// 1e-9, tightened by one Halley step against the erfc-based CDF.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "probability out of range: {p}");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    // One Halley refinement against the full-precision CDF.
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + x * u / 2.0)
}

fn normal_cdf(x: f64) -> f64 {
    // Complementary error function route, good to ~1e-15.
    0.5 * erfc_scalar(-x / std::f64::consts::SQRT_2)
}

fn erfc_scalar(x: f64) -> f64 {
    // Numerical Recipes style Chebyshev fit.
    let z = x.abs();
    let t = 2.0 / (2.0 + z);
    let ty = 4.0 * t - 2.0;
    let coeffs = [
        -1.3026537197817094,
        6.419_697_923_564_902e-1,
        1.9476473204185836e-2,
        -9.561_514_786_808_63e-3,
        -9.46595344482036e-4,
        3.66839497852761e-4,
        4.2523324806907e-5,
        -2.0278578112534e-5,
        -1.624290004647e-6,
        1.303655835580e-6,
        1.5626441722e-8,
        -8.5238095915e-8,
        6.529054439e-9,
        5.059343495e-9,
        -9.91364156e-10,
        -2.27365122e-10,
        9.6467911e-11,
        2.394038e-12,
        -6.886027e-12,
        8.94487e-13,
        3.13092e-13,
        -1.12708e-13,
        3.81e-16,
        7.106e-15,
    ];
    let mut d = 0.0;
    let mut dd = 0.0;
    for &c in coeffs.iter().rev().take(coeffs.len() - 1) {
        let tmp = d;
        d = ty * d - dd + c;
        dd = tmp;
    }
    let ans = t * (-z * z + 0.5 * (coeffs[0] + ty * d) - dd).exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Quantile midpoints of the truncated normal `N(y/dx)/dx` on
/// `[-bound, bound]`, one per equal-probability slice.
pub fn truncated_normal_quantile_points(dx: f64, bound: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && dx > 0.0 && bound > 0.0);
    let t = bound / dx;
    let lo_mass = normal_cdf(-t);
    let hi_mass = normal_cdf(t);
    let span = hi_mass - lo_mass;
    (0..count)
        .map(|i| {
            let p = lo_mass + span * (i as f64 + 0.5) / count as f64;
            dx * inverse_normal_cdf(p)
        })
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum SampleError {
    #[error("function not evaluable at {0}")]
    NotEvaluable(f64),
    #[error("monotonic refinement did not settle within {0} sampling points")]
    DidNotSettle(usize),
}

const SAMPLE_POINT_BUDGET: usize = 200_000;
const SAMPLE_CONVERGENCE: f64 = 5e-3;

/// Estimates `E[(f(x+y) - f(x))^2]` for `y` truncated-normal by sampling
/// at equal-probability quantiles. Each quantile is refined `kappa`-fold
/// until every numerically monotonic run holds at least `kappa`
/// consecutive points and the estimate itself has converged.
pub fn kappa_sample(
    f: impl Fn(f64) -> f64,
    x: f64,
    dx: f64,
    bound: f64,
    kappa: usize,
) -> Result<f64, SampleError> {
    assert!(kappa >= 2, "kappa must be at least 2");
    let base = f(x);
    if !base.is_finite() {
        return Err(SampleError::NotEvaluable(x));
    }
    let mut count = kappa;
    let mut prev: Option<f64> = None;
    loop {
        let points = truncated_normal_quantile_points(dx, bound, count);
        let mut values = Vec::with_capacity(points.len());
        for y in &points {
            let v = f(x + y);
            if !v.is_finite() {
                return Err(SampleError::NotEvaluable(x + y));
            }
            values.push(v);
        }
        let est =
            values.iter().map(|v| (v - base) * (v - base)).sum::<f64>() / values.len() as f64;
        let runs_ok = shortest_monotonic_run(&values) >= kappa;
        let converged = est == 0.0
            || prev.is_some_and(|p| (est - p).abs() <= SAMPLE_CONVERGENCE * est.abs());
        if runs_ok && converged {
            return Ok(est);
        }
        if count.saturating_mul(kappa) > SAMPLE_POINT_BUDGET {
            if runs_ok {
                return Ok(est);
            }
            return Err(SampleError::DidNotSettle(count));
        }
        prev = Some(est);
        count *= kappa;
    }
}

/// Length of the shortest maximal monotonic run; exact ties merge into
/// the preceding region.
fn shortest_monotonic_run(values: &[f64]) -> usize {
    if values.len() < 2 {
        return values.len();
    }
    let mut shortest = usize::MAX;
    let mut run_start = 0usize;
    let mut dir = 0i8;
    for i in 1..values.len() {
        let step = values[i] - values[i - 1];
        let s = if step > 0.0 {
            1
        } else if step < 0.0 {
            -1
        } else {
            dir
        };
        if dir == 0 {
            dir = s;
        } else if s != 0 && s != dir {
            shortest = shortest.min(i - run_start);
            run_start = i - 1;
            dir = s;
        }
    }
    shortest.min(values.len() - run_start)
}
