//! Taylor-expansion stopping, adaptive numerical integration, and
//! moving-window linear regression.

use crate::arithmetic::Arithmetic;
use crate::funceval::{polynomial_derivative_series, taylor_variance1};
use crate::value::ErrorCode;

/// One order of the geometric Taylor expansion.
#[derive(Clone, Debug)]
pub struct TaylorStep<V> {
    pub order: usize,
    pub value: V,
    /// Magnitude of the next term, the Cauchy remainder estimator.
    pub cauchy: f64,
    pub deviation: f64,
    pub bounding_range: f64,
}

#[derive(Clone, Debug)]
pub struct TaylorRun<V> {
    pub steps: Vec<TaylorStep<V>>,
    /// First order where the uncertainty range exceeds the Cauchy
    /// estimator; expansion beyond it cannot improve the result.
    pub stop_order: Option<usize>,
}

/// Partial sums of `sum (-x)^j` in plain doubles, one entry per order.
pub fn taylor_geometric_f64(x: f64, max_order: usize) -> Vec<(usize, f64, f64)> {
    let mut out = Vec::with_capacity(max_order + 1);
    let mut sum = 0.0;
    let mut term = 1.0;
    for order in 0..=max_order {
        sum += term;
        term *= -x;
        out.push((order, sum, term.abs()));
    }
    out
}

/// Geometric Taylor expansion of `1/(1+x)` on an uncertain input. Each
/// order is evaluated as one expression (exact partial-sum polynomial at
/// the expected value, deviation from the truncated variance sum), so the
/// per-order uncertainty reflects the expression rather than a chain of
/// dependent operations.
pub fn taylor_geometric<A: Arithmetic>(
    arith: &mut A,
    mean: f64,
    deviation: f64,
    max_order: usize,
) -> Result<TaylorRun<A::Value>, ErrorCode> {
    if mean.abs() >= 1.0 {
        return Err(ErrorCode::NonfiniteInput);
    }
    let mut coeffs: Vec<f64> = Vec::with_capacity(max_order + 1);
    let mut steps = Vec::with_capacity(max_order + 1);
    let mut stop_order = None;
    for order in 0..=max_order {
        coeffs.push(if order % 2 == 0 { 1.0 } else { -1.0 });
        let value_mean = horner(&coeffs, mean);
        let value = if deviation == 0.0 {
            arith.from_float(value_mean)
        } else {
            let series = polynomial_derivative_series(&coeffs, mean);
            let var = taylor_variance1(&series, deviation);
            arith.from_mean_deviation(value_mean, var.sqrt())
        };
        let cauchy = mean.abs().powi(order as i32 + 1);
        let range = arith.bounding_range(&value);
        steps.push(TaylorStep {
            order,
            value: value.clone(),
            cauchy,
            deviation: arith.deviation(&value),
            bounding_range: range,
        });
        if stop_order.is_none() && range > cauchy {
            stop_order = Some(order);
        }
    }
    Ok(TaylorRun { steps, stop_order })
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

const MAX_INTEGRATION_DEPTH: usize = 64;

#[derive(Clone, Debug)]
pub struct IntegrationResult<V> {
    pub total: V,
    pub leaves: usize,
    pub max_depth: usize,
    /// Subintervals where refinement hit the depth cap; tolerated with
    /// their midpoint contribution taken as is.
    pub zero_traps: Vec<(f64, f64)>,
}

/// Depth-first adaptive integration: an interval is fine enough when
/// either the parabolic defect `(f(a) + f(b))/2 - f(mid)` or the
/// contribution `f(mid) * (b - a)` becomes insignificant, otherwise both
/// halves are searched.
pub fn integrate_adaptive<A: Arithmetic>(
    arith: &mut A,
    f: &mut impl FnMut(&mut A, &A::Value) -> A::Value,
    a: f64,
    b: f64,
) -> IntegrationResult<A::Value> {
    let lo = arith.from_float(a);
    let hi = arith.from_float(b);
    let f_lo = f(arith, &lo);
    let f_hi = f(arith, &hi);
    let mut state = IntegrationState {
        total: None,
        leaves: 0,
        max_depth: 0,
        zero_traps: Vec::new(),
    };
    integrate_rec(arith, f, &lo, &hi, &f_lo, &f_hi, 0, &mut state);
    IntegrationResult {
        total: state.total.unwrap_or_else(|| arith.from_exact(0.0)),
        leaves: state.leaves,
        max_depth: state.max_depth,
        zero_traps: state.zero_traps,
    }
}

struct IntegrationState<V> {
    total: Option<V>,
    leaves: usize,
    max_depth: usize,
    zero_traps: Vec<(f64, f64)>,
}

#[allow(clippy::too_many_arguments)]
fn integrate_rec<A: Arithmetic>(
    arith: &mut A,
    f: &mut impl FnMut(&mut A, &A::Value) -> A::Value,
    lo: &A::Value,
    hi: &A::Value,
    f_lo: &A::Value,
    f_hi: &A::Value,
    depth: usize,
    state: &mut IntegrationState<A::Value>,
) {
    state.max_depth = state.max_depth.max(depth);
    let half = arith.from_exact(0.5);
    let mid = {
        let sum = arith.add(lo, hi);
        arith.mul(&sum, &half)
    };
    let f_mid = f(arith, &mid);
    let f_err = {
        let ends = arith.add(f_lo, f_hi);
        let mean_ends = arith.mul(&ends, &half);
        arith.sub(&mean_ends, &f_mid)
    };
    let f_delta = {
        let width = arith.sub(hi, lo);
        arith.mul(&f_mid, &width)
    };
    let trapped = depth >= MAX_INTEGRATION_DEPTH;
    if trapped {
        state
            .zero_traps
            .push((arith.expected(lo), arith.expected(hi)));
    }
    if trapped || !arith.is_significant(&f_err) || !arith.is_significant(&f_delta) {
        state.leaves += 1;
        state.total = Some(match state.total.take() {
            None => f_delta,
            Some(acc) => arith.add(&acc, &f_delta),
        });
        return;
    }
    integrate_rec(arith, f, lo, &mid, f_lo, &f_mid, depth + 1, state);
    integrate_rec(arith, f, &mid, hi, &f_mid, f_hi, depth + 1, state);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegressionMode {
    /// Recomputes the window sums from raw inputs at every step.
    Expressive,
    /// Carries the sums forward, reusing each input several times.
    Progressive,
    /// Progressive value with the accumulated uncertainty overestimation
    /// subtracted, leaving the expressive per-window deviation.
    Corrected,
}

impl RegressionMode {
    pub fn label(&self) -> &'static str {
        match self {
            RegressionMode::Expressive => "Expressive",
            RegressionMode::Progressive => "Progressive",
            RegressionMode::Corrected => "Corrected",
        }
    }
}

/// Window sums tracked by the regression: `alpha = sum Y` and
/// `beta = sum X * Y` over `X = -H..=H`.
#[derive(Clone, Debug)]
pub struct RegressStep<V> {
    /// Index of the window's newest sample.
    pub t: usize,
    pub alpha: V,
    pub beta: V,
}

/// Moving-window linear regression over a stream, one `(alpha, beta)` pair
/// per full window.
pub fn moving_window_regress<A: Arithmetic>(
    arith: &mut A,
    mode: RegressionMode,
    stream: &[A::Value],
    h: usize,
    input_deviations: &[f64],
) -> Vec<RegressStep<A::Value>> {
    let window = 2 * h + 1;
    assert!(stream.len() > window, "stream shorter than one window");
    assert_eq!(stream.len(), input_deviations.len());
    let mut out = Vec::with_capacity(stream.len() - window + 1);
    let mut alpha: Option<A::Value> = None;
    let mut beta: Option<A::Value> = None;
    for t in (window - 1)..stream.len() {
        let start = t + 1 - window;
        let (a_val, b_val) = match (mode, alpha.take(), beta.take()) {
            (RegressionMode::Expressive, _, _) => expressive_sums(arith, stream, start, h),
            (_, None, None) => expressive_sums(arith, stream, start, h),
            (_, Some(prev_a), Some(prev_b)) => {
                let oldest = &stream[start - 1];
                let newest = &stream[t];
                // alpha_j = alpha_{j-1} - Y_old + Y_new
                let a_val = {
                    let dropped = arith.sub(&prev_a, oldest);
                    arith.add(&dropped, newest)
                };
                // beta_j = beta_{j-1} - alpha_{j-1}
                //        + H * (Y_new + Y_old) + Y_old
                let b_val = {
                    let h_const = arith.from_exact(h as f64);
                    let pair = arith.add(newest, oldest);
                    let scaled = arith.mul(&pair, &h_const);
                    let step1 = arith.sub(&prev_b, &prev_a);
                    let step2 = arith.add(&step1, &scaled);
                    arith.add(&step2, oldest)
                };
                (a_val, b_val)
            }
            _ => unreachable!(),
        };
        let (a_out, b_out) = if mode == RegressionMode::Corrected {
            // Subtract the carried-state overestimation by repacking with
            // the per-window statistical deviation of the raw inputs.
            let window_devs = &input_deviations[start..=t];
            let dev_a = window_devs.iter().map(|d| d * d).sum::<f64>().sqrt();
            let dev_b = window_devs
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let x = i as f64 - h as f64;
                    (x * d) * (x * d)
                })
                .sum::<f64>()
                .sqrt();
            (
                arith.from_mean_deviation(arith.expected(&a_val), dev_a),
                arith.from_mean_deviation(arith.expected(&b_val), dev_b),
            )
        } else {
            (a_val.clone(), b_val.clone())
        };
        alpha = Some(a_val);
        beta = Some(b_val);
        out.push(RegressStep {
            t,
            alpha: a_out,
            beta: b_out,
        });
    }
    out
}

fn expressive_sums<A: Arithmetic>(
    arith: &mut A,
    stream: &[A::Value],
    start: usize,
    h: usize,
) -> (A::Value, A::Value) {
    let window = 2 * h + 1;
    let mut alpha: Option<A::Value> = None;
    let mut beta: Option<A::Value> = None;
    for (offset, y) in stream[start..start + window].iter().enumerate() {
        alpha = Some(match alpha.take() {
            None => y.clone(),
            Some(acc) => arith.add(&acc, y),
        });
        let x = offset as i64 - h as i64;
        if x != 0 {
            let coeff = arith.from_exact(x as f64);
            let term = arith.mul(y, &coeff);
            beta = Some(match beta.take() {
                None => term,
                Some(acc) => arith.add(&acc, &term),
            });
        }
    }
    (alpha.unwrap(), beta.unwrap())
}

/// `sum X^2` over the window, the scale between the beta sum and the
/// fitted slope.
pub fn beta_scale(h: usize) -> f64 {
    let h = h as f64;
    h * (h + 1.0) * (2.0 * h + 1.0) / 3.0
}
