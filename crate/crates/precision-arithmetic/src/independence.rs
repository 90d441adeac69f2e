//! Reference independence arithmetic: statistical propagation of
//! uncertainty with every pair of operands assumed uncorrelated.
//!
//! Deviations combine in quadrature for addition and subtraction and in
//! relative quadrature for multiplication and division. Each operation
//! also folds in half-ulp resolution noise of the double result, so a
//! computation seeded from precise values still accumulates the rounding
//! uncertainty of its double-precision execution.

use crate::value::ErrorCode;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IndependentValue {
    Val { mean: f64, deviation: f64 },
    Error(ErrorCode),
}

impl IndependentValue {
    pub fn new(mean: f64, deviation: f64) -> Self {
        debug_assert!(deviation >= 0.0);
        IndependentValue::Val { mean, deviation }
    }

    pub fn exact(x: f64) -> Self {
        Self::new(x, 0.0)
    }

    pub fn error(code: ErrorCode) -> Self {
        IndependentValue::Error(code)
    }

    pub fn mean(&self) -> f64 {
        match self {
            IndependentValue::Val { mean, .. } => *mean,
            IndependentValue::Error(_) => f64::NAN,
        }
    }

    pub fn deviation(&self) -> f64 {
        match self {
            IndependentValue::Val { deviation, .. } => *deviation,
            IndependentValue::Error(_) => f64::NAN,
        }
    }

    pub fn error_code(&self) -> Option<ErrorCode> {
        match self {
            IndependentValue::Error(code) => Some(*code),
            _ => None,
        }
    }

    pub fn is_significant(&self, sigma_rule: f64) -> bool {
        match self {
            IndependentValue::Val { mean, deviation } => mean.abs() > sigma_rule * deviation,
            IndependentValue::Error(_) => false,
        }
    }
}

/// Half-ulp of a double, as the deviation of a uniform rounding error.
fn resolution_noise(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    let ulp = x.abs().next_up() - x.abs();
    ulp / 12f64.sqrt()
}

fn pack(mean: f64, statistical: f64) -> IndependentValue {
    if !mean.is_finite() {
        return IndependentValue::Error(ErrorCode::NonfiniteInput);
    }
    let noise = resolution_noise(mean);
    IndependentValue::new(mean, (statistical * statistical + noise * noise).sqrt())
}

fn both(
    a: &IndependentValue,
    b: &IndependentValue,
) -> Result<((f64, f64), (f64, f64)), IndependentValue> {
    match (a, b) {
        (IndependentValue::Error(c), _) => Err(IndependentValue::Error(*c)),
        (_, IndependentValue::Error(c)) => Err(IndependentValue::Error(*c)),
        (
            IndependentValue::Val {
                mean: m1,
                deviation: d1,
            },
            IndependentValue::Val {
                mean: m2,
                deviation: d2,
            },
        ) => Ok(((*m1, *d1), (*m2, *d2))),
    }
}

pub fn add(a: &IndependentValue, b: &IndependentValue) -> IndependentValue {
    match both(a, b) {
        Err(e) => e,
        Ok(((m1, d1), (m2, d2))) => pack(m1 + m2, (d1 * d1 + d2 * d2).sqrt()),
    }
}

pub fn sub(a: &IndependentValue, b: &IndependentValue) -> IndependentValue {
    match both(a, b) {
        Err(e) => e,
        Ok(((m1, d1), (m2, d2))) => pack(m1 - m2, (d1 * d1 + d2 * d2).sqrt()),
    }
}

pub fn mul(a: &IndependentValue, b: &IndependentValue) -> IndependentValue {
    match both(a, b) {
        Err(e) => e,
        Ok(((m1, d1), (m2, d2))) => {
            // |x1*x2| * sqrt(P1^2 + P2^2) without dividing by a possibly
            // zero mean.
            let dev = ((m2 * d1).powi(2) + (m1 * d2).powi(2)).sqrt();
            pack(m1 * m2, dev)
        }
    }
}

pub fn div(a: &IndependentValue, b: &IndependentValue, sigma_rule: f64) -> IndependentValue {
    match both(a, b) {
        Err(e) => e,
        Ok(((m1, d1), (m2, d2))) => {
            if !b.is_significant(sigma_rule) {
                return IndependentValue::Error(ErrorCode::DivByInsignificant);
            }
            let mean = m1 / m2;
            let dev = ((d1 / m2).powi(2) + (m1 * d2 / (m2 * m2)).powi(2)).sqrt();
            pack(mean, dev)
        }
    }
}

pub fn neg(a: &IndependentValue) -> IndependentValue {
    match a {
        IndependentValue::Error(c) => IndependentValue::Error(*c),
        IndependentValue::Val { mean, deviation } => IndependentValue::new(-mean, *deviation),
    }
}

pub fn sqrt(a: &IndependentValue, sigma_rule: f64) -> IndependentValue {
    match a {
        IndependentValue::Error(c) => IndependentValue::Error(*c),
        IndependentValue::Val { mean, deviation } => {
            if *mean <= 0.0 || !a.is_significant(sigma_rule) {
                return IndependentValue::Error(ErrorCode::SqrtOfInsignificant);
            }
            let root = mean.sqrt();
            pack(root, deviation / (2.0 * root))
        }
    }
}
