//! Validation metrics and the exponential propagation fit.
//!
//! Per output, the error significand is the absolute value error over the
//! uncertainty deviation and the bounding ratio is the error over the
//! bounding range; a ratio above one counts as bounding leakage.

/// One computed output against its analytic expectation.
#[derive(Clone, Copy, Debug)]
pub struct OutputRecord {
    pub value_error: f64,
    pub deviation: f64,
    pub bounding_range: f64,
}

#[derive(Clone, Debug, Default)]
pub struct MetricsSummary {
    pub outputs: usize,
    /// Outputs with zero deviation, excluded from significand averages.
    pub zero_deviation_outputs: usize,
    pub avg_error: f64,
    pub max_error: f64,
    pub avg_deviation: f64,
    pub max_deviation: f64,
    pub avg_error_significand: f64,
    pub max_bounding_ratio: f64,
    pub bounding_leakage_count: usize,
}

pub fn summarize(records: &[OutputRecord]) -> MetricsSummary {
    let mut s = MetricsSummary {
        outputs: records.len(),
        ..Default::default()
    };
    if records.is_empty() {
        return s;
    }
    let mut significand_count = 0usize;
    for r in records {
        let err = r.value_error.abs();
        s.avg_error += err;
        s.max_error = s.max_error.max(err);
        s.avg_deviation += r.deviation;
        s.max_deviation = s.max_deviation.max(r.deviation);
        if r.deviation > 0.0 {
            s.avg_error_significand += err / r.deviation;
            significand_count += 1;
        } else {
            s.zero_deviation_outputs += 1;
        }
        if r.bounding_range > 0.0 {
            let ratio = err / r.bounding_range;
            s.max_bounding_ratio = s.max_bounding_ratio.max(ratio);
            if ratio > 1.0 {
                s.bounding_leakage_count += 1;
            }
        } else if err > 0.0 {
            s.bounding_leakage_count += 1;
        }
    }
    s.avg_error /= records.len() as f64;
    s.avg_deviation /= records.len() as f64;
    if significand_count > 0 {
        s.avg_error_significand /= significand_count as f64;
    }
    s
}

/// Fit of the exponential propagation model.
#[derive(Clone, Copy, Debug)]
pub struct FitResult {
    pub alpha: f64,
    pub beta: f64,
    pub r_squared: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropagationModel {
    /// `y = alpha * beta^L * dx` — output scales with the input deviation.
    WithInputDeviation,
    /// `z = alpha * beta^L` — dimensionless level, e.g. significands.
    LevelOnly,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FitError {
    #[error("need at least 3 distinct L values, got {0}")]
    TooFewLevels(usize),
    #[error("non-positive sample y = {0} cannot be log-fitted")]
    NonPositiveSample(f64),
    #[error("degenerate design matrix")]
    Degenerate,
}

/// Least squares of `log y = log alpha + L log beta (+ log dx)` over
/// `(L, dx, y)` samples.
pub fn fit_propagation(
    samples: &[(f64, f64, f64)],
    model: PropagationModel,
) -> Result<FitResult, FitError> {
    let mut levels: Vec<f64> = samples.iter().map(|s| s.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if levels.len() < 3 {
        return Err(FitError::TooFewLevels(levels.len()));
    }
    let mut xs = Vec::with_capacity(samples.len());
    let mut ys = Vec::with_capacity(samples.len());
    for &(level, dx, y) in samples {
        if y <= 0.0 {
            return Err(FitError::NonPositiveSample(y));
        }
        let target = match model {
            PropagationModel::WithInputDeviation => (y / dx).ln(),
            PropagationModel::LevelOnly => y.ln(),
        };
        xs.push(level);
        ys.push(target);
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    if sxx == 0.0 {
        return Err(FitError::Degenerate);
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let syy: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let fitted = intercept + slope * x;
            (y - fitted) * (y - fitted)
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(FitResult {
        alpha: intercept.exp(),
        beta: slope.exp(),
        r_squared,
    })
}

/// Significand fit predicted from separate error and deviation fits:
/// the ratio of their parameters.
pub fn predict_significand_fit(error_fit: &FitResult, deviation_fit: &FitResult) -> FitResult {
    FitResult {
        alpha: error_fit.alpha / deviation_fit.alpha,
        beta: error_fit.beta / deviation_fit.beta,
        r_squared: f64::NAN,
    }
}

/// Reverse-transform fit predicted from the forward fit: the same level
/// with the base rate halved by the exact final scaling.
pub fn predict_reverse_fit(forward: &FitResult) -> FitResult {
    FitResult {
        alpha: forward.alpha,
        beta: forward.beta / 2.0,
        r_squared: f64::NAN,
    }
}

/// Roundtrip fit predicted from forward and reverse fits: parameters
/// multiply.
pub fn predict_roundtrip_fit(forward: &FitResult, reverse: &FitResult) -> FitResult {
    FitResult {
        alpha: forward.alpha * reverse.alpha,
        beta: forward.beta * reverse.beta,
        r_squared: f64::NAN,
    }
}

/// Pearson correlation of two equally long series.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Slope of the least-squares line through `(x, y)` pairs.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_ratios() {
        let s = summarize(&[OutputRecord {
            value_error: 0.8,
            deviation: 1.0,
            bounding_range: 4.9,
        }]);
        assert_eq!(s.avg_error_significand, 0.8);
        assert!((s.max_bounding_ratio - 0.8 / 4.9).abs() < 1e-15);
        assert_eq!(s.bounding_leakage_count, 0);

        let s = summarize(&[OutputRecord {
            value_error: 5.0,
            deviation: 1.0,
            bounding_range: 4.0,
        }]);
        assert_eq!(s.bounding_leakage_count, 1);

        let s = summarize(&[
            OutputRecord {
                value_error: 0.0,
                deviation: 1.0,
                bounding_range: 1.0,
            };
            4
        ]);
        assert_eq!(s.avg_error_significand, 0.0);
        assert_eq!(s.bounding_leakage_count, 0);
    }

    #[test]
    fn zero_deviation_outputs_are_counted_separately() {
        let s = summarize(&[
            OutputRecord {
                value_error: 0.5,
                deviation: 0.0,
                bounding_range: 1.0,
            },
            OutputRecord {
                value_error: 0.5,
                deviation: 1.0,
                bounding_range: 1.0,
            },
        ]);
        assert_eq!(s.zero_deviation_outputs, 1);
        assert_eq!(s.avg_error_significand, 0.5);
    }

    #[test]
    fn exact_exponential_model_is_recovered() {
        let mut samples = Vec::new();
        for level in 3..10 {
            for dx in [1e-5, 1e-3] {
                let y = 2.0 * 1.5f64.powi(level) * dx;
                samples.push((level as f64, dx, y));
            }
        }
        let fit = fit_propagation(&samples, PropagationModel::WithInputDeviation).unwrap();
        assert!((fit.alpha - 2.0).abs() < 1e-6);
        assert!((fit.beta - 1.5).abs() < 1e-6);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        let err = fit_propagation(
            &[(1.0, 1.0, 1.0), (2.0, 1.0, 2.0)],
            PropagationModel::LevelOnly,
        )
        .unwrap_err();
        assert_eq!(err, FitError::TooFewLevels(2));
        let err = fit_propagation(
            &[(1.0, 1.0, 1.0), (2.0, 1.0, -2.0), (3.0, 1.0, 2.0)],
            PropagationModel::LevelOnly,
        )
        .unwrap_err();
        assert!(matches!(err, FitError::NonPositiveSample(_)));
    }

    #[test]
    fn composed_predictions() {
        let forward = FitResult {
            alpha: 1.0,
            beta: 1.4,
            r_squared: 1.0,
        };
        let reverse = predict_reverse_fit(&forward);
        assert!((reverse.beta - 0.7).abs() < 1e-15);
        let rt = predict_roundtrip_fit(&forward, &reverse);
        assert!((rt.beta - 0.98).abs() < 1e-12);
        let sig = predict_significand_fit(&forward, &forward);
        assert!((sig.beta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlation_and_slope_helpers() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [2.0, 4.0, 6.0, 8.0];
        assert!((pearson(&xs, &ys) - 1.0).abs() < 1e-12);
        assert!((regression_slope(&xs, &ys) - 2.0).abs() < 1e-12);
        let flat = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(pearson(&xs, &flat), 0.0);
    }
}
