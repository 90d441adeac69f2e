//! Experiment suites behind the command-line interface and the acceptance
//! tests: every suite returns its measurements and optionally writes the
//! tab-separated files and a run manifest.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    beta_scale, integrate_adaptive, moving_window_regress, taylor_geometric, taylor_geometric_f64,
    RegressionMode,
};
use crate::arithmetic::{
    Arithmetic, ArithmeticSpec, IndependenceArithmetic, IntervalArithmetic, PrecisionArithmetic,
};
use crate::config::ArithmeticConfig;
use crate::fft::{
    analytic_spectrum, build_phase_table, fft_forward, fft_reverse, gaussian, generate_signal,
    regressive_quarter_table, Complex, NoiseKind, SignalKind, SignalSpec,
};
use crate::matrix::{run_matrix_case, MatrixAlgorithm, MatrixExperimentRow};
use crate::metrics::{summarize, MetricsSummary, OutputRecord};
use crate::report::{self, fmt_f64, ReportError};
use crate::tracing::{chain_density, monte_carlo_roundup, round_up_leakage, ChainMethod};
use crate::value::{ErrorCode, PrecisionValue};

/// One concrete arithmetic instance, dispatched at runtime from a short
/// name.
pub enum AnyArithmetic {
    Precision(PrecisionArithmetic),
    Interval(IntervalArithmetic),
    Independence(IndependenceArithmetic),
}

impl AnyArithmetic {
    pub fn instantiate(spec: &ArithmeticSpec, seed: u64) -> Self {
        match spec {
            ArithmeticSpec::Precision { chi, policy } => AnyArithmetic::Precision(
                PrecisionArithmetic::new(ArithmeticConfig::new(16, *chi, *policy, seed)),
            ),
            ArithmeticSpec::Interval { sigma_rule } => {
                AnyArithmetic::Interval(IntervalArithmetic::new(*sigma_rule))
            }
            ArithmeticSpec::Independence { sigma_rule } => {
                AnyArithmetic::Independence(IndependenceArithmetic::new(*sigma_rule))
            }
        }
    }

    pub fn short_name(&self) -> String {
        match self {
            AnyArithmetic::Precision(a) => Arithmetic::name(a),
            AnyArithmetic::Interval(a) => Arithmetic::name(a),
            AnyArithmetic::Independence(a) => Arithmetic::name(a),
        }
    }
}

/// Runs a generic experiment body against whichever arithmetic the spec
/// selects.
#[macro_export]
macro_rules! with_arithmetic {
    ($spec:expr, $seed:expr, |$a:ident| $body:expr) => {{
        match $crate::experiments::AnyArithmetic::instantiate($spec, $seed) {
            $crate::experiments::AnyArithmetic::Precision(mut $a) => $body,
            $crate::experiments::AnyArithmetic::Interval(mut $a) => $body,
            $crate::experiments::AnyArithmetic::Independence(mut $a) => $body,
        }
    }};
}

/// Deterministic per-task stream seed.
pub fn stream_seed(base: u64, tags: &[u64]) -> u64 {
    let mut h = base ^ 0x9e37_79b9_7f4a_7c15;
    for &t in tags {
        h ^= t.wrapping_add(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(h << 6)
            .wrapping_add(h >> 2);
        h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FftAlgorithm {
    Forward,
    Reverse,
    RoundTrip,
}

impl FftAlgorithm {
    pub fn file_tag(&self) -> &'static str {
        match self {
            FftAlgorithm::Forward => "For",
            FftAlgorithm::Reverse => "Inv",
            FftAlgorithm::RoundTrip => "Rnd",
        }
    }

    fn index(&self) -> u64 {
        match self {
            FftAlgorithm::Forward => 0,
            FftAlgorithm::Reverse => 1,
            FftAlgorithm::RoundTrip => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FftRunSummary {
    pub algorithm: FftAlgorithm,
    pub signal: SignalKind,
    pub noise: NoiseKind,
    pub order: u32,
    pub frequency: f64,
    pub input_deviation: f64,
    pub seed: u64,
    pub summary: MetricsSummary,
}

#[derive(Clone, Debug)]
pub struct FftSuiteConfig {
    pub signals: Vec<SignalKind>,
    pub noises: Vec<NoiseKind>,
    pub orders: Vec<u32>,
    pub deviations: Vec<f64>,
    pub frequencies: Vec<f64>,
    pub seeds: Vec<u64>,
}

impl Default for FftSuiteConfig {
    fn default() -> Self {
        Self {
            signals: vec![SignalKind::Sin],
            noises: vec![NoiseKind::Gaussian],
            orders: (4..=10).collect(),
            deviations: vec![1e-5, 1e-3],
            frequencies: vec![1.0, 3.0],
            seeds: vec![7],
        }
    }
}

/// Phase table built once per order with precision arithmetic and bridged
/// into the target arithmetic through the mean-deviation cast.
fn bridged_phase_table<A: Arithmetic>(
    target: &mut A,
    order: u32,
    seed: u64,
) -> Result<Vec<Complex<A::Value>>, ErrorCode> {
    let mut builder = PrecisionArithmetic::new(ArithmeticConfig::new(
        16,
        2,
        crate::config::CarryPolicy::Random,
        stream_seed(seed, &[0x7068, order as u64]),
    ));
    let table = build_phase_table(&mut builder, order)?;
    let mut bridge = |target: &mut A, v: &PrecisionValue| {
        let mean = builder.expected(v);
        let dev = builder.deviation(v);
        if dev == 0.0 {
            target.from_exact(mean)
        } else {
            target.from_mean_deviation(mean, dev)
        }
    };
    Ok(table
        .iter()
        .map(|phi| {
            Complex::new(
                bridge(target, &phi.re),
                bridge(target, &phi.im),
            )
        })
        .collect())
}

fn record<A: Arithmetic>(arith: &A, value: &A::Value, target: f64) -> Option<OutputRecord> {
    if arith.error_of(value).is_some() {
        return None;
    }
    Some(OutputRecord {
        value_error: arith.expected(value) - target,
        deviation: arith.deviation(value),
        bounding_range: arith.bounding_range(value),
    })
}

/// Runs one signal through one FFT algorithm and summarizes the outputs
/// against their analytic expectations.
pub fn run_fft_case<A: Arithmetic>(
    arith: &mut A,
    spec: &SignalSpec,
    algorithm: FftAlgorithm,
    seed: u64,
) -> Result<MetricsSummary, ErrorCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(
        seed,
        &[
            algorithm.index(),
            spec.order as u64,
            spec.frequency.to_bits(),
            spec.input_deviation.to_bits(),
        ],
    ));
    let table = bridged_phase_table(arith, spec.order, seed)?;
    let mut data = generate_signal(arith, spec, &mut rng);
    let cast_means: Vec<(f64, f64)> = data
        .iter()
        .map(|v| (arith.expected(&v.re), arith.expected(&v.im)))
        .collect();
    let n = spec.len();
    let mut records = Vec::with_capacity(2 * n);
    match algorithm {
        FftAlgorithm::Forward => {
            fft_forward(arith, &mut data, &table);
            let expect = analytic_spectrum(spec);
            for (bin, v) in data.iter().enumerate() {
                records.extend(record(arith, &v.re, expect[bin].0));
                records.extend(record(arith, &v.im, expect[bin].1));
            }
        }
        FftAlgorithm::Reverse => {
            fft_reverse(arith, &mut data, &table);
            // Reverse transform of a real signal is the conjugate spectrum
            // over N.
            let expect = analytic_spectrum(spec);
            for (bin, v) in data.iter().enumerate() {
                let (re, im) = expect[bin];
                records.extend(record(arith, &v.re, re / n as f64));
                records.extend(record(arith, &v.im, -im / n as f64));
            }
        }
        FftAlgorithm::RoundTrip => {
            fft_forward(arith, &mut data, &table);
            fft_reverse(arith, &mut data, &table);
            for (k, v) in data.iter().enumerate() {
                records.extend(record(arith, &v.re, cast_means[k].0));
                records.extend(record(arith, &v.im, cast_means[k].1));
            }
        }
    }
    Ok(summarize(&records))
}

/// Full FFT suite over the configuration grid, optionally writing one TSV
/// per (algorithm, signal, noise) under the Appendix naming convention.
pub fn fft_suite<A: Arithmetic>(
    arith: &mut A,
    cfg: &FftSuiteConfig,
    out_dir: Option<&Path>,
) -> Result<Vec<FftRunSummary>, SuiteError> {
    let mut runs = Vec::new();
    for &signal in &cfg.signals {
        for &noise in &cfg.noises {
            for algorithm in [
                FftAlgorithm::Forward,
                FftAlgorithm::Reverse,
                FftAlgorithm::RoundTrip,
            ] {
                for &order in &cfg.orders {
                    for &dx in &cfg.deviations {
                        for &freq in &cfg.frequencies {
                            if freq >= (1u64 << order) as f64 / 2.0 {
                                continue;
                            }
                            for &seed in &cfg.seeds {
                                let spec = SignalSpec::new(signal, freq, order, noise, dx);
                                let summary = run_fft_case(arith, &spec, algorithm, seed)
                                    .map_err(SuiteError::Value)?;
                                runs.push(FftRunSummary {
                                    algorithm,
                                    signal,
                                    noise,
                                    order,
                                    frequency: freq,
                                    input_deviation: dx,
                                    seed,
                                    summary,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    if let Some(dir) = out_dir {
        write_fft_tsvs(&Arithmetic::name(arith), &runs, dir)?;
    }
    Ok(runs)
}

fn write_fft_tsvs(
    short_name: &str,
    runs: &[FftRunSummary],
    dir: &Path,
) -> Result<(), ReportError> {
    let header = [
        "order",
        "frequency",
        "input_deviation",
        "seed",
        "outputs",
        "avg_deviation",
        "max_deviation",
        "avg_error",
        "max_error",
        "avg_significand",
        "max_bounding_ratio",
        "leakage_count",
    ];
    for algorithm in [
        FftAlgorithm::Forward,
        FftAlgorithm::Reverse,
        FftAlgorithm::RoundTrip,
    ] {
        for signal in [
            SignalKind::Sin,
            SignalKind::Cos,
            SignalKind::SinCos,
            SignalKind::Linear,
        ] {
            for noise in [NoiseKind::None, NoiseKind::Gaussian] {
                let subset: Vec<&FftRunSummary> = runs
                    .iter()
                    .filter(|r| {
                        r.algorithm == algorithm && r.signal == signal && r.noise == noise
                    })
                    .collect();
                if subset.is_empty() {
                    continue;
                }
                let name = format!(
                    "{short_name}_{}_{}_{}.tsv",
                    algorithm.file_tag(),
                    signal.file_tag(),
                    noise.file_tag()
                );
                let rows = subset.iter().map(|r| {
                    vec![
                        r.order.to_string(),
                        fmt_f64(r.frequency),
                        fmt_f64(r.input_deviation),
                        r.seed.to_string(),
                        r.summary.outputs.to_string(),
                        fmt_f64(r.summary.avg_deviation),
                        fmt_f64(r.summary.max_deviation),
                        fmt_f64(r.summary.avg_error),
                        fmt_f64(r.summary.max_error),
                        fmt_f64(r.summary.avg_error_significand),
                        fmt_f64(r.summary.max_bounding_ratio),
                        r.summary.bounding_leakage_count.to_string(),
                    ]
                });
                report::write_tsv(&dir.join(name), &header, rows)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("value error: {0}")]
    Value(ErrorCode),
    #[error(transparent)]
    Report(#[from] ReportError),
}

#[derive(Clone, Debug)]
pub struct MatrixSuiteConfig {
    pub algorithms: Vec<MatrixAlgorithm>,
    pub sizes: Vec<usize>,
    pub deviations: Vec<f64>,
    pub matrices_per_config: usize,
    pub seed: u64,
}

impl Default for MatrixSuiteConfig {
    fn default() -> Self {
        Self {
            algorithms: vec![
                MatrixAlgorithm::RoundTrip,
                MatrixAlgorithm::Inverse,
                MatrixAlgorithm::Adjugate,
            ],
            sizes: (2..=6).collect(),
            deviations: vec![1e-13, 1e-9, 1e-5],
            matrices_per_config: 32,
            seed: 7,
        }
    }
}

pub fn matrix_suite<A: Arithmetic>(
    arith: &mut A,
    cfg: &MatrixSuiteConfig,
    out_dir: Option<&Path>,
) -> Result<Vec<(MatrixAlgorithm, MatrixExperimentRow)>, SuiteError> {
    let mut rows = Vec::new();
    for &algorithm in &cfg.algorithms {
        for &n in &cfg.sizes {
            for (di, &dev) in cfg.deviations.iter().enumerate() {
                for index in 0..cfg.matrices_per_config {
                    let case_seed =
                        stream_seed(cfg.seed, &[n as u64, di as u64, index as u64]);
                    let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
                    let row = run_matrix_case(arith, algorithm, n, dev, case_seed, &mut rng);
                    rows.push((algorithm, row));
                }
            }
        }
    }
    if let Some(dir) = out_dir {
        let header = [
            "algorithm",
            "N",
            "seed",
            "inputDeviation",
            "detSignificance",
            "avgError",
            "maxError",
            "avgDeviation",
            "maxDeviation",
            "avgSignificand",
            "maxBoundingRatio",
        ];
        let tsv_rows = rows.iter().filter(|(_, r)| !r.skipped).map(|(alg, r)| {
            vec![
                alg.label().to_string(),
                r.size.to_string(),
                r.seed.to_string(),
                fmt_f64(r.input_deviation),
                fmt_f64(r.det_significance),
                fmt_f64(r.avg_error),
                fmt_f64(r.max_error),
                fmt_f64(r.avg_deviation),
                fmt_f64(r.max_deviation),
                fmt_f64(r.avg_significand),
                fmt_f64(r.max_bounding_ratio),
            ]
        });
        report::write_tsv(&dir.join("matrix.tsv"), &header, tsv_rows)?;
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct SineCountSummary {
    pub count: u32,
    pub summary: MetricsSummary,
}

/// Regressive sine-table validation: builds the quarter table and compares
/// each regression count's new values against the double-precision sine.
pub fn sine_suite<A: Arithmetic>(
    arith: &mut A,
    max_count: u32,
    out_dir: Option<&Path>,
) -> Result<Vec<SineCountSummary>, SuiteError> {
    let table = regressive_quarter_table(arith, max_count).map_err(SuiteError::Value)?;
    let segments = table.pairs.len() - 1;
    let mut out = Vec::new();
    for count in 2..=max_count {
        let mut records = Vec::new();
        for (j, pair) in table.pairs.iter().enumerate() {
            if table.birth_count[j] != count {
                continue;
            }
            let angle = std::f64::consts::FRAC_PI_2 * j as f64 / segments as f64;
            records.extend(record(arith, &pair.im, angle.sin()));
            records.extend(record(arith, &pair.re, angle.cos()));
        }
        out.push(SineCountSummary {
            count,
            summary: summarize(&records),
        });
    }
    if let Some(dir) = out_dir {
        let header = [
            "count",
            "outputs",
            "avg_deviation",
            "max_deviation",
            "avg_error",
            "max_error",
            "avg_significand",
            "max_bounding_ratio",
            "leakage_count",
        ];
        let rows = out.iter().map(|s| {
            vec![
                s.count.to_string(),
                s.summary.outputs.to_string(),
                fmt_f64(s.summary.avg_deviation),
                fmt_f64(s.summary.max_deviation),
                fmt_f64(s.summary.avg_error),
                fmt_f64(s.summary.max_error),
                fmt_f64(s.summary.avg_error_significand),
                fmt_f64(s.summary.max_bounding_ratio),
                s.summary.bounding_leakage_count.to_string(),
            ]
        });
        report::write_tsv(&dir.join("sine.tsv"), &header, rows)?;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct TaylorReport {
    pub x: f64,
    pub input_deviation: f64,
    pub stop_order: Option<usize>,
    /// Per order: (value, cauchy, deviation, bounding range, remainder).
    pub steps: Vec<(usize, f64, f64, f64, f64, f64)>,
}

pub fn taylor_suite<A: Arithmetic>(
    arith: &mut A,
    xs: &[f64],
    input_deviation: f64,
    max_order: usize,
    out_dir: Option<&Path>,
) -> Result<Vec<TaylorReport>, SuiteError> {
    let mut reports = Vec::new();
    for &x in xs {
        let run =
            taylor_geometric(arith, x, input_deviation, max_order).map_err(SuiteError::Value)?;
        let truth = 1.0 / (1.0 + x);
        let steps = run
            .steps
            .iter()
            .map(|s| {
                let v = arith.expected(&s.value);
                (
                    s.order,
                    v,
                    s.cauchy,
                    s.deviation,
                    s.bounding_range,
                    (v - truth).abs(),
                )
            })
            .collect();
        reports.push(TaylorReport {
            x,
            input_deviation,
            stop_order: run.stop_order,
            steps,
        });
    }
    if let Some(dir) = out_dir {
        let header = [
            "x",
            "order",
            "value",
            "cauchy",
            "deviation",
            "bounding_range",
            "remainder",
        ];
        let mut rows = Vec::new();
        for r in &reports {
            for &(order, v, cauchy, dev, range, rem) in &r.steps {
                rows.push(vec![
                    fmt_f64(r.x),
                    order.to_string(),
                    fmt_f64(v),
                    fmt_f64(cauchy),
                    fmt_f64(dev),
                    fmt_f64(range),
                    fmt_f64(rem),
                ]);
            }
        }
        report::write_tsv(&dir.join("taylor.tsv"), &header, rows)?;
    }
    Ok(reports)
}

/// Double-precision reference run of the geometric expansion, for the
/// no-input-uncertainty stopping study.
pub fn taylor_reference_f64(xs: &[f64], max_order: usize) -> Vec<(f64, Vec<(usize, f64, f64)>)> {
    xs.iter()
        .map(|&x| (x, taylor_geometric_f64(x, max_order)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct IntegrationReport {
    pub power: u32,
    pub value: f64,
    pub expected: f64,
    pub deviation: f64,
    pub bounding_range: f64,
    pub leaves: usize,
    pub max_depth: usize,
    pub zero_traps: usize,
}

/// Integrates monomials over `[0, 4]` with the adaptive search, in
/// precision arithmetic, and compares against the closed forms.
pub fn integrate_suite(
    arith: &mut PrecisionArithmetic,
    powers: &[u32],
    out_dir: Option<&Path>,
) -> Result<Vec<IntegrationReport>, SuiteError> {
    let mut reports = Vec::new();
    for &power in powers {
        let mut coeffs = vec![0.0; power as usize + 1];
        coeffs.push(1.0);
        let mut f = |a: &mut PrecisionArithmetic, x: &PrecisionValue| a.eval_polynomial(&coeffs, x);
        let result = integrate_adaptive(arith, &mut f, 0.0, 4.0);
        let expected = 4f64.powi(power as i32 + 1) / (power as f64 + 1.0);
        reports.push(IntegrationReport {
            power,
            value: arith.expected(&result.total),
            expected,
            deviation: arith.deviation(&result.total),
            bounding_range: arith.bounding_range(&result.total),
            leaves: result.leaves,
            max_depth: result.max_depth,
            zero_traps: result.zero_traps.len(),
        });
    }
    if let Some(dir) = out_dir {
        let header = [
            "power",
            "value",
            "expected",
            "error",
            "deviation",
            "bounding_range",
            "leaves",
            "max_depth",
            "zero_traps",
        ];
        let rows = reports.iter().map(|r| {
            vec![
                r.power.to_string(),
                fmt_f64(r.value),
                fmt_f64(r.expected),
                fmt_f64(r.value - r.expected),
                fmt_f64(r.deviation),
                fmt_f64(r.bounding_range),
                r.leaves.to_string(),
                r.max_depth.to_string(),
                r.zero_traps.to_string(),
            ]
        });
        report::write_tsv(&dir.join("integration.tsv"), &header, rows)?;
    }
    Ok(reports)
}

/// Noise shape over the stream: a burst multiplies the noise in the middle
/// third, optionally also raising the deviation the casts claim.
#[derive(Clone, Copy, Debug)]
pub struct NoiseProfile {
    pub base_deviation: f64,
    pub burst_factor: f64,
    pub burst_raises_claimed_deviation: bool,
}

impl NoiseProfile {
    pub fn flat(dev: f64) -> Self {
        Self {
            base_deviation: dev,
            burst_factor: 1.0,
            burst_raises_claimed_deviation: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RegressStepReport {
    pub t: usize,
    pub deviation_alpha: f64,
    pub deviation_beta: f64,
    pub error_alpha: f64,
    pub error_beta: f64,
    pub significand: f64,
    pub bounding_ratio: f64,
}

/// Moving-window regression over a noisy line, reporting per-step beta
/// metrics against the exact window sums.
pub fn regress_suite<A: Arithmetic>(
    arith: &mut A,
    mode: RegressionMode,
    steps: usize,
    h: usize,
    slope: f64,
    profile: NoiseProfile,
    seed: u64,
    out_dir: Option<&Path>,
) -> Result<Vec<RegressStepReport>, SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, &[steps as u64, h as u64]));
    let len = steps + 2 * h + 1;
    let mut stream = Vec::with_capacity(len);
    let mut devs = Vec::with_capacity(len);
    for j in 0..len {
        let in_burst = j >= len / 3 && j < 2 * len / 3;
        let noise_dev = if in_burst {
            profile.base_deviation * profile.burst_factor
        } else {
            profile.base_deviation
        };
        let claimed = if in_burst && profile.burst_raises_claimed_deviation {
            noise_dev
        } else {
            profile.base_deviation
        };
        let y = slope * j as f64 + noise_dev * gaussian(&mut rng);
        stream.push(arith.from_mean_deviation(y, claimed));
        devs.push(claimed);
    }
    let steps_out = moving_window_regress(arith, mode, &stream, h, &devs);
    let mut reports = Vec::with_capacity(steps_out.len());
    for s in &steps_out {
        let center = s.t as f64 - h as f64;
        let alpha_true = (2 * h + 1) as f64 * slope * center;
        let beta_true = slope * beta_scale(h);
        let e_a = (arith.expected(&s.alpha) - alpha_true).abs();
        let e_b = (arith.expected(&s.beta) - beta_true).abs();
        let d_b = arith.deviation(&s.beta);
        let r_b = arith.bounding_range(&s.beta);
        reports.push(RegressStepReport {
            t: s.t,
            deviation_alpha: arith.deviation(&s.alpha),
            deviation_beta: d_b,
            error_alpha: e_a,
            error_beta: e_b,
            significand: if d_b > 0.0 { e_b / d_b } else { 0.0 },
            bounding_ratio: if r_b > 0.0 { e_b / r_b } else { 0.0 },
        });
    }
    if let Some(dir) = out_dir {
        let header = [
            "t",
            "deviation_alpha",
            "deviation_beta",
            "error_alpha",
            "error_beta",
            "significand",
            "boundingRatio",
        ];
        let rows = reports.iter().map(|r| {
            vec![
                r.t.to_string(),
                fmt_f64(r.deviation_alpha),
                fmt_f64(r.deviation_beta),
                fmt_f64(r.error_alpha),
                fmt_f64(r.error_beta),
                fmt_f64(r.significand),
                fmt_f64(r.bounding_ratio),
            ]
        });
        let name = format!("regress_{}.tsv", mode.label());
        report::write_tsv(&dir.join(name), &header, rows)?;
    }
    Ok(reports)
}

/// Rounding-error tracing: the Monte-Carlo single-round-up density for a
/// threshold, chained densities for a ladder of bounding ranges, and the
/// leakage table.
pub fn trace_suite(
    threshold: u32,
    trials: usize,
    seed: u64,
    out_root: Option<&Path>,
) -> Result<TraceReport, SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, &[threshold as u64]));
    let base = monte_carlo_roundup(threshold, trials, &mut rng);
    let ladder = [2usize, 3, 4, 8, 16];
    let mut chained = Vec::new();
    for &copies in &ladder {
        for method in [ChainMethod::Add, ChainMethod::Sub, ChainMethod::AddSub] {
            chained.push((copies, method, chain_density(&base, copies, method)));
        }
    }
    let leakage: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0, 16.0]
        .iter()
        .map(|&r| (r, round_up_leakage(r)))
        .collect();
    if let Some(root) = out_root {
        let dir = root.join("Tracking").join(threshold.to_string());
        std::fs::create_dir_all(&dir).map_err(|source| {
            SuiteError::Report(ReportError::Io {
                path: dir.clone(),
                source,
            })
        })?;
        let density_rows = |d: &crate::tracing::ErrorDensity| {
            d.masses
                .iter()
                .enumerate()
                .map(|(i, _)| vec![fmt_f64(d.point(i)), fmt_f64(d.density(i))])
                .collect::<Vec<_>>()
        };
        report::write_tsv(
            &dir.join("MonteCarlo.tsv"),
            &["error_bin", "probability_density"],
            density_rows(&base),
        )?;
        for (copies, method, density) in &chained {
            let r = *copies as f64 / 2.0;
            let r_txt = if r.fract() == 0.0 {
                format!("{}", r as u64)
            } else {
                format!("{r}")
            };
            let name = format!("Range_{r_txt}_{}.tsv", method.file_tag());
            report::write_tsv(
                &dir.join(name),
                &["error_bin", "probability_density"],
                density_rows(density),
            )?;
        }
        let rows = leakage
            .iter()
            .map(|(r, l)| vec![fmt_f64(*r), fmt_f64(*l)]);
        report::write_tsv(&dir.join("All.tsv"), &["bounding_range", "leakage"], rows)?;
    }
    Ok(TraceReport {
        threshold,
        base,
        chained,
        leakage,
    })
}

pub struct TraceReport {
    pub threshold: u32,
    pub base: crate::tracing::ErrorDensity,
    pub chained: Vec<(usize, ChainMethod, crate::tracing::ErrorDensity)>,
    pub leakage: Vec<(f64, f64)>,
}

/// The basic-math demonstration: casts, the four operations, comparison,
/// and the large-product cancellation case, rendered into `DemoMath.txt`.
pub fn demo_math<A: Arithmetic>(arith: &mut A, out_dir: Option<&Path>) -> Result<String, SuiteError> {
    let mut lines = Vec::new();
    lines.push(format!("arithmetic: {}", Arithmetic::name(arith)));

    let half = arith.from_mean_deviation(0.5, 0.001);
    lines.push(format!("cast 0.5 +- 0.001 -> {}", arith.render(&half)));
    let one = arith.from_mean_deviation(1.0, 0.002);
    lines.push(format!("cast 1 +- 0.002 -> {}", arith.render(&one)));

    let sum = arith.add(&half, &one);
    lines.push(format!("sum -> {}", arith.render(&sum)));
    let diff = arith.sub(&one, &half);
    lines.push(format!("difference -> {}", arith.render(&diff)));
    let prod = arith.mul(&half, &one);
    lines.push(format!("product -> {}", arith.render(&prod)));
    let quot = arith.div(&one, &half);
    lines.push(format!("quotient -> {}", arith.render(&quot)));
    let sq = arith.square(&half);
    lines.push(format!("square of the half -> {}", arith.render(&sq)));

    // The motivating product difference: exact integer arithmetic yields
    // exactly 1; an uncertainty-bearing arithmetic must not claim a
    // confident wrong answer.
    let a = arith.from_float(64919121.0);
    let b = arith.from_float(205117922.0);
    let c = arith.from_float(159018721.0);
    let d = arith.from_float(83739041.0);
    let left = arith.mul(&a, &b);
    let right = arith.mul(&c, &d);
    let residual = arith.sub(&left, &right);
    lines.push(format!(
        "64919121*205117922 - 159018721*83739041 -> {} (significant: {}, true value 1 inside range: {})",
        arith.render(&residual),
        arith.is_significant(&residual),
        (arith.expected(&residual) - 1.0).abs() <= arith.bounding_range(&residual),
    ));

    let text = lines.join("\n") + "\n";
    if let Some(dir) = out_dir {
        let path = dir.join("DemoMath.txt");
        std::fs::write(&path, &text).map_err(|source| {
            SuiteError::Report(ReportError::Io { path, source })
        })?;
    }
    Ok(text)
}

/// Convenience used by the CLI and examples: resolves the suite directory
/// and writes the manifest.
pub fn prepare_suite_dir(
    out_root: Option<&Path>,
    short_name: &str,
    suite: &str,
    seed: u64,
    extra: &[(String, String)],
) -> Result<PathBuf, ReportError> {
    let root = report::output_root(out_root);
    let dir = report::suite_dir(&root, short_name, suite)?;
    let mut manifest = report::base_manifest(short_name, suite, seed);
    manifest.extend_from_slice(extra);
    report::write_manifest(&dir, &manifest)?;
    Ok(dir)
}
