//! Radix-2 FFT generic over any arithmetic, with the phase table built
//! regressively from half-angle relations, signal generators, and exact
//! expected spectra for the test signals.

use rand::Rng;

use crate::arithmetic::Arithmetic;
use crate::value::ErrorCode;

#[derive(Clone, Debug)]
pub struct Complex<V> {
    pub re: V,
    pub im: V,
}

impl<V: Clone> Complex<V> {
    pub fn new(re: V, im: V) -> Self {
        Self { re, im }
    }
}

pub fn c_add<A: Arithmetic>(
    a: &mut A,
    x: &Complex<A::Value>,
    y: &Complex<A::Value>,
) -> Complex<A::Value> {
    Complex::new(a.add(&x.re, &y.re), a.add(&x.im, &y.im))
}

pub fn c_sub<A: Arithmetic>(
    a: &mut A,
    x: &Complex<A::Value>,
    y: &Complex<A::Value>,
) -> Complex<A::Value> {
    Complex::new(a.sub(&x.re, &y.re), a.sub(&x.im, &y.im))
}

pub fn c_mul<A: Arithmetic>(
    a: &mut A,
    x: &Complex<A::Value>,
    y: &Complex<A::Value>,
) -> Complex<A::Value> {
    let rr = a.mul(&x.re, &y.re);
    let ii = a.mul(&x.im, &y.im);
    let ri = a.mul(&x.re, &y.im);
    let ir = a.mul(&x.im, &y.re);
    Complex::new(a.sub(&rr, &ii), a.add(&ri, &ir))
}

pub fn c_conj<A: Arithmetic>(a: &mut A, x: &Complex<A::Value>) -> Complex<A::Value> {
    Complex::new(x.re.clone(), a.neg(&x.im))
}

pub fn c_scale<A: Arithmetic>(
    a: &mut A,
    x: &Complex<A::Value>,
    k: &A::Value,
) -> Complex<A::Value> {
    Complex::new(a.mul(&x.re, k), a.mul(&x.im, k))
}

/// First-quadrant sine/cosine pairs produced by regressive bisection, each
/// tagged with the regression count that produced it (count `r` yields
/// `2^(r-2)` new values).
pub struct QuarterTable<V> {
    /// `(cos, sin)` at angles `(pi/2) * j / len` for `j = 0..=len`.
    pub pairs: Vec<Complex<V>>,
    /// Regression count that produced each entry (0 for the seeds).
    pub birth_count: Vec<u32>,
}

/// Builds sine/cosine values on the closed quarter circle by repeated
/// half-angle bisection from the seeds sin(0) = 0 and sin(pi/2) = 1.
/// `regressions` of count `r` produce angle resolution `(pi/2) / 2^(r-1)`.
pub fn regressive_quarter_table<A: Arithmetic>(
    arith: &mut A,
    regressions: u32,
) -> Result<QuarterTable<A::Value>, ErrorCode> {
    let segments = 1usize << regressions.max(1).saturating_sub(1);
    let zero = arith.from_exact(0.0);
    let one = arith.from_exact(1.0);
    let half = arith.from_exact(0.5);
    let mut pairs: Vec<Option<Complex<A::Value>>> = vec![None; segments + 1];
    let mut birth: Vec<u32> = vec![0; segments + 1];
    pairs[0] = Some(Complex::new(one.clone(), zero.clone()));
    pairs[segments] = Some(Complex::new(zero, one));
    let mut step = segments;
    let mut count = 2u32;
    while step >= 2 {
        let mid_step = step / 2;
        let mut j = 0;
        while j + step <= segments {
            let lo = pairs[j].clone().expect("filled at previous count");
            let hi = pairs[j + step].clone().expect("filled at previous count");
            // sin((a+b)/2) = sqrt((1 - cos a cos b + sin a sin b) / 2),
            // cos((a+b)/2) = sqrt((1 + cos a cos b - sin a sin b) / 2).
            let cc = arith.mul(&lo.re, &hi.re);
            let ss = arith.mul(&lo.im, &hi.im);
            let spread = arith.sub(&cc, &ss);
            let one = arith.from_exact(1.0);
            let below = arith.sub(&one, &spread);
            let sin_arg = arith.mul(&below, &half);
            let one = arith.from_exact(1.0);
            let above = arith.add(&one, &spread);
            let cos_arg = arith.mul(&above, &half);
            let sin_mid = arith.sqrt(&sin_arg);
            let cos_mid = arith.sqrt(&cos_arg);
            if let Some(code) = arith.error_of(&sin_mid).or(arith.error_of(&cos_mid)) {
                return Err(code);
            }
            pairs[j + mid_step] = Some(Complex::new(cos_mid, sin_mid));
            birth[j + mid_step] = count;
            j += step;
        }
        step = mid_step;
        count += 1;
    }
    Ok(QuarterTable {
        pairs: pairs.into_iter().map(|p| p.unwrap()).collect(),
        birth_count: birth,
    })
}

/// Phase factor array `phi[n] = e^(i 2 pi n / 2^order)` for a transform of
/// `2^order` points, assembled from the regressive quarter table by
/// quadrant symmetry (sign flips are exact).
pub fn build_phase_table<A: Arithmetic>(
    arith: &mut A,
    order: u32,
) -> Result<Vec<Complex<A::Value>>, ErrorCode> {
    assert!(order >= 2 && order <= 24, "order out of range: {order}");
    let n = 1usize << order;
    // The quarter circle spans N/4 segments, one fewer regression count.
    let quarter = regressive_quarter_table(arith, order - 1)?;
    let q = n / 4;
    let mut table = Vec::with_capacity(n);
    for i in 0..n {
        let base = quarter.pairs[i % q].clone();
        let pair = match i / q {
            0 => base,
            1 => Complex::new(arith.neg(&base.im), base.re),
            2 => Complex::new(arith.neg(&base.re), arith.neg(&base.im)),
            _ => Complex::new(base.im, arith.neg(&base.re)),
        };
        table.push(pair);
    }
    Ok(table)
}

fn bit_reverse(mut x: usize, bits: u32) -> usize {
    let mut r = 0usize;
    for _ in 0..bits {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    r
}

fn permute_bit_reversed<V: Clone>(data: &mut [Complex<V>], bits: u32) {
    let n = data.len();
    for i in 0..n {
        let j = bit_reverse(i, bits);
        if j > i {
            data.swap(i, j);
        }
    }
}

/// In-place radix-2 transform with the `+i` kernel; `phase` must hold the
/// `2^order` phase factors.
pub fn fft_forward<A: Arithmetic>(
    arith: &mut A,
    data: &mut [Complex<A::Value>],
    phase: &[Complex<A::Value>],
) {
    fft_with_kernel(arith, data, phase, false);
}

/// Reverse transform: conjugate phases and an exact division by `2^order`.
pub fn fft_reverse<A: Arithmetic>(
    arith: &mut A,
    data: &mut [Complex<A::Value>],
    phase: &[Complex<A::Value>],
) {
    fft_with_kernel(arith, data, phase, true);
    let order = data.len().trailing_zeros();
    let scale = arith.from_exact(crate::value::exp2i(-(order as i32)));
    for v in data.iter_mut() {
        *v = c_scale(arith, v, &scale);
    }
}

fn fft_with_kernel<A: Arithmetic>(
    arith: &mut A,
    data: &mut [Complex<A::Value>],
    phase: &[Complex<A::Value>],
    conjugate: bool,
) {
    let n = data.len();
    assert!(n.is_power_of_two(), "transform length must be a power of 2");
    assert_eq!(phase.len(), n, "phase table length mismatch");
    let order = n.trailing_zeros();
    permute_bit_reversed(data, order);
    let mut half = 1usize;
    while half < n {
        let stride = n / (2 * half);
        for start in (0..n).step_by(2 * half) {
            for k in 0..half {
                let idx = k * stride;
                let tw = if conjugate {
                    c_conj(arith, &phase[idx])
                } else {
                    phase[idx].clone()
                };
                let t = c_mul(arith, &tw, &data[start + k + half]);
                let top = c_add(arith, &data[start + k], &t);
                let bottom = c_sub(arith, &data[start + k], &t);
                data[start + k] = top;
                data[start + k + half] = bottom;
            }
        }
        half *= 2;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignalKind {
    Sin,
    Cos,
    SinCos,
    Linear,
}

impl SignalKind {
    pub fn file_tag(&self) -> &'static str {
        match self {
            SignalKind::Sin => "Sin",
            SignalKind::Cos => "Cos",
            SignalKind::SinCos => "SinCos",
            SignalKind::Linear => "Linear",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    Gaussian,
}

impl NoiseKind {
    pub fn file_tag(&self) -> &'static str {
        match self {
            NoiseKind::None => "",
            NoiseKind::Gaussian => "GN",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub frequency: f64,
    pub order: u32,
    pub noise: NoiseKind,
    pub input_deviation: f64,
    /// Slope for the linear signal; `1/N` keeps magnitudes of order one.
    pub slope: f64,
}

impl SignalSpec {
    pub fn new(kind: SignalKind, frequency: f64, order: u32, noise: NoiseKind, dev: f64) -> Self {
        assert!(order >= 2);
        let n = 1u64 << order;
        assert!(frequency >= 0.0 && frequency < n as f64 / 2.0);
        Self {
            kind,
            frequency,
            order,
            noise,
            input_deviation: dev,
            slope: 1.0 / n as f64,
        }
    }

    pub fn len(&self) -> usize {
        1usize << self.order
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ideal sample, before casting or noise.
    pub fn ideal(&self, k: usize) -> f64 {
        let n = self.len() as f64;
        let theta = 2.0 * std::f64::consts::PI * self.frequency * k as f64 / n;
        match self.kind {
            SignalKind::Sin => theta.sin(),
            SignalKind::Cos => theta.cos(),
            SignalKind::SinCos => theta.sin() + theta.cos(),
            SignalKind::Linear => self.slope * k as f64,
        }
    }
}

/// Gaussian deviate by Box-Muller on the experiment's seeded stream.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Casts the signal into the arithmetic: the clean variant casts perfect
/// samples at the input deviation, the noisy variant perturbs each sample
/// with Gaussian noise of the same deviation first. Both components of
/// each complex sample are cast as measured values.
pub fn generate_signal<A: Arithmetic, R: Rng + ?Sized>(
    arith: &mut A,
    spec: &SignalSpec,
    rng: &mut R,
) -> Vec<Complex<A::Value>> {
    (0..spec.len())
        .map(|k| {
            let ideal = spec.ideal(k);
            let (re, im) = match spec.noise {
                NoiseKind::None => (ideal, 0.0),
                NoiseKind::Gaussian => (
                    ideal + spec.input_deviation * gaussian(rng),
                    spec.input_deviation * gaussian(rng),
                ),
            };
            Complex::new(
                arith.from_mean_deviation(re, spec.input_deviation),
                arith.from_mean_deviation(im, spec.input_deviation),
            )
        })
        .collect()
}

/// Exact expected spectrum of the ideal signal under the `+i` kernel.
pub fn analytic_spectrum(spec: &SignalSpec) -> Vec<(f64, f64)> {
    let n = spec.len();
    match spec.kind {
        SignalKind::Sin => spectrum_from_exponentials(n, spec.frequency, (0.0, -0.5), (0.0, 0.5)),
        SignalKind::Cos => spectrum_from_exponentials(n, spec.frequency, (0.5, 0.0), (0.5, 0.0)),
        SignalKind::SinCos => {
            spectrum_from_exponentials(n, spec.frequency, (0.5, -0.5), (0.5, 0.5))
        }
        SignalKind::Linear => linear_spectrum(n, spec.slope),
    }
}

/// Spectrum of `a * e^(i w k) + b * e^(-i w k)` with `w = 2 pi f / N`,
/// via the closed geometric sum; handles index and fractional frequencies
/// uniformly.
fn spectrum_from_exponentials(
    n: usize,
    f: f64,
    pos_coeff: (f64, f64),
    neg_coeff: (f64, f64),
) -> Vec<(f64, f64)> {
    (0..n)
        .map(|bin| {
            let g_pos = geometric_sum(n, bin as f64 + f);
            let g_neg = geometric_sum(n, bin as f64 - f);
            let re = pos_coeff.0 * g_pos.0 - pos_coeff.1 * g_pos.1 + neg_coeff.0 * g_neg.0
                - neg_coeff.1 * g_neg.1;
            let im = pos_coeff.0 * g_pos.1 + pos_coeff.1 * g_pos.0
                + neg_coeff.0 * g_neg.1
                + neg_coeff.1 * g_neg.0;
            (re, im)
        })
        .collect()
}

/// `sum_k e^(i 2 pi u k / N)` for `k = 0..N`.
fn geometric_sum(n: usize, u: f64) -> (f64, f64) {
    let rounded = u.round();
    if (u - rounded).abs() < 1e-12 {
        // Integer frequency: N at multiples of N, zero elsewhere.
        let m = rounded as i64 % n as i64;
        return if m == 0 { (n as f64, 0.0) } else { (0.0, 0.0) };
    }
    let top = 2.0 * std::f64::consts::PI * u;
    let bottom = top / n as f64;
    // (e^(i top) - 1) / (e^(i bottom) - 1)
    let num = (top.cos() - 1.0, top.sin());
    let den = (bottom.cos() - 1.0, bottom.sin());
    let mag2 = den.0 * den.0 + den.1 * den.1;
    (
        (num.0 * den.0 + num.1 * den.1) / mag2,
        (num.1 * den.0 - num.0 * den.1) / mag2,
    )
}

/// Expected spectrum of the linear ramp `h[k] = slope * k`:
/// `H[0] = slope * N (N-1) / 2`, otherwise
/// `H[n] = -slope * (N/2) * (1 + i / tan(pi n / N))`.
fn linear_spectrum(n: usize, slope: f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|bin| {
            if bin == 0 {
                (slope * (n as f64) * (n as f64 - 1.0) / 2.0, 0.0)
            } else {
                let t = (std::f64::consts::PI * bin as f64 / n as f64).tan();
                (-slope * n as f64 / 2.0, -slope * n as f64 / (2.0 * t))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{IndependenceArithmetic, PrecisionArithmetic};
    use crate::config::ArithmeticConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn prec() -> PrecisionArithmetic {
        PrecisionArithmetic::new(ArithmeticConfig::default())
    }

    /// Brute-force DFT with the +i kernel, as the independent oracle.
    fn dft_oracle(samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let n = samples.len();
        (0..n)
            .map(|bin| {
                let mut acc = (0.0, 0.0);
                for (k, &(re, im)) in samples.iter().enumerate() {
                    let th = 2.0 * std::f64::consts::PI * bin as f64 * k as f64 / n as f64;
                    let (c, s) = (th.cos(), th.sin());
                    acc.0 += re * c - im * s;
                    acc.1 += re * s + im * c;
                }
                acc
            })
            .collect()
    }

    #[test]
    fn phase_table_landmarks() {
        let mut a = prec();
        let table = build_phase_table(&mut a, 4).unwrap();
        let n = 16;
        // phi[0] = 1 and phi[N/4] = i, both precise.
        assert_eq!(a.expected(&table[0].re), 1.0);
        assert_eq!(a.expected(&table[0].im), 0.0);
        assert!(table[0].re.is_precise());
        assert_eq!(a.expected(&table[n / 4].im), 1.0);
        assert_eq!(a.expected(&table[n / 4].re), 0.0);
        // phi[N/8] = (1 + i)/sqrt(2) within tracked uncertainty.
        let s = 0.5f64.sqrt();
        assert!((a.expected(&table[n / 8].re) - s).abs() <= a.bounding_range(&table[n / 8].re));
        assert!((a.expected(&table[n / 8].im) - s).abs() <= a.bounding_range(&table[n / 8].im));
        // Whole table against libm.
        for (i, phi) in table.iter().enumerate() {
            let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            assert!(
                (a.expected(&phi.re) - th.cos()).abs() < 1e-9,
                "cos at {i}: {} vs {}",
                a.expected(&phi.re),
                th.cos()
            );
            assert!((a.expected(&phi.im) - th.sin()).abs() < 1e-9, "sin at {i}");
        }
    }

    #[test]
    fn phase_table_identity_stays_insignificant() {
        let mut a = prec();
        let table = build_phase_table(&mut a, 6).unwrap();
        for phi in &table {
            let rr = a.square(&phi.re);
            let ii = a.square(&phi.im);
            let one = a.from_exact(1.0);
            let sum = a.add(&rr, &ii);
            let residual = a.sub(&sum, &one);
            assert!(!a.is_significant(&residual), "|phi|^2 - 1 significant");
        }
    }

    #[test]
    fn quarter_table_birth_counts() {
        let mut a = prec();
        let q = regressive_quarter_table(&mut a, 6).unwrap();
        // Count r produces 2^(r-2) outputs.
        for r in 2..=6u32 {
            let made = q.birth_count.iter().filter(|&&b| b == r).count();
            assert_eq!(made, 1 << (r - 2), "count {r}");
        }
    }

    #[test]
    fn impulse_spectrum_is_flat() {
        let mut a = prec();
        let table = build_phase_table(&mut a, 2).unwrap();
        let one = a.from_exact(1.0);
        let zero = a.from_exact(0.0);
        let mut data = vec![
            Complex::new(one, zero.clone()),
            Complex::new(zero.clone(), zero.clone()),
            Complex::new(zero.clone(), zero.clone()),
            Complex::new(zero.clone(), zero),
        ];
        fft_forward(&mut a, &mut data, &table);
        for v in &data {
            assert_eq!(a.expected(&v.re), 1.0);
            assert_eq!(a.expected(&v.im), 0.0);
        }
    }

    #[test]
    fn index_frequency_sine_peaks_at_i_n_over_2() {
        let mut a = IndependenceArithmetic::new(6);
        let order = 5;
        let n = 1usize << order;
        let freq = 3.0;
        let spec = SignalSpec::new(SignalKind::Sin, freq, order, NoiseKind::None, 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut data = generate_signal(&mut a, &spec, &mut rng);
        let table = {
            let mut p = prec();
            let t = build_phase_table(&mut p, order).unwrap();
            bridge_table(&mut a, &p, &t)
        };
        fft_forward(&mut a, &mut data, &table);
        let expect = analytic_spectrum(&spec);
        for (bin, v) in data.iter().enumerate() {
            let (er, ei) = expect[bin];
            assert!(
                (a.expected(&v.re) - er).abs() < 1e-6,
                "re bin {bin}: {} vs {er}",
                a.expected(&v.re)
            );
            assert!((a.expected(&v.im) - ei).abs() < 1e-6, "im bin {bin}");
            if bin == freq as usize {
                assert!((ei - n as f64 / 2.0).abs() < 1e-9);
            } else if bin == n - freq as usize {
                assert!((ei + n as f64 / 2.0).abs() < 1e-9);
            } else {
                assert!(er.abs() < 1e-9 && ei.abs() < 1e-9);
            }
        }
    }

    fn bridge_table<A: Arithmetic>(
        a: &mut A,
        p: &PrecisionArithmetic,
        table: &[Complex<crate::value::PrecisionValue>],
    ) -> Vec<Complex<A::Value>> {
        table
            .iter()
            .map(|phi| {
                Complex::new(
                    a.from_mean_deviation(p.expected(&phi.re), p.deviation(&phi.re)),
                    a.from_mean_deviation(p.expected(&phi.im), p.deviation(&phi.im)),
                )
            })
            .collect()
    }

    #[test]
    fn analytic_spectra_match_brute_force() {
        for (kind, freq) in [
            (SignalKind::Sin, 3.0),
            (SignalKind::Cos, 5.0),
            (SignalKind::SinCos, 2.0),
            (SignalKind::Sin, 2.5),
            (SignalKind::Linear, 0.0),
        ] {
            let spec = SignalSpec::new(kind, freq, 4, NoiseKind::None, 0.0);
            let samples: Vec<(f64, f64)> = (0..spec.len()).map(|k| (spec.ideal(k), 0.0)).collect();
            let oracle = dft_oracle(&samples);
            let analytic = analytic_spectrum(&spec);
            for (bin, (o, c)) in oracle.iter().zip(&analytic).enumerate() {
                assert!(
                    (o.0 - c.0).abs() < 1e-9 && (o.1 - c.1).abs() < 1e-9,
                    "{kind:?} f={freq} bin {bin}: oracle {o:?} vs analytic {c:?}"
                );
            }
        }
        // The worked linear case: slope 1, N = 4, bin 1 gives -2 - 2i.
        let mut spec = SignalSpec::new(SignalKind::Linear, 0.0, 2, NoiseKind::None, 0.0);
        spec.slope = 1.0;
        let analytic = analytic_spectrum(&spec);
        assert!((analytic[1].0 + 2.0).abs() < 1e-12);
        assert!((analytic[1].1 + 2.0).abs() < 1e-12);
        assert!((analytic[0].0 - 6.0).abs() < 1e-12);
    }

    #[test]
    fn half_fractional_frequency_peak_magnitude() {
        // |delta f| -> 1/2 pushes the peak toward N / pi.
        let order = 6;
        let n = 1usize << order;
        let spec = SignalSpec::new(SignalKind::Sin, 10.5, order, NoiseKind::None, 0.0);
        let analytic = analytic_spectrum(&spec);
        let peak = analytic
            .iter()
            .take(n / 2)
            .map(|(re, im)| (re * re + im * im).sqrt())
            .fold(0.0f64, f64::max);
        let expect = n as f64 / std::f64::consts::PI;
        assert!((peak - expect).abs() / expect < 0.08, "{peak} vs {expect}");
    }

    #[test]
    fn roundtrip_restores_the_signal() {
        let mut a = prec();
        let order = 4;
        let spec = SignalSpec::new(SignalKind::Sin, 1.0, order, NoiseKind::None, 1e-5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut data = generate_signal(&mut a, &spec, &mut rng);
        let original: Vec<f64> = data.iter().map(|v| a.expected(&v.re)).collect();
        let table = build_phase_table(&mut a, order).unwrap();
        fft_forward(&mut a, &mut data, &table);
        fft_reverse(&mut a, &mut data, &table);
        for (k, v) in data.iter().enumerate() {
            let err = (a.expected(&v.re) - original[k]).abs();
            assert!(
                err <= a.bounding_range(&v.re),
                "sample {k}: error {err} outside range {}",
                a.bounding_range(&v.re)
            );
        }
    }

    #[test]
    fn clean_sine_spectrum_is_symmetric() {
        let mut a = prec();
        let order = 5;
        let n = 1usize << order;
        let spec = SignalSpec::new(SignalKind::Sin, 1.0, order, NoiseKind::None, 1e-4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut data = generate_signal(&mut a, &spec, &mut rng);
        let table = build_phase_table(&mut a, order).unwrap();
        fft_forward(&mut a, &mut data, &table);
        for bin in 1..n / 2 {
            let m1 = a.expected(&data[bin].re).hypot(a.expected(&data[bin].im));
            let m2 = a
                .expected(&data[n - bin].re)
                .hypot(a.expected(&data[n - bin].im));
            let tol = 3.0 * (a.bounding_range(&data[bin].re) + a.bounding_range(&data[bin].im));
            assert!((m1 - m2).abs() <= tol.max(1e-9), "bin {bin}: {m1} vs {m2}");
        }
    }

    #[test]
    fn sine_values_at_order_three() {
        let mut a = prec();
        let spec = SignalSpec::new(SignalKind::Sin, 1.0, 3, NoiseKind::None, 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data = generate_signal(&mut a, &spec, &mut rng);
        let s = 0.5f64.sqrt();
        let expect = [0.0, s, 1.0, s, 0.0, -s, -1.0, -s];
        for (k, v) in data.iter().enumerate() {
            assert!((a.expected(&v.re) - expect[k]).abs() < 2e-3);
            assert!((a.deviation(&v.re) - 1e-3).abs() / 1e-3 < 1.1);
        }
    }
}
