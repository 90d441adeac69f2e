//! Determinant, adjugate and inverse by direct Laplace expansion, generic
//! over the arithmetic, plus the analytic determinant-uncertainty formula
//! and the matrix validation experiments.
//!
//! No pivoting: with uncertainty-bearing values the expansion order does
//! not matter, which the tests assert rather than assume.

use rand::Rng;

use crate::arithmetic::Arithmetic;
use crate::fft::gaussian;
use crate::value::ErrorCode;

#[derive(Clone, Debug)]
pub struct SquareMatrix<V> {
    n: usize,
    data: Vec<V>,
}

impl<V: Clone> SquareMatrix<V> {
    pub fn from_rows(rows: Vec<Vec<V>>) -> Self {
        let n = rows.len();
        assert!(n >= 1 && rows.iter().all(|r| r.len() == n));
        Self {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> &V {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: V) {
        self.data[i * self.n + j] = v;
    }

    pub fn map<W: Clone>(&self, mut f: impl FnMut(&V) -> W) -> SquareMatrix<W> {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(|v| f(v)).collect(),
        }
    }

    fn map_arith<A: Arithmetic<Value = V>>(
        &self,
        arith: &mut A,
        mut f: impl FnMut(&mut A, &V) -> V,
    ) -> SquareMatrix<V> {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(|v| f(arith, v)).collect(),
        }
    }
}

const MAX_EXPANSION_SIZE: usize = 8;

/// Determinant by cofactor expansion along the first remaining row.
pub fn determinant<A: Arithmetic>(arith: &mut A, m: &SquareMatrix<A::Value>) -> A::Value {
    assert!(
        m.n <= MAX_EXPANSION_SIZE,
        "factorial cost beyond {MAX_EXPANSION_SIZE}"
    );
    let cols: u32 = (1 << m.n) - 1;
    det_rec(arith, m, 0, usize::MAX, cols)
}

/// Expansion that optionally skips one row, which yields the minors needed
/// for the adjugate without materializing submatrices.
fn det_rec<A: Arithmetic>(
    arith: &mut A,
    m: &SquareMatrix<A::Value>,
    row: usize,
    skip_row: usize,
    cols: u32,
) -> A::Value {
    let row = if row == skip_row { row + 1 } else { row };
    if cols == 0 {
        return arith.from_exact(1.0);
    }
    let mut acc: Option<A::Value> = None;
    let mut sign_flip = false;
    let mut rest = cols;
    while rest != 0 {
        let j = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let minor = det_rec(arith, m, row + 1, skip_row, cols & !(1 << j));
        let term = arith.mul(m.at(row, j), &minor);
        let term = if sign_flip { arith.neg(&term) } else { term };
        acc = Some(match acc {
            None => term,
            Some(prev) => arith.add(&prev, &term),
        });
        sign_flip = !sign_flip;
    }
    acc.expect("nonempty column set")
}

/// Adjugate matrix: entry `(i, j)` is the cofactor at `(j, i)`.
pub fn adjugate<A: Arithmetic>(
    arith: &mut A,
    m: &SquareMatrix<A::Value>,
) -> SquareMatrix<A::Value> {
    let n = m.n;
    if n == 1 {
        let one = arith.from_exact(1.0);
        return SquareMatrix::from_rows(vec![vec![one]]);
    }
    let all_cols: u32 = (1 << n) - 1;
    let mut out = m.clone();
    for i in 0..n {
        for j in 0..n {
            // Cofactor of (j, i): delete row j and column i.
            let minor = det_rec(arith, m, 0, j, all_cols & !(1 << i));
            let value = if (i + j) % 2 == 1 {
                arith.neg(&minor)
            } else {
                minor
            };
            out.set(i, j, value);
        }
    }
    out
}

/// Inverse as adjugate over determinant; the determinant must be
/// significant.
pub fn inverse<A: Arithmetic>(
    arith: &mut A,
    m: &SquareMatrix<A::Value>,
) -> Result<SquareMatrix<A::Value>, ErrorCode> {
    let det = determinant(arith, m);
    if let Some(code) = arith.error_of(&det) {
        return Err(code);
    }
    if !arith.is_significant(&det) {
        return Err(ErrorCode::DivByInsignificant);
    }
    let adj = adjugate(arith, m);
    Ok(adj.map_arith(arith, |a, v| a.div(v, &det)))
}

pub fn mat_mul<A: Arithmetic>(
    arith: &mut A,
    a: &SquareMatrix<A::Value>,
    b: &SquareMatrix<A::Value>,
) -> SquareMatrix<A::Value> {
    let n = a.n;
    assert_eq!(n, b.n);
    let mut out = a.clone();
    for i in 0..n {
        for j in 0..n {
            let mut acc: Option<A::Value> = None;
            for k in 0..n {
                let term = arith.mul(a.at(i, k), b.at(k, j));
                acc = Some(match acc {
                    None => term,
                    Some(prev) => arith.add(&prev, &term),
                });
            }
            out.set(i, j, acc.unwrap());
        }
    }
    out
}

/// Analytic determinant deviation for independently distributed element
/// uncertainties: the square root of `perm(x^2 + dx^2) - perm(x^2)`,
/// where `perm` is the sign-free permutation sum.
pub fn determinant_deviation(means: &SquareMatrix<f64>, devs: &SquareMatrix<f64>) -> f64 {
    let n = means.n;
    assert_eq!(n, devs.n);
    let with = |i: usize, j: usize| {
        let x = means.at(i, j);
        let d = devs.at(i, j);
        x * x + d * d
    };
    let without = |i: usize, j: usize| {
        let x = means.at(i, j);
        x * x
    };
    let all: u32 = (1 << n) - 1;
    let var = permanent_rec(&with, 0, all) - permanent_rec(&without, 0, all);
    var.max(0.0).sqrt()
}

fn permanent_rec(entry: &impl Fn(usize, usize) -> f64, row: usize, cols: u32) -> f64 {
    if cols == 0 {
        return 1.0;
    }
    let mut acc = 0.0;
    let mut rest = cols;
    while rest != 0 {
        let j = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        acc += entry(row, j) * permanent_rec(entry, row + 1, cols & !(1 << j));
    }
    acc
}

/// Double-precision determinant of a mean matrix, used as the expected
/// value when measuring residuals.
pub fn determinant_f64(m: &SquareMatrix<f64>) -> f64 {
    let all: u32 = (1 << m.n) - 1;
    det_f64_rec(m, 0, all)
}

fn det_f64_rec(m: &SquareMatrix<f64>, row: usize, cols: u32) -> f64 {
    if cols == 0 {
        return 1.0;
    }
    let mut acc = 0.0;
    let mut sign = 1.0;
    let mut rest = cols;
    while rest != 0 {
        let j = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        acc += sign * m.at(row, j) * det_f64_rec(m, row + 1, cols & !(1 << j));
        sign = -sign;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixAlgorithm {
    /// Double inversion back to the original matrix.
    RoundTrip,
    /// Inverse times the matrix against the identity.
    Inverse,
    /// Adjugate times the matrix against determinant times identity.
    Adjugate,
}

impl MatrixAlgorithm {
    pub fn label(&self) -> &'static str {
        match self {
            MatrixAlgorithm::RoundTrip => "Round-trip",
            MatrixAlgorithm::Inverse => "Inverse",
            MatrixAlgorithm::Adjugate => "Adjugate",
        }
    }
}

/// Per-matrix outcome of one experiment configuration.
#[derive(Clone, Debug)]
pub struct MatrixExperimentRow {
    pub size: usize,
    pub seed: u64,
    pub input_deviation: f64,
    /// `|det| / deviation(det)` measured in the arithmetic under test.
    pub det_significance: f64,
    pub avg_error: f64,
    pub max_error: f64,
    pub avg_deviation: f64,
    pub max_deviation: f64,
    pub avg_significand: f64,
    pub max_bounding_ratio: f64,
    pub skipped: bool,
}

/// Runs one matrix through the selected algorithm. Elements are uniform
/// in `[-2, 2]` with Gaussian noise at the input deviation added before
/// casting. Matrices whose determinant is insignificant are skipped for
/// the inversion algorithms.
pub fn run_matrix_case<A: Arithmetic, R: Rng + ?Sized>(
    arith: &mut A,
    algorithm: MatrixAlgorithm,
    n: usize,
    input_deviation: f64,
    seed: u64,
    rng: &mut R,
) -> MatrixExperimentRow {
    let clean: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let noisy: Vec<Vec<f64>> = clean
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| x + input_deviation * gaussian(rng))
                .collect()
        })
        .collect();
    let mean_matrix = SquareMatrix::from_rows(noisy.clone());
    let cast = SquareMatrix::from_rows(
        noisy
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| arith.from_mean_deviation(x, input_deviation))
                    .collect()
            })
            .collect(),
    );

    let det = determinant(arith, &cast);
    let det_significance = if arith.deviation(&det) > 0.0 {
        arith.expected(&det).abs() / arith.deviation(&det)
    } else {
        f64::INFINITY
    };

    let mut row = MatrixExperimentRow {
        size: n,
        seed,
        input_deviation,
        det_significance,
        avg_error: 0.0,
        max_error: 0.0,
        avg_deviation: 0.0,
        max_deviation: 0.0,
        avg_significand: 0.0,
        max_bounding_ratio: 0.0,
        skipped: false,
    };

    // Residual values and their expected targets, per algorithm identity.
    let mut outputs: Vec<(A::Value, f64)> = Vec::new();
    match algorithm {
        MatrixAlgorithm::Adjugate => {
            let adj = adjugate(arith, &cast);
            let prod = mat_mul(arith, &adj, &cast);
            let det_expected = determinant_f64(&mean_matrix);
            for i in 0..n {
                for j in 0..n {
                    let target = if i == j { det_expected } else { 0.0 };
                    outputs.push((prod.at(i, j).clone(), target));
                }
            }
        }
        MatrixAlgorithm::Inverse => match inverse(arith, &cast) {
            Err(_) => row.skipped = true,
            Ok(inv) => {
                let prod = mat_mul(arith, &inv, &cast);
                for i in 0..n {
                    for j in 0..n {
                        let target = if i == j { 1.0 } else { 0.0 };
                        outputs.push((prod.at(i, j).clone(), target));
                    }
                }
            }
        },
        MatrixAlgorithm::RoundTrip => {
            let back = inverse(arith, &cast).and_then(|inv| inverse(arith, &inv));
            match back {
                Err(_) => row.skipped = true,
                Ok(twice) => {
                    for i in 0..n {
                        for j in 0..n {
                            outputs.push((twice.at(i, j).clone(), *mean_matrix.at(i, j)));
                        }
                    }
                }
            }
        }
    }
    if row.skipped {
        return row;
    }

    let mut count = 0usize;
    for (value, target) in &outputs {
        if arith.error_of(value).is_some() {
            continue;
        }
        let err = (arith.expected(value) - target).abs();
        let dev = arith.deviation(value);
        let range = arith.bounding_range(value);
        row.avg_error += err;
        row.max_error = row.max_error.max(err);
        row.avg_deviation += dev;
        row.max_deviation = row.max_deviation.max(dev);
        if dev > 0.0 {
            row.avg_significand += err / dev;
        }
        if range > 0.0 {
            row.max_bounding_ratio = row.max_bounding_ratio.max(err / range);
        }
        count += 1;
    }
    if count > 0 {
        row.avg_error /= count as f64;
        row.avg_deviation /= count as f64;
        row.avg_significand /= count as f64;
    }
    row
}
