//! Small dense complex-matrix kernels.
//!
//! Matrices are stored row-major. Norms reported anywhere in the crate are
//! max-absolute-entry norms; relation residuals use [`scaled_residual`],
//! which divides each entry difference by `max(1, |lhs|, |rhs|)`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl TryFrom<RawMatrix> for ComplexMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        ComplexMatrix::new(raw.rows, raw.cols, raw.data)
    }
}

impl From<ComplexMatrix> for RawMatrix {
    fn from(m: ComplexMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

/// Eigen-decomposition of a hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if rows * cols != data.len() {
            return Err(Error::invalid(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "matrix entries".into(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from a row-major closure.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(self.mismatch(other));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn try_add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &ComplexMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(self.mismatch(other));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    fn mismatch(&self, other: &ComplexMatrix) -> Error {
        Error::DimensionMismatch {
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: other.rows,
            right_cols: other.cols,
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: v.len(),
                right_cols: 1,
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn pow(&self, k: u32) -> Result<ComplexMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut out = ComplexMatrix::identity(self.rows);
        for _ in 0..k {
            out = out.matmul(self)?;
        }
        Ok(out)
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.matmul(other)?.try_sub(&other.matmul(self)?)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs())
    }

    /// Truncated exponential series `Σ_{k=0}^{terms} aᵏ/k!`.
    ///
    /// For a strictly triangular `a` of dimension `d` the series terminates,
    /// so `terms >= d - 1` gives the exact exponential.
    pub fn matexp_truncated(&self, terms: usize) -> Result<ComplexMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if terms == 0 {
            return Err(Error::invalid("matexp_truncated needs terms >= 1"));
        }
        let mut sum = ComplexMatrix::identity(self.rows);
        let mut term = ComplexMatrix::identity(self.rows);
        for k in 1..=terms {
            term = term.matmul(self)?.scale(Complex64::new(1.0 / k as f64, 0.0));
            if !term.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("matexp term {k}"),
                });
            }
            if term.max_abs() == 0.0 {
                break;
            }
            sum = sum.try_add(&term)?;
        }
        Ok(sum)
    }

    /// Cyclic Jacobi eigensolver for hermitian matrices.
    pub fn hermitian_eigen(&self) -> Result<HermitianEigen> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let deviation = self.max_abs_diff(&self.adjoint())?;
        if deviation >= 1e-10 {
            return Err(Error::NotHermitian { deviation });
        }
        let n = self.rows;
        // symmetrize so rounding asymmetry does not leak into the rotations
        let mut h = ComplexMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(self[(r, r)].re, 0.0)
            } else {
                0.5 * (self[(r, c)] + self[(c, r)].conj())
            }
        });
        let mut v = ComplexMatrix::identity(n);
        let frob = h.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let threshold = f64::EPSILON * frob.max(f64::MIN_POSITIVE);

        let mut converged = n == 1;
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off = off_diagonal_norm(&h);
            if off <= threshold {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let hpq = h[(p, q)];
                    let mag = hpq.norm();
                    if mag <= threshold / n as f64 {
                        continue;
                    }
                    let phase = hpq / mag;
                    let a = h[(p, p)].re;
                    let b = h[(q, q)].re;
                    let theta = 0.5 * (2.0 * mag).atan2(b - a);
                    let (s, c) = theta.sin_cos();
                    // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]] acting on (p, q)
                    let g = [
                        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
                        [-s * phase.conj(), c * phase.conj()],
                    ];
                    rotate_columns(&mut h, p, q, &g);
                    rotate_rows(&mut h, p, q, &g);
                    rotate_columns(&mut v, p, q, &g);
                    h[(p, q)] = ZERO;
                    h[(q, p)] = ZERO;
                    h[(p, p)] = Complex64::new(h[(p, p)].re, 0.0);
                    h[(q, q)] = Complex64::new(h[(q, q)].re, 0.0);
                }
            }
        }
        if !converged && off_diagonal_norm(&h) > threshold {
            return Err(Error::NoConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
            });
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| h[(i, i)].re.total_cmp(&h[(j, j)].re));
        let values = order.iter().map(|&k| h[(k, k)].re).collect();
        let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
        Ok(HermitianEigen { values, vectors })
    }
}

fn off_diagonal_norm(h: &ComplexMatrix) -> f64 {
    let mut acc = 0.0;
    for r in 0..h.rows {
        for c in 0..h.cols {
            if r != c {
                acc += h[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

// m ← m·G on columns (p, q)
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, g: &[[Complex64; 2]; 2]) {
    for k in 0..m.rows {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * g[0][0] + mq * g[1][0];
        m[(k, q)] = mp * g[0][1] + mq * g[1][1];
    }
}

// m ← G†·m on rows (p, q)
fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, g: &[[Complex64; 2]; 2]) {
    for k in 0..m.cols {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = g[0][0].conj() * mp + g[1][0].conj() * mq;
        m[(q, k)] = g[0][1].conj() * mp + g[1][1].conj() * mq;
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

/// Entrywise residual `max |l − r| / max(1, |l|, |r|)` over the rows accepted
/// by `keep_row`. Below unit magnitude this is the plain max-abs difference;
/// above it, a relative one.
pub fn scaled_residual(
    lhs: &ComplexMatrix,
    rhs: &ComplexMatrix,
    keep_row: impl Fn(usize) -> bool,
) -> Result<f64> {
    if lhs.rows != rhs.rows || lhs.cols != rhs.cols {
        return Err(lhs.mismatch(rhs));
    }
    let mut worst: f64 = 0.0;
    for r in (0..lhs.rows).filter(|&r| keep_row(r)) {
        for c in 0..lhs.cols {
            let l = lhs[(r, c)];
            let rr = rhs[(r, c)];
            let scale = 1f64.max(l.norm()).max(rr.norm());
            worst = worst.max((l - rr).norm() / scale);
        }
    }
    Ok(worst)
}

/// Same as [`scaled_residual`] for vectors.
pub fn scaled_vector_residual(
    lhs: &[Complex64],
    rhs: &[Complex64],
    keep_row: impl Fn(usize) -> bool,
) -> f64 {
    lhs.iter()
        .zip(rhs)
        .enumerate()
        .filter(|(r, _)| keep_row(*r))
        .map(|(_, (l, r))| (l - r).norm() / 1f64.max(l.norm()).max(r.norm()))
        .fold(0.0, f64::max)
}

pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &[Complex64]) -> Vec<Complex64> {
    let n = vector_norm(v);
    v.iter().map(|z| z / n).collect()
}

pub fn max_abs_vec(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let m = random(rng, n, n);
        (&m + &m.adjoint()).scale(c(0.5, 0.0))
    }

    #[test]
    fn identity_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random(&mut rng, 3, 3);
        assert_eq!(ComplexMatrix::identity(3).matmul(&x).unwrap(), x);
    }

    #[test]
    fn shift_up_times_shift_down() {
        let up = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let down = up.adjoint();
        let p = up.matmul(&down).unwrap();
        assert_eq!(p, ComplexMatrix::from_real_diag(&[1.0, 0.0]));
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random(&mut rng, 8, 8);
        let b = random(&mut rng, 8, 8);
        let fast = a.matmul(&b).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let mut acc = c(0.0, 0.0);
                for k in 0..8 {
                    acc += a[(i, k)] * b[(k, j)];
                }
                assert!((acc - fast[(i, j)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn matmul_shape_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn adjoint_examples() {
        let sym = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(sym.adjoint(), sym);
        let m = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let expected =
            ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(m.adjoint(), expected);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random(&mut rng, 6, 6);
        assert_eq!(x.adjoint().adjoint(), x);
    }

    #[test]
    fn rejects_inconsistent_shape_and_nan() {
        assert!(ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn matexp_examples() {
        let z = ComplexMatrix::zeros(3, 3).matexp_truncated(5).unwrap();
        assert_eq!(z, ComplexMatrix::identity(3));

        let alpha = c(0.3, -0.7);
        let mut nil = ComplexMatrix::zeros(2, 2);
        nil[(1, 0)] = alpha;
        let e = nil.matexp_truncated(2).unwrap();
        let expected = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), alpha, c(1.0, 0.0)]).unwrap();
        assert_eq!(e, expected);

        let d = ComplexMatrix::from_real_diag(&[1.0, 2.0]).matexp_truncated(30).unwrap();
        assert!((d[(0, 0)].re - 1f64.exp()).abs() < 1e-12);
        assert!((d[(1, 1)].re - 2f64.exp()).abs() < 1e-12);
        assert!(d[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn matexp_rejects_non_square() {
        assert!(matches!(
            ComplexMatrix::zeros(2, 3).matexp_truncated(3),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn eigen_diagonal_and_pauli() {
        let d = ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0]).hermitian_eigen().unwrap();
        assert_eq!(d.values, vec![1.0, 2.0, 3.0]);
        let x = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let e = x.hermitian_eigen().unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let h = random_hermitian(&mut rng, 10);
            let e = h.hermitian_eigen().unwrap();
            let lam = ComplexMatrix::from_real_diag(&e.values);
            let rebuilt = &(&e.vectors * &lam) * &e.vectors.adjoint();
            assert!(rebuilt.max_abs_diff(&h).unwrap() < 1e-9);
            let gram = &e.vectors.adjoint() * &e.vectors;
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(10)).unwrap() < 1e-10);
            for k in 0..10 {
                let v = e.vectors.column(k);
                let hv = h.apply(&v).unwrap();
                for (a, b) in hv.iter().zip(&v) {
                    assert!((a - b * e.values[k]).norm() < 1e-9 * h.max_abs().max(1.0));
                }
            }
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(m.hermitian_eigen(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn scaled_residual_is_relative_above_one() {
        let a = ComplexMatrix::from_real_diag(&[1e6, 0.5]);
        let b = ComplexMatrix::from_real_diag(&[1e6 + 1.0, 0.5]);
        let r = scaled_residual(&a, &b, |_| true).unwrap();
        assert!((r - 1.0 / (1e6 + 1.0)).abs() < 1e-18);
        assert_eq!(scaled_residual(&a, &b, |r| r == 1).unwrap(), 0.0);
    }

    #[test]
    fn json_form() {
        let m = ComplexMatrix::new(1, 2, vec![c(1.0, -2.0), c(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"data":[[1.0,-2.0],[0.5,0.0]]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"data":[[1.0,0.0]]}"#).is_err());
    }
}
