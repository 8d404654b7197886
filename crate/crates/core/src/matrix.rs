//! Dense square matrices and the norms used for residual reporting.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::count::{NoCount, OpCounter, Tally};
use crate::error::{Error, Result};

/// Dense square real matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// `n x n` zero matrix.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix order must be at least 1");
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Empty);
        }
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m.check_finite()?;
        Ok(m)
    }

    /// Build from row-major data of length `n * n`. Rejects NaN and infinities.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        let m = Matrix { n, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(n, data)
    }

    fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(k) => Err(Error::NonFinite {
                row: k / self.n,
                col: k % self.n,
            }),
            None => Ok(()),
        }
    }

    /// Order of the matrix.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let n = self.n;
        &mut self.data[i * n..(i + 1) * n]
    }

    /// Column `j` copied out.
    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    /// Mutable views of two distinct rows.
    pub fn rows_mut2(&mut self, a: usize, b: usize) -> (&mut [f64], &mut [f64]) {
        assert_ne!(a, b);
        let n = self.n;
        if a < b {
            let (lo, hi) = self.data.split_at_mut(b * n);
            (&mut lo[a * n..(a + 1) * n], &mut hi[..n])
        } else {
            let (lo, hi) = self.data.split_at_mut(a * n);
            (&mut hi[..n], &mut lo[b * n..(b + 1) * n])
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            let (ra, rb) = self.rows_mut2(a, b);
            ra.swap_with_slice(rb);
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut t = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Leading principal `k x k` submatrix.
    pub fn leading(&self, k: usize) -> Matrix {
        assert!(k >= 1 && k <= self.n);
        let mut s = Matrix::zeros(k);
        for i in 0..k {
            s.row_mut(i).copy_from_slice(&self.row(i)[..k]);
        }
        s
    }

    /// Copy the strict lower triangle onto the strict upper triangle.
    pub fn mirror_lower(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in 0..i {
                self.data[j * n + i] = self.data[i * n + j];
            }
        }
    }

    /// Largest absolute row sum (infinity norm).
    pub fn max_row_sum(&self) -> f64 {
        self.data
            .chunks(self.n)
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        same_order(self, other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Matrix { n: self.n, data })
    }

    pub fn is_symmetric(&self, check: SymmetryCheck) -> bool {
        check.first_violation(self).is_none()
    }

    /// Pivot tolerance shared by every elimination kernel:
    /// `1e-12 * (1 + max row magnitude)`.
    pub fn pivot_tolerance(&self) -> f64 {
        PIVOT_RTOL * (1.0 + self.max_row_sum())
    }
}

pub(crate) const PIVOT_RTOL: f64 = 1e-12;

/// Dot product with four independent partial sums.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `y += alpha * x`, returning the updated `y . z`.
#[inline]
pub(crate) fn axpy_dot(alpha: f64, x: &[f64], y: &mut [f64], z: &[f64]) -> f64 {
    debug_assert!(x.len() == y.len() && y.len() == z.len());
    let mut acc = [0.0f64; 4];
    let cy = y.chunks_exact_mut(4);
    let cx = x.chunks_exact(4);
    let cz = z.chunks_exact(4);
    let k = cy.len() * 4;
    for ((yc, xc), zc) in cy.zip(cx).zip(cz) {
        for t in 0..4 {
            yc[t] += alpha * xc[t];
            acc[t] += yc[t] * zc[t];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for j in k..y.len() {
        y[j] += alpha * x[j];
        s += y[j] * z[j];
    }
    s
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.n, self.n)?;
        for r in self.data.chunks(self.n) {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

fn same_order(a: &Matrix, b: &Matrix) -> Result<()> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    Ok(())
}

/// Symmetry test `|a_ij - a_ji| <= tolerance * max(1, |a_ij|)`.
///
/// The default tolerance is 0, i.e. exact symmetry.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymmetryCheck {
    pub tolerance: f64,
}

impl SymmetryCheck {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn with_tolerance(tolerance: f64) -> Self {
        assert!(tolerance >= 0.0, "symmetry tolerance must be nonnegative");
        SymmetryCheck { tolerance }
    }

    /// First `(i, j)` with `i > j` that fails the test.
    pub fn first_violation(&self, m: &Matrix) -> Option<(usize, usize)> {
        let n = m.n();
        for i in 0..n {
            for j in 0..i {
                let (x, y) = (m[(i, j)], m[(j, i)]);
                if (x - y).abs() > self.tolerance * x.abs().max(1.0) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn ensure(&self, m: &Matrix) -> Result<()> {
        match self.first_violation(m) {
            Some((row, col)) => Err(Error::NotSymmetric { row, col }),
            None => Ok(()),
        }
    }
}

/// Plain matrix product.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    matmul_with(a, b, &mut NoCount)
}

/// Matrix product that records its `n^3` multiplications.
pub fn matmul_counted(a: &Matrix, b: &Matrix, counter: &mut OpCounter) -> Result<Matrix> {
    matmul_with(a, b, counter)
}

fn matmul_with<T: Tally>(a: &Matrix, b: &Matrix, tally: &mut T) -> Result<Matrix> {
    same_order(a, b)?;
    let n = a.n;
    let mut c = Matrix::zeros(n);
    // i-k-j order keeps both inner accesses contiguous.
    for i in 0..n {
        let ci = &mut c.data[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a.data[i * n + k];
            let bk = &b.data[k * n..(k + 1) * n];
            for (cij, bkj) in ci.iter_mut().zip(bk) {
                *cij += aik * bkj;
            }
            tally.muldiv(n);
        }
    }
    Ok(c)
}

pub fn frobenius_norm(m: &Matrix) -> f64 {
    m.data.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `||A X - I||_F`.
pub fn residual_frobenius(a: &Matrix, x: &Matrix) -> Result<f64> {
    let mut p = matmul(a, x)?;
    for i in 0..p.n {
        p[(i, i)] -= 1.0;
    }
    Ok(frobenius_norm(&p))
}

/// Spectral-norm estimate together with the Frobenius norm, which bounds it
/// from above.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norm2Estimate {
    pub spectral: f64,
    pub frobenius: f64,
}

pub const DEFAULT_POWER_ITERS: usize = 200;
const POWER_RTOL: f64 = 1e-12;

/// Power iteration on `MᵀM` for the largest singular value of `m`.
///
/// The returned estimate is `||M x||` for a unit vector `x`, so it never
/// exceeds the true spectral norm.
pub fn norm2_estimate(m: &Matrix, iters: usize) -> Norm2Estimate {
    let frobenius = frobenius_norm(m);
    if frobenius == 0.0 {
        return Norm2Estimate {
            spectral: 0.0,
            frobenius,
        };
    }
    let n = m.n;
    // Fixed, non-symmetric start vector: unlikely to be orthogonal to the
    // dominant singular vector.
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
        .collect();
    normalize(&mut x);
    let mut sigma = 0.0;
    let mut y = vec![0.0; n];
    for _ in 0..iters.max(1) {
        mat_vec(m, &x, &mut y);
        let next = norm(&y);
        if next == 0.0 {
            break;
        }
        // x <- Mᵀ y / ||Mᵀ y||
        let mut z = vec![0.0; n];
        for (i, yi) in y.iter().enumerate() {
            for (zj, mij) in z.iter_mut().zip(m.row(i)) {
                *zj += mij * yi;
            }
        }
        let converged = (next - sigma).abs() <= POWER_RTOL * next;
        sigma = next;
        if norm(&z) == 0.0 {
            break;
        }
        normalize(&mut z);
        x = z;
        if converged {
            break;
        }
    }
    mat_vec(m, &x, &mut y);
    let spectral = norm(&y).max(sigma).min(frobenius);
    Norm2Estimate {
        spectral,
        frobenius,
    }
}

fn mat_vec(m: &Matrix, x: &[f64], y: &mut [f64]) {
    for (i, yi) in y.iter_mut().enumerate() {
        *yi = m.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) {
    let s = norm(v);
    v.iter_mut().for_each(|x| *x /= s);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(Matrix::from_vec(0, vec![]), Err(Error::Empty)));
        assert!(matches!(
            Matrix::from_vec(2, vec![1.0; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            Matrix::from_rows(&[[1.0, f64::NAN], [0.0, 1.0]]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn identity_products() {
        let i2 = Matrix::identity(2);
        assert_eq!(matmul(&i2, &i2).unwrap(), i2);
        let p = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(matmul(&p, &p).unwrap(), i2);
        assert!(matmul(&i2, &Matrix::identity(3)).is_err());
    }

    #[test]
    fn counted_matmul_is_n_cubed() {
        let a = Matrix::identity(7);
        let mut c = OpCounter::new();
        matmul_counted(&a, &a, &mut c).unwrap();
        assert_eq!(c, OpCounter { muldiv: 343, sqrt: 0 });
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(frobenius_norm(&Matrix::zeros(3)), 0.0);
        assert_eq!(frobenius_norm(&Matrix::identity(3)), 3f64.sqrt());
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert_eq!(frobenius_norm(&a), 10f64.sqrt());
    }

    #[test]
    fn norm2_examples() {
        assert_eq!(norm2_estimate(&Matrix::zeros(4), 50).spectral, 0.0);
        let d = Matrix::from_diag(&[3.0, 1.0]).unwrap();
        let est = norm2_estimate(&d, DEFAULT_POWER_ITERS);
        assert!((est.spectral - 3.0).abs() < 1e-12, "{est:?}");
        assert_eq!(est.frobenius, 10f64.sqrt());
    }

    #[test]
    fn symmetry_check_tolerance() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0 + 1e-9, 1.0]]).unwrap();
        assert!(!a.is_symmetric(SymmetryCheck::exact()));
        assert!(a.is_symmetric(SymmetryCheck::with_tolerance(1e-8)));
        assert!(matches!(
            SymmetryCheck::exact().ensure(&a),
            Err(Error::NotSymmetric { row: 1, col: 0 })
        ));
    }

    #[test]
    fn mirror_and_leading() {
        let mut a = Matrix::from_rows(&[[1.0, 0.0, 0.0], [2.0, 3.0, 0.0], [4.0, 5.0, 6.0]]).unwrap();
        a.mirror_lower();
        assert_eq!(a, a.transpose());
        assert_eq!(
            a.leading(2),
            Matrix::from_rows(&[[1.0, 2.0], [2.0, 3.0]]).unwrap()
        );
    }

    #[test]
    fn swap_rows_both_orders() {
        let mut a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        a.swap_rows(1, 0);
        assert_eq!(a.row(0), &[3.0, 4.0]);
        a.swap_rows(0, 1);
        assert_eq!(a.row(0), &[1.0, 2.0]);
    }
}
