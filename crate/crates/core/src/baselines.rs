//! Comparison methods: Cholesky-based inversion, LDLᵀ-based inversion and the
//! Krishnamoorthy–Menon in-place Cholesky inversion.
//!
//! Each kernel is written at the granularity its published operation count
//! implies: the triangular solves skip the known zeros of the identity
//! right-hand side and, where the result is symmetric, compute only its lower
//! triangle.

use crate::count::{NoCount, OpCounter, Tally};
use crate::error::{Error, Result};
use crate::matrix::{axpy, dot, Matrix, SymmetryCheck};

/// `A = L Lᵀ` with `L` lower triangular, positive diagonal.
#[derive(Clone, Debug)]
pub struct CholFactor {
    pub l: Matrix,
}

/// `A = L D Lᵀ` with `L` unit lower triangular.
#[derive(Clone, Debug)]
pub struct LdlFactor {
    pub l: Matrix,
    pub d: Vec<f64>,
}

/// Krishnamoorthy–Menon factor in compact form: the strict lower triangle
/// holds the unit-lower multipliers `L̃`, the diagonal holds `√pᵢ`, so the
/// Cholesky factor is `L̃ · diag(√p)`.
#[derive(Clone, Debug)]
pub struct KmFactor {
    pub packed: Matrix,
    /// `1 / pᵢ`, reused by the later phases.
    pub inv_pivots: Vec<f64>,
}

impl KmFactor {
    pub fn cholesky(&self) -> CholFactor {
        let n = self.packed.n();
        let mut l = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = self.packed[(i, j)] * self.packed[(j, j)];
            }
            l[(i, i)] = self.packed[(i, i)];
        }
        CholFactor { l }
    }
}

fn sqrt_floor(a: &Matrix) -> f64 {
    let t = a.pivot_tolerance();
    t * t
}

fn cholesky_kernel<T: Tally>(a: &Matrix, tally: &mut T) -> Result<CholFactor> {
    SymmetryCheck::exact().ensure(a)?;
    let n = a.n();
    let floor = sqrt_floor(a);
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let lj = l.row(j)[..j].to_vec();
        let s = a[(j, j)] - dot(&lj, &lj);
        tally.muldiv(j);
        if s <= floor {
            return Err(Error::NotPositiveDefinite { step: j });
        }
        let ljj = s.sqrt();
        tally.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let row = l.row_mut(i);
            row[j] = (a[(i, j)] - dot(&row[..j], &lj)) / ljj;
            tally.muldiv(j + 1);
        }
    }
    Ok(CholFactor { l })
}

/// Cholesky factorization `A = L Lᵀ`.
pub fn cholesky_factor(a: &Matrix, counter: Option<&mut OpCounter>) -> Result<CholFactor> {
    match counter {
        Some(c) => cholesky_kernel(a, c),
        None => cholesky_kernel(a, &mut NoCount),
    }
}

fn invert_cholesky_kernel<T: Tally>(a: &Matrix, tally: &mut T) -> Result<Matrix> {
    let CholFactor { l } = cholesky_kernel(a, tally)?;
    let n = a.n();

    // L B = I, row by row; B is lower triangular.
    let mut b = Matrix::zeros(n);
    let mut acc = vec![0.0; n];
    for i in 0..n {
        acc[..i].fill(0.0);
        for k in 0..i {
            let lik = l[(i, k)];
            axpy(-lik, &b.row(k)[..=k], &mut acc[..=k]);
            tally.muldiv(k + 1);
        }
        let lii = l[(i, i)];
        let bi = b.row_mut(i);
        for (dst, v) in bi[..i].iter_mut().zip(&acc[..i]) {
            *dst = v / lii;
        }
        bi[i] = 1.0 / lii;
        tally.muldiv(i + 1);
    }

    // Lᵀ X = B, lower triangle of X only, bottom row first.
    let mut x = Matrix::zeros(n);
    for i in (0..n).rev() {
        acc[..=i].copy_from_slice(&b.row(i)[..=i]);
        for k in (i + 1)..n {
            let lki = l[(k, i)];
            axpy(-lki, &x.row(k)[..=i], &mut acc[..=i]);
            tally.muldiv(i + 1);
        }
        let lii = l[(i, i)];
        for (dst, v) in x.row_mut(i)[..=i].iter_mut().zip(&acc[..=i]) {
            *dst = v / lii;
        }
        tally.muldiv(i + 1);
    }
    x.mirror_lower();
    Ok(x)
}

/// Inverse via `A = L Lᵀ`, `L B = I`, `Lᵀ A⁻¹ = B`.
///
/// Costs `n³/2 + 3n²/2` multiplications and divisions and `n` square roots.
pub fn invert_cholesky(a: &Matrix, counter: Option<&mut OpCounter>) -> Result<Matrix> {
    match counter {
        Some(c) => invert_cholesky_kernel(a, c),
        None => invert_cholesky_kernel(a, &mut NoCount),
    }
}

fn ldl_kernel<T: Tally>(a: &Matrix, tally: &mut T) -> Result<LdlFactor> {
    SymmetryCheck::exact().ensure(a)?;
    let n = a.n();
    let tol = a.pivot_tolerance();
    let mut l = Matrix::identity(n);
    let mut d = vec![0.0; n];
    for j in 0..n {
        let lj = l.row(j)[..j].to_vec();
        let mut s = a[(j, j)];
        for k in 0..j {
            s -= lj[k] * lj[k] * d[k];
        }
        tally.muldiv(2 * j);
        if s.abs() <= tol {
            return Err(Error::ZeroPivot { step: j });
        }
        d[j] = s;
        for i in (j + 1)..n {
            let row = l.row_mut(i);
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= row[k] * lj[k] * d[k];
            }
            row[j] = s / d[j];
            tally.muldiv(2 * j + 1);
        }
    }
    Ok(LdlFactor { l, d })
}

/// `A = L D Lᵀ` without pivoting.
pub fn ldl_factor(a: &Matrix, counter: Option<&mut OpCounter>) -> Result<LdlFactor> {
    match counter {
        Some(c) => ldl_kernel(a, c),
        None => ldl_kernel(a, &mut NoCount),
    }
}

fn invert_ldl_kernel<T: Tally>(a: &Matrix, tally: &mut T) -> Result<Matrix> {
    let LdlFactor { l, d } = ldl_kernel(a, tally)?;
    let n = a.n();

    // L X = I; X is unit lower triangular.
    let mut x = Matrix::identity(n);
    let mut acc = vec![0.0; n];
    for i in 1..n {
        acc[..i].fill(0.0);
        for k in 0..i {
            let lik = l[(i, k)];
            // x_kk = 1
            acc[k] -= lik;
            axpy(-lik, &x.row(k)[..k], &mut acc[..k]);
            tally.muldiv(k);
        }
        x.row_mut(i)[..i].copy_from_slice(&acc[..i]);
    }

    // D B = X, lower triangle.
    for (i, &di) in d.iter().enumerate() {
        x.row_mut(i)[..=i].iter_mut().for_each(|v| *v /= di);
        tally.muldiv(i + 1);
    }

    // Lᵀ A⁻¹ = B, lower triangle only, bottom row first.
    let mut y = Matrix::zeros(n);
    for i in (0..n).rev() {
        acc[..=i].copy_from_slice(&x.row(i)[..=i]);
        for k in (i + 1)..n {
            let lki = l[(k, i)];
            axpy(-lki, &y.row(k)[..=i], &mut acc[..=i]);
            tally.muldiv(i + 1);
        }
        y.row_mut(i)[..=i].copy_from_slice(&acc[..=i]);
    }
    y.mirror_lower();
    Ok(y)
}

/// Inverse via `A = L D Lᵀ`, `L X = I`, `D B = X`, `Lᵀ A⁻¹ = B`.
///
/// Costs `2n³/3 + n²/2 − n/6` multiplications and divisions, no square
/// roots. Works for indefinite matrices with nonzero leading minors.
pub fn invert_ldl(a: &Matrix, counter: Option<&mut OpCounter>) -> Result<Matrix> {
    match counter {
        Some(c) => invert_ldl_kernel(a, c),
        None => invert_ldl_kernel(a, &mut NoCount),
    }
}

fn km_factor_kernel<T: Tally>(a: &Matrix, tally: &mut T) -> Result<KmFactor> {
    SymmetryCheck::exact().ensure(a)?;
    let n = a.n();
    let floor = sqrt_floor(a);
    let mut w = a.clone();
    let mut inv_pivots = vec![0.0; n];
    let mut col = vec![0.0; n];
    let mut mult = vec![0.0; n];
    for j in 0..n {
        let p = w[(j, j)];
        if p <= floor {
            return Err(Error::NotPositiveDefinite { step: j });
        }
        w[(j, j)] = p.sqrt();
        tally.sqrt();
        let q = 1.0 / p;
        tally.muldiv(1);
        inv_pivots[j] = q;
        let below = n - j - 1;
        for (t, i) in ((j + 1)..n).enumerate() {
            col[t] = w[(i, j)];
            mult[t] = col[t] * q;
        }
        tally.muldiv(below);
        // trailing lower triangle: w_ik -= (w_ij / p) w_kj
        for (t, i) in ((j + 1)..n).enumerate() {
            let row = w.row_mut(i);
            axpy(-mult[t], &col[..=t], &mut row[(j + 1)..=i]);
            tally.muldiv(t + 1);
            row[j] = mult[t];
        }
    }
    Ok(KmFactor {
        packed: w,
        inv_pivots,
    })
}

/// Phase one of [`invert_km`] on its own.
pub fn km_factor(a: &Matrix, counter: Option<&mut OpCounter>) -> Result<KmFactor> {
    match counter {
        Some(c) => km_factor_kernel(a, c),
        None => km_factor_kernel(a, &mut NoCount),
    }
}

fn invert_km_kernel<T: Tally>(a: &Matrix, tally: &mut T) -> Result<Matrix> {
    let KmFactor {
        packed: mut f,
        inv_pivots: q,
    } = km_factor_kernel(a, tally)?;
    let n = a.n();

    // Invert the unit lower triangle in place, last column first.
    let mut col = vec![0.0; n];
    for j in (0..n).rev() {
        for i in (j + 1)..n {
            col[i] = f[(i, j)];
        }
        for i in (j + 1)..n {
            let row = f.row_mut(i);
            row[j] = -col[i] - dot(&row[(j + 1)..i], &col[(j + 1)..i]);
            tally.muldiv(i - j - 1);
        }
    }

    // A⁻¹ = L⁻ᵀ L⁻¹ = Nᵀ (D⁻¹ N) with N = L̃⁻¹: scale rows of N by 1/pₖ
    // into W, then accumulate the lower triangle of Nᵀ W.
    let mut w = Matrix::zeros(n);
    for k in 0..n {
        let src = &f.row(k)[..k];
        let dst = w.row_mut(k);
        for (d, s) in dst[..k].iter_mut().zip(src) {
            *d = s * q[k];
        }
        tally.muldiv(k);
        dst[k] = q[k];
    }
    let mut x = Matrix::zeros(n);
    for i in 0..n {
        let xi = x.row_mut(i);
        xi[..=i].copy_from_slice(&w.row(i)[..=i]);
        for k in (i + 1)..n {
            axpy(f[(k, i)], &w.row(k)[..=i], &mut xi[..=i]);
            tally.muldiv(i + 1);
        }
    }
    x.mirror_lower();
    Ok(x)
}

/// Krishnamoorthy–Menon inversion: Cholesky factor in place, invert the
/// triangle in place, form `L⁻ᵀ L⁻¹` on the lower triangle and mirror.
///
/// Costs `n³/2 + n²/2` multiplications and divisions and `n` square roots.
pub fn invert_km(a: &Matrix, counter: Option<&mut OpCounter>) -> Result<Matrix> {
    match counter {
        Some(c) => invert_km_kernel(a, c),
        None => invert_km_kernel(a, &mut NoCount),
    }
}
