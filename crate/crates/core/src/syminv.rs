//! Square-root-free inversion of symmetric matrices by modified Gaussian
//! elimination.
//!
//! Two variants:
//!
//! * [`invert_v1`]: first eliminate with only the last variable required,
//!   which leaves `F` lower triangular (`F = D⁻¹L⁻¹` for `A = LDLᵀ`), then
//!   accumulate the symmetric rank-1 corrections
//!   `f_ij += f_ki f_kj / f_kk` row by row into the leading block, and finally
//!   assemble `A⁻¹ = F + (F - D)ᵀ`. Cost `n³/2 + n² - n/2`.
//! * [`invert_v2`]: a single elimination sweep with every variable required,
//!   where the processed rows never need their own dot products: by symmetry
//!   of the leading block, `f_i · a_m` for `i < m` is read off the freshly
//!   normalized pivot row. Cost `n³/2 + n²/2`.
//!
//! Neither variant pivots. A vanishing leading principal minor is reported as
//! [`Error::ZeroPivot`]; [`invert_symmetric_robust`] falls back to the
//! permuting general elimination in that case.

use crate::count::{NoCount, OpCounter, Tally};
use crate::error::{Error, Result};
use crate::matrix::{axpy, axpy_dot, dot, frobenius_norm, matmul, Matrix, SymmetryCheck};
use crate::modgauss::{self, EliminationState, Pivoting};
use crate::required::RequiredSet;

/// Every intermediate of the two-stage variant.
#[derive(Clone, Debug)]
pub struct V1Stages {
    /// `F` after the first stage; lower triangular.
    pub stage1: Matrix,
    /// `Fⁿ` after the rank-1 completion; lower triangle of `A⁻¹`.
    pub f_final: Matrix,
    /// `Fⁿ + (Fⁿ - D)ᵀ`.
    pub inverse: Matrix,
    pub stage1_ops: OpCounter,
    pub stage2_ops: OpCounter,
}

fn check_symmetric(a: &Matrix) -> Result<()> {
    SymmetryCheck::exact().ensure(a)
}

/// Stage 1: elimination with only `x_n` required. Rows freeze right after
/// their own step, so `F` stays lower triangular.
fn lower_stage<T: Tally>(a: &Matrix, tally: &mut T) -> Result<Matrix> {
    let n = a.n();
    let tol = a.pivot_tolerance();
    let mut f = Matrix::identity(n);
    let mut pivot_row = vec![0.0; n];
    for m in 0..n {
        // column m of A, read as row m
        let arow = a.row(m);
        let pivot = dot(&f.row(m)[..m], &arow[..m]) + arow[m];
        tally.muldiv(m);
        if pivot.abs() <= tol {
            return Err(Error::ZeroPivot { step: m });
        }
        let recip = 1.0 / pivot;
        tally.muldiv(1);
        {
            let row = f.row_mut(m);
            row[..m].iter_mut().for_each(|v| *v *= recip);
            tally.muldiv(m);
            row[m] = recip;
            pivot_row[..=m].copy_from_slice(&row[..=m]);
        }
        for i in (m + 1)..n {
            let row = f.row_mut(i);
            let s = dot(&row[..m], &arow[..m]) + arow[i];
            tally.muldiv(m);
            axpy(-s, &pivot_row[..=m], &mut row[..=m]);
            tally.muldiv(m + 1);
        }
    }
    Ok(f)
}

/// Stage 2: `f_ij += f_ki f_kj / f_kk` for `i < k`, `j <= i`, with row `k`
/// still as left by stage 1.
fn completion_stage<T: Tally>(f: &mut Matrix, tally: &mut T) {
    let n = f.n();
    let mut scaled = vec![0.0; n];
    let mut frozen = vec![0.0; n];
    for k in 1..n {
        frozen[..=k].copy_from_slice(&f.row(k)[..=k]);
        let diag = frozen[k];
        for (g, &v) in scaled[..k].iter_mut().zip(&frozen[..k]) {
            *g = v / diag;
        }
        tally.muldiv(k);
        for i in 0..k {
            axpy(scaled[i], &frozen[..=i], &mut f.row_mut(i)[..=i]);
            tally.muldiv(i + 1);
        }
    }
}

/// `F + (F - D)ᵀ` with `D = diag(F)`.
fn assemble(f: &Matrix) -> Matrix {
    let n = f.n();
    let mut r = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let d = if i == j { f[(i, i)] } else { 0.0 };
            r[(i, j)] = f[(i, j)] + (f[(j, i)] - d);
        }
    }
    r
}

fn v1_kernel<T: Tally>(a: &Matrix, t1: &mut T, t2: &mut T) -> Result<(Matrix, Matrix, Matrix)> {
    check_symmetric(a)?;
    let stage1 = lower_stage(a, t1)?;
    let mut f = stage1.clone();
    completion_stage(&mut f, t2);
    let inverse = assemble(&f);
    Ok((stage1, f, inverse))
}

/// Two-stage symmetric inversion.
///
/// Pivot-free inputs cost `n³/2 + n² − n/2` multiplications and divisions and
/// no square roots.
pub fn invert_v1(a: &Matrix, counter: Option<&mut OpCounter>) -> Result<Matrix> {
    let (_, _, inverse) = match counter {
        Some(c) => {
            let mut second = OpCounter::new();
            let out = v1_kernel(a, c, &mut second)?;
            *c += second;
            out
        }
        None => v1_kernel(a, &mut NoCount, &mut NoCount)?,
    };
    Ok(inverse)
}

/// [`invert_v1`] keeping both stages and their separate counts.
pub fn invert_v1_stages(a: &Matrix) -> Result<V1Stages> {
    let mut stage1_ops = OpCounter::new();
    let mut stage2_ops = OpCounter::new();
    let (stage1, f_final, inverse) = v1_kernel(a, &mut stage1_ops, &mut stage2_ops)?;
    Ok(V1Stages {
        stage1,
        f_final,
        inverse,
        stage1_ops,
        stage2_ops,
    })
}

fn v2_kernel<T: Tally>(a: &Matrix, tally: &mut T) -> Result<Matrix> {
    check_symmetric(a)?;
    let n = a.n();
    let tol = a.pivot_tolerance();
    let mut f = Matrix::identity(n);
    let mut old = vec![0.0; n];
    let mut new = vec![0.0; n];
    // sums[i] = f_i . a_m for rows i >= m, produced one step ahead while the
    // row is being updated
    let mut sums = a.row(0).to_vec();
    for m in 0..n {
        old[..m].copy_from_slice(&f.row(m)[..m]);
        let pivot = sums[m];
        if pivot.abs() <= tol {
            return Err(Error::ZeroPivot { step: m });
        }
        let recip = 1.0 / pivot;
        tally.muldiv(1);

        // pivot row, lower part: f[m][j] = old[j] / pivot, j <= m
        for (v, &o) in new[..m].iter_mut().zip(&old[..m]) {
            *v = o * recip;
        }
        tally.muldiv(m);
        new[m] = recip;
        f.row_mut(m)[..=m].copy_from_slice(&new[..=m]);

        // rows below: new column entry, rank-1 update of columns < m, and the
        // next step's sum
        if m + 1 < n {
            let next = &a.row(m + 1)[..=m];
            for i in (m + 1)..n {
                let row = f.row_mut(i);
                let c = -sums[i] * recip;
                let s = axpy_dot(c, &old[..m], &mut row[..m], &next[..m]);
                row[m] = c;
                sums[i] = s + c * next[m] + a[(m + 1, i)];
                tally.muldiv(2 * m + 2);
            }
        }

        // leading block, lower triangle: f[i][j] += f[m][i] * old[j]
        for i in 0..m {
            axpy(new[i], &old[..=i], &mut f.row_mut(i)[..=i]);
            tally.muldiv(i + 1);
        }
    }
    f.mirror_lower();
    Ok(f)
}

/// One-sweep symmetric inversion.
///
/// Pivot-free inputs cost `n³/2 + n²/2` multiplications and divisions and no
/// square roots. The result is exactly symmetric.
pub fn invert_v2(a: &Matrix, counter: Option<&mut OpCounter>) -> Result<Matrix> {
    match counter {
        Some(c) => v2_kernel(a, c),
        None => v2_kernel(a, &mut NoCount),
    }
}

/// The one-sweep variant written in its column-oriented form: the new column
/// `m` of `F` is produced first (above the diagonal from the old pivot row,
/// below it from dot products), the lower triangle left of column `m` is
/// updated from that column, and the pivot row is then copied from it.
///
/// Mathematically identical to [`invert_v2`]; kept as an independent
/// implementation to cross-check it.
pub fn invert_v2_reference(a: &Matrix) -> Result<Matrix> {
    check_symmetric(a)?;
    let n = a.n();
    let tol = a.pivot_tolerance();
    let mut f = Matrix::identity(n);
    for m in 0..n {
        let prev = f.clone();
        let col = a.col(m);
        let pivot: f64 = (0..n).map(|c| prev[(m, c)] * col[c]).sum();
        if pivot.abs() <= tol {
            return Err(Error::ZeroPivot { step: m });
        }
        let recip = 1.0 / pivot;
        // column m, rows 0..=m
        for i in 0..=m {
            f[(i, m)] = recip * prev[(m, i)];
        }
        // column m, rows below
        for i in (m + 1)..n {
            let s: f64 = (0..n).map(|c| prev[(i, c)] * col[c]).sum();
            f[(i, m)] = -s * f[(m, m)];
        }
        // columns left of m, on and below the diagonal, except row m
        for j in 0..m {
            for i in j..n {
                if i != m {
                    f[(i, j)] = prev[(i, j)] + f[(i, m)] * prev[(m, j)];
                }
            }
        }
        // pivot row from the new column
        for j in 0..m {
            f[(m, j)] = f[(j, m)];
        }
        // entries above the diagonal left of column m are stale and unused;
        // columns right of m are untouched
    }
    f.mirror_lower();
    Ok(f)
}

/// How [`invert_symmetric_robust`] obtained its result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// The one-sweep symmetric variant succeeded.
    Symmetric,
    /// The symmetric variant hit a zero pivot at this step; the permuting
    /// general elimination was used instead.
    Fallback { zero_pivot_step: usize },
}

#[derive(Clone, Debug)]
pub struct RobustInverse {
    pub inverse: Matrix,
    pub route: Route,
}

/// [`invert_v2`], falling back to the permuting general elimination when a
/// leading principal minor vanishes. The fallback result is symmetrized as
/// `(R + Rᵀ) / 2`.
pub fn invert_symmetric_robust(
    a: &Matrix,
    mut counter: Option<&mut OpCounter>,
) -> Result<RobustInverse> {
    match invert_v2(a, counter.as_deref_mut()) {
        Ok(inverse) => Ok(RobustInverse {
            inverse,
            route: Route::Symmetric,
        }),
        Err(Error::ZeroPivot { step }) => {
            let r = modgauss::invert(a, counter)?;
            let n = r.n();
            let mut inverse = Matrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    inverse[(i, j)] = 0.5 * (r[(i, j)] + r[(j, i)]);
                }
            }
            Ok(RobustInverse {
                inverse,
                route: Route::Fallback {
                    zero_pivot_step: step,
                },
            })
        }
        Err(e) => Err(e),
    }
}

fn state_at(a: &Matrix, steps: usize) -> Result<EliminationState<'_>> {
    let mut state = EliminationState::new(a, RequiredSet::all(a.n()))?.with_pivoting(Pivoting::Forbid);
    for _ in 0..steps {
        state.eliminate_step(&mut NoCount)?;
    }
    Ok(state)
}

fn check_step(a: &Matrix, m: usize) -> Result<()> {
    if m >= a.n() {
        return Err(Error::InvalidArgument(format!(
            "step {m} out of range for order {}",
            a.n()
        )));
    }
    Ok(())
}

/// After `m + 1` pivot-free steps with every variable required, the leading
/// `(m+1)`-block of `F` inverts the leading `(m+1)` principal submatrix of `A`
/// (within `1e-9 (1 + ||S_a||_F)`), and for symmetric `A` is itself symmetric.
pub fn lemma1_check(a: &Matrix, m: usize) -> Result<bool> {
    check_step(a, m)?;
    let state = state_at(a, m + 1)?;
    let k = m + 1;
    let sa = a.leading(k);
    let sf = state.f().leading(k);
    let tol = 1e-9 * (1.0 + frobenius_norm(&sa));
    let prod = matmul(&sf, &sa)?;
    let inverse_ok = (0..k).all(|i| {
        (0..k).all(|j| {
            let target = if i == j { 1.0 } else { 0.0 };
            (prod[(i, j)] - target).abs() <= tol
        })
    });
    if !inverse_ok {
        return Ok(false);
    }
    if a.is_symmetric(SymmetryCheck::exact()) {
        let scale = 1.0 + sf.max_abs();
        let symmetric = (0..k).all(|i| (0..i).all(|j| (sf[(i, j)] - sf[(j, i)]).abs() <= tol * scale));
        return Ok(symmetric);
    }
    Ok(true)
}

/// `F^{m+1} - F^m_c` equals the outer product of column `m` of `F^{m+1}` with
/// row `m` of `Fᵐ`, where `F^m_c` is `Fᵐ` with row `m` zeroed. Holds for any
/// nonsingular `A` without pivoting; checked within `1e-10` relative.
pub fn lemma2_check(a: &Matrix, m: usize) -> Result<bool> {
    check_step(a, m)?;
    let mut state = state_at(a, m)?;
    let before = state.f().clone();
    state.eliminate_step(&mut NoCount)?;
    let after = state.f();
    let n = a.n();
    let scale = 1.0_f64.max(before.max_abs()).max(after.max_abs());
    let tol = 1e-10 * scale;
    for i in 0..n {
        for j in 0..n {
            let compressed = if i == m { 0.0 } else { before[(i, j)] };
            let delta = after[(i, j)] - compressed;
            let outer = after[(i, m)] * before[(m, j)];
            if (delta - outer).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `max_k ‖A_k‖_F ‖A_k⁻¹‖_F` over the leading principal submatrices `A_k`.
///
/// The pivot-free variants form every `A_k⁻¹` along the way, so their
/// rounding error scales with this quantity rather than with the condition
/// of `A` alone. Read off the elimination itself, `O(n³)`.
pub fn leading_condition(a: &Matrix) -> Result<f64> {
    let n = a.n();
    let mut state = EliminationState::new(a, RequiredSet::all(n))?.with_pivoting(Pivoting::Forbid);
    let mut a_sq = 0.0;
    let mut worst = 0.0_f64;
    for k in 0..n {
        state.eliminate_step(&mut NoCount)?;
        a_sq += a[(k, k)] * a[(k, k)];
        for j in 0..k {
            a_sq += a[(k, j)] * a[(k, j)] + a[(j, k)] * a[(j, k)];
        }
        let f = state.f();
        let f_sq: f64 = (0..=k).map(|i| f.row(i)[..=k].iter().map(|v| v * v).sum::<f64>()).sum();
        worst = worst.max((a_sq * f_sq).sqrt());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use syminv_oracle as oracle;

    #[test]
    fn leading_condition_matches_blockwise_inverses() {
        let rows = oracle::random_symmetric(&mut oracle::SplitMix::new(31), 6);
        let want = (1..=6)
            .map(|k| {
                let b = oracle::leading_block(&rows, k);
                oracle::frobenius(&b) * oracle::frobenius(&oracle::inverse_adjugate(&b).unwrap())
            })
            .fold(0.0, f64::max);
        let got = leading_condition(&Matrix::from_rows(&rows).unwrap()).unwrap();
        assert!((got - want).abs() <= 1e-9 * want, "{got} vs {want}");
        assert_eq!(leading_condition(&Matrix::identity(4)).unwrap(), 4.0);
        let z = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(leading_condition(&z), Err(Error::ZeroPivot { step: 0 })));
    }

    fn mat(rows: &[Vec<f64>]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn spd(seed: u64, n: usize) -> Matrix {
        mat(&oracle::random_spd_dominant(&mut oracle::SplitMix::new(seed), n))
    }

    fn assert_close(got: &Matrix, want: &[Vec<f64>], rel: f64) {
        let d = oracle::rel_frobenius_distance(&got.to_rows(), want);
        assert!(d <= rel, "relative distance {d:e} > {rel:e}");
    }

    #[test]
    fn v1_diagonal() {
        let a = Matrix::from_diag(&[2.0, 4.0]).unwrap();
        assert_eq!(
            invert_v1(&a, None).unwrap(),
            mat(&[vec![0.5, 0.0], vec![0.0, 0.25]])
        );
    }

    #[test]
    fn v2_two_by_two() {
        let a = mat(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let want = vec![vec![2.0 / 3.0, -1.0 / 3.0], vec![-1.0 / 3.0, 2.0 / 3.0]];
        assert_close(&invert_v2(&a, None).unwrap(), &want, 1e-15);
        assert_close(&invert_v2_reference(&a).unwrap(), &want, 1e-15);
        assert_close(&invert_v1(&a, None).unwrap(), &want, 1e-15);
    }

    #[test]
    fn reference_diagonal() {
        let a = Matrix::from_diag(&[1.0, 2.0, 3.0]).unwrap();
        let r = invert_v2_reference(&a).unwrap();
        assert_eq!(r, Matrix::from_diag(&[1.0, 0.5, 1.0 / 3.0]).unwrap());
        assert_eq!(r, invert_v2(&a, None).unwrap());
    }

    #[test]
    fn one_by_one_is_one_division() {
        let a = Matrix::from_diag(&[4.0]).unwrap();
        for f in [invert_v1, invert_v2] {
            let mut c = OpCounter::new();
            assert_eq!(f(&a, Some(&mut c)).unwrap()[(0, 0)], 0.25);
            assert_eq!(c, OpCounter { muldiv: 1, sqrt: 0 });
        }
    }

    #[test]
    fn v1_and_v2_match_oracle_and_general_elimination() {
        let mut rng = oracle::SplitMix::new(3);
        let rows = oracle::random_symmetric(&mut rng, 6);
        let want = oracle::inverse_adjugate(&rows).unwrap();
        let a = mat(&rows);
        let v1 = invert_v1(&a, None).unwrap();
        let v2 = invert_v2(&a, None).unwrap();
        assert_close(&v1, &want, 1e-10);
        assert_close(&v2, &want, 1e-10);
        let general = modgauss::invert(&a, None).unwrap();
        assert_close(&v1, &general.to_rows(), 1e-12);
    }

    #[test]
    fn counts_at_n100_and_n500() {
        let a = spd(100, 100);
        let mut c1 = OpCounter::new();
        let mut c2 = OpCounter::new();
        invert_v1(&a, Some(&mut c1)).unwrap();
        invert_v2(&a, Some(&mut c2)).unwrap();
        assert_eq!(c1, OpCounter { muldiv: 509_950, sqrt: 0 });
        assert_eq!(c2, OpCounter { muldiv: 505_000, sqrt: 0 });
    }

    #[test]
    fn stage_counts_and_shapes() {
        for n in 1..=12u64 {
            let a = spd(n, n as usize);
            let s = invert_v1_stages(&a).unwrap();
            // 6 * count, to keep the integer arithmetic exact
            assert_eq!(6 * s.stage1_ops.muldiv, 2 * n * n * n + 3 * n * n + n);
            assert_eq!(6 * s.stage2_ops.muldiv + 4 * n, n * n * n + 3 * n * n);
            for i in 0..n as usize {
                for j in (i + 1)..n as usize {
                    assert_eq!(s.stage1[(i, j)], 0.0);
                    assert_eq!(s.f_final[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn not_symmetric_rejected() {
        let a = mat(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(matches!(invert_v1(&a, None), Err(Error::NotSymmetric { .. })));
        assert!(matches!(invert_v2(&a, None), Err(Error::NotSymmetric { .. })));
        assert!(matches!(invert_v2_reference(&a), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn zero_leading_minor() {
        let a = mat(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        assert!(matches!(invert_v1(&a, None), Err(Error::ZeroPivot { step: 0 })));
        assert!(matches!(invert_v2(&a, None), Err(Error::ZeroPivot { step: 0 })));
        assert!(matches!(invert_v2_reference(&a), Err(Error::ZeroPivot { step: 0 })));
        let robust = invert_symmetric_robust(&a, None).unwrap();
        assert_eq!(robust.route, Route::Fallback { zero_pivot_step: 0 });
        let want = vec![
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.5],
        ];
        assert_close(&robust.inverse, &want, 1e-15);

        // the second leading minor vanishes: [[1,1],[1,1]]
        let b = mat(&[
            vec![1.0, 1.0, 0.0],
            vec![1.0, 1.0, 1.0],
            vec![0.0, 1.0, 1.0],
        ]);
        assert!(matches!(invert_v2(&b, None), Err(Error::ZeroPivot { step: 1 })));
        assert!(matches!(invert_v1(&b, None), Err(Error::ZeroPivot { step: 1 })));
    }

    #[test]
    fn robust_takes_symmetric_route_when_possible() {
        let a = spd(4, 5);
        let r = invert_symmetric_robust(&a, None).unwrap();
        assert_eq!(r.route, Route::Symmetric);
        assert_eq!(r.inverse, invert_v2(&a, None).unwrap());
    }

    #[test]
    fn lemma_checks_on_identity() {
        let a = Matrix::identity(5);
        for m in 0..5 {
            assert!(lemma1_check(&a, m).unwrap());
            assert!(lemma2_check(&a, m).unwrap());
        }
        assert!(lemma1_check(&a, 5).is_err());
    }

    #[test]
    fn lemma2_single_unit_for_identity() {
        let a = Matrix::identity(3);
        let mut state = state_at(&a, 1).unwrap();
        let before = state.f().clone();
        state.eliminate_step(&mut NoCount).unwrap();
        let mut compressed = before.clone();
        compressed.row_mut(1).fill(0.0);
        let delta = state.f().sub(&compressed).unwrap();
        let mut want = Matrix::zeros(3);
        want[(1, 1)] = 1.0;
        assert_eq!(delta, want);
    }

    #[test]
    fn lemma_checks_detect_zero_pivot() {
        let a = mat(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(lemma1_check(&a, 0), Err(Error::ZeroPivot { step: 0 })));
    }
}
