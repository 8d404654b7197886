//! Modified Gaussian elimination.
//!
//! Instead of reducing `A`, the elimination evolves an auxiliary matrix `F`
//! starting from the identity. Step `m` makes column `m` of `A` "done": the
//! pivot row of `F` is scaled so that `f_m · a_m = 1`, and every other live
//! row `i` is updated as `f_i -= (f_i · a_m) f_m`. Once all steps have run,
//! every required row satisfies `f_i · a_i = 1` and `f_i · a_j = 0` for
//! `j != i`; with every variable required, `F = A⁻¹`.
//!
//! Rows of unrequired variables are frozen as soon as their own step has
//! passed, which is where the savings for partial solves come from.
//!
//! The kernel tracks the structural zeros of `F`: a row that has not been
//! pivoted yet is zero outside the already-touched columns, except for a
//! single unit entry. Only products against those nonzeros are performed
//! (and counted), which gives exactly `n³` multiplications and divisions for
//! a full inversion.

use crate::count::{NoCount, OpCounter, Tally};
use crate::error::{Error, Result};
use crate::matrix::{axpy, dot, frobenius_norm, Matrix};
use crate::required::RequiredSet;

/// What to do when `|f_m · a_m|` falls below the pivot tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pivoting {
    /// Swap in the later row with the largest `|f_j · a_m|`.
    Permute,
    /// Fail with [`Error::ZeroPivot`].
    Forbid,
}

/// In-progress elimination of one matrix.
#[derive(Clone, Debug)]
pub struct EliminationState<'a> {
    a: &'a Matrix,
    f: Matrix,
    step: usize,
    required: RequiredSet,
    required_mask: Vec<bool>,
    swaps: Vec<(usize, usize)>,
    /// Column holding the unit entry of each not-yet-pivoted row.
    unit_col: Vec<usize>,
    /// Columns of `F` holding general values, in the order they were touched.
    dense: Vec<usize>,
    /// `dense == [0, 1, .., step-1]`, which lets the loops use plain slices.
    dense_is_prefix: bool,
    pivot_tol: f64,
    pivoting: Pivoting,
}

impl<'a> EliminationState<'a> {
    /// `F⁰ = I`, step 0.
    pub fn new(a: &'a Matrix, required: RequiredSet) -> Result<Self> {
        let n = a.n();
        if required.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: required.n(),
            });
        }
        Ok(EliminationState {
            a,
            f: Matrix::identity(n),
            step: 0,
            required_mask: required.mask(),
            required,
            swaps: Vec::new(),
            unit_col: (0..n).collect(),
            dense: Vec::with_capacity(n),
            dense_is_prefix: true,
            pivot_tol: a.pivot_tolerance(),
            pivoting: Pivoting::Permute,
        })
    }

    pub fn with_pivoting(mut self, pivoting: Pivoting) -> Self {
        self.pivoting = pivoting;
        self
    }

    /// Number of completed steps `m`.
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn is_done(&self) -> bool {
        self.step == self.a.n()
    }

    /// Current `Fᵐ`.
    pub fn f(&self) -> &Matrix {
        &self.f
    }

    pub fn into_f(self) -> Matrix {
        self.f
    }

    pub fn required(&self) -> &RequiredSet {
        &self.required
    }

    /// Row swaps applied to `F`, as `(pivot_row, swapped_in_row)`, 0-based.
    pub fn swaps(&self) -> &[(usize, usize)] {
        &self.swaps
    }

    pub fn pivot_tolerance(&self) -> f64 {
        self.pivot_tol
    }

    /// `f_i · col`, touching only the structural nonzeros of row `i` among the
    /// first `width` dense columns.
    fn row_dot<T: Tally>(&self, i: usize, col: &[f64], width: usize, tally: &mut T) -> f64 {
        let row = self.f.row(i);
        let mut s = if self.dense_is_prefix {
            dot(&row[..width], &col[..width])
        } else {
            self.dense[..width]
                .iter()
                .map(|&c| row[c] * col[c])
                .sum::<f64>()
        };
        tally.muldiv(width);
        if i >= self.step {
            // unit entry, no multiplication
            s += col[self.unit_col[i]];
        }
        s
    }

    /// Apply one step of the elimination.
    pub fn eliminate_step<T: Tally>(&mut self, tally: &mut T) -> Result<()> {
        let n = self.a.n();
        let m = self.step;
        if m >= n {
            return Err(Error::InvalidArgument("elimination already complete".into()));
        }
        let col = self.a.col(m);

        let mut pivot = self.row_dot(m, &col, m, tally);
        if pivot.abs() <= self.pivot_tol {
            if self.pivoting == Pivoting::Forbid {
                return Err(Error::ZeroPivot { step: m });
            }
            let mut best: Option<(usize, f64)> = None;
            for j in (m + 1)..n {
                let v = self.row_dot(j, &col, m, tally);
                if best.is_none_or(|(_, b)| v.abs() > b.abs()) {
                    best = Some((j, v));
                }
            }
            match best {
                Some((j, v)) if v.abs() > self.pivot_tol => {
                    self.f.swap_rows(m, j);
                    self.unit_col.swap(m, j);
                    self.swaps.push((m, j));
                    pivot = v;
                }
                _ => return Err(Error::SingularMatrix { step: m }),
            }
        }

        let recip = 1.0 / pivot;
        tally.muldiv(1);
        let u = self.unit_col[m];
        if u != m {
            self.dense_is_prefix = false;
        }
        {
            let pivot_row = self.f.row_mut(m);
            if self.dense_is_prefix {
                pivot_row[..m].iter_mut().for_each(|v| *v *= recip);
            } else {
                for &c in &self.dense {
                    pivot_row[c] *= recip;
                }
            }
            tally.muldiv(m);
            pivot_row[u] = recip;
        }
        self.dense.push(u);

        let pivot_vals: Vec<f64> = if self.dense_is_prefix {
            self.f.row(m)[..=m].to_vec()
        } else {
            self.dense.iter().map(|&c| self.f[(m, c)]).collect()
        };

        for i in 0..n {
            if i == m || (i < m && !self.required_mask[i]) {
                continue;
            }
            let s = self.row_dot(i, &col, m, tally);
            let row = self.f.row_mut(i);
            if self.dense_is_prefix {
                axpy(-s, &pivot_vals, &mut row[..=m]);
            } else {
                for (&c, &p) in self.dense.iter().zip(&pivot_vals) {
                    row[c] -= s * p;
                }
            }
            tally.muldiv(m + 1);
        }

        self.step += 1;
        Ok(())
    }

    /// Run the remaining steps.
    pub fn run<T: Tally>(&mut self, tally: &mut T) -> Result<()> {
        while !self.is_done() {
            self.eliminate_step(tally)?;
        }
        Ok(())
    }
}

/// Run the full elimination for `required`, returning the final state.
///
/// The counter sees the elimination only; for a trailing block of `p`
/// variables on a pivot-free matrix it equals
/// `n³/3 + n²/2 + n/6 + p²n − pn − p³/3 + p²/2 − p/6`.
pub fn eliminate<'a>(
    a: &'a Matrix,
    required: RequiredSet,
    counter: Option<&mut OpCounter>,
) -> Result<EliminationState<'a>> {
    let mut state = EliminationState::new(a, required)?;
    match counter {
        Some(c) => state.run(c)?,
        None => state.run(&mut NoCount)?,
    }
    Ok(state)
}

/// General inverse, permuting rows of `F` when a pivot vanishes.
///
/// Pivot-free inputs cost exactly `n³` multiplications and divisions.
pub fn invert(a: &Matrix, counter: Option<&mut OpCounter>) -> Result<Matrix> {
    Ok(eliminate(a, RequiredSet::all(a.n()), counter)?.into_f())
}

/// Values of the required solution components.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialSolution {
    /// `(1-based index, value)`, ascending by index.
    pub entries: Vec<(usize, f64)>,
}

impl PartialSolution {
    pub fn get(&self, index: usize) -> Option<f64> {
        self.entries
            .iter()
            .find(|(i, _)| *i == index)
            .map(|(_, v)| *v)
    }
}

/// Solve `A x = b` for the required components only.
///
/// The counter receives the elimination plus the `n·p` products of the final
/// `x_i = f_i · b`.
pub fn solve(
    a: &Matrix,
    b: &[f64],
    required: RequiredSet,
    counter: Option<&mut OpCounter>,
) -> Result<PartialSolution> {
    let n = a.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let mut local = OpCounter::new();
    let state = eliminate(a, required, Some(&mut local))?;
    let entries = state
        .required()
        .indices()
        .iter()
        .map(|&i| (i, dot(state.f().row(i - 1), b)))
        .collect::<Vec<_>>();
    local.muldiv += (n * entries.len()) as u64;
    if let Some(c) = counter {
        *c += local;
    }
    Ok(PartialSolution { entries })
}

/// `f_i · a_i ≈ 1` and `f_i · a_j ≈ 0` (`j != i`) for every required `i`,
/// within `1e-10 (1 + ||A||_F)`.
pub fn row_identities_check(a: &Matrix, f_final: &Matrix, required: &RequiredSet) -> bool {
    if a.n() != f_final.n() || required.n() != a.n() {
        return false;
    }
    let tol = 1e-10 * (1.0 + frobenius_norm(a));
    let n = a.n();
    required.indices().iter().all(|&i1| {
        let fi = f_final.row(i1 - 1);
        (0..n).all(|j| {
            let v: f64 = (0..n).map(|k| fi[k] * a[(k, j)]).sum();
            let target = if j == i1 - 1 { 1.0 } else { 0.0 };
            (v - target).abs() <= tol
        })
    })
}
