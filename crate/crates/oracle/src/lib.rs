//! Brute-force reference computations for checking the inversion kernels.
//!
//! Everything here works on plain `Vec<Vec<f64>>` rows so it shares no code
//! with the library under test. None of it is fast; all of it is simple.

#![allow(clippy::needless_range_loop)]

use std::collections::HashMap;

pub type Rows = Vec<Vec<f64>>;

/// Determinant by cofactor (Laplace) expansion along successive rows,
/// memoized over the set of still-available columns.
///
/// Cost is `O(n * 2^n)`, fine up to n of about 16.
pub fn det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 1.0;
    }
    assert!(n <= 20, "cofactor oracle is exponential in n");
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut memo = HashMap::new();
    expand(a, 0, full, &mut memo)
}

fn expand(a: &[Vec<f64>], row: usize, cols: u32, memo: &mut HashMap<(usize, u32), f64>) -> f64 {
    if row == a.len() {
        return 1.0;
    }
    if let Some(&v) = memo.get(&(row, cols)) {
        return v;
    }
    let mut sum = 0.0;
    let mut position = 0;
    for c in 0..a.len() {
        if cols & (1 << c) == 0 {
            continue;
        }
        let entry = a[row][c];
        if entry != 0.0 {
            let sign = if position % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * entry * expand(a, row + 1, cols & !(1 << c), memo);
        }
        position += 1;
    }
    memo.insert((row, cols), sum);
    sum
}

/// The matrix with row `skip_r` and column `skip_c` removed.
pub fn minor(a: &[Vec<f64>], skip_r: usize, skip_c: usize) -> Rows {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != skip_r)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != skip_c)
                .map(|(_, v)| *v)
                .collect()
        })
        .collect()
}

/// Inverse via the adjugate: `inv[i][j] = (-1)^(i+j) det(minor(j, i)) / det(a)`.
///
/// Returns `None` when the determinant is exactly zero.
pub fn inverse_adjugate(a: &[Vec<f64>]) -> Option<Rows> {
    let n = a.len();
    let d = det(a);
    if d == 0.0 {
        return None;
    }
    if n == 1 {
        return Some(vec![vec![1.0 / d]]);
    }
    let mut inv = vec![vec![0.0; n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            *out = sign * det(&minor(a, j, i)) / d;
        }
    }
    Some(inv)
}

/// Leading principal `k x k` block.
pub fn leading_block(a: &[Vec<f64>], k: usize) -> Rows {
    a[..k].iter().map(|r| r[..k].to_vec()).collect()
}

/// Textbook triple-loop product.
pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Rows {
    let n = a.len();
    let m = b[0].len();
    let inner = b.len();
    let mut c = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut s = 0.0;
            for k in 0..inner {
                s += a[i][k] * b[k][j];
            }
            c[i][j] = s;
        }
    }
    c
}

pub fn identity(n: usize) -> Rows {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn frobenius(a: &[Vec<f64>]) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// `||a - b||_F / max(||b||_F, tiny)`.
pub fn rel_frobenius_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let diff: f64 = a
        .iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    diff / frobenius(b).max(f64::MIN_POSITIVE)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Rows = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// Small deterministic generator (SplitMix64) so oracle-side fixtures do not
/// depend on the library's RNG choices.
#[derive(Clone, Debug)]
pub struct SplitMix(u64);

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let unit = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * unit
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

pub fn random_general(rng: &mut SplitMix, n: usize) -> Rows {
    (0..n)
        .map(|_| (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect())
        .collect()
}

pub fn random_symmetric(rng: &mut SplitMix, n: usize) -> Rows {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = rng.uniform(-1.0, 1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

/// Symmetric, strictly diagonally dominant with positive diagonal.
pub fn random_spd_dominant(rng: &mut SplitMix, n: usize) -> Rows {
    let mut a = random_symmetric(rng, n);
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[i][j].abs()).sum();
        a[i][i] = off + rng.uniform(1.0, 2.0);
    }
    a
}

/// Pivots of Gaussian elimination without row exchanges; pivot `k` is the
/// ratio of leading minors of orders `k + 1` and `k`. `O(n^3)`.
pub fn elimination_pivots(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut u: Rows = a.to_vec();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let p = u[k][k];
        pivots.push(p);
        if p == 0.0 {
            break;
        }
        for i in (k + 1)..n {
            let f = u[i][k] / p;
            for j in k..n {
                u[i][j] -= f * u[k][j];
            }
        }
    }
    pivots
}

/// Smallest `|det|` over the leading principal minors.
pub fn min_leading_minor(a: &[Vec<f64>]) -> f64 {
    (1..=a.len())
        .map(|k| det(&leading_block(a, k)).abs())
        .fold(f64::INFINITY, f64::min)
}
