//! Self-check suite behind `syminv verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complexity::{q_theor, CountMethod};
use crate::count::OpCounter;
use crate::error::Error;
use crate::genbench::{generate, FamilyKind, MatrixFamily, Method};
use crate::matrix::{frobenius_norm, residual_frobenius, Matrix};
use crate::modgauss;
use crate::required::RequiredSet;
use crate::syminv::{self, Route};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

type Check = fn(usize, u64) -> Result<String, String>;

const CHECKS: [(&str, Check); 10] = [
    ("count exactness", counts),
    ("square-root freedom", sqrt_free),
    ("inverse correctness", general_inverse),
    ("method agreement", agreement),
    ("v2 reference equivalence", v2_equivalence),
    ("reconstruction identity", reconstruction),
    ("lemma identities", lemmas),
    ("row identities", row_identities),
    ("indefinite applicability", indefinite),
    ("zero leading minor", zero_minor),
];

/// Run every check for orders up to `max_n` with matrices derived from
/// `seed`.
pub fn verify(max_n: usize, seed: u64) -> VerifyReport {
    let max_n = max_n.max(2);
    let checks = CHECKS
        .iter()
        .map(|&(name, check)| {
            let (passed, detail) = match check(max_n, seed) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome {
                name,
                passed,
                detail,
            }
        })
        .collect();
    VerifyReport { checks }
}

fn family(kind: FamilyKind, n: usize, seed: u64) -> Result<Matrix, String> {
    generate(&MatrixFamily::new(kind, n, seed.wrapping_add(n as u64))).map_err(|e| e.to_string())
}

/// Threshold for `error / (n · eps · κ)` test ratios, as in LAPACK's test
/// drivers. `κ` is [`syminv::leading_condition`]: the pivot-free variants
/// form every leading-block inverse, so their rounding follows it.
const RATIO_THRESHOLD: f64 = 30.0;

fn ratio(d: f64, a: &Matrix) -> Result<f64, String> {
    let kappa = syminv::leading_condition(a).map_err(fail)?;
    Ok(d / (a.n() as f64 * f64::EPSILON * kappa))
}

fn general(n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut data: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    for i in 0..n {
        data[i * n + i] += if rng.random_bool(0.5) { 2.0 } else { -2.0 };
    }
    Matrix::from_vec(n, data).expect("finite")
}

fn rel(x: &Matrix, y: &Matrix) -> f64 {
    frobenius_norm(&x.sub(y).expect("same order")) / frobenius_norm(y)
}

fn fail(what: impl std::fmt::Display) -> String {
    what.to_string()
}

fn counts(max_n: usize, seed: u64) -> Result<String, String> {
    let methods = [
        Method::Cholesky,
        Method::Ldl,
        Method::Km,
        Method::V1,
        Method::V2,
        Method::Gauss,
    ];
    for n in 2..=max_n {
        let a = family(FamilyKind::DiagDominant, n, seed)?;
        for m in methods {
            let mut c = OpCounter::new();
            m.invert(&a, Some(&mut c)).map_err(fail)?;
            let want = q_theor(m.count_method(), n, None).map_err(fail)?;
            let want_s = crate::complexity::s_theor(m.count_method(), n);
            if (c.muldiv, c.sqrt) != (want, want_s) {
                return Err(format!(
                    "{m} at n={n}: counted ({}, {}), expected ({want}, {want_s})",
                    c.muldiv, c.sqrt
                ));
            }
        }
        for p in [1, n / 2 + 1, n] {
            let mut c = OpCounter::new();
            let required = RequiredSet::trailing(n, p).map_err(fail)?;
            modgauss::eliminate(&a, required, Some(&mut c)).map_err(fail)?;
            let want = q_theor(CountMethod::ModgaussP, n, Some(p)).map_err(fail)?;
            if c.muldiv != want {
                return Err(format!("elimination n={n} p={p}: {} vs {want}", c.muldiv));
            }
        }
    }
    Ok(format!("6 methods and trailing-block elimination, n = 2..={max_n}"))
}

fn sqrt_free(max_n: usize, seed: u64) -> Result<String, String> {
    let mut runs = 0;
    for n in 2..=max_n {
        for kind in [FamilyKind::DiagDominant, FamilyKind::NonDominant] {
            let a = family(kind, n, seed)?;
            for m in [Method::V1, Method::V2, Method::Ldl, Method::Gauss] {
                let mut c = OpCounter::new();
                m.invert(&a, Some(&mut c)).map_err(fail)?;
                if c.sqrt != 0 {
                    return Err(format!("{m} took {} square roots at n={n}", c.sqrt));
                }
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} runs without a square root"))
}

fn general_inverse(max_n: usize, seed: u64) -> Result<String, String> {
    for n in 1..=max_n.min(50) {
        let a = general(n, seed.wrapping_add(n as u64));
        let x = modgauss::invert(&a, None).map_err(fail)?;
        let r = residual_frobenius(&a, &x).map_err(fail)?;
        if r > 1e-9 * frobenius_norm(&a) {
            return Err(format!("residual {r:e} at n={n}"));
        }
    }
    Ok("general elimination residuals within 1e-9 ||A||_F".into())
}

/// Fixed tolerance on dominant inputs; test ratio on non-dominant ones,
/// whose leading blocks can be arbitrarily ill-conditioned.
fn agreement(max_n: usize, seed: u64) -> Result<String, String> {
    let mut worst = 0.0_f64;
    for n in 2..=max_n.min(50) {
        for kind in [FamilyKind::DiagDominant, FamilyKind::NonDominant] {
            let a = family(kind, n, seed)?;
            let g = modgauss::invert(&a, None).map_err(fail)?;
            let v1 = syminv::invert_v1(&a, None).map_err(fail)?;
            let v2 = syminv::invert_v2(&a, None).map_err(fail)?;
            let v2r = syminv::invert_v2_reference(&a).map_err(fail)?;
            for (name, x) in [("v1", &v1), ("v2", &v2), ("v2_reference", &v2r)] {
                let d = rel(x, &g);
                let bad = match kind {
                    FamilyKind::DiagDominant => d > 1e-11,
                    _ => {
                        let r = ratio(d, &a)?;
                        worst = worst.max(r);
                        r > RATIO_THRESHOLD
                    }
                };
                if bad {
                    return Err(format!("{name} differs from general elimination by {d:e} ({kind}, n={n})"));
                }
            }
        }
    }
    Ok(format!(
        "within 1e-11 on dominant inputs; worst non-dominant test ratio {worst:.2} (threshold {RATIO_THRESHOLD})"
    ))
}

fn v2_equivalence(max_n: usize, seed: u64) -> Result<String, String> {
    let mut worst = 0.0_f64;
    for n in 1..=max_n.min(20) {
        for kind in [FamilyKind::DiagDominant, FamilyKind::NonDominant] {
            let a = family(kind, n, seed)?;
            let x = syminv::invert_v2(&a, None).map_err(fail)?;
            let y = syminv::invert_v2_reference(&a).map_err(fail)?;
            let d = rel(&x, &y);
            let bad = match kind {
                FamilyKind::DiagDominant => d > 1e-13,
                _ => {
                    let r = ratio(d, &a)?;
                    worst = worst.max(r);
                    r > RATIO_THRESHOLD
                }
            };
            if bad {
                return Err(format!("{kind} n={n}: relative distance {d:e}"));
            }
        }
    }
    Ok(format!(
        "within 1e-13 on dominant inputs; worst non-dominant test ratio {worst:.2} (threshold {RATIO_THRESHOLD})"
    ))
}

fn reconstruction(max_n: usize, seed: u64) -> Result<String, String> {
    for n in 1..=max_n {
        let a = family(FamilyKind::NonDominant, n, seed)?;
        let s = syminv::invert_v1_stages(&a).map_err(fail)?;
        for i in 0..n {
            for j in (i + 1)..n {
                if s.stage1[(i, j)] != 0.0 {
                    return Err(format!("stage 1 not lower triangular at n={n}"));
                }
            }
            for j in 0..n {
                let d = if i == j { s.f_final[(i, i)] } else { 0.0 };
                let want = s.f_final[(i, j)] + (s.f_final[(j, i)] - d);
                if s.inverse[(i, j)] != want {
                    return Err(format!("assembled inverse differs at ({i}, {j}), n={n}"));
                }
            }
        }
    }
    Ok("stage 1 lower triangular; inverse equals F + (F - D)^T exactly".into())
}

fn lemmas(max_n: usize, seed: u64) -> Result<String, String> {
    let mut steps = 0;
    for n in 1..=max_n.min(12) {
        let sym = family(FamilyKind::NonDominant, n, seed)?;
        let gen = general(n, seed.wrapping_add(1000 + n as u64));
        for (label, a) in [("symmetric", &sym), ("general", &gen)] {
            for m in 0..n {
                let ok1 = syminv::lemma1_check(a, m).map_err(fail)?;
                let ok2 = syminv::lemma2_check(a, m).map_err(fail)?;
                if !(ok1 && ok2) {
                    return Err(format!("{label} n={n} step {m}: leading-block {ok1}, rank-one {ok2}"));
                }
                steps += 1;
            }
        }
    }
    Ok(format!("{steps} elimination steps checked"))
}

fn row_identities(max_n: usize, seed: u64) -> Result<String, String> {
    for n in 1..=max_n.min(20) {
        let a = general(n, seed.wrapping_add(2000 + n as u64));
        for p in 1..=n {
            let required = RequiredSet::trailing(n, p).map_err(fail)?;
            let state = modgauss::eliminate(&a, required.clone(), None).map_err(fail)?;
            if !modgauss::row_identities_check(&a, state.f(), &required) {
                return Err(format!("row identities fail at n={n}, p={p}"));
            }
        }
    }
    Ok("required rows of F satisfy f_i a_i = 1, f_i a_j = 0".into())
}

fn indefinite(max_n: usize, seed: u64) -> Result<String, String> {
    let mut indefinite = 0;
    for n in 2..=max_n {
        let a = family(FamilyKind::NonDominant, n, seed)?;
        let bound = 1e-8 * frobenius_norm(&a);
        for m in [Method::V1, Method::V2] {
            let x = m.invert(&a, None).map_err(fail)?;
            let r = residual_frobenius(&a, &x).map_err(fail)?;
            if r > bound {
                return Err(format!("{m} residual {r:e} at n={n}"));
            }
        }
        if matches!(
            Method::Cholesky.invert(&a, None),
            Err(Error::NotPositiveDefinite { .. })
        ) {
            indefinite += 1;
        }
    }
    Ok(format!(
        "{} non-dominant matrices inverted, {indefinite} of them indefinite",
        max_n - 1
    ))
}

fn zero_minor(max_n: usize, seed: u64) -> Result<String, String> {
    for n in 2..=max_n {
        let a = family(FamilyKind::ZeroLeadingMinor, n, seed)?;
        for m in [Method::V1, Method::V2] {
            match m.invert(&a, None) {
                Err(Error::ZeroPivot { step: 0 }) => {}
                other => return Err(format!("{m} at n={n}: expected ZeroPivot at step 0, got {other:?}")),
            }
        }
        let robust = syminv::invert_symmetric_robust(&a, None).map_err(fail)?;
        if robust.route != (Route::Fallback { zero_pivot_step: 0 }) {
            return Err(format!("robust route {:?} at n={n}", robust.route));
        }
        let r = residual_frobenius(&a, &robust.inverse).map_err(fail)?;
        if r > 1e-8 * frobenius_norm(&a) {
            return Err(format!("fallback residual {r:e} at n={n}"));
        }
    }
    Ok("ZeroPivot at step 0; fallback inverse within 1e-8 ||A||_F".into())
}
