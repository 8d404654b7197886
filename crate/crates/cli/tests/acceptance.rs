//! Acceptance gate. Runs serially (own harness) so the timing criterion is
//! not disturbed by concurrent tests, and prints one PASS/FAIL line each.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use syminv_core::complexity::{q_theor, s_theor, CountMethod};
use syminv_core::genbench::{run_experiment, Method, Status, Timing};
use syminv_core::modgauss::eliminate;
use syminv_core::syminv::{
    invert_symmetric_robust, invert_v1, invert_v1_stages, invert_v2, invert_v2_reference,
    leading_condition, lemma1_check, lemma2_check, Route,
};
use syminv_core::{
    frobenius_norm, generate, invert_cholesky, residual_frobenius, Error, FamilyKind, Matrix,
    MatrixFamily, OpCounter, RequiredSet,
};
use syminv_oracle as oracle;

type Outcome = Result<String, String>;

fn dominant(n: usize, seed: u64) -> Matrix {
    generate(&MatrixFamily::new(FamilyKind::DiagDominant, n, seed)).unwrap()
}

fn counted(m: Method, a: &Matrix) -> Result<OpCounter, String> {
    let mut c = OpCounter::new();
    m.invert(a, Some(&mut c)).map_err(|e| format!("{m}: {e}"))?;
    Ok(c)
}

fn table_counts(n: usize, muldiv: [u64; 5], sqrt: [u64; 5]) -> Outcome {
    let a = dominant(n, 42 + n as u64);
    for (k, m) in Method::TABLE.into_iter().enumerate() {
        let c = counted(m, &a)?;
        if (c.muldiv, c.sqrt) != (muldiv[k], sqrt[k]) {
            return Err(format!(
                "{m}: counted ({}, {}), expected ({}, {})",
                c.muldiv, c.sqrt, muldiv[k], sqrt[k]
            ));
        }
    }
    Ok(format!("muldiv {muldiv:?}, sqrt {sqrt:?}"))
}

fn c1() -> Outcome {
    table_counts(100, [515_000, 671_650, 505_000, 509_950, 505_000], [100, 0, 100, 0, 0])
}

fn c2() -> Outcome {
    table_counts(
        500,
        [62_875_000, 83_458_250, 62_625_000, 62_749_750, 62_625_000],
        [500, 0, 500, 0, 0],
    )
}

fn c3() -> Outcome {
    let mut cells = 0;
    for n in 2..=40 {
        let a = dominant(n, 3000 + n as u64);
        for m in [
            Method::Cholesky,
            Method::Ldl,
            Method::Km,
            Method::V1,
            Method::V2,
            Method::Gauss,
        ] {
            let c = counted(m, &a)?;
            let cm = m.count_method();
            let want = (q_theor(cm, n, None).unwrap(), s_theor(cm, n));
            if (c.muldiv, c.sqrt) != want {
                return Err(format!("{m} n={n}: ({}, {}) vs {want:?}", c.muldiv, c.sqrt));
            }
            cells += 1;
        }
        let stages = invert_v1_stages(&a).map_err(|e| e.to_string())?;
        for (cm, got) in [
            (CountMethod::V1Stage1, stages.stage1_ops),
            (CountMethod::V1Stage2, stages.stage2_ops),
        ] {
            if got.muldiv != q_theor(cm, n, None).unwrap() || got.sqrt != 0 {
                return Err(format!("{cm} n={n}: {got:?}"));
            }
            cells += 1;
        }
        for p in 1..=n {
            let mut c = OpCounter::new();
            eliminate(&a, RequiredSet::trailing(n, p).unwrap(), Some(&mut c))
                .map_err(|e| e.to_string())?;
            let want = q_theor(CountMethod::ModgaussP, n, Some(p)).unwrap();
            if c.muldiv != want || c.sqrt != 0 {
                return Err(format!("modgauss_p n={n} p={p}: {} vs {want}", c.muldiv));
            }
            cells += 1;
        }
    }
    Ok(format!("{cells} (method, n[, p]) cells exact for n = 2..=40"))
}

fn minors_nonzero(a: &[Vec<f64>]) -> bool {
    oracle::elimination_pivots(a).iter().all(|p| p.abs() > 1e-2)
}

/// Entries uniform in [-1, 1], every leading minor nonzero (no elimination
/// pivot below 1e-2 in magnitude).
fn symmetric_with_minors(rng: &mut oracle::SplitMix, n: usize) -> Vec<Vec<f64>> {
    loop {
        let a = oracle::random_symmetric(rng, n);
        if minors_nonzero(&a) {
            return a;
        }
    }
}

fn general_with_minors(rng: &mut oracle::SplitMix, n: usize) -> Vec<Vec<f64>> {
    loop {
        let a = oracle::random_general(rng, n);
        if minors_nonzero(&a) {
            return a;
        }
    }
}

fn c4() -> Outcome {
    let mut rng = oracle::SplitMix::new(4);
    let mut worst = 0.0_f64;
    for t in 0..100 {
        let n = 1 + t % 8;
        let rows = symmetric_with_minors(&mut rng, n);
        let want = oracle::inverse_adjugate(&rows).ok_or("oracle: singular")?;
        let a = Matrix::from_rows(&rows).unwrap();
        for (name, x) in [
            ("v1", invert_v1(&a, None)),
            ("v2", invert_v2(&a, None)),
        ] {
            let x = x.map_err(|e| format!("{name}: {e}"))?;
            let d = oracle::rel_frobenius_distance(&x.to_rows(), &want);
            worst = worst.max(d);
            if d > 1e-10 {
                return Err(format!("{name} n={n}: relative distance {d:e}"));
            }
        }
    }
    Ok(format!("100 matrices, worst relative distance {worst:.2e}"))
}

fn c5() -> Outcome {
    let mut rng = oracle::SplitMix::new(5);
    let mut steps = 0;
    for t in 0..50 {
        let n = 1 + t % 12;
        let (kind, rows) = if t % 2 == 0 {
            ("symmetric", symmetric_with_minors(&mut rng, n))
        } else {
            ("general", general_with_minors(&mut rng, n))
        };
        let a = Matrix::from_rows(&rows).unwrap();
        for m in 0..n {
            let l1 = lemma1_check(&a, m).map_err(|e| e.to_string())?;
            let l2 = lemma2_check(&a, m).map_err(|e| e.to_string())?;
            if !(l1 && l2) {
                return Err(format!("{kind} n={n} step {m}: lemma1 {l1}, lemma2 {l2}"));
            }
            steps += 1;
        }
    }
    Ok(format!("50 matrices, {steps} steps"))
}

fn c6() -> Outcome {
    let mut rng = oracle::SplitMix::new(6);
    let mut worst = 0.0_f64;
    let mut over = Vec::new();
    for t in 0..100 {
        let n = 1 + t % 20;
        let a = Matrix::from_rows(&symmetric_with_minors(&mut rng, n)).unwrap();
        let x = invert_v2(&a, None).map_err(|e| e.to_string())?;
        let y = invert_v2_reference(&a).map_err(|e| e.to_string())?;
        let d = frobenius_norm(&x.sub(&y).unwrap()) / frobenius_norm(&y);
        worst = worst.max(d);
        if d > 1e-13 {
            let kappa = leading_condition(&a).map_err(|e| e.to_string())?;
            let ratio = d / (n as f64 * f64::EPSILON * kappa);
            over.push(format!("n={n} d={d:.1e} leading-kappa={kappa:.1e} ratio={ratio:.2}"));
        }
    }
    if over.is_empty() {
        Ok(format!("100 matrices, worst relative distance {worst:.2e}"))
    } else {
        Err(format!("{} of 100 draws above 1e-13: {}", over.len(), over.join("; ")))
    }
}

fn c7() -> Outcome {
    let mut rng = oracle::SplitMix::new(7);
    for t in 0..60 {
        let n = 1 + t % 30;
        let a = Matrix::from_rows(&symmetric_with_minors(&mut rng, n)).unwrap();
        let s = invert_v1_stages(&a).map_err(|e| e.to_string())?;
        if invert_v1(&a, None).map_err(|e| e.to_string())? != s.inverse {
            return Err(format!("n={n}: invert_v1 differs from staged result"));
        }
        for i in 0..n {
            for j in 0..n {
                if j > i && s.stage1[(i, j)] != 0.0 {
                    return Err(format!("n={n}: stage 1 has ({i}, {j}) = {}", s.stage1[(i, j)]));
                }
                let f = &s.f_final;
                let d = if i == j { f[(i, i)] } else { 0.0 };
                if s.inverse[(i, j)] != f[(i, j)] + (f[(j, i)] - d) {
                    return Err(format!("n={n}: inverse differs from F + (F - D)^T at ({i}, {j})"));
                }
            }
        }
    }
    Ok("60 matrices, exact".into())
}

fn c8() -> Outcome {
    let mut inputs: Vec<Matrix> = Vec::new();
    for n in [1, 2, 3, 5, 8, 13, 21, 34, 40, 100] {
        inputs.push(dominant(n, 8000 + n as u64));
        inputs.push(generate(&MatrixFamily::new(FamilyKind::NonDominant, n, n as u64)).unwrap());
    }
    let mut rng = oracle::SplitMix::new(8);
    for n in 1..=12 {
        inputs.push(Matrix::from_rows(&symmetric_with_minors(&mut rng, n)).unwrap());
    }
    let mut runs = 0;
    for a in &inputs {
        for m in [Method::V1, Method::V2, Method::Ldl, Method::Gauss] {
            let c = counted(m, a)?;
            if c.sqrt != 0 {
                return Err(format!("{m} n={}: {} square roots", a.n(), c.sqrt));
            }
            runs += 1;
        }
    }
    for n in 2..=12 {
        let a = generate(&MatrixFamily::new(FamilyKind::ZeroLeadingMinor, n, n as u64)).unwrap();
        let mut c = OpCounter::new();
        invert_symmetric_robust(&a, Some(&mut c)).map_err(|e| e.to_string())?;
        if c.sqrt != 0 {
            return Err(format!("robust fallback n={n}: {} square roots", c.sqrt));
        }
        runs += 1;
    }
    Ok(format!("{runs} runs, none evaluated a square root"))
}

fn c9() -> Outcome {
    let mut found = 0;
    let mut seed = 9000u64;
    let mut worst = 0.0_f64;
    while found < 50 {
        let n = 5 + (seed as usize % 46);
        seed += 1;
        let a = generate(&MatrixFamily::new(FamilyKind::NonDominant, n, seed))
            .map_err(|e| e.to_string())?;
        match invert_cholesky(&a, None) {
            Err(Error::NotPositiveDefinite { .. }) => {}
            Ok(_) => continue,
            Err(e) => return Err(format!("cholesky: unexpected {e}")),
        }
        let bound = 1e-8 * frobenius_norm(&a);
        for (name, x) in [("v1", invert_v1(&a, None)), ("v2", invert_v2(&a, None))] {
            let x = x.map_err(|e| format!("{name} n={n}: {e}"))?;
            let r = residual_frobenius(&a, &x).unwrap();
            worst = worst.max(r / frobenius_norm(&a));
            if r > bound {
                return Err(format!("{name} n={n}: residual {r:e} > {bound:e}"));
            }
        }
        found += 1;
    }
    Ok(format!("50 indefinite matrices, worst residual/||A||_F {worst:.2e}"))
}

/// Symmetric, nonsingular, with the leading minor of order `k + 1` zero.
#[allow(clippy::needless_range_loop)]
fn zero_minor_at(n: usize, k: usize, seed: u64) -> Matrix {
    let mut a = dominant(n, seed).to_rows();
    for j in 0..k {
        a[k][j] = 0.0;
        a[j][k] = 0.0;
    }
    let rest = |a: &[Vec<f64>], i: usize| -> f64 {
        (0..n).filter(|&j| j != k && j != k + 1).map(|j| a[i][j].abs()).sum()
    };
    let s = rest(&a, k).max(rest(&a, k + 1)) + 1.5;
    a[k][k] = 0.0;
    a[k + 1][k + 1] = 0.0;
    a[k][k + 1] = s;
    a[k + 1][k] = s;
    Matrix::from_rows(&a).unwrap()
}

fn c10() -> Outcome {
    let mut cases = Vec::new();
    for n in 2..=40 {
        let a = generate(&MatrixFamily::new(FamilyKind::ZeroLeadingMinor, n, 10_000 + n as u64))
            .map_err(|e| e.to_string())?;
        cases.push((a, 0));
    }
    for n in 3..=20 {
        for k in [1, n / 2, n - 2] {
            cases.push((zero_minor_at(n, k, 10_100 + n as u64), k));
        }
    }
    for (a, k) in &cases {
        let n = a.n();
        let rows = a.to_rows();
        if oracle::det(&oracle::leading_block(&rows, k + 1)) != 0.0 {
            return Err(format!("n={n}: minor {} not zero", k + 1));
        }
        for (name, r) in [("v1", invert_v1(a, None)), ("v2", invert_v2(a, None))] {
            match r {
                Err(Error::ZeroPivot { step }) if step == *k => {}
                other => {
                    return Err(format!("{name} n={n}: expected ZeroPivot at {k}, got {other:?}"))
                }
            }
        }
        let robust = invert_symmetric_robust(a, None).map_err(|e| e.to_string())?;
        if robust.route != (Route::Fallback { zero_pivot_step: *k }) {
            return Err(format!("n={n}: route {:?}", robust.route));
        }
        let r = residual_frobenius(a, &robust.inverse).unwrap();
        if r > 1e-8 * frobenius_norm(a) {
            return Err(format!("n={n}: fallback residual {r:e}"));
        }
    }
    Ok(format!("{} matrices, step index and fallback correct", cases.len()))
}

fn c11() -> Outcome {
    let reports = run_experiment(2, &[100, 300, 500], &[Method::Cholesky, Method::V1, Method::V2], 42)
        .map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for chunk in reports.chunks(3) {
        let n = chunk[0].n;
        let dist = |k: usize| -> Result<f64, String> {
            let r = &chunk[k];
            if r.status != Status::Ok {
                return Err(format!("{} n={n}: {}", r.method, r.status));
            }
            Ok(r.dist2_vs_reference.unwrap())
        };
        let (chol, v1, v2) = (dist(0)?, dist(1)?, dist(2)?);
        if v1 > 5.0 * chol || v2 > 5.0 * chol {
            return Err(format!("n={n}: cholesky {chol:.2e}, v1 {v1:.2e}, v2 {v2:.2e}"));
        }
        summary.push(format!("n={n}: v1/chol {:.2}, v2/chol {:.2}", v1 / chol, v2 / chol));
    }
    Ok(summary.join("; "))
}

fn c12() -> Outcome {
    let a = dominant(1000, 42 + 1000);
    // Alternate the two methods so load drift on the machine hits both alike.
    let timing = Timing::default();
    let once = |f: &dyn Fn() -> syminv_core::Result<Matrix>| -> Result<Duration, String> {
        let start = Instant::now();
        f().map_err(|e| e.to_string())?;
        Ok(start.elapsed())
    };
    let v2_run = || invert_v2(&a, None);
    let chol_run = || invert_cholesky(&a, None);
    for _ in 0..timing.warmup {
        once(&v2_run)?;
        once(&chol_run)?;
    }
    let (mut v2, mut chol) = (Vec::new(), Vec::new());
    for _ in 0..timing.runs {
        v2.push(once(&v2_run)?);
        chol.push(once(&chol_run)?);
    }
    v2.sort_unstable();
    chol.sort_unstable();
    let (v2, chol) = (v2[v2.len() / 2], chol[chol.len() / 2]);
    let msg = format!(
        "n=1000 median of {}: v2 {:.3} s, cholesky {:.3} s",
        timing.runs,
        v2.as_secs_f64(),
        chol.as_secs_f64()
    );
    if v2 < chol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn bench_without_time() -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_syminv"))
        .args(["bench", "--experiment", "1", "--sizes", "100", "--seed", "42"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or("empty output")?.split(',').collect();
    let col = header
        .iter()
        .position(|&h| h == "seconds")
        .ok_or("no seconds column")?;
    let mut kept = vec![header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != col)
        .map(|(_, h)| *h)
        .collect::<Vec<_>>()
        .join(",")];
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(format!("unexpected row '{line}'"));
        }
        kept.push(
            fields
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != col)
                .map(|(_, f)| *f)
                .collect::<Vec<_>>()
                .join(","),
        );
    }
    Ok(kept.join("\n"))
}

fn c13() -> Outcome {
    let first = bench_without_time()?;
    let second = bench_without_time()?;
    if first != second {
        return Err("outputs differ".into());
    }
    Ok(format!("{} rows identical", first.lines().count() - 1))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "count reproduction n=100", limit: Some(secs(1)), run: c1 },
        Criterion { id: 2, name: "count reproduction n=500", limit: Some(secs(30)), run: c2 },
        Criterion { id: 3, name: "formula/counter agreement", limit: Some(secs(10)), run: c3 },
        Criterion { id: 4, name: "correctness vs cofactor oracle", limit: None, run: c4 },
        Criterion { id: 5, name: "leading-block and rank-one identities", limit: None, run: c5 },
        Criterion { id: 6, name: "production vs reference one-stage formulas", limit: None, run: c6 },
        Criterion { id: 7, name: "two-stage reconstruction identity", limit: None, run: c7 },
        Criterion { id: 8, name: "square-root freedom", limit: None, run: c8 },
        Criterion { id: 9, name: "indefinite applicability", limit: None, run: c9 },
        Criterion { id: 10, name: "zero-minor handling", limit: None, run: c10 },
        Criterion { id: 11, name: "accuracy ordering", limit: None, run: c11 },
        Criterion { id: 12, name: "speed ordering n=1000", limit: None, run: c12 },
        Criterion { id: 13, name: "bench determinism", limit: None, run: c13 },
    ];
    // libtest flags such as --nocapture or a filter are accepted and ignored.
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(msg), Some(limit)) = (&outcome, c.limit) {
            if elapsed > limit {
                outcome = Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "{tag} criterion {:>2} ({}): {} [{:.2?}]",
            c.id, c.name, detail, elapsed
        );
        if outcome.is_err() {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
