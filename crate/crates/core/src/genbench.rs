//! Test-matrix families and the benchmark harness.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baselines::{self, ldl_factor};
use crate::complexity::{q_theor, s_theor, CountMethod};
use crate::count::OpCounter;
use crate::error::{Error, Result};
use crate::matrix::{norm2_estimate, residual_frobenius, Matrix, DEFAULT_POWER_ITERS};
use crate::{modgauss, syminv};

/// Reseed budget for families defined by rejection.
pub const MAX_ATTEMPTS: u32 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// Symmetric, `a_ii > Σ_{j≠i} |a_ij|`, positive diagonal (hence SPD).
    DiagDominant,
    /// Symmetric with every entry uniform in `[-1, 1]`; nonzero leading
    /// minors so the symmetric variants run without pivoting.
    NonDominant,
    /// Symmetric, nonsingular, `a_11 = 0`.
    ZeroLeadingMinor,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::DiagDominant => "diag_dominant",
            FamilyKind::NonDominant => "non_dominant",
            FamilyKind::ZeroLeadingMinor => "zero_leading_minor",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            FamilyKind::DiagDominant,
            FamilyKind::NonDominant,
            FamilyKind::ZeroLeadingMinor,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown matrix family '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatrixFamily {
    pub kind: FamilyKind,
    pub n: usize,
    pub seed: u64,
}

impl MatrixFamily {
    pub fn new(kind: FamilyKind, n: usize, seed: u64) -> Self {
        MatrixFamily { kind, n, seed }
    }
}

fn symmetric_uniform(rng: &mut ChaCha8Rng, n: usize, with_diag: bool) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        let start = if with_diag { i } else { i + 1 };
        for j in start..n {
            let v = rng.random_range(-1.0..=1.0);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    a
}

fn off_diag_abs_sum(a: &[f64], n: usize, i: usize) -> f64 {
    (0..n).filter(|&j| j != i).map(|j| a[i * n + j].abs()).sum()
}

fn dominant(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut a = symmetric_uniform(rng, n, false);
    for i in 0..n {
        a[i * n + i] = off_diag_abs_sum(&a, n, i) + rng.random_range(1.0..=2.0);
    }
    a
}

fn violates_dominance(a: &[f64], n: usize) -> bool {
    n == 1 || (0..n).any(|i| a[i * n + i].abs() <= off_diag_abs_sum(a, n, i))
}

/// Build the matrix described by `family`. Deterministic in
/// `(kind, n, seed)`.
pub fn generate(family: &MatrixFamily) -> Result<Matrix> {
    let n = family.n;
    if n == 0 {
        return Err(Error::Empty);
    }
    match family.kind {
        FamilyKind::DiagDominant => {
            let mut rng = ChaCha8Rng::seed_from_u64(family.seed);
            Matrix::from_vec(n, dominant(&mut rng, n))
        }
        FamilyKind::NonDominant => {
            for attempt in 0..MAX_ATTEMPTS {
                let seed = family.seed.wrapping_add(attempt as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let data = symmetric_uniform(&mut rng, n, true);
                if !violates_dominance(&data, n) {
                    continue;
                }
                let a = Matrix::from_vec(n, data)?;
                if ldl_factor(&a, None).is_ok() {
                    return Ok(a);
                }
            }
            Err(Error::GenerationFailed {
                attempts: MAX_ATTEMPTS,
            })
        }
        FamilyKind::ZeroLeadingMinor => {
            if n < 2 {
                return Err(Error::InvalidArgument(
                    "zero_leading_minor needs n >= 2".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(family.seed);
            let mut a = dominant(&mut rng, n);
            // [[0, s], [s, 0]] on top: swapping the first two rows gives a
            // strictly dominant, hence nonsingular, matrix.
            let rest = |a: &[f64], i: usize| (2..n).map(|j| a[i * n + j].abs()).sum::<f64>();
            let s = rest(&a, 0).max(rest(&a, 1)) + rng.random_range(1.0..=2.0);
            a[0] = 0.0;
            a[n + 1] = 0.0;
            a[1] = s;
            a[n] = s;
            Matrix::from_vec(n, a)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Cholesky,
    Ldl,
    Km,
    V1,
    V2,
    Gauss,
}

impl Method {
    /// What `all` expands to, in table order.
    pub const TABLE: [Method; 5] = [
        Method::Cholesky,
        Method::Ldl,
        Method::Km,
        Method::V1,
        Method::V2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cholesky => "cholesky",
            Method::Ldl => "ldl",
            Method::Km => "km",
            Method::V1 => "v1",
            Method::V2 => "v2",
            Method::Gauss => "gauss",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Cholesky => "Cholesky decomposition",
            Method::Ldl => "LDL decomposition",
            Method::Km => "Krishnamoorthy-Menon",
            Method::V1 => "Two-stage symmetric elimination",
            Method::V2 => "One-stage symmetric elimination",
            Method::Gauss => "Modified Gaussian elimination",
        }
    }

    pub fn count_method(self) -> CountMethod {
        match self {
            Method::Cholesky => CountMethod::Cholesky,
            Method::Ldl => CountMethod::Ldl,
            Method::Km => CountMethod::Km,
            Method::V1 => CountMethod::V1,
            Method::V2 => CountMethod::V2,
            Method::Gauss => CountMethod::ModgaussFull,
        }
    }

    /// Only the Cholesky-based methods need positive definiteness.
    pub fn needs_spd(self) -> bool {
        matches!(self, Method::Cholesky | Method::Km)
    }

    pub fn invert(self, a: &Matrix, counter: Option<&mut OpCounter>) -> Result<Matrix> {
        match self {
            Method::Cholesky => baselines::invert_cholesky(a, counter),
            Method::Ldl => baselines::invert_ldl(a, counter),
            Method::Km => baselines::invert_km(a, counter),
            Method::V1 => syminv::invert_v1(a, counter),
            Method::V2 => syminv::invert_v2(a, counter),
            Method::Gauss => modgauss::invert(a, counter),
        }
    }

    /// Parse `all` or a comma-separated list of method names.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        if s.trim() == "all" {
            return Ok(Method::TABLE.to_vec());
        }
        let methods = s
            .split(',')
            .map(|t| t.trim().parse())
            .collect::<Result<Vec<Method>>>()?;
        if methods.is_empty() {
            return Err(Error::InvalidArgument("no methods given".into()));
        }
        Ok(methods)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Method::Cholesky,
            Method::Ldl,
            Method::Km,
            Method::V1,
            Method::V2,
            Method::Gauss,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown method '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Ok,
    /// The method does not apply to this input (Cholesky on an indefinite
    /// matrix).
    Inapplicable(String),
    Failed(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Ok => f.write_str("ok"),
            Status::Inapplicable(why) => write!(f, "inapplicable: {why}"),
            Status::Failed(why) => write!(f, "failed: {why}"),
        }
    }
}

/// One method on one matrix. Measured fields are `None` when the method did
/// not produce an inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct InversionReport {
    pub method: Method,
    pub n: usize,
    pub family: MatrixFamily,
    pub q_theor: u64,
    pub q_pract: Option<u64>,
    pub s_theor: u64,
    pub s_pract: Option<u64>,
    /// `‖A·Â⁻¹ − I‖_F`.
    pub residual_fro: Option<f64>,
    /// Spectral-norm estimate of `Â⁻¹ − R` for the reference inverse `R`.
    pub dist2_vs_reference: Option<f64>,
    pub elapsed_seconds: Option<f64>,
    pub status: Status,
}

impl InversionReport {
    pub fn counts_match(&self) -> bool {
        self.q_pract == Some(self.q_theor) && self.s_pract == Some(self.s_theor)
    }
}

/// Timing repetitions: `warmup` discarded runs, then the median of `runs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Timing {
    pub warmup: usize,
    pub runs: usize,
}

impl Default for Timing {
    fn default() -> Self {
        Timing { warmup: 1, runs: 5 }
    }
}

/// Median wall time of `f` over `timing.runs` runs. Stops at the first error.
pub fn time_median<T>(timing: Timing, mut f: impl FnMut() -> Result<T>) -> Result<Duration> {
    for _ in 0..timing.warmup {
        f()?;
    }
    let mut samples = Vec::with_capacity(timing.runs.max(1));
    for _ in 0..timing.runs.max(1) {
        let start = Instant::now();
        let out = f()?;
        samples.push(start.elapsed());
        drop(out);
    }
    samples.sort_unstable();
    Ok(samples[samples.len() / 2])
}

fn family_for(exp_id: u32, n: usize, seed: u64) -> Result<MatrixFamily> {
    let kind = match exp_id {
        1 | 2 => FamilyKind::DiagDominant,
        3 => FamilyKind::NonDominant,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "experiment must be 1, 2 or 3, got {exp_id}"
            )))
        }
    };
    Ok(MatrixFamily::new(kind, n, seed.wrapping_add(n as u64)))
}

/// Run one method on one matrix and fill in a report.
pub fn measure(
    method: Method,
    a: &Matrix,
    family: MatrixFamily,
    reference: &Matrix,
    timing: Option<Timing>,
) -> InversionReport {
    let n = a.n();
    let cm = method.count_method();
    let mut report = InversionReport {
        method,
        n,
        family,
        q_theor: q_theor(cm, n, None).expect("n >= 1"),
        q_pract: None,
        s_theor: s_theor(cm, n),
        s_pract: None,
        residual_fro: None,
        dist2_vs_reference: None,
        elapsed_seconds: None,
        status: Status::Ok,
    };
    let mut counter = OpCounter::new();
    let inverse = match method.invert(a, Some(&mut counter)) {
        Ok(x) => x,
        Err(e @ Error::NotPositiveDefinite { .. }) if method.needs_spd() => {
            report.status = Status::Inapplicable(e.to_string());
            return report;
        }
        Err(e) => {
            report.status = Status::Failed(e.to_string());
            return report;
        }
    };
    report.q_pract = Some(counter.muldiv);
    report.s_pract = Some(counter.sqrt);
    report.residual_fro = residual_frobenius(a, &inverse).ok();
    report.dist2_vs_reference = inverse
        .sub(reference)
        .ok()
        .map(|d| norm2_estimate(&d, DEFAULT_POWER_ITERS).spectral);
    if let Some(t) = timing {
        match time_median(t, || method.invert(a, None)) {
            Ok(d) => report.elapsed_seconds = Some(d.as_secs_f64()),
            Err(e) => report.status = Status::Failed(e.to_string()),
        }
    }
    report
}

/// Run an experiment over `sizes` and `methods`.
///
/// 1: operation counts on diagonally dominant matrices; 2: time and accuracy
/// on the same family; 3: time and accuracy on non-dominant matrices. The
/// matrix for order `n` uses seed `seed + n`. The reference inverse is
/// permuting general elimination.
pub fn run_experiment(
    exp_id: u32,
    sizes: &[usize],
    methods: &[Method],
    seed: u64,
) -> Result<Vec<InversionReport>> {
    run_experiment_with(exp_id, sizes, methods, seed, Timing::default())
}

pub fn run_experiment_with(
    exp_id: u32,
    sizes: &[usize],
    methods: &[Method],
    seed: u64,
    timing: Timing,
) -> Result<Vec<InversionReport>> {
    if sizes.is_empty() {
        return Err(Error::InvalidArgument("no sizes given".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidArgument("no methods given".into()));
    }
    if let Some(&bad) = sizes.iter().find(|&&n| n == 0) {
        return Err(Error::InvalidArgument(format!("matrix order {bad} must be positive")));
    }
    let mut reports = Vec::with_capacity(sizes.len() * methods.len());
    for &n in sizes {
        let family = family_for(exp_id, n, seed)?;
        let a = generate(&family)?;
        let reference = modgauss::invert(&a, None)?;
        for &m in methods {
            reports.push(measure(m, &a, family, &reference, Some(timing)));
        }
    }
    Ok(reports)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "" => Err(Error::InvalidArgument("report format must not be empty".into())),
            other => Err(Error::InvalidArgument(format!("unknown report format '{other}'"))),
        }
    }
}

pub const REPORT_COLUMNS: [&str; 11] = [
    "method",
    "n",
    "family",
    "q_theor",
    "q_pract",
    "s_theor",
    "s_pract",
    "residual_fro",
    "dist2",
    "seconds",
    "status",
];

fn opt_int(v: Option<u64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn opt_sci(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6e}"))
}

fn opt_secs(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6}"))
}

fn report_fields(r: &InversionReport) -> [String; 11] {
    [
        r.method.name().to_owned(),
        r.n.to_string(),
        r.family.kind.name().to_owned(),
        r.q_theor.to_string(),
        opt_int(r.q_pract),
        r.s_theor.to_string(),
        opt_int(r.s_pract),
        opt_sci(r.residual_fro),
        opt_sci(r.dist2_vs_reference),
        opt_secs(r.elapsed_seconds),
        r.status.to_string(),
    ]
}

/// Render reports as `csv` or `markdown`.
pub fn emit_report(reports: &[InversionReport], format: &str) -> Result<String> {
    let format: ReportFormat = format.parse()?;
    if reports.is_empty() {
        return Err(Error::InvalidArgument("no reports to emit".into()));
    }
    match format {
        ReportFormat::Csv => emit_csv(reports),
        ReportFormat::Markdown => Ok(emit_markdown(reports)),
    }
}

fn emit_csv(reports: &[InversionReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_COLUMNS)?;
    for r in reports {
        w.write_record(report_fields(r))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn emit_markdown(reports: &[InversionReport]) -> String {
    let mut out = String::new();
    let mut groups: Vec<(MatrixFamily, Vec<&InversionReport>)> = Vec::new();
    for r in reports {
        match groups.iter_mut().find(|(f, _)| *f == r.family) {
            Some((_, g)) => g.push(r),
            None => groups.push((r.family, vec![r])),
        }
    }
    for (family, rows) in groups {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&format!(
            "### n = {} ({}, seed {})\n\n",
            family.n, family.kind, family.seed
        ));
        out.push_str("| Method | q_theor | q_pract | s_theor | s_pract | residual_fro | dist2 | seconds | status |\n");
        out.push_str("|---|---:|---:|---:|---:|---:|---:|---:|---|\n");
        for r in rows {
            let f = report_fields(r);
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} |\n",
                r.method.label(),
                f[3],
                f[4],
                f[5],
                f[6],
                f[7],
                f[8],
                f[9],
                f[10]
            ));
        }
    }
    out
}
