//! Closed-form operation counts, evaluated exactly in integers.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountMethod {
    Cholesky,
    Ldl,
    Km,
    V1,
    V1Stage1,
    V1Stage2,
    V2,
    ModgaussFull,
    /// Elimination with the trailing `p` variables required, excluding the
    /// final `n·p` products that read the solution off.
    ModgaussP,
}

impl CountMethod {
    pub const ALL: [CountMethod; 9] = [
        CountMethod::Cholesky,
        CountMethod::Ldl,
        CountMethod::Km,
        CountMethod::V1,
        CountMethod::V1Stage1,
        CountMethod::V1Stage2,
        CountMethod::V2,
        CountMethod::ModgaussFull,
        CountMethod::ModgaussP,
    ];

    /// The five inversion methods in table order.
    pub const TABLE: [CountMethod; 5] = [
        CountMethod::Cholesky,
        CountMethod::Ldl,
        CountMethod::Km,
        CountMethod::V1,
        CountMethod::V2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CountMethod::Cholesky => "cholesky",
            CountMethod::Ldl => "ldl",
            CountMethod::Km => "km",
            CountMethod::V1 => "v1",
            CountMethod::V1Stage1 => "v1_stage1",
            CountMethod::V1Stage2 => "v1_stage2",
            CountMethod::V2 => "v2",
            CountMethod::ModgaussFull => "modgauss_full",
            CountMethod::ModgaussP => "modgauss_p",
        }
    }

    /// Closed form for the multiplication/division count, as printed.
    pub fn muldiv_formula(self) -> &'static str {
        match self {
            CountMethod::Cholesky => "n^3/2 + 3n^2/2",
            CountMethod::Ldl => "2n^3/3 + n^2/2 - n/6",
            CountMethod::Km | CountMethod::V2 => "n^3/2 + n^2/2",
            CountMethod::V1 => "n^3/2 + n^2 - n/2",
            CountMethod::V1Stage1 => "n^3/3 + n^2/2 + n/6",
            CountMethod::V1Stage2 => "n^3/6 + n^2/2 - 2n/3",
            CountMethod::ModgaussFull => "n^3",
            CountMethod::ModgaussP => {
                "n^3/3 + n^2/2 + n/6 + p^2 n - pn - p^3/3 + p^2/2 - p/6"
            }
        }
    }

    pub fn sqrt_formula(self) -> &'static str {
        match self {
            CountMethod::Cholesky | CountMethod::Km => "n",
            _ => "0",
        }
    }
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CountMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CountMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown count method '{s}'")))
    }
}

fn exact(num: i128, den: i128) -> u64 {
    assert!(num >= 0 && num % den == 0, "{num}/{den} is not a nonnegative integer");
    u64::try_from(num / den).expect("count overflows u64")
}

/// Multiplications plus divisions. `p` must be given exactly when `method`
/// is [`CountMethod::ModgaussP`], with `0 ≤ p ≤ n`.
pub fn q_theor(method: CountMethod, n: usize, p: Option<usize>) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("order n must be at least 1".into()));
    }
    let k = n as i128;
    let (k2, k3) = (k * k, k * k * k);
    let q = match (method, p) {
        (CountMethod::ModgaussP, Some(p)) => {
            if p > n {
                return Err(Error::InvalidArgument(format!(
                    "required count p = {p} exceeds n = {n}"
                )));
            }
            let p = p as i128;
            exact(
                2 * k3 + 3 * k2 + k + 6 * p * p * k - 6 * p * k - 2 * p * p * p + 3 * p * p - p,
                6,
            )
        }
        (CountMethod::ModgaussP, None) => {
            return Err(Error::InvalidArgument(
                "modgauss_p needs a required count p".into(),
            ))
        }
        (m, Some(_)) => {
            return Err(Error::InvalidArgument(format!(
                "p applies only to modgauss_p, not {m}"
            )))
        }
        (CountMethod::Cholesky, None) => exact(3 * k3 + 9 * k2, 6),
        (CountMethod::Ldl, None) => exact(4 * k3 + 3 * k2 - k, 6),
        (CountMethod::Km | CountMethod::V2, None) => exact(3 * k3 + 3 * k2, 6),
        (CountMethod::V1, None) => exact(3 * k3 + 6 * k2 - 3 * k, 6),
        (CountMethod::V1Stage1, None) => exact(2 * k3 + 3 * k2 + k, 6),
        (CountMethod::V1Stage2, None) => exact(k3 + 3 * k2 - 4 * k, 6),
        (CountMethod::ModgaussFull, None) => exact(k3, 1),
    };
    Ok(q)
}

/// Square-root evaluations.
pub fn s_theor(method: CountMethod, n: usize) -> u64 {
    match method {
        CountMethod::Cholesky | CountMethod::Km => n as u64,
        _ => 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRow {
    pub method: CountMethod,
    pub muldiv_formula: &'static str,
    pub sqrt_formula: &'static str,
    pub muldiv: u64,
    pub sqrt: u64,
}

/// The five-method summary instantiated at order `n`.
pub fn count_table(n: usize) -> Result<Vec<CountRow>> {
    CountMethod::TABLE
        .into_iter()
        .map(|m| {
            Ok(CountRow {
                method: m,
                muldiv_formula: m.muldiv_formula(),
                sqrt_formula: m.sqrt_formula(),
                muldiv: q_theor(m, n, None)?,
                sqrt: s_theor(m, n),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use CountMethod::*;

    #[test]
    fn table_values() {
        let at = |m, n| q_theor(m, n, None).unwrap();
        assert_eq!(at(V2, 100), 505_000);
        assert_eq!(at(Cholesky, 500), 62_875_000);
        assert_eq!(at(V1, 1), 1);
        let n100: Vec<u64> = CountMethod::TABLE.iter().map(|&m| at(m, 100)).collect();
        assert_eq!(n100, [515_000, 671_650, 505_000, 509_950, 505_000]);
        let n500: Vec<u64> = CountMethod::TABLE.iter().map(|&m| at(m, 500)).collect();
        assert_eq!(n500, [62_875_000, 83_458_250, 62_625_000, 62_749_750, 62_625_000]);
        assert_eq!(s_theor(Km, 100), 100);
        assert_eq!(s_theor(V1, 500), 0);
        assert_eq!(s_theor(Ldl, 1), 0);
    }

    #[test]
    fn stage_additivity() {
        for n in 1..=200 {
            let s1 = q_theor(V1Stage1, n, None).unwrap();
            let s2 = q_theor(V1Stage2, n, None).unwrap();
            assert_eq!(s1 + s2, q_theor(V1, n, None).unwrap());
        }
    }

    #[test]
    fn dominance_ordering() {
        for n in 3..=300 {
            let q = |m| q_theor(m, n, None).unwrap();
            assert_eq!(q(V2), q(Km));
            assert!(q(Km) < q(V1) && q(V1) < q(Cholesky) && q(V1) < q(Ldl));
            // Cholesky < LDL iff n^2 - 6n - 1 > 0
            assert_eq!(q(Cholesky) < q(Ldl), n >= 7, "n = {n}");
        }
        assert_eq!((q_theor(Cholesky, 3, None).unwrap(), q_theor(Ldl, 3, None).unwrap()), (27, 22));
    }

    #[test]
    fn general_p_endpoints() {
        for n in 1..=50 {
            let full = q_theor(ModgaussP, n, Some(n)).unwrap();
            assert_eq!(full, q_theor(ModgaussFull, n, None).unwrap());
            let one = q_theor(ModgaussP, n, Some(1)).unwrap();
            assert_eq!(one, q_theor(V1Stage1, n, None).unwrap());
        }
        assert_eq!(q_theor(ModgaussP, 100, Some(1)).unwrap(), 338_350);
    }

    #[test]
    fn argument_errors() {
        assert!(q_theor(ModgaussP, 5, Some(6)).is_err());
        assert!(q_theor(ModgaussP, 5, None).is_err());
        assert!(q_theor(V2, 5, Some(1)).is_err());
        assert!(q_theor(V2, 0, None).is_err());
        assert_eq!("v1_stage2".parse::<CountMethod>().unwrap(), V1Stage2);
        assert!("qr".parse::<CountMethod>().is_err());
    }

    #[test]
    fn table_rows() {
        let t = count_table(10).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t[0].method, Cholesky);
        assert_eq!((t[0].muldiv, t[0].sqrt), (650, 10));
    }
}
