//! Matrix Market and CSV reading/writing.
//!
//! Matrix Market support covers `matrix coordinate|array real|integer
//! general|symmetric`. Output always carries 17 significant digits, enough to
//! round-trip any `f64`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const BANNER: &str = "%%MatrixMarket";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

/// Parse a Matrix Market stream into a dense square matrix.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<Matrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (lineno, header) = match lines.next() {
        Some((i, l)) => (i, l?),
        None => return Err(parse_err(1, "empty input")),
    };
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || !fields[0].eq_ignore_ascii_case(BANNER) || fields[1] != "matrix" {
        return Err(parse_err(lineno, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let layout = match fields[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_err(lineno, format!("unsupported format '{other}'"))),
    };
    if !matches!(fields[3].as_str(), "real" | "integer" | "double") {
        return Err(parse_err(lineno, format!("unsupported field '{}'", fields[3])));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(lineno, format!("unsupported symmetry '{other}'"))),
    };

    let mut body = lines.filter_map(|(i, l)| match l {
        Ok(s) => {
            let t = s.trim();
            if t.is_empty() || t.starts_with('%') {
                None
            } else {
                Some(Ok((i, t.to_owned())))
            }
        }
        Err(e) => Some(Err(e)),
    });

    let (size_line, size) = body
        .next()
        .ok_or_else(|| parse_err(lineno + 1, "missing size line"))??;
    let dims = parse_usizes(&size, size_line)?;
    let (rows, cols) = match dims.as_slice() {
        [r, c] if layout == Layout::Array => (*r, *c),
        [r, c, _] if layout == Layout::Coordinate => (*r, *c),
        _ => return Err(parse_err(size_line, "malformed size line")),
    };
    if rows != cols {
        return Err(Error::DimensionMismatch {
            expected: rows,
            found: cols,
        });
    }
    if rows == 0 {
        return Err(Error::Empty);
    }
    let n = rows;
    let mut data = vec![0.0; n * n];

    match layout {
        Layout::Coordinate => {
            let nnz = dims[2];
            let mut seen = 0usize;
            for item in body {
                let (i, line) = item?;
                let mut it = line.split_whitespace();
                let (r, c, v) = match (it.next(), it.next(), it.next(), it.next()) {
                    (Some(r), Some(c), Some(v), None) => (r, c, v),
                    _ => return Err(parse_err(i, "expected 'row col value'")),
                };
                let r = parse_index(r, n, i)?;
                let c = parse_index(c, n, i)?;
                let v = parse_value(v, i)?;
                if symmetric && c > r {
                    return Err(parse_err(i, "symmetric storage must list the lower triangle"));
                }
                data[r * n + c] = v;
                if symmetric {
                    data[c * n + r] = v;
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(size_line, format!("declared {nnz} entries, found {seen}")));
            }
        }
        Layout::Array => {
            // Column-major; symmetric stores only the lower triangle.
            let slots: Vec<(usize, usize)> = (0..n)
                .flat_map(|c| {
                    let start = if symmetric { c } else { 0 };
                    (start..n).map(move |r| (r, c))
                })
                .collect();
            let mut next = slots.iter();
            for item in body {
                let (i, line) = item?;
                for tok in line.split_whitespace() {
                    let &(r, c) = next
                        .next()
                        .ok_or_else(|| parse_err(i, "more values than the declared size"))?;
                    let v = parse_value(tok, i)?;
                    data[r * n + c] = v;
                    data[c * n + r] = if symmetric { v } else { data[c * n + r] };
                }
            }
            if next.next().is_some() {
                return Err(parse_err(size_line, "fewer values than the declared size"));
            }
        }
    }
    Matrix::from_vec(n, data)
}

fn parse_usizes(s: &str, line: usize) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(line, format!("bad integer '{t}'"))))
        .collect()
}

fn parse_index(tok: &str, n: usize, line: usize) -> Result<usize> {
    let k: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad index '{tok}'")))?;
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    Ok(k - 1)
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad number '{tok}'")))
}

/// Write `m` as a dense `array real general` Matrix Market file.
pub fn write_matrix_market<W: Write>(m: &Matrix, mut w: W) -> Result<()> {
    let n = m.n();
    writeln!(w, "{BANNER} matrix array real general")?;
    writeln!(w, "{n} {n}")?;
    for c in 0..n {
        for r in 0..n {
            writeln!(w, "{}", fmt_f64(m[(r, c)]))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read `n` lines of `n` comma-separated numbers.
pub fn read_csv<R: Read>(reader: R) -> Result<Matrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(rows.len() + 1, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|t| parse_value(t, line))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    Matrix::from_rows(&rows)
}

/// Write `m` as `n` lines of `n` comma-separated numbers.
pub fn write_csv<W: Write>(m: &Matrix, w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for i in 0..m.n() {
        wtr.write_record(m.row(i).iter().map(|&v| fmt_f64(v)))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Read a matrix file, choosing the format from its first bytes: a
/// `%%MatrixMarket` banner selects Matrix Market, anything else is CSV.
pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let mut reader = BufReader::new(File::open(path)?);
    let is_mm = reader.fill_buf()?.starts_with(BANNER.as_bytes());
    if is_mm {
        read_matrix_market(reader)
    } else {
        read_csv(reader)
    }
}

/// Write a matrix file; `.mtx` and `.mm` extensions get Matrix Market,
/// everything else CSV.
pub fn write_matrix(m: &Matrix, path: &Path) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("mtx") || ext.eq_ignore_ascii_case("mm") => {
            write_matrix_market(m, w)
        }
        _ => write_csv(m, w),
    }
}
