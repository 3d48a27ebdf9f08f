//! Matrix Market "array" readers and writers for dense operators and bases.
//!
//! Only the `array real general` and `array complex general` flavours are
//! supported, with strict parsing: dimension mismatches, short files, and
//! trailing data are all rejected.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{ComplexOperator, RealOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

struct ArrayHeader {
    field: Field,
    rows: usize,
    cols: usize,
    /// line number where data starts
    data_line: usize,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(lines: &[&str]) -> Result<ArrayHeader> {
    let banner = lines.first().ok_or_else(|| parse_err(1, "empty file"))?;
    let tokens: Vec<String> = banner.split_whitespace().map(|t| t.to_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix array <field> general'"));
    }
    if tokens[2] != "array" {
        return Err(parse_err(1, format!("unsupported format '{}', only 'array'", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(parse_err(1, format!("unsupported field '{other}'"))),
    };
    if tokens[4] != "general" {
        return Err(parse_err(1, format!("unsupported symmetry '{}', only 'general'", tokens[4])));
    }

    // skip comment lines
    let mut idx = 1;
    while idx < lines.len() && lines[idx].trim_start().starts_with('%') {
        idx += 1;
    }
    let size_line = lines
        .get(idx)
        .ok_or_else(|| parse_err(idx + 1, "missing size line"))?;
    let dims: Vec<&str> = size_line.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_err(idx + 1, "size line must be '<rows> <cols>'"));
    }
    let rows: usize = dims[0]
        .parse()
        .map_err(|_| parse_err(idx + 1, format!("bad row count '{}'", dims[0])))?;
    let cols: usize = dims[1]
        .parse()
        .map_err(|_| parse_err(idx + 1, format!("bad column count '{}'", dims[1])))?;
    if rows == 0 || cols == 0 {
        return Err(parse_err(idx + 1, "dimensions must be positive"));
    }
    Ok(ArrayHeader {
        field,
        rows,
        cols,
        data_line: idx + 1,
    })
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad number '{tok}'")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

/// Reads a real `array` file as (rows, cols, column-major data).
pub fn read_real_array(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    let lines: Vec<&str> = text.lines().collect();
    let header = parse_header(&lines)?;
    if header.field != Field::Real {
        return Err(parse_err(1, "expected a real matrix, found complex"));
    }
    let expected = header.rows * header.cols;
    let mut data = Vec::with_capacity(expected);
    for (off, raw) in lines[header.data_line..].iter().enumerate() {
        let line_no = header.data_line + off + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 1 {
            return Err(parse_err(line_no, "real array entries are one value per line"));
        }
        if data.len() == expected {
            return Err(parse_err(line_no, "more entries than the size line declares"));
        }
        data.push(parse_f64(toks[0], line_no)?);
    }
    if data.len() != expected {
        return Err(parse_err(
            lines.len(),
            format!("expected {} entries, found {}", expected, data.len()),
        ));
    }
    Ok((header.rows, header.cols, data))
}

/// Reads a complex `array` file as (rows, cols, column-major data).
pub fn read_complex_array(path: &Path) -> Result<(usize, usize, Vec<Complex64>)> {
    let text = fs::read_to_string(path)?;
    let lines: Vec<&str> = text.lines().collect();
    let header = parse_header(&lines)?;
    if header.field != Field::Complex {
        return Err(parse_err(1, "expected a complex matrix, found real"));
    }
    let expected = header.rows * header.cols;
    let mut data = Vec::with_capacity(expected);
    for (off, raw) in lines[header.data_line..].iter().enumerate() {
        let line_no = header.data_line + off + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(line_no, "complex array entries are 're im' per line"));
        }
        if data.len() == expected {
            return Err(parse_err(line_no, "more entries than the size line declares"));
        }
        let re = parse_f64(toks[0], line_no)?;
        let im = parse_f64(toks[1], line_no)?;
        data.push(Complex64::new(re, im));
    }
    if data.len() != expected {
        return Err(parse_err(
            lines.len(),
            format!("expected {} entries, found {}", expected, data.len()),
        ));
    }
    Ok((header.rows, header.cols, data))
}

/// Reads a square real operator.
pub fn read_real_operator(path: &Path) -> Result<RealOperator> {
    let (rows, cols, col_major) = read_real_array(path)?;
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    let mut row_major = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            row_major[i * n + j] = col_major[j * n + i];
        }
    }
    RealOperator::from_row_major(n, row_major)
}

/// Reads a square complex operator.
pub fn read_complex_operator(path: &Path) -> Result<ComplexOperator> {
    let (rows, cols, col_major) = read_complex_array(path)?;
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    let mut row_major = vec![Complex64::ZERO; n * n];
    for j in 0..n {
        for i in 0..n {
            row_major[i * n + j] = col_major[j * n + i];
        }
    }
    ComplexOperator::from_row_major(n, row_major)
}

/// Writes a real array (column-major input) with shortest round-trip floats.
pub fn write_real_array(path: &Path, rows: usize, cols: usize, col_major: &[f64]) -> Result<()> {
    assert_eq!(col_major.len(), rows * cols);
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{rows} {cols}");
    for v in col_major {
        let _ = writeln!(out, "{v:e}");
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_complex_array(path: &Path, rows: usize, cols: usize, col_major: &[Complex64]) -> Result<()> {
    assert_eq!(col_major.len(), rows * cols);
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array complex general\n");
    let _ = writeln!(out, "{rows} {cols}");
    for z in col_major {
        let _ = writeln!(out, "{:e} {:e}", z.re, z.im);
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_real_operator(path: &Path, m: &RealOperator) -> Result<()> {
    let n = m.dim();
    let mut col_major = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            col_major[j * n + i] = m.get(i, j);
        }
    }
    write_real_array(path, n, n, &col_major)
}

pub fn write_complex_operator(path: &Path, m: &ComplexOperator) -> Result<()> {
    let n = m.dim();
    let mut col_major = vec![Complex64::ZERO; n * n];
    for j in 0..n {
        for i in 0..n {
            col_major[j * n + i] = m.get(i, j);
        }
    }
    write_complex_array(path, n, n, &col_major)
}
