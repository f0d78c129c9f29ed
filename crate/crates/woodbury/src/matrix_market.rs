//! Matrix Market I/O.
//!
//! The writer always emits `matrix array complex general` with 17
//! significant decimal digits per component, which round-trips f64 exactly.
//! The reader additionally accepts `coordinate` format and `real`/`integer`
//! fields (promoted to complex with zero imaginary part). Array data is in
//! column-major order per the format definition.
//!
//! A `rows x 0` size line is accepted and produces an empty update panel;
//! zero rows are rejected.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
    Integer,
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    write_matrix_to(&mut w, m)?;
    w.flush()?;
    Ok(())
}

pub fn write_matrix_to(w: &mut impl Write, m: &ComplexMatrix) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix array complex general")?;
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let z = m[(i, j)];
            writeln!(w, "{:.16e} {:.16e}", z.re, z.im)?;
        }
    }
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let file = File::open(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: 0,
        msg: format!("cannot open: {e}"),
    })?;
    read_matrix_from(BufReader::new(file), &path.display().to_string())
}

pub fn read_matrix_from(reader: impl BufRead, origin: &str) -> Result<ComplexMatrix> {
    let fail = |line: usize, msg: String| Error::Parse {
        path: origin.to_string(),
        line,
        msg,
    };

    let mut lines = reader.lines().enumerate();

    // header
    let (idx, header) = match lines.next() {
        Some((idx, line)) => (idx + 1, line.map_err(Error::Io)?),
        None => return Err(fail(1, "empty file".into())),
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(fail(idx, "first line must start with %%MatrixMarket".into()));
    }
    if tokens.get(1).map(String::as_str) != Some("matrix") {
        return Err(fail(idx, "object must be 'matrix'".into()));
    }
    let format = match tokens.get(2).map(String::as_str) {
        Some("array") => Format::Array,
        Some("coordinate") => Format::Coordinate,
        other => {
            return Err(fail(
                idx,
                format!("unsupported format {:?} (expected array or coordinate)", other),
            ))
        }
    };
    let field = match tokens.get(3).map(String::as_str) {
        Some("real") => Field::Real,
        Some("complex") => Field::Complex,
        Some("integer") => Field::Integer,
        other => {
            return Err(fail(
                idx,
                format!(
                    "unsupported field {:?} (expected real, complex, or integer)",
                    other
                ),
            ))
        }
    };
    if tokens.get(4).map(String::as_str) != Some("general") {
        return Err(fail(idx, "only 'general' symmetry is supported".into()));
    }

    // size line: first non-comment, non-blank line
    let (size_idx, size_line) = next_data_line(&mut lines)?
        .ok_or_else(|| fail(0, "missing size line".into()))?;
    let dims: Vec<&str> = size_line.split_whitespace().collect();
    let expect_dims = match format {
        Format::Array => 2,
        Format::Coordinate => 3,
    };
    if dims.len() != expect_dims {
        return Err(fail(
            size_idx,
            format!("size line needs {expect_dims} integers, found {}", dims.len()),
        ));
    }
    let rows: usize = dims[0]
        .parse()
        .map_err(|_| fail(size_idx, format!("cannot parse row count '{}'", dims[0])))?;
    let cols: usize = dims[1]
        .parse()
        .map_err(|_| fail(size_idx, format!("cannot parse column count '{}'", dims[1])))?;
    if rows == 0 {
        return Err(fail(size_idx, "zero rows are not a valid matrix".into()));
    }

    let mut data = ComplexMatrix::zeros(rows, cols);
    match format {
        Format::Array => {
            let total = rows * cols;
            for t in 0..total {
                let (entry_idx, entry_line) = next_data_line(&mut lines)?
                    .ok_or_else(|| {
                        fail(0, format!("expected {total} entries, found {t}"))
                    })?;
                let value = parse_value(&entry_line, field)
                    .map_err(|msg| fail(entry_idx, msg))?;
                // column-major order
                let i = t % rows;
                let j = t / rows;
                data[(i, j)] = value;
            }
            if let Some((extra_idx, extra)) = next_data_line(&mut lines)? {
                return Err(fail(extra_idx, format!("unexpected trailing data '{extra}'")));
            }
        }
        Format::Coordinate => {
            let nnz: usize = dims[2].parse().map_err(|_| {
                fail(size_idx, format!("cannot parse entry count '{}'", dims[2]))
            })?;
            if cols == 0 && nnz > 0 {
                return Err(fail(size_idx, "entries listed for a zero-column matrix".into()));
            }
            let mut seen = vec![false; rows * cols];
            for t in 0..nnz {
                let (entry_idx, entry_line) = next_data_line(&mut lines)?
                    .ok_or_else(|| {
                        fail(0, format!("expected {nnz} entries, found {t}"))
                    })?;
                let mut parts = entry_line.split_whitespace();
                let i: usize = parts
                    .next()
                    .ok_or_else(|| fail(entry_idx, "missing row index".into()))?
                    .parse()
                    .map_err(|_| fail(entry_idx, "cannot parse row index".into()))?;
                let j: usize = parts
                    .next()
                    .ok_or_else(|| fail(entry_idx, "missing column index".into()))?
                    .parse()
                    .map_err(|_| fail(entry_idx, "cannot parse column index".into()))?;
                if i < 1 || i > rows || j < 1 || j > cols {
                    return Err(fail(
                        entry_idx,
                        format!("index ({i}, {j}) outside {rows}x{cols}"),
                    ));
                }
                let rest: String = parts.collect::<Vec<_>>().join(" ");
                let value = parse_value(&rest, field).map_err(|msg| fail(entry_idx, msg))?;
                let flat = (i - 1) * cols + (j - 1);
                if seen[flat] {
                    return Err(fail(entry_idx, format!("duplicate entry at ({i}, {j})")));
                }
                seen[flat] = true;
                data[(i - 1, j - 1)] = value;
            }
            if let Some((extra_idx, extra)) = next_data_line(&mut lines)? {
                return Err(fail(extra_idx, format!("unexpected trailing data '{extra}'")));
            }
        }
    }

    if cols == 0 {
        return Ok(ComplexMatrix::empty_cols(rows));
    }
    // route through the validated constructor to reject non-finite entries
    ComplexMatrix::new(rows, cols, data.entries().to_vec()).map_err(|e| Error::Parse {
        path: origin.to_string(),
        line: 0,
        msg: e.to_string(),
    })
}

fn next_data_line(
    lines: &mut impl Iterator<Item = (usize, std::io::Result<String>)>,
) -> Result<Option<(usize, String)>> {
    for (idx, line) in lines {
        let line = line.map_err(Error::Io)?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        return Ok(Some((idx + 1, trimmed.to_string())));
    }
    Ok(None)
}

fn parse_value(text: &str, field: Field) -> std::result::Result<Complex64, String> {
    let mut parts = text.split_whitespace();
    let re: f64 = parts
        .next()
        .ok_or_else(|| "missing value".to_string())?
        .parse()
        .map_err(|_| format!("cannot parse real part in '{text}'"))?;
    let im: f64 = match field {
        Field::Complex => parts
            .next()
            .ok_or_else(|| "missing imaginary part".to_string())?
            .parse()
            .map_err(|_| format!("cannot parse imaginary part in '{text}'"))?,
        Field::Real | Field::Integer => 0.0,
    };
    if parts.next().is_some() {
        return Err(format!("unexpected extra tokens in '{text}'"));
    }
    if !re.is_finite() || !im.is_finite() {
        return Err("non-finite entry".to_string());
    }
    Ok(Complex64::new(re, im))
}
