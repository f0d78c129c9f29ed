//! Dense complex matrices in row-major storage.
//!
//! `ComplexMatrix` is an immutable-after-construction value type: every
//! operation returns a fresh matrix, so values can be shared freely across
//! threads. Validated construction (`new`, `from_rows`) rejects zero
//! dimensions and non-finite entries. Zero-column matrices (the "no update"
//! convention for an empty update panel) are created through
//! [`ComplexMatrix::empty_cols`] and flow through the arithmetic naturally:
//! a product over an empty inner dimension is a zero matrix.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Validated constructor: `rows >= 1`, `cols >= 1`, `data` in row-major
    /// order with all entries finite.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "zero dimension: {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "entry count {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at flat index {idx}"
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    /// Real-valued convenience constructor for tests and curated data.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let lifted: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&lifted)
    }

    /// Unchecked zero matrix; tolerates zero dimensions for internal use
    /// (empty update panels, 0x0 capacitance blocks).
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// The `rows x 0` matrix: an update panel with no columns (r = 0).
    pub fn empty_cols(rows: usize) -> Self {
        Self::zeros(rows, 0)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        if rhs.cols == 0 || self.rows == 0 {
            return out;
        }
        for i in 0..self.rows {
            let arow = self.row(i);
            let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &aik) in arow.iter().enumerate() {
                let brow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> ComplexMatrix {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Complex64::conj).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `||self - other||_F / max(1, ||other||_F)`; the relative-difference
    /// convention used by every tolerance in this crate.
    pub fn rel_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "rel_diff shape mismatch");
        self.sub(other).frobenius_norm() / other.frobenius_norm().max(1.0)
    }

    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> ComplexMatrix {
        assert!(row0 + rows <= self.rows && col0 + cols <= self.cols);
        ComplexMatrix::from_fn(rows, cols, |i, j| self[(row0 + i, col0 + j)])
    }

    /// Assemble a 2x2 block matrix `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(
        tl: &ComplexMatrix,
        tr: &ComplexMatrix,
        bl: &ComplexMatrix,
        br: &ComplexMatrix,
    ) -> ComplexMatrix {
        assert_eq!(tl.rows, tr.rows);
        assert_eq!(bl.rows, br.rows);
        assert_eq!(tl.cols, bl.cols);
        assert_eq!(tr.cols, br.cols);
        let mut out = ComplexMatrix::zeros(tl.rows + bl.rows, tl.cols + tr.cols);
        for i in 0..tl.rows {
            for j in 0..tl.cols {
                out[(i, j)] = tl[(i, j)];
            }
            for j in 0..tr.cols {
                out[(i, tl.cols + j)] = tr[(i, j)];
            }
        }
        for i in 0..bl.rows {
            for j in 0..bl.cols {
                out[(tl.rows + i, j)] = bl[(i, j)];
            }
            for j in 0..br.cols {
                out[(tl.rows + i, tl.cols + j)] = br[(i, j)];
            }
        }
        out
    }

    /// Columns as contiguous vectors; the layout the Jacobi sweep wants.
    pub(crate) fn to_columns(&self) -> Vec<Vec<Complex64>> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)]).collect())
            .collect()
    }

    pub(crate) fn from_columns(rows: usize, columns: &[Vec<Complex64>]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &z) in col.iter().enumerate() {
                out[(i, j)] = z;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        let show_rows = self.rows.min(8);
        let show_cols = self.cols.min(8);
        for i in 0..show_rows {
            write!(f, "  ")?;
            for j in 0..show_cols {
                let z = self[(i, j)];
                write!(f, "{:+.4e}{:+.4e}i  ", z.re, z.im)?;
            }
            if show_cols < self.cols {
                write!(f, "...")?;
            }
            writeln!(f)?;
        }
        if show_rows < self.rows {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn new_rejects_zero_dimension() {
        assert!(ComplexMatrix::new(0, 3, vec![]).is_err());
        assert!(ComplexMatrix::new(3, 0, vec![]).is_err());
        assert!(ComplexMatrix::new(0, 0, vec![]).is_err());
    }

    #[test]
    fn new_rejects_length_mismatch() {
        assert!(ComplexMatrix::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn new_rejects_non_finite() {
        assert!(ComplexMatrix::new(1, 2, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::new(1, 2, vec![c(1.0, f64::INFINITY), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn matmul_hand_value() {
        // [[1, i], [0, 2]] * [[1, 1], [i, 0]] = [[1 + i*i, 1], [2i, 0]] = [[0, 1], [2i, 0]]
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 0.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let p = a.mul(&b);
        assert_eq!(p[(0, 0)], c(0.0, 0.0));
        assert_eq!(p[(0, 1)], c(1.0, 0.0));
        assert_eq!(p[(1, 0)], c(0.0, 2.0));
        assert_eq!(p[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn empty_inner_dimension_gives_zero_product() {
        let u = ComplexMatrix::empty_cols(3); // 3x0
        let vt = ComplexMatrix::zeros(0, 4); // 0x4
        let p = u.mul(&vt);
        assert_eq!(p.shape(), (3, 4));
        assert_eq!(p.frobenius_norm(), 0.0);
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 2.0), c(3.0, -4.0)]]).unwrap();
        let at = a.adjoint();
        assert_eq!(at.shape(), (2, 1));
        assert_eq!(at[(0, 0)], c(1.0, -2.0));
        assert_eq!(at[(1, 0)], c(3.0, 4.0));
    }

    #[test]
    fn block_assembly_round_trips_through_submatrix() {
        let tl = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let tr = ComplexMatrix::from_real_rows(&[vec![5.0], vec![6.0]]).unwrap();
        let bl = ComplexMatrix::from_real_rows(&[vec![7.0, 8.0]]).unwrap();
        let br = ComplexMatrix::from_real_rows(&[vec![9.0]]).unwrap();
        let m = ComplexMatrix::from_blocks(&tl, &tr, &bl, &br);
        assert_eq!(m.shape(), (3, 3));
        assert_eq!(m.submatrix(0, 0, 2, 2), tl);
        assert_eq!(m.submatrix(0, 2, 2, 1), tr);
        assert_eq!(m.submatrix(2, 0, 1, 2), bl);
        assert_eq!(m.submatrix(2, 2, 1, 1), br);
    }

    #[test]
    fn frobenius_norm_hand_value() {
        let a = ComplexMatrix::from_rows(&[vec![c(3.0, 4.0)]]).unwrap();
        assert_eq!(a.frobenius_norm(), 5.0);
    }
}
