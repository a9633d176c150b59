//! Column-major complex matrix used for Fresnel-domain and time-domain frames.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix stored column by column.
///
/// Rows index subchirps, samples or range bins; columns index OCDM symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Frame holding discrete-Fresnel-domain symbols, one symbol per column.
pub type FresnelFrame = ComplexMatrix;

/// Frame holding discrete-time samples, one symbol per column.
pub type TimeFrame = ComplexMatrix;

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Builds a matrix from column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                field: "data",
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equally long columns.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * columns.len());
        for col in columns {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    field: "columns",
                    expected: rows,
                    actual: col.len(),
                });
            }
            data.extend_from_slice(col);
        }
        Ok(Self {
            rows,
            cols: columns.len(),
            data,
        })
    }

    /// Builds a matrix by evaluating `f(row, col)` for every entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                data.push(f(r, c));
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

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[col * self.rows + row]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[col * self.rows + row] = value;
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        &self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn column_mut(&mut self, col: usize) -> &mut [Complex64] {
        &mut self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks_exact(self.rows.max(1)).take(self.cols)
    }

    pub fn columns_mut(&mut self) -> impl Iterator<Item = &mut [Complex64]> {
        let cols = self.cols;
        self.data.chunks_exact_mut(self.rows.max(1)).take(cols)
    }

    /// Copies one row into a new vector.
    pub fn row(&self, row: usize) -> Vec<Complex64> {
        (0..self.cols).map(|c| self.get(row, c)).collect()
    }

    /// Copies rows `start..start + len` of every column into a new matrix.
    pub fn row_slice(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.rows {
            return Err(Error::DimensionMismatch {
                field: "row_slice",
                expected: self.rows,
                actual: start + len,
            });
        }
        Ok(Self::from_fn(len, self.cols, |r, c| self.get(start + r, c)))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    /// Sum of squared magnitudes over all entries.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entry-wise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}
