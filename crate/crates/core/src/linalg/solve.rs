use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tolerance::tol;

/// Dense real matrix, row-major. Used for Gram systems.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product; row `(i, k) -> i * b.rows + k`.
    pub fn kron(&self, b: &RealMatrix) -> RealMatrix {
        RealMatrix::from_fn(self.rows * b.rows, self.cols * b.cols, |r, c| {
            self.get(r / b.rows, c / b.cols) * b.get(r % b.rows, c % b.cols)
        })
    }
}

/// Solves `G x = b` for a square, well-conditioned real `G`.
///
/// The condition number is estimated from the singular values; systems above
/// the configured `condition_max` are rejected as [`Error::Singular`].
pub fn solve_hermitian_system(g: &RealMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = g.rows;
    if g.cols != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.cols,
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let t = tol();
    let mat = DMatrix::from_row_slice(n, n, &g.data);
    let sv = mat.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let cond = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(cond <= t.condition_max) {
        return Err(Error::Singular(cond));
    }
    let x = mat
        .lu()
        .solve(&DVector::from_column_slice(b))
        .ok_or(Error::Singular(cond))?;
    let x: Vec<f64> = x.iter().copied().collect();

    let bmax = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let resid = g
        .mul_vec(&x)
        .iter()
        .zip(b)
        .fold(0.0_f64, |m, (gx, bi)| m.max((gx - bi).abs()));
    if resid > t.solve_residual * bmax.max(f64::MIN_POSITIVE) && resid > 0.0 {
        return Err(Error::Singular(cond));
    }
    Ok(x)
}
