//! Dense complex matrix kernel.
//!
//! Composite indices follow the convention `i * d_b + k`: subsystem A is the
//! slow index and subsystem B the fast one, everywhere in the crate.

mod eig;
mod solve;

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eig::{hermitian_eig, EigenDecomposition};
pub use solve::{solve_hermitian_system, RealMatrix};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Local dimensions of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteDims {
    #[serde(rename = "dA")]
    pub a: usize,
    #[serde(rename = "dB")]
    pub b: usize,
}

impl BipartiteDims {
    pub const fn new(a: usize, b: usize) -> Self {
        Self { a, b }
    }

    pub const fn total(&self) -> usize {
        self.a * self.b
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if self.a == 0 || self.b == 0 || self.total() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.total(),
                found: dim,
            });
        }
        Ok(())
    }
}

/// One side of a bipartite split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Real matrix from rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must be square");
        Self::from_fn(dim, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Matrix unit `|i><j|` of dimension `dim`.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(i, j)] = ONE;
        m
    }

    /// `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len(), "outer product of unequal lengths");
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        same_dim(self, rhs)?;
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(CMatrix { dim: n, data: out })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on unequal dims");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |M - M^dagger|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `M v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector length");
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

fn same_dim(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(())
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix add on unequal dims");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.dim, rhs.dim, "matrix add on unequal dims");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sub on unequal dims");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.map(|z| -z)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product on unequal dims")
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// JSON form `{"dim": n, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<CMatrix> for MatrixJson {
    fn from(m: CMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            m.data
                .chunks(m.dim)
                .map(|r| r.iter().map(f).collect())
                .collect()
        };
        MatrixJson {
            dim: m.dim,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        let n = j.dim;
        let ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !ok(&j.re) || !ok(&j.im) {
            return Err(Error::InvalidMatrix(format!(
                "`re`/`im` must both be {n}x{n}"
            )));
        }
        let data =
            j.re.iter()
                .flatten()
                .zip(j.im.iter().flatten())
                .map(|(&re, &im)| C64::new(re, im))
                .collect();
        CMatrix::new(n, data)
    }
}

/// Kronecker product; entry `(i*dB + k, j*dB + l)` is `A(i,j) B(k,l)`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut data = vec![ZERO; n * n];
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    data[(i * nb + k) * n + j * nb + l] = aij * b[(k, l)];
                }
            }
        }
    }
    CMatrix { dim: n, data }
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// Partial transpose on one factor.
pub fn partial_transpose(
    m: &CMatrix,
    dims: BipartiteDims,
    subsystem: Subsystem,
) -> Result<CMatrix> {
    dims.check(m.dim)?;
    let db = dims.b;
    Ok(CMatrix::from_fn(m.dim, |r, c| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (c / db, c % db);
        match subsystem {
            Subsystem::B => m[(i * db + l, j * db + k)],
            Subsystem::A => m[(j * db + k, i * db + l)],
        }
    }))
}

/// Partial trace over `traced`; returns the reduced operator on the other factor.
pub fn partial_trace(m: &CMatrix, dims: BipartiteDims, traced: Subsystem) -> Result<CMatrix> {
    dims.check(m.dim)?;
    let (da, db) = (dims.a, dims.b);
    Ok(match traced {
        Subsystem::B => CMatrix::from_fn(da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::A => CMatrix::from_fn(db, |k, l| {
            (0..da).map(|i| m[(i * db + k, i * db + l)]).sum()
        }),
    })
}

/// Hilbert-Schmidt inner product `Tr[A^dagger B]`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    same_dim(a, b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// `Tr[A B]` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    same_dim(a, b)?;
    let n = a.dim;
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a.data[i * n + k] * b.data[k * n + i];
        }
    }
    Ok(acc)
}

/// Euclidean norm of a vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Pauli matrices.
pub mod pauli {
    use super::{CMatrix, C64, ONE, ZERO};

    pub fn x() -> CMatrix {
        CMatrix::new(2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
    }

    pub fn y() -> CMatrix {
        CMatrix::new(2, vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO]).unwrap()
    }

    pub fn z() -> CMatrix {
        CMatrix::diag(&[1.0, -1.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_phi_plus() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)];
        CMatrix::projector(&v)
    }

    fn swap() -> CMatrix {
        CMatrix::from_fn(4, |r, c| {
            let (i, k) = (r / 2, r % 2);
            let (j, l) = (c / 2, c % 2);
            if i == l && k == j {
                ONE
            } else {
                ZERO
            }
        })
    }

    #[test]
    fn kron_identity_and_diagonal() {
        assert_eq!(
            kron(&CMatrix::identity(2), &CMatrix::identity(2)),
            CMatrix::identity(4)
        );
        let zz = kron(&pauli::z(), &pauli::z());
        assert_eq!(zz, CMatrix::diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_entrywise_formula() {
        let t2 = CMatrix::diag(&[1.0, 0.0]);
        let t3 = CMatrix::identity(2).scale_real(0.5);
        let k = kron(&t2, &t3);
        assert!(k.max_abs_diff(&CMatrix::diag(&[0.5, 0.5, 0.0, 0.0])) < 1e-15);
        // asymmetric sizes: (i*dB+k, j*dB+l) = A(i,j) B(k,l)
        let a = CMatrix::from_fn(2, |i, j| C64::new((i * 2 + j) as f64, 1.0));
        let b = CMatrix::from_fn(3, |i, j| C64::new(1.0, (i * 3 + j) as f64));
        let ab = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..3 {
                    for l in 0..3 {
                        assert_eq!(ab[(i * 3 + k, j * 3 + l)], a[(i, j)] * b[(k, l)]);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_transpose_of_bell_projector_is_half_swap() {
        let pt =
            partial_transpose(&bell_phi_plus(), BipartiteDims::new(2, 2), Subsystem::B).unwrap();
        assert!(pt.max_abs_diff(&swap().scale_real(0.5)) < 1e-15);
        let pta =
            partial_transpose(&bell_phi_plus(), BipartiteDims::new(2, 2), Subsystem::A).unwrap();
        assert!(pta.max_abs_diff(&pt) < 1e-15);
    }

    #[test]
    fn partial_transpose_of_product_transposes_factor() {
        let a = CMatrix::from_fn(2, |i, j| C64::new((i + j) as f64, i as f64 - j as f64));
        let b = CMatrix::from_fn(3, |i, j| C64::new(1.0 + i as f64, j as f64 - i as f64));
        let dims = BipartiteDims::new(2, 3);
        let pt = partial_transpose(&kron(&a, &b), dims, Subsystem::B).unwrap();
        assert!(pt.max_abs_diff(&kron(&a, &b.transpose())) < 1e-15);
        let pta = partial_transpose(&kron(&a, &b), dims, Subsystem::A).unwrap();
        assert!(pta.max_abs_diff(&kron(&a.transpose(), &b)) < 1e-15);
    }

    #[test]
    fn partial_transpose_rejects_bad_dims() {
        assert!(matches!(
            partial_transpose(
                &CMatrix::identity(4),
                BipartiteDims::new(2, 3),
                Subsystem::B
            ),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_cases() {
        let d = BipartiteDims::new(2, 2);
        let half = CMatrix::identity(2).scale_real(0.5);
        assert!(
            partial_trace(&bell_phi_plus(), d, Subsystem::B)
                .unwrap()
                .max_abs_diff(&half)
                < 1e-15
        );
        // direct index contraction of SWAP/2 over B: sum_k SWAP[(i,k),(j,k)] / 2 = delta_ij / 2
        assert!(
            partial_trace(&swap().scale_real(0.5), d, Subsystem::B)
                .unwrap()
                .max_abs_diff(&half)
                < 1e-15
        );

        let ra = CMatrix::diag(&[0.25, 0.75]);
        let rb = CMatrix::diag(&[0.2, 0.3, 0.5]);
        let dims = BipartiteDims::new(2, 3);
        let p = kron(&ra, &rb);
        assert!(
            partial_trace(&p, dims, Subsystem::A)
                .unwrap()
                .max_abs_diff(&rb)
                < 1e-15
        );
        assert!(
            partial_trace(&p, dims, Subsystem::B)
                .unwrap()
                .max_abs_diff(&ra)
                < 1e-15
        );
        assert!(partial_trace(&p, BipartiteDims::new(3, 3), Subsystem::A).is_err());
    }

    #[test]
    fn hs_inner_paulis() {
        assert_eq!(
            hs_inner(&pauli::x(), &pauli::x()).unwrap(),
            C64::new(2.0, 0.0)
        );
        assert_eq!(hs_inner(&pauli::x(), &pauli::z()).unwrap(), ZERO);
        assert_eq!(
            hs_inner(&pauli::y(), &pauli::y()).unwrap(),
            C64::new(2.0, 0.0)
        );
        let w =
            partial_transpose(&bell_phi_plus(), BipartiteDims::new(2, 2), Subsystem::B).unwrap();
        assert!((hs_inner(&CMatrix::identity(4), &w).unwrap() - ONE).norm() < 1e-15);
        assert!(hs_inner(&CMatrix::identity(2), &CMatrix::identity(3)).is_err());
    }

    #[test]
    fn trace_product_matches_matmul() {
        let a = CMatrix::from_fn(3, |i, j| C64::new(i as f64 + 0.5, j as f64));
        let b = CMatrix::from_fn(3, |i, j| C64::new(j as f64 - 1.0, (i * j) as f64));
        let direct = (&a * &b).trace();
        assert!((trace_product(&a, &b).unwrap() - direct).norm() < 1e-12);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let m = CMatrix::from_fn(2, |i, j| C64::new(i as f64, -(j as f64)));
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"dim\":2"));
        let back: CMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"dim":2,"re":[[1,0]],"im":[[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<CMatrix>(bad).is_err());
    }

    #[test]
    fn new_rejects_nonfinite() {
        assert!(CMatrix::new(1, vec![C64::new(f64::NAN, 0.0)]).is_err());
        assert!(CMatrix::new(2, vec![ONE; 3]).is_err());
    }
}
