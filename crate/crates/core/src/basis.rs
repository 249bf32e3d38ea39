//! Tomographically complete local state sets and decomposition of Hermitian
//! operators as `O = sum_st c_st tau_s^T (x) omega_t^T`.
//!
//! The transpose is the plain (not conjugate) transpose in the computational
//! basis. With maximally entangled projectors as effects the MDI probabilities
//! are `Tr[(tau_s^T (x) omega_t^T) rho] / (d_A d_B)`, so this is the reading
//! under which coefficient sums reproduce expectation values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hs_inner, kron, pauli, solve_hermitian_system, trace_product, CMatrix, RealMatrix, C64, ONE,
    ZERO,
};
use crate::states::DensityMatrix;
use crate::tolerance::tol;

#[derive(Debug, Clone)]
pub struct StateBasis {
    dim: usize,
    elements: Vec<DensityMatrix>,
    transposed: Vec<CMatrix>,
}

impl StateBasis {
    /// Requires exactly `d^2` states whose transposes are linearly independent.
    pub fn new(elements: Vec<DensityMatrix>) -> Result<Self> {
        let dim = elements
            .first()
            .map(DensityMatrix::dim)
            .ok_or_else(|| Error::InvalidBasis("empty basis".into()))?;
        if elements.iter().any(|e| e.dim() != dim) {
            return Err(Error::InvalidBasis("elements of unequal dimension".into()));
        }
        if elements.len() != dim * dim {
            return Err(Error::InvalidBasis(format!(
                "{} elements for dimension {dim}, need {}",
                elements.len(),
                dim * dim
            )));
        }
        let transposed = elements.iter().map(|e| e.mat().transpose()).collect();
        let basis = Self {
            dim,
            elements,
            transposed,
        };
        // Nonsingularity of the Gram matrix is the independence certificate.
        let n = basis.len();
        let b = vec![1.0; n];
        solve_hermitian_system(&basis.gram(), &b)
            .map_err(|e| Error::InvalidBasis(format!("elements are not independent ({e})")))?;
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[DensityMatrix] {
        &self.elements
    }

    pub fn element(&self, s: usize) -> &CMatrix {
        self.elements[s].mat()
    }

    pub fn transposed(&self, s: usize) -> &CMatrix {
        &self.transposed[s]
    }

    /// Gram matrix `G_ss' = Tr[tau_s^T tau_s'^T]` (real for Hermitian elements).
    pub fn gram(&self) -> RealMatrix {
        let n = self.len();
        RealMatrix::from_fn(n, n, |s, u| {
            hs_inner(&self.transposed[s], &self.transposed[u])
                .unwrap()
                .re
        })
    }
}

/// Real coefficient table `c[s][t]`, serialized as a 2-D array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct CoeffMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CoeffMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::try_from(rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.data[s * self.cols + t]
    }

    pub fn set(&mut self, s: usize, t: usize, v: f64) {
        self.data[s * self.cols + t] = v;
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &CoeffMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sum_st c_st x_st`.
    pub fn contract(&self, x: &CoeffMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (x.rows, x.cols));
        self.data.iter().zip(&x.data).map(|(a, b)| a * b).sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for CoeffMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidMatrix(
                "coefficient table must be rectangular and nonempty".into(),
            ));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite coefficient".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }
}

impl From<CoeffMatrix> for Vec<Vec<f64>> {
    fn from(c: CoeffMatrix) -> Self {
        c.to_rows()
    }
}

fn state(m: CMatrix) -> DensityMatrix {
    DensityMatrix::new(m, None).expect("basis element is a valid state")
}

/// `tau_0 = (I + X)/2`, `tau_1 = (I + Y)/2`, `tau_2 = (I + Z)/2`, `tau_3 = I/2`.
pub fn pauli_basis() -> StateBasis {
    let id = CMatrix::identity(2);
    let half = |p: CMatrix| state((&id + &p).scale_real(0.5));
    StateBasis::new(vec![
        half(pauli::x()),
        half(pauli::y()),
        half(pauli::z()),
        state(id.scale_real(0.5)),
    ])
    .unwrap()
}

/// The eight Gell-Mann matrices `Lambda_1 .. Lambda_8` in the standard order.
pub fn gellmann_matrices() -> [CMatrix; 8] {
    let sym = |i, j| &CMatrix::unit(3, i, j) + &CMatrix::unit(3, j, i);
    let asym = |i, j| {
        &CMatrix::unit(3, i, j).scale(C64::new(0.0, -1.0))
            + &CMatrix::unit(3, j, i).scale(C64::new(0.0, 1.0))
    };
    [
        sym(0, 1),
        asym(0, 1),
        CMatrix::diag(&[1.0, -1.0, 0.0]),
        sym(0, 2),
        asym(0, 2),
        sym(1, 2),
        asym(1, 2),
        CMatrix::diag(&[1.0, 1.0, -2.0]).scale_real(1.0 / 3f64.sqrt()),
    ]
}

/// `pi_0 = I/3`, `pi_s = (I + Lambda_s)/3` for `s = 1..7`,
/// `pi_8 = (I + (sqrt 3 / 2) Lambda_8)/3`.
pub fn gellmann_basis() -> StateBasis {
    let id = CMatrix::identity(3);
    let lam = gellmann_matrices();
    let mut els = vec![state(id.scale_real(1.0 / 3.0))];
    for l in &lam[..7] {
        els.push(state((&id + l).scale_real(1.0 / 3.0)));
    }
    els.push(state(
        (&id + &lam[7].scale_real(3f64.sqrt() / 2.0)).scale_real(1.0 / 3.0),
    ));
    StateBasis::new(els).unwrap()
}

/// Generic `d^2`-element basis: `|i><i|`, then for each `i < j` the states
/// `|+_ij><+_ij|` and `|+i_ij><+i_ij|` with `|+_ij> = (|i> + |j>)/sqrt 2` and
/// `|+i_ij> = (|i> + i|j>)/sqrt 2`.
pub fn standard_basis(d: usize) -> StateBasis {
    assert!(d >= 1);
    let ket = |i: usize, j: usize, phase: C64| {
        let mut v = vec![ZERO; d];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        v[i] += C64::new(s, 0.0);
        v[j] += phase * s;
        v
    };
    let mut els = Vec::with_capacity(d * d);
    for i in 0..d {
        els.push(state(CMatrix::unit(d, i, i)));
    }
    for i in 0..d {
        for j in i + 1..d {
            els.push(state(CMatrix::projector(&ket(i, j, ONE))));
            els.push(state(CMatrix::projector(&ket(i, j, C64::new(0.0, 1.0)))));
        }
    }
    StateBasis::new(els).unwrap()
}

/// Default local basis for a dimension: Pauli states for qubits, Gell-Mann
/// states for qutrits, [`standard_basis`] otherwise.
pub fn default_basis(d: usize) -> StateBasis {
    match d {
        2 => pauli_basis(),
        3 => gellmann_basis(),
        _ => standard_basis(d),
    }
}

/// Unique real coefficients of a Hermitian `o` over `{tau_s^T (x) omega_t^T}`,
/// from the Gram system of Hilbert-Schmidt inner products.
pub fn decompose(o: &CMatrix, basis_a: &StateBasis, basis_b: &StateBasis) -> Result<CoeffMatrix> {
    let t = tol();
    let n = basis_a.dim() * basis_b.dim();
    if o.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: o.dim(),
        });
    }
    let herr = o.hermiticity_error();
    if herr > t.hermitian {
        return Err(Error::NotHermitian(herr));
    }
    let (na, nb) = (basis_a.len(), basis_b.len());
    // Tr[(X (x) Y)(X' (x) Y')] = Tr[X X'] Tr[Y Y'], so the full Gram matrix
    // of the product family is the Kronecker product of the local ones.
    let gram = basis_a.gram().kron(&basis_b.gram());
    let mut rhs = Vec::with_capacity(na * nb);
    for s in 0..na {
        for u in 0..nb {
            let el = kron(basis_a.transposed(s), basis_b.transposed(u));
            let z = trace_product(&el, o)?;
            if z.im.abs() > t.imag_residue {
                return Err(Error::ImaginaryResidue(z.im));
            }
            rhs.push(z.re);
        }
    }
    let x = solve_hermitian_system(&gram, &rhs)?;
    let coeffs = CoeffMatrix {
        rows: na,
        cols: nb,
        data: x,
    };
    let err = reconstruct(&coeffs, basis_a, basis_b)?.max_abs_diff(o);
    if err > t.decomposition {
        return Err(Error::Singular(err));
    }
    Ok(coeffs)
}

/// `sum_st c_st tau_s^T (x) omega_t^T`.
pub fn reconstruct(c: &CoeffMatrix, basis_a: &StateBasis, basis_b: &StateBasis) -> Result<CMatrix> {
    if c.rows != basis_a.len() || c.cols != basis_b.len() {
        return Err(Error::DimensionMismatch {
            expected: basis_a.len() * basis_b.len(),
            found: c.rows * c.cols,
        });
    }
    let mut out = CMatrix::zeros(basis_a.dim() * basis_b.dim());
    for s in 0..c.rows {
        for u in 0..c.cols {
            let v = c.get(s, u);
            if v != 0.0 {
                out += &kron(basis_a.transposed(s), basis_b.transposed(u)).scale_real(v);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_elements_in_order() {
        let b = pauli_basis();
        assert_eq!(b.len(), 4);
        assert_eq!(b.element(2), &CMatrix::diag(&[1.0, 0.0]));
        assert_eq!(b.element(3), &CMatrix::diag(&[0.5, 0.5]));
        assert_eq!(b.element(1)[(0, 1)], C64::new(0.0, -0.5));
    }

    #[test]
    fn pauli_gram_determinant() {
        // G = [[1, 1/2, 1/2, 1/2], [1/2, 1, 1/2, 1/2], [1/2, 1/2, 1, 1/2], [1/2, 1/2, 1/2, 1/2]]
        let g = pauli_basis().gram();
        for s in 0..4 {
            for u in 0..4 {
                let expect = if s == u && s < 3 { 1.0 } else { 0.5 };
                assert!((g.get(s, u) - expect).abs() < 1e-15);
            }
        }
        // det by cofactor-free reduction: subtract row 3 from rows 0..2 gives diag(1/2)
        // on the leading block, so det = (1/2)^3 * 1/2 = 1/16.
        let m = nalgebra::DMatrix::from_fn(4, 4, |i, j| g.get(i, j));
        assert!((m.determinant() - 1.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn gellmann_elements() {
        let b = gellmann_basis();
        assert_eq!(b.len(), 9);
        assert!(
            b.element(0)
                .max_abs_diff(&CMatrix::identity(3).scale_real(1.0 / 3.0))
                < 1e-15
        );
        assert!(b.element(8).max_abs_diff(&CMatrix::diag(&[0.5, 0.5, 0.0])) < 1e-15);
        for e in b.elements() {
            assert!((e.mat().trace() - ONE).norm() < 1e-15);
        }
    }

    #[test]
    fn gellmann_matrices_are_orthogonal() {
        let l = gellmann_matrices();
        for (i, a) in l.iter().enumerate() {
            for (j, b) in l.iter().enumerate() {
                let ip = hs_inner(a, b).unwrap();
                let expect = if i == j { 2.0 } else { 0.0 };
                assert!((ip - C64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn identity_decomposes_on_mixed_element() {
        let b = pauli_basis();
        let c = decompose(&CMatrix::identity(4), &b, &b).unwrap();
        for s in 0..4 {
            for u in 0..4 {
                let expect = if s == 3 && u == 3 { 4.0 } else { 0.0 };
                assert!((c.get(s, u) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_reconstructs_to_zero() {
        let b = gellmann_basis();
        let z = reconstruct(&CoeffMatrix::zeros(9, 9), &b, &b).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn mixed_dimension_decomposition() {
        let (ba, bb) = (pauli_basis(), gellmann_basis());
        let o = CMatrix::from_fn(6, |i, j| {
            if i == j {
                C64::new(i as f64, 0.0)
            } else if i < j {
                C64::new(0.1 * (i + j) as f64, 0.2)
            } else {
                C64::new(0.1 * (i + j) as f64, -0.2)
            }
        });
        let c = decompose(&o, &ba, &bb).unwrap();
        assert_eq!((c.rows(), c.cols()), (4, 9));
        assert!(reconstruct(&c, &ba, &bb).unwrap().max_abs_diff(&o) < 1e-12);
    }

    #[test]
    fn standard_basis_is_complete() {
        for d in 1..=4 {
            let b = standard_basis(d);
            assert_eq!(b.len(), d * d);
        }
    }

    #[test]
    fn decompose_errors() {
        let b = pauli_basis();
        assert!(matches!(
            decompose(&CMatrix::identity(3), &b, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        let nh = CMatrix::unit(4, 0, 1);
        assert!(matches!(
            decompose(&nh, &b, &b),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn dependent_basis_rejected() {
        let mut els = pauli_basis().elements().to_vec();
        els[3] = els[2].clone();
        assert!(matches!(StateBasis::new(els), Err(Error::InvalidBasis(_))));
        assert!(StateBasis::new(pauli_basis().elements()[..3].to_vec()).is_err());
    }

    #[test]
    fn coeff_json() {
        let c = CoeffMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, "[[1.0,2.0],[3.0,4.0]]");
        assert!(serde_json::from_str::<CoeffMatrix>("[[1.0],[2.0,3.0]]").is_err());
    }
}
