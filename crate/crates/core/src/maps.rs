//! Linear maps on operators, stored as Choi matrices.
//!
//! The Choi matrix of `M: L(C^n) -> L(C^m)` is `sum_ij |i><j| (x) M(|i><j|)`,
//! input factor slow and output factor fast. Application contracts it:
//! `M(rho) = Tr_in[(rho^T (x) I) C]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, hs_inner, BipartiteDims, CMatrix, MatrixJson, ZERO};
use crate::states::DensityMatrix;
use crate::tolerance::tol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapJson", into = "MapJson")]
pub struct LinearMap {
    dim_in: usize,
    dim_out: usize,
    choi: CMatrix,
}

impl LinearMap {
    /// Wraps a Choi matrix. The map must preserve Hermiticity, i.e. the Choi
    /// matrix must be Hermitian.
    pub fn from_choi(dim_in: usize, dim_out: usize, choi: CMatrix) -> Result<Self> {
        BipartiteDims::new(dim_in, dim_out).check(choi.dim())?;
        let herr = choi.hermiticity_error();
        if herr > tol().hermitian {
            return Err(Error::NotHermitian(herr));
        }
        Ok(Self {
            dim_in,
            dim_out,
            choi,
        })
    }

    /// Builds the Choi matrix by sampling `action` on every matrix unit.
    pub fn from_action(
        dim_in: usize,
        dim_out: usize,
        action: impl Fn(&CMatrix) -> CMatrix,
    ) -> Result<Self> {
        let n = dim_in * dim_out;
        let mut choi = CMatrix::zeros(n);
        for i in 0..dim_in {
            for j in 0..dim_in {
                let img = action(&CMatrix::unit(dim_in, i, j));
                if img.dim() != dim_out {
                    return Err(Error::DimensionMismatch {
                        expected: dim_out,
                        found: img.dim(),
                    });
                }
                for k in 0..dim_out {
                    for l in 0..dim_out {
                        choi[(i * dim_out + k, j * dim_out + l)] = img[(k, l)];
                    }
                }
            }
        }
        Self::from_choi(dim_in, dim_out, choi)
    }

    pub fn identity(d: usize) -> Self {
        Self::from_action(d, d, CMatrix::clone).unwrap()
    }

    pub fn transpose(d: usize) -> Self {
        Self::from_action(d, d, CMatrix::transpose).unwrap()
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    /// `M(rho) = sum_ij rho_ij M(|i><j|)`; linear, so any operator is accepted.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.dim() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: rho.dim(),
            });
        }
        let m = self.dim_out;
        let mut out = CMatrix::zeros(m);
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                let r = rho[(i, j)];
                if r == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(k, l)] += r * self.choi[(i * m + k, j * m + l)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(I_A (x) M)(X)` for an operator on `A (x) B_in`; returns an operator on
    /// `A (x) B_out`.
    pub fn extend_apply_op(&self, x: &CMatrix, dims: BipartiteDims) -> Result<CMatrix> {
        dims.check(x.dim())?;
        if dims.b != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: dims.b,
            });
        }
        let (da, db, m) = (dims.a, dims.b, self.dim_out);
        let mut out = CMatrix::zeros(da * m);
        for i in 0..da {
            for j in 0..da {
                let block = CMatrix::from_fn(db, |k, l| x[(i * db + k, j * db + l)]);
                let img = self.apply(&block)?;
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = img[(k, l)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(I_A (x) M)(rho)` for a bipartite state whose B factor is the map input.
    pub fn extend_apply(&self, rho: &DensityMatrix) -> Result<CMatrix> {
        self.extend_apply_op(rho.mat(), rho.require_dims()?)
    }

    /// Hilbert-Schmidt adjoint: `<M(P), Q> = <P, M+(Q)>`.
    ///
    /// Sampled on matrix units: `M+(Q)_ij = <M(|i><j|), Q>`.
    pub fn adjoint(&self) -> LinearMap {
        let images: Vec<Vec<CMatrix>> = (0..self.dim_in)
            .map(|i| {
                (0..self.dim_in)
                    .map(|j| self.apply(&CMatrix::unit(self.dim_in, i, j)).unwrap())
                    .collect()
            })
            .collect();
        let n = self.dim_in;
        LinearMap::from_action(self.dim_out, self.dim_in, |q| {
            CMatrix::from_fn(n, |i, j| hs_inner(&images[i][j], q).unwrap())
        })
        .expect("adjoint of a Hermiticity-preserving map preserves Hermiticity")
    }
}

/// `g = max_sigma Tr[M(sigma)]`, the largest eigenvalue of `M+(I)`.
pub fn map_norm_g(m: &LinearMap) -> Result<f64> {
    let id_image = m.adjoint().apply(&CMatrix::identity(m.dim_out()))?;
    Ok(hermitian_eig(&id_image.hermitian_part())?.max())
}

/// The positive, not completely positive qutrit map
///
/// ```text
/// [a11 a12 a13]    [a11+a33  -a12     -a13   ]
/// [a21 a22 a23] -> [-a21     a22+a11  -a23   ]
/// [a31 a32 a33]    [-a31     -a32     a33+a22]
/// ```
pub fn choi_m1() -> LinearMap {
    LinearMap::from_action(3, 3, |a| {
        let mut out = a.scale_real(-1.0);
        out[(0, 0)] = a[(0, 0)] + a[(2, 2)];
        out[(1, 1)] = a[(1, 1)] + a[(0, 0)];
        out[(2, 2)] = a[(2, 2)] + a[(1, 1)];
        out
    })
    .unwrap()
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    #[serde(rename = "dimIn")]
    dim_in: usize,
    #[serde(rename = "dimOut")]
    dim_out: usize,
    #[serde(flatten)]
    choi: MatrixJson,
}

impl From<LinearMap> for MapJson {
    fn from(m: LinearMap) -> Self {
        MapJson {
            dim_in: m.dim_in,
            dim_out: m.dim_out,
            choi: m.choi.into(),
        }
    }
}

impl TryFrom<MapJson> for LinearMap {
    type Error = Error;

    fn try_from(j: MapJson) -> Result<Self> {
        LinearMap::from_choi(j.dim_in, j.dim_out, CMatrix::try_from(j.choi)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, C64};
    use crate::states::{bound_entangled_b, maximally_mixed};

    #[test]
    fn m1_on_identity_and_units() {
        let m1 = choi_m1();
        let id = m1.apply(&CMatrix::identity(3)).unwrap();
        assert!(id.max_abs_diff(&CMatrix::identity(3).scale_real(2.0)) < 1e-15);
        let e00 = m1.apply(&CMatrix::unit(3, 0, 0)).unwrap();
        assert_eq!(e00, CMatrix::diag(&[1.0, 1.0, 0.0]));
        let e01 = m1.apply(&CMatrix::unit(3, 0, 1)).unwrap();
        assert_eq!(e01, CMatrix::unit(3, 0, 1).scale_real(-1.0));
        let e22 = m1.apply(&CMatrix::unit(3, 2, 2)).unwrap();
        assert_eq!(e22, CMatrix::diag(&[1.0, 0.0, 1.0]));
    }

    #[test]
    fn m1_doubles_trace_on_units() {
        let m1 = choi_m1();
        for i in 0..3 {
            for j in 0..3 {
                let u = CMatrix::unit(3, i, j);
                let out = m1.apply(&u).unwrap();
                assert!((out.trace() - u.trace() * 2.0).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_map_and_its_adjoint() {
        let id = LinearMap::identity(3);
        let rho = bound_entangled_b(1.0).unwrap();
        let block = CMatrix::from_fn(3, |i, j| rho.mat()[(i, j + 3)]);
        assert_eq!(id.apply(&block).unwrap(), block);
        assert!(id.adjoint().choi().max_abs_diff(id.choi()) < 1e-15);
    }

    #[test]
    fn double_adjoint_is_original() {
        let m1 = choi_m1();
        assert!(m1.adjoint().adjoint().choi().max_abs_diff(m1.choi()) < 1e-12);
        let t = LinearMap::transpose(2);
        assert!(t.adjoint().adjoint().choi().max_abs_diff(t.choi()) < 1e-12);
    }

    #[test]
    fn adjoint_of_m1_on_identity() {
        let out = choi_m1().adjoint().apply(&CMatrix::identity(3)).unwrap();
        assert!(out.max_abs_diff(&CMatrix::identity(3).scale_real(2.0)) < 1e-15);
    }

    #[test]
    fn g_constants() {
        assert!((map_norm_g(&choi_m1()).unwrap() - 2.0).abs() < 1e-12);
        for d in 2..=4 {
            assert!((map_norm_g(&LinearMap::identity(d)).unwrap() - 1.0).abs() < 1e-12);
            assert!((map_norm_g(&LinearMap::transpose(d)).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn extend_apply_detects_window() {
        let m1 = choi_m1();
        let at4 =
            hermitian_eig(&m1.extend_apply(&bound_entangled_b(4.0).unwrap()).unwrap()).unwrap();
        assert!(at4.min() < -1e-6);
        let at2 =
            hermitian_eig(&m1.extend_apply(&bound_entangled_b(2.0).unwrap()).unwrap()).unwrap();
        assert!(at2.min() >= -1e-10);
    }

    #[test]
    fn extend_apply_on_product() {
        let m1 = choi_m1();
        let sa = CMatrix::diag(&[0.2, 0.3, 0.5]);
        let sb = CMatrix::from_fn(3, |i, j| {
            if i == j {
                C64::new(1.0 / 3.0, 0.0)
            } else {
                C64::new(0.1, if i < j { 0.05 } else { -0.05 })
            }
        });
        let prod = DensityMatrix::new(kron(&sa, &sb), Some(BipartiteDims::new(3, 3))).unwrap();
        let out = m1.extend_apply(&prod).unwrap();
        let expect = kron(&sa, &m1.apply(&sb).unwrap());
        assert!(out.max_abs_diff(&expect) < 1e-15);
        assert!(out.hermiticity_error() < 1e-15);
        assert!(hermitian_eig(&out).unwrap().min() >= -1e-12);
    }

    #[test]
    fn extend_apply_dimension_errors() {
        let m1 = choi_m1();
        let mixed = maximally_mixed(4)
            .with_dims(BipartiteDims::new(2, 2))
            .unwrap();
        assert!(m1.extend_apply(&mixed).is_err());
        assert!(m1.apply(&CMatrix::identity(2)).is_err());
    }

    #[test]
    fn map_json_round_trip() {
        let m1 = choi_m1();
        let v: serde_json::Value = serde_json::to_value(&m1).unwrap();
        assert_eq!(v["dimIn"], 3);
        assert_eq!(v["dim"], 9);
        let back: LinearMap = serde_json::from_value(v).unwrap();
        assert_eq!(back, m1);
    }
}
