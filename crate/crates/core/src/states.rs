//! Density matrices, pure states and the two state families used throughout:
//! the two-qubit Werner family and the 3x3 bound-entangled family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, partial_trace, partial_transpose, vec_norm, BipartiteDims, CMatrix, MatrixJson,
    Subsystem, C64, ONE, ZERO,
};
use crate::tolerance::tol;

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct DensityMatrix {
    mat: CMatrix,
    dims: Option<BipartiteDims>,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix, dims: Option<BipartiteDims>) -> Result<Self> {
        if let Some(d) = dims {
            d.check(mat.dim())?;
        }
        let t = tol();
        let herr = mat.hermiticity_error();
        if herr > t.hermitian {
            return Err(Error::NotHermitian(herr));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > t.trace {
            return Err(Error::BadTrace(tr.re));
        }
        let min = hermitian_eig(&mat)?.min();
        if min < -t.psd {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { mat, dims })
    }

    /// Normalizes a positive operator by its trace.
    pub fn from_positive(mat: CMatrix, dims: Option<BipartiteDims>) -> Result<Self> {
        let tr = mat.trace().re;
        if !(tr > 0.0) {
            return Err(Error::BadTrace(tr));
        }
        Self::new(mat.scale_real(1.0 / tr).hermitian_part(), dims)
    }

    pub fn pure(psi: &PureState) -> Self {
        Self {
            mat: CMatrix::projector(&psi.vec).hermitian_part(),
            dims: psi.dims,
        }
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> CMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn dims(&self) -> Option<BipartiteDims> {
        self.dims
    }

    pub fn with_dims(mut self, dims: BipartiteDims) -> Result<Self> {
        dims.check(self.mat.dim())?;
        self.dims = Some(dims);
        Ok(self)
    }

    /// Bipartite dims, or a dimension error when the state carries none.
    pub fn require_dims(&self) -> Result<BipartiteDims> {
        self.dims.ok_or(Error::DimensionMismatch {
            expected: 0,
            found: self.dim(),
        })
    }

    /// Smallest eigenvalue of the partial transpose on B.
    pub fn ppt_min_eigenvalue(&self) -> Result<f64> {
        let dims = self.require_dims()?;
        Ok(hermitian_eig(&partial_transpose(&self.mat, dims, Subsystem::B)?)?.min())
    }

    pub fn purity(&self) -> f64 {
        crate::linalg::trace_product(&self.mat, &self.mat)
            .map(|z| z.re)
            .unwrap_or(f64::NAN)
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    #[serde(flatten)]
    mat: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dims: Option<BipartiteDims>,
}

impl From<DensityMatrix> for StateJson {
    fn from(d: DensityMatrix) -> Self {
        StateJson {
            mat: d.mat.into(),
            dims: d.dims,
        }
    }
}

impl TryFrom<StateJson> for DensityMatrix {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<Self> {
        DensityMatrix::new(CMatrix::try_from(j.mat)?, j.dims)
    }
}

/// Unit state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vec: Vec<C64>,
    dims: Option<BipartiteDims>,
}

impl PureState {
    pub fn new(vec: Vec<C64>, dims: Option<BipartiteDims>) -> Result<Self> {
        if let Some(d) = dims {
            d.check(vec.len())?;
        }
        let n = vec_norm(&vec);
        if (n - 1.0).abs() > tol().norm {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { vec, dims })
    }

    /// Rescales `vec` to unit norm.
    pub fn normalized(vec: Vec<C64>, dims: Option<BipartiteDims>) -> Result<Self> {
        let n = vec_norm(&vec);
        if !(n > 0.0) {
            return Err(Error::NotNormalized(n));
        }
        Self::new(vec.into_iter().map(|z| z / n).collect(), dims)
    }

    /// Normalized superposition of computational-basis kets `|i j>` with
    /// the given real weights.
    pub fn from_kets(dims: BipartiteDims, terms: &[(usize, usize, f64)]) -> Result<Self> {
        let mut v = vec![ZERO; dims.total()];
        for &(i, j, w) in terms {
            if i >= dims.a || j >= dims.b {
                return Err(Error::DimensionMismatch {
                    expected: dims.total(),
                    found: i * dims.b + j,
                });
            }
            v[i * dims.b + j] += C64::new(w, 0.0);
        }
        Self::normalized(v, Some(dims))
    }

    pub fn vec(&self) -> &[C64] {
        &self.vec
    }

    pub fn dims(&self) -> Option<BipartiteDims> {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    pub fn projector(&self) -> CMatrix {
        CMatrix::projector(&self.vec)
    }
}

/// `(1/sqrt d) sum_i |ii>` on `d x d`.
pub fn max_entangled(d: usize) -> PureState {
    assert!(d >= 2, "maximally entangled state needs d >= 2");
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        v[i * d + i] = amp;
    }
    PureState {
        vec: v,
        dims: Some(BipartiteDims::new(d, d)),
    }
}

pub fn maximally_mixed(d: usize) -> DensityMatrix {
    assert!(d >= 1, "dimension must be positive");
    DensityMatrix {
        mat: CMatrix::identity(d).scale_real(1.0 / d as f64),
        dims: None,
    }
}

const QUBITS: BipartiteDims = BipartiteDims::new(2, 2);
const QUTRITS: BipartiteDims = BipartiteDims::new(3, 3);

/// `(|00> + |11>)/sqrt 2`.
pub fn phi_plus() -> PureState {
    PureState::from_kets(QUBITS, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap()
}

/// `(|00> - |11>)/sqrt 2`.
pub fn phi_minus() -> PureState {
    PureState::from_kets(QUBITS, &[(0, 0, 1.0), (1, 1, -1.0)]).unwrap()
}

/// `(|01> - |10>)/sqrt 2`.
pub fn psi_minus() -> PureState {
    PureState::from_kets(QUBITS, &[(0, 1, 1.0), (1, 0, -1.0)]).unwrap()
}

/// `(|01> + |10> + |12> + |21>)/2`, the default free vector of the qutrit witness.
pub fn zeta_default() -> PureState {
    PureState::from_kets(
        QUTRITS,
        &[(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)],
    )
    .unwrap()
}

/// Werner family `nu |psi-><psi-| + (1 - nu) I/4`, PSD for `-1/3 <= nu <= 1`.
pub fn werner(nu: f64) -> Result<DensityMatrix> {
    let (lo, hi) = (-1.0 / 3.0, 1.0);
    let slack = 1e-12;
    if !(nu >= lo - slack && nu <= hi + slack) {
        return Err(Error::OutOfFamily {
            name: "nu",
            value: nu,
            min: lo,
            max: hi,
        });
    }
    let singlet = psi_minus().projector().scale_real(nu);
    let noise = CMatrix::identity(4).scale_real((1.0 - nu) / 4.0);
    DensityMatrix::new(&singlet + &noise, Some(QUBITS))
}

/// The 3x3 family `2/7 |psi~><psi~| + a/7 sigma_+ + (5 - a)/7 sigma_-`, `0 <= a <= 5`.
///
/// `sigma_+` mixes `|01>, |12>, |20>` and `sigma_-` mixes `|10>, |21>, |02>`,
/// each with weight 1/3. The family is PPT exactly for `1 <= a <= 4`.
pub fn bound_entangled_b(a: f64) -> Result<DensityMatrix> {
    if !(0.0..=5.0).contains(&a) {
        return Err(Error::OutOfFamily {
            name: "a",
            value: a,
            min: 0.0,
            max: 5.0,
        });
    }
    let mut m = max_entangled(3).projector().scale_real(2.0 / 7.0);
    let plus = [(0, 1), (1, 2), (2, 0)];
    let minus = [(1, 0), (2, 1), (0, 2)];
    for (i, j) in plus {
        m[(i * 3 + j, i * 3 + j)] += C64::new(a / 21.0, 0.0);
    }
    for (i, j) in minus {
        m[(i * 3 + j, i * 3 + j)] += C64::new((5.0 - a) / 21.0, 0.0);
    }
    DensityMatrix::new(m, Some(QUTRITS))
}

/// Square of the largest Schmidt coefficient, i.e. the largest eigenvalue of
/// the reduced state `Tr_B |psi><psi|`.
pub fn schmidt_weight(psi: &PureState, dims: BipartiteDims) -> Result<f64> {
    dims.check(psi.dim())?;
    let reduced = partial_trace(&psi.projector(), dims, Subsystem::B)?;
    Ok(hermitian_eig(&reduced.hermitian_part())?.max())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_entangled_amplitudes() {
        let s = 1.0 / 2f64.sqrt();
        let v = max_entangled(2);
        assert_eq!(v.vec(), &[C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]);
        let v3 = max_entangled(3);
        for (k, z) in v3.vec().iter().enumerate() {
            let expect = if [0, 4, 8].contains(&k) {
                1.0 / 3f64.sqrt()
            } else {
                0.0
            };
            assert!((z.re - expect).abs() < 1e-15 && z.im == 0.0);
        }
        for d in 2..=4 {
            let r = partial_trace(
                &max_entangled(d).projector(),
                BipartiteDims::new(d, d),
                Subsystem::B,
            )
            .unwrap();
            assert!(r.max_abs_diff(&CMatrix::identity(d).scale_real(1.0 / d as f64)) < 1e-15);
        }
    }

    #[test]
    fn werner_endpoints() {
        let w0 = werner(0.0).unwrap();
        assert!(
            w0.mat()
                .max_abs_diff(&CMatrix::identity(4).scale_real(0.25))
                < 1e-15
        );
        let w1 = werner(1.0).unwrap();
        assert!(w1.mat().max_abs_diff(&psi_minus().projector()) < 1e-15);
        assert!(werner(-1.0 / 3.0).is_ok());
        assert!(matches!(werner(1.1), Err(Error::OutOfFamily { .. })));
        assert!(matches!(werner(-0.5), Err(Error::OutOfFamily { .. })));
    }

    #[test]
    fn werner_ppt_boundary() {
        let m = werner(1.0 / 3.0).unwrap().ppt_min_eigenvalue().unwrap();
        assert!(m.abs() < 1e-12, "{m}");
    }

    #[test]
    fn bound_family_basics() {
        let r = bound_entangled_b(2.5).unwrap();
        assert!((r.mat()[(1, 1)].re - 2.5 / 21.0).abs() < 1e-15);
        assert!((r.mat()[(3, 3)].re - 2.5 / 21.0).abs() < 1e-15);
        assert!(r.ppt_min_eigenvalue().unwrap() > 0.0);
        assert!(
            bound_entangled_b(4.0)
                .unwrap()
                .ppt_min_eigenvalue()
                .unwrap()
                >= -1e-10
        );
        assert!(matches!(
            bound_entangled_b(5.5),
            Err(Error::OutOfFamily { .. })
        ));
        assert!(matches!(
            bound_entangled_b(-0.1),
            Err(Error::OutOfFamily { .. })
        ));
    }

    #[test]
    fn maximally_mixed_purity() {
        assert!(
            maximally_mixed(2)
                .mat()
                .max_abs_diff(&CMatrix::diag(&[0.5, 0.5]))
                < 1e-15
        );
        assert!(
            maximally_mixed(3)
                .mat()
                .max_abs_diff(&CMatrix::diag(&[1.0 / 3.0; 3]))
                < 1e-15
        );
        for d in 1..6 {
            assert!((maximally_mixed(d).purity() - 1.0 / d as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn schmidt_weights() {
        let q = BipartiteDims::new(2, 2);
        let prod = PureState::from_kets(q, &[(0, 0, 1.0)]).unwrap();
        assert!((schmidt_weight(&prod, q).unwrap() - 1.0).abs() < 1e-15);
        assert!((schmidt_weight(&phi_minus(), q).unwrap() - 0.5).abs() < 1e-14);
        let z = zeta_default();
        assert!((schmidt_weight(&z, QUTRITS).unwrap() - 0.5).abs() < 1e-14);
        assert!(schmidt_weight(&z, q).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityMatrix::new(CMatrix::diag(&[1.5, -0.5]), None),
            Err(Error::NotPositive(_))
        ));
        assert!(matches!(
            DensityMatrix::new(CMatrix::diag(&[0.5, 0.6]), None),
            Err(Error::BadTrace(_))
        ));
        let nh = CMatrix::from_fn(2, |i, j| {
            if i == 0 && j == 1 {
                ONE
            } else if i == j {
                C64::new(0.5, 0.0)
            } else {
                ZERO
            }
        });
        assert!(matches!(
            DensityMatrix::new(nh, None),
            Err(Error::NotHermitian(_))
        ));
        assert!(DensityMatrix::new(
            CMatrix::identity(4).scale_real(0.25),
            Some(BipartiteDims::new(2, 3))
        )
        .is_err());
    }

    #[test]
    fn pure_state_validation() {
        assert!(matches!(
            PureState::new(vec![ONE, ONE], None),
            Err(Error::NotNormalized(_))
        ));
        assert!(PureState::normalized(vec![ZERO, ZERO], None).is_err());
    }

    #[test]
    fn state_json_round_trip() {
        let w = werner(0.7).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert!(s.contains("\"dA\":2"));
        let back: DensityMatrix = serde_json::from_str(&s).unwrap();
        assert!(back.mat().max_abs_diff(w.mat()) < 1e-15);
        assert_eq!(back.dims(), w.dims());
    }
}
