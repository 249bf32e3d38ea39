//! Linear and nonlinear entanglement witnesses.
//!
//! A nonlinear witness evaluates `F(rho) = <W> - (<H>^2 + <A>^2) / denom`,
//! where `H + iA` is a generating operator (`X^{T_B}` with `X = |phi><psi|`,
//! or `(I (x) M)+ Y` with `Y = |xi><zeta|`) and `denom` is the matching
//! Schmidt-weight bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, partial_transpose, trace_product, BipartiteDims, CMatrix, Subsystem, C64,
};
use crate::maps::{map_norm_g, LinearMap};
use crate::states::{schmidt_weight, DensityMatrix, PureState};
use crate::tolerance::tol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearWitness {
    #[serde(rename = "W")]
    pub w: CMatrix,
    pub dims: BipartiteDims,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNonlinear")]
pub struct NonlinearWitness {
    #[serde(rename = "W")]
    pub w: CMatrix,
    #[serde(rename = "H")]
    pub h: CMatrix,
    #[serde(rename = "A")]
    pub a: CMatrix,
    pub denom: f64,
    pub dims: BipartiteDims,
}

#[derive(Deserialize)]
struct RawNonlinear {
    #[serde(rename = "W")]
    w: CMatrix,
    #[serde(rename = "H")]
    h: CMatrix,
    #[serde(rename = "A")]
    a: CMatrix,
    denom: f64,
    dims: BipartiteDims,
}

impl TryFrom<RawNonlinear> for NonlinearWitness {
    type Error = Error;

    fn try_from(r: RawNonlinear) -> Result<Self> {
        NonlinearWitness::new(r.w, r.h, r.a, r.denom, r.dims)
    }
}

impl NonlinearWitness {
    /// Validates the Hermiticity and denominator invariants.
    pub fn new(
        w: CMatrix,
        h: CMatrix,
        a: CMatrix,
        denom: f64,
        dims: BipartiteDims,
    ) -> Result<Self> {
        let t = tol();
        for m in [&w, &h, &a] {
            dims.check(m.dim())?;
            let e = m.hermiticity_error();
            if e > t.hermitian {
                return Err(Error::NotHermitian(e));
            }
        }
        if !(denom >= t.denom_min) {
            return Err(Error::DegenerateDenominator(denom));
        }
        Ok(Self {
            w,
            h,
            a,
            denom,
            dims,
        })
    }

    pub fn linear(&self) -> LinearWitness {
        LinearWitness {
            w: self.w.clone(),
            dims: self.dims,
        }
    }

    /// `H + iA`.
    pub fn generator(&self) -> CMatrix {
        &self.h + &self.a.scale(C64::new(0.0, 1.0))
    }
}

/// `Tr[O rho]` for Hermitian `O`, with the imaginary residue checked and dropped.
pub fn real_expectation(op: &CMatrix, rho: &CMatrix) -> Result<f64> {
    let z = trace_product(op, rho)?;
    if z.im.abs() > tol().imag_residue {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

fn check_state_dims(dims: BipartiteDims, rho: &DensityMatrix) -> Result<()> {
    dims.check(rho.dim())?;
    match rho.dims() {
        Some(d) if d != dims => Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: d.total(),
        }),
        _ => Ok(()),
    }
}

/// `W = (|phi><phi|)^{T_B}`.
pub fn witness_from_eigvec(phi: &PureState, dims: BipartiteDims) -> Result<LinearWitness> {
    dims.check(phi.dim())?;
    let w = partial_transpose(&phi.projector(), dims, Subsystem::B)?.hermitian_part();
    Ok(LinearWitness { w, dims })
}

/// Eigenvector of the most negative eigenvalue of `rho^{T_B}`, if negative.
pub fn negative_eigvec(rho: &DensityMatrix) -> Result<Option<PureState>> {
    let dims = rho.require_dims()?;
    let eig = hermitian_eig(&partial_transpose(rho.mat(), dims, Subsystem::B)?)?;
    if eig.min() >= -tol().psd {
        return Ok(None);
    }
    PureState::normalized(eig.vector(0), Some(dims)).map(Some)
}

/// `W = (I (x) M)+ |xi><xi|`, so that `Tr[W rho] = <xi|(I (x) M)(rho)|xi>`.
pub fn map_witness(m: &LinearMap, xi: &PureState, dims: BipartiteDims) -> Result<LinearWitness> {
    let out_dims = BipartiteDims::new(dims.a, m.dim_out());
    out_dims.check(xi.dim())?;
    if dims.b != m.dim_in() {
        return Err(Error::DimensionMismatch {
            expected: m.dim_in(),
            found: dims.b,
        });
    }
    let w = m
        .adjoint()
        .extend_apply_op(&xi.projector(), out_dims)?
        .hermitian_part();
    Ok(LinearWitness { w, dims })
}

/// `X = H + iA` with `H = (X + X^dagger)/2`, `A = (X - X^dagger)/(2i)`.
pub fn split_herm(x: &CMatrix) -> (CMatrix, CMatrix) {
    let xd = x.adjoint();
    let h = (x + &xd).scale_real(0.5);
    let a = (x - &xd).scale(C64::new(0.0, -0.5));
    (h, a)
}

/// Nonlinear witness from `W_phi` and `X = |phi><psi|`; `denom = s(psi)`.
pub fn build_new(
    phi: &PureState,
    psi: &PureState,
    dims: BipartiteDims,
) -> Result<NonlinearWitness> {
    dims.check(psi.dim())?;
    let lin = witness_from_eigvec(phi, dims)?;
    let x = CMatrix::outer(phi.vec(), psi.vec());
    let (h, a) = split_herm(&partial_transpose(&x, dims, Subsystem::B)?);
    let denom = schmidt_weight(psi, dims)?;
    if denom < tol().denom_min {
        return Err(Error::DegenerateDenominator(denom));
    }
    NonlinearWitness::new(lin.w, h, a, denom, dims)
}

/// Nonlinear witness from `W_xi` and `Y = |xi><zeta|`; `denom = s(zeta) g(M)`.
pub fn build_map_new(
    m: &LinearMap,
    xi: &PureState,
    zeta: &PureState,
    dims: BipartiteDims,
) -> Result<NonlinearWitness> {
    let out_dims = BipartiteDims::new(dims.a, m.dim_out());
    out_dims.check(zeta.dim())?;
    let lin = map_witness(m, xi, dims)?;
    let y = CMatrix::outer(xi.vec(), zeta.vec());
    let y_tilde = m.adjoint().extend_apply_op(&y, out_dims)?;
    let (h, a) = split_herm(&y_tilde);
    let denom = schmidt_weight(zeta, out_dims)? * map_norm_g(m)?;
    if denom < tol().denom_min {
        return Err(Error::DegenerateDenominator(denom));
    }
    NonlinearWitness::new(lin.w, h.hermitian_part(), a.hermitian_part(), denom, dims)
}

pub fn eval_linear(w: &LinearWitness, rho: &DensityMatrix) -> Result<f64> {
    check_state_dims(w.dims, rho)?;
    real_expectation(&w.w, rho.mat())
}

/// `F(rho)` on any unit-trace operator; used for filter states as well.
pub fn eval_nonlinear_op(f: &NonlinearWitness, rho: &CMatrix) -> Result<f64> {
    f.dims.check(rho.dim())?;
    let w = real_expectation(&f.w, rho)?;
    let h = real_expectation(&f.h, rho)?;
    let a = real_expectation(&f.a, rho)?;
    Ok(w - (h * h + a * a) / f.denom)
}

pub fn eval_nonlinear(f: &NonlinearWitness, rho: &DensityMatrix) -> Result<f64> {
    check_state_dims(f.dims, rho)?;
    eval_nonlinear_op(f, rho.mat())
}

/// The qubit witness `F_{phi+}` with `X = |phi+><phi-|`.
pub fn werner_witness() -> NonlinearWitness {
    use crate::states::{phi_minus, phi_plus};
    build_new(&phi_plus(), &phi_minus(), BipartiteDims::new(2, 2)).expect("qubit witness")
}

/// The qutrit witness `F_{psi~}` built from the Choi map `M1`, `xi = psi~`
/// and the default `zeta`.
pub fn bound_witness() -> NonlinearWitness {
    use crate::maps::choi_m1;
    use crate::states::{max_entangled, zeta_default};
    build_map_new(
        &choi_m1(),
        &max_entangled(3),
        &zeta_default(),
        BipartiteDims::new(3, 3),
    )
    .expect("qutrit witness")
}
