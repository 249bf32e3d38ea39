//! Measurement-device-independent evaluation.
//!
//! Subsystem order is `(A_in, A_share, B_share, B_in)`. Alice's effect acts on
//! `A_in (x) A_share`, Bob's on `B_share (x) B_in`, so the product
//! `A1 (x) B1` already matches `tau (x) rho (x) omega` and no permutation is
//! needed.

use serde::{Deserialize, Serialize};

use crate::basis::{decompose, CoeffMatrix, StateBasis};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, kron, trace_product, BipartiteDims, CMatrix, MatrixJson, C64, ZERO,
};
use crate::states::{max_entangled, DensityMatrix};
use crate::tolerance::tol;
use crate::witness::NonlinearWitness;

/// A dichotomic effect `0 <= E <= I` on an (input, share) pair of equal
/// local dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct PovmEffect {
    e: CMatrix,
    local: usize,
}

impl PovmEffect {
    /// The matrix dimension must be a perfect square `d^2`; `d` is the local
    /// dimension of both factors.
    pub fn new(e: CMatrix) -> Result<Self> {
        let n = e.dim();
        let local = (n as f64).sqrt().round() as usize;
        if local * local != n {
            return Err(Error::InvalidMatrix(format!(
                "effect dimension {n} is not a square"
            )));
        }
        let t = tol();
        let herr = e.hermiticity_error();
        if herr > t.hermitian {
            return Err(Error::NotHermitian(herr));
        }
        let eig = hermitian_eig(&e.hermitian_part())?;
        if eig.min() < -t.effect || eig.max() > 1.0 + t.effect {
            return Err(Error::EffectViolation {
                min: eig.min(),
                max: eig.max(),
            });
        }
        Ok(Self { e, local })
    }

    pub fn mat(&self) -> &CMatrix {
        &self.e
    }

    pub fn local_dim(&self) -> usize {
        self.local
    }

    /// `I - E`.
    pub fn complement(&self) -> PovmEffect {
        PovmEffect {
            e: &CMatrix::identity(self.e.dim()) - &self.e,
            local: self.local,
        }
    }

    /// `Tr_in[E (tau (x) I)]`: trace over the first factor.
    pub fn reduce_first(&self, tau: &CMatrix) -> CMatrix {
        let d = self.local;
        debug_assert_eq!(tau.dim(), d);
        CMatrix::from_fn(d, |k, l| {
            let mut z = ZERO;
            for i in 0..d {
                for j in 0..d {
                    z += self.e[(i * d + k, j * d + l)] * tau[(j, i)];
                }
            }
            z
        })
    }

    /// `Tr_in[E (I (x) omega)]`: trace over the second factor.
    pub fn reduce_second(&self, omega: &CMatrix) -> CMatrix {
        let d = self.local;
        debug_assert_eq!(omega.dim(), d);
        CMatrix::from_fn(d, |i, j| {
            let mut z = ZERO;
            for k in 0..d {
                for l in 0..d {
                    z += self.e[(i * d + k, j * d + l)] * omega[(l, k)];
                }
            }
            z
        })
    }
}

impl TryFrom<MatrixJson> for PovmEffect {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        PovmEffect::new(CMatrix::try_from(j)?)
    }
}

impl From<PovmEffect> for MatrixJson {
    fn from(p: PovmEffect) -> Self {
        p.e.into()
    }
}

/// Projector onto the maximally entangled state of `d x d`.
pub fn mes_effect(d: usize) -> PovmEffect {
    PovmEffect {
        e: max_entangled(d).projector(),
        local: d,
    }
}

/// `P(1,1|tau_s, omega_t)`, plus `pmm = P(1,1|m_A, m_B)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbTable {
    pub p: CoeffMatrix,
    pub pmm: f64,
    pub dims: BipartiteDims,
}

impl ProbTable {
    /// The table with entries clamped to `[0, 1]`; for display only.
    pub fn clamped(&self) -> Vec<Vec<f64>> {
        self.p
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct MdiWitness {
    pub alpha: CoeffMatrix,
    pub beta: CoeffMatrix,
    pub gamma: CoeffMatrix,
    pub basis_a: StateBasis,
    pub basis_b: StateBasis,
    pub denom: f64,
    pub dims: BipartiteDims,
}

pub fn build_mdi_witness(
    f: &NonlinearWitness,
    basis_a: StateBasis,
    basis_b: StateBasis,
) -> Result<MdiWitness> {
    let dims = BipartiteDims::new(basis_a.dim(), basis_b.dim());
    if dims != f.dims {
        return Err(Error::DimensionMismatch {
            expected: f.dims.total(),
            found: dims.total(),
        });
    }
    Ok(MdiWitness {
        alpha: decompose(&f.w, &basis_a, &basis_b)?,
        beta: decompose(&f.h, &basis_a, &basis_b)?,
        gamma: decompose(&f.a, &basis_a, &basis_b)?,
        basis_a,
        basis_b,
        denom: f.denom,
        dims,
    })
}

fn check_inputs(
    rho: &DensityMatrix,
    w: &MdiWitness,
    a1: &PovmEffect,
    b1: &PovmEffect,
) -> Result<()> {
    w.dims.check(rho.dim())?;
    if let Some(d) = rho.dims() {
        if d != w.dims {
            return Err(Error::DimensionMismatch {
                expected: w.dims.total(),
                found: d.total(),
            });
        }
    }
    if a1.local != w.dims.a {
        return Err(Error::DimensionMismatch {
            expected: w.dims.a,
            found: a1.local,
        });
    }
    if b1.local != w.dims.b {
        return Err(Error::DimensionMismatch {
            expected: w.dims.b,
            found: b1.local,
        });
    }
    Ok(())
}

/// `R[o, m] = sum_{j,l} a[j, l] rho[(l, o), (j, m)]`; then
/// `Tr[(a (x) b) rho] = sum_{m,o} b[m, o] R[o, m]`.
fn contract_a(a: &CMatrix, rho: &CMatrix, dims: BipartiteDims) -> CMatrix {
    let (da, db) = (dims.a, dims.b);
    CMatrix::from_fn(db, |o, m| {
        let mut z = ZERO;
        for j in 0..da {
            for l in 0..da {
                let x = a[(j, l)];
                if x != ZERO {
                    z += x * rho[(l * db + o, j * db + m)];
                }
            }
        }
        z
    })
}

fn contract_b(b: &CMatrix, r: &CMatrix) -> C64 {
    let d = b.dim();
    let mut z = ZERO;
    for m in 0..d {
        for o in 0..d {
            z += b[(m, o)] * r[(o, m)];
        }
    }
    z
}

fn real_prob(z: C64) -> Result<f64> {
    if z.im.abs() > tol().imag_residue {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

/// `p(s, t) = Tr[(A1 (x) B1)(tau_s (x) rho (x) omega_t)]`, contracted through
/// the reduced operators `Tr_in[A1 (tau_s (x) I)]` and `Tr_in[B1 (I (x) omega_t)]`.
pub fn prob_table(
    rho: &DensityMatrix,
    w: &MdiWitness,
    a1: &PovmEffect,
    b1: &PovmEffect,
) -> Result<ProbTable> {
    check_inputs(rho, w, a1, b1)?;
    let dims = w.dims;
    let (na, nb) = (w.basis_a.len(), w.basis_b.len());
    let b_red: Vec<CMatrix> = (0..nb)
        .map(|t| b1.reduce_second(w.basis_b.element(t)))
        .collect();
    let mut p = CoeffMatrix::zeros(na, nb);
    for s in 0..na {
        let r = contract_a(&a1.reduce_first(w.basis_a.element(s)), rho.mat(), dims);
        for (t, bt) in b_red.iter().enumerate() {
            p.set(s, t, real_prob(contract_b(bt, &r))?);
        }
    }
    let ma = CMatrix::identity(dims.a).scale_real(1.0 / dims.a as f64);
    let mb = CMatrix::identity(dims.b).scale_real(1.0 / dims.b as f64);
    let r = contract_a(&a1.reduce_first(&ma), rho.mat(), dims);
    let pmm = real_prob(contract_b(&b1.reduce_second(&mb), &r))?;
    Ok(ProbTable { p, pmm, dims })
}

/// Same table through the full four-party operator; an independent route for
/// cross-checking [`prob_table`].
pub fn prob_table_full(
    rho: &DensityMatrix,
    w: &MdiWitness,
    a1: &PovmEffect,
    b1: &PovmEffect,
) -> Result<ProbTable> {
    check_inputs(rho, w, a1, b1)?;
    let dims = w.dims;
    let effect = kron(a1.mat(), b1.mat());
    let prob = |tau: &CMatrix, omega: &CMatrix| -> Result<f64> {
        let joint = kron(&kron(tau, rho.mat()), omega);
        real_prob(trace_product(&effect, &joint)?)
    };
    let (na, nb) = (w.basis_a.len(), w.basis_b.len());
    let mut p = CoeffMatrix::zeros(na, nb);
    for s in 0..na {
        for t in 0..nb {
            p.set(s, t, prob(w.basis_a.element(s), w.basis_b.element(t))?);
        }
    }
    let ma = CMatrix::identity(dims.a).scale_real(1.0 / dims.a as f64);
    let mb = CMatrix::identity(dims.b).scale_real(1.0 / dims.b as f64);
    let pmm = prob(&ma, &mb)?;
    Ok(ProbTable { p, pmm, dims })
}

fn check_shape(w: &MdiWitness, p: &ProbTable) -> Result<()> {
    if (p.p.rows(), p.p.cols()) != (w.alpha.rows(), w.alpha.cols()) {
        return Err(Error::DimensionMismatch {
            expected: w.alpha.rows() * w.alpha.cols(),
            found: p.p.rows() * p.p.cols(),
        });
    }
    Ok(())
}

/// `I(P) = sum_st alpha_st p(s, t)`.
pub fn eval_mdi_linear(w: &MdiWitness, p: &ProbTable) -> Result<f64> {
    check_shape(w, p)?;
    Ok(w.alpha.contract(&p.p))
}

/// `N(P) = I(P) - [(sum beta p)^2 + (sum gamma p)^2] / (denom d_A d_B pmm)`.
pub fn eval_mdi_new(w: &MdiWitness, p: &ProbTable) -> Result<f64> {
    check_shape(w, p)?;
    if !(p.pmm > tol().pmm_min) {
        return Err(Error::DegenerateDenominator(p.pmm));
    }
    let lin = w.alpha.contract(&p.p);
    let hb = w.beta.contract(&p.p);
    let ag = w.gamma.contract(&p.p);
    let scale = w.denom * (w.dims.a * w.dims.b) as f64 * p.pmm;
    Ok(lin - (hb * hb + ag * ag) / scale)
}
