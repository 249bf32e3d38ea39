//! Random ensembles and executable checks of the separability argument:
//! effective POVMs, the filter state `Q`, and `N(P_sigma) = K F(Q)`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{gellmann_basis, pauli_basis};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, BipartiteDims, CMatrix, C64};
use crate::mdi::{build_mdi_witness, eval_mdi_new, prob_table, MdiWitness, PovmEffect};
use crate::states::DensityMatrix;
use crate::tolerance::tol;
use crate::witness::{bound_witness, eval_nonlinear_op, werner_witness, NonlinearWitness};

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre(d: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(d, |_, _| gaussian(rng))
}

/// `G G^dagger / Tr[G G^dagger]`, `G` complex Ginibre.
pub fn random_density_rng(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = ginibre(d, rng);
    let p = (&g * &g.adjoint()).hermitian_part();
    let tr = p.trace().re;
    DensityMatrix::from_positive(p.scale_real(1.0 / tr), None).expect("Ginibre state")
}

pub fn random_density(d: usize, seed: u64) -> DensityMatrix {
    random_density_rng(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Haar-random unit vector.
pub fn random_pure(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
        let n = crate::linalg::vec_norm(&v);
        if n > 1e-300 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeparableDecomposition {
    pub weights: Vec<f64>,
    pub parts_a: Vec<DensityMatrix>,
    pub parts_b: Vec<DensityMatrix>,
}

impl SeparableDecomposition {
    pub fn state(&self) -> CMatrix {
        let da = self.parts_a[0].dim();
        let db = self.parts_b[0].dim();
        let mut out = CMatrix::zeros(da * db);
        for ((w, a), b) in self.weights.iter().zip(&self.parts_a).zip(&self.parts_b) {
            out += &kron(a.mat(), b.mat()).scale_real(*w);
        }
        out
    }
}

/// Mixture of `k` Haar pure product states with flat-Dirichlet weights.
pub fn random_separable_rng(
    dims: BipartiteDims,
    k: usize,
    rng: &mut impl Rng,
) -> (DensityMatrix, SeparableDecomposition) {
    assert!(k >= 1);
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let pure = |d, rng: &mut _| {
        DensityMatrix::pure(&crate::states::PureState::new(random_pure(d, rng), None).unwrap())
    };
    let mut parts_a = Vec::with_capacity(k);
    let mut parts_b = Vec::with_capacity(k);
    for _ in 0..k {
        parts_a.push(pure(dims.a, rng));
        parts_b.push(pure(dims.b, rng));
    }
    let dec = SeparableDecomposition {
        weights,
        parts_a,
        parts_b,
    };
    let rho = DensityMatrix::from_positive(dec.state().hermitian_part(), Some(dims))
        .expect("separable mixture");
    (rho, dec)
}

pub fn random_separable(
    dims: BipartiteDims,
    k: usize,
    seed: u64,
) -> (DensityMatrix, SeparableDecomposition) {
    random_separable_rng(dims, k, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `G G^dagger / (lambda_max u)`, `u ~ U[1, 2]`. `d` must be a perfect square.
pub fn random_effect_rng(d: usize, rng: &mut impl Rng) -> PovmEffect {
    let g = ginibre(d, rng);
    let p = (&g * &g.adjoint()).hermitian_part();
    let top = hermitian_eig(&p).expect("Hermitian").max();
    let u: f64 = rng.random_range(1.0..=2.0);
    PovmEffect::new(p.scale_real(1.0 / (top * u))).expect("effect in range")
}

pub fn random_effect(d: usize, seed: u64) -> PovmEffect {
    random_effect_rng(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Per-term effective effects `((Tr_share[A1 (I (x) sigma_A)])^T, (Tr_share[B1 (sigma_B (x) I)])^T)`.
pub fn effective_povms(
    a1: &PovmEffect,
    b1: &PovmEffect,
    dec: &SeparableDecomposition,
) -> Result<Vec<(CMatrix, CMatrix)>> {
    dec.parts_a
        .iter()
        .zip(&dec.parts_b)
        .map(|(sa, sb)| {
            if sa.dim() != a1.local_dim() || sb.dim() != b1.local_dim() {
                return Err(Error::DimensionMismatch {
                    expected: a1.local_dim() * b1.local_dim(),
                    found: sa.dim() * sb.dim(),
                });
            }
            Ok((
                a1.reduce_second(sa.mat()).transpose(),
                b1.reduce_first(sb.mat()).transpose(),
            ))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct FilterResult {
    pub q: DensityMatrix,
    pub k: f64,
}

/// `Q = sum_i p_i A1^i (x) B1^i / K`, `K` the trace of the numerator.
pub fn filter_state(effs: &[(CMatrix, CMatrix)], weights: &[f64]) -> Result<FilterResult> {
    let (a0, b0) = effs.first().ok_or(Error::ZeroFilter(0.0))?;
    let dims = BipartiteDims::new(a0.dim(), b0.dim());
    let mut num = CMatrix::zeros(dims.total());
    for ((a, b), w) in effs.iter().zip(weights) {
        num += &kron(a, b).scale_real(*w);
    }
    let k = num.trace().re;
    if !(k > tol().filter_min) {
        return Err(Error::ZeroFilter(k));
    }
    let q = DensityMatrix::new(num.hermitian_part().scale_real(1.0 / k), Some(dims))?;
    Ok(FilterResult { q, k })
}

/// `(N(P_sigma), K F(Q))` for the separable state assembled from `dec`.
pub fn check_filtering_identity(
    f: &NonlinearWitness,
    w: &MdiWitness,
    dec: &SeparableDecomposition,
    a1: &PovmEffect,
    b1: &PovmEffect,
) -> Result<(f64, f64)> {
    let filt = filter_state(&effective_povms(a1, b1, dec)?, &dec.weights)?;
    let sigma = DensityMatrix::from_positive(dec.state().hermitian_part(), Some(w.dims))?;
    let lhs = eval_mdi_new(w, &prob_table(&sigma, w, a1, b1)?)?;
    let rhs = filt.k * eval_nonlinear_op(f, filt.q.mat())?;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Werner,
    Bound,
}

impl Case {
    pub fn witness(self) -> NonlinearWitness {
        match self {
            Case::Werner => werner_witness(),
            Case::Bound => bound_witness(),
        }
    }

    pub fn mdi_witness(self) -> MdiWitness {
        let f = self.witness();
        let basis = match self {
            Case::Werner => pauli_basis,
            Case::Bound => gellmann_basis,
        };
        build_mdi_witness(&f, basis(), basis()).expect("canonical decomposition")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub case: Case,
    pub trials: u64,
    pub failures: u64,
    /// Trials with `pmm` at or below the cutoff, where `N` is undefined.
    pub skipped: u64,
    pub worst_value: f64,
    pub worst_identity_gap: f64,
    pub runtime_ms: u64,
}

struct Trial {
    value: Option<f64>,
    gap: f64,
    failed: bool,
}

fn run_trial(f: &NonlinearWitness, w: &MdiWitness, seed: u64, index: u64) -> Trial {
    let t = tol();
    let dims = w.dims;
    let mut rng = rng_for(seed, index);
    let (_, dec) = random_separable_rng(dims, 2 * dims.total(), &mut rng);
    let a1 = random_effect_rng(dims.a * dims.a, &mut rng);
    let b1 = random_effect_rng(dims.b * dims.b, &mut rng);
    match check_filtering_identity(f, w, &dec, &a1, &b1) {
        Ok((lhs, rhs)) => {
            let gap = (lhs - rhs).abs();
            Trial {
                value: Some(lhs),
                gap,
                failed: lhs < -t.separable_slack || gap > t.separable_slack,
            }
        }
        Err(Error::DegenerateDenominator(_)) | Err(Error::ZeroFilter(_)) => Trial {
            value: None,
            gap: 0.0,
            failed: false,
        },
        Err(_) => Trial {
            value: None,
            gap: f64::INFINITY,
            failed: true,
        },
    }
}

/// Separable-positivity and filtering-identity trials, run in parallel. Trial
/// `i` draws from stream `i` of the seed, so results do not depend on
/// scheduling.
pub fn run_suite(case: Case, trials: u64, seed: u64) -> VerifyReport {
    let start = Instant::now();
    let f = case.witness();
    let w = case.mdi_witness();
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(&f, &w, seed, i))
        .collect();
    let mut report = VerifyReport {
        case,
        trials,
        failures: 0,
        skipped: 0,
        worst_value: f64::INFINITY,
        worst_identity_gap: 0.0,
        runtime_ms: 0,
    };
    for r in &results {
        report.failures += r.failed as u64;
        match r.value {
            Some(v) => report.worst_value = report.worst_value.min(v),
            None => report.skipped += 1,
        }
        report.worst_identity_gap = report.worst_identity_gap.max(r.gap);
    }
    report.runtime_ms = start.elapsed().as_millis() as u64;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdi::mes_effect;

    #[test]
    fn scalar_cases() {
        assert_eq!(random_density(1, 7).mat()[(0, 0)], C64::new(1.0, 0.0));
        let e = random_effect(1, 3).mat()[(0, 0)].re;
        assert!((0.0..=1.0).contains(&e));
    }

    #[test]
    fn determinism() {
        assert_eq!(random_density(3, 42).mat(), random_density(3, 42).mat());
        assert_ne!(random_density(3, 42).mat(), random_density(3, 43).mat());
        let a = random_separable(BipartiteDims::new(2, 3), 4, 9).0;
        let b = random_separable(BipartiteDims::new(2, 3), 4, 9).0;
        assert_eq!(a.mat(), b.mat());
    }

    #[test]
    fn separable_weights_and_ppt() {
        let (rho, dec) = random_separable(BipartiteDims::new(3, 3), 1, 5);
        assert_eq!(dec.weights, vec![1.0]);
        assert!(rho.ppt_min_eigenvalue().unwrap() >= -1e-10);
        let (_, dec) = random_separable(BipartiteDims::new(2, 2), 8, 6);
        assert!((dec.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mes_effective_povms_are_scaled_states() {
        let (_, dec) = random_separable(BipartiteDims::new(3, 3), 3, 11);
        let effs = effective_povms(&mes_effect(3), &mes_effect(3), &dec).unwrap();
        for ((a, b), (sa, sb)) in effs.iter().zip(dec.parts_a.iter().zip(&dec.parts_b)) {
            assert!(a.max_abs_diff(&sa.mat().scale_real(1.0 / 3.0)) < 1e-14);
            assert!(b.max_abs_diff(&sb.mat().scale_real(1.0 / 3.0)) < 1e-14);
        }
        let filt = filter_state(&effs, &dec.weights).unwrap();
        assert!((filt.k - 1.0 / 9.0).abs() < 1e-14);
        assert!(filt.q.mat().max_abs_diff(&dec.state()) < 1e-13);
    }

    #[test]
    fn identity_effects() {
        let (_, dec) = random_separable(BipartiteDims::new(2, 2), 2, 1);
        let id = PovmEffect::new(CMatrix::identity(4)).unwrap();
        let effs = effective_povms(&id, &id, &dec).unwrap();
        for (a, _) in &effs {
            assert!(a.max_abs_diff(&CMatrix::identity(2)) < 1e-14);
        }
        let filt = filter_state(&effs, &dec.weights).unwrap();
        assert!((filt.k - 4.0).abs() < 1e-13);
        assert!(
            filt.q
                .mat()
                .max_abs_diff(&CMatrix::identity(4).scale_real(0.25))
                < 1e-14
        );
    }

    #[test]
    fn zero_effect_filter() {
        let (_, dec) = random_separable(BipartiteDims::new(2, 2), 2, 1);
        let zero = PovmEffect::new(CMatrix::zeros(4)).unwrap();
        let f = werner_witness();
        let w = Case::Werner.mdi_witness();
        let r = check_filtering_identity(&f, &w, &dec, &zero, &mes_effect(2));
        assert!(matches!(r, Err(Error::ZeroFilter(_))));
    }

    #[test]
    fn small_suites_pass() {
        for case in [Case::Werner, Case::Bound] {
            let r = run_suite(case, 50, 2024);
            assert_eq!(r.failures, 0, "{r:?}");
            assert!(r.worst_value >= -1e-9);
        }
    }

    #[test]
    fn suite_is_deterministic() {
        let a = run_suite(Case::Werner, 20, 77);
        let b = run_suite(Case::Werner, 20, 77);
        assert_eq!(a.worst_value, b.worst_value);
        assert_eq!(a.worst_identity_gap, b.worst_identity_gap);
    }
}
