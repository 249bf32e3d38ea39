//! Central tolerance record.
//!
//! Every numerical threshold used by the library lives here and is looked up
//! by name. The record is process-wide and read-only once first used; a front
//! end may [`Tolerances::install`] an override before any computation runs.

use std::str::FromStr;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max-norm deviation allowed between a matrix and its adjoint.
    pub hermitian: f64,
    /// Smallest admissible eigenvalue of a "positive" operator.
    pub psd: f64,
    /// Deviation of a density-matrix trace from 1.
    pub trace: f64,
    /// Deviation of a pure-state norm from 1.
    pub norm: f64,
    /// Eigen-residual and orthonormality bound.
    pub eig_residual: f64,
    /// Jacobi stop criterion on the off-diagonal Frobenius mass.
    pub jacobi_offdiag: f64,
    pub jacobi_max_sweeps: usize,
    /// Relative residual of linear solves.
    pub solve_residual: f64,
    /// Largest admissible condition estimate.
    pub condition_max: f64,
    /// Imaginary residue tolerated (then discarded) in real-valued traces.
    pub imag_residue: f64,
    /// Basis decomposition reconstruction error.
    pub decomposition: f64,
    /// Smallest admissible witness denominator s(X) or s(Y) g.
    pub denom_min: f64,
    /// Smallest admissible P(1,1|m_A,m_B).
    pub pmm_min: f64,
    /// Smallest admissible filter normalization K.
    pub filter_min: f64,
    /// Slack on the effect condition 0 <= E <= I.
    pub effect: f64,
    /// Slack on probabilities lying in [0, 1].
    pub probability: f64,
    /// Slack on "never negative on separable states".
    pub separable_slack: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        psd: 1e-10,
        trace: 1e-12,
        norm: 1e-12,
        eig_residual: 1e-10,
        jacobi_offdiag: 1e-14,
        jacobi_max_sweeps: 100,
        solve_residual: 1e-9,
        condition_max: 1e12,
        imag_residue: 1e-10,
        decomposition: 1e-9,
        denom_min: 1e-12,
        pmm_min: 1e-12,
        filter_min: 1e-14,
        effect: 1e-10,
        probability: 1e-12,
        separable_slack: 1e-9,
    };

    /// Installs `tol` as the process-wide record. Returns `false` if a record
    /// was already installed or read.
    pub fn install(tol: Tolerances) -> bool {
        ACTIVE.set(tol).is_ok()
    }

    /// Applies `key=value` overrides separated by commas, e.g.
    /// `psd=1e-9,separable_slack=1e-8`.
    pub fn with_overrides(mut self, overrides: &str) -> Result<Self, String> {
        for item in overrides
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
        {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{item}`"))?;
            let key = key.trim();
            let value = value.trim();
            if key == "jacobi_max_sweeps" {
                self.jacobi_max_sweeps =
                    usize::from_str(value).map_err(|e| format!("bad value for {key}: {e}"))?;
                continue;
            }
            let v = f64::from_str(value).map_err(|e| format!("bad value for {key}: {e}"))?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("tolerance {key} must be finite and nonnegative"));
            }
            let slot = match key {
                "hermitian" => &mut self.hermitian,
                "psd" => &mut self.psd,
                "trace" => &mut self.trace,
                "norm" => &mut self.norm,
                "eig_residual" => &mut self.eig_residual,
                "jacobi_offdiag" => &mut self.jacobi_offdiag,
                "solve_residual" => &mut self.solve_residual,
                "condition_max" => &mut self.condition_max,
                "imag_residue" => &mut self.imag_residue,
                "decomposition" => &mut self.decomposition,
                "denom_min" => &mut self.denom_min,
                "pmm_min" => &mut self.pmm_min,
                "filter_min" => &mut self.filter_min,
                "effect" => &mut self.effect,
                "probability" => &mut self.probability,
                "separable_slack" => &mut self.separable_slack,
                _ => return Err(format!("unknown tolerance `{key}`")),
            };
            *slot = v;
        }
        Ok(self)
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

static ACTIVE: OnceLock<Tolerances> = OnceLock::new();

/// The active tolerance record.
pub fn tol() -> &'static Tolerances {
    ACTIVE.get_or_init(Tolerances::default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let t = Tolerances::DEFAULT
            .with_overrides("psd=1e-9, jacobi_max_sweeps=20")
            .unwrap();
        assert_eq!(t.psd, 1e-9);
        assert_eq!(t.jacobi_max_sweeps, 20);
        assert_eq!(t.hermitian, 1e-12);
    }

    #[test]
    fn overrides_reject_garbage() {
        assert!(Tolerances::DEFAULT.with_overrides("nope=1").is_err());
        assert!(Tolerances::DEFAULT.with_overrides("psd").is_err());
        assert!(Tolerances::DEFAULT.with_overrides("psd=-1").is_err());
    }
}
