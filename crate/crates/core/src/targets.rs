//! Reference coefficient tables for the two canonical witnesses, used as
//! regression targets.
//!
//! `gamma` and `nu` are stored as given. Decomposing over the
//! transposed basis reproduces them up to an overall sign (see
//! [`Agreement::Negated`]); the nonlinear functional only uses their squares.

use crate::basis::CoeffMatrix;

fn table<const N: usize>(rows: [[f64; N]; N]) -> CoeffMatrix {
    let r: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    CoeffMatrix::from_rows(&r).expect("static table")
}

pub fn alpha() -> CoeffMatrix {
    table([
        [1.0, 0.0, 0.0, -1.0],
        [0.0, 1.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, -1.0],
        [-1.0, -1.0, -1.0, 4.0],
    ])
}

pub fn beta() -> CoeffMatrix {
    table([
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, -2.0],
    ])
}

pub fn gamma() -> CoeffMatrix {
    table([
        [0.0, 1.0, 0.0, -1.0],
        [-1.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0, 0.0],
        [1.0, -1.0, 0.0, 0.0],
    ])
}

pub fn lambda() -> CoeffMatrix {
    let (h, q) = (1.5, 0.75);
    table([
        [3.75, h, -h, -2.25, h, -h, h, -h, 0.5],
        [h, -h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [-h, 0.0, h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [q, 0.0, 0.0, q, 0.0, 0.0, 0.0, 0.0, -h],
        [h, 0.0, 0.0, 0.0, -h, 0.0, 0.0, 0.0, 0.0],
        [-h, 0.0, 0.0, 0.0, 0.0, h, 0.0, 0.0, 0.0],
        [h, 0.0, 0.0, 0.0, 0.0, 0.0, -h, 0.0, 0.0],
        [-h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, h, 0.0],
        [-2.5, 0.0, 0.0, h, 0.0, 0.0, 0.0, 0.0, 1.0],
    ])
}

struct Root3 {
    a: f64,
    b: f64,
    c: f64,
    e: f64,
    f: f64,
    g: f64,
}

/// `a = 3 r/8`, `b = 3 r/4`, `c = r/2`, `e = r/4`, `f = 3 r/2`, `g = 9 r/8`
/// with `r = sqrt 3`.
fn root3() -> Root3 {
    let r = 3f64.sqrt();
    Root3 {
        a: 3.0 * r / 8.0,
        b: 3.0 * r / 4.0,
        c: r / 2.0,
        e: r / 4.0,
        f: 3.0 * r / 2.0,
        g: 9.0 * r / 8.0,
    }
}

pub fn mu() -> CoeffMatrix {
    let Root3 { a, b, c, e, f, .. } = root3();
    table([
        [-a, a, -a, 0.0, b, -b, -b, -a, -c],
        [b, 0.0, 0.0, a, -a, 0.0, 0.0, 0.0, e],
        [-a, 0.0, 0.0, 0.0, 0.0, a, 0.0, 0.0, 0.0],
        [-a, 0.0, 0.0, 0.0, 0.0, 0.0, a, 0.0, 0.0],
        [b, -a, 0.0, 0.0, 0.0, 0.0, -a, 0.0, 0.0],
        [-b, 0.0, a, 0.0, 0.0, 0.0, 0.0, a, 0.0],
        [f, 0.0, 0.0, -a, -a, 0.0, 0.0, 0.0, e],
        [-a, 0.0, 0.0, 0.0, 0.0, a, 0.0, 0.0, 0.0],
        [e, -c, 0.0, 0.0, 0.0, 0.0, e, 0.0, 0.0],
    ])
}

pub fn nu() -> CoeffMatrix {
    let Root3 { a, b, f, g, .. } = root3();
    table([
        [-a, a, g, -b, 0.0, 0.0, -a, 0.0, 0.0],
        [a, 0.0, 0.0, 0.0, 0.0, -a, 0.0, 0.0, 0.0],
        [b, 0.0, 0.0, a, -a, 0.0, 0.0, 0.0, -b],
        [a, 0.0, -b, 0.0, 0.0, 0.0, 0.0, a, 0.0],
        [0.0, 0.0, -a, 0.0, 0.0, 0.0, 0.0, a, 0.0],
        [0.0, -a, 0.0, 0.0, 0.0, 0.0, a, 0.0, 0.0],
        [-a, 0.0, 0.0, 0.0, 0.0, a, 0.0, 0.0, 0.0],
        [-f, 0.0, 0.0, a, a, 0.0, 0.0, 0.0, b],
        [b, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -b, 0.0],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Exact,
    /// Equal to the negated target; indistinguishable inside a square.
    Negated,
    Mismatch,
}

/// Classifies `computed` against `target` at tolerance `tol`, together with
/// the smaller of the two deviations.
pub fn compare(computed: &CoeffMatrix, target: &CoeffMatrix, tol: f64) -> (Agreement, f64) {
    let direct = computed.max_abs_diff(target);
    let flipped = computed.max_abs_diff(&target.scaled(-1.0));
    if direct <= tol {
        (Agreement::Exact, direct)
    } else if flipped <= tol {
        (Agreement::Negated, flipped)
    } else {
        (Agreement::Mismatch, direct.min(flipped))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        for m in [alpha(), beta(), gamma()] {
            assert_eq!((m.rows(), m.cols()), (4, 4));
        }
        for m in [lambda(), mu(), nu()] {
            assert_eq!((m.rows(), m.cols()), (9, 9));
        }
    }

    #[test]
    fn spot_entries() {
        assert_eq!(alpha().get(3, 3), 4.0);
        assert_eq!(lambda().get(0, 0), 3.75);
        assert!((mu().get(0, 8) + 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((nu().get(0, 2) - 9.0 * 3f64.sqrt() / 8.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_reconstructs_half_swap() {
        use crate::basis::{pauli_basis, reconstruct};
        use crate::linalg::{CMatrix, C64};
        let b = pauli_basis();
        let w = reconstruct(&alpha(), &b, &b).unwrap();
        let half_swap = CMatrix::from_fn(4, |r, c| {
            let hit = r / 2 == c % 2 && r % 2 == c / 2;
            C64::new(if hit { 0.5 } else { 0.0 }, 0.0)
        });
        assert!(w.max_abs_diff(&half_swap) < 1e-12);
    }

    #[test]
    fn compare_classifies() {
        let g = gamma();
        assert_eq!(compare(&g, &g, 1e-9).0, Agreement::Exact);
        assert_eq!(compare(&g.scaled(-1.0), &g, 1e-9).0, Agreement::Negated);
        assert_eq!(compare(&alpha(), &g, 1e-9).0, Agreement::Mismatch);
    }
}
