//! Dense Hermitian linear algebra shared by the fitting and verification
//! paths: eigenvalue extraction and a PSD solver with a least-squares
//! fallback for singular Gram matrices.

use nalgebra::{DMatrix, DVector};

use crate::base::C64;
use crate::error::{Error, Result};

/// Condition-number estimate above which the direct Cholesky route is
/// abandoned for the SVD pseudo-solve.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Singular values (eigenvalue magnitudes of the Hermitian system matrix)
/// below `REL_SV_CUTOFF * sigma_max` are treated as zero in the
/// pseudo-solve.
pub const REL_SV_CUTOFF: f64 = 1e-10;

///// Averages away rounding asymmetry: (A + A^H)/2.
pub fn hermitianize(a: &DMatrix<C64>) -> DMatrix<C64> {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenvalues of the Hermitian part of `a`, unordered.
pub fn hermitian_eigenvalues(a: &DMatrix<C64>) -> DVector<f64> {
    hermitianize(a).symmetric_eigenvalues()
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(a)
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Outcome of a Gram-system solve, with enough metadata for callers to
/// decide between "fit" and "infeasibility report".
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: DVector<C64>,
    /// Euclidean residual ||(G + ridge I) x - b||.
    pub residual: f64,
    /// Smallest singular value of G + ridge I; only computed on the
    /// pseudo-solve path.
    pub min_singular_value: Option<f64>,
    /// True when the SVD least-squares fallback produced the solution.
    pub used_pseudo_solve: bool,
}

/// Solves (G + ridge I) x = b for a Hermitian PSD `G`.
///
/// The direct route is a Cholesky factorization, taken when it exists and
/// its diagonal-based condition estimate stays below [`CONDITION_LIMIT`].
/// Otherwise the minimum-norm least-squares solution is computed from the
/// Hermitian eigendecomposition (the SVD of a Hermitian matrix up to signs)
/// with relative cutoff [`REL_SV_CUTOFF`], and the residual reported in the
/// outcome tells the caller whether the system was consistent.
pub fn solve_hermitian_psd(g: &DMatrix<C64>, b: &DVector<C64>, ridge: f64) -> Result<SolveOutcome> {
    let n = g.nrows();
    if !g.is_square() || b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
            context: "linear system right-hand side",
        });
    }
    if ridge.is_nan() || ridge < 0.0 {
        return Err(Error::InvalidTolerance(format!(
            "ridge must be nonnegative, got {ridge}"
        )));
    }

    let mut a = hermitianize(g);
    for i in 0..n {
        a[(i, i)] += C64::new(ridge, 0.0);
    }

    if let Some(chol) = a.clone().cholesky() {
        let diag = chol.l_dirty().map_diagonal(|d| d.re);
        let d_max = diag.iter().copied().fold(0.0f64, f64::max);
        let d_min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let cond_estimate = if d_min > 0.0 {
            (d_max / d_min).powi(2)
        } else {
            f64::INFINITY
        };
        if cond_estimate <= CONDITION_LIMIT {
            let x = chol.solve(b);
            let residual = (&a * &x - b).norm();
            return Ok(SolveOutcome {
                solution: x,
                residual,
                min_singular_value: None,
                used_pseudo_solve: false,
            });
        }
    }

    let eig = nalgebra::SymmetricEigen::new(a.clone());
    let sv_max = eig.eigenvalues.iter().fold(0.0f64, |acc, &l| acc.max(l.abs()));
    let sv_min = eig
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &l| acc.min(l.abs()));
    let cutoff = sv_max * REL_SV_CUTOFF;
    let qh_b = eig.eigenvectors.adjoint() * b;
    let scaled = DVector::from_iterator(
        n,
        qh_b.iter()
            .zip(eig.eigenvalues.iter())
            .map(|(&c, &l)| {
                if l.abs() > cutoff {
                    c / C64::new(l, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
    );
    let x = &eig.eigenvectors * scaled;
    let residual = (&a * &x - b).norm();
    Ok(SolveOutcome {
        solution: x,
        residual,
        min_singular_value: Some(sv_min),
        used_pseudo_solve: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn direct_solve_on_well_conditioned_system() {
        let e1 = (-1.0f64).exp();
        let g = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(e1, 0.0), c(e1, 0.0), c(1.0, 0.0)]);
        let b = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let out = solve_hermitian_psd(&g, &b, 0.0).unwrap();
        assert!(!out.used_pseudo_solve);
        // hand 2x2 inverse: c1 = 1/(1-e^-2), c2 = -e^-1/(1-e^-2)
        let det = 1.0 - e1 * e1;
        assert!((out.solution[0].re - 1.0 / det).abs() < 1e-12);
        assert!((out.solution[1].re + e1 / det).abs() < 1e-12);
        assert!(out.residual < 1e-12);
    }

    #[test]
    fn pseudo_solve_on_singular_consistent_system() {
        // rank-1 duplicated constraint
        let g = DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
        );
        let b = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let out = solve_hermitian_psd(&g, &b, 0.0).unwrap();
        assert!(out.used_pseudo_solve);
        assert!(out.residual < 1e-12);
        // minimum-norm solution splits the weight evenly
        assert!((out.solution[0].re - 0.5).abs() < 1e-12);
        assert!((out.solution[1].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pseudo_solve_reports_inconsistent_residual() {
        let g = DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)],
        );
        let b = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let out = solve_hermitian_psd(&g, &b, 0.0).unwrap();
        assert!(out.used_pseudo_solve);
        // b is orthogonal to the range, so the full right-hand side survives
        assert!((out.residual - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ridge_regularizes_singular_system() {
        let g = DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
        );
        let b = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let out = solve_hermitian_psd(&g, &b, 1e-6).unwrap();
        assert!(!out.used_pseudo_solve);
        assert!(out.residual < 1e-9);
    }

    #[test]
    fn min_eigenvalue_of_skew_test_matrix() {
        // [[0,-1],[-1,0]] has eigenvalues -1 and 1
        let g = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)],
        );
        assert!((min_eigenvalue(&g) + 1.0).abs() < 1e-12);
    }
}
