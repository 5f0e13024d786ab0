//! Dense symmetric linear algebra on top of `faer`.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Relative eigenvalue threshold separating the numerical null space.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Eigenvalues (ascending) and matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

pub fn sym_eigen(m: &Mat<f64>) -> Result<SymEigen> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..s.nrows()).map(|i| s[i]).collect();
    Ok(SymEigen {
        values,
        vectors: evd.U().to_owned(),
    })
}

/// Ascending eigenvalues only.
pub fn sym_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Linalg(format!("{e:?}")))
}

/// `M^+ v`, inverting eigenvalues above `rel_tol * max eigenvalue` and zeroing the rest.
pub fn pinv_apply(m: &Mat<f64>, v: &[f64], rel_tol: f64) -> Result<Vec<f64>> {
    let eig = sym_eigen(m)?;
    pinv_apply_with(&eig, v, rel_tol)
}

/// As [`pinv_apply`] with a precomputed decomposition.
pub fn pinv_apply_with(eig: &SymEigen, v: &[f64], rel_tol: f64) -> Result<Vec<f64>> {
    let dim = v.len();
    let top = eig.values.iter().copied().fold(0.0, f64::max);
    if !(top > 0.0) {
        return Err(Error::DegenerateMatrix);
    }
    let cut = rel_tol * top;
    let mut out = vec![0.0; dim];
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= cut {
            continue;
        }
        let col = eig.vectors.col(k);
        let coef: f64 = (0..dim).map(|i| col[i] * v[i]).sum::<f64>() / lambda;
        for (i, o) in out.iter_mut().enumerate() {
            *o += coef * col[i];
        }
    }
    Ok(out)
}

/// Number of eigenvalues at or below `rel_tol * max eigenvalue`.
pub fn null_count(values: &[f64], rel_tol: f64) -> usize {
    let top = values.iter().copied().fold(0.0, f64::max);
    values.iter().filter(|&&l| l <= rel_tol * top).count()
}

/// Solves `C x = p` for matrices whose null space is a known fixed subspace.
///
/// With `P0` the orthogonal projector onto that subspace, `C + P0` is
/// positive definite and `(C + P0)^{-1} = C^+ + P0`, so for `p` orthogonal to
/// the null space a Cholesky solve returns exactly `C^+ p`.
#[derive(Debug, Clone)]
pub struct SpanSolver {
    null_projector: Mat<f64>,
    work: Mat<f64>,
}

impl SpanSolver {
    /// `null_basis` holds orthonormal columns spanning the null space.
    pub fn new(null_basis: &Mat<f64>) -> Self {
        let dim = null_basis.nrows();
        let null_projector = null_basis * null_basis.transpose();
        SpanSolver {
            null_projector,
            work: Mat::zeros(dim, dim),
        }
    }

    /// Null-space basis read off an eigendecomposition with the given relative threshold.
    pub fn from_eigen(eig: &SymEigen, rel_tol: f64) -> Self {
        let k = null_count(&eig.values, rel_tol);
        let dim = eig.vectors.nrows();
        let basis = Mat::from_fn(dim, k, |i, j| eig.vectors[(i, j)]);
        Self::new(&basis)
    }

    pub fn null_projector(&self) -> &Mat<f64> {
        &self.null_projector
    }

    /// `C^+ rhs`, or `None` if `C + P0` is not numerically positive definite.
    pub fn solve(&mut self, c: &Mat<f64>, rhs: &[f64]) -> Option<Vec<f64>> {
        let dim = rhs.len();
        for j in 0..dim {
            for i in 0..dim {
                self.work[(i, j)] = c[(i, j)] + self.null_projector[(i, j)];
            }
        }
        let llt = self.work.llt(Side::Lower).ok()?;
        let mut x = Mat::from_fn(dim, 1, |i, _| rhs[i]);
        llt.solve_in_place(x.as_mut());
        let out: Vec<f64> = (0..dim).map(|i| x[(i, 0)]).collect();
        out.iter().all(|v| v.is_finite()).then_some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinv_of_rank_one() {
        // C = p p^T with |p|^2 = 3, so C^+ p = p / 3
        let p = [1.0, 0.0, 1.0, 1.0];
        let c = Mat::from_fn(4, 4, |i, j| p[i] * p[j]);
        let x = pinv_apply(&c, &p, DEFAULT_REL_TOL).unwrap();
        for i in 0..4 {
            assert!((x[i] - p[i] / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let c = Mat::<f64>::zeros(3, 3);
        assert!(matches!(pinv_apply(&c, &[1.0, 0.0, 0.0], 1e-9), Err(Error::DegenerateMatrix)));
    }

    #[test]
    fn span_solver_matches_pinv() {
        let a = [1.0, 1.0, 0.0, 0.0];
        let b = [0.0, 0.0, 1.0, 1.0];
        let c = Mat::from_fn(4, 4, |i, j| 0.3 * a[i] * a[j] + 0.7 * b[i] * b[j]);
        let eig = sym_eigen(&c).unwrap();
        assert_eq!(null_count(&eig.values, DEFAULT_REL_TOL), 2);
        let mut solver = SpanSolver::from_eigen(&eig, DEFAULT_REL_TOL);
        let x = solver.solve(&c, &a).unwrap();
        let y = pinv_apply_with(&eig, &a, DEFAULT_REL_TOL).unwrap();
        for i in 0..4 {
            assert!((x[i] - y[i]).abs() < 1e-12);
        }
    }
}
