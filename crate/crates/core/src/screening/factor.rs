use nalgebra::{Cholesky, DMatrix, Dyn};
use sprs::{CsMat, FillInReduction, SymmetryCheck};
use sprs_ldl::{Ldl, LdlNumeric};

/// Pivots smaller than this fraction of the largest pivot are treated as zero.
const PIVOT_RTOL: f64 = 1e-13;

/// Factorization of the reduced susceptance matrix.
///
/// Small systems use a dense Cholesky; larger ones a sparse LDLᵀ with a
/// reverse Cuthill-McKee ordering. Both only need `&self` to solve, so the
/// factors can be shared between threads.
pub(crate) enum Factor {
    Dense(Cholesky<f64, Dyn>),
    Sparse(Box<LdlNumeric<f64, usize>>),
}

impl Factor {
    pub(crate) fn new(matrix: &CsMat<f64>, dense_below: usize) -> Result<Self, String> {
        let n = matrix.rows();
        if n < dense_below {
            let mut dense = DMatrix::<f64>::zeros(n, n);
            for (&value, (i, j)) in matrix.iter() {
                dense[(i, j)] += value;
            }
            let max_diag = dense.diagonal().iter().fold(0.0f64, |m, &d| m.max(d));
            let chol = Cholesky::new(dense).ok_or_else(|| "matrix is not positive definite".to_string())?;
            check_pivots(chol.l_dirty().diagonal().iter().map(|l| l * l), max_diag)?;
            Ok(Factor::Dense(chol))
        } else {
            let ldl = Ldl::new()
                .check_symmetry(SymmetryCheck::DontCheckSymmetry)
                .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
                .numeric(matrix.view())
                .map_err(|e| e.to_string())?;
            let max_diag = ldl.d().iter().fold(0.0f64, |m, &d| m.max(d));
            check_pivots(ldl.d().iter().copied(), max_diag)?;
            Ok(Factor::Sparse(Box::new(ldl)))
        }
    }

    pub(crate) fn is_dense(&self) -> bool {
        matches!(self, Factor::Dense(_))
    }

    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        match self {
            Factor::Dense(chol) => {
                let b = nalgebra::DVector::from_column_slice(rhs);
                chol.solve(&b).as_slice().to_vec()
            }
            Factor::Sparse(ldl) => ldl.solve(rhs.to_vec()),
        }
    }
}

fn check_pivots(pivots: impl Iterator<Item = f64>, scale: f64) -> Result<(), String> {
    for (k, d) in pivots.enumerate() {
        if !(d.is_finite() && d > PIVOT_RTOL * scale) {
            return Err(format!("pivot {k} is {d:e}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use sprs::TriMat;

    fn laplacian_path(n: usize) -> CsMat<f64> {
        // grounded path: tridiagonal [2 -1; -1 2 ...]
        let mut t = TriMat::new((n, n));
        for i in 0..n {
            t.add_triplet(i, i, 2.0);
            if i + 1 < n {
                t.add_triplet(i, i + 1, -1.0);
                t.add_triplet(i + 1, i, -1.0);
            }
        }
        t.to_csc()
    }

    #[test]
    fn dense_and_sparse_agree() {
        let m = laplacian_path(40);
        let rhs: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let dense = Factor::new(&m, usize::MAX).unwrap();
        let sparse = Factor::new(&m, 0).unwrap();
        assert!(dense.is_dense() && !sparse.is_dense());
        let (a, b) = (dense.solve(&rhs), sparse.solve(&rhs));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        let mut back = vec![0.0; 40];
        for (&v, (i, j)) in m.iter() {
            back[i] += v * a[j];
        }
        for (r, e) in back.iter().zip(&rhs) {
            assert!((r - e).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_is_reported() {
        let mut t = TriMat::new((2, 2));
        for (i, j, v) in [(0, 0, 1.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 1.0)] {
            t.add_triplet(i, j, v);
        }
        let m: CsMat<f64> = t.to_csc();
        assert!(Factor::new(&m, usize::MAX).is_err());
        assert!(Factor::new(&m, 0).is_err());
    }
}
