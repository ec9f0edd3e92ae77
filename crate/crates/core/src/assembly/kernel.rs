//! Smallest eigenpairs of a symmetric matrix by shifted inverse subspace
//! iteration.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{MatMut, Side};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::solver::{orthonormalize, project_out};
use super::sparse::{dot, norm, CsrMatrix};
use crate::{Error, Result};

/// Eigenvalues below `DEFAULT_KERNEL_THRESHOLD * |A|_1` count as kernel.
pub const DEFAULT_KERNEL_THRESHOLD: f64 = 1e-8;

/// Shift of the factorised matrix relative to `|A|_1`.
const RELATIVE_SHIFT: f64 = 1e-10;
const MAX_SWEEPS: usize = 60;
/// Extra block vectors beyond `dim_hint`. Symmetric surfaces produce
/// clustered eigenvalues; the guard keeps the convergence ratio
/// `lambda_i / lambda_{m+1}` away from one when a cluster straddles the
/// requested count.
const GUARD_VECTORS: usize = 4;

#[derive(Clone, Debug)]
pub struct KernelEstimate {
    /// Ritz values in increasing order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal Ritz vectors matching `eigenvalues`.
    pub vectors: Vec<Vec<f64>>,
    /// Absolute kernel cut-off, `threshold * |A|_1`.
    pub cutoff: f64,
    pub outer_iterations: usize,
}

impl KernelEstimate {
    pub fn kernel_dim(&self) -> usize {
        self.eigenvalues.iter().filter(|&&l| l < self.cutoff).count()
    }

    pub fn kernel_vectors(&self) -> &[Vec<f64>] {
        &self.vectors[..self.kernel_dim()]
    }
}

/// Sparse Cholesky factor of `a + sigma I` (`a` symmetric, so its CSR
/// arrays double as CSC arrays of the same matrix).
fn shifted_factor(a: &CsrMatrix, sigma: f64) -> Result<Llt<usize, f64>> {
    let n = a.n();
    let (row_ptr, cols, vals) = a.raw_parts();
    let idx: Vec<usize> = cols.iter().map(|&c| c as usize).collect();
    let mut shifted = vals.to_vec();
    for i in 0..n {
        let (start, end) = (row_ptr[i], row_ptr[i + 1]);
        let k = idx[start..end]
            .iter()
            .position(|&j| j == i)
            .ok_or_else(|| Error::KernelEstimationFailed(format!("row {i} has no diagonal entry")))?;
        shifted[start + k] += sigma;
    }
    let symbolic = SymbolicSparseColMatRef::new_checked(n, n, row_ptr, None, &idx);
    SparseColMatRef::new(symbolic, &shifted)
        .sp_cholesky(Side::Lower)
        .map_err(|e| Error::KernelEstimationFailed(format!("factorisation: {e}")))
}

/// Approximates the `dim_hint` smallest eigenpairs of the symmetric
/// positive semidefinite matrix `a`.
///
/// Each sweep applies `(a + sigma I)^{-1}` to the current block through a
/// sparse Cholesky factor, re-orthonormalises by Gram-Schmidt and performs
/// a Rayleigh-Ritz step with `a` itself. The tiny shift `sigma` keeps the
/// factorisation well defined when `a` is singular. The block carries a few
/// guard vectors that are not reported. Iteration stops once each of the
/// `dim_hint` lowest Ritz pairs has a residual below a thousandth of
/// `max(lambda, cutoff)`.
pub fn numerical_kernel(a: &CsrMatrix, dim_hint: usize, threshold: f64) -> Result<KernelEstimate> {
    if dim_hint == 0 {
        return Err(Error::KernelEstimationFailed("dim_hint must be at least 1".into()));
    }
    let n = a.n();
    if dim_hint > n {
        return Err(Error::KernelEstimationFailed(format!(
            "dim_hint {dim_hint} exceeds matrix size {n}"
        )));
    }
    let a_norm = a.norm1();
    let cutoff = threshold * a_norm;
    let factor = shifted_factor(a, RELATIVE_SHIFT * a_norm)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let m = (dim_hint + GUARD_VECTORS).min(n);
    let mut block: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    block = orthonormalize(&block);
    for outer in 1..=MAX_SWEEPS {
        let mut next = block.clone();
        for v in &mut next {
            factor.solve_in_place(MatMut::from_column_major_slice_mut(v.as_mut_slice(), n, 1));
        }
        let q = orthonormalize(&next);
        if q.len() < m {
            return Err(Error::KernelEstimationFailed("block lost rank".into()));
        }
        let aq: Vec<Vec<f64>> = q.iter().map(|v| a.matvec(v)).collect();
        let h = DMatrix::from_fn(m, m, |i, j| {
            0.5 * (dot(&q[i], &aq[j]) + dot(&q[j], &aq[i]))
        });
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let ritz: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        block = order
            .iter()
            .map(|&k| {
                let mut v = vec![0.0; n];
                for (j, qj) in q.iter().enumerate() {
                    let c = eig.eigenvectors[(j, k)];
                    v.iter_mut().zip(qj).for_each(|(vi, x)| *vi += c * x);
                }
                v
            })
            .collect();
        for i in 1..block.len() {
            let (done, rest) = block.split_at_mut(i);
            project_out(done, &mut rest[0]);
            let nv = norm(&rest[0]);
            rest[0].iter_mut().for_each(|x| *x /= nv);
        }
        let converged = ritz.iter().zip(&block).take(dim_hint).all(|(&l, v)| {
            let mut r = a.matvec(v);
            r.iter_mut().zip(v).for_each(|(ri, vi)| *ri -= l * vi);
            norm(&r) <= 1e-3 * l.abs().max(cutoff)
        });
        if converged {
            block.truncate(dim_hint);
            return Ok(KernelEstimate {
                eigenvalues: ritz[..dim_hint].to_vec(),
                vectors: block,
                cutoff,
                outer_iterations: outer,
            });
        }
    }
    Err(Error::KernelEstimationFailed(format!(
        "no convergence after {MAX_SWEEPS} subspace sweeps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_smallest_eigenpairs_of_diagonal_matrix() {
        let n = 50;
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0 + i as f64)).collect();
        let a = CsrMatrix::from_triplets(n, &t);
        let est = numerical_kernel(&a, 3, 1e-8).unwrap();
        // residual below 1e-3 * lambda and unit spectral gap bound the Ritz
        // value error by (1e-3 * lambda)^2
        for (k, l) in est.eigenvalues.iter().enumerate() {
            let err = l - (k as f64 + 1.0);
            assert!(err >= -1e-12 && err <= (1e-3 * l).powi(2), "{:?}", est.eigenvalues);
        }
        assert_eq!(est.kernel_dim(), 0);
        for i in 0..3 {
            for j in 0..3 {
                let d = dot(&est.vectors[i], &est.vectors[j]);
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((d - e).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn detects_near_null_direction() {
        let n = 40;
        let mut t: Vec<_> = (0..n).map(|i| (i, i, 2.0 + i as f64)).collect();
        t[17] = (17, 17, 1e-12);
        let a = CsrMatrix::from_triplets(n, &t);
        let est = numerical_kernel(&a, 2, 1e-8).unwrap();
        assert_eq!(est.kernel_dim(), 1);
        assert!(est.kernel_vectors()[0][17].abs() > 1.0 - 1e-10);
        assert!(numerical_kernel(&a, 0, 1e-8).is_err());
        assert!(numerical_kernel(&a, 41, 1e-8).is_err());
    }

    #[test]
    fn exactly_singular_matrix() {
        // periodic path Laplacian: kernel is the constant vector
        let n = 30;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            t.push((i, (i + 1) % n, -1.0));
            t.push((i, (i + n - 1) % n, -1.0));
        }
        let a = CsrMatrix::from_triplets(n, &t);
        let est = numerical_kernel(&a, 2, 1e-8).unwrap();
        assert_eq!(est.kernel_dim(), 1);
        let c = 1.0 / (n as f64).sqrt();
        let align: f64 = est.vectors[0].iter().map(|v| v * c).sum();
        assert!(align.abs() > 1.0 - 1e-10);
        let expected = 2.0 - 2.0 * (std::f64::consts::TAU / n as f64).cos();
        assert!((est.eigenvalues[1] - expected).abs() < 1e-6);
    }
}
