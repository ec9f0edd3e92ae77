use super::sparse::{axpy, dot, norm, CsrMatrix};
use super::SparseSystem;
use crate::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual of the (projected) system.
    pub residual: f64,
}

/// Orthonormalises `basis` with two passes of modified Gram-Schmidt.
pub(crate) fn orthonormalize(basis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for v in basis {
        let mut w = v.clone();
        for _ in 0..2 {
            for z in &out {
                let c = dot(z, &w);
                axpy(-c, z, &mut w);
            }
        }
        let n = norm(&w);
        if n > 0.0 {
            w.iter_mut().for_each(|x| *x /= n);
            out.push(w);
        }
    }
    out
}

/// Removes the components along an orthonormal set.
pub(crate) fn project_out(z: &[Vec<f64>], v: &mut [f64]) {
    for zi in z {
        let c = dot(zi, v);
        axpy(-c, zi, v);
    }
}

/// Jacobi-preconditioned conjugate gradient restricted to the orthogonal
/// complement of `sys.nullspace`.
///
/// The right-hand side and every iterate are projected against the
/// nullspace, so the returned `x` satisfies `x . z = 0` for each kernel
/// vector `z`. Convergence is measured on the projected residual
/// `|Pi (b - A x)| / |Pi b|`.
pub fn solve(sys: &SparseSystem, rel_tol: f64) -> Result<SolveOutcome> {
    deflated_cg(&sys.matrix, &sys.rhs, &sys.nullspace, rel_tol)
}

pub(crate) fn deflated_cg(
    a: &CsrMatrix,
    rhs: &[f64],
    nullspace: &[Vec<f64>],
    rel_tol: f64,
) -> Result<SolveOutcome> {
    let n = a.n();
    let z = orthonormalize(nullspace);
    let mut b = rhs.to_vec();
    project_out(&z, &mut b);
    let b_norm = norm(&b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(SolveOutcome {
            x,
            iterations: 0,
            residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let precondition = |r: &[f64], out: &mut [f64]| {
        for ((o, ri), di) in out.iter_mut().zip(r).zip(&inv_diag) {
            *o = ri * di;
        }
        project_out(&z, out);
    };
    let max_iter = (50.0 * (n as f64).sqrt()).ceil() as usize;
    let mut r = b.clone();
    let mut s = vec![0.0; n];
    precondition(&r, &mut s);
    let mut p = s.clone();
    let mut q = vec![0.0; n];
    let mut rs = dot(&r, &s);
    let mut rel = 1.0;
    for it in 1..=max_iter {
        a.matvec_into(&p, &mut q);
        project_out(&z, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(Error::CgDidNotConverge {
                iterations: it,
                residual: rel,
            });
        }
        let alpha = rs / pq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        project_out(&z, &mut x);
        rel = norm(&r) / b_norm;
        if rel <= rel_tol {
            // confirm with the true residual to guard against drift
            let mut ax = a.matvec(&x);
            for (v, bi) in ax.iter_mut().zip(&b) {
                *v = bi - *v;
            }
            project_out(&z, &mut ax);
            let true_rel = norm(&ax) / b_norm;
            if true_rel <= rel_tol {
                return Ok(SolveOutcome {
                    x,
                    iterations: it,
                    residual: true_rel,
                });
            }
            r = ax;
        }
        precondition(&r, &mut s);
        let rs_new = dot(&r, &s);
        let beta = rs_new / rs;
        rs = rs_new;
        for (pi, si) in p.iter_mut().zip(&s) {
            *pi = si + beta * *pi;
        }
    }
    Err(Error::CgDidNotConverge {
        iterations: max_iter,
        residual: rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1D periodic Laplacian: singular with the constant vector as kernel.
    fn periodic_laplacian(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            t.push((i, (i + 1) % n, -1.0));
            t.push((i, (i + n - 1) % n, -1.0));
        }
        CsrMatrix::from_triplets(n, &t)
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let sys = SparseSystem {
            matrix: periodic_laplacian(10),
            rhs: vec![0.0; 10],
            nullspace: vec![vec![1.0; 10]],
        };
        let out = solve(&sys, 1e-10).unwrap();
        assert!(out.x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deflated_solve_on_singular_matrix() {
        let n = 64;
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin() + 0.7).collect();
        let sys = SparseSystem {
            matrix: periodic_laplacian(n),
            rhs,
            nullspace: vec![vec![1.0; n]],
        };
        let out = solve(&sys, 1e-12).unwrap();
        let sum: f64 = out.x.iter().sum();
        assert!(sum.abs() < 1e-12 * norm(&out.x) * (n as f64).sqrt());
        let mut r = sys.matrix.matvec(&out.x);
        let mean = sys.rhs.iter().sum::<f64>() / n as f64;
        for (ri, bi) in r.iter_mut().zip(&sys.rhs) {
            *ri -= bi - mean;
        }
        assert!(norm(&r) < 1e-10 * norm(&sys.rhs));
    }

    #[test]
    fn singular_without_deflation_fails_cleanly() {
        let n = 16;
        let sys = SparseSystem {
            matrix: periodic_laplacian(n),
            rhs: vec![1.0; n],
            nullspace: vec![],
        };
        assert!(matches!(solve(&sys, 1e-10), Err(Error::CgDidNotConverge { .. })));
    }
}
