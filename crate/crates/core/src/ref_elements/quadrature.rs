//! Collapsed (conical product) Gauss rules on the reference triangle.
//!
//! An `n x n` rule pairs an `n`-point Gauss-Jacobi rule with weight `(1 - xi)`
//! along `xi` with an `n`-point Gauss-Legendre rule along the collapsed
//! direction `eta = (1 - xi) t`. It is exact to total degree `2n - 1`, has
//! only interior points and strictly positive weights.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result};

pub const MAX_QUADRATURE_DEGREE: usize = 14;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub degree: usize,
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn([f64; 2]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }
}

/// A rule exact for all polynomials of total degree `degree`.
pub fn quadrature_for(degree: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_QUADRATURE_DEGREE).contains(&degree) {
        return Err(Error::QuadratureDegree(degree));
    }
    let n = (degree + 2) / 2;
    let (xj, wj) = gauss_jacobi(n, 1.0, 0.0);
    let (xl, wl) = gauss_jacobi(n, 0.0, 0.0);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (x, w) in xj.iter().zip(&wj) {
        let xi = 0.5 * (1.0 + x);
        for (t, v) in xl.iter().zip(&wl) {
            points.push([xi, (1.0 - xi) * 0.5 * (1.0 + t)]);
            weights.push(0.25 * w * 0.5 * v);
        }
    }
    Ok(QuadratureRule {
        degree: 2 * n - 1,
        points,
        weights,
    })
}

/// Gauss-Jacobi nodes and weights on `[-1, 1]` for the weight
/// `(1 - x)^alpha (1 + x)^beta`, by Golub-Welsch followed by Newton polishing.
fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let diag = |k: usize| -> f64 {
        let k = k as f64;
        let s = 2.0 * k + ab;
        if s == 0.0 || (beta * beta - alpha * alpha) == 0.0 {
            0.0
        } else {
            (beta * beta - alpha * alpha) / (s * (s + 2.0))
        }
    };
    let offdiag = |k: usize| -> f64 {
        let k = k as f64;
        let s = 2.0 * k + ab;
        (4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
    };
    let mut t = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        t[(i, i)] = diag(i);
        if i + 1 < n {
            let b = offdiag(i + 1);
            t[(i, i + 1)] = b;
            t[(i + 1, i)] = b;
        }
    }
    let eig = SymmetricEigen::new(t);
    // integral of the weight over [-1, 1]; only alpha, beta in {0, 1} occur
    let mu0 = 2f64.powf(ab + 1.0) * gamma_small(alpha) * gamma_small(beta) / gamma_small(ab + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // polish nodes with Newton on the Jacobi polynomial
    for p in pairs.iter_mut() {
        for _ in 0..3 {
            let (val, der) = jacobi(n, alpha, beta, p.0);
            if der != 0.0 {
                p.0 -= val / der;
            }
        }
    }
    pairs.into_iter().unzip()
}

/// `Gamma(x + 1)` for integer-valued `x` in `0..=3`.
fn gamma_small(x: f64) -> f64 {
    (1..=x.round() as u64).product::<u64>() as f64
}

/// Jacobi polynomial `P_n^{(a,b)}(x)` and its derivative.
fn jacobi(n: usize, a: f64, b: f64, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    // d/dx P_n^{(a,b)} = (n + a + b + 1)/2 P_{n-1}^{(a+1,b+1)}
    let der = 0.5 * (n as f64 + a + b + 1.0) * jacobi_value(n - 1, a + 1.0, b + 1.0, x);
    (jacobi_value(n, a, b, x), der)
}

/// Three-term recurrence for `P_n^{(a,b)}(x)`.
fn jacobi_value(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = 0.5 * (a - b + (a + b + 2.0) * x);
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + a + b;
        let a1 = 2.0 * k * (k + a + b) * (c - 2.0);
        let a2 = (c - 1.0) * (a * a - b * b);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
        let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn factorial(n: u32) -> f64 {
        (1..=n as u64).map(|v| v as f64).product()
    }

    /// Exact integral of xi^a eta^b over the reference triangle.
    fn monomial(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn centroid_rule() {
        let r = quadrature_for(1).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.points[0][0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.points[0][1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degree_two_integrates_xi_eta() {
        let r = quadrature_for(2).unwrap();
        let v = r.integrate(|p| p[0] * p[1]);
        assert!((v - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn exactness_sweep() {
        for d in 1..=MAX_QUADRATURE_DEGREE {
            let r = quadrature_for(d).unwrap();
            assert!(r.degree >= d);
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert!((r.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
            for p in &r.points {
                assert!(p[0] > 0.0 && p[1] > 0.0 && p[0] + p[1] < 1.0);
            }
            for a in 0..=d as u32 {
                for b in 0..=(d as u32 - a) {
                    let exact = monomial(a, b);
                    let v = r.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
                    assert!(
                        ((v - exact) / exact).abs() < 1e-12,
                        "degree {d} monomial ({a},{b}): {v} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn random_degree_fourteen_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = quadrature_for(14).unwrap();
        let mut terms = Vec::new();
        for a in 0..=14u32 {
            for b in 0..=(14 - a) {
                terms.push((a, b, rng.gen_range(0.0..1.0)));
            }
        }
        let exact: f64 = terms.iter().map(|&(a, b, c)| c * monomial(a, b)).sum();
        let v = r.integrate(|p| {
            terms
                .iter()
                .map(|&(a, b, c)| c * p[0].powi(a as i32) * p[1].powi(b as i32))
                .sum()
        });
        assert!(((v - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_degrees() {
        assert!(matches!(quadrature_for(0), Err(Error::QuadratureDegree(0))));
        assert!(matches!(quadrature_for(15), Err(Error::QuadratureDegree(15))));
    }
}
