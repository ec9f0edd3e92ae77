//! The torus model problem: exact tangential solution, exact loads and
//! discrete error norms.
//!
//! Loads are obtained by integration by parts on the closed surface:
//! `f = -P div_G(X)` with `X = D_G u = P (grad u^e) P` (standard) or its
//! symmetric part (symmetric formulation). All derivatives of the
//! closest-point extension `u^e = u o p` come from nested jets.

use nalgebra::Matrix3;

use crate::assembly::{Discretization, FormulationKind, NormalSource};
use crate::geometry::{Point3, Surface, TorusSurface};
use crate::jet::{Jet, Real};
use crate::ref_elements::MAX_QUADRATURE_DEGREE;
use crate::{Error, Result};

/// Points farther than this from the surface are rejected by the exact
/// evaluators.
pub const ON_SURFACE_TOL: f64 = 1e-10;

/// Closed-form model field in toroidal coordinates.
pub fn ansatz<T: Real>(s: &TorusSurface, theta: T, phi: T) -> [T; 3] {
    let (r, big_r) = (s.minor(), s.major());
    let a = (phi * 3.0 + theta).sin();
    let b = (phi + theta * 3.0).cos();
    let s3 = (phi * 3.0).sin();
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (phi.sin(), phi.cos());
    let w = ct * r + big_r;
    [
        -(a * cp * cp * st * r) - b * s3 * sp * w,
        b * s3 * cp * w - a * cp * sp * st * r,
        a * cp * ct * r,
    ]
}

/// The model field extended constantly along normals, `u o p`.
pub fn extension<T: Real>(s: &TorusSurface, y: [T; 3]) -> [T; 3] {
    let (theta, phi) = s.angles(y);
    ansatz(s, theta, phi)
}

/// A smooth field with a known value and gradient of its extension at
/// points near the surface.
pub trait ExactField: Sync {
    fn value(&self, x: &Point3) -> Point3;
    /// `grad u^e`, rows are components.
    fn gradient(&self, x: &Point3) -> Matrix3<f64>;
}

/// The manufactured torus solution.
#[derive(Clone, Copy, Debug)]
pub struct ModelSolution {
    pub surface: TorusSurface,
}

impl ModelSolution {
    pub fn new(surface: TorusSurface) -> Self {
        ModelSolution { surface }
    }
}

impl ExactField for ModelSolution {
    fn value(&self, x: &Point3) -> Point3 {
        Point3::from(extension(&self.surface, [x.x, x.y, x.z]))
    }

    fn gradient(&self, x: &Point3) -> Matrix3<f64> {
        let u = extension(&self.surface, Jet::variables([x.x, x.y, x.z]));
        Matrix3::from_fn(|i, j| u[i].d[j])
    }
}

fn check_on_surface(s: &TorusSurface, x: &Point3) -> Result<()> {
    let rho = s.signed_distance(x)?;
    if rho.abs() >= ON_SURFACE_TOL {
        return Err(Error::OffSurface(rho));
    }
    Ok(())
}

/// The model solution at a surface point.
pub fn exact_solution(s: &TorusSurface, x: &Point3) -> Result<Point3> {
    check_on_surface(s, x)?;
    s.closest_point(x)?;
    Ok(ModelSolution::new(*s).value(x))
}

/// Load convention used by the drivers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LoadMode {
    /// The tangential load `-P div_G(X)`.
    Tangential,
    /// The full `-div_G(X)`, whose normal part `X : grad n` makes the
    /// exact solution satisfy the discrete equations for non-tangential
    /// test functions too.
    Consistent,
}

/// `(P, div_G X)` at a surface point.
fn projection_and_divergence(
    s: &TorusSurface,
    x: &Point3,
    kind: FormulationKind,
) -> Result<(Matrix3<f64>, Point3)> {
    check_on_surface(s, x)?;
    s.closest_point(x)?;
    let y = Jet::<Jet<f64>>::variables2([x.x, x.y, x.z]);
    let u = extension(s, y);
    let n = s.normal_t(Jet::<f64>::variables([x.x, x.y, x.z]));
    // entries carry first derivatives with respect to the point
    let proj = |i: usize, j: usize| -> Jet<f64> {
        let delta = if i == j { 1.0 } else { 0.0 };
        <Jet<f64> as Real>::cst(delta) - n[i] * n[j]
    };
    let p: [[Jet<f64>; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| proj(i, j)));
    let grad: [[Jet<f64>; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| u[i].d[j]));
    let mut x_t = [[Jet::<f64>::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = Jet::zero();
            for k in 0..3 {
                for l in 0..3 {
                    acc += p[i][k] * grad[k][l] * p[l][j];
                }
            }
            x_t[i][j] = acc;
        }
    }
    if kind == FormulationKind::Symmetric {
        let x_s = x_t;
        for i in 0..3 {
            for j in 0..3 {
                x_t[i][j] = (x_s[i][j] + x_s[j][i]) * 0.5;
            }
        }
    }
    // row-wise tangential divergence: sum_j sum_k d_k X_ij P_kj
    let mut div = Point3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                div[i] += x_t[i][j].d[k] * p[k][j].v;
            }
        }
    }
    Ok((Matrix3::from_fn(|i, j| p[i][j].v), div))
}

/// Exact tangential load for the model solution at a surface point.
pub fn exact_load(s: &TorusSurface, x: &Point3, kind: FormulationKind) -> Result<Point3> {
    let (p, div) = projection_and_divergence(s, x, kind)?;
    Ok(-(p * div))
}

/// `-div_G(X)` without the projection: [`exact_load`] plus a normal part.
pub fn consistent_load(s: &TorusSurface, x: &Point3, kind: FormulationKind) -> Result<Point3> {
    Ok(-projection_and_divergence(s, x, kind)?.1)
}

/// Load evaluator for the assembler.
pub fn load_fn(
    s: TorusSurface,
    kind: FormulationKind,
    mode: LoadMode,
) -> impl Fn(&Point3) -> Result<Point3> + Sync {
    move |x: &Point3| match mode {
        LoadMode::Tangential => exact_load(&s, x, kind),
        LoadMode::Consistent => consistent_load(&s, x, kind),
    }
}

/// Integrates `g` over the exact torus with the periodic trapezoidal rule
/// on an `n x n` angle grid (spectrally accurate for smooth integrands).
pub fn integrate_on_torus(s: &TorusSurface, n: usize, g: impl Fn(&Point3) -> f64) -> f64 {
    let step = std::f64::consts::TAU / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let theta = step * i as f64;
        let jac = s.minor() * (s.major() + s.minor() * theta.cos());
        for j in 0..n {
            let phi = step * j as f64;
            sum += g(&s.point(theta, phi)) * jac;
        }
    }
    sum * step * step
}

fn norm_quadrature<S: Surface>(
    disc: &Discretization<'_, S>,
) -> Result<crate::assembly::CellQuadrature> {
    disc.quadrature((2 * disc.k_u() + 4).min(MAX_QUADRATURE_DEGREE))
}

/// Discrete field value at every quadrature point of `cell`.
fn discrete_values(disc_nodes: &[usize], coeffs: &[f64], vals: &[f64]) -> Point3 {
    let mut v = Point3::zeros();
    for (a, &g) in disc_nodes.iter().enumerate() {
        v += Point3::new(coeffs[3 * g], coeffs[3 * g + 1], coeffs[3 * g + 2]) * vals[a];
    }
    v
}

/// `|| u^e - u_h ||` in `L2` of the discrete surface.
pub fn l2_error<S: Surface>(
    disc: &Discretization<'_, S>,
    coeffs: &[f64],
    exact: &dyn ExactField,
) -> Result<f64> {
    assert_eq!(coeffs.len(), disc.dofs.n_dofs(), "coefficient vector size");
    let quad = norm_quadrature(disc)?;
    let mut sum = 0.0;
    for c in 0..disc.mesh.n_cells() {
        let geo = disc.geometry(c, &quad)?;
        let ids = disc.dofs.cell_nodes(c);
        for (q, pg) in geo.points.iter().enumerate() {
            let uh = discrete_values(ids, coeffs, quad.basis.values_at(q));
            let e = exact.value(&pg.x) - uh;
            sum += quad.rule.weights[q] * pg.area_factor * e.norm_squared();
        }
    }
    Ok(sum.sqrt())
}

/// Discrete energy norm of `u^e - u_h`:
/// `|| D_h e ||^2 + h^-2 || n . e ||^2` with `n` the penalty normal.
pub fn energy_error<S: Surface>(
    disc: &Discretization<'_, S>,
    coeffs: &[f64],
    exact: &dyn ExactField,
    normal_source: NormalSource,
) -> Result<f64> {
    assert_eq!(coeffs.len(), disc.dofs.n_dofs(), "coefficient vector size");
    let quad = norm_quadrature(disc)?;
    let h2 = disc.mesh.h() * disc.mesh.h();
    let mut grad_sum = 0.0;
    let mut normal_sum = 0.0;
    for c in 0..disc.mesh.n_cells() {
        let geo = disc.geometry(c, &quad)?;
        let normals = disc.penalty_normals(c, &quad, &geo, normal_source);
        let ids = disc.dofs.cell_nodes(c);
        for (q, pg) in geo.points.iter().enumerate() {
            let w = quad.rule.weights[q] * pg.area_factor;
            let vals = quad.basis.values_at(q);
            let grads = quad.basis.grads_at(q);
            let p_h = pg.projection;
            let mut g = exact.gradient(&pg.x) * p_h;
            for (a, &gid) in ids.iter().enumerate() {
                let ca = Point3::new(coeffs[3 * gid], coeffs[3 * gid + 1], coeffs[3 * gid + 2]);
                g -= ca * pg.surface_gradient(grads[a]).transpose();
            }
            let d = p_h * g * p_h;
            grad_sum += w * d.norm_squared();
            let e = exact.value(&pg.x) - discrete_values(ids, coeffs, vals);
            normal_sum += w * normals[q].dot(&e).powi(2);
        }
    }
    Ok((grad_sum + normal_sum / h2).sqrt())
}
