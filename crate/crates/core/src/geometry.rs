//! Implicit surface description and tangential calculus.
//!
//! The torus is the only concrete surface, but everything downstream talks
//! to the [`Surface`] trait so other implicit surfaces can slot in.

use nalgebra::{Matrix3, Vector3};

use crate::jet::Real;
use crate::{Error, Result};

pub type Point3 = Vector3<f64>;
/// A 3x3 tensor in the Euclidean basis of the embedding space.
pub type Tensor3 = Matrix3<f64>;

/// Closed surface given by a signed distance function in a tubular
/// neighbourhood.
pub trait Surface: Sync {
    /// Signed distance, negative inside.
    fn signed_distance(&self, x: &Point3) -> Result<f64>;

    fn closest_point(&self, x: &Point3) -> Result<Point3>;

    /// Exterior unit normal, the gradient of the signed distance.
    fn normal(&self, x: &Point3) -> Result<Point3>;

    /// Hessian of the signed distance at `x`.
    fn curvature_tensor(&self, x: &Point3) -> Result<Tensor3>;

    fn tangent_projection(&self, x: &Point3) -> Result<Tensor3> {
        let n = self.normal(x)?;
        Ok(Tensor3::identity() - n * n.transpose())
    }

    /// The map `B = P (I - rho kappa) P_h` from the discrete tangent plane
    /// with normal `n_h` at `x_h` to the exact tangent plane at `p(x_h)`,
    /// together with its area ratio `|B|`.
    fn distortion_b(&self, x_h: &Point3, n_h: &Point3) -> Result<(Tensor3, f64)> {
        let rho = self.signed_distance(x_h)?;
        let p = self.tangent_projection(x_h)?;
        let kappa = self.curvature_tensor(x_h)?;
        let p_h = Tensor3::identity() - n_h * n_h.transpose();
        let b = p * (Tensor3::identity() - kappa * rho) * p_h;
        let (t1, t2) = tangent_frame(n_h);
        let det = (b * t1).cross(&(b * t2)).norm();
        if det <= 1e-12 {
            return Err(Error::DegenerateMapping(det));
        }
        Ok((b, det))
    }
}

/// Orthonormal pair spanning the plane orthogonal to the unit vector `n`.
pub fn tangent_frame(n: &Point3) -> (Point3, Point3) {
    let a = if n.x.abs() < 0.9 {
        Point3::x()
    } else {
        Point3::y()
    };
    let t1 = (a - n * n.dot(&a)).normalize();
    let t2 = n.cross(&t1);
    (t1, t2)
}

/// Torus around the z axis with major radius `major` and minor radius
/// `minor`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusSurface {
    major: f64,
    minor: f64,
}

/// Points closer than this to the axis or the centre circle are rejected.
const AMBIGUITY_TOL: f64 = 1e-12;

impl TorusSurface {
    pub fn new(major: f64, minor: f64) -> Result<Self> {
        if !(major.is_finite() && minor.is_finite() && 0.0 < minor && minor < major) {
            return Err(Error::InvalidSurface(format!(
                "need 0 < r < R, got R = {major}, r = {minor}"
            )));
        }
        Ok(TorusSurface { major, minor })
    }

    /// The torus used throughout the model problem: `R = 1`, `r = 0.6`.
    pub fn model() -> Self {
        TorusSurface {
            major: 1.0,
            minor: 0.6,
        }
    }

    pub fn major(&self) -> f64 {
        self.major
    }

    pub fn minor(&self) -> f64 {
        self.minor
    }

    pub fn area(&self) -> f64 {
        4.0 * std::f64::consts::PI.powi(2) * self.major * self.minor
    }

    /// Point on the torus at tube angle `theta` and azimuth `phi`.
    pub fn point(&self, theta: f64, phi: f64) -> Point3 {
        let w = self.major + self.minor * theta.cos();
        Point3::new(w * phi.cos(), w * phi.sin(), self.minor * theta.sin())
    }

    /// Tube angle and azimuth of `x` (equal to those of its closest point).
    pub fn angles<T: Real>(&self, x: [T; 3]) -> (T, T) {
        let rxy = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let theta = x[2].atan2(rxy - self.major);
        let phi = x[1].atan2(x[0]);
        (theta, phi)
    }

    /// Closed-form signed distance, usable with jets.
    pub fn signed_distance_t<T: Real>(&self, x: [T; 3]) -> T {
        let rxy = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let q = rxy - self.major;
        (q * q + x[2] * x[2]).sqrt() - self.minor
    }

    /// Closed-form closest point, usable with jets.
    pub fn closest_point_t<T: Real>(&self, x: [T; 3]) -> [T; 3] {
        let rxy = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let q = rxy - self.major;
        let d = (q * q + x[2] * x[2]).sqrt();
        let w = (q * self.minor / d + self.major) / rxy;
        [x[0] * w, x[1] * w, x[2] * self.minor / d]
    }

    /// Closed-form normal, usable with jets.
    pub fn normal_t<T: Real>(&self, x: [T; 3]) -> [T; 3] {
        let rxy = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let q = rxy - self.major;
        let d = (q * q + x[2] * x[2]).sqrt();
        let c = q / (d * rxy);
        [x[0] * c, x[1] * c, x[2] / d]
    }

    fn check_unambiguous(&self, x: &Point3) -> Result<(f64, f64)> {
        let rxy = x.x.hypot(x.y);
        if rxy <= AMBIGUITY_TOL * self.major {
            return Err(Error::PointOnAxis);
        }
        let d = (rxy - self.major).hypot(x.z);
        if d <= AMBIGUITY_TOL * self.major {
            return Err(Error::ClosestPointNotUnique);
        }
        Ok((rxy, d))
    }
}

fn arr(x: &Point3) -> [f64; 3] {
    [x.x, x.y, x.z]
}

impl Surface for TorusSurface {
    fn signed_distance(&self, x: &Point3) -> Result<f64> {
        if x.x.hypot(x.y) <= AMBIGUITY_TOL * self.major {
            return Err(Error::PointOnAxis);
        }
        Ok(self.signed_distance_t(arr(x)))
    }

    fn closest_point(&self, x: &Point3) -> Result<Point3> {
        self.check_unambiguous(x)?;
        Ok(Point3::from(self.closest_point_t(arr(x))))
    }

    fn normal(&self, x: &Point3) -> Result<Point3> {
        self.check_unambiguous(x)?;
        Ok(Point3::from(self.normal_t(arr(x))))
    }

    fn curvature_tensor(&self, x: &Point3) -> Result<Tensor3> {
        let (rxy, d) = self.check_unambiguous(x)?;
        let (cos_t, sin_t) = ((rxy - self.major) / d, x.z / d);
        let (cos_p, sin_p) = (x.x / rxy, x.y / rxy);
        // principal directions: along the tube circle and along the azimuth
        let a1 = Point3::new(-sin_t * cos_p, -sin_t * sin_p, cos_t);
        let a2 = Point3::new(-sin_p, cos_p, 0.0);
        // kappa_i / (1 + rho kappa_i) with rho = d - r collapses to these
        let k1 = 1.0 / d;
        let k2 = cos_t / rxy;
        Ok(a1 * a1.transpose() * k1 + a2 * a2.transpose() * k2)
    }
}
