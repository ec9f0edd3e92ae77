//! Forward-mode automatic differentiation with a three-component gradient.
//!
//! A [`Jet<T>`] carries a value and its partial derivatives with respect to
//! the three embedding coordinates. Jets nest: `Jet<Jet<f64>>` seeded with
//! [`Jet::variables2`] yields exact first and second derivatives of any
//! closed-form expression written against the [`Real`] trait.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar arithmetic shared by `f64` and (nested) jets.
pub trait Real:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + Send
    + Sync
    + 'static
{
    fn cst(v: f64) -> Self;
    /// The underlying `f64` value, discarding derivative parts.
    fn re(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn atan2(self, x: Self) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }
    fn powi(self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc *= self;
        }
        acc
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
}

/// Value plus gradient with respect to `(x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub d: [T; 3],
}

impl<T: Real> Jet<T> {
    pub fn constant(v: T) -> Self {
        Jet {
            v,
            d: [T::zero(); 3],
        }
    }

    /// Seeds the three coordinate variables at `x`.
    pub fn variables(x: [T; 3]) -> [Self; 3] {
        let mut out = [Self::constant(T::zero()); 3];
        for (i, o) in out.iter_mut().enumerate() {
            o.v = x[i];
            o.d[i] = T::one();
        }
        out
    }

    /// Chain rule for a unary function with value `f` and derivative `df`.
    fn chain(self, f: T, df: T) -> Self {
        Jet {
            v: f,
            d: [df * self.d[0], df * self.d[1], df * self.d[2]],
        }
    }
}

impl Jet<Jet<f64>> {
    /// Seeds coordinates for second-order differentiation.
    pub fn variables2(x: [f64; 3]) -> [Self; 3] {
        let inner = Jet::<f64>::variables(x);
        let mut out = [Jet::constant(Jet::constant(0.0)); 3];
        for i in 0..3 {
            out[i].v = inner[i];
            out[i].d[i] = Jet::constant(1.0);
        }
        out
    }

    pub fn hessian(&self) -> [[f64; 3]; 3] {
        let mut h = [[0.0; 3]; 3];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.d[i].d[j];
            }
        }
        h
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Jet {
            v: self.v + o.v,
            d: [self.d[0] + o.d[0], self.d[1] + o.d[1], self.d[2] + o.d[2]],
        }
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Jet {
            v: self.v - o.v,
            d: [self.d[0] - o.d[0], self.d[1] - o.d[1], self.d[2] - o.d[2]],
        }
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Jet {
            v: self.v * o.v,
            d: [
                self.d[0] * o.v + self.v * o.d[0],
                self.d[1] * o.v + self.v * o.d[1],
                self.d[2] * o.v + self.v * o.d[2],
            ],
        }
    }
}

impl<T: Real> Div for Jet<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = T::one() / o.v;
        let q = self.v * inv;
        Jet {
            v: q,
            d: [
                (self.d[0] - q * o.d[0]) * inv,
                (self.d[1] - q * o.d[1]) * inv,
                (self.d[2] - q * o.d[2]) * inv,
            ],
        }
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet {
            v: -self.v,
            d: [-self.d[0], -self.d[1], -self.d[2]],
        }
    }
}

impl<T: Real> AddAssign for Jet<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Jet<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> MulAssign for Jet<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Real> Add<f64> for Jet<T> {
    type Output = Self;
    fn add(mut self, o: f64) -> Self {
        self.v = self.v + o;
        self
    }
}

impl<T: Real> Sub<f64> for Jet<T> {
    type Output = Self;
    fn sub(mut self, o: f64) -> Self {
        self.v = self.v - o;
        self
    }
}

impl<T: Real> Mul<f64> for Jet<T> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        Jet {
            v: self.v * o,
            d: [self.d[0] * o, self.d[1] * o, self.d[2] * o],
        }
    }
}

impl<T: Real> Div<f64> for Jet<T> {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<T: Real> Real for Jet<T> {
    fn cst(v: f64) -> Self {
        Jet::constant(T::cst(v))
    }
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, T::one() / (s * 2.0))
    }
    fn atan2(self, x: Self) -> Self {
        // d atan2(y, x) = (x dy - y dx) / (x^2 + y^2)
        let y = self;
        let r2 = x.v * x.v + y.v * y.v;
        let v = y.v.atan2(x.v);
        let mut d = [T::zero(); 3];
        for (i, di) in d.iter_mut().enumerate() {
            *di = (x.v * y.d[i] - y.v * x.d[i]) / r2;
        }
        Jet { v, d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn f<T: Real>(x: [T; 3]) -> T {
        (x[0] * x[1]).sin() + x[2].sqrt() * x[0].cos() + x[1].atan2(x[0]) / (x[2] + 1.0)
    }

    #[test]
    fn first_derivatives_match_central_differences() {
        let p = [0.3, -0.7, 1.2];
        let j = f(Jet::variables(p));
        assert_relative_eq!(j.v, f(p), epsilon = 1e-15);
        let eps = 1e-6;
        for i in 0..3 {
            let mut a = p;
            let mut b = p;
            a[i] += eps;
            b[i] -= eps;
            let fd = (f(a) - f(b)) / (2.0 * eps);
            assert!((fd - j.d[i]).abs() < 1e-8, "component {i}: {fd} vs {}", j.d[i]);
        }
    }

    #[test]
    fn nested_jets_give_symmetric_hessian() {
        let p = [0.3, -0.7, 1.2];
        let j = f(Jet::variables2(p));
        let h = j.hessian();
        let g = |q: [f64; 3]| f(Jet::variables(q)).d;
        let eps = 1e-5;
        for i in 0..3 {
            let mut a = p;
            let mut b = p;
            a[i] += eps;
            b[i] -= eps;
            let (ga, gb) = (g(a), g(b));
            for k in 0..3 {
                let fd = (ga[k] - gb[k]) / (2.0 * eps);
                assert!((fd - h[k][i]).abs() < 1e-7);
                assert_relative_eq!(h[i][k], h[k][i], epsilon = 1e-14);
            }
        }
    }
}
