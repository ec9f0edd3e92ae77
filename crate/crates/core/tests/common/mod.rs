#![allow(dead_code)]

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfvec::assembly::FormulationKind;
use surfvec::jet::{Jet, Real};
use surfvec::manufactured::{exact_load, integrate_on_torus, ExactField, ModelSolution};
use surfvec::{Point3, Surface, TorusSurface};

/// Angle grid used for oracle integrals on the exact torus.
pub const ORACLE_GRID: usize = 160;

/// Smooth test field `w(theta, phi)` with random trigonometric components,
/// optionally projected onto the tangent plane.
pub struct TestField {
    s: TorusSurface,
    coef: Vec<[f64; 6]>,
}

impl TestField {
    pub fn random(s: TorusSurface, rng: &mut ChaCha8Rng) -> Self {
        let coef = (0..3).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect();
        TestField { s, coef }
    }

    fn eval<T: Real>(&self, y: [T; 3], tangential: bool) -> [T; 3] {
        let (t, p) = self.s.angles(y);
        let w: Vec<T> = self
            .coef
            .iter()
            .map(|c| {
                (t.sin() * c[0] + t.cos() * c[1] + (p * 2.0).sin() * c[2])
                    + (p + t).cos() * c[3]
                    + (p * 3.0 - t).sin() * c[4]
                    + T::cst(c[5])
            })
            .collect();
        if !tangential {
            return [w[0], w[1], w[2]];
        }
        let n = self.s.normal_t(y);
        let nw = n[0] * w[0] + n[1] * w[1] + n[2] * w[2];
        [w[0] - n[0] * nw, w[1] - n[1] * nw, w[2] - n[2] * nw]
    }

    pub fn value(&self, x: &Point3, tangential: bool) -> Point3 {
        Point3::from(self.eval([x.x, x.y, x.z], tangential))
    }

    pub fn gradient(&self, x: &Point3, tangential: bool) -> Matrix3<f64> {
        let v = self.eval(Jet::variables([x.x, x.y, x.z]), tangential);
        Matrix3::from_fn(|i, j| v[i].d[j])
    }
}

/// `D = P grad P` or its symmetric part.
pub fn strain(p: &Matrix3<f64>, g: &Matrix3<f64>, kind: FormulationKind) -> Matrix3<f64> {
    let d = p * g * p;
    match kind {
        FormulationKind::Standard => d,
        FormulationKind::Symmetric => 0.5 * (d + d.transpose()),
    }
}

/// `a(u, v)` on the exact torus for the model solution `u`.
pub fn bilinear(s: &TorusSurface, v: &TestField, tangential: bool, kind: FormulationKind) -> f64 {
    let u = ModelSolution::new(*s);
    integrate_on_torus(s, ORACLE_GRID, |x| {
        let p = s.tangent_projection(x).unwrap();
        strain(&p, &u.gradient(x), kind).dot(&strain(&p, &v.gradient(x, tangential), kind))
    })
}

/// `(f, v)` on the exact torus for a load evaluator.
pub fn load_pairing(
    s: &TorusSurface,
    v: &TestField,
    tangential: bool,
    f: impl Fn(&Point3) -> Point3,
) -> f64 {
    integrate_on_torus(s, ORACLE_GRID, |x| f(x).dot(&v.value(x, tangential)))
}

/// Relative weak-form discrepancies `|(f, v) - a(u, v)| / |a(u, v)|` of the
/// tangential load for `count` random tangential test fields.
pub fn weak_form_discrepancies(kind: FormulationKind, count: usize, seed: u64) -> Vec<f64> {
    let s = TorusSurface::model();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v = TestField::random(s, &mut rng);
            let a = bilinear(&s, &v, true, kind);
            let l = load_pairing(&s, &v, true, |x| exact_load(&s, x, kind).unwrap());
            (l - a).abs() / a.abs()
        })
        .collect()
}
