mod common;

use common::{bilinear, load_pairing, strain, weak_form_discrepancies, TestField};
use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfvec::assembly::FormulationKind;
use surfvec::manufactured::{consistent_load, exact_load, integrate_on_torus, ExactField, ModelSolution};
use surfvec::{Point3, Surface, TorusSurface};

#[test]
fn tangential_load_satisfies_weak_form() {
    for kind in [FormulationKind::Standard, FormulationKind::Symmetric] {
        for d in weak_form_discrepancies(kind, 10, 2024) {
            assert!(d < 1e-8, "{kind:?}: relative discrepancy {d:e}");
        }
    }
}

#[test]
fn consistent_load_satisfies_weak_form_for_all_test_fields() {
    let s = TorusSurface::model();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for kind in [FormulationKind::Standard, FormulationKind::Symmetric] {
        for _ in 0..5 {
            let v = TestField::random(s, &mut rng);
            let a = bilinear(&s, &v, false, kind);
            let full = load_pairing(&s, &v, false, |x| consistent_load(&s, x, kind).unwrap());
            let tangential = load_pairing(&s, &v, false, |x| exact_load(&s, x, kind).unwrap());
            assert!((a - full).abs() < 1e-8 * a.abs(), "{kind:?}: {a} vs {full}");
            // the tangential load misses the normal part of the test field
            assert!((a - tangential).abs() > 1e-4 * a.abs());
        }
    }
}

#[test]
fn symmetric_load_is_orthogonal_to_rotation() {
    let s = TorusSurface::model();
    let kill = |x: &Point3| Point3::new(-x.y, x.x, 0.0);
    let f = |x: &Point3| exact_load(&s, x, FormulationKind::Symmetric).unwrap();
    let f_norm = integrate_on_torus(&s, 128, |x| f(x).norm_squared()).sqrt();
    let k_norm = integrate_on_torus(&s, 128, |x| kill(x).norm_squared()).sqrt();
    let inner = integrate_on_torus(&s, 128, |x| f(x).dot(&kill(x)));
    assert!(inner.abs() < 1e-6 * f_norm * k_norm, "{inner}");
    let u = ModelSolution::new(s);
    let uk = integrate_on_torus(&s, 128, |x| u.value(x).dot(&kill(x)));
    assert!(uk.abs() < 1e-10);
}

#[test]
fn rotation_has_zero_strain() {
    let s = TorusSurface::model();
    let g = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let x = s.point(rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3));
        let p = s.tangent_projection(&x).unwrap();
        assert!(strain(&p, &(g * p), FormulationKind::Symmetric).norm() < 1e-14);
    }
}
