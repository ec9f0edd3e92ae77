use proptest::prelude::*;
use surfvec::experiment::{formulation_name, load_mode_name, normal_source_name, RunConfig};
use surfvec::assembly::{FormulationKind, NormalSource};
use surfvec::manufactured::LoadMode;
use surfvec::ref_elements::{quadrature_for, ReferenceElement};
use surfvec::{Surface, TorusSurface};

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

proptest! {
    #[test]
    fn quadrature_integrates_monomials_exactly(
        (degree, a, b) in (1u32..=14)
            .prop_flat_map(|d| (Just(d), 0..=d))
            .prop_flat_map(|(d, a)| (Just(d as usize), Just(a), 0..=d - a))
    ) {
        let rule = quadrature_for(degree).unwrap();
        let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        let approx = rule.integrate(|[x, y]| x.powi(a as i32) * y.powi(b as i32));
        prop_assert!((approx - exact).abs() < 1e-14);
    }

    #[test]
    fn lagrange_basis_is_a_partition_of_unity(k in 1usize..=4, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let q = if u + v > 1.0 { [1.0 - u, 1.0 - v] } else { [u, v] };
        let (phi, grads) = ReferenceElement::new(k).unwrap().basis_eval(q).unwrap();
        prop_assert!((phi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let gx: f64 = grads.iter().map(|g| g[0]).sum();
        let gy: f64 = grads.iter().map(|g| g[1]).sum();
        prop_assert!(gx.abs() < 1e-10 && gy.abs() < 1e-10);
    }

    // offsets stay inside the reach min(r, R - r) = 0.4 of the model torus
    #[test]
    fn closest_point_is_idempotent_and_normal_is_unit(theta in 0.0f64..6.28, phi in 0.0f64..6.28, d in -0.39f64..0.39) {
        let s = TorusSurface::model();
        let y = s.point(theta, phi);
        let x = y + s.normal(&y).unwrap() * d;
        let p = s.closest_point(&x).unwrap();
        prop_assert!((p - y).norm() < 1e-12);
        prop_assert!((s.signed_distance(&x).unwrap() - d).abs() < 1e-12);
        prop_assert!((s.normal(&x).unwrap().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn config_text_round_trips(
        sym in any::<bool>(),
        k_u in 1usize..=3,
        extra in 0usize..=2,
        beta in 1e-3f64..1e6,
        levels in 2usize..=6,
        n_major in 8usize..64,
        n_minor in 8usize..64,
        amplitude in 0.0f64..0.3,
        seed in any::<u64>(),
        exact_normals in any::<bool>(),
        tangential in any::<bool>(),
    ) {
        let cfg = RunConfig {
            formulation: if sym { FormulationKind::Symmetric } else { FormulationKind::Standard },
            k_u,
            k_g: (k_u + extra).min(4),
            beta,
            levels,
            n_major,
            n_minor,
            amplitude,
            seed,
            normal_source: if exact_normals { NormalSource::ExactInterpolated } else { NormalSource::Discrete },
            load: if tangential { LoadMode::Tangential } else { LoadMode::Consistent },
            ..RunConfig::default()
        };
        prop_assert!(cfg.validate().is_ok());
        let mut back = RunConfig::default();
        back.apply_text(&cfg.to_text()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert!(cfg.to_text().contains(formulation_name(cfg.formulation)));
        prop_assert!(cfg.to_text().contains(normal_source_name(cfg.normal_source)));
        prop_assert!(cfg.to_text().contains(load_mode_name(cfg.load)));
    }
}
