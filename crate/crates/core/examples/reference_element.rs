//! Quadrature rules and Lagrange bases on the reference triangle.
//!
//! `cargo run --example reference_element`

use surfvec::ref_elements::{quadrature_for, ReferenceElement};

fn main() -> surfvec::Result<()> {
    for degree in [2, 6, 10, 14] {
        let rule = quadrature_for(degree)?;
        // integral of x^a y^b over the triangle is a! b! / (a + b + 2)!
        let approx = rule.integrate(|[x, y]| x.powi(3) * y.powi(2));
        println!(
            "degree {degree:2}: {:3} points, weight sum {:.15}, x^3 y^2 error {:.1e}",
            rule.len(),
            rule.weights.iter().sum::<f64>(),
            (approx - 12.0 / 5040.0).abs()
        );
    }

    for k in 1..=4 {
        let el = ReferenceElement::new(k)?;
        let (phi, grads) = el.basis_eval([0.21, 0.37])?;
        let sum: f64 = phi.iter().sum();
        let gsum = grads.iter().fold([0.0, 0.0], |a, g| [a[0] + g[0], a[1] + g[1]]);
        println!(
            "P{k}: {:2} nodes, partition of unity {sum:.15}, gradient sum {:.1e}",
            el.n_nodes(),
            gsum[0].abs() + gsum[1].abs()
        );
    }
    Ok(())
}
