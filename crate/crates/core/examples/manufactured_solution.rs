//! The manufactured tangent field and its loads.
//!
//! `cargo run --release --example manufactured_solution`

use surfvec::assembly::FormulationKind;
use surfvec::manufactured::{
    consistent_load, exact_load, integrate_on_torus, ExactField, ModelSolution,
};
use surfvec::{Surface, TorusSurface};

fn main() -> surfvec::Result<()> {
    let s = TorusSurface::model();
    let u = ModelSolution::new(s);
    let x = s.point(0.4, 2.2);
    let n = s.normal(&x)?;
    println!("u(x)   = {:?}, n.u = {:.1e}", u.value(&x), n.dot(&u.value(&x)));

    for kind in [FormulationKind::Standard, FormulationKind::Symmetric] {
        let f = exact_load(&s, &x, kind)?;
        let g = consistent_load(&s, &x, kind)?;
        println!(
            "{kind:?}: tangential load {:?}, consistent load normal part {:+.6}",
            f,
            n.dot(&g)
        );
    }

    let norm = integrate_on_torus(&s, 128, |y| u.value(y).norm_squared()).sqrt();
    let rotation = integrate_on_torus(&s, 128, |y| u.value(y).dot(&surfvec::assembly::killing_field(y)));
    println!("||u||_L2 = {norm:.6}, (u, rotation) = {rotation:.1e}");
    Ok(())
}
