//! Numerical kernel of the standard and symmetric operators. Only the
//! symmetric one has a near-null vector, the interpolated rotation field.
//!
//! `cargo run --release --example killing_kernel -- 48`

use surfvec::assembly::{
    assemble_parts, dot, killing_field, norm, numerical_kernel, Discretization, FormulationKind,
    NormalSource, Parts, DEFAULT_KERNEL_THRESHOLD,
};
use surfvec::mesh::{build_torus_mesh, elevate_geometry};
use surfvec::TorusSurface;

fn sci(values: &[f64]) -> String {
    let v: Vec<String> = values.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", v.join(", "))
}

fn main() -> surfvec::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(48);
    let s = TorusSurface::model();
    let mesh = elevate_geometry(&build_torus_mesh(&s, n, n)?, 3, &s)?;
    let disc = Discretization::new(&mesh, &s, 2)?;
    let mut k = disc.dofs.interpolate(killing_field);
    let nk = norm(&k);
    k.iter_mut().for_each(|v| *v /= nk);
    println!("{n}x{n} mesh, (k_u, k_g) = (2, 3), {} dofs", disc.dofs.n_dofs());

    for kind in [FormulationKind::Standard, FormulationKind::Symmetric] {
        let a = assemble_parts(
            &disc,
            Parts {
                stiffness: Some(kind),
                penalty: Some((100.0, NormalSource::Discrete)),
            },
        )?;
        let est = numerical_kernel(&a, 2, DEFAULT_KERNEL_THRESHOLD)?;
        println!(
            "{kind:?}: smallest eigenvalues {}, cut-off {:.3e}, kernel dimension {}",
            sci(&est.eigenvalues),
            est.cutoff,
            est.kernel_dim()
        );
        for v in est.kernel_vectors() {
            println!("  alignment with rotation field {:.12}", dot(v, &k).abs());
        }
    }
    Ok(())
}
