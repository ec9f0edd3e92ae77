//! Builds, perturbs and elevates torus triangulations and measures the
//! geometric error of each order.
//!
//! `cargo run --release --example curved_mesh`

use surfvec::experiment::geometry_study;
use surfvec::mesh::{build_torus_mesh, discrete_area, elevate_geometry, perturb_mesh};
use surfvec::ref_elements::quadrature_for;
use surfvec::TorusSurface;

fn main() -> surfvec::Result<()> {
    let s = TorusSurface::model();
    let flat = build_torus_mesh(&s, 16, 16)?;
    println!(
        "16x16 mesh: {} vertices, {} cells, h = {:.4}, chi = {}, watertight = {}",
        flat.n_vertices(),
        flat.n_cells(),
        flat.h(),
        flat.euler_characteristic(),
        flat.is_watertight()
    );

    let rule = quadrature_for(8)?;
    let jittered = perturb_mesh(&flat, 0.2, 7, &s)?;
    for k_g in 1..=4 {
        let curved = elevate_geometry(&jittered, k_g, &s)?;
        let area = discrete_area(&curved, &s, &rule)?;
        println!("k_g = {k_g}: area error {:.3e}", (area - s.area()).abs());
    }

    println!("\nk_g level      h   max|rho|  rate  max|n-n_h|  rate");
    for k_g in 1..=3 {
        for r in geometry_study(k_g, 16, 16, 3)? {
            println!(
                "{:3} {:5} {:6.4} {:10.3e} {:5} {:10.3e} {:5}",
                r.k_g,
                r.level,
                r.h,
                r.max_distance,
                r.distance_rate.map_or("-".into(), |v| format!("{v:.2}")),
                r.max_normal_error,
                r.normal_rate.map_or("-".into(), |v| format!("{v:.2}")),
            );
        }
    }

    let dump = elevate_geometry(&build_torus_mesh(&s, 8, 8)?, 2, &s)?.to_dump_string();
    println!("\nmesh dump header: {}", dump.lines().next().unwrap_or(""));
    Ok(())
}
