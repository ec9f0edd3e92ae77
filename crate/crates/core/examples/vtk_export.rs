//! Solves on a coarse curved mesh and writes the field for ParaView.
//!
//! `cargo run --release --example vtk_export -- field.vtk`

use std::path::PathBuf;

use surfvec::assembly::Discretization;
use surfvec::experiment::{level_mesh, solve_on_mesh, RunConfig};
use surfvec::manufactured::ModelSolution;
use surfvec::vtk::export_vtk;
use surfvec::TorusSurface;

fn main() -> surfvec::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("surfvec_field.vtk"));
    let cfg = RunConfig {
        k_u: 2,
        k_g: 3,
        ..RunConfig::default()
    };
    let s = TorusSurface::model();
    let sol = solve_on_mesh(&cfg, &s, level_mesh(&cfg, &s, 0)?)?;
    let disc = Discretization::new(&sol.mesh, &s, cfg.k_u)?;
    export_vtk(&disc, &sol.coeffs, &ModelSolution::new(s), &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
