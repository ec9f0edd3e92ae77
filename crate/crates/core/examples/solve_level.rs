//! Assembles and solves the model problem on a single mesh.
//!
//! `cargo run --release --example solve_level -- 2 3`

use surfvec::experiment::{level_errors, level_mesh, solve_on_mesh, RunConfig};
use surfvec::TorusSurface;

fn main() -> surfvec::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let cfg = RunConfig {
        k_u: args.first().copied().unwrap_or(1),
        k_g: args.get(1).copied().unwrap_or(2),
        ..RunConfig::default()
    };
    cfg.validate()?;
    let s = TorusSurface::model();
    let mesh = level_mesh(&cfg, &s, 1)?;
    println!("k_u = {}, k_g = {}, h = {:.4}", cfg.k_u, cfg.k_g, mesh.h());
    let sol = solve_on_mesh(&cfg, &s, mesh)?;
    println!("{} dofs, {} CG iterations, residual {:.2e}", sol.dofs, sol.cg_iters, sol.residual);
    let (l2, energy) = level_errors(&cfg, &s, &sol)?;
    println!("L2 error {l2:.4e}, energy error {energy:.4e}");
    Ok(())
}
