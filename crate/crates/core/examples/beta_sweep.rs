//! Penalty robustness: the finest-level error for several values of beta.
//!
//! `cargo run --release --example beta_sweep`

use surfvec::experiment::{run_beta_sweep, RunConfig};

fn main() -> surfvec::Result<()> {
    let dir = std::env::temp_dir().join("surfvec_beta_sweep");
    let cfg = RunConfig {
        levels: 3,
        output: dir.clone(),
        ..RunConfig::default()
    };
    let rows = run_beta_sweep(&cfg, &[1.0, 10.0, 100.0, 1000.0, 1e4])?;
    for (beta, r) in rows.iter().filter(|(_, r)| r.level + 1 == cfg.levels) {
        println!("beta {beta:8}: L2 {:.4e}, energy {:.4e}, {} CG iterations", r.l2_error, r.energy_error, r.cg_iters);
    }
    println!("table written to {}", dir.join("beta_sweep.csv").display());
    Ok(())
}
