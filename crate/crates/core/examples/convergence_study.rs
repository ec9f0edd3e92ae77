//! Runs a convergence study from a config string and prints the table.
//!
//! `cargo run --release --example convergence_study`

use surfvec::experiment::{compute_convergence, RunConfig, CSV_HEADER};

fn main() -> surfvec::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.apply_text(
        "formulation = standard\n\
         k_u = 1\n\
         k_g = 2\n\
         levels = 4\n\
         amplitude = 0.2\n\
         seed = 7\n",
    )?;
    println!("{CSV_HEADER}");
    let table = compute_convergence(&cfg, |r| println!("{}", r.csv_row()))?;
    if let Some(e) = table.failure {
        eprintln!("stopped early: {e}");
    }
    Ok(())
}
