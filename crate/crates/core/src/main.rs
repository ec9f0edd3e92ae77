use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use surfvec::assembly::Discretization;
use surfvec::experiment::{
    convergence_csv_path, geometry_study, level_errors, level_mesh, run_beta_sweep,
    run_convergence_with, solve_on_mesh, RunConfig, CSV_HEADER,
};
use surfvec::manufactured::ModelSolution;
use surfvec::vtk::export_vtk;
use surfvec::{Error, TorusSurface};

#[derive(Parser)]
#[command(name = "surfvec", version, about = "Vector Laplacian on the torus with parametric surface elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence study over uniformly refined meshes.
    Converge(ConfigArgs),
    /// Convergence studies for several penalty parameters.
    BetaSweep {
        /// Comma separated penalty values.
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        betas: Vec<f64>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Solve one level and write a VTK file.
    Export {
        /// Refinement level to solve.
        #[arg(long, default_value_t = 0)]
        level: usize,
        /// Output file, defaults to solution.vtk in the output directory.
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Observed orders of the curved geometry for k_g = 1, 2, 3.
    CheckGeometry(ConfigArgs),
}

/// A config file plus per-key overrides.
#[derive(Args)]
struct ConfigArgs {
    /// File of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    formulation: Option<String>,
    #[arg(long = "k_u")]
    k_u: Option<String>,
    #[arg(long = "k_g")]
    k_g: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    #[arg(long = "n_major")]
    n_major: Option<String>,
    #[arg(long = "n_minor")]
    n_minor: Option<String>,
    #[arg(long)]
    amplitude: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "normal_source")]
    normal_source: Option<String>,
    #[arg(long = "rel_tol")]
    rel_tol: Option<String>,
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    load: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> surfvec::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let overrides = [
            ("formulation", &self.formulation),
            ("k_u", &self.k_u),
            ("k_g", &self.k_g),
            ("beta", &self.beta),
            ("levels", &self.levels),
            ("n_major", &self.n_major),
            ("n_minor", &self.n_minor),
            ("amplitude", &self.amplitude),
            ("seed", &self.seed),
            ("normal_source", &self.normal_source),
            ("rel_tol", &self.rel_tol),
            ("output", &self.output),
            ("load", &self.load),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn converge(cfg: &RunConfig) -> surfvec::Result<()> {
    println!("{CSV_HEADER}");
    run_convergence_with(cfg, |r| println!("{}", r.csv_row()))?;
    eprintln!("wrote {}", convergence_csv_path(cfg).display());
    Ok(())
}

fn beta_sweep(cfg: &RunConfig, betas: &[f64]) -> surfvec::Result<()> {
    let rows = run_beta_sweep(cfg, betas)?;
    println!("beta,{CSV_HEADER}");
    for (beta, r) in rows {
        println!("{beta},{}", r.csv_row());
    }
    eprintln!("wrote {}", cfg.output.join("beta_sweep.csv").display());
    Ok(())
}

fn export(cfg: &RunConfig, level: usize, file: Option<PathBuf>) -> surfvec::Result<()> {
    let s = TorusSurface::model();
    let mesh = level_mesh(cfg, &s, level)?;
    let sol = solve_on_mesh(cfg, &s, mesh)?;
    let (l2, energy) = level_errors(cfg, &s, &sol)?;
    let path = file.unwrap_or_else(|| cfg.output.join("solution.vtk"));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let disc = Discretization::new(&sol.mesh, &s, cfg.k_u)?;
    export_vtk(&disc, &sol.coeffs, &ModelSolution::new(s), &path)?;
    println!(
        "level {level}: h = {:.4e}, dofs = {}, l2 = {l2:.4e}, energy = {energy:.4e}",
        sol.mesh.h(),
        sol.dofs
    );
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn check_geometry(cfg: &RunConfig) -> surfvec::Result<()> {
    println!("k_g,level,h,max_distance,distance_rate,max_normal_error,normal_rate");
    let fmt = |r: Option<f64>| r.map(|v| format!("{v:.3}")).unwrap_or_default();
    for k_g in 1..=3 {
        for r in geometry_study(k_g, cfg.n_major, cfg.n_minor, cfg.levels)? {
            println!(
                "{},{},{:.4e},{:.4e},{},{:.4e},{}",
                r.k_g,
                r.level,
                r.h,
                r.max_distance,
                fmt(r.distance_rate),
                r.max_normal_error,
                fmt(r.normal_rate)
            );
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse(_) => 2,
        Error::CgDidNotConverge { .. } | Error::KernelEstimationFailed(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Converge(args) => args.resolve().and_then(|cfg| converge(&cfg)),
        Command::BetaSweep { betas, config } => config.resolve().and_then(|cfg| beta_sweep(&cfg, &betas)),
        Command::Export { level, file, config } => config.resolve().and_then(|cfg| export(&cfg, level, file)),
        Command::CheckGeometry(args) => args.resolve().and_then(|cfg| check_geometry(&cfg)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
