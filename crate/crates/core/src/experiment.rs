//! Batch drivers for the torus experiments: convergence tables, penalty
//! sweeps and the geometry-order check, plus the run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::assembly::{
    assemble, solve, Discretization, FormulationKind, NormalSource, NullspacePolicy, DEFAULT_BETA,
    DEFAULT_REL_TOL,
};
use crate::manufactured::{energy_error, l2_error, load_fn, LoadMode, ModelSolution};
use crate::mesh::{build_torus_mesh, elevate_geometry, geometry_errors, perturb_mesh, ParametricMesh};
use crate::ref_elements::quadrature_for;
use crate::{Error, Result, TorusSurface};

pub const CSV_HEADER: &str = "level,h,dofs,l2_error,energy_error,l2_rate,energy_rate,cg_iters,seconds";

/// Everything that defines one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub formulation: FormulationKind,
    pub k_u: usize,
    pub k_g: usize,
    pub beta: f64,
    pub levels: usize,
    pub n_major: usize,
    pub n_minor: usize,
    /// Vertex perturbation relative to the local mesh size.
    pub amplitude: f64,
    pub seed: u64,
    pub normal_source: NormalSource,
    pub rel_tol: f64,
    pub output: PathBuf,
    pub load: LoadMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            formulation: FormulationKind::Standard,
            k_u: 1,
            k_g: 2,
            beta: DEFAULT_BETA,
            levels: 4,
            n_major: 16,
            n_minor: 16,
            amplitude: 0.0,
            seed: 0,
            normal_source: NormalSource::Discrete,
            rel_tol: DEFAULT_REL_TOL,
            output: PathBuf::from("out"),
            load: LoadMode::Consistent,
        }
    }
}

pub const CONFIG_KEYS: [&str; 13] = [
    "formulation",
    "k_u",
    "k_g",
    "beta",
    "levels",
    "n_major",
    "n_minor",
    "amplitude",
    "seed",
    "normal_source",
    "rel_tol",
    "output",
    "load",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

pub fn parse_formulation(value: &str) -> Result<FormulationKind> {
    match value {
        "standard" => Ok(FormulationKind::Standard),
        "symmetric" => Ok(FormulationKind::Symmetric),
        _ => Err(Error::Config(format!(
            "formulation must be standard or symmetric, got {value:?}"
        ))),
    }
}

pub fn parse_normal_source(value: &str) -> Result<NormalSource> {
    match value {
        "discrete" => Ok(NormalSource::Discrete),
        "exact-interpolated" => Ok(NormalSource::ExactInterpolated),
        _ => Err(Error::Config(format!(
            "normal_source must be discrete or exact-interpolated, got {value:?}"
        ))),
    }
}

pub fn parse_load_mode(value: &str) -> Result<LoadMode> {
    match value {
        "consistent" => Ok(LoadMode::Consistent),
        "tangential" => Ok(LoadMode::Tangential),
        _ => Err(Error::Config(format!(
            "load must be consistent or tangential, got {value:?}"
        ))),
    }
}

pub fn load_mode_name(mode: LoadMode) -> &'static str {
    match mode {
        LoadMode::Consistent => "consistent",
        LoadMode::Tangential => "tangential",
    }
}

pub fn formulation_name(kind: FormulationKind) -> &'static str {
    match kind {
        FormulationKind::Standard => "standard",
        FormulationKind::Symmetric => "symmetric",
    }
}

pub fn normal_source_name(source: NormalSource) -> &'static str {
    match source {
        NormalSource::Discrete => "discrete",
        NormalSource::ExactInterpolated => "exact-interpolated",
    }
}

impl RunConfig {
    /// Sets one field from its textual form. Does not validate ranges.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "formulation" => self.formulation = parse_formulation(value)?,
            "k_u" => self.k_u = parse_value(key, value)?,
            "k_g" => self.k_g = parse_value(key, value)?,
            "beta" => self.beta = parse_value(key, value)?,
            "levels" => self.levels = parse_value(key, value)?,
            "n_major" => self.n_major = parse_value(key, value)?,
            "n_minor" => self.n_minor = parse_value(key, value)?,
            "amplitude" => self.amplitude = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "normal_source" => self.normal_source = parse_normal_source(value)?,
            "rel_tol" => self.rel_tol = parse_value(key, value)?,
            "output" => self.output = PathBuf::from(value),
            "load" => self.load = parse_load_mode(value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        format!(
            "formulation = {}\nk_u = {}\nk_g = {}\nbeta = {}\nlevels = {}\nn_major = {}\n\
             n_minor = {}\namplitude = {}\nseed = {}\nnormal_source = {}\nrel_tol = {}\noutput = {}\nload = {}\n",
            formulation_name(self.formulation),
            self.k_u,
            self.k_g,
            self.beta,
            self.levels,
            self.n_major,
            self.n_minor,
            self.amplitude,
            self.seed,
            normal_source_name(self.normal_source),
            self.rel_tol,
            self.output.display(),
            load_mode_name(self.load)
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(1..=3).contains(&self.k_u) {
            return bad(format!("k_u must lie in 1..=3, got {}", self.k_u));
        }
        if self.k_g < self.k_u || self.k_g > (self.k_u + 2).min(4) {
            return bad(format!(
                "k_g must lie in {}..={}, got {}",
                self.k_u,
                (self.k_u + 2).min(4),
                self.k_g
            ));
        }
        if !(2..=6).contains(&self.levels) {
            return bad(format!("levels must lie in 2..=6, got {}", self.levels));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if self.n_major < 8 || self.n_minor < 8 {
            return bad("base grid needs n_major, n_minor >= 8".into());
        }
        if !(0.0..=0.3).contains(&self.amplitude) {
            return bad(format!("amplitude must lie in [0, 0.3], got {}", self.amplitude));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return bad(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol));
        }
        Ok(())
    }

    /// Base grid doubled `level` times.
    pub fn grid(&self, level: usize) -> (usize, usize) {
        (self.n_major << level, self.n_minor << level)
    }
}

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRecord {
    pub level: usize,
    pub h: f64,
    pub dofs: usize,
    pub l2_error: f64,
    pub energy_error: f64,
    pub l2_rate: Option<f64>,
    pub energy_rate: Option<f64>,
    pub cg_iters: usize,
    pub seconds: f64,
}

impl ConvergenceRecord {
    pub fn csv_row(&self) -> String {
        let rate = |r: Option<f64>| r.map(|v| format!("{v:.6}")).unwrap_or_default();
        format!(
            "{},{:.16e},{},{:.16e},{:.16e},{},{},{},{:.3}",
            self.level,
            self.h,
            self.dofs,
            self.l2_error,
            self.energy_error,
            rate(self.l2_rate),
            rate(self.energy_rate),
            self.cg_iters,
            self.seconds
        )
    }
}

pub fn observed_rate(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// A solved refinement level.
#[derive(Clone, Debug)]
pub struct LevelSolution {
    pub mesh: ParametricMesh,
    pub coeffs: Vec<f64>,
    pub dofs: usize,
    pub cg_iters: usize,
    pub residual: f64,
    /// Normalised Killing interpolant when the solve was deflated by it.
    pub nullspace: Vec<Vec<f64>>,
}

/// Curved mesh of `level` for `cfg` (perturbed, then elevated).
pub fn level_mesh(cfg: &RunConfig, s: &TorusSurface, level: usize) -> Result<ParametricMesh> {
    let (nm, nn) = cfg.grid(level);
    let mut mesh = build_torus_mesh(s, nm, nn)?;
    if cfg.amplitude > 0.0 {
        mesh = perturb_mesh(&mesh, cfg.amplitude, cfg.seed.wrapping_add(level as u64), s)?;
    }
    elevate_geometry(&mesh, cfg.k_g, s)
}

/// Assembles and solves the model problem on `mesh`.
pub fn solve_on_mesh(cfg: &RunConfig, s: &TorusSurface, mesh: ParametricMesh) -> Result<LevelSolution> {
    let disc = Discretization::new(&mesh, s, cfg.k_u)?;
    let load = load_fn(*s, cfg.formulation, cfg.load);
    let sys = assemble(
        &disc,
        cfg.formulation,
        cfg.beta,
        cfg.normal_source,
        NullspacePolicy::default_for(cfg.formulation),
        &load,
    )?;
    let out = solve(&sys, cfg.rel_tol)?;
    let dofs = disc.dofs.n_dofs();
    drop(disc);
    Ok(LevelSolution {
        mesh,
        coeffs: out.x,
        dofs,
        cg_iters: out.iterations,
        residual: out.residual,
        nullspace: sys.nullspace,
    })
}

/// Errors of a solved level: `(l2, energy)`.
pub fn level_errors(cfg: &RunConfig, s: &TorusSurface, sol: &LevelSolution) -> Result<(f64, f64)> {
    let disc = Discretization::new(&sol.mesh, s, cfg.k_u)?;
    let exact = ModelSolution::new(*s);
    Ok((
        l2_error(&disc, &sol.coeffs, &exact)?,
        energy_error(&disc, &sol.coeffs, &exact, cfg.normal_source)?,
    ))
}

/// Rows computed before the run stopped and, if it stopped early, why.
#[derive(Debug)]
pub struct ConvergenceTable {
    pub records: Vec<ConvergenceRecord>,
    pub failure: Option<Error>,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn into_result(self) -> Result<Vec<ConvergenceRecord>> {
        match self.failure {
            Some(e) => Err(e),
            None => Ok(self.records),
        }
    }
}

/// Runs every level of `cfg` without touching the file system.
///
/// Levels run in sequence; `on_level` sees each row as soon as it exists.
pub fn compute_convergence(
    cfg: &RunConfig,
    mut on_level: impl FnMut(&ConvergenceRecord),
) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let s = TorusSurface::model();
    let mut records: Vec<ConvergenceRecord> = Vec::new();
    for level in 0..cfg.levels {
        let start = Instant::now();
        let step = level_mesh(cfg, &s, level).and_then(|mesh| {
            let h = mesh.h();
            let sol = solve_on_mesh(cfg, &s, mesh)?;
            let (l2, en) = level_errors(cfg, &s, &sol)?;
            Ok((h, sol, l2, en))
        });
        let (h, sol, l2, en) = match step {
            Ok(v) => v,
            Err(e) => {
                return Ok(ConvergenceTable {
                    records,
                    failure: Some(e),
                })
            }
        };
        let prev = records.last();
        let rec = ConvergenceRecord {
            level,
            h,
            dofs: sol.dofs,
            l2_error: l2,
            energy_error: en,
            l2_rate: prev.map(|p| observed_rate(p.l2_error, l2)),
            energy_rate: prev.map(|p| observed_rate(p.energy_error, en)),
            cg_iters: sol.cg_iters,
            seconds: start.elapsed().as_secs_f64(),
        };
        on_level(&rec);
        records.push(rec);
    }
    Ok(ConvergenceTable {
        records,
        failure: None,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Path of the convergence table inside the output directory.
pub fn convergence_csv_path(cfg: &RunConfig) -> PathBuf {
    cfg.output.join("convergence.csv")
}

/// Runs the study and writes `convergence.csv` into `cfg.output`. A failing
/// level still leaves the rows computed so far on disk.
pub fn run_convergence(cfg: &RunConfig) -> Result<Vec<ConvergenceRecord>> {
    run_convergence_with(cfg, |_| {})
}

/// [`run_convergence`] with a callback per finished level.
pub fn run_convergence_with(
    cfg: &RunConfig,
    on_level: impl FnMut(&ConvergenceRecord),
) -> Result<Vec<ConvergenceRecord>> {
    let table = compute_convergence(cfg, on_level)?;
    write_text(&convergence_csv_path(cfg), &table.to_csv())?;
    table.into_result()
}

/// One convergence run per penalty value, collected into a single table
/// with a leading `beta` column written to `beta_sweep.csv`.
pub fn run_beta_sweep(cfg: &RunConfig, betas: &[f64]) -> Result<Vec<(f64, ConvergenceRecord)>> {
    if betas.is_empty() {
        return Err(Error::Config("beta sweep needs at least one value".into()));
    }
    for &b in betas {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Config(format!("beta must be positive, got {b}")));
        }
    }
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut csv = format!("beta,{CSV_HEADER}\n");
    let mut failure = None;
    for &beta in betas {
        let run = RunConfig { beta, ..cfg.clone() };
        let table = compute_convergence(&run, |_| {})?;
        for r in &table.records {
            let _ = writeln!(csv, "{beta},{}", r.csv_row());
            rows.push((beta, r.clone()));
        }
        if let Some(e) = table.failure {
            failure = Some(e);
            break;
        }
    }
    write_text(&cfg.output.join("beta_sweep.csv"), &csv)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(rows),
    }
}

/// Geometry errors of one refinement level.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometryRecord {
    pub k_g: usize,
    pub level: usize,
    pub h: f64,
    pub max_distance: f64,
    pub max_normal_error: f64,
    pub distance_rate: Option<f64>,
    pub normal_rate: Option<f64>,
}

/// Measures `max |rho|` and `max |n o p - n_h|` on `levels` uniformly
/// refined curved meshes of order `k_g`.
pub fn geometry_study(
    k_g: usize,
    n_major: usize,
    n_minor: usize,
    levels: usize,
) -> Result<Vec<GeometryRecord>> {
    let s = TorusSurface::model();
    let rule = quadrature_for(8)?;
    let mut out: Vec<GeometryRecord> = Vec::new();
    for level in 0..levels {
        let mesh = build_torus_mesh(&s, n_major << level, n_minor << level)?;
        let h = mesh.h();
        let mesh = elevate_geometry(&mesh, k_g, &s)?;
        let (d, n) = geometry_errors(&mesh, &s, &rule)?;
        let prev = out.last();
        out.push(GeometryRecord {
            k_g,
            level,
            h,
            max_distance: d,
            max_normal_error: n,
            distance_rate: prev.map(|p| observed_rate(p.max_distance, d)),
            normal_rate: prev.map(|p| observed_rate(p.max_normal_error, n)),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.apply_text(
            "# comment\nformulation = symmetric\nk_u = 2\nk_g = 3\nbeta = 10\n\
             normal_source = exact-interpolated\noutput = /tmp/x\nload = tangential\n",
        )
        .unwrap();
        assert_eq!(cfg.formulation, FormulationKind::Symmetric);
        assert_eq!((cfg.k_u, cfg.k_g), (2, 3));
        assert_eq!(cfg.normal_source, NormalSource::ExactInterpolated);
        assert_eq!(cfg.load, LoadMode::Tangential);
        let mut back = RunConfig::default();
        back.apply_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation_rejects_bad_values() {
        let ok = RunConfig::default();
        ok.validate().unwrap();
        let cases = [
            RunConfig { beta: 0.0, ..ok.clone() },
            RunConfig { k_u: 0, ..ok.clone() },
            RunConfig { k_u: 4, k_g: 4, ..ok.clone() },
            RunConfig { k_u: 2, k_g: 1, ..ok.clone() },
            RunConfig { k_u: 1, k_g: 4, ..ok.clone() },
            RunConfig { levels: 1, ..ok.clone() },
            RunConfig { levels: 7, ..ok.clone() },
            RunConfig { amplitude: 0.5, ..ok.clone() },
        ];
        for c in cases {
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{c:?}");
        }
        let mut c = RunConfig::default();
        assert!(c.set("colour", "red").is_err());
        assert!(c.set("k_u", "two").is_err());
        assert!(c.apply_text("k_u 2").is_err());
    }

    #[test]
    fn csv_row_leaves_first_rate_empty() {
        let r = ConvergenceRecord {
            level: 0,
            h: 0.5,
            dofs: 10,
            l2_error: 1.0,
            energy_error: 2.0,
            l2_rate: None,
            energy_rate: None,
            cg_iters: 3,
            seconds: 0.1,
        };
        let row = r.csv_row();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.contains(",,"));
        assert_eq!(observed_rate(4.0, 1.0), 2.0);
    }
}
