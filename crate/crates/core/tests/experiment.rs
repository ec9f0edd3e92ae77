use surfvec::assembly::{dot, norm, Discretization, FormulationKind};
use surfvec::experiment::{
    compute_convergence, level_mesh, run_beta_sweep, run_convergence, solve_on_mesh, ConvergenceRecord,
    RunConfig,
};
use surfvec::manufactured::{l2_error, ModelSolution};
use surfvec::{Error, TorusSurface};

fn coarse(output: &std::path::Path) -> RunConfig {
    RunConfig {
        levels: 2,
        n_major: 8,
        n_minor: 8,
        output: output.to_path_buf(),
        ..RunConfig::default()
    }
}

fn without_timing(records: &[ConvergenceRecord]) -> Vec<ConvergenceRecord> {
    records.iter().map(|r| ConvergenceRecord { seconds: 0.0, ..r.clone() }).collect()
}

#[test]
fn two_level_study_has_one_rate() {
    let dir = tempfile::tempdir().unwrap();
    let records = run_convergence(&coarse(dir.path())).unwrap();
    assert_eq!(records.len(), 2);
    assert!(records[0].l2_rate.is_none() && records[0].energy_rate.is_none());
    let rate = records[1].l2_rate.unwrap();
    assert!(rate.is_finite() && rate > 0.5, "{rate}");
    assert!(records[1].l2_error < records[0].l2_error);
    assert!(records[1].h < records[0].h);
}

#[test]
fn studies_are_deterministic_up_to_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        amplitude: 0.2,
        seed: 11,
        ..coarse(dir.path())
    };
    let a = compute_convergence(&cfg, |_| {}).unwrap().into_result().unwrap();
    let b = compute_convergence(&cfg, |_| {}).unwrap().into_result().unwrap();
    assert_eq!(without_timing(&a), without_timing(&b));
}

#[test]
fn single_beta_sweep_matches_convergence_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        beta: 30.0,
        ..coarse(dir.path())
    };
    let plain = run_convergence(&cfg).unwrap();
    let swept: Vec<ConvergenceRecord> = run_beta_sweep(&cfg, &[30.0])
        .unwrap()
        .into_iter()
        .map(|(beta, r)| {
            assert_eq!(beta, 30.0);
            r
        })
        .collect();
    assert_eq!(without_timing(&plain), without_timing(&swept));
}

#[test]
fn nonpositive_beta_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        beta: 0.0,
        ..coarse(dir.path())
    };
    assert!(matches!(run_convergence(&cfg), Err(Error::Config(_))));
    assert!(matches!(run_beta_sweep(&coarse(dir.path()), &[10.0, 0.0]), Err(Error::Config(_))));
    assert!(matches!(run_beta_sweep(&coarse(dir.path()), &[]), Err(Error::Config(_))));
}

#[test]
fn failing_level_leaves_partial_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        rel_tol: 1e-30,
        ..coarse(dir.path())
    };
    let table = compute_convergence(&cfg, |_| {}).unwrap();
    assert!(matches!(table.failure, Some(Error::CgDidNotConverge { .. })));
    assert!(run_convergence(&cfg).is_err());
    let text = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + table.records.len());
}

#[test]
fn unwritable_output_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = coarse(&blocker.join("sub"));
    match run_convergence(&cfg) {
        Err(e @ Error::Io { .. }) => assert!(e.to_string().contains("sub"), "{e}"),
        other => panic!("expected an I/O error, got {other:?}"),
    }
}

#[test]
fn interpolant_converges_one_order_above_the_element() {
    let s = TorusSurface::model();
    let exact = ModelSolution::new(s);
    for (k_u, k_g) in [(1, 2), (2, 3)] {
        let cfg = RunConfig {
            k_u,
            k_g,
            ..RunConfig::default()
        };
        let errs: Vec<f64> = (0..2)
            .map(|level| {
                let mesh = level_mesh(&cfg, &s, level).unwrap();
                let disc = Discretization::new(&mesh, &s, k_u).unwrap();
                let c = disc.dofs.interpolate(|x| surfvec::manufactured::ExactField::value(&exact, x));
                l2_error(&disc, &c, &exact).unwrap()
            })
            .collect();
        let rate = (errs[0] / errs[1]).log2();
        assert!((rate - (k_u + 1) as f64).abs() < 0.3, "({k_u},{k_g}): {rate}");
    }
}

#[test]
fn symmetric_solution_is_orthogonal_to_rotation() {
    let s = TorusSurface::model();
    let cfg = RunConfig {
        formulation: FormulationKind::Symmetric,
        ..RunConfig::default()
    };
    let sol = solve_on_mesh(&cfg, &s, level_mesh(&cfg, &s, 0).unwrap()).unwrap();
    assert_eq!(sol.nullspace.len(), 1);
    let rel = dot(&sol.coeffs, &sol.nullspace[0]).abs() / norm(&sol.coeffs);
    assert!(rel < 1e-10, "{rel:e}");
}
