use std::f64::consts::PI;
use std::fs;

use ksns_cli::config::{RunConfig, SweepConfig};
use ksns_cli::datum::DatumSpec;
use ksns_cli::run::{
    build_state, difference, lockstep, read_regime_map, run_comparison, run_single, run_sweep, simulate, SweepRow,
    COMPARISON_HEADER, REGIME_HEADER,
};
use ksns_core::diagnostics::read_csv;
use ksns_core::integrate::{OutcomeKind, Trajectory};
use ksns_core::{checkpoint, VelocityLaw};
use tempfile::tempdir;

fn small(law: &str, extra: &str) -> RunConfig {
    RunConfig::parse(&format!(
        "[run]\nn1 = 32\nn2 = 17\nvariant = {law}\ng = 5\nB = 10\nt_end = 0.1\nsample_every = 0.02\n{extra}"
    ))
    .unwrap()
}

fn bump() -> DatumSpec {
    DatumSpec::GaussianBump { mass: 20.0, center: (0.5, 1.2), width: 0.6, floor: 0.5 }
}

#[test]
fn constant_datum_stays_constant() {
    let cfg = small("navier_stokes", "");
    let dir = tempdir().unwrap();
    let out = run_single(&cfg, dir.path()).unwrap();
    assert_eq!(out.kind, OutcomeKind::CompletedHorizon);
    assert!((out.t_final - 0.1).abs() < 1e-12);
    let recs = read_csv(&dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(recs.len(), 6);
    for r in &recs {
        assert!(r.e2 < 1e-24 && r.u_l2_sq < 1e-24, "{r:?}");
        assert!((r.mass - 2.0 * PI * PI).abs() < 1e-12);
    }
}

#[test]
fn run_writes_its_outputs_and_reruns_identically() {
    let mut cfg = small("navier_stokes", "");
    cfg.datum = bump();
    let (d1, d2) = (tempdir().unwrap(), tempdir().unwrap());
    run_single(&cfg, d1.path()).unwrap();
    run_single(&cfg, d2.path()).unwrap();
    for f in ["diagnostics.csv", "final.ckpt", "outcome.json"] {
        assert_eq!(fs::read(d1.path().join(f)).unwrap(), fs::read(d2.path().join(f)).unwrap(), "{f}");
    }
    let json: serde_json::Value = serde_json::from_slice(&fs::read(d1.path().join("outcome.json")).unwrap()).unwrap();
    assert_eq!(json["kind"], "CompletedHorizon");
    assert_eq!(json["config"], cfg.source.as_str());
    let last = checkpoint::load(&fs::read(d1.path().join("final.ckpt")).unwrap()).unwrap();
    assert!((last.t - 0.1).abs() < 1e-12);
    assert!((last.density.mass() - 20.0).abs() < 1e-10);
}

#[test]
fn subcritical_mode_decays() {
    let mut cfg = small("none", "");
    cfg.t_end = 0.5;
    cfg.datum = DatumSpec::SingleMode { mass: 2.0 * PI * PI, amplitude: 0.2, k1: 1, k2: 1 };
    let mut e2 = Vec::new();
    let (out, summary, _) = simulate(&cfg, build_state(&cfg, cfg.law, cfg.b).unwrap(), |r| {
        e2.push(r.e2);
        Ok(())
    })
    .unwrap();
    assert_eq!(out.kind, OutcomeKind::CompletedHorizon);
    assert_eq!(summary.samples, e2.len());
    assert!(e2.windows(2).all(|w| w[1] < w[0]));
    // linearised: the (1,1) amplitude decays like exp(-(|k|^2 - rho_m) t)
    let rate = 2.0 * (2.0 - 1.0);
    let want = e2[0] * f64::exp(-rate * 0.5);
    assert!((e2.last().unwrap() - want).abs() < 0.05 * want, "{} vs {want}", e2.last().unwrap());
}

#[test]
fn overcritical_bump_blows_up_without_flow() {
    let mut cfg = small("none", "");
    cfg.n1 = 64;
    cfg.n2 = 33;
    cfg.t_end = 1.0;
    cfg.datum = DatumSpec::GaussianBump { mass: 120.0, center: (0.0, PI / 2.0), width: 0.3, floor: 0.05 };
    let (out, summary, _) = simulate(&cfg, build_state(&cfg, cfg.law, cfg.b).unwrap(), |_| Ok(())).unwrap();
    assert_eq!(out.kind, OutcomeKind::BlowupDetected);
    assert!(out.t_final < 1.0);
    assert!(summary.mass_drift < 1e-8);
}

#[test]
fn identical_partners_never_separate() {
    let mut cfg = small("static_stokes", "");
    cfg.datum = bump();
    let mut a = Trajectory::new(build_state(&cfg, VelocityLaw::StaticStokes, cfg.b).unwrap());
    let mut b = Trajectory::new(build_state(&cfg, VelocityLaw::StaticStokes, cfg.b).unwrap());
    let mut seen = 0;
    let res = lockstep(&mut a, &mut b, cfg.t_end, cfg.sample_every, |x, y| {
        assert_eq!(difference(&x.state, &y.state).unwrap(), (0.0, 0.0));
        seen += 1;
        Ok(())
    })
    .unwrap();
    assert_eq!(res.outcome.kind, OutcomeKind::CompletedHorizon);
    assert_eq!(seen, 6);
    assert!((res.dts.iter().sum::<f64>() - cfg.t_end).abs() < 1e-12);
}

#[test]
fn lockstep_steps_replay_independently() {
    let mut cfg = small("navier_stokes", "");
    cfg.datum = bump();
    let mut a = Trajectory::new(build_state(&cfg, VelocityLaw::NavierStokes, cfg.b).unwrap());
    let mut b = Trajectory::new(build_state(&cfg, VelocityLaw::StaticStokes, cfg.b).unwrap());
    let res = lockstep(&mut a, &mut b, cfg.t_end, cfg.sample_every, |_, _| Ok(())).unwrap();

    let mut solo = Trajectory::new(build_state(&cfg, VelocityLaw::NavierStokes, cfg.b).unwrap());
    for &dt in &res.dts {
        solo.advance(dt, dt).unwrap();
    }
    let (r, v) = difference(&a.state, &solo.state).unwrap();
    assert!(r < 1e-24 && v < 1e-24, "{r} {v}");
}

#[test]
fn comparison_files() {
    let mut cfg = small("navier_stokes", "");
    cfg.datum = bump();
    let dir = tempdir().unwrap();
    let sums = run_comparison(&cfg, &[10.0, 1000.0], dir.path()).unwrap();
    assert_eq!(sums.len(), 2);
    for s in &sums {
        let text = fs::read_to_string(dir.path().join(format!("compare_B{}.csv", s.b))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(COMPARISON_HEADER));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!((first[0], first[1]), (0.0, 0.0));
        assert_eq!(lines.count(), 5);
        assert!(s.mass_drift < 1e-10);
    }
    // the static law is the large-viscosity limit
    assert!(sums[1].sup_r_sq < sums[0].sup_r_sq);
    let summary = fs::read_to_string(dir.path().join("comparison_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(run_comparison(&small("darcy", ""), &[1.0], dir.path()).is_err());
}

#[test]
fn one_cell_sweep_matches_a_single_run() {
    let mut cfg = small("static_stokes", "");
    cfg.datum = bump();
    let sweep = SweepConfig { template: cfg.clone(), g: vec![5.0], b: vec![10.0], workers: 1 };
    let (ds, dr) = (tempdir().unwrap(), tempdir().unwrap());
    let rows = run_sweep(&sweep, ds.path()).unwrap();
    run_single(&cfg, dr.path()).unwrap();
    assert_eq!(
        fs::read(ds.path().join("cells/g5_B10.csv")).unwrap(),
        fs::read(dr.path().join("diagnostics.csv")).unwrap()
    );
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].outcome, "CompletedHorizon");
    assert_eq!(read_regime_map(&ds.path().join("regime_map.csv")).unwrap(), rows);
}

#[test]
fn sweep_output_does_not_depend_on_workers() {
    let mut cfg = small("navier_stokes", "");
    cfg.datum = bump();
    let mk = |workers| SweepConfig { template: cfg.clone(), g: vec![1.0, 20.0], b: vec![1.0, 100.0], workers };
    let (d1, d3) = (tempdir().unwrap(), tempdir().unwrap());
    run_sweep(&mk(1), d1.path()).unwrap();
    run_sweep(&mk(3), d3.path()).unwrap();
    let map = fs::read_to_string(d1.path().join("regime_map.csv")).unwrap();
    assert_eq!(map, fs::read_to_string(d3.path().join("regime_map.csv")).unwrap());
    assert_eq!(map.lines().next(), Some(REGIME_HEADER));
    let live = fs::read_to_string(d3.path().join("sweep_rows.csv")).unwrap();
    let mut a: Vec<&str> = live.lines().skip(1).collect();
    let mut b: Vec<&str> = map.lines().skip(1).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn failed_cells_become_error_rows() {
    let mut cfg = small("static_stokes", "");
    // a bump too narrow for this grid is rejected at construction
    cfg.datum = DatumSpec::GaussianBump { mass: 20.0, center: (0.0, 1.0), width: 0.05, floor: 0.0 };
    let dir = tempdir().unwrap();
    let rows = run_sweep(&SweepConfig { template: cfg, g: vec![1.0], b: vec![1.0, 2.0], workers: 2 }, dir.path()).unwrap();
    assert!(rows.iter().all(|r| r.outcome == "error" && r.t_final.is_nan()));
    let back = read_regime_map(&dir.path().join("regime_map.csv")).unwrap();
    assert_eq!(back.len(), 2);
    assert!(back[0].max_e2.is_nan());
}

#[test]
fn regime_rows_round_trip() {
    let row = SweepRow { g: 0.1, b: 1e3, outcome: "BlowupDetected".into(), t_final: 0.0123, max_e2: 4.5e6, max_rho_inf: 1e3 };
    assert_eq!(SweepRow::from_csv(&row.to_csv()).unwrap(), row);
    assert!(SweepRow::from_csv("1,2,x").is_err());
    assert!(SweepRow::from_csv("1,2,x,a,b,c").is_err());
}
