//! Single runs, the lockstep full-vs-static comparison and regime sweeps.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use ksns_core::diagnostics::{sample, CsvSink, DiagnosticsRecord};
use ksns_core::integrate::{detect, rho_sup, run, OutcomeKind, RunOutcome, Trajectory};
use ksns_core::velocity::{static_vorticity, velocity_of};
use ksns_core::{checkpoint, FlowState, Grid, ModelParams, SimState, VelocityLaw};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{OmegaInit, RunConfig, SweepConfig};
use crate::error::{CliError, Result};

/// Initial state for `cfg` under `law` with viscosity `b`.
pub fn build_state(cfg: &RunConfig, law: VelocityLaw, b: f64) -> Result<SimState> {
    let grid = Grid::new(cfg.n1, cfg.n2)?;
    let rho = cfg.datum.build(&grid, cfg.seed)?;
    let flow = match (law, cfg.omega_init) {
        (VelocityLaw::NavierStokes, OmegaInit::Static) => FlowState::NavierStokes { omega: static_vorticity(&rho, cfg.g) },
        (other, _) => FlowState::at_rest(other, &grid),
    };
    let mut params = ModelParams::new(grid, cfg.g, b)?;
    params.dt = cfg.dt;
    params.thresholds = cfg.thresholds;
    Ok(SimState::new(rho, flow, params)?)
}

/// Running maxima over the samples of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub outcome_kind: OutcomeKind,
    pub t_final: f64,
    pub max_e2: f64,
    pub max_rho_inf: f64,
    /// Largest `|mass(t) - mass(0)|` over the samples.
    pub mass_drift: f64,
    pub samples: usize,
}

/// Integrate `state` per `cfg`, handing every sample to `on_record`.
pub fn simulate(
    cfg: &RunConfig,
    state: SimState,
    mut on_record: impl FnMut(&DiagnosticsRecord) -> Result<()>,
) -> Result<(RunOutcome, RunSummary, SimState)> {
    let mass0 = state.density.mass();
    let mut traj = Trajectory::new(state);
    let (mut max_e2, mut max_rho_inf, mut mass_drift, mut samples) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    let mut failure = None;
    let outcome = run(&mut traj, cfg.t_end, cfg.sample_every, |tr| {
        let rec = sample(&tr.state, tr.last_dt)?;
        max_e2 = max_e2.max(rec.e2);
        max_rho_inf = max_rho_inf.max(rho_sup(&tr.state.density));
        mass_drift = mass_drift.max((rec.mass - mass0).abs());
        samples += 1;
        if let Err(e) = on_record(&rec) {
            failure = Some(e);
            return Err(ksns_core::Error::InvalidParameter("sample sink failed".into()));
        }
        Ok(())
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let outcome = outcome?;
    let summary =
        RunSummary { outcome_kind: outcome.kind, t_final: outcome.t_final, max_e2, max_rho_inf, mass_drift, samples };
    Ok((outcome, summary, traj.state))
}

pub fn outcome_json(outcome: &RunOutcome, cfg: &RunConfig) -> serde_json::Value {
    json!({
        "kind": outcome.kind.name(),
        "t_final": outcome.t_final,
        "reason": outcome.reason,
        "metric": outcome.metric.as_ref().map(|(name, value)| json!({ "name": name, "value": value })),
        "config": cfg.source,
    })
}

/// Writes `diagnostics.csv`, `final.ckpt` and `outcome.json` into `out`.
pub fn run_single(cfg: &RunConfig, out: &Path) -> Result<RunOutcome> {
    fs::create_dir_all(out)?;
    let state = build_state(cfg, cfg.law, cfg.b)?;
    let mut sink = CsvSink::create(&out.join("diagnostics.csv"))?;
    let (outcome, _, last) = simulate(cfg, state, |rec| Ok(sink.write(rec)?))?;
    sink.flush()?;
    fs::write(out.join("final.ckpt"), checkpoint::save(&last))?;
    fs::write(out.join("outcome.json"), serde_json::to_string_pretty(&outcome_json(&outcome, cfg)).unwrap() + "\n")?;
    Ok(outcome)
}

/// Result of a lockstep pair run.
#[derive(Debug, Clone)]
pub struct Lockstep {
    pub outcome: RunOutcome,
    /// Every step size taken, shared by both trajectories.
    pub dts: Vec<f64>,
}

/// Advance two trajectories with a shared step sequence (the smaller of
/// the two controller proposals), landing on every sample time. Stops when
/// either detector fires.
pub fn lockstep(
    a: &mut Trajectory,
    b: &mut Trajectory,
    t_end: f64,
    sample_every: f64,
    mut on_sample: impl FnMut(&Trajectory, &Trajectory) -> Result<()>,
) -> Result<Lockstep> {
    let mut dts = Vec::new();
    on_sample(a, b)?;
    for (tr, side) in [(&*a, "full"), (&*b, "static")] {
        if let Some(out) = detect(&tr.state, &tr.detector.thresholds) {
            return Ok(Lockstep { outcome: tag(out, side), dts });
        }
    }
    for &target in &ksns_core::integrate::sample_times(t_end, sample_every)[1..] {
        while a.state.t < target {
            let proposed = a.proposed_dt().min(b.proposed_dt());
            let remaining = target - a.state.t;
            let dt = if remaining <= proposed * (1.0 + 1e-9) {
                remaining
            } else if remaining < 2.0 * proposed {
                0.5 * remaining
            } else {
                proposed
            };
            let stop_a = a.advance(dt, proposed)?;
            let stop_b = b.advance(dt, proposed)?;
            dts.push(dt);
            if dt == remaining {
                a.state.t = target;
                b.state.t = target;
            }
            let stop = stop_a.map(|o| tag(o, "full")).or_else(|| stop_b.map(|o| tag(o, "static")));
            if let Some(out) = stop {
                on_sample(a, b)?;
                return Ok(Lockstep { outcome: out, dts });
            }
        }
        on_sample(a, b)?;
    }
    Ok(Lockstep { outcome: RunOutcome::completed(a.state.t), dts })
}

fn tag(mut out: RunOutcome, side: &str) -> RunOutcome {
    out.reason = format!("{side}: {}", out.reason);
    out
}

pub const COMPARISON_HEADER: &str = "t,r_sq,v_sq,E2_full,E2_static,dt";

/// One row of the comparison summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSummary {
    pub b: f64,
    pub sup_r_sq: f64,
    pub sup_v_sq: f64,
    /// Largest mass change of either trajectory.
    pub mass_drift: f64,
    pub outcome: RunOutcome,
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Co-evolve the Navier–Stokes and static-Stokes problems from the same
/// datum for each viscosity, tracking `r = rho - rho_s` and `v = u - u_s`.
/// Writes `compare_B<b>.csv` per viscosity and `comparison_summary.csv`.
pub fn run_comparison(cfg: &RunConfig, bs: &[f64], out: &Path) -> Result<Vec<ComparisonSummary>> {
    if cfg.law != VelocityLaw::NavierStokes {
        return Err(CliError::Config(format!("compare needs variant = navier_stokes, got {}", cfg.law.name())));
    }
    fs::create_dir_all(out)?;
    let mut summaries = Vec::new();
    for &b in bs {
        let mut full = Trajectory::new(build_state(cfg, VelocityLaw::NavierStokes, b)?);
        let mut stat = Trajectory::new(build_state(cfg, VelocityLaw::StaticStokes, b)?);
        let mut w = BufWriter::new(File::create(out.join(format!("compare_B{b}.csv")))?);
        writeln!(w, "{COMPARISON_HEADER}")?;
        let mass0 = full.state.density.mass();
        let (mut sup_r, mut sup_v, mut drift) = (0.0f64, 0.0f64, 0.0f64);
        let res = lockstep(&mut full, &mut stat, cfg.t_end, cfg.sample_every, |a, s| {
            let (r, v) = difference(&a.state, &s.state)?;
            sup_r = sup_r.max(r);
            sup_v = sup_v.max(v);
            drift = drift.max((a.state.density.mass() - mass0).abs()).max((s.state.density.mass() - mass0).abs());
            let e2 = |st: &SimState| st.density.fluctuation().l2_norm_sq();
            let row = [a.state.t, r, v, e2(&a.state), e2(&s.state), a.last_dt];
            writeln!(w, "{}", row.map(fmt).join(","))?;
            Ok(())
        })?;
        w.flush()?;
        summaries.push(ComparisonSummary { b, sup_r_sq: sup_r, sup_v_sq: sup_v, mass_drift: drift, outcome: res.outcome });
    }
    let mut w = BufWriter::new(File::create(out.join("comparison_summary.csv"))?);
    writeln!(w, "B,sup_r_sq,sup_v_sq,outcome,t_final")?;
    for s in &summaries {
        writeln!(w, "{},{},{},{},{}", fmt(s.b), fmt(s.sup_r_sq), fmt(s.sup_v_sq), s.outcome.kind, fmt(s.outcome.t_final))?;
    }
    w.flush()?;
    Ok(summaries)
}

/// `(||rho_a - rho_b||^2, ||u_a - u_b||^2)`.
pub fn difference(a: &SimState, b: &SimState) -> Result<(f64, f64)> {
    let r = a.rho().axpy(-1.0, b.rho())?.l2_norm_sq();
    let (ua, ub) = (velocity_of(a), velocity_of(b));
    let v = ua.u1.axpy(-1.0, &ub.u1)?.l2_norm_sq() + ua.u2.axpy(-1.0, &ub.u2)?.l2_norm_sq();
    Ok((r, v))
}

pub const REGIME_HEADER: &str = "g,B,outcome,t_final,max_E2,max_rho_inf";

/// One `(g, B)` cell of a sweep; `outcome` is `error` when the run failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub g: f64,
    pub b: f64,
    pub outcome: String,
    pub t_final: f64,
    pub max_e2: f64,
    pub max_rho_inf: f64,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            fmt(self.g),
            fmt(self.b),
            self.outcome,
            fmt(self.t_final),
            fmt(self.max_e2),
            fmt(self.max_rho_inf)
        )
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let cells: Vec<&str> = line.split(',').collect();
        let bad = || CliError::Other(format!("malformed regime row {line:?}"));
        if cells.len() != 6 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        Ok(SweepRow {
            g: num(cells[0])?,
            b: num(cells[1])?,
            outcome: cells[2].to_string(),
            t_final: num(cells[3])?,
            max_e2: num(cells[4])?,
            max_rho_inf: num(cells[5])?,
        })
    }
}

fn sweep_cell(template: &RunConfig, g: f64, b: f64, out: &Path) -> SweepRow {
    let mut cfg = template.clone();
    cfg.g = g;
    cfg.b = b;
    let path = out.join("cells").join(format!("g{g}_B{b}.csv"));
    let attempt = || -> Result<RunSummary> {
        let state = build_state(&cfg, cfg.law, b)?;
        let mut sink = CsvSink::create(&path)?;
        let (_, summary, _) = simulate(&cfg, state, |rec| Ok(sink.write(rec)?))?;
        sink.flush()?;
        Ok(summary)
    };
    match attempt() {
        Ok(s) => SweepRow {
            g,
            b,
            outcome: s.outcome_kind.name().to_string(),
            t_final: s.t_final,
            max_e2: s.max_e2,
            max_rho_inf: s.max_rho_inf,
        },
        Err(_) => SweepRow { g, b, outcome: "error".into(), t_final: f64::NAN, max_e2: f64::NAN, max_rho_inf: f64::NAN },
    }
}

/// Run every `(g, B)` cell on a pool of `sweep.workers` threads. Rows go to
/// `sweep_rows.csv` as they finish; `regime_map.csv` holds them sorted by
/// `(g, B)` axis position once all are done.
pub fn run_sweep(sweep: &SweepConfig, out: &Path) -> Result<Vec<SweepRow>> {
    fs::create_dir_all(out.join("cells"))?;
    let live = Mutex::new(BufWriter::new(File::create(out.join("sweep_rows.csv"))?));
    writeln!(live.lock().unwrap(), "{REGIME_HEADER}")?;
    let cells: Vec<(usize, usize)> =
        (0..sweep.g.len()).flat_map(|i| (0..sweep.b.len()).map(move |j| (i, j))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep.workers)
        .build()
        .map_err(|e| CliError::Other(e.to_string()))?;
    let mut rows: Vec<((usize, usize), SweepRow)> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(i, j)| {
                let row = sweep_cell(&sweep.template, sweep.g[i], sweep.b[j], out);
                let mut w = live.lock().unwrap();
                writeln!(w, "{}", row.to_csv())?;
                w.flush()?;
                Ok(((i, j), row))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by_key(|(k, _)| *k);
    let rows: Vec<SweepRow> = rows.into_iter().map(|(_, r)| r).collect();
    write_regime_map(&rows, &out.join("regime_map.csv"))?;
    Ok(rows)
}

pub fn write_regime_map(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{REGIME_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.to_csv())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_regime_map(path: &Path) -> Result<Vec<SweepRow>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(REGIME_HEADER) {
        return Err(CliError::Other(format!("{}: not a regime map", path.display())));
    }
    lines.filter(|l| !l.is_empty()).map(SweepRow::from_csv).collect()
}

/// Output directory: `--out` if given, else the config's.
pub fn out_dir(cfg: &RunConfig, flag: Option<&PathBuf>) -> PathBuf {
    flag.cloned().unwrap_or_else(|| cfg.out.clone())
}
