//! The self-check suite behind `ksns verify`: operator oracles, the static
//! law, per-sample identities, conservation and scheme order.

use std::f64::consts::PI;
use std::fmt;

use ksns_core::diagnostics::{ks_energy_terms, sample};
use ksns_core::integrate::{run, tail_fraction, StepController, Stepper, Trajectory};
use ksns_core::state::Scheme;
use ksns_core::velocity::{mixing_field, static_stokes_stream, static_stokes_velocity};
use ksns_core::{BasisTag, Density, Grid, SimState, SpectralField, VelocityLaw};
use ksns_oracle::{galerkin, systems, Deriv, Parity, QuadGrid, RealBasis};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::config::RunConfig;
use crate::datum::DatumSpec;
use crate::error::Result;
use crate::run::build_state;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.detail)
    }
}

/// Collects named sub-checks of one criterion.
struct Tally {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { failures: Vec::new(), notes: Vec::new() }
    }

    fn le(&mut self, what: &str, value: f64, tol: f64) {
        if value <= tol {
            self.notes.push(format!("{what} {value:.2e}"));
        } else {
            self.failures.push(format!("{what} {value:.3e} > {tol:.0e}"));
        }
    }

    fn finish(self, id: &'static str) -> Check {
        let pass = self.failures.is_empty();
        let detail = if pass { self.notes.join(", ") } else { self.failures.join("; ") };
        Check { id, pass, detail }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn operator_matrix(grid: &Grid, from: BasisTag, op: impl Fn(&SpectralField) -> Vec<f64>) -> DMatrix<f64> {
    let n = grid.physical_len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|c| {
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            op(&SpectralField::from_real_form(grid, from, &e).unwrap())
        })
        .collect();
    DMatrix::from_fn(n, n, |r, c| cols[c][r])
}

fn rel_matrix_dev(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    (a - b).iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale
}

/// Every linear operator against its dense matrix on 16x9, plus the
/// inverse-Laplacian eigenfunction examples.
pub fn check_operators() -> Result<Check> {
    let g = Grid::new(16, 9)?;
    let q = QuadGrid::for_grid(16, 9);
    let cos = RealBasis::new(16, 9, Parity::Cos);
    let sin = RealBasis::new(16, 9, Parity::Sin);
    let mut t = Tally::new();
    let mut worst = 0.0f64;
    let mut check = |name: &str, a: DMatrix<f64>, b: DMatrix<f64>| {
        let d = rel_matrix_dev(&a, &b);
        worst = worst.max(d);
        if d > 1e-12 {
            t.failures.push(format!("{name} {d:.3e} > 1e-12"));
        }
    };
    for (tag, basis, other) in [(BasisTag::CosY, &cos, &sin), (BasisTag::SinY, &sin, &cos)] {
        check("to_physical", operator_matrix(&g, tag, |f| f.to_physical()), galerkin::eval_matrix(basis));
        let n = g.physical_len();
        let to_spec = DMatrix::from_fn(n, n, |r, col| {
            let mut e = vec![0.0; n];
            e[col] = 1.0;
            SpectralField::to_spectral(&g, &e, tag).unwrap().to_real_form()[r]
        });
        check("to_spectral", to_spec, galerkin::interpolation_matrix(basis));
        check(
            "ddx1",
            operator_matrix(&g, tag, |f| f.ddx1().to_real_form()),
            galerkin::derivative_matrix(basis, basis, Deriv::D1),
        );
        check(
            "ddx2",
            operator_matrix(&g, tag, |f| f.ddx2().to_real_form()),
            galerkin::derivative_matrix(basis, other, Deriv::D2),
        );
        check(
            "dealias",
            operator_matrix(&g, tag, |f| f.dealias().to_real_form()),
            DMatrix::from_diagonal(&DVector::from_vec(basis.band_mask())),
        );
    }
    check(
        "inv_laplace_neumann",
        operator_matrix(&g, BasisTag::CosY, |f| f.inv_laplace_neumann().unwrap().to_real_form()),
        galerkin::neumann_inverse(&cos, &q),
    );
    for p in [1, 2] {
        check(
            "inv_laplace_dirichlet",
            operator_matrix(&g, BasisTag::SinY, |f| f.inv_laplace_dirichlet(p).unwrap().to_real_form()),
            galerkin::dirichlet_inverse(&sin, &q, p),
        );
    }
    check(
        "cos_to_sin",
        operator_matrix(&g, BasisTag::CosY, |f| f.cos_to_sin().unwrap().to_real_form()),
        galerkin::projection(&cos, &sin, &q),
    );
    t.notes.push(format!("dense operators {worst:.2e}"));

    // (-Lap_N)^{-1} cos x1 cos x2 = cos x1 cos x2 / 2
    let f = SpectralField::mode(&g, BasisTag::CosY, 1, 1, Complex64::new(0.5, 0.0));
    let e1 = (f.inv_laplace_neumann()?.get(1, 1) - Complex64::new(0.25, 0.0)).norm();
    // (-Lap_D)^{-2} sin 2x1 sin 3x2 = sin 2x1 sin 3x2 / 169
    let s = SpectralField::mode(&g, BasisTag::SinY, 2, 3, Complex64::new(0.0, -0.5));
    let e2 = (s.inv_laplace_dirichlet(2)?.get(2, 3) - Complex64::new(0.0, -0.5 / 169.0)).norm();
    t.le("eigenfunctions", e1.max(e2), 1e-13);
    Ok(t.finish("A1"))
}

/// Static-Stokes law against the dense coupled solve, plus its structure.
pub fn check_static_law() -> Result<Check> {
    let g = Grid::new(16, 9)?;
    let mut f = SpectralField::constant(&g, 1.0);
    f.set(1, 1, Complex64::new(0.25, 0.0));
    let rho = Density::new(f)?;
    let basis = RealBasis::new(16, 9, Parity::Sin);
    let mut t = Tally::new();
    let (mut dev, mut wall, mut div, mut lem) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for gravity in [1.0, 7.5] {
        let sol = systems::stokes_coupled(16, 9, gravity, |x1, x2| -0.5 * x1.sin() * x2.cos());
        let psi = static_stokes_stream(&rho, gravity).to_real_form();
        dev = dev.max(psi.iter().zip(&sol.psi).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())));
        let omega = mixing_field(&rho).scale(gravity).to_real_form();
        dev = dev.max(omega.iter().zip(&sol.omega).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())));
        let u = static_stokes_velocity(&rho, gravity);
        for (x1, x2) in [(0.1, 0.2), (2.0, 1.5), (-1.0, 3.0)] {
            let (a, b) = systems::velocity_at(&basis, &sol.psi, x1, x2);
            dev = dev.max((u.u1.eval_at(x1, x2) - a).abs()).max((u.u2.eval_at(x1, x2) - b).abs());
        }
        let du1 = u.u1.ddx2();
        for i in 0..12 {
            let x1 = -PI + 2.0 * PI * i as f64 / 12.0 + 0.1;
            for x2 in [0.0, PI] {
                wall = wall.max(u.u2.eval_at(x1, x2).abs()).max(du1.eval_at(x1, x2).abs());
            }
        }
        div = div.max(u.divergence().l2_norm_sq().sqrt());
        let (h, l) = (u.hessian_norm_sq(), u.laplacian_norm_sq());
        lem = lem.max(if l == 0.0 { h } else { rel(h, l) });
    }
    t.le("coupled solve", dev, 1e-8);
    t.le("wall values", wall, 1e-12);
    t.le("divergence", div, 1e-11);
    t.le("Hessian vs Laplacian", lem, 1e-12);
    Ok(t.finish("A2"))
}

/// Smooth subcritical datum used by the identity checks and the
/// comparison experiments.
pub fn reference_datum() -> DatumSpec {
    DatumSpec::GaussianBump { mass: 20.0, center: (0.5, 1.2), width: 0.5, floor: 0.5 }
}

/// `128x65`, Navier–Stokes, `g = 50`, `B = 100`, one time unit.
pub fn reference_config() -> RunConfig {
    RunConfig {
        n1: 128,
        n2: 65,
        law: VelocityLaw::NavierStokes,
        g: 50.0,
        b: 100.0,
        t_end: 1.0,
        sample_every: 0.02,
        datum: reference_datum(),
        ..RunConfig::default()
    }
}

/// Worst per-sample values over a run, and the end state.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityScan {
    pub samples: usize,
    pub ks_energy: f64,
    pub pythagoras: f64,
    /// Largest `h1neg_sq / sqrt(grad_rho_sq mix_sq)`; at most one.
    pub chain: f64,
    pub static_identity: f64,
    pub mass_drift: f64,
    pub final_tail: f64,
}

pub fn scan_identities(cfg: &RunConfig, law: VelocityLaw) -> Result<IdentityScan> {
    let state = build_state(cfg, law, cfg.b)?;
    let mass0 = state.density.mass();
    let mut scan = IdentityScan::default();
    let mut traj = Trajectory::new(state);
    run(&mut traj, cfg.t_end, cfg.sample_every, |tr| {
        let s = &tr.state;
        let r = sample(s, tr.last_dt)?;
        let terms = ks_energy_terms(s)?;
        scan.samples += 1;
        scan.ks_energy = scan.ks_energy.max(terms.residual().abs() / terms.scale().max(f64::MIN_POSITIVE));
        scan.pythagoras = scan.pythagoras.max(rel(2.0 * PI * r.ebar + r.etilde, r.e2));
        let bound = (r.grad_rho_sq * r.mix_sq).sqrt();
        if bound > 0.0 {
            scan.chain = scan.chain.max(r.h1neg_sq / bound);
        }
        if law == VelocityLaw::StaticStokes {
            let scale = s.params.g * r.mix_sq;
            scan.static_identity =
                scan.static_identity.max(if scale > 0.0 { r.res_static_identity.abs() / scale } else { r.res_static_identity.abs() });
        }
        scan.mass_drift = scan.mass_drift.max((r.mass - mass0).abs());
        scan.final_tail = tail_fraction(&s.density);
        Ok(())
    })?;
    Ok(scan)
}

/// Per-sample identities on a Navier–Stokes run and a parallel
/// static-Stokes run of the reference datum.
pub fn check_identities(ns: &IdentityScan, st: &IdentityScan) -> Check {
    let mut t = Tally::new();
    t.le("static identity", st.static_identity, 1e-10);
    t.le("KS energy", ns.ks_energy.max(st.ks_energy), 1e-8);
    t.le("Pythagoras", ns.pythagoras.max(st.pythagoras), 1e-10);
    t.le("Cauchy-Schwarz ratio - 1", (ns.chain.max(st.chain) - 1.0).max(0.0), 0.0);
    let mut c = t.finish("A3");
    c.detail = format!("{} ({} + {} samples)", c.detail, ns.samples, st.samples);
    c
}

fn fixed_steps(s0: &SimState, dt: f64, n: usize) -> Result<SimState> {
    let mut ctrl = StepController::new(&s0.params.dt);
    ctrl.scheme = Scheme::ImexCnab2;
    let mut stepper = Stepper::new(ctrl);
    let mut s = s0.clone();
    for _ in 0..n {
        s = stepper.step(&s, dt)?;
    }
    Ok(s)
}

/// Observed CNAB2 orders between `dt = 1e-2, 5e-3, 2.5e-3` against a
/// `dt = 1.5625e-4` reference (32x17, Navier–Stokes, `g = 5`, `B = 10`,
/// `T = 0.2`).
pub fn cnab2_orders() -> Result<(Vec<f64>, Vec<f64>)> {
    let cfg = RunConfig {
        n1: 32,
        n2: 17,
        law: VelocityLaw::NavierStokes,
        g: 5.0,
        b: 10.0,
        datum: DatumSpec::RandomBand { mass: 2.0 * PI * PI, amplitude: 0.8, k1_max: 6, k2_max: 6 },
        seed: 21,
        ..RunConfig::default()
    };
    let s0 = build_state(&cfg, VelocityLaw::NavierStokes, cfg.b)?;
    let t_end = 0.2;
    let reference = fixed_steps(&s0, 1.5625e-4, 1280)?;
    let errs = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&dt| {
            let s = fixed_steps(&s0, dt, (t_end / dt).round() as usize)?;
            Ok(s.rho().axpy(-1.0, reference.rho())?.l2_norm_sq().sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    let orders = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok((errs, orders))
}

pub fn check_conservation_and_order(ns: &IdentityScan, st: &IdentityScan) -> Result<Check> {
    let mut t = Tally::new();
    t.le("mass drift", ns.mass_drift.max(st.mass_drift), 1e-8);
    let (errs, orders) = cnab2_orders()?;
    let p = orders.iter().copied().fold(f64::INFINITY, f64::min);
    if p >= 1.8 {
        t.notes.push(format!("CNAB2 order {p:.3}"));
    } else {
        t.failures.push(format!("CNAB2 order {p:.3} < 1.8 (errors {errs:?})"));
    }
    t.le("final tail fraction", ns.final_tail, 1e-10);
    Ok(t.finish("A4"))
}

/// A1 to A4 in order.
pub fn verify_all() -> Result<Vec<Check>> {
    let mut out = vec![check_operators()?, check_static_law()?];
    let cfg = reference_config();
    let ns = scan_identities(&cfg, VelocityLaw::NavierStokes)?;
    let st = scan_identities(&cfg, VelocityLaw::StaticStokes)?;
    out.push(check_identities(&ns, &st));
    out.push(check_conservation_and_order(&ns, &st)?);
    Ok(out)
}
