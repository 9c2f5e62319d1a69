//! IMEX time stepping, step-size control and the blowup / resolution
//! detector.
//!
//! Diffusion (and viscosity for the vorticity) is implicit and diagonal;
//! transport, chemotaxis and buoyancy are explicit. Quasi-static flows are
//! recomputed from the density at the start of every step.

use std::fmt;

use crate::error::Result;
use crate::rhs::{chem_potential, ks_explicit, Terms};
use crate::spectral::SpectralField;
use crate::state::{Density, DtPolicy, FlowState, Scheme, SimState, Thresholds};
use crate::velocity::{ns_explicit, velocity_of, Velocity};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepController {
    pub dt: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub cfl_safety: f64,
    pub scheme: Scheme,
}

impl StepController {
    pub fn new(policy: &DtPolicy) -> Self {
        StepController {
            dt: policy.dt_init.clamp(policy.dt_min, policy.dt_max),
            dt_min: policy.dt_min,
            dt_max: policy.dt_max,
            cfl_safety: policy.cfl_safety,
            scheme: policy.scheme,
        }
    }
}

fn limit(dx: f64, speed: f64) -> f64 {
    if speed > 0.0 {
        dx / speed
    } else {
        f64::INFINITY
    }
}

/// Advective step limit from the flow and the chemotactic drift `grad c`,
/// clamped to `[dt_min, dt_max]`.
pub fn choose_dt(state: &SimState, ctrl: &StepController) -> f64 {
    choose_dt_for(&state.density, &velocity_of(state), ctrl)
}

pub(crate) fn choose_dt_for(rho: &Density, u: &Velocity, ctrl: &StepController) -> f64 {
    let grid = rho.grid();
    let (dx1, dx2) = (grid.dx1(), grid.dx2());
    let (c1, c2) = chem_potential(rho).gradient();
    let cfl = [
        limit(dx1, u.u1.grid_max_abs()),
        limit(dx2, u.u2.grid_max_abs()),
        limit(dx1, c1.grid_max_abs()),
        limit(dx2, c2.grid_max_abs()),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    (ctrl.cfl_safety * cfl).min(ctrl.dt_max).clamp(ctrl.dt_min, ctrl.dt_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    CompletedHorizon,
    BlowupDetected,
    ResolutionLoss,
}

impl OutcomeKind {
    pub fn name(self) -> &'static str {
        match self {
            OutcomeKind::CompletedHorizon => "CompletedHorizon",
            OutcomeKind::BlowupDetected => "BlowupDetected",
            OutcomeKind::ResolutionLoss => "ResolutionLoss",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [OutcomeKind::CompletedHorizon, OutcomeKind::BlowupDetected, OutcomeKind::ResolutionLoss]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub kind: OutcomeKind,
    pub t_final: f64,
    pub reason: String,
    /// Triggering metric and its value, for detector stops.
    pub metric: Option<(String, f64)>,
}

impl RunOutcome {
    pub fn completed(t: f64) -> Self {
        RunOutcome { kind: OutcomeKind::CompletedHorizon, t_final: t, reason: "reached t_end".into(), metric: None }
    }

    fn stop(kind: OutcomeKind, t: f64, metric: &str, value: f64, reason: String) -> Self {
        RunOutcome { kind, t_final: t, reason, metric: Some((metric.into(), value)) }
    }
}

/// Share of the fluctuation energy held by the outer third of the retained
/// band, measured by `max(k1 / K1, k2 / K2) > 2/3`.
pub fn tail_fraction(rho: &Density) -> f64 {
    let f = rho.field();
    let (kmax1, kmax2) = f.grid().band_limits();
    let (mut tail, mut total) = (0.0, 0.0);
    for (k1, k2, c) in f.modes() {
        if k1 + k2 == 0 || !f.grid().in_band(k1, k2) {
            continue;
        }
        let e = f.parseval_weight(k1, k2) * c.norm_sqr();
        total += e;
        if (k1 as f64 / kmax1 as f64).max(k2 as f64 / kmax2 as f64) > 2.0 / 3.0 {
            tail += e;
        }
    }
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}

/// Grid sup-norm of `rho`.
pub fn rho_sup(rho: &Density) -> f64 {
    rho.field().grid_max_abs()
}

/// Memoryless checks: non-finite data, sup-norm, spectral tail.
pub fn detect(state: &SimState, thresholds: &Thresholds) -> Option<RunOutcome> {
    let t = state.t;
    if !state.is_finite() {
        return Some(RunOutcome::stop(
            OutcomeKind::BlowupDetected,
            t,
            "non_finite",
            f64::NAN,
            "non-finite coefficients".into(),
        ));
    }
    let sup = rho_sup(&state.density);
    if sup > thresholds.rho_inf_max {
        return Some(RunOutcome::stop(
            OutcomeKind::BlowupDetected,
            t,
            "rho_inf",
            sup,
            format!("sup rho = {sup:.6e} exceeds {:.6e}", thresholds.rho_inf_max),
        ));
    }
    let tail = tail_fraction(&state.density);
    if tail > thresholds.tail_frac_max {
        return Some(RunOutcome::stop(
            OutcomeKind::ResolutionLoss,
            t,
            "tail_frac",
            tail,
            format!("spectral tail fraction {tail:.6e} exceeds {:.6e}", thresholds.tail_frac_max),
        ));
    }
    None
}

/// `detect` plus the step-collapse rule, which needs a memory of past steps.
#[derive(Debug, Clone)]
pub struct Detector {
    pub thresholds: Thresholds,
    pinned: usize,
    last_e2: f64,
}

impl Detector {
    pub fn new(thresholds: Thresholds) -> Self {
        Detector { thresholds, pinned: 0, last_e2: f64::NAN }
    }

    /// Check the state after a step; `pinned` says the controller wanted a
    /// step no larger than `dt_min`.
    pub fn observe(&mut self, state: &SimState, pinned: bool) -> Option<RunOutcome> {
        if let Some(out) = detect(state, &self.thresholds) {
            return Some(out);
        }
        let e2 = state.density.fluctuation().l2_norm_sq();
        if pinned && e2 > self.last_e2 {
            self.pinned += 1;
        } else {
            self.pinned = 0;
        }
        self.last_e2 = e2;
        if self.thresholds.dt_min_steps > 0 && self.pinned >= self.thresholds.dt_min_steps {
            return Some(RunOutcome::stop(
                OutcomeKind::BlowupDetected,
                state.t,
                "dt_pinned_steps",
                self.pinned as f64,
                format!("dt held at dt_min for {} steps while ||rho - rho_m||^2 grew", self.pinned),
            ));
        }
        None
    }
}

#[derive(Debug, Clone)]
struct History {
    rho: SpectralField,
    omega: Option<SpectralField>,
    dt: f64,
}

/// Advances states; holds the previous explicit terms for Adams–Bashforth.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub ctrl: StepController,
    pub terms: Terms,
    history: Option<History>,
}

impl Stepper {
    pub fn new(ctrl: StepController) -> Self {
        Stepper { ctrl, terms: Terms::default(), history: None }
    }

    pub fn with_terms(mut self, terms: Terms) -> Self {
        self.terms = terms;
        self
    }

    /// Forget the multistep history; the next step starts like the first.
    pub fn reset(&mut self) {
        self.history = None;
    }

    /// One step of size `dt`.
    pub fn step(&mut self, state: &SimState, dt: f64) -> Result<SimState> {
        let u = velocity_of(state);
        self.step_with(state, &u, dt)
    }

    pub(crate) fn step_with(&mut self, state: &SimState, u: &Velocity, dt: f64) -> Result<SimState> {
        let n_rho = ks_explicit(&state.density, u, self.terms)?;
        let n_omega = match state.flow {
            FlowState::NavierStokes { .. } => Some(ns_explicit(state, u)?.0),
            _ => None,
        };
        let scheme = self.ctrl.scheme;
        let prev = self.history.as_ref().filter(|_| scheme == Scheme::ImexCnab2);
        let extrapolate = |now: &SpectralField, before: Option<&SpectralField>, dt_prev: f64| match before {
            Some(b) => {
                let r = dt / dt_prev;
                now.scale(1.0 + 0.5 * r).axpy(-0.5 * r, b)
            }
            None => Ok(now.clone()),
        };

        let star_rho = extrapolate(&n_rho, prev.map(|h| &h.rho), prev.map_or(1.0, |h| h.dt))?;
        let rho_new = implicit(state.rho(), &star_rho, dt, 1.0, scheme);
        let flow = match (&state.flow, &n_omega) {
            (FlowState::NavierStokes { omega }, Some(n)) => {
                let star = extrapolate(n, prev.and_then(|h| h.omega.as_ref()), prev.map_or(1.0, |h| h.dt))?;
                FlowState::NavierStokes { omega: implicit(omega, &star, dt, state.params.b, scheme) }
            }
            (other, _) => other.clone(),
        };

        if scheme == Scheme::ImexCnab2 {
            self.history = Some(History { rho: n_rho, omega: n_omega, dt });
        }
        Ok(SimState {
            t: state.t + dt,
            density: Density::new(rho_new)?,
            flow,
            params: state.params.clone(),
        })
    }
}

/// Diagonal implicit update of `f_t = nu Lap f + n`.
fn implicit(f: &SpectralField, n: &SpectralField, dt: f64, nu: f64, scheme: Scheme) -> SpectralField {
    let mut out = f.clone();
    let src = n.coeffs();
    let n2 = f.grid().n2();
    let tag = f.tag();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        let (k1, k2) = (i / n2, tag.k2(i % n2));
        let a = nu * dt * (k1 * k1 + k2 * k2) as f64;
        *c = match scheme {
            Scheme::ImexEuler => (*c + src[i] * dt) / (1.0 + a),
            Scheme::ImexCnab2 => (*c * (1.0 - 0.5 * a) + src[i] * dt) / (1.0 + 0.5 * a),
        };
    }
    out
}

/// A state with its stepper and detector.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub state: SimState,
    pub stepper: Stepper,
    pub detector: Detector,
    /// Size of the last step taken (zero before the first).
    pub last_dt: f64,
}

impl Trajectory {
    pub fn new(state: SimState) -> Self {
        let ctrl = StepController::new(&state.params.dt);
        let thresholds = state.params.thresholds;
        Trajectory { state, stepper: Stepper::new(ctrl), detector: Detector::new(thresholds), last_dt: 0.0 }
    }

    /// Step size the controller asks for.
    pub fn proposed_dt(&self) -> f64 {
        choose_dt(&self.state, &self.stepper.ctrl)
    }

    /// Take a step of size `dt`; `proposed` is the controller's request,
    /// used by the step-collapse rule.
    pub fn advance(&mut self, dt: f64, proposed: f64) -> Result<Option<RunOutcome>> {
        self.state = self.stepper.step(&self.state, dt)?;
        self.last_dt = dt;
        self.stepper.ctrl.dt = dt;
        let pinned = proposed <= self.stepper.ctrl.dt_min;
        Ok(self.detector.observe(&self.state, pinned))
    }
}

/// Times at which samples are taken: `0, every, 2 every, ..., t_end`.
pub fn sample_times(t_end: f64, every: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    if every > 0.0 {
        let mut k = 1;
        loop {
            let t = k as f64 * every;
            if t >= t_end * (1.0 - 1e-12) {
                break;
            }
            out.push(t);
            k += 1;
        }
    }
    if t_end > 0.0 {
        out.push(t_end);
    }
    out
}

/// Integrate to `t_end`, landing exactly on each sample time and calling
/// `on_sample` there (including `t = 0`). Stops early on a detector verdict,
/// sampling the final state first.
pub fn run(
    traj: &mut Trajectory,
    t_end: f64,
    sample_every: f64,
    mut on_sample: impl FnMut(&Trajectory) -> Result<()>,
) -> Result<RunOutcome> {
    let targets = sample_times(t_end, sample_every);
    on_sample(traj)?;
    if let Some(out) = detect(&traj.state, &traj.detector.thresholds) {
        return Ok(out);
    }
    for &target in &targets[1..] {
        while traj.state.t < target {
            let proposed = traj.proposed_dt();
            let remaining = target - traj.state.t;
            // land on the target without leaving a sliver step
            let dt = if remaining <= proposed * (1.0 + 1e-9) {
                remaining
            } else if remaining < 2.0 * proposed {
                0.5 * remaining
            } else {
                proposed
            };
            let stop = traj.advance(dt, proposed)?;
            if dt == remaining {
                traj.state.t = target;
            }
            if let Some(out) = stop {
                on_sample(traj)?;
                return Ok(out);
            }
        }
        on_sample(traj)?;
    }
    Ok(RunOutcome::completed(traj.state.t))
}
