//! Bisection searches for the critical mass without flow and the smallest
//! buoyancy that prevents blowup under the static law.

use ksns_core::integrate::OutcomeKind;
use ksns_core::VelocityLaw;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::run::{build_state, simulate};

/// Result of a bisection: the predicate is false at `lo` and true at `hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    /// Every evaluated point and its verdict, in evaluation order.
    pub evals: Vec<(f64, bool)>,
}

/// Geometric bisection of a monotone predicate on `[lo, hi]` until
/// `hi / lo <= 1 + rel_tol`. An endpoint is evaluated only if the search
/// ends next to it without having tested it.
pub fn bisect(lo: f64, hi: f64, rel_tol: f64, mut pred: impl FnMut(f64) -> Result<bool>) -> Result<Bracket> {
    if !(lo > 0.0 && hi > lo && rel_tol > 0.0) {
        return Err(CliError::Config(format!("bad bisection interval [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut a_seen, mut b_seen) = (false, false);
    let mut evals = Vec::new();
    while b / a > 1.0 + rel_tol {
        let m = (a * b).sqrt();
        let v = pred(m)?;
        evals.push((m, v));
        if v {
            b = m;
            b_seen = true;
        } else {
            a = m;
            a_seen = true;
        }
    }
    if !a_seen {
        let v = pred(a)?;
        evals.push((a, v));
        if v {
            return Err(CliError::Other(format!("predicate already holds at the lower end {a}")));
        }
    }
    if !b_seen {
        let v = pred(b)?;
        evals.push((b, v));
        if !v {
            return Err(CliError::Other(format!("predicate fails at the upper end {b}")));
        }
    }
    Ok(Bracket { lo: a, hi: b, evals })
}

fn outcome(cfg: &RunConfig) -> Result<OutcomeKind> {
    let state = build_state(cfg, cfg.law, cfg.b)?;
    Ok(simulate(cfg, state, |_| Ok(()))?.0.kind)
}

/// Critical mass of `cfg`'s datum without flow: the smallest mass whose run
/// ends in `BlowupDetected` before `cfg.t_end`.
pub fn critical_mass(cfg: &RunConfig, lo: f64, hi: f64, rel_tol: f64) -> Result<Bracket> {
    let mut c = cfg.clone();
    c.law = VelocityLaw::NoFlow;
    bisect(lo, hi, rel_tol, |m| {
        c.datum = cfg.datum.with_mass(m);
        Ok(outcome(&c)? == OutcomeKind::BlowupDetected)
    })
}

/// Smallest buoyancy for which the static-Stokes run of `cfg` reaches
/// `cfg.t_end` with `CompletedHorizon`.
pub fn critical_g(cfg: &RunConfig, lo: f64, hi: f64, rel_tol: f64) -> Result<Bracket> {
    let mut c = cfg.clone();
    c.law = VelocityLaw::StaticStokes;
    bisect(lo, hi, rel_tol, |g| {
        c.g = g;
        Ok(outcome(&c)? == OutcomeKind::CompletedHorizon)
    })
}
