//! Physical unknowns, the horizontal-mean / fluctuation split, norms, and
//! the simulation state record.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{BasisTag, Grid, SpectralField};

/// Cell density in the cosine basis.
#[derive(Clone, Debug)]
pub struct Density(SpectralField);

impl Density {
    pub fn new(field: SpectralField) -> Result<Self> {
        if field.tag() != BasisTag::CosY {
            return Err(Error::WrongTag { expected: BasisTag::CosY, found: field.tag() });
        }
        Ok(Density(field))
    }

    pub fn field(&self) -> &SpectralField {
        &self.0
    }

    pub fn into_field(self) -> SpectralField {
        self.0
    }

    pub fn grid(&self) -> &Grid {
        self.0.grid()
    }

    /// Mean over the channel, `rho_m`.
    pub fn mean(&self) -> f64 {
        self.0.mean()
    }

    /// Total mass `2 pi^2 rho_m`.
    pub fn mass(&self) -> f64 {
        2.0 * PI * PI * self.mean()
    }

    /// `rho - rho_m`.
    pub fn fluctuation(&self) -> SpectralField {
        let mut f = self.0.clone();
        f.coeffs_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
        f
    }

    /// Horizontal average and fluctuation.
    pub fn split_bar_tilde(&self) -> BarTilde {
        let n2 = self.grid().n2();
        let mut bar = SpectralField::zeros(self.grid(), BasisTag::CosY);
        let mut tilde = self.0.clone();
        bar.coeffs_mut()[..n2].copy_from_slice(&self.0.coeffs()[..n2]);
        for c in &mut tilde.coeffs_mut()[..n2] {
            *c = num_complex::Complex64::new(0.0, 0.0);
        }
        BarTilde { bar, tilde }
    }
}

/// `rho = bar + tilde` with `bar` the `k1 = 0` slice.
#[derive(Clone, Debug)]
pub struct BarTilde {
    pub bar: SpectralField,
    pub tilde: SpectralField,
}

impl BarTilde {
    /// Cosine coefficients of the `x2` profile `bar(x2)`.
    pub fn profile(&self) -> Vec<f64> {
        self.bar.coeffs()[..self.bar.grid().n2()].iter().map(|c| c.re).collect()
    }

    /// `||bar - rho_m||^2` in `L2([0, pi])`.
    pub fn bar_fluct_l2_sq_1d(&self) -> f64 {
        let mut b = self.bar.clone();
        b.coeffs_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
        b.l2_norm_sq() / (2.0 * PI)
    }
}

/// `(||grad f||^2, ||grad^2 f||^2, ||Lap f||^2)`.
pub fn sobolev_seminorms(f: &SpectralField) -> (f64, f64, f64) {
    let grad = f.weighted_norm_sq(1);
    let hess = f.derivative_norm_sq(2, 0) + 2.0 * f.derivative_norm_sq(1, 1) + f.derivative_norm_sq(0, 2);
    let lap = f.weighted_norm_sq(2);
    (grad, hess, lap)
}

/// Velocity closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VelocityLaw {
    NoFlow,
    Darcy,
    StaticStokes,
    NavierStokes,
}

impl VelocityLaw {
    pub fn code(self) -> u8 {
        match self {
            VelocityLaw::NoFlow => 0,
            VelocityLaw::Darcy => 1,
            VelocityLaw::StaticStokes => 2,
            VelocityLaw::NavierStokes => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => VelocityLaw::NoFlow,
            1 => VelocityLaw::Darcy,
            2 => VelocityLaw::StaticStokes,
            3 => VelocityLaw::NavierStokes,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            VelocityLaw::NoFlow => "none",
            VelocityLaw::Darcy => "darcy",
            VelocityLaw::StaticStokes => "static_stokes",
            VelocityLaw::NavierStokes => "navier_stokes",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "none" | "noflow" | "no_flow" => VelocityLaw::NoFlow,
            "darcy" => VelocityLaw::Darcy,
            "static_stokes" | "staticstokes" | "stokes" | "static" => VelocityLaw::StaticStokes,
            "navier_stokes" | "navierstokes" | "ns" => VelocityLaw::NavierStokes,
            _ => return None,
        })
    }
}

/// Flow unknown: only Navier–Stokes carries its own vorticity.
#[derive(Clone, Debug)]
pub enum FlowState {
    NoFlow,
    Darcy,
    StaticStokes,
    NavierStokes { omega: SpectralField },
}

impl FlowState {
    pub fn law(&self) -> VelocityLaw {
        match self {
            FlowState::NoFlow => VelocityLaw::NoFlow,
            FlowState::Darcy => VelocityLaw::Darcy,
            FlowState::StaticStokes => VelocityLaw::StaticStokes,
            FlowState::NavierStokes { .. } => VelocityLaw::NavierStokes,
        }
    }

    pub fn omega(&self) -> Option<&SpectralField> {
        match self {
            FlowState::NavierStokes { omega } => Some(omega),
            _ => None,
        }
    }

    /// A flow state for a law; Navier–Stokes starts at rest.
    pub fn at_rest(law: VelocityLaw, grid: &Grid) -> FlowState {
        match law {
            VelocityLaw::NoFlow => FlowState::NoFlow,
            VelocityLaw::Darcy => FlowState::Darcy,
            VelocityLaw::StaticStokes => FlowState::StaticStokes,
            VelocityLaw::NavierStokes => FlowState::NavierStokes { omega: SpectralField::zeros(grid, BasisTag::SinY) },
        }
    }
}

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Backward Euler diffusion, forward Euler for everything else.
    ImexEuler,
    /// Crank–Nicolson diffusion, second-order Adams–Bashforth otherwise.
    ImexCnab2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtPolicy {
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub cfl_safety: f64,
    pub scheme: Scheme,
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy { dt_init: 1e-3, dt_min: 1e-7, dt_max: 1e-2, cfl_safety: 0.4, scheme: Scheme::ImexCnab2 }
    }
}

/// Engineering proxies for finite-time blowup and loss of resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Blowup when the grid sup-norm of `rho` exceeds this.
    pub rho_inf_max: f64,
    /// Resolution loss when the outer-annulus energy fraction exceeds this.
    pub tail_frac_max: f64,
    /// Blowup when `dt` sits at `dt_min` this many steps while
    /// `||rho - rho_m||^2` grows.
    pub dt_min_steps: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { rho_inf_max: 1e3, tail_frac_max: 0.1, dt_min_steps: 50 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Buoyancy amplitude.
    pub g: f64,
    /// Viscosity (Navier–Stokes only).
    pub b: f64,
    pub grid: Grid,
    pub dt: DtPolicy,
    pub thresholds: Thresholds,
}

impl ModelParams {
    pub fn new(grid: Grid, g: f64, b: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter(format!("g must be positive, got {g}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("B must be positive, got {b}")));
        }
        Ok(ModelParams { g, b, grid, dt: DtPolicy::default(), thresholds: Thresholds::default() })
    }
}

/// One integrable snapshot.
#[derive(Clone, Debug)]
pub struct SimState {
    pub t: f64,
    pub density: Density,
    pub flow: FlowState,
    pub params: ModelParams,
}

impl SimState {
    pub fn new(density: Density, flow: FlowState, params: ModelParams) -> Result<Self> {
        if density.grid() != &params.grid {
            return Err(Error::GridMismatch { a: density.grid().to_string(), b: params.grid.to_string() });
        }
        if let Some(w) = flow.omega() {
            if w.tag() != BasisTag::SinY {
                return Err(Error::WrongTag { expected: BasisTag::SinY, found: w.tag() });
            }
            if w.grid() != &params.grid {
                return Err(Error::GridMismatch { a: w.grid().to_string(), b: params.grid.to_string() });
            }
        }
        Ok(SimState { t: 0.0, density, flow, params })
    }

    pub fn rho(&self) -> &SpectralField {
        self.density.field()
    }

    pub fn law(&self) -> VelocityLaw {
        self.flow.law()
    }

    pub fn is_finite(&self) -> bool {
        self.rho().is_finite() && self.flow.omega().is_none_or(|w| w.is_finite())
    }
}
