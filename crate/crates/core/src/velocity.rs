//! Velocity closures and stream-function recovery.
//!
//! Conventions: `perp = (-d2, d1)`, `u = perp psi`, `omega = perp . u`,
//! so `Lap psi = omega`. Stream function and vorticity live in the sine
//! basis, `u1` in the cosine basis and `u2` in the sine basis.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{BasisTag, Grid, SpectralField};
use crate::state::{Density, FlowState, SimState};

#[derive(Clone, Debug)]
pub struct Velocity {
    pub u1: SpectralField,
    pub u2: SpectralField,
}

impl Velocity {
    pub fn zeros(grid: &Grid) -> Self {
        Velocity { u1: SpectralField::zeros(grid, BasisTag::CosY), u2: SpectralField::zeros(grid, BasisTag::SinY) }
    }

    /// `d1 u1 + d2 u2`, cosine basis.
    pub fn divergence(&self) -> SpectralField {
        &self.u1.ddx1() + &self.u2.ddx2()
    }

    /// `perp . u = -d2 u1 + d1 u2`, sine basis.
    pub fn vorticity(&self) -> SpectralField {
        &self.u2.ddx1() - &self.u1.ddx2()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.u1.l2_norm_sq() + self.u2.l2_norm_sq()
    }

    /// `||grad u||^2` over both components.
    pub fn grad_norm_sq(&self) -> f64 {
        self.u1.weighted_norm_sq(1) + self.u2.weighted_norm_sq(1)
    }

    /// `||grad^2 u||^2`, all second partials of both components.
    pub fn hessian_norm_sq(&self) -> f64 {
        [&self.u1, &self.u2]
            .iter()
            .map(|f| f.derivative_norm_sq(2, 0) + 2.0 * f.derivative_norm_sq(1, 1) + f.derivative_norm_sq(0, 2))
            .sum()
    }

    /// `||Lap u||^2` over both components.
    pub fn laplacian_norm_sq(&self) -> f64 {
        self.u1.weighted_norm_sq(2) + self.u2.weighted_norm_sq(2)
    }

    /// Grid maximum of `|u|`.
    pub fn sup_norm(&self) -> f64 {
        let a = self.u1.to_physical();
        let b = self.u2.to_physical();
        a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max(x.hypot(*y)))
    }
}

fn expect(f: &SpectralField, tag: BasisTag) -> Result<()> {
    if f.tag() == tag {
        Ok(())
    } else {
        Err(Error::WrongTag { expected: tag, found: f.tag() })
    }
}

/// `u = (-d2 psi, d1 psi)`.
pub fn velocity_from_stream(psi: &SpectralField) -> Result<Velocity> {
    expect(psi, BasisTag::SinY)?;
    Ok(Velocity { u1: -&psi.ddx2(), u2: psi.ddx1() })
}

/// `psi = -(-Lap_D)^{-1} omega`.
pub fn stream_from_vorticity(omega: &SpectralField) -> Result<SpectralField> {
    Ok(-&omega.inv_laplace_dirichlet(1)?)
}

/// `d1 rho` projected onto the sine basis.
pub fn horizontal_forcing(rho: &Density) -> SpectralField {
    rho.field().ddx1().cos_to_sin().expect("density is a cosine field")
}

/// `(-Lap_D)^{-1} d1 rho`, the quantity whose norm measures horizontal mixing.
pub fn mixing_field(rho: &Density) -> SpectralField {
    horizontal_forcing(rho).inv_laplace_dirichlet(1).expect("sine field")
}

/// Stream function of the static Stokes law, `-g (-Lap_D)^{-2} d1 rho`.
pub fn static_stokes_stream(rho: &Density, g: f64) -> SpectralField {
    horizontal_forcing(rho).inv_laplace_dirichlet(2).expect("sine field").scale(-g)
}

/// Vorticity of the static Stokes law, `g (-Lap_D)^{-1} d1 rho`, restricted
/// to the modes that carry a velocity.
pub fn static_vorticity(rho: &Density, g: f64) -> SpectralField {
    velocity_modes(&mixing_field(rho).scale(g))
}

/// Drop the sine modes with no velocity on the grid: the Nyquist row and
/// the top `x2` mode, whose derivatives vanish at every node.
pub fn velocity_modes(f: &SpectralField) -> SpectralField {
    let grid = f.grid();
    let (half, top) = (grid.n1() / 2, grid.n2());
    let coeffs = f
        .modes()
        .map(|(k1, k2, c)| if k1 == half || (f.tag() == BasisTag::SinY && k2 == top) { Complex64::new(0.0, 0.0) } else { c })
        .collect();
    SpectralField::from_coeffs(grid, f.tag(), coeffs).expect("same shape")
}

pub fn static_stokes_velocity(rho: &Density, g: f64) -> Velocity {
    velocity_from_stream(&static_stokes_stream(rho, g)).expect("sine field")
}

/// Darcy law `u = g perp (-Lap_D)^{-1} d1 rho`.
pub fn darcy_velocity(rho: &Density, g: f64) -> Velocity {
    velocity_from_stream(&mixing_field(rho).scale(g)).expect("sine field")
}

/// Stream function of the current state, if the law has a flow.
pub fn stream_of(state: &SimState) -> Option<SpectralField> {
    let g = state.params.g;
    match &state.flow {
        FlowState::NoFlow => None,
        FlowState::Darcy => Some(mixing_field(&state.density).scale(g)),
        FlowState::StaticStokes => Some(static_stokes_stream(&state.density, g)),
        FlowState::NavierStokes { omega } => Some(stream_from_vorticity(omega).expect("sine field")),
    }
}

pub fn velocity_of(state: &SimState) -> Velocity {
    match stream_of(state) {
        None => Velocity::zeros(&state.params.grid),
        Some(psi) => velocity_from_stream(&psi).expect("sine field"),
    }
}

/// `u . grad f`, dealiased. The result has the parity of `f`.
pub fn advection(u: &Velocity, f: &SpectralField) -> Result<SpectralField> {
    let a = u.u1.multiply(&f.ddx1())?;
    let b = u.u2.multiply(&f.ddx2())?;
    a.axpy(1.0, &b)
}

/// `-u . grad omega + B Lap omega + B g d1 rho`.
pub fn ns_vorticity_rhs(state: &SimState) -> Result<SpectralField> {
    let (explicit, omega) = ns_explicit(state, &velocity_of(state))?;
    explicit.axpy(state.params.b, &omega.laplacian())
}

/// The explicit part `-u . grad omega + B g d1 rho` and the vorticity. The
/// forcing is restricted to `velocity_modes`, so a vorticity starting there
/// stays there.
pub(crate) fn ns_explicit<'a>(state: &'a SimState, u: &Velocity) -> Result<(SpectralField, &'a SpectralField)> {
    let omega = state.flow.omega().ok_or(Error::MissingVorticity)?;
    let forcing = velocity_modes(&horizontal_forcing(&state.density)).scale(state.params.b * state.params.g);
    let adv = advection(u, omega)?;
    Ok((forcing.axpy(-1.0, &adv)?, omega))
}
