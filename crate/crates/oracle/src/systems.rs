//! Dense assembly of the coupled elliptic system and the right-hand sides,
//! evaluated pointwise in expanded (non-conservative) form.

use nalgebra::DVector;

use crate::basis::{Deriv, Parity, RealBasis};
use crate::galerkin::{self, QuadGrid};

/// Solution of the coupled system
/// `-Lap omega = g d1 rho`, `Lap psi = omega`, both Dirichlet, in the sine basis.
pub struct StokesSolution {
    pub omega: Vec<f64>,
    pub psi: Vec<f64>,
}

pub fn stokes_coupled(
    n1: usize,
    n2: usize,
    g: f64,
    d1_rho: impl Fn(f64, f64) -> f64,
) -> StokesSolution {
    let b = RealBasis::new(n1, n2, Parity::Sin);
    let q = QuadGrid::for_grid(n1, n2);
    let k = galerkin::stiffness(&b, &q);
    let m = galerkin::mass(&b, &q);
    let lu = k.lu();
    let f = galerkin::load(&b, &q, |x1, x2| g * d1_rho(x1, x2));
    let omega = lu.solve(&f).expect("stiffness is nonsingular");
    // weak form of -Lap chi = omega with psi = -chi
    let chi = lu.solve(&(&m * &omega)).expect("stiffness is nonsingular");
    StokesSolution {
        omega: omega.as_slice().to_vec(),
        psi: chi.iter().map(|v| -v).collect(),
    }
}

/// Velocity `(-d2 psi, d1 psi)` at a point.
pub fn velocity_at(b: &RealBasis, psi: &[f64], x1: f64, x2: f64) -> (f64, f64) {
    (-b.eval(psi, x1, x2, Deriv::D2), b.eval(psi, x1, x2, Deriv::D1))
}

/// Stream function of a sine-basis vorticity, `Lap psi = omega`.
pub fn stream_of(n1: usize, n2: usize, omega: &[f64]) -> Vec<f64> {
    let b = RealBasis::new(n1, n2, Parity::Sin);
    let q = QuadGrid::for_grid(n1, n2);
    let k = galerkin::stiffness(&b, &q);
    let m = galerkin::mass(&b, &q);
    let chi = k
        .lu()
        .solve(&(m * DVector::from_column_slice(omega)))
        .expect("stiffness is nonsingular");
    chi.iter().map(|v| -v).collect()
}

/// Keller–Segel right-hand side
/// `-u.grad rho + Lap rho - grad rho . grad c - rho Lap c`
/// projected onto the cosine basis and truncated to the 2/3 band.
///
/// `psi` (sine basis), when given, is truncated to the band before use.
pub fn ks_rhs(n1: usize, n2: usize, rho: &[f64], psi: Option<&[f64]>) -> Vec<f64> {
    let bc = RealBasis::new(n1, n2, Parity::Cos);
    let bs = RealBasis::new(n1, n2, Parity::Sin);
    let q = QuadGrid::for_grid(n1, n2);
    let mass = galerkin::mass(&bc, &q);
    let c = galerkin::neumann_inverse(&bc, &q) * DVector::from_column_slice(rho);
    let c = c.as_slice();
    let psi_band = psi.map(|p| {
        let mut p = p.to_vec();
        bs.truncate(&mut p);
        p
    });
    let f = |x1: f64, x2: f64| {
        let r = bc.eval(rho, x1, x2, Deriv::None);
        let r1 = bc.eval(rho, x1, x2, Deriv::D1);
        let r2 = bc.eval(rho, x1, x2, Deriv::D2);
        let lap_r = bc.eval(rho, x1, x2, Deriv::D11) + bc.eval(rho, x1, x2, Deriv::D22);
        let c1 = bc.eval(c, x1, x2, Deriv::D1);
        let c2 = bc.eval(c, x1, x2, Deriv::D2);
        let lap_c = bc.eval(c, x1, x2, Deriv::D11) + bc.eval(c, x1, x2, Deriv::D22);
        let adv = match &psi_band {
            Some(p) => {
                let (u1, u2) = velocity_at(&bs, p, x1, x2);
                u1 * r1 + u2 * r2
            }
            None => 0.0,
        };
        -adv + lap_r - (r1 * c1 + r2 * c2) - r * lap_c
    };
    let load = galerkin::load(&bc, &q, f);
    let mut out = mass.lu().solve(&load).expect("mass is nonsingular").as_slice().to_vec();
    // the diffusion term is in band whenever rho is; truncation is only
    // meant for the products, so callers should pass band-limited rho
    bc.truncate(&mut out);
    out
}

/// Vorticity right-hand side `-u.grad omega + B Lap omega + B g P(d1 rho)`.
/// Only the advective product is truncated to the band.
pub fn vorticity_rhs(n1: usize, n2: usize, b_visc: f64, g: f64, rho: &[f64], omega: &[f64]) -> Vec<f64> {
    let bc = RealBasis::new(n1, n2, Parity::Cos);
    let bs = RealBasis::new(n1, n2, Parity::Sin);
    let q = QuadGrid::for_grid(n1, n2);
    let mass = galerkin::mass(&bs, &q);
    let lu = mass.lu();
    let mut psi = stream_of(n1, n2, omega);
    bs.truncate(&mut psi);
    let mut omega_band = omega.to_vec();
    bs.truncate(&mut omega_band);
    let adv = galerkin::load(&bs, &q, |x1, x2| {
        let (u1, u2) = velocity_at(&bs, &psi, x1, x2);
        let w1 = bs.eval(&omega_band, x1, x2, Deriv::D1);
        let w2 = bs.eval(&omega_band, x1, x2, Deriv::D2);
        -(u1 * w1 + u2 * w2)
    });
    let mut adv = lu.solve(&adv).expect("mass is nonsingular").as_slice().to_vec();
    bs.truncate(&mut adv);
    let lin = galerkin::load(&bs, &q, |x1, x2| {
        let lap = bs.eval(omega, x1, x2, Deriv::D11) + bs.eval(omega, x1, x2, Deriv::D22);
        b_visc * lap + b_visc * g * bc.eval(rho, x1, x2, Deriv::D1)
    });
    let lin = lu.solve(&lin).expect("mass is nonsingular");
    adv.iter().zip(lin.iter()).map(|(a, l)| a + l).collect()
}
