//! Keller–Segel right-hand side.

use crate::error::{Error, Result};
use crate::spectral::SpectralField;
use crate::state::{Density, SimState};
use crate::velocity::{advection, velocity_of, Velocity};

/// `c = (-Lap_N)^{-1} (rho - rho_m)`, mean zero.
#[derive(Clone, Debug)]
pub struct ChemPotential {
    pub c: SpectralField,
}

impl ChemPotential {
    /// Chemotactic drift `grad c` as (cosine, sine) fields.
    pub fn gradient(&self) -> (SpectralField, SpectralField) {
        (self.c.ddx1(), self.c.ddx2())
    }
}

pub fn chem_potential(rho: &Density) -> ChemPotential {
    ChemPotential { c: rho.field().inv_laplace_neumann().expect("density is a cosine field") }
}

/// Which explicit terms enter the density equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Terms {
    pub advection: bool,
    pub chemotaxis: bool,
}

impl Default for Terms {
    fn default() -> Self {
        Terms { advection: true, chemotaxis: true }
    }
}

/// Explicit part of the density equation:
/// `-u . grad rho - d1(rho d1 c) - d2(rho d2 c)`.
pub fn ks_explicit(rho: &Density, u: &Velocity, terms: Terms) -> Result<SpectralField> {
    let f = rho.field();
    if f.grid() != u.u1.grid() {
        return Err(Error::GridMismatch { a: f.grid().to_string(), b: u.u1.grid().to_string() });
    }
    let mut out = SpectralField::zeros(f.grid(), f.tag());
    if terms.advection {
        out = out.axpy(-1.0, &advection(u, f)?)?;
    }
    if terms.chemotaxis {
        let (c1, c2) = chem_potential(rho).gradient();
        let flux1 = f.multiply(&c1)?;
        let flux2 = f.multiply(&c2)?;
        out = out.axpy(-1.0, &flux1.ddx1())?.axpy(-1.0, &flux2.ddx2())?;
    }
    Ok(out)
}

/// `-u . grad rho + Lap rho - div(rho grad c)`.
pub fn ks_rhs(rho: &Density, u: &Velocity) -> Result<SpectralField> {
    ks_explicit(rho, u, Terms::default())?.axpy(1.0, &rho.field().laplacian())
}

/// `ks_rhs` with the velocity of the state's own law.
pub fn state_ks_rhs(state: &SimState) -> Result<SpectralField> {
    ks_rhs(&state.density, &velocity_of(state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{BasisTag, Grid};
    use num_complex::Complex64;

    #[test]
    fn constant_density_is_an_equilibrium() {
        let g = Grid::new(16, 9).unwrap();
        let rho = Density::new(SpectralField::constant(&g, 3.0)).unwrap();
        assert_eq!(chem_potential(&rho).c.max_abs_coeff(), 0.0);
        assert!(ks_rhs(&rho, &Velocity::zeros(&g)).unwrap().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn potential_of_eigenmode() {
        let g = Grid::new(16, 9).unwrap();
        let mut f = SpectralField::constant(&g, 1.5);
        f.set(1, 1, Complex64::new(0.25, 0.0));
        let c = chem_potential(&Density::new(f).unwrap()).c;
        let want = SpectralField::mode(&g, BasisTag::CosY, 1, 1, Complex64::new(0.125, 0.0));
        assert!(c.max_abs_diff(&want) < 1e-16);
    }
}
