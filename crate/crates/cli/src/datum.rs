//! Initial densities.

use std::f64::consts::PI;

use ksns_core::{BasisTag, Density, Grid, SpectralField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Section;
use crate::error::{config, Result};

const AREA: f64 = 2.0 * PI * PI;

#[derive(Debug, Clone, PartialEq)]
pub enum DatumSpec {
    Constant {
        mass: f64,
    },
    /// `rho_m + amplitude cos(k1 x1) cos(k2 x2)`.
    SingleMode {
        mass: f64,
        amplitude: f64,
        k1: usize,
        k2: usize,
    },
    /// A Gaussian of width `width` at `center`, periodized in `x1` and
    /// reflected evenly across both walls, on top of a constant `floor`;
    /// scaled so the total mass is `mass`.
    GaussianBump {
        mass: f64,
        center: (f64, f64),
        width: f64,
        floor: f64,
    },
    /// `rho_m` plus random modes with `k1 <= k1_max`, `k2 <= k2_max`,
    /// scaled so the grid sup of the fluctuation is `amplitude`.
    RandomBand {
        mass: f64,
        amplitude: f64,
        k1_max: usize,
        k2_max: usize,
    },
}

impl DatumSpec {
    pub(crate) fn from_section(s: &Section<'_>) -> Result<Self> {
        let mass = s.or("mass", AREA)?;
        if !(mass >= 0.0 && mass.is_finite()) {
            return config(format!("mass must be nonnegative, got {mass}"));
        }
        let spec = match s.str("preset").unwrap_or("constant") {
            "constant" => DatumSpec::Constant { mass },
            "single_mode" => DatumSpec::SingleMode {
                mass,
                amplitude: s.or("amplitude", 0.1)?,
                k1: s.or("k1", 1)?,
                k2: s.or("k2", 1)?,
            },
            "gaussian_bump" => DatumSpec::GaussianBump {
                mass,
                center: (s.or("center_x1", 0.0)?, s.or("center_x2", PI / 2.0)?),
                width: s.or("width", 0.3)?,
                floor: s.or("floor", 0.0)?,
            },
            "random_band" => DatumSpec::RandomBand {
                mass,
                amplitude: s.or("amplitude", 0.1)?,
                k1_max: s.or("k1_max", 4)?,
                k2_max: s.or("k2_max", 4)?,
            },
            other => return config(format!("unknown datum preset {other:?}")),
        };
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            DatumSpec::Constant { .. } => "constant",
            DatumSpec::SingleMode { .. } => "single_mode",
            DatumSpec::GaussianBump { .. } => "gaussian_bump",
            DatumSpec::RandomBand { .. } => "random_band",
        }
    }

    pub fn mass(&self) -> f64 {
        match *self {
            DatumSpec::Constant { mass }
            | DatumSpec::SingleMode { mass, .. }
            | DatumSpec::GaussianBump { mass, .. }
            | DatumSpec::RandomBand { mass, .. } => mass,
        }
    }

    pub fn with_mass(&self, m: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            DatumSpec::Constant { mass }
            | DatumSpec::SingleMode { mass, .. }
            | DatumSpec::GaussianBump { mass, .. }
            | DatumSpec::RandomBand { mass, .. } => *mass = m,
        }
        out
    }

    /// Band-limited initial density on `grid`. Fails if it is negative
    /// somewhere on the grid.
    pub fn build(&self, grid: &Grid, seed: u64) -> Result<Density> {
        let rho_m = self.mass() / AREA;
        let field = match *self {
            DatumSpec::Constant { .. } => SpectralField::constant(grid, rho_m),
            DatumSpec::SingleMode { amplitude, k1, k2, .. } => {
                if !grid.in_band(k1, k2) || k1 + k2 == 0 {
                    return config(format!("mode ({k1}, {k2}) is not a resolved fluctuation on {grid}"));
                }
                let mut f = SpectralField::constant(grid, rho_m);
                // cos(k1 x1) is split between the k1 and -k1 exponentials
                let c = if k1 == 0 { amplitude } else { 0.5 * amplitude };
                f.set(k1, k2, Complex64::new(c, 0.0));
                f
            }
            DatumSpec::GaussianBump { center, width, floor, .. } => {
                if !(width > 0.0) {
                    return config(format!("width must be positive, got {width}"));
                }
                if floor < 0.0 || floor > rho_m {
                    return config(format!("floor must lie in [0, rho_m = {rho_m}], got {floor}"));
                }
                let vals = bump_values(grid, center, width);
                let shape = SpectralField::to_spectral(grid, &vals, BasisTag::CosY)?.dealias();
                let scale = (rho_m - floor) / shape.mean();
                let mut f = shape.scale(scale);
                let c0 = f.get(0, 0);
                f.set(0, 0, c0 + floor);
                f
            }
            DatumSpec::RandomBand { amplitude, k1_max, k2_max, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut f = SpectralField::zeros(grid, BasisTag::CosY);
                for k1 in 0..=k1_max.min(grid.n1() / 2) {
                    for k2 in 0..=k2_max.min(grid.n2() - 1) {
                        if k1 + k2 == 0 || !grid.in_band(k1, k2) {
                            continue;
                        }
                        let im = if k1 == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) };
                        f.set(k1, k2, Complex64::new(rng.gen_range(-1.0..1.0), im));
                    }
                }
                let sup = f.grid_max_abs();
                let mut f = if sup > 0.0 { f.scale(amplitude / sup) } else { f };
                f.set(0, 0, Complex64::new(rho_m, 0.0));
                f
            }
        };
        let min = field.to_physical().into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-12 * field.grid_max_abs().max(1.0) {
            return config(format!("{} datum is negative on the grid (min {min:.3e})", self.name()));
        }
        Ok(Density::new(field)?)
    }
}

fn bump_values(grid: &Grid, (c1, c2): (f64, f64), width: f64) -> Vec<f64> {
    let x1 = grid.x1_nodes();
    let x2 = grid.x2_nodes();
    let s2 = 2.0 * width * width;
    // images far enough out that the neglected ones are below roundoff
    let reach = ((width * 40.0f64.sqrt()) / (2.0 * PI)).ceil() as i32 + 1;
    let mut out = vec![0.0; grid.physical_len()];
    for (i, &a) in x1.iter().enumerate() {
        for (j, &b) in x2.iter().enumerate() {
            let mut v = 0.0;
            for p in -reach..=reach {
                let d1 = a - c1 + 2.0 * PI * p as f64;
                for q in -reach..=reach {
                    // even reflection across x2 = 0 and x2 = pi: images at 2 pi q +- c2
                    for img in [c2, -c2] {
                        let d2 = b - img - 2.0 * PI * q as f64;
                        v += (-(d1 * d1 + d2 * d2) / s2).exp();
                    }
                }
            }
            out[grid.node_index(i, j)] = v;
        }
    }
    out
}
