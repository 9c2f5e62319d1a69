mod common;

use std::f64::consts::PI;

use common::{random_field, rel, smooth_density};
use ksns_core::state::sobolev_seminorms;
use ksns_core::{BasisTag, Density, Grid, SpectralField};
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(24, 13).unwrap()
}

#[test]
fn mean_matches_midpoint_quadrature() {
    let g = grid();
    let rho = Density::new(random_field(&g, BasisTag::CosY, false, 3)).unwrap();
    let quad: f64 = rho.field().to_physical().iter().sum::<f64>() / g.physical_len() as f64;
    assert!((rho.mean() - quad).abs() < 1e-12);
    assert!((rho.mass() - 2.0 * PI * PI * quad).abs() < 1e-10);
}

#[test]
fn l2_norm_matches_grid_quadrature() {
    let g = grid();
    for tag in [BasisTag::CosY, BasisTag::SinY] {
        // band-limited, so the square is integrated exactly by the grid rule
        let f = random_field(&g, tag, true, 11);
        let quad: f64 = f.to_physical().iter().map(|v| v * v).sum::<f64>() * g.cell_area();
        assert!(rel(f.l2_norm_sq(), quad) < 1e-10, "{tag:?}");
    }
}

#[test]
fn laplacian_norm_equals_norm_of_composed_laplacian() {
    let g = grid();
    let f = random_field(&g, BasisTag::CosY, false, 5);
    let (_, hess, lap) = sobolev_seminorms(&f);
    let composed = (-&f.laplacian()).l2_norm_sq();
    assert!(rel(lap, composed) < 1e-13);
    assert!(rel(hess, lap) < 1e-13);
}

#[test]
fn gradient_norm_equals_sum_of_partials() {
    let g = grid();
    let f = random_field(&g, BasisTag::CosY, true, 6);
    let (grad, _, _) = sobolev_seminorms(&f);
    let parts = f.ddx1().l2_norm_sq() + f.ddx2().l2_norm_sq();
    assert!(rel(grad, parts) < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn split_reconstructs_and_is_orthogonal(seed in any::<u64>(), mean in 0.0f64..5.0) {
        let g = Grid::new(16, 9).unwrap();
        let rho = smooth_density(&g, mean, 2.0, seed);
        let parts = rho.split_bar_tilde();
        let sum = &parts.bar + &parts.tilde;
        prop_assert_eq!(sum.max_abs_diff(rho.field()), 0.0);

        let mut bar_fluct = parts.bar.clone();
        bar_fluct.coeffs_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
        let cross = bar_fluct.inner(&parts.tilde).unwrap();
        prop_assert!(cross.abs() < 1e-13);

        let e2 = rho.fluctuation().l2_norm_sq();
        let pyth = 2.0 * PI * parts.bar_fluct_l2_sq_1d() + parts.tilde.l2_norm_sq();
        prop_assert!(rel(e2, pyth) < 1e-12 || e2 < 1e-300);
    }

    #[test]
    fn norms_are_nonnegative_and_scale_quadratically(seed in any::<u64>(), s in -3.0f64..3.0) {
        let g = Grid::new(16, 9).unwrap();
        let f = random_field(&g, BasisTag::SinY, false, seed);
        let (a, b, c) = sobolev_seminorms(&f);
        prop_assert!(a >= 0.0 && b >= 0.0 && c >= 0.0);
        let scaled = f.scale(s).l2_norm_sq();
        prop_assert!((scaled - s * s * f.l2_norm_sq()).abs() <= 1e-12 * scaled.max(1.0));
    }
}

#[test]
fn bar_profile_of_x2_only_field_in_one_dimensional_norm() {
    let g = grid();
    let mut f = SpectralField::constant(&g, 1.0);
    f.set(0, 2, num_complex::Complex64::new(0.5, 0.0));
    let parts = Density::new(f).unwrap().split_bar_tilde();
    // int_0^pi (0.5 cos 2x)^2 = pi/8
    assert!((parts.bar_fluct_l2_sq_1d() - PI / 8.0).abs() < 1e-14);
}
