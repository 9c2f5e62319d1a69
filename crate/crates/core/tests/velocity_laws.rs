mod common;

use std::f64::consts::PI;

use common::{rel, smooth_density, smooth_sine};
use ksns_core::velocity::{
    darcy_velocity, mixing_field, ns_vorticity_rhs, static_stokes_stream, static_stokes_velocity, velocity_from_stream,
    velocity_modes, velocity_of, Velocity,
};
use ksns_core::{BasisTag, Density, FlowState, Grid, ModelParams, SimState, SpectralField};
use ksns_oracle::{systems, Parity, QuadGrid, RealBasis};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn grid16() -> Grid {
    Grid::new(16, 9).unwrap()
}

fn reference_density(g: &Grid) -> Density {
    let mut f = SpectralField::constant(g, 1.0);
    // 0.5 cos x1 cos x2 is coefficient 0.25 on the conjugate pair
    f.set(1, 1, c(0.25));
    Density::new(f).unwrap()
}

fn state(rho: Density, flow: FlowState, g: f64, b: f64) -> SimState {
    let params = ModelParams::new(rho.grid().clone(), g, b).unwrap();
    SimState::new(rho, flow, params).unwrap()
}

fn check_structure(u: &Velocity, what: &str) {
    let h1 = (u.l2_norm_sq() + u.grad_norm_sq()).sqrt();
    let div = u.divergence().l2_norm_sq().sqrt();
    assert!(div <= 1e-11 * h1.max(f64::MIN_POSITIVE), "{what}: divergence {div}");
    assert_eq!(u.u1.get(0, 0), c(0.0), "{what}: mean horizontal flow");
    let scale = u.u1.max_abs_coeff().max(u.u2.max_abs_coeff()).max(1.0);
    let du1 = u.u1.ddx2();
    for i in 0..12 {
        let x1 = -PI + 2.0 * PI * i as f64 / 12.0 + 0.1;
        for x2 in [0.0, PI] {
            assert!(u.u2.eval_at(x1, x2).abs() <= 1e-12 * scale, "{what}: u2 on wall");
            assert!(du1.eval_at(x1, x2).abs() <= 1e-12 * scale * 10.0, "{what}: d2 u1 on wall");
        }
    }
    let (hess, lap) = (u.hessian_norm_sq(), u.laplacian_norm_sq());
    assert!(rel(hess, lap) <= 1e-12 || lap == 0.0, "{what}: hessian {hess} vs laplacian {lap}");
    assert!(u.l2_norm_sq() <= u.grad_norm_sq() * (1.0 + 1e-12), "{what}: Poincare");
}

#[test]
fn stream_to_velocity_examples() {
    let g = grid16();
    let psi = SpectralField::mode(&g, BasisTag::SinY, 1, 1, Complex64::new(0.0, -0.5));
    // psi = sin x1 sin x2
    let u = velocity_from_stream(&psi).unwrap();
    for (x1, x2) in [(0.3, 0.7), (-2.0, 2.5), (1.1, 0.2)] {
        assert!((u.u1.eval_at(x1, x2) + f64::sin(x1) * f64::cos(x2)).abs() < 1e-14);
        assert!((u.u2.eval_at(x1, x2) - f64::cos(x1) * f64::sin(x2)).abs() < 1e-14);
    }
    let zero = velocity_from_stream(&SpectralField::zeros(&g, BasisTag::SinY)).unwrap();
    assert_eq!(zero.l2_norm_sq(), 0.0);
    assert!(velocity_from_stream(&SpectralField::zeros(&g, BasisTag::CosY)).is_err());
}

#[test]
fn vorticity_of_stream_velocity_is_laplacian() {
    let g = grid16();
    // the top sine mode and the Nyquist row have no derivative image
    let psi = smooth_sine(&g, 1.0, false, 9);
    let psi = SpectralField::from_coeffs(
        &g,
        BasisTag::SinY,
        psi.modes().map(|(k1, k2, v)| if k2 == 9 || k1 == 8 { c(0.0) } else { v }).collect(),
    )
    .unwrap();
    let u = velocity_from_stream(&psi).unwrap();
    assert!(u.vorticity().max_abs_diff(&psi.laplacian()) < 1e-13);
}

#[test]
fn static_stokes_matches_dense_coupled_solve() {
    let g = grid16();
    let rho = reference_density(&g);
    for gravity in [1.0, 7.5] {
        let sol = systems::stokes_coupled(16, 9, gravity, |x1, x2| -0.5 * x1.sin() * x2.cos());
        let psi = static_stokes_stream(&rho, gravity).to_real_form();
        let dev = psi.iter().zip(&sol.psi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-8, "stream function deviation {dev}");

        let omega = mixing_field(&rho).scale(gravity).to_real_form();
        let dev = omega.iter().zip(&sol.omega).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-8, "vorticity deviation {dev}");

        let u = static_stokes_velocity(&rho, gravity);
        let basis = RealBasis::new(16, 9, Parity::Sin);
        for (x1, x2) in [(0.1, 0.2), (2.0, 1.5), (-1.0, 3.0)] {
            let (a, b) = systems::velocity_at(&basis, &sol.psi, x1, x2);
            assert!((u.u1.eval_at(x1, x2) - a).abs() < 1e-8);
            assert!((u.u2.eval_at(x1, x2) - b).abs() < 1e-8);
        }
        check_structure(&u, "static Stokes");
    }
}

#[test]
fn x1_independent_and_constant_densities_drive_no_flow() {
    let g = grid16();
    let mut f = SpectralField::zeros(&g, BasisTag::CosY);
    f.set(0, 2, c(1.0));
    for rho in [Density::new(f).unwrap(), Density::new(SpectralField::constant(&g, 4.0)).unwrap()] {
        assert_eq!(static_stokes_velocity(&rho, 10.0).l2_norm_sq(), 0.0);
        assert_eq!(darcy_velocity(&rho, 10.0).l2_norm_sq(), 0.0);
        let s = state(rho, FlowState::StaticStokes, 10.0, 1.0);
        assert_eq!(velocity_of(&s).l2_norm_sq(), 0.0);
    }
}

#[test]
fn darcy_flow_is_stronger_than_stokes_flow_for_a_low_mode() {
    let g = grid16();
    let rho = reference_density(&g);
    let ud = darcy_velocity(&rho, 1.0);
    let us = static_stokes_velocity(&rho, 1.0);
    check_structure(&ud, "Darcy");
    // the Darcy stream function is the coupled system's vorticity
    let sol = systems::stokes_coupled(16, 9, 1.0, |x1, x2| -0.5 * x1.sin() * x2.cos());
    let want = velocity_from_stream(&SpectralField::from_real_form(&g, BasisTag::SinY, &sol.omega).unwrap()).unwrap();
    assert!(ud.u1.max_abs_diff(&want.u1) < 1e-8 && ud.u2.max_abs_diff(&want.u2) < 1e-8);
    assert!((ud.l2_norm_sq() - 0.18822847102959).abs() < 1e-10, "{}", ud.l2_norm_sq());
    assert!((us.l2_norm_sq() - 0.00714133704182).abs() < 1e-10, "{}", us.l2_norm_sq());
    assert!(ud.l2_norm_sq() >= us.l2_norm_sq());
}

#[test]
fn static_identity_against_independent_quadrature() {
    let g = grid16();
    let rho = smooth_density(&g, 2.0, 1.0, 77);
    let gravity = 3.0;
    let u = static_stokes_velocity(&rho, gravity);
    let lhs = gravity * mixing_field(&rho).l2_norm_sq();
    let flux = rho.field().inner(&u.u2).unwrap();
    assert!(rel(lhs, flux) < 1e-10, "{lhs} {flux}");
    let q = QuadGrid::for_grid(16, 9);
    let quad = q.integrate(|x1, x2| rho.field().eval_at(x1, x2) * u.u2.eval_at(x1, x2));
    assert!(rel(lhs, quad) < 1e-10, "{lhs} {quad}");
}

#[test]
fn no_flow_returns_zero_fields() {
    let g = grid16();
    let s = state(smooth_density(&g, 1.0, 1.0, 1), FlowState::NoFlow, 5.0, 1.0);
    let u = velocity_of(&s);
    assert_eq!(u.u1.max_abs_coeff(), 0.0);
    assert_eq!(u.u2.max_abs_coeff(), 0.0);
}

#[test]
fn navier_stokes_stream_of_eigenmode() {
    let g = grid16();
    // omega = sin x1 sin x2
    let omega = SpectralField::mode(&g, BasisTag::SinY, 1, 1, Complex64::new(0.0, -0.5));
    let s = state(
        Density::new(SpectralField::constant(&g, 1.0)).unwrap(),
        FlowState::NavierStokes { omega: omega.clone() },
        1.0,
        1.0,
    );
    let psi = ksns_core::velocity::stream_of(&s).unwrap();
    assert!(psi.max_abs_diff(&omega.scale(-0.5)) < 1e-16);
    assert!(psi.laplacian().max_abs_diff(&omega) < 1e-16);
    let u = velocity_of(&s);
    check_structure(&u, "Navier-Stokes");
    assert!(u.vorticity().max_abs_diff(&omega) < 1e-15);
}

#[test]
fn vorticity_rhs_examples() {
    let g = grid16();
    let rest = state(
        Density::new(SpectralField::constant(&g, 2.0)).unwrap(),
        FlowState::NavierStokes { omega: SpectralField::zeros(&g, BasisTag::SinY) },
        3.0,
        2.0,
    );
    assert_eq!(ns_vorticity_rhs(&rest).unwrap().max_abs_coeff(), 0.0);

    let shear = SpectralField::mode(&g, BasisTag::SinY, 0, 1, c(1.0));
    let s = state(
        Density::new(SpectralField::constant(&g, 2.0)).unwrap(),
        FlowState::NavierStokes { omega: shear.clone() },
        3.0,
        2.0,
    );
    let rhs = ns_vorticity_rhs(&s).unwrap();
    assert!(rhs.max_abs_diff(&shear.scale(-2.0)) < 1e-14);

    let no_omega = state(Density::new(SpectralField::constant(&g, 2.0)).unwrap(), FlowState::Darcy, 3.0, 2.0);
    assert!(ns_vorticity_rhs(&no_omega).is_err());
}

#[test]
fn vorticity_rhs_matches_dense_assembly() {
    let g = grid16();
    for seed in 0..3 {
        let rho = smooth_density(&g, 1.5, 0.3, seed);
        let omega = velocity_modes(&smooth_sine(&g, 0.3, false, seed + 100));
        let (b, gravity) = (2.0, 1.5);
        let want = systems::vorticity_rhs(16, 9, b, gravity, &rho.field().to_real_form(), &omega.to_real_form());
        // the solver keeps the vorticity on modes that carry a velocity
        let want = velocity_modes(&SpectralField::from_real_form(&g, BasisTag::SinY, &want).unwrap()).to_real_form();
        let s = state(rho, FlowState::NavierStokes { omega }, gravity, b);
        let got = ns_vorticity_rhs(&s).unwrap().to_real_form();
        let dev = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-6, "seed {seed}: {dev}");
    }
}

/// Smallest generalized eigenvalue of `||grad u||^2` against `||u||^2` over
/// all discrete stream-function velocities.
#[test]
fn poincare_constant_is_one() {
    let g = grid16();
    let n = g.physical_len();
    // discrete V: drop stream modes with no velocity image (Nyquist k1,
    // top sine mode)
    let keep: Vec<usize> = (0..n)
        .filter(|&i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let f = SpectralField::from_real_form(&g, BasisTag::SinY, &e).unwrap();
            let ok = f.modes().all(|(k1, k2, v)| v == c(0.0) || (k1 != 8 && k2 != 9));
            ok
        })
        .collect();
    let n = keep.len();
    let fields: Vec<Velocity> = keep
        .iter()
        .map(|&i| {
            let mut e = vec![0.0; g.physical_len()];
            e[i] = 1.0;
            velocity_from_stream(&SpectralField::from_real_form(&g, BasisTag::SinY, &e).unwrap()).unwrap()
        })
        .collect();
    let pair = |a: &Velocity, b: &Velocity, f: &dyn Fn(&Velocity) -> f64| {
        let plus = Velocity { u1: &a.u1 + &b.u1, u2: &a.u2 + &b.u2 };
        let minus = Velocity { u1: &a.u1 - &b.u1, u2: &a.u2 - &b.u2 };
        (f(&plus) - f(&minus)) / 4.0
    };
    let l2 = |v: &Velocity| v.l2_norm_sq();
    let h1 = |v: &Velocity| v.grad_norm_sq();
    let a = DMatrix::from_fn(n, n, |i, j| pair(&fields[i], &fields[j], &l2));
    let b = DMatrix::from_fn(n, n, |i, j| pair(&fields[i], &fields[j], &h1));
    let chol = a.clone().cholesky().expect("L2 Gram matrix is positive definite");
    let l_inv = chol.l().try_inverse().unwrap();
    let reduced = &l_inv * b * l_inv.transpose();
    let sym = (&reduced + reduced.transpose()) * 0.5;
    let lambda_min = SymmetricEigen::new(sym).eigenvalues.min();
    let c_p = lambda_min.powf(-0.5);
    assert!((c_p - 1.0).abs() < 1e-10, "Poincare constant {c_p}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_law_produces_admissible_velocities(seed in any::<u64>(), gravity in 0.1f64..100.0) {
        let g = Grid::new(16, 9).unwrap();
        let rho = smooth_density(&g, 1.0, 1.0, seed);
        check_structure(&static_stokes_velocity(&rho, gravity), "static Stokes");
        check_structure(&darcy_velocity(&rho, gravity), "Darcy");
        let omega = smooth_sine(&g, gravity, false, seed ^ 0x5555);
        let s = state(rho.clone(), FlowState::NavierStokes { omega }, gravity, 1.0);
        check_structure(&velocity_of(&s), "Navier-Stokes");
    }

    #[test]
    fn static_identity_holds_for_random_densities(seed in any::<u64>(), gravity in 0.1f64..1000.0) {
        let g = Grid::new(24, 13).unwrap();
        let rho = smooth_density(&g, 1.0, 2.0, seed);
        let u = static_stokes_velocity(&rho, gravity);
        let lhs = gravity * mixing_field(&rho).l2_norm_sq();
        let flux = rho.field().inner(&u.u2).unwrap();
        prop_assert!(rel(lhs, flux) < 1e-10);
    }
}
