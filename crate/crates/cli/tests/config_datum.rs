use std::f64::consts::PI;

use ksns_cli::config::{OmegaInit, RunConfig, SweepConfig};
use ksns_cli::datum::DatumSpec;
use ksns_cli::CliError;
use ksns_core::state::Scheme;
use ksns_core::{Grid, VelocityLaw};
use proptest::prelude::*;

fn is_config_error(r: Result<RunConfig, CliError>) -> bool {
    matches!(r, Err(e) if e.exit_code() == 2)
}

#[test]
fn empty_config_takes_defaults() {
    let cfg = RunConfig::parse("").unwrap();
    assert_eq!((cfg.n1, cfg.n2), (64, 33));
    assert_eq!(cfg.law, VelocityLaw::NoFlow);
    assert_eq!(cfg.datum, DatumSpec::Constant { mass: 2.0 * PI * PI });
    assert_eq!(cfg.dt.scheme, Scheme::ImexCnab2);
}

#[test]
fn full_config() {
    let text = "\
[run]
n1 = 32
n2 = 17
variant = navier_stokes
g = 50
B = 100
t_end = 2.5
sample_every = 0.1
omega_init = static
scheme = euler
dt_max = 0.005
cfl_safety = 0.2
seed = 9
out = results/a
compare_B = 10, 100

[datum]
preset = gaussian_bump
mass = 60
center_x1 = 0.5
center_x2 = 1.0
width = 0.4
floor = 0.1

[detector]
rho_inf_max = 500
tail_frac_max = 0.05
dt_min_steps = 7
";
    let cfg = RunConfig::parse(text).unwrap();
    assert_eq!((cfg.n1, cfg.n2, cfg.law), (32, 17, VelocityLaw::NavierStokes));
    assert_eq!((cfg.g, cfg.b, cfg.t_end, cfg.sample_every), (50.0, 100.0, 2.5, 0.1));
    assert_eq!(cfg.omega_init, OmegaInit::Static);
    assert_eq!(cfg.dt.scheme, Scheme::ImexEuler);
    assert_eq!((cfg.dt.dt_max, cfg.dt.cfl_safety), (0.005, 0.2));
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.out.to_str(), Some("results/a"));
    assert_eq!(cfg.compare_b, vec![10.0, 100.0]);
    assert_eq!(cfg.datum, DatumSpec::GaussianBump { mass: 60.0, center: (0.5, 1.0), width: 0.4, floor: 0.1 });
    assert_eq!((cfg.thresholds.rho_inf_max, cfg.thresholds.tail_frac_max, cfg.thresholds.dt_min_steps), (500.0, 0.05, 7));
    assert_eq!(cfg.source, text);
}

#[test]
fn malformed_configs_are_config_errors() {
    for text in [
        "[run]\nvariant = euler\n",
        "[run]\nn1 = 7\n",
        "[run]\nn1 = 32\nn2 = 2\n",
        "[run]\ng = -1\n",
        "[run]\nB = 0\n",
        "[run]\nt_end = abc\n",
        "[run]\nspeed = 3\n",
        "[bogus]\nx = 1\n",
        "[datum]\npreset = triangle\n",
        "[run]\ndt_min = 0.1\ndt_max = 0.01\n",
        "[run]\ncompare_B = 10, x\n",
        "[datum]\nmass = -3\n",
        "[run]\nscheme = rk4\n",
        "n1 = 4\n",
    ] {
        assert!(is_config_error(RunConfig::parse(text)), "{text:?}");
    }
}

#[test]
fn velocity_datum_only_for_navier_stokes() {
    for v in ["static_stokes", "darcy", "none"] {
        assert!(is_config_error(RunConfig::parse(&format!("[run]\nvariant = {v}\nomega_init = zero\n"))));
    }
    let ok = RunConfig::parse("[run]\nvariant = navier_stokes\nomega_init = zero\n").unwrap();
    assert_eq!(ok.omega_init, OmegaInit::Zero);
}

#[test]
fn sweep_axes() {
    let s = SweepConfig::parse("[run]\ng = 3\nB = 4\n[sweep]\ng = 1, 2\nworkers = 3\n").unwrap();
    assert_eq!(s.g, vec![1.0, 2.0]);
    assert_eq!(s.b, vec![4.0]);
    assert_eq!(s.workers, 3);
    assert!(SweepConfig::parse("[sweep]\ng =\n").is_err());
    assert!(SweepConfig::parse("[sweep]\nB = 1, -2\n").is_err());
}

#[test]
fn presets_carry_the_requested_mass() {
    let grid = Grid::new(64, 33).unwrap();
    let specs = [
        DatumSpec::Constant { mass: 30.0 },
        DatumSpec::SingleMode { mass: 30.0, amplitude: 0.5, k1: 2, k2: 3 },
        DatumSpec::GaussianBump { mass: 30.0, center: (0.0, PI / 2.0), width: 0.3, floor: 0.05 },
        DatumSpec::GaussianBump { mass: 30.0, center: (3.0, 0.2), width: 0.5, floor: 1.0 },
        DatumSpec::RandomBand { mass: 30.0, amplitude: 1.0, k1_max: 5, k2_max: 5 },
    ];
    for spec in specs {
        let rho = spec.build(&grid, 4).unwrap();
        assert!((rho.mass() - 30.0).abs() < 1e-12, "{}", spec.name());
        assert!(rho.field().is_band_limited(), "{}", spec.name());
        let min = rho.field().to_physical().into_iter().fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-12, "{}: {min}", spec.name());
    }
}

#[test]
fn single_mode_values() {
    let grid = Grid::new(32, 17).unwrap();
    let rho = DatumSpec::SingleMode { mass: 2.0 * PI * PI * 2.0, amplitude: 0.5, k1: 1, k2: 2 }.build(&grid, 0).unwrap();
    for (x1, x2) in [(0.3, 0.4), (-2.0, 2.9)] {
        let want = 2.0 + 0.5 * f64::cos(x1) * f64::cos(2.0 * x2);
        assert!((rho.field().eval_at(x1, x2) - want).abs() < 1e-13);
    }
}

#[test]
fn bump_is_symmetric_and_peaked_at_its_center() {
    let grid = Grid::new(64, 33).unwrap();
    let floor = 0.05;
    let rho = DatumSpec::GaussianBump { mass: 20.0, center: (0.0, PI / 2.0), width: 0.3, floor }.build(&grid, 0).unwrap();
    let f = rho.field();
    let peak = f.eval_at(0.0, PI / 2.0);
    for (a, b) in [(0.4, 1.2), (1.0, 0.3), (2.0, 2.5)] {
        assert!((f.eval_at(a, b) - f.eval_at(-a, PI - b)).abs() < 1e-10 * peak);
        assert!(f.eval_at(a, b) < peak);
    }
    // bump mass sits well inside the domain, so the peak is the free-space one
    let bump_mass = 20.0 - floor * 2.0 * PI * PI;
    assert!((peak - floor - bump_mass / (2.0 * PI * 0.09)).abs() < 0.01 * peak, "{peak}");
}

#[test]
fn negative_or_unresolved_data_are_rejected() {
    let grid = Grid::new(16, 9).unwrap();
    assert!(DatumSpec::SingleMode { mass: 2.0 * PI * PI, amplitude: 2.0, k1: 1, k2: 1 }.build(&grid, 0).is_err());
    assert!(DatumSpec::SingleMode { mass: 2.0 * PI * PI, amplitude: 0.1, k1: 8, k2: 1 }.build(&grid, 0).is_err());
    assert!(DatumSpec::SingleMode { mass: 2.0 * PI * PI, amplitude: 0.1, k1: 0, k2: 0 }.build(&grid, 0).is_err());
    assert!(DatumSpec::GaussianBump { mass: 10.0, center: (0.0, 1.0), width: 0.3, floor: 5.0 }.build(&grid, 0).is_err());
    assert!(DatumSpec::GaussianBump { mass: 10.0, center: (0.0, 1.0), width: 0.0, floor: 0.0 }.build(&grid, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_band_is_seeded(seed in any::<u64>(), amp in 0.01f64..1.0, k1 in 1usize..6, k2 in 1usize..6) {
        let grid = Grid::new(32, 17).unwrap();
        let spec = DatumSpec::RandomBand { mass: 2.0 * PI * PI, amplitude: amp, k1_max: k1, k2_max: k2 };
        let a = spec.build(&grid, seed).unwrap();
        let b = spec.build(&grid, seed).unwrap();
        prop_assert_eq!(a.field().coeffs(), b.field().coeffs());
        let fluct_sup = a.fluctuation().grid_max_abs();
        prop_assert!((fluct_sup - amp).abs() < 1e-12);
        for (m1, m2, c) in a.field().modes() {
            if m1 > k1 || m2 > k2 {
                prop_assert_eq!(c.norm(), 0.0);
            }
        }
    }

    #[test]
    fn mass_rescaling(m in 5.0f64..100.0) {
        let grid = Grid::new(32, 17).unwrap();
        let spec = DatumSpec::GaussianBump { mass: 1.0, center: (0.0, 1.0), width: 0.4, floor: 0.1 }.with_mass(m);
        prop_assert!((spec.build(&grid, 0).unwrap().mass() - m).abs() < 1e-12 * m);
    }
}
