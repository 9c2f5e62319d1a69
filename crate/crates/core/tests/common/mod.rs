#![allow(dead_code)]

use ksns_core::{BasisTag, Grid, SpectralField};
use ksns_oracle::Parity;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn parity(tag: BasisTag) -> Parity {
    match tag {
        BasisTag::CosY => Parity::Cos,
        BasisTag::SinY => Parity::Sin,
    }
}

/// Random real field; `band` restricts it to the 2/3 band. The `k1 = 0` and
/// Nyquist rows are kept real.
pub fn random_field(grid: &Grid, tag: BasisTag, band: bool, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = grid.n1() / 2;
    let mut f = SpectralField::zeros(grid, tag);
    for k1 in 0..grid.k1_len() {
        for j in 0..grid.n2() {
            let k2 = tag.k2(j);
            if band && !grid.in_band(k1, k2) {
                continue;
            }
            let re = rng.gen_range(-1.0..1.0);
            let im = if k1 == 0 || k1 == half { 0.0 } else { rng.gen_range(-1.0..1.0) };
            f.set(k1, k2, Complex64::new(re, im));
        }
    }
    f
}

/// Dense matrix of a linear operator acting on real-form coefficient vectors.
pub fn operator_matrix(
    grid: &Grid,
    from: BasisTag,
    op: impl Fn(&SpectralField) -> Vec<f64>,
) -> DMatrix<f64> {
    let n = grid.physical_len();
    let mut cols = Vec::with_capacity(n);
    for c in 0..n {
        let mut e = vec![0.0; n];
        e[c] = 1.0;
        let f = SpectralField::from_real_form(grid, from, &e).unwrap();
        cols.push(op(&f));
    }
    DMatrix::from_fn(n, n, |r, c| cols[c][r])
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Band-limited random density `mean + amp * noise`, decaying with `|k|` so
/// it resembles a smooth field.
pub fn smooth_density(grid: &Grid, mean: f64, amp: f64, seed: u64) -> ksns_core::Density {
    let noise = random_field(grid, BasisTag::CosY, true, seed);
    let mut f = SpectralField::constant(grid, mean);
    for (k1, k2, c) in noise.modes() {
        if k1 + k2 == 0 {
            continue;
        }
        let decay = amp / (1.0 + (k1 * k1 + k2 * k2) as f64);
        f.set(k1, k2, c * decay);
    }
    ksns_core::Density::new(f).unwrap()
}

/// Smooth random sine-basis field, band-limited when `band`.
pub fn smooth_sine(grid: &Grid, amp: f64, band: bool, seed: u64) -> SpectralField {
    let noise = random_field(grid, BasisTag::SinY, band, seed);
    let mut f = SpectralField::zeros(grid, BasisTag::SinY);
    for (k1, k2, c) in noise.modes() {
        f.set(k1, k2, c * (amp / (1.0 + (k1 * k1 + k2 * k2) as f64)));
    }
    f
}

/// Values of `f` at the collocation nodes, `x1`-major.
pub fn physical(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let x1 = grid.x1_nodes();
    let x2 = grid.x2_nodes();
    let f = &f;
    x1.iter().flat_map(|a| x2.iter().map(move |b| f(*a, *b))).collect()
}
