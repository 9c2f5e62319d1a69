use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustdct::{DctPlanner, TransformType2And3};

use crate::error::{Error, Result};

/// Above this many coefficients the row transforms are spread over the
/// current rayon pool.
pub(crate) const PARALLEL_THRESHOLD: usize = 1 << 14;

pub(crate) struct Plans {
    pub r2c: Arc<dyn RealToComplex<f64>>,
    pub c2r: Arc<dyn ComplexToReal<f64>>,
    pub dct: Arc<dyn TransformType2And3<f64>>,
    /// Exact L2 change of basis from `cos(m x)` to `sin(k x)` on `[0, pi]`,
    /// row `k - 1`, column `m`, both truncated to `n2` modes.
    pub cos_to_sin: Vec<f64>,
}

/// Collocation grid on `[-pi, pi) x [0, pi]`: `n1` uniform points in `x1`,
/// `n2` midpoints `pi (j + 1/2) / n2` in `x2`.
///
/// Cloning is cheap; transform plans are shared.
#[derive(Clone)]
pub struct Grid {
    n1: usize,
    n2: usize,
    pub(crate) plans: Arc<Plans>,
}

impl Grid {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 < 4 || !n1.is_multiple_of(2) || n2 < 4 {
            return Err(Error::InvalidGrid { n1, n2 });
        }
        let mut fft = RealFftPlanner::<f64>::new();
        let mut dct = DctPlanner::<f64>::new();
        let plans = Plans {
            r2c: fft.plan_fft_forward(n1),
            c2r: fft.plan_fft_inverse(n1),
            dct: dct.plan_dct2(n2),
            cos_to_sin: cos_to_sin_matrix(n2),
        };
        Ok(Grid { n1, n2, plans: Arc::new(plans) })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Number of stored `k1` values (`0..=n1/2`).
    pub fn k1_len(&self) -> usize {
        self.n1 / 2 + 1
    }

    /// Number of stored complex coefficients.
    pub fn spectral_len(&self) -> usize {
        self.k1_len() * self.n2
    }

    /// Number of physical nodes.
    pub fn physical_len(&self) -> usize {
        self.n1 * self.n2
    }

    /// Flat index of node `(i, j)` in a physical array (`x1`-major).
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        i * self.n2 + j
    }

    pub fn x1_nodes(&self) -> Vec<f64> {
        (0..self.n1).map(|i| -PI + self.dx1() * i as f64).collect()
    }

    pub fn x2_nodes(&self) -> Vec<f64> {
        (0..self.n2).map(|j| PI * (j as f64 + 0.5) / self.n2 as f64).collect()
    }

    pub fn dx1(&self) -> f64 {
        2.0 * PI / self.n1 as f64
    }

    pub fn dx2(&self) -> f64 {
        PI / self.n2 as f64
    }

    /// Quadrature weight of one node (midpoint rule in both directions).
    pub fn cell_area(&self) -> f64 {
        self.dx1() * self.dx2()
    }

    /// 2/3-rule band: `3|k1| < n1` and `3 k2 < 2 n2`.
    pub fn in_band(&self, k1: usize, k2: usize) -> bool {
        3 * k1 < self.n1 && 3 * k2 < 2 * self.n2
    }

    /// Largest retained `|k1|` and `k2`.
    pub fn band_limits(&self) -> (usize, usize) {
        ((self.n1 - 1) / 3, (2 * self.n2 - 1) / 3)
    }

    pub(crate) fn parallel(&self) -> bool {
        self.spectral_len() >= PARALLEL_THRESHOLD
    }

    pub(crate) fn cos_to_sin_row(&self, k_index: usize) -> &[f64] {
        &self.plans.cos_to_sin[k_index * self.n2..(k_index + 1) * self.n2]
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n1 == other.n1 && self.n2 == other.n2
    }
}

impl Eq for Grid {}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid({}x{})", self.n1, self.n2)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n1, self.n2)
    }
}

/// `S[k, m] = (2/pi) int_0^pi cos(m x) sin(k x) dx
///          = (2/pi) k (1 - (-1)^(k+m)) / (k^2 - m^2)`, zero for `k == m`.
fn cos_to_sin_matrix(n2: usize) -> Vec<f64> {
    let mut s = vec![0.0; n2 * n2];
    for ki in 0..n2 {
        let k = (ki + 1) as i64;
        for m in 0..n2 as i64 {
            if (k + m) % 2 == 1 {
                s[ki * n2 + m as usize] = (2.0 / PI) * 2.0 * k as f64 / (k * k - m * m) as f64;
            }
        }
    }
    s
}
