use std::f64::consts::PI;

use nalgebra::DMatrix;

/// Boundary parity of the `x2` factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `cos(k x2)`, `k = 0..n2-1`.
    Cos,
    /// `sin(k x2)`, `k = 1..n2`.
    Sin,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Cos => Parity::Sin,
            Parity::Sin => Parity::Cos,
        }
    }

    /// Wavenumber of mode index `j`.
    pub fn wavenumber(self, j: usize) -> usize {
        match self {
            Parity::Cos => j,
            Parity::Sin => j + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum X1Kind {
    Mean,
    /// Real part of a conjugate pair: `2 cos(k x1)`.
    Re,
    /// Imaginary part of a conjugate pair: `-2 sin(k x1)`.
    Im,
    /// Nyquist mode, real part only: `cos(k x1)`.
    Nyquist,
}

/// Which derivative to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deriv {
    None,
    D1,
    D2,
    D11,
    D12,
    D22,
}

/// One real basis function `a(x1) * b(x2)`.
#[derive(Debug, Clone, Copy)]
pub struct BasisFn {
    pub k1: usize,
    pub k2: usize,
    pub parity: Parity,
    kind: X1Kind,
}

impl BasisFn {
    fn x1_factor(&self, x: f64, order: u32) -> f64 {
        let k = self.k1 as f64;
        let (c, s) = ((k * x).cos(), (k * x).sin());
        // derivatives of cos(kx) and sin(kx) cycle with period 4
        let dcos = |n: u32| match n % 4 {
            0 => c,
            1 => -s,
            2 => -c,
            _ => s,
        };
        let dsin = |n: u32| match n % 4 {
            0 => s,
            1 => c,
            2 => -s,
            _ => -c,
        };
        let scale = k.powi(order as i32);
        match self.kind {
            X1Kind::Mean => {
                if order == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            X1Kind::Re => 2.0 * scale * dcos(order),
            X1Kind::Im => -2.0 * scale * dsin(order),
            X1Kind::Nyquist => scale * dcos(order),
        }
    }

    fn x2_factor(&self, y: f64, order: u32) -> f64 {
        let k = self.k2 as f64;
        let (c, s) = ((k * y).cos(), (k * y).sin());
        let scale = k.powi(order as i32);
        match self.parity {
            Parity::Cos => {
                scale
                    * match order % 4 {
                        0 => c,
                        1 => -s,
                        2 => -c,
                        _ => s,
                    }
            }
            Parity::Sin => {
                scale
                    * match order % 4 {
                        0 => s,
                        1 => c,
                        2 => -s,
                        _ => -c,
                    }
            }
        }
    }

    pub fn eval(&self, x1: f64, x2: f64, d: Deriv) -> f64 {
        let (o1, o2) = match d {
            Deriv::None => (0, 0),
            Deriv::D1 => (1, 0),
            Deriv::D2 => (0, 1),
            Deriv::D11 => (2, 0),
            Deriv::D12 => (1, 1),
            Deriv::D22 => (0, 2),
        };
        self.x1_factor(x1, o1) * self.x2_factor(x2, o2)
    }

    /// Nominal `|k1|` used for band masks (the Nyquist mode counts as `n1/2`).
    pub fn abs_k1(&self) -> usize {
        self.k1
    }
}

/// The full real basis of a parity on an `n1 x n2` grid, in real-form order.
#[derive(Debug, Clone)]
pub struct RealBasis {
    pub n1: usize,
    pub n2: usize,
    pub parity: Parity,
    pub fns: Vec<BasisFn>,
}

impl RealBasis {
    pub fn new(n1: usize, n2: usize, parity: Parity) -> Self {
        let half = n1 / 2;
        let mut fns = Vec::with_capacity(n1 * n2);
        for k1 in 0..=half {
            for j in 0..n2 {
                let k2 = parity.wavenumber(j);
                if k1 == 0 {
                    fns.push(BasisFn { k1, k2, parity, kind: X1Kind::Mean });
                } else if k1 == half {
                    fns.push(BasisFn { k1, k2, parity, kind: X1Kind::Nyquist });
                } else {
                    fns.push(BasisFn { k1, k2, parity, kind: X1Kind::Re });
                    fns.push(BasisFn { k1, k2, parity, kind: X1Kind::Im });
                }
            }
        }
        debug_assert_eq!(fns.len(), n1 * n2);
        RealBasis { n1, n2, parity, fns }
    }

    pub fn len(&self) -> usize {
        self.fns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fns.is_empty()
    }

    /// Collocation nodes: uniform in `x1` starting at `-pi`, midpoints in `x2`,
    /// `x1`-major.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.n1 * self.n2);
        for i in 0..self.n1 {
            let x1 = -PI + 2.0 * PI * i as f64 / self.n1 as f64;
            for j in 0..self.n2 {
                pts.push((x1, PI * (j as f64 + 0.5) / self.n2 as f64));
            }
        }
        pts
    }

    /// Rows = points, columns = basis functions.
    pub fn tabulate(&self, points: &[(f64, f64)], d: Deriv) -> DMatrix<f64> {
        DMatrix::from_fn(points.len(), self.len(), |r, c| {
            let (x1, x2) = points[r];
            self.fns[c].eval(x1, x2, d)
        })
    }

    /// Direct summation of the series at one point.
    pub fn eval(&self, coeffs: &[f64], x1: f64, x2: f64, d: Deriv) -> f64 {
        self.fns
            .iter()
            .zip(coeffs)
            .map(|(f, c)| c * f.eval(x1, x2, d))
            .sum()
    }

    /// Diagonal 0/1 mask keeping `3|k1| < n1` and `3 k2 < 2 n2`.
    pub fn band_mask(&self) -> Vec<f64> {
        self.fns
            .iter()
            .map(|f| {
                if 3 * f.abs_k1() < self.n1 && 3 * f.k2 < 2 * self.n2 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Zero coefficients outside the 2/3 band.
    pub fn truncate(&self, coeffs: &mut [f64]) {
        for (c, m) in coeffs.iter_mut().zip(self.band_mask()) {
            *c *= m;
        }
    }
}
