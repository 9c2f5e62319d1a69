//! Spectral differential operators, inverse Laplacians, parity change of
//! basis, dealiasing and pseudo-spectral products.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use super::field::{BasisTag, SpectralField};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn expect_tag(f: &SpectralField, tag: BasisTag) -> Result<()> {
    if f.tag() == tag {
        Ok(())
    } else {
        Err(Error::WrongTag { expected: tag, found: f.tag() })
    }
}

fn expect_same_grid(a: &SpectralField, b: &SpectralField) -> Result<()> {
    if a.grid() == b.grid() {
        Ok(())
    } else {
        Err(Error::GridMismatch { a: a.grid().to_string(), b: b.grid().to_string() })
    }
}

impl SpectralField {
    /// `d/dx1`: multiply by `i k1`. The Nyquist row is dropped since its
    /// derivative vanishes at every node.
    pub fn ddx1(&self) -> SpectralField {
        let half = self.grid().n1() / 2;
        self.map_modes(self.tag(), |k1, _, c| if k1 == half { ZERO } else { c * Complex64::new(0.0, k1 as f64) })
    }

    /// `d/dx2`, flipping the parity: `cos(k x) -> -k sin(k x)`,
    /// `sin(k x) -> k cos(k x)`.
    pub fn ddx2(&self) -> SpectralField {
        let grid = self.grid();
        let n2 = grid.n2();
        let mut out = SpectralField::zeros(grid, self.tag().flip());
        let src = self.coeffs();
        let dst = out.coeffs_mut();
        for k1 in 0..grid.k1_len() {
            let row = k1 * n2;
            match self.tag() {
                BasisTag::CosY => {
                    // sine index j holds wavenumber j + 1 = cosine index j + 1
                    for j in 0..n2 - 1 {
                        dst[row + j] = src[row + j + 1] * -((j + 1) as f64);
                    }
                }
                BasisTag::SinY => {
                    // cos(n2 x) is not representable; it vanishes at the nodes
                    for k in 1..n2 {
                        dst[row + k] = src[row + k - 1] * k as f64;
                    }
                }
            }
        }
        out
    }

    /// Laplacian, diagonal in both bases.
    pub fn laplacian(&self) -> SpectralField {
        self.map_modes(self.tag(), |k1, k2, c| c * -((k1 * k1 + k2 * k2) as f64))
    }

    /// `(-Lap_N)^{-1}` on the mean-free part; the mean is discarded.
    pub fn inv_laplace_neumann(&self) -> Result<SpectralField> {
        expect_tag(self, BasisTag::CosY)?;
        Ok(self.map_modes(BasisTag::CosY, |k1, k2, c| {
            let k = (k1 * k1 + k2 * k2) as f64;
            if k == 0.0 {
                ZERO
            } else {
                c / k
            }
        }))
    }

    /// `(-Lap_D)^{-power}`.
    pub fn inv_laplace_dirichlet(&self, power: u32) -> Result<SpectralField> {
        expect_tag(self, BasisTag::SinY)?;
        if !(1..=2).contains(&power) {
            return Err(Error::InvalidParameter(format!("inverse Dirichlet Laplacian power {power}")));
        }
        Ok(self.map_modes(BasisTag::SinY, |k1, k2, c| c / ((k1 * k1 + k2 * k2) as f64).powi(power as i32)))
    }

    /// L2 projection of a cosine-basis field onto the sine basis, using the
    /// exact integrals of `cos(m x) sin(k x)` over `[0, pi]`.
    pub fn cos_to_sin(&self) -> Result<SpectralField> {
        expect_tag(self, BasisTag::CosY)?;
        let grid = self.grid();
        let n2 = grid.n2();
        let mut out = SpectralField::zeros(grid, BasisTag::SinY);
        let src = self.coeffs();
        let dst = out.coeffs_mut();
        for k1 in 0..grid.k1_len() {
            let row = &src[k1 * n2..(k1 + 1) * n2];
            if row.iter().all(|c| *c == ZERO) {
                continue;
            }
            for (ki, d) in dst[k1 * n2..(k1 + 1) * n2].iter_mut().enumerate() {
                let s = grid.cos_to_sin_row(ki);
                // only m with k + m odd contribute
                let start = ki % 2;
                let mut acc = ZERO;
                let mut m = start;
                while m < n2 {
                    acc += row[m] * s[m];
                    m += 2;
                }
                *d = acc;
            }
        }
        Ok(out)
    }

    /// Zero every mode outside the 2/3 band.
    pub fn dealias(&self) -> SpectralField {
        let grid = self.grid().clone();
        self.map_modes(self.tag(), |k1, k2, c| if grid.in_band(k1, k2) { c } else { ZERO })
    }

    pub fn is_band_limited(&self) -> bool {
        self.modes().all(|(k1, k2, c)| self.grid().in_band(k1, k2) || c == ZERO)
    }

    /// Pseudo-spectral product of two fields, dealiased before and after.
    pub fn multiply(&self, other: &SpectralField) -> Result<SpectralField> {
        expect_same_grid(self, other)?;
        let a = self.dealias().to_physical();
        let b = other.dealias().to_physical();
        let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Ok(SpectralField::to_spectral(self.grid(), &prod, self.tag().product(other.tag()))?.dealias())
    }

    /// `int_Omega f g` for two fields of the same parity (Parseval).
    /// Mixed parities are paired through the exact sine projection.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        expect_same_grid(self, other)?;
        match (self.tag(), other.tag()) {
            (a, b) if a == b => Ok(self.inner_same(other)),
            (BasisTag::CosY, BasisTag::SinY) => Ok(self.cos_to_sin()?.inner_same(other)),
            _ => Ok(other.cos_to_sin()?.inner_same(self)),
        }
    }

    fn inner_same(&self, other: &SpectralField) -> f64 {
        let grid = self.grid();
        let n2 = grid.n2();
        let mut total = 0.0;
        for (i, (a, b)) in self.coeffs().iter().zip(other.coeffs()).enumerate() {
            let k1 = i / n2;
            let k2 = self.tag().k2(i % n2);
            total += SpectralField::k1_multiplicity(grid, k1) * x2_weight(self.tag(), k2) * (a * b.conj()).re;
        }
        2.0 * PI * total
    }

    /// `int_Omega f^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.inner_same(self)
    }

    /// `sum w |k|^(2p) |c|^2` with the Parseval weights.
    pub fn weighted_norm_sq(&self, power: i32) -> f64 {
        let grid = self.grid();
        let mut total = 0.0;
        for (k1, k2, c) in self.modes() {
            let k = (k1 * k1 + k2 * k2) as f64;
            if k == 0.0 && power != 0 {
                continue;
            }
            total += SpectralField::k1_multiplicity(grid, k1) * x2_weight(self.tag(), k2) * c.norm_sqr() * k.powi(power);
        }
        2.0 * PI * total
    }

    /// `||d1^p1 d2^p2 f||^2` of the trigonometric series itself, so the
    /// top sine mode is kept even where `ddx2` would drop it.
    pub fn derivative_norm_sq(&self, p1: i32, p2: i32) -> f64 {
        let grid = self.grid();
        let mut total = 0.0;
        for (k1, k2, c) in self.modes() {
            let m = (k1 as f64).powi(2 * p1) * (k2 as f64).powi(2 * p2);
            if m == 0.0 {
                continue;
            }
            total += SpectralField::k1_multiplicity(grid, k1) * x2_weight(self.tag(), k2) * c.norm_sqr() * m;
        }
        2.0 * PI * total
    }

    /// Largest absolute value on the collocation grid.
    pub fn grid_max_abs(&self) -> f64 {
        self.to_physical().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Weight of `|c|^2` for mode `(k1, k2)` in `int f^2`.
    pub(crate) fn parseval_weight(&self, k1: usize, k2: usize) -> f64 {
        2.0 * PI * SpectralField::k1_multiplicity(self.grid(), k1) * x2_weight(self.tag(), k2)
    }

    /// Coefficient `(0, 0)` read as the mean over the channel (zero for
    /// sine fields).
    pub fn mean(&self) -> f64 {
        match self.tag() {
            BasisTag::CosY => self.coeffs()[0].re,
            BasisTag::SinY => 0.0,
        }
    }

    pub fn scale(&self, s: f64) -> SpectralField {
        self.map_modes(self.tag(), |_, _, c| c * s)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &SpectralField) -> Result<SpectralField> {
        expect_same_grid(self, other)?;
        if self.tag() != other.tag() {
            return Err(Error::WrongTag { expected: self.tag(), found: other.tag() });
        }
        let coeffs = self.coeffs().iter().zip(other.coeffs()).map(|(a, b)| a + b * s).collect();
        SpectralField::from_coeffs(self.grid(), self.tag(), coeffs)
    }

    /// Largest coefficient difference, in absolute value.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.coeffs().iter().zip(other.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `int_0^pi phi_k^2`.
#[inline]
fn x2_weight(tag: BasisTag, k2: usize) -> f64 {
    if tag == BasisTag::CosY && k2 == 0 {
        PI
    } else {
        PI / 2.0
    }
}

// Arithmetic on references. Mismatched grids or tags are programming errors.
impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(1.0, rhs).expect("operands share grid and basis")
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(-1.0, rhs).expect("operands share grid and basis")
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        assert!(self.grid() == rhs.grid() && self.tag() == rhs.tag(), "operands share grid and basis");
        for (a, b) in self.coeffs_mut().iter_mut().zip(rhs.coeffs()) {
            *a += b;
        }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, s: f64) -> SpectralField {
        self.scale(s)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}
