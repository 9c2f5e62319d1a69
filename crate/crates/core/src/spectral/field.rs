use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Parity of the `x2` factor of a basis function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisTag {
    /// `e^{i k1 x1} cos(k2 x2)`, `k2 = 0..n2-1`; Neumann parity.
    CosY,
    /// `e^{i k1 x1} sin(k2 x2)`, `k2 = 1..n2`; Dirichlet parity.
    SinY,
}

impl BasisTag {
    pub fn flip(self) -> BasisTag {
        match self {
            BasisTag::CosY => BasisTag::SinY,
            BasisTag::SinY => BasisTag::CosY,
        }
    }

    /// Wavenumber `k2` stored at mode index `j`.
    #[inline]
    pub fn k2(self, j: usize) -> usize {
        match self {
            BasisTag::CosY => j,
            BasisTag::SinY => j + 1,
        }
    }

    /// Parity of a pointwise product.
    pub fn product(self, other: BasisTag) -> BasisTag {
        if self == other {
            BasisTag::CosY
        } else {
            BasisTag::SinY
        }
    }
}

/// Coefficients of a real scalar on the channel in a tagged basis.
///
/// Storage is conjugate-reduced: `k1 = 0..=n1/2`, `k1`-major, mode index
/// `j = 0..n2` minor. The represented function is
/// `sum_{k1 = -n1/2+1}^{n1/2} sum_j c(k1, j) e^{i k1 x1} phi_j(x2)` with
/// `c(-k1, j) = conj c(k1, j)`. The `k1 = 0` and Nyquist rows are real.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    tag: BasisTag,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid, tag: BasisTag) -> Self {
        SpectralField { grid: grid.clone(), tag, coeffs: vec![Complex64::new(0.0, 0.0); grid.spectral_len()] }
    }

    pub fn from_coeffs(grid: &Grid, tag: BasisTag, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.spectral_len() {
            return Err(Error::ShapeMismatch { expected: grid.spectral_len(), found: coeffs.len() });
        }
        Ok(SpectralField { grid: grid.clone(), tag, coeffs })
    }

    /// The constant function `value` (cosine basis).
    pub fn constant(grid: &Grid, value: f64) -> Self {
        let mut f = SpectralField::zeros(grid, BasisTag::CosY);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    /// A single mode `value e^{i k1 x1} phi_{k2}(x2)` plus its conjugate.
    /// `k2` is a wavenumber, not an index.
    pub fn mode(grid: &Grid, tag: BasisTag, k1: usize, k2: usize, value: Complex64) -> Self {
        let mut f = SpectralField::zeros(grid, tag);
        f.set(k1, k2, value);
        f
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    #[inline]
    fn index(&self, k1: usize, k2: usize) -> Option<usize> {
        let j = match self.tag {
            BasisTag::CosY => k2,
            BasisTag::SinY => k2.checked_sub(1)?,
        };
        (k1 < self.grid.k1_len() && j < self.grid.n2()).then(|| k1 * self.grid.n2() + j)
    }

    /// Coefficient at `(k1 >= 0, wavenumber k2)`; zero outside the stored range.
    pub fn get(&self, k1: usize, k2: usize) -> Complex64 {
        self.index(k1, k2).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Panics when `(k1, k2)` is outside the stored range.
    pub fn set(&mut self, k1: usize, k2: usize, value: Complex64) {
        let i = self.index(k1, k2).unwrap_or_else(|| panic!("mode ({k1}, {k2}) not stored for {:?}", self.tag));
        self.coeffs[i] = value;
    }

    /// Iterate `(k1, k2 wavenumber, coefficient)`.
    pub fn modes(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let n2 = self.grid.n2();
        let tag = self.tag;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i / n2, tag.k2(i % n2), *c))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Parseval weight of stored row `k1`: conjugate pairs count twice.
    #[inline]
    pub(crate) fn k1_multiplicity(grid: &Grid, k1: usize) -> f64 {
        if k1 == 0 || 2 * k1 == grid.n1() {
            1.0
        } else {
            2.0
        }
    }

    pub(crate) fn map_modes(&self, tag: BasisTag, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let n2 = self.grid.n2();
        let src = self.tag;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| f(i / n2, src.k2(i % n2), *c))
            .collect();
        SpectralField { grid: self.grid.clone(), tag, coeffs }
    }

    /// Evaluate the truncated series at an arbitrary point by direct
    /// summation (slow; used for boundary checks).
    pub fn eval_at(&self, x1: f64, x2: f64) -> f64 {
        let half = self.grid.n1() / 2;
        let mut total = 0.0;
        for (k1, k2, c) in self.modes() {
            let phi = match self.tag {
                BasisTag::CosY => (k2 as f64 * x2).cos(),
                BasisTag::SinY => (k2 as f64 * x2).sin(),
            };
            let e = Complex64::from_polar(1.0, k1 as f64 * x1);
            let mult = if k1 == 0 || k1 == half { 1.0 } else { 2.0 };
            total += mult * (c * e).re * phi;
        }
        total
    }

    /// Real-form coefficient vector: per `k1`, per mode, the real part and,
    /// for `0 < k1 < n1/2`, the imaginary part.
    pub fn to_real_form(&self) -> Vec<f64> {
        let half = self.grid.n1() / 2;
        let mut out = Vec::with_capacity(self.grid.physical_len());
        for (k1, _, c) in self.modes() {
            out.push(c.re);
            if k1 != 0 && k1 != half {
                out.push(c.im);
            }
        }
        out
    }

    pub fn from_real_form(grid: &Grid, tag: BasisTag, values: &[f64]) -> Result<Self> {
        if values.len() != grid.physical_len() {
            return Err(Error::ShapeMismatch { expected: grid.physical_len(), found: values.len() });
        }
        let half = grid.n1() / 2;
        let mut f = SpectralField::zeros(grid, tag);
        let mut it = values.iter();
        for (i, c) in f.coeffs.iter_mut().enumerate() {
            let k1 = i / grid.n2();
            let re = *it.next().expect("length checked");
            let im = if k1 != 0 && k1 != half { *it.next().expect("length checked") } else { 0.0 };
            *c = Complex64::new(re, im);
        }
        Ok(f)
    }

    /// Pointwise values at the collocation nodes (`x1`-major).
    pub fn to_physical(&self) -> Vec<f64> {
        let grid = &self.grid;
        let (n1, n2, kl) = (grid.n1(), grid.n2(), grid.k1_len());
        let dct = &grid.plans.dct;

        // x2 synthesis on every k1 row, real and imaginary parts separately
        let mut rows = self.coeffs.clone();
        let tag = self.tag;
        let synth = |row: &mut [Complex64]| {
            let mut re: Vec<f64> = row.iter().map(|c| c.re).collect();
            let mut im: Vec<f64> = row.iter().map(|c| c.im).collect();
            for buf in [&mut re, &mut im] {
                match tag {
                    BasisTag::CosY => {
                        buf[0] *= 2.0;
                        dct.process_dct3(buf);
                    }
                    BasisTag::SinY => {
                        buf[n2 - 1] *= 2.0;
                        dct.process_dst3(buf);
                    }
                }
            }
            for (c, (r, i)) in row.iter_mut().zip(re.into_iter().zip(im)) {
                *c = Complex64::new(r, i);
            }
        };
        if grid.parallel() {
            rows.par_chunks_mut(n2).for_each(synth);
        } else {
            rows.chunks_mut(n2).for_each(synth);
        }

        // x1 synthesis column by column
        let mut out = vec![0.0; n1 * n2];
        let c2r = &grid.plans.c2r;
        let column = |j: usize| -> Vec<f64> {
            let mut spec: Vec<Complex64> = (0..kl)
                .map(|k1| {
                    let c = rows[k1 * n2 + j];
                    if k1 % 2 == 1 {
                        -c
                    } else {
                        c
                    }
                })
                .collect();
            spec[0].im = 0.0;
            spec[kl - 1].im = 0.0;
            let mut phys = vec![0.0; n1];
            c2r.process(&mut spec, &mut phys).expect("buffer sizes match the plan");
            phys
        };
        let cols: Vec<Vec<f64>> = if grid.parallel() {
            (0..n2).into_par_iter().map(column).collect()
        } else {
            (0..n2).map(column).collect()
        };
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                out[i * n2 + j] = *v;
            }
        }
        out
    }

    /// Coefficients of the interpolant of nodal values in the tagged basis.
    pub fn to_spectral(grid: &Grid, values: &[f64], tag: BasisTag) -> Result<Self> {
        let (n1, n2, kl) = (grid.n1(), grid.n2(), grid.k1_len());
        if values.len() != n1 * n2 {
            return Err(Error::ShapeMismatch { expected: n1 * n2, found: values.len() });
        }
        let r2c = &grid.plans.r2c;
        let inv_n1 = 1.0 / n1 as f64;
        let column = |j: usize| -> Vec<Complex64> {
            let mut phys: Vec<f64> = (0..n1).map(|i| values[i * n2 + j]).collect();
            let mut spec = vec![Complex64::new(0.0, 0.0); kl];
            r2c.process(&mut phys, &mut spec).expect("buffer sizes match the plan");
            spec.iter()
                .enumerate()
                .map(|(k1, c)| if k1 % 2 == 1 { -c * inv_n1 } else { c * inv_n1 })
                .collect()
        };
        let cols: Vec<Vec<Complex64>> = if grid.parallel() {
            (0..n2).into_par_iter().map(column).collect()
        } else {
            (0..n2).map(column).collect()
        };
        let mut coeffs = vec![Complex64::new(0.0, 0.0); kl * n2];
        for (j, col) in cols.iter().enumerate() {
            for (k1, c) in col.iter().enumerate() {
                coeffs[k1 * n2 + j] = *c;
            }
        }

        let dct = &grid.plans.dct;
        let scale = 2.0 / n2 as f64;
        let analyze = |row: &mut [Complex64]| {
            let mut re: Vec<f64> = row.iter().map(|c| c.re).collect();
            let mut im: Vec<f64> = row.iter().map(|c| c.im).collect();
            for buf in [&mut re, &mut im] {
                match tag {
                    BasisTag::CosY => {
                        dct.process_dct2(buf);
                        buf.iter_mut().for_each(|v| *v *= scale);
                        buf[0] *= 0.5;
                    }
                    BasisTag::SinY => {
                        dct.process_dst2(buf);
                        buf.iter_mut().for_each(|v| *v *= scale);
                        buf[n2 - 1] *= 0.5;
                    }
                }
            }
            for (c, (r, i)) in row.iter_mut().zip(re.into_iter().zip(im)) {
                *c = Complex64::new(r, i);
            }
        };
        if grid.parallel() {
            coeffs.par_chunks_mut(n2).for_each(analyze);
        } else {
            coeffs.chunks_mut(n2).for_each(analyze);
        }
        // the Nyquist column of a real signal carries no sine part
        for c in &mut coeffs[(kl - 1) * n2..] {
            c.im = 0.0;
        }
        Ok(SpectralField { grid: grid.clone(), tag, coeffs })
    }
}
