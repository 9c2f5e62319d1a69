//! Binary checkpoints.
//!
//! Layout (little-endian): `b"KSNS"`, version `u8 = 1`, `u32 n1`, `u32 n2`,
//! `u8` law code, `f64 t`, `f64 g`, `f64 B`, the density coefficients as
//! `(re, im)` pairs in storage order, then the vorticity coefficients for
//! Navier–Stokes. Step policy, thresholds and multistep history are not
//! stored.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{BasisTag, Grid, SpectralField};
use crate::state::{Density, DtPolicy, FlowState, ModelParams, SimState, Thresholds, VelocityLaw};

pub const MAGIC: &[u8; 4] = b"KSNS";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 4 + 4 + 1 + 3 * 8;

pub fn save(state: &SimState) -> Vec<u8> {
    let grid = &state.params.grid;
    let law = state.law();
    let fields = 1 + usize::from(law == VelocityLaw::NavierStokes);
    let mut out = Vec::with_capacity(HEADER_LEN + fields * grid.spectral_len() * 16);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(grid.n1() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.n2() as u32).to_le_bytes());
    out.push(law.code());
    for v in [state.t, state.params.g, state.params.b] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let mut put = |f: &SpectralField| {
        for c in f.coeffs() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    };
    put(state.rho());
    if let Some(w) = state.flow.omega() {
        put(w);
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Checkpoint(format!("truncated at byte {} of {}", self.bytes.len(), end)));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn field(&mut self, grid: &Grid, tag: BasisTag) -> Result<SpectralField> {
        let coeffs = (0..grid.spectral_len())
            .map(|_| Ok(Complex64::new(self.f64()?, self.f64()?)))
            .collect::<Result<Vec<_>>>()?;
        SpectralField::from_coeffs(grid, tag, coeffs)
    }
}

/// Load with default step policy and thresholds.
pub fn load(bytes: &[u8]) -> Result<SimState> {
    load_with(bytes, DtPolicy::default(), Thresholds::default())
}

pub fn load_with(bytes: &[u8], dt: DtPolicy, thresholds: Thresholds) -> Result<SimState> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = r.u8()?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}, expected {VERSION}")));
    }
    let (n1, n2) = (r.u32()? as usize, r.u32()? as usize);
    let code = r.u8()?;
    let law = VelocityLaw::from_code(code).ok_or_else(|| Error::Checkpoint(format!("unknown law code {code}")))?;
    let (t, g, b) = (r.f64()?, r.f64()?, r.f64()?);
    let grid = Grid::new(n1, n2)?;
    let rho = r.field(&grid, BasisTag::CosY)?;
    let flow = match law {
        VelocityLaw::NavierStokes => FlowState::NavierStokes { omega: r.field(&grid, BasisTag::SinY)? },
        other => FlowState::at_rest(other, &grid),
    };
    if r.pos != bytes.len() {
        return Err(Error::Checkpoint(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    let mut params = ModelParams::new(grid, g, b)?;
    params.dt = dt;
    params.thresholds = thresholds;
    let mut state = SimState::new(Density::new(rho)?, flow, params)?;
    state.t = t;
    Ok(state)
}
