//! Per-sample norms and identity residuals, and their CSV form.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::integrate::tail_fraction;
use crate::rhs::ks_rhs;
use crate::state::{sobolev_seminorms, SimState, VelocityLaw};
use crate::velocity::{horizontal_forcing, ns_vorticity_rhs, stream_of, velocity_of};

pub const HEADER: [&str; 21] = [
    "t",
    "mass",
    "rho_m",
    "min_rho",
    "rho_inf",
    "E2",
    "grad_rho_sq",
    "Ebar",
    "Etilde",
    "mix_sq",
    "h1neg_sq",
    "u_l2_sq",
    "grad_u_sq",
    "u_inf",
    "res_ks_energy",
    "res_ns_energy",
    "res_static_identity",
    "res_lemA3",
    "dt",
    "tail_frac",
    "moment_x2",
];

/// One sample. Residuals that do not apply to the velocity law are 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub rho_m: f64,
    pub min_rho: f64,
    /// Grid sup of `|rho - rho_m|`.
    pub rho_inf: f64,
    pub e2: f64,
    pub grad_rho_sq: f64,
    /// `||bar rho - rho_m||^2` in `L2([0, pi])`.
    pub ebar: f64,
    pub etilde: f64,
    pub mix_sq: f64,
    pub h1neg_sq: f64,
    pub u_l2_sq: f64,
    pub grad_u_sq: f64,
    pub u_inf: f64,
    pub res_ks_energy: f64,
    pub res_ns_energy: f64,
    pub res_static_identity: f64,
    pub res_lem_a3: f64,
    pub dt: f64,
    pub tail_frac: f64,
    pub moment_x2: f64,
}

impl DiagnosticsRecord {
    pub fn values(&self) -> [f64; 21] {
        [
            self.t,
            self.mass,
            self.rho_m,
            self.min_rho,
            self.rho_inf,
            self.e2,
            self.grad_rho_sq,
            self.ebar,
            self.etilde,
            self.mix_sq,
            self.h1neg_sq,
            self.u_l2_sq,
            self.grad_u_sq,
            self.u_inf,
            self.res_ks_energy,
            self.res_ns_energy,
            self.res_static_identity,
            self.res_lem_a3,
            self.dt,
            self.tail_frac,
            self.moment_x2,
        ]
    }

    pub fn from_values(v: [f64; 21]) -> Self {
        DiagnosticsRecord {
            t: v[0],
            mass: v[1],
            rho_m: v[2],
            min_rho: v[3],
            rho_inf: v[4],
            e2: v[5],
            grad_rho_sq: v[6],
            ebar: v[7],
            etilde: v[8],
            mix_sq: v[9],
            h1neg_sq: v[10],
            u_l2_sq: v[11],
            grad_u_sq: v[12],
            u_inf: v[13],
            res_ks_energy: v[14],
            res_ns_energy: v[15],
            res_static_identity: v[16],
            res_lem_a3: v[17],
            dt: v[18],
            tail_frac: v[19],
            moment_x2: v[20],
        }
    }

    /// Column by header name.
    pub fn get(&self, name: &str) -> Option<f64> {
        HEADER.iter().position(|h| *h == name).map(|i| self.values()[i])
    }
}

/// The three terms of the density energy identity
/// `<rhs, rho - rho_m> + ||grad rho||^2 - 1/2 int rho^2 (rho - rho_m) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms {
    pub pairing: f64,
    pub grad: f64,
    pub half_cubic: f64,
}

impl EnergyTerms {
    pub fn residual(&self) -> f64 {
        self.pairing + self.grad - self.half_cubic
    }

    pub fn scale(&self) -> f64 {
        self.pairing.abs().max(self.grad).max(self.half_cubic.abs())
    }
}

pub fn ks_energy_terms(state: &SimState) -> Result<EnergyTerms> {
    let rho = &state.density;
    let rhs = ks_rhs(rho, &velocity_of(state))?;
    let m = rho.mean();
    let cell = rho.grid().cell_area();
    // exact for band-limited densities, which the integrator preserves
    let cubic: f64 = rho.field().to_physical().iter().map(|r| r * r * (r - m)).sum::<f64>() * cell;
    Ok(EnergyTerms {
        pairing: rhs.inner(&rho.fluctuation())?,
        grad: rho.field().weighted_norm_sq(1),
        half_cubic: 0.5 * cubic,
    })
}

/// `(d_t u, u) + B ||grad u||^2 - B g int rho u2`, with `(d_t u, u)` taken as
/// `-(d_t omega, psi)`.
pub fn ns_energy_residual(state: &SimState) -> Result<f64> {
    let psi = stream_of(state).ok_or(Error::MissingVorticity)?;
    let rate = ns_vorticity_rhs(state)?.inner(&psi)?;
    let u = velocity_of(state);
    let (b, g) = (state.params.b, state.params.g);
    Ok(-rate + b * u.grad_norm_sq() - b * g * state.rho().inner(&u.u2)?)
}

pub fn sample(state: &SimState, dt: f64) -> Result<DiagnosticsRecord> {
    let rho = &state.density;
    let grid = rho.grid();
    let rho_m = rho.mean();
    let phys = rho.field().to_physical();
    let min_rho = phys.iter().copied().fold(f64::INFINITY, f64::min);
    let rho_inf = phys.iter().fold(0.0f64, |m, v| m.max((v - rho_m).abs()));
    let x2 = grid.x2_nodes();
    let n2 = grid.n2();
    let moment_x2 = phys.iter().enumerate().map(|(i, v)| x2[i % n2] * v).sum::<f64>() * grid.cell_area();

    let parts = rho.split_bar_tilde();
    let forcing = horizontal_forcing(rho);
    let mixing = forcing.inv_laplace_dirichlet(1)?;
    let mix_sq = mixing.l2_norm_sq();
    let u = velocity_of(state);
    let law = state.law();
    let res_static_identity = if law == VelocityLaw::StaticStokes {
        state.params.g * mix_sq - rho.field().inner(&u.u2)?
    } else {
        0.0
    };
    let res_ns_energy = if law == VelocityLaw::NavierStokes { ns_energy_residual(state)? } else { 0.0 };

    Ok(DiagnosticsRecord {
        t: state.t,
        mass: rho.mass(),
        rho_m,
        min_rho,
        rho_inf,
        e2: rho.fluctuation().l2_norm_sq(),
        grad_rho_sq: sobolev_seminorms(rho.field()).0,
        ebar: parts.bar_fluct_l2_sq_1d(),
        etilde: parts.tilde.l2_norm_sq(),
        mix_sq,
        h1neg_sq: forcing.inner(&mixing)?,
        u_l2_sq: u.l2_norm_sq(),
        grad_u_sq: u.grad_norm_sq(),
        u_inf: u.sup_norm(),
        res_ks_energy: ks_energy_terms(state)?.residual(),
        res_ns_energy,
        res_static_identity,
        res_lem_a3: u.hessian_norm_sq() - u.laplacian_norm_sq(),
        dt,
        tail_frac: tail_fraction(rho),
        moment_x2,
    })
}

/// For each up-crossing of `E2` through `level`, the crossing time and the
/// time it took `E2` to first reach `2 level` afterwards (if it did).
/// Crossing times are linearly interpolated between samples.
pub fn doubling_report(series: &[DiagnosticsRecord], level: f64) -> Result<Vec<(f64, Option<f64>)>> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let cross = |i: usize, lv: f64| {
        let (a, b) = (&series[i - 1], &series[i]);
        if b.e2 == a.e2 {
            b.t
        } else {
            a.t + (lv - a.e2) / (b.e2 - a.e2) * (b.t - a.t)
        }
    };
    let mut out = Vec::new();
    for i in 1..series.len() {
        if series[i - 1].e2 < level && series[i].e2 >= level {
            let t_hit = cross(i, level);
            let t_double = if series[i].e2 >= 2.0 * level {
                Some(cross(i, 2.0 * level) - t_hit)
            } else {
                (i + 1..series.len()).find(|&j| series[j].e2 >= 2.0 * level).map(|j| cross(j, 2.0 * level) - t_hit)
            };
            out.push((t_hit, t_double));
        }
    }
    Ok(out)
}

/// Append-only CSV writer.
pub struct CsvSink {
    out: BufWriter<File>,
}

impl CsvSink {
    pub fn create(path: &Path) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{}", HEADER.join(","))?;
        Ok(CsvSink { out })
    }

    pub fn write(&mut self, rec: &DiagnosticsRecord) -> Result<()> {
        writeln!(self.out, "{}", format_row(rec))?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn format_row(rec: &DiagnosticsRecord) -> String {
    rec.values().iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
}

pub fn write_csv(records: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    let mut sink = CsvSink::create(path)?;
    for r in records {
        sink.write(r)?;
    }
    sink.flush()
}

pub fn read_csv(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines.next().ok_or_else(|| Error::Csv("empty file".into()))??;
    if header.trim_end() != HEADER.join(",") {
        return Err(Error::Csv(format!("unexpected header: {header}")));
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut v = [0.0; 21];
        let mut count = 0;
        for (i, cell) in line.split(',').enumerate() {
            if i >= 21 {
                return Err(Error::Csv(format!("row {}: too many columns", n + 2)));
            }
            v[i] = cell.trim().parse().map_err(|e| Error::Csv(format!("row {}: {e}", n + 2)))?;
            count += 1;
        }
        if count != 21 {
            return Err(Error::Csv(format!("row {}: {count} columns", n + 2)));
        }
        out.push(DiagnosticsRecord::from_values(v));
    }
    Ok(out)
}
