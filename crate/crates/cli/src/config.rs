//! INI run configuration.
//!
//! ```ini
//! [run]
//! n1 = 128
//! n2 = 65
//! variant = navier_stokes
//! g = 50
//! B = 100
//! t_end = 1
//! sample_every = 0.01
//!
//! [datum]
//! preset = gaussian_bump
//! mass = 60
//! width = 0.3
//!
//! [detector]
//! rho_inf_max = 1000
//!
//! [sweep]
//! g = 10, 50, 100
//! B = 10, 100
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use ini::Ini;
use ksns_core::state::{DtPolicy, Scheme, Thresholds};
use ksns_core::VelocityLaw;

use crate::datum::DatumSpec;
use crate::error::{config, CliError, Result};

/// Initial vorticity for Navier–Stokes runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaInit {
    Zero,
    /// Curl of the static-Stokes velocity of the initial density.
    Static,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n1: usize,
    pub n2: usize,
    pub law: VelocityLaw,
    pub g: f64,
    pub b: f64,
    pub t_end: f64,
    pub sample_every: f64,
    pub omega_init: OmegaInit,
    pub datum: DatumSpec,
    pub dt: DtPolicy,
    pub thresholds: Thresholds,
    pub out: PathBuf,
    pub seed: u64,
    /// Viscosities for `compare`.
    pub compare_b: Vec<f64>,
    /// The text this config was parsed from.
    pub source: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n1: 64,
            n2: 33,
            law: VelocityLaw::NoFlow,
            g: 1.0,
            b: 1.0,
            t_end: 1.0,
            sample_every: 0.01,
            omega_init: OmegaInit::Zero,
            datum: DatumSpec::Constant { mass: 2.0 * PI * PI },
            dt: DtPolicy::default(),
            thresholds: Thresholds::default(),
            out: PathBuf::from("out"),
            seed: 0,
            compare_b: vec![10.0, 100.0, 1000.0],
            source: String::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub template: RunConfig,
    pub g: Vec<f64>,
    pub b: Vec<f64>,
    pub workers: usize,
}

const RUN_KEYS: &[&str] = &[
    "n1",
    "n2",
    "variant",
    "g",
    "B",
    "t_end",
    "sample_every",
    "omega_init",
    "scheme",
    "dt_init",
    "dt_min",
    "dt_max",
    "cfl_safety",
    "out",
    "seed",
    "compare_B",
];
const DATUM_KEYS: &[&str] =
    &["preset", "mass", "amplitude", "k1", "k2", "center_x1", "center_x2", "width", "floor", "k1_max", "k2_max"];
const DETECTOR_KEYS: &[&str] = &["rho_inf_max", "tail_frac_max", "dt_min_steps"];
const SWEEP_KEYS: &[&str] = &["g", "B", "workers"];

/// Key/value pairs of one section.
pub(crate) struct Section<'a> {
    name: &'a str,
    map: BTreeMap<String, String>,
}

impl<'a> Section<'a> {
    pub(crate) fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("[{}] {key}: cannot parse {v:?}", self.name))),
        }
    }

    pub(crate) fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub(crate) fn str(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.map.get(key) else { return Ok(None) };
        v.split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("[{}] {key}: expected a comma-separated list, got {v:?}", self.name)))
    }
}

fn section<'a>(ini: &Ini, name: &'a str, allowed: &[&str]) -> Result<Section<'a>> {
    let mut map = BTreeMap::new();
    if let Some(props) = ini.section(Some(name)) {
        for (k, v) in props.iter() {
            if !allowed.contains(&k) {
                return config(format!("[{name}]: unknown key {k:?}"));
            }
            map.insert(k.to_string(), v.trim().to_string());
        }
    }
    Ok(Section { name, map })
}

fn parse_ini(text: &str) -> Result<Ini> {
    let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    for (name, props) in ini.iter() {
        match name {
            None if props.is_empty() => {}
            None => return config("keys outside a section"),
            Some("run" | "datum" | "detector" | "sweep") => {}
            Some(other) => return config(format!("unknown section [{other}]")),
        }
    }
    Ok(ini)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        config(format!("{name} must be positive, got {v}"))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let ini = parse_ini(text)?;
        Self::from_ini(&ini, text)
    }

    fn from_ini(ini: &Ini, text: &str) -> Result<Self> {
        let d = RunConfig::default();
        let run = section(ini, "run", RUN_KEYS)?;
        let det = section(ini, "detector", DETECTOR_KEYS)?;
        let datum = section(ini, "datum", DATUM_KEYS)?;
        section(ini, "sweep", SWEEP_KEYS)?;

        let law = match run.str("variant") {
            None => d.law,
            Some(v) => VelocityLaw::parse(v).ok_or_else(|| CliError::Config(format!("unknown variant {v:?}")))?,
        };
        let omega_init = match run.str("omega_init") {
            None => OmegaInit::Zero,
            Some(_) if law != VelocityLaw::NavierStokes => {
                return config(format!("omega_init: the {} law takes no velocity datum", law.name()))
            }
            Some("zero") => OmegaInit::Zero,
            Some("static") => OmegaInit::Static,
            Some(v) => return config(format!("omega_init must be zero or static, got {v:?}")),
        };
        let scheme = match run.str("scheme") {
            None => d.dt.scheme,
            Some("cnab2") => Scheme::ImexCnab2,
            Some("euler") => Scheme::ImexEuler,
            Some(v) => return config(format!("scheme must be cnab2 or euler, got {v:?}")),
        };
        let dt = DtPolicy {
            dt_init: positive("dt_init", run.or("dt_init", d.dt.dt_init)?)?,
            dt_min: positive("dt_min", run.or("dt_min", d.dt.dt_min)?)?,
            dt_max: positive("dt_max", run.or("dt_max", d.dt.dt_max)?)?,
            cfl_safety: positive("cfl_safety", run.or("cfl_safety", d.dt.cfl_safety)?)?,
            scheme,
        };
        if dt.dt_min > dt.dt_max {
            return config("dt_min exceeds dt_max");
        }
        let thresholds = Thresholds {
            rho_inf_max: positive("rho_inf_max", det.or("rho_inf_max", d.thresholds.rho_inf_max)?)?,
            tail_frac_max: positive("tail_frac_max", det.or("tail_frac_max", d.thresholds.tail_frac_max)?)?,
            dt_min_steps: det.or("dt_min_steps", d.thresholds.dt_min_steps)?,
        };
        let compare_b = run.list("compare_B")?.unwrap_or(d.compare_b);
        for &b in &compare_b {
            positive("compare_B", b)?;
        }

        let cfg = RunConfig {
            n1: run.or("n1", d.n1)?,
            n2: run.or("n2", d.n2)?,
            law,
            g: positive("g", run.or("g", d.g)?)?,
            b: positive("B", run.or("B", d.b)?)?,
            t_end: run.or("t_end", d.t_end)?,
            sample_every: run.or("sample_every", d.sample_every)?,
            omega_init,
            datum: DatumSpec::from_section(&datum)?,
            dt,
            thresholds,
            out: run.get::<String>("out")?.map_or(d.out, PathBuf::from),
            seed: run.or("seed", d.seed)?,
            compare_b,
            source: text.to_string(),
        };
        if !(cfg.t_end >= 0.0 && cfg.t_end.is_finite()) {
            return config(format!("t_end must be nonnegative, got {}", cfg.t_end));
        }
        if !(cfg.sample_every >= 0.0 && cfg.sample_every.is_finite()) {
            return config(format!("sample_every must be nonnegative, got {}", cfg.sample_every));
        }
        ksns_core::Grid::new(cfg.n1, cfg.n2).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let ini = parse_ini(text)?;
        let template = RunConfig::from_ini(&ini, text)?;
        let sweep = section(&ini, "sweep", SWEEP_KEYS)?;
        let g = sweep.list("g")?.unwrap_or_else(|| vec![template.g]);
        let b = sweep.list("B")?.unwrap_or_else(|| vec![template.b]);
        if g.is_empty() || b.is_empty() {
            return config("sweep axes must be nonempty");
        }
        for &v in g.iter().chain(&b) {
            positive("sweep value", v)?;
        }
        let workers = sweep.or("workers", 1usize)?.max(1);
        Ok(SweepConfig { template, g, b, workers })
    }
}
