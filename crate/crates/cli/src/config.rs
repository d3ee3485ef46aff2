//! Run configuration: JSON file, command-line overrides and resolution.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};

use curvedyn_core::dynamics::audit::IDENTITY_TOL;
use curvedyn_core::dynamics::integrate::Method;
use curvedyn_core::dynamics::orbit::RETURN_DELTA;
use curvedyn_core::sampling::RNG_NAME;
use curvedyn_core::{Curvature, PhaseState, SystemId, SystemSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable read when no seed is given.
pub const SEED_ENV: &str = "CURVEDYN_SEED";

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub method: Method,
    pub tol: f64,
    pub dt: f64,
    pub t_end: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { method: Method::Rk45Adaptive, tol: 1e-12, dt: 1e-3, t_end: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub schema_version: u32,
    pub system: String,
    /// `kappa` and the system's couplings.
    pub params: BTreeMap<String, f64>,
    /// `[r, theta, phi, p_r, p_theta, p_phi]`; sampled from `seed` when absent.
    pub initial_state: Option<[f64; 6]>,
    pub seed: Option<u64>,
    pub integrator: IntegratorConfig,
    /// States per identity and per independence set in `audit`.
    pub samples: usize,
    /// Pass threshold on scaled identity residuals in `audit`.
    pub identity_tol: f64,
    /// Curvatures swept by `potential`.
    pub kappas: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    /// Horizon and return threshold of `closed-orbit`.
    pub t_max: f64,
    pub delta: f64,
    /// Sampled initial conditions in `closed-orbit` when no state is given.
    pub orbits: usize,
    /// Worker threads for audits; the thread pool's default when absent.
    pub workers: Option<usize>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            system: "free".into(),
            params: BTreeMap::new(),
            initial_state: None,
            seed: None,
            integrator: IntegratorConfig::default(),
            samples: 50,
            identity_tol: IDENTITY_TOL,
            kappas: vec![-1.0, 0.0, 1.0],
            r_min: 1e-3,
            r_max: std::f64::consts::FRAC_PI_2 - 1e-3,
            points: 400,
            t_max: 100.0,
            delta: RETURN_DELTA,
            orbits: 3,
            workers: None,
            out_dir: PathBuf::from("."),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the resolved config as JSON and exit.
    #[arg(long)]
    pub emit_config: bool,
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k3: Option<f64>,
    /// Initial state `r,theta,phi,p_r,p_theta,p_phi`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub state: Option<Vec<f64>>,
    /// Falls back to $CURVEDYN_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// rk4_fixed, rk45_adaptive or implicit_midpoint.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub identity_tol: Option<f64>,
    /// Comma-separated curvatures for `potential`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub kappas: Option<Vec<f64>>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub orbits: Option<usize>,
    /// Size of the audit worker pool.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Directory for output files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Reads a config file, reporting parse errors with line and column.
pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))?;
    if cfg.schema_version != SCHEMA_VERSION {
        bail!("{}: schema_version {} is not supported (expected {SCHEMA_VERSION})", path.display(), cfg.schema_version);
    }
    Ok(cfg)
}

fn default_param(name: &str) -> f64 {
    match name {
        "alpha" => 1.0,
        "k" => -1.0,
        _ => 0.0,
    }
}

impl RunArgs {
    /// Config file (or defaults), then flags, then the seed fallback and
    /// default couplings, then validation.
    pub fn resolve(&self, env_seed: Option<String>) -> anyhow::Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = &self.system {
            c.system = s.clone();
        }
        let flags = [
            ("kappa", self.kappa),
            ("alpha", self.alpha),
            ("k", self.k),
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
        ];
        for (name, v) in flags {
            if let Some(v) = v {
                c.params.insert(name.into(), v);
            }
        }
        if let Some(s) = &self.state {
            c.initial_state = Some(s.as_slice().try_into().context("--state needs six values")?);
        }
        if let Some(s) = self.seed {
            c.seed = Some(s);
        }
        if c.seed.is_none() {
            c.seed = Some(match env_seed {
                Some(v) => v.trim().parse().with_context(|| format!("{SEED_ENV}={v:?} is not an unsigned integer"))?,
                None => DEFAULT_SEED,
            });
        }
        if let Some(m) = &self.method {
            c.integrator.method = Method::from_name(m)?;
        }
        macro_rules! set {
            ($($field:ident).+ <- $flag:ident) => {
                if let Some(v) = self.$flag.clone() {
                    c.$($field).+ = v;
                }
            };
        }
        set!(integrator.tol <- tol);
        set!(integrator.dt <- dt);
        set!(integrator.t_end <- t_end);
        set!(samples <- samples);
        set!(identity_tol <- identity_tol);
        set!(kappas <- kappas);
        set!(r_min <- r_min);
        set!(r_max <- r_max);
        set!(points <- points);
        set!(t_max <- t_max);
        set!(delta <- delta);
        set!(orbits <- orbits);
        set!(out_dir <- out);
        if self.workers.is_some() {
            c.workers = self.workers;
        }

        let id = SystemId::from_name(&c.system)?;
        c.params.entry("kappa".into()).or_insert(0.0);
        for &name in id.parameters() {
            c.params.entry(name.into()).or_insert_with(|| default_param(name));
        }
        c.validate()?;
        Ok(c)
    }
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn kappa(&self) -> f64 {
        self.params.get("kappa").copied().unwrap_or(0.0)
    }

    pub fn spec(&self) -> anyhow::Result<SystemSpec> {
        self.spec_at(self.kappa())
    }

    pub fn spec_at(&self, kappa: f64) -> anyhow::Result<SystemSpec> {
        let id = SystemId::from_name(&self.system)?;
        let couplings: BTreeMap<String, f64> = self.params.iter().filter(|(k, _)| *k != "kappa").map(|(k, v)| (k.clone(), *v)).collect();
        Ok(SystemSpec::from_params(id, Curvature::new(kappa)?, &couplings)?)
    }

    pub fn initial_state(&self) -> Option<PhaseState> {
        self.initial_state.map(PhaseState::from_array)
    }

    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self) -> anyhow::Result<()> {
        self.spec()?;
        for &k in &self.kappas {
            self.spec_at(k)?;
        }
        let it = &self.integrator;
        if !(it.t_end > 0.0) {
            bail!("integrator.t_end must be positive, got {}", it.t_end);
        }
        match it.method {
            Method::Rk45Adaptive if !(it.tol > 0.0) => bail!("integrator.tol must be positive, got {}", it.tol),
            Method::Rk4Fixed | Method::ImplicitMidpoint if !(it.dt > 0.0) => {
                bail!("integrator.dt must be positive, got {}", it.dt)
            }
            _ => {}
        }
        if self.samples == 0 || self.orbits == 0 {
            bail!("samples and orbits must be at least 1");
        }
        if self.points < 2 {
            bail!("points must be at least 2, got {}", self.points);
        }
        if !(self.r_min < self.r_max) {
            bail!("r_min = {} must be below r_max = {}", self.r_min, self.r_max);
        }
        if !(self.identity_tol >= 0.0) {
            bail!("identity_tol must be non-negative, got {}", self.identity_tol);
        }
        if !(self.t_max > 0.0 && self.delta > 0.0) {
            bail!("t_max and delta must be positive");
        }
        if self.workers == Some(0) {
            bail!("workers must be at least 1");
        }
        if let Some(s) = self.initial_state() {
            s.validate(self.spec()?.kappa)?;
        }
        Ok(())
    }
}

/// Metadata block written into every JSON report. The recorded config
/// leaves out `out_dir`, so reports do not depend on where they are written.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub rng: &'static str,
    pub seed: u64,
    pub config: serde_json::Value,
}

impl Metadata {
    pub fn new(config: &RunConfig) -> Self {
        let mut v = serde_json::to_value(config).expect("config serializes");
        if let Some(m) = v.as_object_mut() {
            m.remove("out_dir");
        }
        Metadata { tool: "curvedyn", version: env!("CARGO_PKG_VERSION"), rng: RNG_NAME, seed: config.seed(), config: v }
    }
}
