//! Run configuration files.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use heisenkep::dynamics::IntegratorConfig;
use heisenkep::heisenmodel::{
    dilation_j, hamiltonian_flat, kinetic_energy, potential_argument, rho, ParticularParams, SystemSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

/// A system given inline or as a path relative to the config file.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SystemRef {
    Path(PathBuf),
    Inline(SystemSpec),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial {
    State(Vec<f64>),
    /// Uniform positions and momenta in `[−scale, scale]`, momenta rescaled to
    /// the target energy.
    Random {
        energy: f64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        rho_min: f64,
        /// Lower bound on `J`; keeps zero-energy runs away from the origin.
        #[serde(default)]
        j_min: Option<f64>,
    },
    Particular(ParticularParams),
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub h_drift: f64,
    pub integral_drift: f64,
    pub j_drift: f64,
    pub dj_residual: f64,
    pub straight_line: f64,
    pub bracket: f64,
    pub casimir: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            h_drift: 1e-8,
            integral_drift: 1e-8,
            j_drift: 1e-8,
            dj_residual: 1e-6,
            straight_line: 1e-9,
            bracket: 1e-6,
            casimir: 1e-10,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Kepler,
    Twobody,
}

/// Exact parameters of the variational equations, as decimal or `p/q` strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VeParams {
    pub system: Branch,
    pub a: Option<String>,
    pub c: String,
    pub mu: String,
    pub tau0: String,
    pub w2: String,
}

impl Default for VeParams {
    fn default() -> Self {
        VeParams { system: Branch::Kepler, a: None, c: "1".into(), mu: "1".into(), tau0: "0".into(), w2: "1".into() }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FactorizeParams {
    /// Rows of a 4×4 matrix in `t`; the one-body VE block for `a = 2` if absent.
    pub matrix: Option<Vec<Vec<String>>>,
    pub plucker_only: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepParams {
    pub energies: Vec<f64>,
    pub samples: usize,
    pub scale: f64,
    pub rho_min: f64,
    /// Runs stopped by a guard count as failures.
    pub fail_on_event: bool,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams { energies: vec![-0.5, 0.5], samples: 4, scale: 1.0, rho_min: 0.3, fail_on_event: false }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyParams {
    pub samples: usize,
    pub scale: f64,
    pub t_end: f64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams { samples: 50, scale: 1.0, t_end: 5.0 }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Subcommand the preset was written for; checked against the invoked one.
    pub subcommand: Option<String>,
    pub system: Option<SystemRef>,
    pub integrator: IntegratorConfig,
    pub initial: Option<Initial>,
    pub tolerances: Tolerances,
    pub ve: VeParams,
    pub factorize: FactorizeParams,
    pub sweep: SweepParams,
    pub verify: VerifyParams,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(skip)]
    dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if let Some(out) = &cfg.out {
            cfg.out = Some(cfg.dir.join(out));
        }
        Ok(cfg)
    }

    pub fn system(&self) -> Result<SystemSpec> {
        match &self.system {
            None => bail!("the config has no \"system\""),
            Some(SystemRef::Inline(s)) => Ok(s.clone()),
            Some(SystemRef::Path(p)) => {
                let path = self.dir.join(p);
                let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                SystemSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))
            }
        }
    }
}

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Rejection-samples a state with energy `energy`, separation at least
/// `rho_min` and `J ≥ j_min`.
pub fn random_state(
    spec: &SystemSpec,
    rng: &mut ChaCha8Rng,
    energy: f64,
    scale: f64,
    rho_min: f64,
    j_min: Option<f64>,
) -> Result<Vec<f64>> {
    let dim = spec.kind.dim();
    let n = dim / 2;
    for _ in 0..100_000 {
        let mut y: Vec<f64> = (0..dim).map(|_| rng.gen_range(-scale..scale)).collect();
        if rho(&potential_argument(spec.kind, &y[..n])) < rho_min {
            continue;
        }
        let t = kinetic_energy(&y, &spec.masses());
        let v = hamiltonian_flat(spec, &y)? - t;
        let lam2 = (energy - v) / t;
        if !(lam2 > 0.0) {
            continue;
        }
        for p in &mut y[n..] {
            *p *= lam2.sqrt();
        }
        if j_min.map_or(true, |j| dilation_j(&y) >= j) {
            return Ok(y);
        }
    }
    bail!("no state with H = {energy} found in [−{scale}, {scale}]")
}
