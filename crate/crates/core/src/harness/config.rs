//! Line-oriented experiment configuration: `key = value`, dotted keys,
//! `#` comments, unknown keys rejected.

use std::collections::HashSet;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::denoise::{DenoiserKind, DenoiserSpec, DEFAULT_TV_INNER_ITERS};
use crate::error::{Error, Result};
use crate::selection::{Corridor, CriterionKind};
use crate::solvers::{SigmaSearch, SolverConfig};
use crate::tomography::{Geometry, GeometryKind};

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    /// Image side length.
    pub n: usize,
    pub geometry: GeometryKind,
    pub angles: usize,
    pub rays: usize,
    pub span_degrees: f64,
    /// Fan radii; `None` means `2n`.
    pub source_radius: Option<f64>,
    pub detector_radius: Option<f64>,
    pub noise_rel_err: f64,
    pub cv_fraction: f64,
    pub phantom_lo: f64,
    pub phantom_hi: f64,
    /// Noise seed; the leave-out split uses `seed + 1`.
    pub seed: u64,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        let g = Geometry::desk();
        ProblemConfig {
            n: 64,
            geometry: g.kind,
            angles: g.n_angles,
            rays: g.n_rays_per_angle,
            span_degrees: g.angle_span_degrees,
            source_radius: None,
            detector_radius: None,
            noise_rel_err: 0.01,
            cv_fraction: 0.01,
            phantom_lo: -1.0,
            phantom_hi: 1.0,
            seed: 0,
        }
    }
}

impl ProblemConfig {
    pub fn geometry(&self) -> Geometry {
        let auto = 2.0 * self.n as f64;
        Geometry {
            kind: self.geometry,
            n_angles: self.angles,
            n_rays_per_angle: self.rays,
            angle_span_degrees: self.span_degrees,
            source_radius: self.source_radius.unwrap_or(auto),
            detector_radius: self.detector_radius.unwrap_or(auto),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry().validate(self.n)?;
        if !(self.noise_rel_err >= 0.0 && self.noise_rel_err.is_finite()) {
            return Err(Error::invalid(format!("noise_rel_err must be >= 0, got {}", self.noise_rel_err)));
        }
        if !(self.cv_fraction >= 0.0 && self.cv_fraction < 1.0) {
            return Err(Error::invalid(format!("cv_fraction must lie in [0, 1), got {}", self.cv_fraction)));
        }
        if !(self.phantom_hi > self.phantom_lo) {
            return Err(Error::invalid("phantom_hi must exceed phantom_lo"));
        }
        Ok(())
    }
}

/// Denoiser settings as written in a config file. `window` only applies to
/// the median filter and `inner_iters` only to the TV prox.
#[derive(Debug, Clone, PartialEq)]
pub struct DenoiserConfig {
    pub kind: String,
    pub sigma: f64,
    pub rescale_wrap: bool,
    pub window: usize,
    pub inner_iters: usize,
}

impl Default for DenoiserConfig {
    fn default() -> Self {
        DenoiserConfig {
            kind: "gaussian".into(),
            sigma: 0.02,
            rescale_wrap: true,
            window: 3,
            inner_iters: DEFAULT_TV_INNER_ITERS,
        }
    }
}

const DENOISER_KINDS: [&str; 4] = ["identity", "gaussian", "median", "tv_prox"];

impl DenoiserConfig {
    pub fn spec(&self) -> DenoiserSpec {
        let kind = match self.kind.as_str() {
            "identity" => DenoiserKind::Identity,
            "median" => DenoiserKind::Median { window: self.window },
            "tv_prox" => DenoiserKind::TvProx {
                inner_iters: self.inner_iters,
            },
            _ => DenoiserKind::Gaussian,
        };
        DenoiserSpec {
            kind,
            sigma: self.sigma,
            rescale_wrap: self.rescale_wrap,
        }
    }

    pub fn from_spec(spec: &DenoiserSpec) -> Self {
        let mut c = DenoiserConfig {
            kind: spec.kind.name().into(),
            sigma: spec.sigma,
            rescale_wrap: spec.rescale_wrap,
            ..Default::default()
        };
        match spec.kind {
            DenoiserKind::Median { window } => c.window = window,
            DenoiserKind::TvProx { inner_iters } => c.inner_iters = inner_iters,
            _ => {}
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Prefix of the output files.
    pub name: String,
    pub output_dir: PathBuf,
    pub problem: ProblemConfig,
    pub solver: SolverConfig,
    pub denoiser: DenoiserConfig,
    /// Family corridor; `None` derives it from the noise level.
    pub corridor: Option<Corridor>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: "experiment".into(),
            output_dir: PathBuf::from("out"),
            problem: ProblemConfig::default(),
            solver: SolverConfig::default(),
            denoiser: DenoiserConfig::default(),
            corridor: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let name_ok = !self.name.is_empty()
            && self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
        if !name_ok {
            return Err(Error::invalid(format!(
                "name `{}` must be non-empty and use only [A-Za-z0-9_.-]",
                self.name
            )));
        }
        self.problem.validate()?;
        self.solver.validate()?;
        self.denoiser.spec().validate()
    }

    /// Overrides both the data and the solver seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.problem.seed = seed;
        self.solver.seed = seed;
        self
    }
}

type Getter = fn(&ExperimentConfig) -> String;
type Setter = fn(&mut ExperimentConfig, &str) -> std::result::Result<(), String>;

struct Key {
    name: &'static str,
    help: &'static str,
    get: Getter,
    set: Setter,
}

fn num<T: FromStr>(v: &str) -> std::result::Result<T, String>
where
    T::Err: Display,
{
    v.parse::<T>().map_err(|e| format!("invalid value `{v}`: {e}"))
}

fn flag(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

fn auto_or<T: FromStr>(v: &str) -> std::result::Result<Option<T>, String>
where
    T::Err: Display,
{
    if v == "auto" {
        Ok(None)
    } else {
        num(v).map(Some)
    }
}

fn show_auto<T: Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "auto".into(), |t| t.to_string())
}

fn list(v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(',').map(|s| num(s.trim())).collect()
}

fn show_list(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

macro_rules! key {
    ($name:literal, $help:literal, |$c:ident| $get:expr, |$m:ident, $v:ident| $set:expr) => {
        Key {
            name: $name,
            help: $help,
            get: |$c| $get,
            set: |$m, $v| {
                $set;
                Ok(())
            },
        }
    };
}

const KEYS: &[Key] = &[
    key!("name", "prefix of the output files",
        |c| c.name.clone(), |c, v| c.name = v.to_string()),
    key!("output_dir", "directory for trace and summary files",
        |c| c.output_dir.display().to_string(), |c, v| c.output_dir = PathBuf::from(v)),
    key!("problem.n", "image side length (required)",
        |c| c.problem.n.to_string(), |c, v| c.problem.n = num(v)?),
    key!("problem.geometry", "parallel | fan_curved",
        |c| match c.problem.geometry {
            GeometryKind::Parallel => "parallel".into(),
            GeometryKind::FanCurved => "fan_curved".into(),
        },
        |c, v| c.problem.geometry = match v {
            "parallel" => GeometryKind::Parallel,
            "fan_curved" => GeometryKind::FanCurved,
            _ => return Err(format!("unknown geometry `{v}` (expected parallel or fan_curved)")),
        }),
    key!("problem.angles", "number of projection angles",
        |c| c.problem.angles.to_string(), |c, v| c.problem.angles = num(v)?),
    key!("problem.rays", "rays per angle",
        |c| c.problem.rays.to_string(), |c, v| c.problem.rays = num(v)?),
    key!("problem.span_degrees", "angular range in degrees",
        |c| c.problem.span_degrees.to_string(), |c, v| c.problem.span_degrees = num(v)?),
    key!("problem.source_radius", "fan source radius in pixels, or auto (2n)",
        |c| show_auto(&c.problem.source_radius), |c, v| c.problem.source_radius = auto_or(v)?),
    key!("problem.detector_radius", "fan detector radius in pixels, or auto (2n)",
        |c| show_auto(&c.problem.detector_radius), |c, v| c.problem.detector_radius = auto_or(v)?),
    key!("problem.noise_rel_err", "relative noise norm ||e|| / ||b||",
        |c| c.problem.noise_rel_err.to_string(), |c, v| c.problem.noise_rel_err = num(v)?),
    key!("problem.cv_fraction", "fraction of rows held out for cross-validation",
        |c| c.problem.cv_fraction.to_string(), |c, v| c.problem.cv_fraction = num(v)?),
    key!("problem.phantom_lo", "phantom background value",
        |c| c.problem.phantom_lo.to_string(), |c, v| c.problem.phantom_lo = num(v)?),
    key!("problem.phantom_hi", "phantom maximum value",
        |c| c.problem.phantom_hi.to_string(), |c, v| c.problem.phantom_hi = num(v)?),
    key!("problem.seed", "noise seed (the split uses seed + 1)",
        |c| c.problem.seed.to_string(), |c, v| c.problem.seed = num(v)?),
    key!("solver.algorithm", "landweber | fbs_pnp | fast_fbs_pnp | admm_pnp (required)",
        |c| c.solver.algorithm.name().into(), |c, v| c.solver.algorithm = v.parse()?),
    key!("solver.max_iters", "number of outer iterations",
        |c| c.solver.max_iters.to_string(), |c, v| c.solver.max_iters = num(v)?),
    key!("solver.tau", "gradient step, or auto (0.95 / (2 ||A||^2))",
        |c| show_auto(&c.solver.tau), |c, v| c.solver.tau = auto_or(v)?),
    key!("solver.rho", "ADMM penalty",
        |c| c.solver.rho.to_string(), |c, v| c.solver.rho = num(v)?),
    key!("solver.sigma_update", "fixed | scaled",
        |c| c.solver.sigma_update.name().into(), |c, v| c.solver.sigma_update = v.parse()?),
    key!("solver.attenuation", "none | gamma | select_alpha",
        |c| c.solver.attenuation.name().into(), |c, v| c.solver.attenuation = v.parse()?),
    key!("solver.gamma", "attenuation ratio in (0, 1]",
        |c| c.solver.gamma.to_string(), |c, v| c.solver.gamma = num(v)?),
    key!("solver.alpha_grid", "comma-separated blending weights for select_alpha",
        |c| show_list(&c.solver.alpha_grid), |c, v| c.solver.alpha_grid = list(v)?),
    key!("solver.inner_cg_iters", "CG iterations per ADMM x-update",
        |c| c.solver.inner_cg_iters.to_string(), |c, v| c.solver.inner_cg_iters = num(v)?),
    key!("solver.cg_tol", "relative CG residual tolerance",
        |c| c.solver.cg_tol.to_string(), |c, v| c.solver.cg_tol = num(v)?),
    key!("solver.cg_warm_start", "start CG from the previous x",
        |c| c.solver.cg_warm_start.to_string(), |c, v| c.solver.cg_warm_start = flag(v)?),
    key!("solver.first_iterate", "identity | grad_magnitude",
        |c| c.solver.first_iterate.name().into(), |c, v| c.solver.first_iterate = v.parse()?),
    key!("solver.power_iters", "power iterations for ||A||^2",
        |c| c.solver.power_iters.to_string(), |c, v| c.solver.power_iters = num(v)?),
    key!("solver.seed", "power iteration seed",
        |c| c.solver.seed.to_string(), |c, v| c.solver.seed = num(v)?),
    key!("solver.sigma_search", "none, or min,max,count for a per-iteration strength search",
        |c| match &c.solver.sigma_search {
            None => "none".into(),
            Some(s) => format!("{},{},{}", s.min, s.max, s.grid_size),
        },
        |c, v| c.solver.sigma_search = match v {
            "none" => None,
            _ => match v.split(',').map(str::trim).collect::<Vec<_>>()[..] {
                [lo, hi, count] => Some(SigmaSearch { min: num(lo)?, max: num(hi)?, grid_size: num(count)? }),
                _ => return Err(format!("expected none or min,max,count, got `{v}`")),
            },
        }),
    key!("solver.criterion", "cross_validation | discrepancy_principle",
        |c| c.solver.criterion.name().into(),
        |c, v| c.solver.criterion = v.parse::<CriterionKind>()?),
    key!("solver.eta", "discrepancy principle safety factor",
        |c| c.solver.eta.to_string(), |c, v| c.solver.eta = num(v)?),
    key!("denoiser.kind", "identity | gaussian | median | tv_prox",
        |c| c.denoiser.kind.clone(),
        |c, v| {
            if !DENOISER_KINDS.contains(&v) {
                return Err(format!("unknown denoiser `{v}` (expected one of: {})", DENOISER_KINDS.join(", ")));
            }
            c.denoiser.kind = v.to_string()
        }),
    key!("denoiser.sigma", "denoiser strength",
        |c| c.denoiser.sigma.to_string(), |c, v| c.denoiser.sigma = num(v)?),
    key!("denoiser.rescale_wrap", "denoise on the [0, 1] rescaled image",
        |c| c.denoiser.rescale_wrap.to_string(), |c, v| c.denoiser.rescale_wrap = flag(v)?),
    key!("denoiser.window", "median window side (odd)",
        |c| c.denoiser.window.to_string(), |c, v| c.denoiser.window = num(v)?),
    key!("denoiser.inner_iters", "TV prox dual iterations",
        |c| c.denoiser.inner_iters.to_string(), |c, v| c.denoiser.inner_iters = num(v)?),
    key!("corridor", "default (from the noise level), or eps1,eps2",
        |c| match &c.corridor {
            None => "default".into(),
            Some(k) => format!("{},{}", k.eps1, k.eps2),
        },
        |c, v| c.corridor = match v {
            "default" => None,
            _ => match list(v)?[..] {
                [e1, e2] => Some(Corridor::new(e1, e2).map_err(|e| e.to_string())?),
                _ => return Err(format!("expected default or eps1,eps2, got `{v}`")),
            },
        }),
];

const REQUIRED: [&str; 2] = ["problem.n", "solver.algorithm"];

/// Parses config text. Every key may appear at most once.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    parse_with_name(text, None)
}

/// Reads a config file; `name` defaults to the file stem.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    parse_with_name(&text, stem)
}

fn parse_with_name(text: &str, default_name: Option<String>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(name) = default_name {
        cfg.name = name;
    }
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = Some(i + 1);
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::config(lineno, format!("expected `key = value`, got `{line}`")))?;
        let (k, v) = (k.trim(), v.trim());
        let key = KEYS
            .iter()
            .find(|key| key.name == k)
            .ok_or_else(|| Error::config(lineno, format!("unknown key `{k}`")))?;
        if !seen.insert(key.name) {
            return Err(Error::config(lineno, format!("duplicate key `{k}`")));
        }
        (key.set)(&mut cfg, v).map_err(|m| Error::config(lineno, format!("{k}: {m}")))?;
    }
    for r in REQUIRED {
        if !seen.contains(r) {
            return Err(Error::config(None, format!("missing required key `{r}`")));
        }
    }
    cfg.validate().map_err(|e| Error::config(None, e.to_string()))?;
    Ok(cfg)
}

/// Writes every key; `parse_config_str(&serialize(c)) == c` for valid `c`.
pub fn serialize(cfg: &ExperimentConfig) -> String {
    KEYS.iter().map(|k| format!("{} = {}\n", k.name, (k.get)(cfg))).collect()
}

/// Key, default value and description for every recognized key.
pub fn config_help() -> String {
    let d = ExperimentConfig::default();
    let width = KEYS.iter().map(|k| k.name.len()).max().unwrap_or(0);
    KEYS.iter()
        .map(|k| format!("{:<width$}  {} [default: {}]\n", k.name, k.help, (k.get)(&d)))
        .collect()
}
