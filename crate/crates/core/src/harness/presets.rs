//! Shipped experiment configurations. All but `fan_weak` run on the
//! desk-scale parallel problem.

use super::{DenoiserConfig, ExperimentConfig, ProblemConfig};
use crate::denoise::DenoiserSpec;
use crate::solvers::{Algorithm, Attenuation, FirstIterate, SolverConfig};
use crate::tomography::GeometryKind;

const PRESETS: [&str; 5] = [
    "example1_weak",
    "example2_strong",
    "example3_admm",
    "example4_precond",
    "fan_weak",
];

pub fn preset_names() -> &'static [&'static str] {
    &PRESETS
}

fn base(name: &str, algorithm: Algorithm, max_iters: usize, denoiser: DenoiserSpec) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        solver: SolverConfig::new(algorithm, max_iters),
        denoiser: DenoiserConfig::from_spec(&denoiser.wrapped(true)),
        ..Default::default()
    }
}

/// Looks up a shipped configuration by name.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let cfg = match name {
        // weak Gaussian denoising: every step stays a descent step
        "example1_weak" => base(name, Algorithm::FastFbsPnp, 1000, DenoiserSpec::gaussian(0.0005)),
        // strong denoising held in check by gamma attenuation
        "example2_strong" => {
            let mut c = base(name, Algorithm::FastFbsPnp, 250, DenoiserSpec::gaussian(0.02));
            c.solver.attenuation = Attenuation::Gamma;
            c.solver.gamma = 0.5;
            c
        }
        "example3_admm" => {
            let mut c = base(name, Algorithm::AdmmPnp, 250, DenoiserSpec::gaussian(0.02));
            c.solver.rho = 100.0;
            c
        }
        // same, with the gradient-magnitude regularizer in the first x-update
        "example4_precond" => {
            let mut c = base(name, Algorithm::AdmmPnp, 250, DenoiserSpec::gaussian(0.02));
            c.solver.rho = 100.0;
            c.solver.first_iterate = FirstIterate::GradMagnitude;
            c
        }
        // 128x128 curved fan beam, 45 views over a full turn, 181 rays each
        "fan_weak" => {
            let mut c = base(name, Algorithm::FastFbsPnp, 1000, DenoiserSpec::gaussian(0.0005));
            c.problem = ProblemConfig {
                n: 128,
                geometry: GeometryKind::FanCurved,
                angles: 45,
                rays: 181,
                span_degrees: 360.0,
                ..Default::default()
            };
            c
        }
        _ => return None,
    };
    Some(cfg)
}
