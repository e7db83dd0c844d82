use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;

use clap::{Parser, Subcommand};
use pnp_reg::harness::{config_help, parse_config, preset, preset_names, run_experiment, ExperimentConfig};
use pnp_reg::Error;

#[derive(Parser)]
#[command(name = "pnp", version, about = "Plug-and-play regularization experiments on simulated CT data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more experiments, concurrently.
    Run {
        /// Experiment config files.
        configs: Vec<PathBuf>,
        /// Overrides the output directory of every experiment.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Also run a shipped preset (repeatable).
        #[arg(long)]
        preset: Vec<String>,
        /// Overrides the noise, split and solver seeds.
        #[arg(long)]
        seed: Option<u64>,
        /// Print the preset names and exit.
        #[arg(long)]
        list_presets: bool,
    },
    /// Print every config key with its default and meaning.
    Keys,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ABORT: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::InvalidInput(_) => EXIT_CONFIG,
        Error::SolverAbort { .. } => EXIT_ABORT,
        _ => EXIT_FAILURE,
    }
}

fn load(
    configs: &[PathBuf],
    presets: &[String],
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<Vec<ExperimentConfig>, Error> {
    let mut out = Vec::new();
    for path in configs {
        // an unreadable or invalid file is a config error either way
        out.push(parse_config(path).map_err(|e| match e {
            Error::Config { line, message } => Error::Config {
                line,
                message: format!("{}: {message}", path.display()),
            },
            other => Error::Config {
                line: None,
                message: other.to_string(),
            },
        })?);
    }
    for name in presets {
        out.push(preset(name).ok_or_else(|| {
            Error::Config {
                line: None,
                message: format!("unknown preset `{name}` (known: {})", preset_names().join(", ")),
            }
        })?);
    }
    for cfg in &mut out {
        if let Some(dir) = &output_dir {
            cfg.output_dir = dir.clone();
        }
        if let Some(s) = seed {
            *cfg = cfg.clone().with_seed(s);
        }
    }
    Ok(out)
}

fn run(configs: Vec<ExperimentConfig>) -> u8 {
    let results: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|cfg| s.spawn(move || (cfg, run_experiment(cfg))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("experiment thread panicked")).collect()
    });
    let mut code = 0;
    for (cfg, res) in results {
        match res {
            Ok(r) => {
                let sel = &r.summary[1];
                println!(
                    "{}: family {}, selected k={} (mse {:.4}), wrote {}",
                    cfg.name,
                    r.family_label,
                    sel.k,
                    sel.metrics.mse,
                    r.summary_text_path.display()
                );
            }
            Err(e) => {
                eprintln!("{}: {e}", cfg.name);
                code = code.max(exit_code(&e));
            }
        }
    }
    code
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Keys => {
            print!("{}", config_help());
            ExitCode::SUCCESS
        }
        Command::Run {
            configs,
            output_dir,
            preset: presets,
            seed,
            list_presets,
        } => {
            if list_presets {
                for name in preset_names() {
                    println!("{name}");
                }
                return ExitCode::SUCCESS;
            }
            if configs.is_empty() && presets.is_empty() {
                eprintln!("nothing to run: pass config files or --preset");
                return ExitCode::from(EXIT_CONFIG);
            }
            match load(&configs, &presets, output_dir, seed) {
                Ok(all) => ExitCode::from(run(all)),
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
    }
}
