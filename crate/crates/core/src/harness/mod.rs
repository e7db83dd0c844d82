//! Experiment driver: builds the simulated CT problem from a config, runs
//! the solver, selects a stopping index and writes the trace and summary.

mod config;
mod output;
mod presets;

pub use config::{
    config_help, parse_config, parse_config_str, serialize, DenoiserConfig, ExperimentConfig,
    ProblemConfig,
};
pub use output::{emit_trace_csv, summary_csv, summary_text, trace_csv, TRACE_HEADER};
pub use presets::{preset, preset_names};

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use crate::ops::{norm, Image, SparseOperator};
use crate::selection::{select_stop, CriterionKind, Family, SelectionCriterion};
use crate::solvers::{run_solver, IterationRecord, IterationTrace, Problem};
use crate::tomography::{add_noise, build_radon, shepp_logan, split_cv};

/// The simulated problem together with its full operator and clean data.
#[derive(Debug, Clone)]
pub struct BuiltProblem {
    pub problem: Problem,
    pub operator: SparseOperator,
    pub truth: Image,
    pub clean_data: Vec<f64>,
    pub snr_db: f64,
}

/// Phantom, operator, noisy data and fit/leave-out split for `config`.
pub fn build_problem(config: &ProblemConfig) -> Result<BuiltProblem> {
    let n = config.n;
    let truth = shepp_logan(n, config.phantom_lo, config.phantom_hi)?;
    let operator = build_radon(&config.geometry(), n)?;
    let clean = operator.apply(truth.data())?;
    let noisy = add_noise(&clean, config.noise_rel_err, config.seed)?;
    let sino = if config.cv_fraction > 0.0 {
        split_cv(&noisy, config.cv_fraction, config.seed.wrapping_add(1))?
    } else {
        noisy
    };
    let snr_db = sino.snr_db(norm(&clean));
    let problem = Problem::from_sinogram(&operator, &sino, n, n)?.with_truth(truth.clone())?;
    Ok(BuiltProblem {
        problem,
        operator,
        truth,
        clean_data: clean,
        snr_db,
    })
}

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: &'static str,
    pub k: usize,
    pub metrics: MetricsReport,
}

impl SummaryRow {
    fn from_record(label: &'static str, r: &IterationRecord) -> Self {
        SummaryRow {
            label,
            k: r.k,
            metrics: MetricsReport {
                mse: r.mse,
                psnr: r.psnr,
                ssim: r.ssim,
                d_err: r.d_err,
                s_err: r.cv_error,
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub trace_csv_path: PathBuf,
    pub summary_csv_path: PathBuf,
    pub summary_text_path: PathBuf,
    /// `final_N`, `selected_S`, `min_mse`.
    pub summary: Vec<SummaryRow>,
    pub family_label: Family,
    pub trace: IterationTrace,
}

/// Stopping criterion implied by the solver settings and the realized
/// noise level.
pub fn stop_criterion(config: &ExperimentConfig, delta: f64) -> Result<SelectionCriterion> {
    match config.solver.criterion {
        CriterionKind::CrossValidation => Ok(SelectionCriterion::cross_validation()),
        CriterionKind::DiscrepancyPrinciple => {
            SelectionCriterion::discrepancy_principle(config.solver.eta, delta)
        }
    }
}

/// Summary rows for a finished trace.
pub fn summarize(trace: &IterationTrace, criterion: &SelectionCriterion) -> Result<Vec<SummaryRow>> {
    let last = trace.last().ok_or_else(|| Error::invalid("empty trace"))?;
    let k_sel = select_stop(trace, criterion)?;
    let selected = trace.record(k_sel).expect("selected index is recorded");
    let mut best = &trace.records[0];
    for r in &trace.records[1..] {
        if r.mse < best.mse {
            best = r;
        }
    }
    Ok(vec![
        SummaryRow::from_record("final_N", last),
        SummaryRow::from_record("selected_S", selected),
        SummaryRow::from_record("min_mse", best),
    ])
}

/// Runs one configured experiment and writes
/// `<name>_trace.csv`, `<name>_summary.csv` and `<name>_summary.txt` into
/// the output directory. A solver abort still writes the partial trace.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let trace_path = dir.join(format!("{}_trace.csv", config.name));
    let built = build_problem(&config.problem)?;
    let problem = &built.problem;
    log::info!(
        "{}: {}x{} operator, SNR {:.2} dB, delta {:.6e}",
        config.name,
        built.operator.rows(),
        built.operator.cols(),
        built.snr_db,
        problem.delta()
    );

    let mut trace = match run_solver(problem, &config.denoiser.spec(), &config.solver) {
        Ok(t) => t,
        Err(Error::SolverAbort {
            iteration,
            report,
            partial,
        }) => {
            if !partial.is_empty() {
                emit_trace_csv(&partial, &trace_path)?;
            }
            return Err(Error::SolverAbort {
                iteration,
                report,
                partial,
            });
        }
        Err(e) => return Err(e),
    };
    if let Some(c) = config.corridor {
        trace.classify(&c);
    }
    emit_trace_csv(&trace, &trace_path)?;

    let summary = summarize(&trace, &stop_criterion(config, problem.delta())?)?;
    let summary_csv_path = dir.join(format!("{}_summary.csv", config.name));
    let summary_text_path = dir.join(format!("{}_summary.txt", config.name));
    std::fs::write(&summary_csv_path, summary_csv(&summary))
        .map_err(|e| Error::io(&summary_csv_path, e))?;
    std::fs::write(&summary_text_path, summary_text(config, &trace, &summary))
        .map_err(|e| Error::io(&summary_text_path, e))?;

    Ok(ExperimentResult {
        trace_csv_path: trace_path,
        summary_csv_path,
        summary_text_path,
        summary,
        family_label: trace.family_label,
        trace,
    })
}
