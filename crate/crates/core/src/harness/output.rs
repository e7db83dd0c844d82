use std::fmt::Write as _;
use std::path::Path;

use super::{ExperimentConfig, SummaryRow};
use crate::error::{Error, Result};
use crate::solvers::IterationTrace;
use crate::tomography::io::fmt_f64;

pub const TRACE_HEADER: &str =
    "k,mse,psnr,ssim,d_err,s_err,inner_product,grad_step_norm,denoise_change,alpha,discrepancy";

/// One row per iteration, floats to 17 significant digits, LF endings.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut s = String::with_capacity(256 * (trace.len() + 1));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in &trace.records {
        let _ = write!(s, "{}", r.k);
        for v in [
            r.mse,
            r.psnr,
            r.ssim,
            r.d_err,
            r.cv_error,
            r.inner_product,
            r.grad_step_norm,
            r.denoise_change,
            r.alpha_used,
            r.discrepancy,
        ] {
            s.push(',');
            s.push_str(&fmt_f64(v));
        }
        s.push('\n');
    }
    s
}

pub fn emit_trace_csv(trace: &IterationTrace, path: &Path) -> Result<()> {
    if trace.is_empty() {
        return Err(Error::invalid("refusing to write an empty trace"));
    }
    std::fs::write(path, trace_csv(trace)).map_err(|e| Error::io(path, e))
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from("label,k,mse,d_err,s_err,psnr,ssim\n");
    for r in rows {
        let m = &r.metrics;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.label,
            r.k,
            fmt_f64(m.mse),
            fmt_f64(m.d_err),
            fmt_f64(m.s_err),
            fmt_f64(m.psnr),
            fmt_f64(m.ssim)
        );
    }
    s
}

pub fn summary_text(config: &ExperimentConfig, trace: &IterationTrace, rows: &[SummaryRow]) -> String {
    let mut s = String::new();
    let d = &config.denoiser;
    let _ = writeln!(s, "experiment  {}", config.name);
    let _ = writeln!(
        s,
        "algorithm   {} ({} iterations, attenuation {})",
        config.solver.algorithm.name(),
        config.solver.max_iters,
        config.solver.attenuation.name()
    );
    let _ = writeln!(s, "denoiser    {} sigma={} wrap={}", d.kind, d.sigma, d.rescale_wrap);
    let _ = writeln!(s, "family      {}", trace.family_label);
    s.push('\n');
    let _ = writeln!(
        s,
        "{:<12}{:>6}{:>10}{:>10}{:>10}{:>9}{:>9}",
        "label", "iter", "MSE", "D-err", "S-err", "PSNR", "SSIM"
    );
    for r in rows {
        let m = &r.metrics;
        let _ = writeln!(
            s,
            "{:<12}{:>6}{:>10.4}{:>10.4}{:>10.4}{:>9.2}{:>9.4}",
            r.label, r.k, m.mse, m.d_err, m.s_err, m.psnr, m.ssim
        );
    }
    s
}
