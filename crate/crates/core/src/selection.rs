//! Selection criteria, stopping rules, family classification of iteration
//! traces and semi-convergence detection.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_len, Error, Result};
use crate::ops::{norm, SparseOperator};
use crate::solvers::{IterationTrace, Problem};

pub const DEFAULT_ETA: f64 = 1.1;
pub const CORRIDOR_LOWER: f64 = 1.0;
pub const CORRIDOR_UPPER: f64 = 1.5;
pub const SEMICONVERGENCE_WINDOW: usize = 5;
pub const SEMICONVERGENCE_RISE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionKind {
    CrossValidation,
    DiscrepancyPrinciple,
}

impl CriterionKind {
    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::CrossValidation => "cross_validation",
            CriterionKind::DiscrepancyPrinciple => "discrepancy_principle",
        }
    }
}

impl FromStr for CriterionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cross_validation" | "cv" => Ok(CriterionKind::CrossValidation),
            "discrepancy_principle" | "dp" => Ok(CriterionKind::DiscrepancyPrinciple),
            _ => Err(format!("unknown criterion `{s}`")),
        }
    }
}

/// A stopping/selection rule. `eta` and `delta` only matter for the
/// discrepancy principle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionCriterion {
    pub kind: CriterionKind,
    pub eta: f64,
    pub delta: f64,
}

impl SelectionCriterion {
    pub fn cross_validation() -> Self {
        SelectionCriterion {
            kind: CriterionKind::CrossValidation,
            eta: DEFAULT_ETA,
            delta: 0.0,
        }
    }

    pub fn discrepancy_principle(eta: f64, delta: f64) -> Result<Self> {
        if !(eta > 1.0) {
            return Err(Error::invalid(format!("discrepancy principle needs eta > 1, got {eta}")));
        }
        if !(delta >= 0.0) {
            return Err(Error::invalid(format!("noise level must be >= 0, got {delta}")));
        }
        Ok(SelectionCriterion {
            kind: CriterionKind::DiscrepancyPrinciple,
            eta,
            delta,
        })
    }
}

/// `||Ax - b|| / ||b||` over the rows of `a`.
pub fn relative_residual(a: &SparseOperator, b: &[f64], x: &[f64]) -> Result<f64> {
    if a.rows() == 0 {
        return Err(Error::invalid("criterion evaluated on an empty row set"));
    }
    check_len("relative_residual: b", a.rows(), b.len())?;
    let bn = norm(b);
    if bn == 0.0 {
        return Err(Error::invalid("criterion data are identically zero"));
    }
    let ax = a.apply(x)?;
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
    Ok(r.sqrt() / bn)
}

/// Cross-validation error on the leave-out rows, or the relative
/// discrepancy on the fit rows.
pub fn evaluate_criterion(kind: CriterionKind, problem: &Problem, x: &[f64]) -> Result<f64> {
    match kind {
        CriterionKind::CrossValidation => {
            let (a, b) = problem
                .cv()
                .ok_or_else(|| Error::invalid("cross-validation needs leave-out rows"))?;
            relative_residual(a, b, x)
        }
        CriterionKind::DiscrepancyPrinciple => {
            relative_residual(problem.a_fit(), problem.b_fit(), x)
        }
    }
}

/// Index `k` (as recorded) of the selected iterate. Cross-validation picks
/// the smallest `cv_error` (earliest on ties); the discrepancy principle
/// picks the first `k` with `sqrt(D) <= eta * delta`, else the last.
pub fn select_stop(trace: &IterationTrace, criterion: &SelectionCriterion) -> Result<usize> {
    let last = trace
        .records
        .last()
        .ok_or_else(|| Error::invalid("cannot select from an empty trace"))?;
    Ok(match criterion.kind {
        CriterionKind::CrossValidation => {
            let mut best = &trace.records[0];
            for r in &trace.records[1..] {
                if r.cv_error < best.cv_error {
                    best = r;
                }
            }
            best.k
        }
        CriterionKind::DiscrepancyPrinciple => {
            let tol = criterion.eta * criterion.delta;
            trace
                .records
                .iter()
                .find(|r| r.discrepancy.sqrt() <= tol)
                .unwrap_or(last)
                .k
        }
    })
}

/// Two-sided bound `[eps1, eps2]` on the squared discrepancy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corridor {
    pub eps1: f64,
    pub eps2: f64,
}

impl Corridor {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        if !(eps1 >= 0.0 && eps2 >= eps1) {
            return Err(Error::invalid(format!("corridor needs 0 <= eps1 <= eps2, got [{eps1}, {eps2}]")));
        }
        Ok(Corridor { eps1, eps2 })
    }
}

/// `[(1.0 delta)^2, (1.5 delta)^2]`
pub fn default_corridor(delta: f64) -> Result<Corridor> {
    if !(delta >= 0.0) {
        return Err(Error::invalid(format!("noise level must be >= 0, got {delta}")));
    }
    Corridor::new((CORRIDOR_LOWER * delta).powi(2), (CORRIDOR_UPPER * delta).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Every step is a descent direction.
    I3,
    /// Descent while above the corridor; once inside, no step drops below it.
    I5,
    Unclassified,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::I3 => "I3",
            Family::I5 => "I5",
            Family::Unclassified => "unclassified",
        })
    }
}

/// Classifies a sequence of `(inner_product, discrepancy)` steps that
/// starts from discrepancy `initial`.
pub fn classify_steps(initial: f64, steps: &[(f64, f64)], corridor: &Corridor) -> Family {
    if steps.iter().all(|&(ip, _)| ip > 0.0) {
        return Family::I3;
    }
    let mut prev = initial;
    for &(ip, d) in steps {
        let ok = if prev > corridor.eps2 { ip > 0.0 } else { d >= corridor.eps1 };
        if !ok {
            return Family::Unclassified;
        }
        prev = d;
    }
    Family::I5
}

pub fn classify_family(trace: &IterationTrace, corridor: &Corridor) -> Family {
    let steps: Vec<(f64, f64)> = trace
        .records
        .iter()
        .map(|r| (r.inner_product, r.discrepancy))
        .collect();
    let family = classify_steps(trace.initial_discrepancy, &steps, corridor);
    if family == Family::Unclassified {
        log::warn!("trace fits neither I3 nor I5 for corridor [{}, {}]", corridor.eps1, corridor.eps2);
    }
    family
}

/// Centered moving average; the window shrinks at the ends.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let half = window.max(1) / 2;
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Smooths `values` and reports `(semi_convergent, argmin)`: the smoothed
/// minimum must be interior and the smoothed final value at least 5% above
/// it.
pub fn detect_semiconvergence(values: &[f64], window: usize) -> Result<(bool, usize)> {
    if values.len() < 3 {
        return Err(Error::invalid("semi-convergence needs at least three values"));
    }
    let s = moving_average(values, window);
    let mut argmin = 0;
    for (i, &v) in s.iter().enumerate() {
        if v < s[argmin] {
            argmin = i;
        }
    }
    let last = s.len() - 1;
    let min = s[argmin];
    let rising = s[last] - min >= SEMICONVERGENCE_RISE * min.abs();
    Ok((argmin < last && rising, argmin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{IterationRecord, SolverConfig};
    use proptest::prelude::*;

    fn trace_of(initial: f64, cv: &[f64], steps: &[(f64, f64)]) -> IterationTrace {
        let n = cv.len().max(steps.len());
        let records = (0..n)
            .map(|i| IterationRecord {
                cv_error: cv.get(i).copied().unwrap_or(0.0),
                inner_product: steps.get(i).map_or(1.0, |s| s.0),
                discrepancy: steps.get(i).map_or(1.0, |s| s.1),
                ..IterationRecord::blank(i + 1)
            })
            .collect();
        IterationTrace::new(records, SolverConfig::default(), initial)
    }

    #[test]
    fn criterion_ratios() {
        let a = SparseOperator::from_dense(
            5,
            2,
            &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 0.0, 0.0, 3.0],
        )
        .unwrap();
        let b = [1.0, 1.0, 1.0, 1.0, 1.0];
        assert_eq!(relative_residual(&a, &b, &[0.0, 0.0]).unwrap(), 1.0);
        // hand-assembled: Ax = (1, 2, 3, 2, 6), residual (0, 1, 2, 1, 5)
        let want = (0.0f64 + 1.0 + 4.0 + 1.0 + 25.0).sqrt() / 5.0f64.sqrt();
        assert!((relative_residual(&a, &b, &[1.0, 2.0]).unwrap() - want).abs() < 1e-15);
        let exact = a.apply(&[0.5, -1.0]).unwrap();
        assert_eq!(relative_residual(&a, &exact, &[0.5, -1.0]).unwrap(), 0.0);
        assert!(relative_residual(&SparseOperator::zero(0, 2), &[], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn cv_stop_is_argmin() {
        let down: Vec<f64> = (0..10).map(|i| 10.0 - i as f64).collect();
        assert_eq!(select_stop(&trace_of(1.0, &down, &[]), &SelectionCriterion::cross_validation()).unwrap(), 10);
        let v: Vec<f64> = (1..=100).map(|k| (k as f64 - 55.0).abs() + 1.0).collect();
        assert_eq!(select_stop(&trace_of(1.0, &v, &[]), &SelectionCriterion::cross_validation()).unwrap(), 55);
        let tie = [3.0, 1.0, 2.0, 1.0];
        assert_eq!(select_stop(&trace_of(1.0, &tie, &[]), &SelectionCriterion::cross_validation()).unwrap(), 2);
    }

    #[test]
    fn dp_stop() {
        let steps: Vec<(f64, f64)> = [16.0, 9.0, 4.0, 1.0].iter().map(|&d| (1.0, d)).collect();
        let t = trace_of(25.0, &[], &steps);
        let dp = |eta, delta| SelectionCriterion::discrepancy_principle(eta, delta).unwrap();
        assert_eq!(select_stop(&t, &dp(1.5, 2.0)).unwrap(), 2);
        assert_eq!(select_stop(&t, &dp(1.1, 0.0)).unwrap(), 4);
        assert!(SelectionCriterion::discrepancy_principle(1.0, 1.0).is_err());
    }

    #[test]
    fn corridor_defaults() {
        assert_eq!(default_corridor(0.0).unwrap(), Corridor { eps1: 0.0, eps2: 0.0 });
        assert_eq!(default_corridor(2.0).unwrap(), Corridor { eps1: 4.0, eps2: 9.0 });
        assert!(default_corridor(1e-8).unwrap().eps2 < 1e-15);
        assert!(Corridor::new(2.0, 1.0).is_err());
    }

    #[test]
    fn families() {
        let c = Corridor::new(4.0, 9.0).unwrap();
        let all_pos = [(0.1, 20.0), (0.3, 10.0), (1.0, 5.0)];
        assert_eq!(classify_steps(30.0, &all_pos, &c), Family::I3);
        // wrong-signed steps only once inside the corridor
        let inside = [(1.0, 12.0), (1.0, 8.0), (-1.0, 6.0), (-0.5, 7.0), (0.2, 5.0)];
        assert_eq!(classify_steps(30.0, &inside, &c), Family::I5);
        // overfit below eps1
        let below = [(1.0, 12.0), (1.0, 8.0), (-1.0, 3.0)];
        assert_eq!(classify_steps(30.0, &below, &c), Family::Unclassified);
        // wrong sign above the corridor
        let above = [(1.0, 12.0), (-1.0, 10.0)];
        assert_eq!(classify_steps(30.0, &above, &c), Family::Unclassified);
    }

    #[test]
    fn degenerate_corridor_reduces_to_descent() {
        let c = Corridor::new(0.0, 0.0).unwrap();
        assert_eq!(classify_steps(5.0, &[(1.0, 3.0), (2.0, 1.0)], &c), Family::I3);
        assert_eq!(classify_steps(5.0, &[(1.0, 3.0), (-2.0, 1.0)], &c), Family::Unclassified);
    }

    #[test]
    fn semiconvergence_examples() {
        let dec: Vec<f64> = (0..20).map(|i| 1.0 / (i + 1) as f64).collect();
        assert_eq!(detect_semiconvergence(&dec, 5).unwrap(), (false, 19));
        assert_eq!(detect_semiconvergence(&[3.0, 2.0, 1.0, 2.0, 3.0], 1).unwrap(), (true, 2));
        // a shallow rise under 5% is not enough
        assert!(!detect_semiconvergence(&[3.0, 2.0, 1.0, 1.01, 1.02], 1).unwrap().0);
        assert!(detect_semiconvergence(&[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn moving_average_shrinks_at_edges() {
        let s = moving_average(&[1.0, 2.0, 3.0, 4.0], 3);
        assert_eq!(s, vec![1.5, 2.0, 3.0, 3.5]);
    }

    proptest! {
        #[test]
        fn cv_stop_attains_the_minimum(cv in proptest::collection::vec(0.0f64..10.0, 1..60)) {
            let t = trace_of(1.0, &cv, &[]);
            let k = select_stop(&t, &SelectionCriterion::cross_validation()).unwrap();
            let chosen = t.records[k - 1].cv_error;
            prop_assert!(cv.iter().all(|&v| chosen <= v));
        }

        #[test]
        fn classification_is_scale_invariant(
            steps in proptest::collection::vec((-1.0f64..1.0, 0.0f64..20.0), 1..40),
            scale in 0.001f64..1000.0,
        ) {
            let c = Corridor::new(4.0, 9.0).unwrap();
            let scaled: Vec<(f64, f64)> = steps.iter().map(|&(ip, d)| (ip * scale, d)).collect();
            prop_assert_eq!(classify_steps(25.0, &steps, &c), classify_steps(25.0, &scaled, &c));
        }

        #[test]
        fn dp_index_nonincreasing_in_eta(
            d in proptest::collection::vec(0.0f64..100.0, 1..40),
            eta in 1.01f64..3.0,
            extra in 0.0f64..2.0,
            delta in 0.0f64..8.0,
        ) {
            let steps: Vec<(f64, f64)> = d.iter().map(|&v| (1.0, v)).collect();
            let t = trace_of(100.0, &[], &steps);
            let k1 = select_stop(&t, &SelectionCriterion::discrepancy_principle(eta, delta).unwrap()).unwrap();
            let k2 = select_stop(&t, &SelectionCriterion::discrepancy_principle(eta + extra, delta).unwrap()).unwrap();
            prop_assert!(k2 <= k1);
        }
    }
}
