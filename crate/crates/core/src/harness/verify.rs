use serde::{Deserialize, Serialize};

use super::{ReferenceSolution, StepsizeSource, Trace};
use crate::error::{Error, Result};
use crate::linalg::dist_sq;
use crate::theory::{bound_convex, bound_nonconvex, check_convex_conditions, BoundInputs, ConvexVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `min_{k=1..K} ‖∇f(x_k)‖²` against the non-convex bound.
    Nonconvex,
    /// `f(x̄_K) - f(x_*)` against `4R0²/(FK)`.
    Convex,
    /// `f(x̄_K) - f(x_*)` against `(1 - μF/2)^K 4R0²/F`.
    StronglyConvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub k: usize,
    pub observed: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: BoundKind,
    pub checkpoints: Vec<Checkpoint>,
    /// Gradient norm at the reference point (convex checks only).
    pub certificate: Option<f64>,
    /// Slack added to each convex bound to absorb the reference error.
    pub slack: f64,
    pub conditions: Option<ConvexVerdict>,
    pub diverged: bool,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        !self.diverged && self.checkpoints.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checkpoints.iter().filter(|c| !c.passed).count() + usize::from(self.diverged)
    }
}

/// Prefix lengths `10, 100, …` up to `budget`, plus `budget` itself.
pub fn checkpoints(budget: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = 10usize;
    while k < budget {
        out.push(k);
        k = k.saturating_mul(10);
    }
    if budget >= 1 {
        out.push(budget);
    }
    out
}

/// Checks a trace produced with a theoretical stepsize against the bound it
/// was run for. The reference optimum for convex checks comes from
/// `reference` or, failing that, from the trace metadata.
pub fn verify_bounds(trace: &Trace, reference: Option<&ReferenceSolution>) -> Result<VerificationReport> {
    let meta = &trace.meta;
    let budget = meta.config.iterations;
    match meta.config.stepsize {
        StepsizeSource::TheoryNonconvex => verify_nonconvex(trace, budget),
        StepsizeSource::TheoryConvex => {
            let reference = reference.or(meta.reference.as_ref()).ok_or_else(|| {
                Error::MissingReference(
                    "convex verification needs f(x_*); compute it with reference_solution and attach it to the run"
                        .into(),
                )
            })?;
            verify_convex(trace, budget, reference)
        }
        ref other => Err(Error::VerificationRefused(format!(
            "bounds are only guaranteed for theoretical stepsizes, this trace used {}",
            match other {
                StepsizeSource::Explicit { .. } => "explicit stepsizes",
                _ => "a tuned stepsize",
            }
        ))),
    }
}

fn verify_nonconvex(trace: &Trace, budget: usize) -> Result<VerificationReport> {
    let meta = &trace.meta;
    let f_lower = meta
        .f_lower
        .ok_or_else(|| Error::MissingReference("non-convex verification needs a lower bound f_inf".into()))?;
    let f0 = trace.rows.first().map(|r| r.f).ok_or_else(|| Error::InvalidConfig("empty trace".into()))?;
    let inputs = BoundInputs::new(meta.l, meta.mu, (f0 - f_lower).max(0.0), 0.0)?;
    let m = meta.agg.m();

    // running min over k = 1..K of ‖∇f(x_k)‖²
    let mut mins = Vec::with_capacity(trace.rows.len());
    let mut best = f64::INFINITY;
    for row in &trace.rows {
        if row.k >= 1 {
            best = best.min(row.grad_norm * row.grad_norm);
        }
        mins.push(best);
    }
    let mut out = Vec::new();
    for k in checkpoints(budget) {
        let bound = bound_nonconvex(k, &inputs, &meta.constants, m)?;
        let (observed, passed) = match mins.get(k) {
            Some(&obs) => (obs, obs <= bound),
            None => (f64::NAN, false),
        };
        out.push(Checkpoint { k, observed, bound, passed });
    }
    Ok(VerificationReport {
        kind: BoundKind::Nonconvex,
        checkpoints: out,
        certificate: None,
        slack: 0.0,
        conditions: None,
        diverged: meta.diverged,
    })
}

fn verify_convex(trace: &Trace, budget: usize, reference: &ReferenceSolution) -> Result<VerificationReport> {
    let meta = &trace.meta;
    let r0_sq = dist_sq(&meta.x0, &reference.x);
    let inputs = BoundInputs::new(meta.l, meta.mu, 0.0, r0_sq)?;
    let conditions = check_convex_conditions(&meta.agg, meta.l, meta.mu, Some(budget))?;
    let kind = if meta.mu > 0.0 { BoundKind::StronglyConvex } else { BoundKind::Convex };
    let slack = 2.0 * reference.grad_norm;
    let mut out = Vec::new();
    for k in checkpoints(budget) {
        let bound = bound_convex(k, &inputs, meta.constants.f)?;
        let (observed, passed) = match trace.rows.get(k).and_then(|r| r.f_avg) {
            Some(fa) => {
                let gap = fa - reference.f;
                (gap, conditions.passed && gap <= bound + slack)
            }
            None => (f64::NAN, false),
        };
        out.push(Checkpoint { k, observed, bound, passed });
    }
    Ok(VerificationReport {
        kind,
        checkpoints: out,
        certificate: Some(reference.grad_norm),
        slack,
        conditions: Some(conditions),
        diverged: meta.diverged,
    })
}
