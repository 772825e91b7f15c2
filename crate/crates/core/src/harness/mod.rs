//! Experiment driver: runs optimizers on problems, tunes stepsizes, checks
//! traces against the convergence bounds and exports them.

mod export;
mod reference;
mod run;
mod spec;
mod tune;
mod verify;

use serde::{Deserialize, Serialize};

use crate::optim::AggConfig;
use crate::theory::{EffectiveBetas, TheoryConstants};

pub use export::{export_trace, metadata_path, read_trace, CSV_HEADER};
pub use reference::{reference_solution, ReferenceSolution, REFERENCE_GRAD_TOL, REFERENCE_MAX_ITERS};
pub use run::{resolve_config, run, run_observed, StepEvent};
pub use spec::{InitPoint, ProblemSpec, RegWeight};
pub use tune::{tune, TIE_RTOL, tune_with_jobs, tuning_grid, SweepRow, TuneOutcome};
pub use verify::{checkpoints, verify_bounds, BoundKind, Checkpoint, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Gd,
    Hb,
    Agghb,
}

/// Where the stepsizes of a run come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "source")]
pub enum StepsizeSource {
    /// One stepsize per buffer, or a single value broadcast to all buffers.
    Explicit { gammas: Vec<f64> },
    /// Uniform stepsize for the non-convex guarantee.
    TheoryNonconvex,
    /// Uniform stepsize for the convex / strongly convex guarantee.
    TheoryConvex,
    /// `γ = a / L` on the tuning grid; `a = None` until [`tune`] has run.
    Tuned { a: Option<f64> },
}

impl StepsizeSource {
    pub fn is_theoretical(&self) -> bool {
        matches!(self, Self::TheoryNonconvex | Self::TheoryConvex)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub kind: OptimizerKind,
    pub betas: Vec<f64>,
    pub stepsize: StepsizeSource,
    /// Iteration budget `K`.
    pub iterations: usize,
    pub init: InitPoint,
    pub seed: u64,
    /// Maintain an iterate average and record `f(x̄_k)`. Always on for
    /// [`StepsizeSource::TheoryConvex`], which uses the weights of the convex
    /// guarantee; other sources average uniformly.
    pub track_average: bool,
}

impl RunConfig {
    pub fn new(problem: ProblemSpec, kind: OptimizerKind, betas: Vec<f64>, stepsize: StepsizeSource, iterations: usize) -> Self {
        Self { problem, kind, betas, stepsize, iterations, init: InitPoint::Default, seed: 0, track_average: false }
    }

    pub fn averaging(&self) -> bool {
        self.track_average || matches!(self.stepsize, StepsizeSource::TheoryConvex)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub dist_opt: Option<f64>,
    pub f_avg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub config: RunConfig,
    pub problem_name: String,
    /// Stepsize configuration actually used.
    pub agg: AggConfig,
    pub l: f64,
    pub l_is_local: bool,
    pub mu: f64,
    pub x0: Vec<f64>,
    pub f_lower: Option<f64>,
    pub reference: Option<ReferenceSolution>,
    pub constants: TheoryConstants,
    pub effective_betas: EffectiveBetas,
    pub diverged: bool,
    pub wall_time_secs: f64,
}

/// Per-iteration metrics `k = 0..=K` plus run metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    pub meta: TraceMeta,
}

impl Trace {
    pub fn final_f(&self) -> Option<f64> {
        self.rows.last().map(|r| r.f)
    }

    /// First `k` with `f(x_k) <= target`.
    pub fn first_hit(&self, target: f64) -> Option<usize> {
        self.rows.iter().find(|r| r.f <= target).map(|r| r.k)
    }
}
