use std::time::Instant;

use super::{OptimizerKind, ReferenceSolution, RunConfig, StepsizeSource, Trace, TraceMeta, TraceRow};
use crate::error::{Error, Result};
use crate::linalg::{dist, norm};
use crate::optim::{AggConfig, AggregatedHeavyBall, AveragingState, Optimizer};
use crate::problems::Problem;
use crate::theory::{constants, effective_betas, stepsize_convex, stepsize_nonconvex};

/// One optimizer transition, handed to the observer of [`run_observed`].
pub struct StepEvent<'a> {
    pub k: usize,
    pub before: &'a AggregatedHeavyBall,
    pub grad: &'a [f64],
    pub after: &'a AggregatedHeavyBall,
}

fn check_kind(config: &RunConfig) -> Result<()> {
    if config.betas.is_empty() {
        return Err(Error::InvalidConfig("no momentum parameters given".into()));
    }
    match config.kind {
        OptimizerKind::Gd if config.betas.iter().any(|b| *b != 0.0) => {
            Err(Error::InvalidConfig("gradient descent takes zero momentum".into()))
        }
        OptimizerKind::Hb if config.betas.len() != 1 => {
            Err(Error::InvalidConfig(format!("heavy-ball takes one momentum parameter, got {}", config.betas.len())))
        }
        _ => Ok(()),
    }
}

/// Turns the stepsize source of `config` into a concrete [`AggConfig`].
pub fn resolve_config(config: &RunConfig, problem: &dyn Problem) -> Result<AggConfig> {
    check_kind(config)?;
    let betas = config.betas.clone();
    let l = problem.smoothness();
    match &config.stepsize {
        StepsizeSource::Explicit { gammas } => match gammas.as_slice() {
            [g] => AggConfig::uniform(betas, *g),
            gs => AggConfig::new(betas, gs.to_vec()),
        },
        StepsizeSource::TheoryNonconvex => AggConfig::uniform(betas.clone(), stepsize_nonconvex(&betas, l)?),
        StepsizeSource::TheoryConvex => {
            if !problem.is_convex() {
                return Err(Error::NotConvex(format!("{} has no convex stepsize", problem.name())));
            }
            let gamma = stepsize_convex(&betas, l, problem.strong_convexity())?;
            AggConfig::uniform(betas, gamma)
        }
        StepsizeSource::Tuned { a: Some(a) } => AggConfig::uniform(betas, a / l),
        StepsizeSource::Tuned { a: None } => {
            Err(Error::InvalidConfig("tuned stepsize requested but no multiplier chosen yet; run tune first".into()))
        }
    }
}

/// Runs `config.iterations` steps, recording metrics at `k = 0..=K`.
///
/// Divergence truncates the trace and sets `meta.diverged`; it is not an
/// error.
pub fn run(config: &RunConfig, problem: &dyn Problem, reference: Option<&ReferenceSolution>) -> Result<Trace> {
    run_inner(config, problem, reference, None)
}

/// [`run`] with a callback invoked after every optimizer step.
pub fn run_observed(
    config: &RunConfig,
    problem: &dyn Problem,
    reference: Option<&ReferenceSolution>,
    observer: &mut dyn FnMut(&StepEvent<'_>),
) -> Result<Trace> {
    run_inner(config, problem, reference, Some(observer))
}

fn run_inner(
    config: &RunConfig,
    problem: &dyn Problem,
    reference: Option<&ReferenceSolution>,
    mut observer: Option<&mut dyn FnMut(&StepEvent<'_>)>,
) -> Result<Trace> {
    if config.iterations == 0 {
        return Err(Error::InvalidConfig("iteration budget must be >= 1".into()));
    }
    let started = Instant::now();
    let agg = resolve_config(config, problem)?;
    let dim = problem.dim();
    let x0 = config.init.resolve(&config.problem, dim, config.seed)?;
    let consts = constants(&agg, Some(config.iterations));
    let mut averaging = match (&config.stepsize, config.averaging()) {
        (StepsizeSource::TheoryConvex, _) => {
            Some(AveragingState::for_strong_convexity(problem.strong_convexity(), consts.f)?)
        }
        (_, true) => Some(AveragingState::new(1.0)?),
        (_, false) => None,
    };
    let opt_point = match reference {
        Some(r) => Some(r.x.clone()),
        None => problem.reference_opt().map(|(x, _)| x),
    };

    let mut state = AggregatedHeavyBall::new(agg.clone(), x0.clone())?;
    let mut rows = Vec::with_capacity(config.iterations + 1);
    let mut diverged = false;
    for k in 0..=config.iterations {
        let x = state.x();
        let f = problem.value(x);
        let grad = problem.gradient(x);
        let grad_norm = norm(&grad);
        if !f.is_finite() || !grad_norm.is_finite() {
            diverged = true;
            break;
        }
        let f_avg = match averaging.as_mut() {
            Some(avg) => {
                avg.update(x)?;
                let fa = problem.value(avg.average().unwrap_or(x));
                if !fa.is_finite() {
                    diverged = true;
                    break;
                }
                Some(fa)
            }
            None => None,
        };
        let dist_opt = opt_point.as_ref().map(|p| dist(x, p));
        rows.push(TraceRow { k, f, grad_norm, dist_opt, f_avg });
        if k == config.iterations {
            break;
        }
        let before = observer.is_some().then(|| state.clone());
        match state.step(&grad) {
            Ok(()) => {}
            Err(Error::Diverged { .. }) => {
                diverged = true;
                break;
            }
            Err(e) => return Err(e),
        }
        if let (Some(obs), Some(before)) = (observer.as_mut(), before.as_ref()) {
            obs(&StepEvent { k, before, grad: &grad, after: &state });
        }
    }

    let meta = TraceMeta {
        config: config.clone(),
        problem_name: problem.name().to_string(),
        effective_betas: effective_betas(agg.betas())?,
        agg,
        l: problem.smoothness(),
        l_is_local: problem.smoothness_is_local(),
        mu: problem.strong_convexity(),
        x0,
        f_lower: problem.lower_bound(),
        reference: reference.cloned(),
        constants: consts,
        diverged,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    Ok(Trace { rows, meta })
}
