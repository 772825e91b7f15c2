use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run, RunConfig, StepsizeSource};
use crate::error::{Error, Result};
use crate::problems::Problem;

/// Final values within this relative distance of the best one count as a
/// tie, so rounding noise in fully converged runs does not decide the pick.
pub const TIE_RTOL: f64 = 1e-12;

/// Multipliers `a ∈ {2⁻⁶, 2⁻⁵, …, 2⁸}` for `γ = a / L`.
pub fn tuning_grid() -> Vec<f64> {
    (-6..=8).map(|e| 2f64.powi(e)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    pub gamma: f64,
    /// `f(x_K)`; `None` when the run diverged.
    pub final_f: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TuneOutcome {
    pub best_a: f64,
    /// `base` with the stepsize source set to the chosen multiplier.
    pub best: RunConfig,
    pub table: Vec<SweepRow>,
}

/// Runs every grid point and keeps the lowest final objective among
/// non-diverged runs; ties (see [`TIE_RTOL`]) go to the smaller multiplier.
pub fn tune(base: &RunConfig, problem: &dyn Problem) -> Result<TuneOutcome> {
    tune_with_jobs(base, problem, None)
}

/// [`tune`] on a dedicated pool of `jobs` threads (`None`: rayon default).
/// Results are merged in grid order, independent of scheduling.
pub fn tune_with_jobs(base: &RunConfig, problem: &dyn Problem, jobs: Option<usize>) -> Result<TuneOutcome> {
    let l = problem.smoothness();
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::InvalidConfig(format!("cannot tune with L = {l}")));
    }
    let grid = tuning_grid();
    let sweep = || -> Result<Vec<SweepRow>> {
        grid.par_iter()
            .map(|&a| {
                let mut cfg = base.clone();
                cfg.stepsize = StepsizeSource::Tuned { a: Some(a) };
                let trace = run(&cfg, problem, None)?;
                let final_f = trace.final_f().filter(|f| !trace.meta.diverged && f.is_finite());
                Ok(SweepRow { a, gamma: a / l, final_f })
            })
            .collect()
    };
    let table = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(sweep)?,
        None => sweep()?,
    };

    let Some(f_min) = table.iter().filter_map(|r| r.final_f).reduce(f64::min) else {
        return Err(Error::AllDiverged { table });
    };
    let tol = TIE_RTOL * f_min.abs();
    let best_a = table
        .iter()
        .find(|r| r.final_f.is_some_and(|f| f <= f_min + tol))
        .map(|r| r.a)
        .unwrap_or(f64::NAN);
    let mut best = base.clone();
    best.stepsize = StepsizeSource::Tuned { a: Some(best_a) };
    Ok(TuneOutcome { best_a, best, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{OptimizerKind, ProblemSpec};
    use crate::problems::Problem;

    #[test]
    fn grid_has_fifteen_powers_of_two() {
        let g = tuning_grid();
        assert_eq!(g.len(), 15);
        assert_eq!(g[0], 1.0 / 64.0);
        assert_eq!(g[14], 256.0);
        assert!(g.windows(2).all(|w| w[1] == 2.0 * w[0]));
    }

    #[test]
    fn gd_on_identity_picks_unit_multiplier() {
        let spec = ProblemSpec::Quadratic { diag: vec![1.0, 1.0], b: vec![0.0, 0.0] };
        let p = spec.build().unwrap();
        let base = RunConfig::new(spec, OptimizerKind::Gd, vec![0.0], StepsizeSource::Tuned { a: None }, 200);
        let out = tune(&base, p.as_ref()).unwrap();
        assert_eq!(out.best_a, 1.0);
        assert_eq!(out.best.stepsize, StepsizeSource::Tuned { a: Some(1.0) });
        assert_eq!(out.table.len(), 15);
        // a >= 4 overshoots without bound
        assert!(out.table.iter().any(|r| r.final_f.is_none()));
        let serial = tune_with_jobs(&base, p.as_ref(), Some(1)).unwrap();
        assert_eq!(serial.table, out.table);
    }

    /// Objective that is flat, so every multiplier ties.
    struct Flat;

    impl Problem for Flat {
        fn name(&self) -> &str {
            "flat"
        }
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, _x: &[f64]) -> f64 {
            1.0
        }
        fn gradient(&self, _x: &[f64]) -> Vec<f64> {
            vec![0.0]
        }
        fn smoothness(&self) -> f64 {
            1.0
        }
        fn is_convex(&self) -> bool {
            true
        }
    }

    #[test]
    fn ties_prefer_smaller_multiplier() {
        let base = RunConfig::new(ProblemSpec::quadratic_ladder(1), OptimizerKind::Hb, vec![0.5], StepsizeSource::Tuned { a: None }, 5);
        let out = tune(&base, &Flat).unwrap();
        assert_eq!(out.best_a, tuning_grid()[0]);
    }

    #[test]
    fn rounding_level_differences_are_ties() {
        let spec = ProblemSpec::Quadratic { diag: vec![1.0, 2.0], b: vec![1.0, 1.0] };
        let p = spec.build().unwrap();
        let base = RunConfig::new(spec, OptimizerKind::Gd, vec![0.0], StepsizeSource::Tuned { a: None }, 300);
        let out = tune(&base, p.as_ref()).unwrap();
        let finals: Vec<f64> = out.table.iter().filter_map(|r| r.final_f).collect();
        let f_min = finals.iter().cloned().fold(f64::INFINITY, f64::min);
        let strict_argmin = out.table.iter().find(|r| r.final_f == Some(f_min)).unwrap().a;
        // several multipliers converge to f* = -0.75 up to rounding
        assert!(out.best_a < strict_argmin, "{:?}", out.table);
        for r in &out.table {
            let tied = r.final_f.is_some_and(|f| f <= f_min + TIE_RTOL * f_min.abs());
            assert_eq!(tied && r.a < out.best_a, false);
        }
    }

    #[test]
    fn all_diverged_reports_table() {
        let spec = ProblemSpec::Quadratic { diag: vec![1e300], b: vec![0.0] };
        let p = spec.build().unwrap();
        let mut base = RunConfig::new(spec, OptimizerKind::Gd, vec![0.0], StepsizeSource::Tuned { a: None }, 5);
        base.init = crate::harness::InitPoint::Point(vec![1e10]);
        match tune(&base, p.as_ref()) {
            Err(Error::AllDiverged { table }) => assert_eq!(table.len(), 15),
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
