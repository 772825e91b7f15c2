mod common;

use std::sync::Arc;

use agghb_core::harness::{
    export_trace, read_trace, reference_solution, run, tune, tune_with_jobs, verify_bounds, InitPoint, OptimizerKind,
    ProblemSpec, RegWeight, RunConfig, StepsizeSource,
};
use agghb_core::Error;
use proptest::prelude::*;

fn logreg_spec(l2: RegWeight) -> ProblemSpec {
    ProblemSpec::LogregL2 { data: "synthetic".into(), l2, n_features: None }
}

#[test]
fn exported_trace_verifies_after_reload() {
    let data = Arc::new(common::synthetic_australian());
    let spec = logreg_spec(RegWeight::BaseFraction(1e-5));
    let p = spec.build_with_dataset(data).unwrap();
    let reference = reference_solution(p.as_ref()).unwrap();
    assert!(reference.grad_norm <= 1e-10);
    let cfg = RunConfig::new(spec, OptimizerKind::Agghb, vec![0.9, 0.95, 0.99], StepsizeSource::TheoryConvex, 500);
    let trace = run(&cfg, p.as_ref(), Some(&reference)).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    export_trace(&trace, &path).unwrap();
    let back = read_trace(&path).unwrap();
    assert_eq!(back, trace);
    let report = verify_bounds(&back, None).unwrap();
    assert!(report.all_passed(), "{report:?}");
    assert_eq!(report.certificate, Some(reference.grad_norm));
}

#[test]
fn tuning_is_independent_of_thread_count() {
    let spec = ProblemSpec::Rosenbrock;
    let p = spec.build().unwrap();
    let base = RunConfig::new(spec, OptimizerKind::Agghb, vec![0.9, 0.99], StepsizeSource::Tuned { a: None }, 300);
    let a = tune(&base, p.as_ref()).unwrap();
    let b = tune_with_jobs(&base, p.as_ref(), Some(1)).unwrap();
    let c = tune_with_jobs(&base, p.as_ref(), Some(3)).unwrap();
    assert_eq!(a.table, b.table);
    assert_eq!(a.table, c.table);
    assert_eq!(a.best_a, c.best_a);
}

#[test]
fn nonconvex_theory_run_on_rosenbrock_reports_local_constant() {
    let spec = ProblemSpec::Rosenbrock;
    let p = spec.build().unwrap();
    let cfg = RunConfig::new(spec, OptimizerKind::Agghb, vec![0.9, 0.95], StepsizeSource::TheoryNonconvex, 2000);
    let trace = run(&cfg, p.as_ref(), None).unwrap();
    assert!(trace.meta.l_is_local);
    assert!(!trace.meta.diverged);
    let report = verify_bounds(&trace, None).unwrap();
    assert!(report.all_passed(), "{report:?}");
}

#[test]
fn convex_stepsize_on_nonconvex_problem_is_rejected() {
    let data = Arc::new(common::synthetic_australian());
    let spec = ProblemSpec::LogregNcvx { data: "synthetic".into(), lambda: RegWeight::BaseFraction(1e-3), n_features: None };
    let p = spec.build_with_dataset(data).unwrap();
    let cfg = RunConfig::new(spec, OptimizerKind::Hb, vec![0.9], StepsizeSource::TheoryConvex, 10);
    assert!(matches!(run(&cfg, p.as_ref(), None), Err(Error::NotConvex(_))));
    assert!(matches!(reference_solution(p.as_ref()), Err(Error::NotConvex(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prefix_property(
        betas in prop::collection::vec(0.0f64..0.99, 1..4),
        a in 0.01f64..1.0,
        k in 1usize..200,
        seed in 0u64..100,
    ) {
        let spec = ProblemSpec::quadratic_ladder(4);
        let p = spec.build().unwrap();
        let mut cfg = RunConfig::new(spec, OptimizerKind::Agghb, betas, StepsizeSource::Tuned { a: Some(a) }, k);
        cfg.init = InitPoint::Random { radius: 2.0 };
        cfg.seed = seed;
        cfg.track_average = true;
        let short = run(&cfg, p.as_ref(), None).unwrap();
        cfg.iterations = 2 * k;
        let long = run(&cfg, p.as_ref(), None).unwrap();
        prop_assert_eq!(short.rows.len(), k + 1);
        prop_assert_eq!(&long.rows[..=k], &short.rows[..]);
    }
}
