use std::fmt::Display;
use std::path::{Path, PathBuf};

use agghb_core::data::{read_libsvm_file, to_dataset, LabelPolicy};
use agghb_core::harness::{
    export_trace, metadata_path, read_trace, reference_solution, run, tune_with_jobs, verify_bounds, InitPoint,
    OptimizerKind, ProblemSpec, RegWeight, RunConfig, StepsizeSource, SweepRow, Trace,
};
use agghb_core::optim::validate_betas;
use agghb_core::theory::{
    check_convex_conditions, check_nonconvex_condition, constants, effective_betas, stepsize_convex,
    stepsize_nonconvex, Admissibility,
};
use agghb_core::{AggConfig, Error, Problem};

use crate::args::{
    ConstantsArgs, ExperimentArgs, GammaArg, InitArg, KindArg, ParseCheckArgs, ProblemArg, RunArgs, TuneArgs,
    VerifyArgs,
};

pub enum CliError {
    Usage(String),
    Core(Error),
    /// Verification ran (or was refused) and did not pass.
    Verification(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Collected `key=value` lines.
#[derive(Default)]
pub struct Report(Vec<String>);

impl Report {
    fn kv(&mut self, key: &str, value: impl Display) {
        self.0.push(format!("{key}={value}"));
    }

    fn line(&mut self, line: String) {
        self.0.push(line);
    }

    pub fn print(&self) {
        for l in &self.0 {
            println!("{l}");
        }
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn resolve_data(path: &Path) -> CliResult<PathBuf> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    if let Some(dir) = std::env::var_os("AGGHB_DATA_DIR") {
        let candidate = Path::new(&dir).join(path);
        if candidate.exists() {
            return Ok(candidate);
        }
    }
    Err(CliError::Usage(format!(
        "data file {} not found (also looked under AGGHB_DATA_DIR)",
        path.display()
    )))
}

fn problem_spec(exp: &ExperimentArgs) -> CliResult<ProblemSpec> {
    let p = &exp.problem;
    let is_logreg = matches!(p.problem, ProblemArg::LogregL2 | ProblemArg::LogregNcvx);
    let misplaced = |flag: &str| CliError::Usage(format!("--{flag} does not apply to this problem"));
    if !is_logreg && (p.data.is_some() || p.n_features.is_some()) {
        return Err(misplaced(if p.data.is_some() { "data" } else { "n-features" }));
    }
    if p.problem != ProblemArg::Quadratic && (p.dim.is_some() || p.diag.is_some()) {
        return Err(misplaced(if p.dim.is_some() { "dim" } else { "diag" }));
    }
    if p.problem != ProblemArg::LogregL2 && (p.l2.is_some() || p.l2_frac.is_some()) {
        return Err(misplaced("l2"));
    }
    if p.problem != ProblemArg::LogregNcvx && (p.lambda.is_some() || p.lambda_frac.is_some()) {
        return Err(misplaced("lambda"));
    }
    let data = || -> CliResult<PathBuf> {
        let path = p.data.as_ref().ok_or_else(|| CliError::Usage("--data is required for logistic regression".into()))?;
        resolve_data(path)
    };
    Ok(match p.problem {
        ProblemArg::Quadratic => match &p.diag {
            Some(diag) => ProblemSpec::Quadratic { diag: diag.0.clone(), b: vec![0.0; diag.0.len()] },
            None => ProblemSpec::quadratic_ladder(p.dim.unwrap_or(10)),
        },
        ProblemArg::Rosenbrock => ProblemSpec::Rosenbrock,
        ProblemArg::LogregL2 => {
            let l2 = match (p.l2, p.l2_frac) {
                (Some(w), _) => RegWeight::Absolute(w),
                (None, Some(frac)) => RegWeight::BaseFraction(frac),
                (None, None) => RegWeight::Absolute(0.0),
            };
            ProblemSpec::LogregL2 { data: data()?, l2, n_features: p.n_features }
        }
        ProblemArg::LogregNcvx => {
            let lambda = match (p.lambda, p.lambda_frac) {
                (Some(w), _) => RegWeight::Absolute(w),
                (None, frac) => RegWeight::BaseFraction(frac.unwrap_or(1e-3)),
            };
            ProblemSpec::LogregNcvx { data: data()?, lambda, n_features: p.n_features }
        }
    })
}

fn base_config(exp: &ExperimentArgs, stepsize: StepsizeSource) -> CliResult<RunConfig> {
    let spec = problem_spec(exp)?;
    let betas = match (&exp.betas, exp.kind) {
        (Some(b), _) => b.0.clone(),
        (None, Some(KindArg::Gd)) => vec![0.0],
        (None, _) => return Err(CliError::Usage("--betas is required".into())),
    };
    let kind = match exp.kind {
        Some(KindArg::Gd) => OptimizerKind::Gd,
        Some(KindArg::Hb) => OptimizerKind::Hb,
        Some(KindArg::Agghb) => OptimizerKind::Agghb,
        None if betas.len() == 1 => OptimizerKind::Hb,
        None => OptimizerKind::Agghb,
    };
    let mut cfg = RunConfig::new(spec, kind, betas, stepsize, exp.iters);
    cfg.init = match (exp.init, exp.init_radius) {
        (InitArg::Random, r) => InitPoint::Random { radius: r.unwrap_or(1.0) },
        (_, Some(_)) => return Err(CliError::Usage("--init-radius needs --init random".into())),
        (InitArg::Default, None) => InitPoint::Default,
        (InitArg::Zeros, None) => InitPoint::Zeros,
    };
    cfg.seed = exp.seed;
    cfg.track_average = exp.track_average;
    if exp.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be >= 1".into()));
    }
    Ok(cfg)
}

fn sweep_lines(report: &mut Report, table: &[SweepRow]) {
    for row in table {
        let f = row.final_f.map_or("diverged".to_string(), |f| f.to_string());
        report.line(format!("sweep a={} gamma={} final_f={f}", row.a, row.gamma));
    }
}

fn trace_summary(report: &mut Report, trace: &Trace) {
    let meta = &trace.meta;
    report.kv("problem", &meta.problem_name);
    report.kv("kind", format!("{:?}", meta.config.kind).to_lowercase());
    report.kv("betas", join(meta.agg.betas()));
    report.kv("gammas", join(meta.agg.gammas()));
    report.kv("iterations", meta.config.iterations);
    report.kv("L", meta.l);
    report.kv("L_local", meta.l_is_local);
    report.kv("mu", meta.mu);
    if let Some(last) = trace.rows.last() {
        report.kv("final_k", last.k);
        report.kv("final_f", last.f);
        report.kv("final_grad_norm", last.grad_norm);
        if let Some(fa) = last.f_avg {
            report.kv("final_f_avg", fa);
        }
    }
    if let Some(r) = &meta.reference {
        report.kv("f_ref", r.f);
        report.kv("f_ref_certificate", r.grad_norm);
    }
    report.kv("diverged", meta.diverged);
}

pub fn cmd_run(args: &RunArgs, report: &mut Report) -> CliResult {
    let stepsize = match &args.gammas {
        GammaArg::List(g) => StepsizeSource::Explicit { gammas: g.clone() },
        GammaArg::TheoryNcvx => StepsizeSource::TheoryNonconvex,
        GammaArg::TheoryCvx => StepsizeSource::TheoryConvex,
        GammaArg::Tune => StepsizeSource::Tuned { a: None },
    };
    let mut cfg = base_config(&args.experiment, stepsize)?;
    let problem = cfg.problem.build()?;
    if args.gammas == GammaArg::Tune {
        let tuned = tune_with_jobs(&cfg, problem.as_ref(), args.experiment.jobs)?;
        sweep_lines(report, &tuned.table);
        report.kv("best_a", tuned.best_a);
        cfg = tuned.best;
    }
    let reference = if args.gammas == GammaArg::TheoryCvx {
        Some(reference_solution(problem.as_ref())?)
    } else {
        None
    };
    let trace = run(&cfg, problem.as_ref(), reference.as_ref())?;
    export_trace(&trace, &args.out)?;
    trace_summary(report, &trace);
    report.kv("trace", args.out.display());
    report.kv("metadata", metadata_path(&args.out).display());
    Ok(())
}

pub fn cmd_tune(args: &TuneArgs, report: &mut Report) -> CliResult {
    let cfg = base_config(&args.experiment, StepsizeSource::Tuned { a: None })?;
    let problem: std::sync::Arc<dyn Problem> = cfg.problem.build()?;
    let out = match tune_with_jobs(&cfg, problem.as_ref(), args.experiment.jobs) {
        Err(Error::AllDiverged { table }) => {
            sweep_lines(report, &table);
            return Err(Error::AllDiverged { table }.into());
        }
        other => other?,
    };
    report.kv("problem", problem.name());
    report.kv("L", problem.smoothness());
    report.kv("iterations", cfg.iterations);
    sweep_lines(report, &out.table);
    report.kv("best_a", out.best_a);
    report.kv("best_gamma", out.best_a / problem.smoothness());
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs, report: &mut Report) -> CliResult {
    let trace = read_trace(&args.trace)?;
    let out = match verify_bounds(&trace, None) {
        Err(Error::VerificationRefused(msg)) => return Err(CliError::Verification(msg)),
        other => other?,
    };
    report.kv("kind", format!("{:?}", out.kind).to_lowercase());
    if let Some(c) = &out.conditions {
        report.kv("conditions", if c.passed { "PASS" } else { "FAIL" });
    }
    if let Some(cert) = out.certificate {
        report.kv("certificate", cert);
        report.kv("slack", out.slack);
    }
    for c in &out.checkpoints {
        report.line(format!(
            "checkpoint k={} observed={} bound={} status={}",
            c.k,
            c.observed,
            c.bound,
            if c.passed { "PASS" } else { "FAIL" }
        ));
    }
    report.kv("diverged", out.diverged);
    report.kv("failures", out.failures());
    if out.all_passed() {
        report.kv("result", "PASS");
        Ok(())
    } else {
        report.kv("result", "FAIL");
        Err(CliError::Verification(format!("{} failing checks", out.failures())))
    }
}

fn status_name(s: Admissibility) -> &'static str {
    match s {
        Admissibility::Admissible => "admissible",
        Admissibility::Inadmissible => "inadmissible",
        Admissibility::Vacuous => "vacuous",
    }
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn constants_block(report: &mut Report, prefix: &str, cfg: &AggConfig, args: &ConstantsArgs) -> CliResult {
    let c = constants(cfg, args.horizon);
    report.kv(&format!("{prefix}.gammas"), join(cfg.gammas()));
    for (name, v) in [("A", c.a), ("B", c.b), ("C", c.c), ("D", c.d), ("E", c.e), ("F", c.f)] {
        report.kv(&format!("{prefix}.{name}"), v);
    }
    let ncvx = check_nonconvex_condition(&c, args.l, cfg.m());
    report.kv(&format!("{prefix}.ncvx_margin"), ncvx.margin);
    report.kv(&format!("{prefix}.ncvx_status"), status_name(ncvx.status));
    let cvx = check_convex_conditions(cfg, args.l, args.mu, args.horizon)?;
    if let Some(ms) = &cvx.gamma_margins {
        report.kv(&format!("{prefix}.cvx_gamma_margins"), join(ms));
    }
    report.kv(&format!("{prefix}.cvx_f_margin"), cvx.f_margin);
    report.kv(&format!("{prefix}.cvx_f_check"), pass_fail(cvx.f_margin >= 0.0));
    report.kv(&format!("{prefix}.cvx_bf_margin"), cvx.bf_margin);
    report.kv(&format!("{prefix}.cvx_conditions"), pass_fail(cvx.passed));
    Ok(())
}

pub fn cmd_constants(args: &ConstantsArgs, report: &mut Report) -> CliResult {
    let betas = &args.betas.0;
    validate_betas(betas)?;
    let eb = effective_betas(betas)?;
    let gamma_ncvx = stepsize_nonconvex(betas, args.l)?;
    let gamma_cvx = stepsize_convex(betas, args.l, args.mu)?;
    report.kv("m", betas.len());
    report.kv("betas", join(betas));
    report.kv("L", args.l);
    report.kv("mu", args.mu);
    report.kv("horizon", args.horizon.map_or("none".to_string(), |k| k.to_string()));
    report.kv("beta_tilde", eb.beta_tilde);
    report.kv("beta_hat", eb.beta_hat);
    report.kv("beta_max", eb.beta_max);
    report.kv("gamma_ncvx", gamma_ncvx);
    report.kv("gamma_cvx", gamma_cvx);
    match &args.gammas {
        Some(g) => {
            let cfg = match g.0.as_slice() {
                [single] => AggConfig::uniform(betas.clone(), *single)?,
                many => AggConfig::new(betas.clone(), many.to_vec())?,
            };
            constants_block(report, "given", &cfg, args)?;
        }
        None => {
            constants_block(report, "theory_ncvx", &AggConfig::uniform(betas.clone(), gamma_ncvx)?, args)?;
            constants_block(report, "theory_cvx", &AggConfig::uniform(betas.clone(), gamma_cvx)?, args)?;
        }
    }
    Ok(())
}

pub fn cmd_parse_check(args: &ParseCheckArgs, report: &mut Report) -> CliResult {
    let parsed = read_libsvm_file(&args.path)?;
    let nnz: usize = parsed.records.iter().map(|r| r.entries.len()).sum();
    let mut labels: Vec<f64> = parsed.records.iter().map(|r| r.label).collect();
    labels.sort_by(f64::total_cmp);
    labels.dedup();
    report.kv("path", args.path.display());
    report.kv("records", parsed.records.len());
    report.kv("features", args.n_features.unwrap_or(parsed.n).max(parsed.n));
    report.kv("nnz", nnz);
    report.kv("reordered_lines", parsed.reordered_lines);
    report.kv("labels", join(&labels));
    let binary = to_dataset(&parsed, LabelPolicy::Auto, args.n_features).is_ok();
    report.kv("binary_labels", binary);
    Ok(())
}
