use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, norm};
use crate::problems::Problem;

pub const REFERENCE_GRAD_TOL: f64 = 1e-10;
pub const REFERENCE_MAX_ITERS: usize = 1_000_000;

/// Approximate minimizer of a convex problem. `grad_norm` is the gradient
/// norm at `x` and serves as the accuracy certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub closed_form: bool,
}

/// Closed form when the problem provides one, otherwise gradient descent
/// with `γ = 1/L` from the origin until `‖∇f‖ <= 1e-10` or 10⁶ iterations.
pub fn reference_solution(problem: &dyn Problem) -> Result<ReferenceSolution> {
    if !problem.is_convex() {
        return Err(Error::NotConvex(format!(
            "{} is not convex; use its known optimum if it has one",
            problem.name()
        )));
    }
    if let Some((x, f)) = problem.reference_opt() {
        let grad_norm = norm(&problem.gradient(&x));
        return Ok(ReferenceSolution { x, f, grad_norm, iterations: 0, closed_form: true });
    }
    let step = 1.0 / problem.smoothness();
    let mut x = vec![0.0; problem.dim()];
    let mut grad = problem.gradient(&x);
    let mut iterations = 0;
    while norm(&grad) > REFERENCE_GRAD_TOL && iterations < REFERENCE_MAX_ITERS {
        axpy(-step, &grad, &mut x);
        grad = problem.gradient(&x);
        iterations += 1;
    }
    let grad_norm = norm(&grad);
    if !grad_norm.is_finite() {
        return Err(Error::Diverged { step: iterations, last_x: x });
    }
    Ok(ReferenceSolution { f: problem.value(&x), x, grad_norm, iterations, closed_form: false })
}
