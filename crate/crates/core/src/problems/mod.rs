//! Objectives with analytic gradients and their smoothness / convexity
//! constants.

mod dataset;
mod logreg;
mod quadratic;
mod rosenbrock;
mod spectral;

pub use dataset::{CsrMatrix, Dataset, DenseMatrix, FeatureMatrix, DENSE_MAX_COLS};
pub use logreg::{base_smoothness, LogisticRegression, Regularizer};
pub use quadratic::Quadratic;
pub use rosenbrock::Rosenbrock;
pub use spectral::{spectral_norm, SpectralEstimate, SPECTRAL_INFLATION};

/// A differentiable objective `f: R^n -> R`.
///
/// Implementations are immutable after construction, so one value can be
/// shared by concurrent runs.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Smoothness constant `L` (Lipschitz constant of the gradient).
    fn smoothness(&self) -> f64;

    /// `true` when [`Problem::smoothness`] only holds on a bounded region.
    fn smoothness_is_local(&self) -> bool {
        false
    }

    /// Strong convexity constant `μ`; 0 when none is claimed.
    fn strong_convexity(&self) -> f64 {
        0.0
    }

    fn is_convex(&self) -> bool;

    /// Known minimizer and optimal value, when available in closed form.
    fn reference_opt(&self) -> Option<(Vec<f64>, f64)> {
        None
    }

    /// A value `f_inf <= inf f`, used by the non-convex bound.
    fn lower_bound(&self) -> Option<f64> {
        self.reference_opt().map(|(_, f)| f)
    }
}

/// Central differences `(f(x + h e_j) - f(x - h e_j)) / 2h` per coordinate.
pub fn finite_diff_gradient(problem: &dyn Problem, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|j| {
            let orig = probe[j];
            probe[j] = orig + h;
            let up = problem.value(&probe);
            probe[j] = orig - h;
            let down = problem.value(&probe);
            probe[j] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}
