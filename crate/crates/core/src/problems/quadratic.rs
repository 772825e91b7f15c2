use nalgebra::{DMatrix, DVector};

use super::Problem;
use crate::error::{Error, Result};
use crate::linalg::dot;

/// `f(x) = ½ xᵀQx - bᵀx` with `Q` symmetric positive semidefinite.
#[derive(Debug, Clone)]
pub struct Quadratic {
    q: DMatrix<f64>,
    b: Vec<f64>,
    l: f64,
    mu: f64,
    optimum: Option<(Vec<f64>, f64)>,
}

impl Quadratic {
    /// `q` is row-major `n × n`.
    pub fn new(q: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let n = b.len();
        if q.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: q.len() });
        }
        if n == 0 {
            return Err(Error::InvalidConfig("quadratic of dimension 0".into()));
        }
        if q.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("quadratic coefficients"));
        }
        let q = DMatrix::from_row_slice(n, n, &q);
        let scale = q.amax().max(1.0);
        if (&q - q.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidConfig("Q is not symmetric".into()));
        }
        let eig = q.clone().symmetric_eigen();
        let l = eig.eigenvalues.max();
        let lmin = eig.eigenvalues.min();
        if lmin < -1e-12 * scale {
            return Err(Error::InvalidConfig(format!("Q is not positive semidefinite (λ_min = {lmin})")));
        }
        let mu = lmin.max(0.0);
        let optimum = if lmin > 1e-12 * scale {
            q.clone().cholesky().map(|c| {
                let x = c.solve(&DVector::from_column_slice(&b));
                let x: Vec<f64> = x.iter().copied().collect();
                let f = -0.5 * dot(&b, &x);
                (x, f)
            })
        } else {
            None
        };
        Ok(Self { q, b, l, mu, optimum })
    }

    pub fn diagonal(diag: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        let mut q = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            q[i * n + i] = *d;
        }
        Self::new(q, b)
    }
}

impl Problem for Quadratic {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let qx = self.gradient_part(x);
        0.5 * dot(x, &qx) - dot(&self.b, x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.gradient_part(x);
        g.iter_mut().zip(&self.b).for_each(|(gi, bi)| *gi -= bi);
        g
    }

    fn smoothness(&self) -> f64 {
        self.l
    }

    fn strong_convexity(&self) -> f64 {
        self.mu
    }

    fn is_convex(&self) -> bool {
        true
    }

    fn reference_opt(&self) -> Option<(Vec<f64>, f64)> {
        self.optimum.clone()
    }
}

impl Quadratic {
    fn gradient_part(&self, x: &[f64]) -> Vec<f64> {
        let n = self.b.len();
        (0..n).map(|i| (0..n).map(|j| self.q[(i, j)] * x[j]).sum()).collect()
    }
}
