use super::Problem;

/// Half-width of the box `[-2, 2]²` on which the local smoothness estimate
/// is taken.
const BOX: f64 = 2.0;
const GRID: usize = 401;

/// Two-dimensional Rosenbrock function `(1 - x)² + 100 (y - x²)²`.
///
/// The gradient is not globally Lipschitz, so [`Problem::smoothness`] reports
/// the largest Hessian spectral norm over a grid on `[-2, 2]²`.
#[derive(Debug, Clone)]
pub struct Rosenbrock {
    local_l: f64,
}

impl Default for Rosenbrock {
    fn default() -> Self {
        Self::new()
    }
}

impl Rosenbrock {
    pub fn new() -> Self {
        let mut local_l: f64 = 0.0;
        let step = 2.0 * BOX / (GRID - 1) as f64;
        for i in 0..GRID {
            for j in 0..GRID {
                let x = -BOX + i as f64 * step;
                let y = -BOX + j as f64 * step;
                local_l = local_l.max(hessian_norm(x, y));
            }
        }
        Self { local_l }
    }
}

/// Spectral norm of the symmetric 2×2 Hessian at `(x, y)`.
fn hessian_norm(x: f64, y: f64) -> f64 {
    let h11 = 2.0 - 400.0 * (y - x * x) + 800.0 * x * x;
    let h12 = -400.0 * x;
    let h22 = 200.0;
    let mean = 0.5 * (h11 + h22);
    let radius = (0.25 * (h11 - h22).powi(2) + h12 * h12).sqrt();
    (mean + radius).abs().max((mean - radius).abs())
}

impl Problem for Rosenbrock {
    fn name(&self) -> &str {
        "rosenbrock"
    }

    fn dim(&self) -> usize {
        2
    }

    fn value(&self, p: &[f64]) -> f64 {
        let (x, y) = (p[0], p[1]);
        (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)
    }

    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let (x, y) = (p[0], p[1]);
        let r = y - x * x;
        vec![-2.0 * (1.0 - x) - 400.0 * x * r, 200.0 * r]
    }

    fn smoothness(&self) -> f64 {
        self.local_l
    }

    fn smoothness_is_local(&self) -> bool {
        true
    }

    fn is_convex(&self) -> bool {
        false
    }

    fn reference_opt(&self) -> Option<(Vec<f64>, f64)> {
        Some((vec![1.0, 1.0], 0.0))
    }
}
