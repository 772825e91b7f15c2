use std::sync::Arc;

use super::{spectral_norm, Dataset, Problem, SpectralEstimate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    /// `(l2 / 2) ‖x‖²`
    L2(f64),
    /// `λ Σ_j x_j² / (1 + x_j²)`
    Nonconvex(f64),
}

/// Logistic loss `(1/M) Σ log(1 + exp(-y_i [Ax]_i))` plus a regularizer.
#[derive(Debug, Clone)]
pub struct LogisticRegression {
    data: Arc<Dataset>,
    reg: Regularizer,
    spectral: SpectralEstimate,
    name: &'static str,
}

/// `λ_max(AᵀA) / (4M)` from the inflated spectral estimate: the smoothness
/// constant of the unregularized loss.
pub fn base_smoothness(data: &Dataset) -> f64 {
    spectral_norm(data.features()).upper() / (4.0 * data.samples() as f64)
}

fn check_weight(w: f64, what: &str) -> Result<()> {
    if w.is_finite() && w >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{what} = {w} must be finite and >= 0")))
    }
}

impl LogisticRegression {
    pub fn l2(data: Arc<Dataset>, l2: f64) -> Result<Self> {
        check_weight(l2, "l2")?;
        let spectral = spectral_norm(data.features());
        Ok(Self { data, reg: Regularizer::L2(l2), spectral, name: "logreg-l2" })
    }

    pub fn nonconvex(data: Arc<Dataset>, lambda: f64) -> Result<Self> {
        check_weight(lambda, "lambda")?;
        let spectral = spectral_norm(data.features());
        Ok(Self { data, reg: Regularizer::Nonconvex(lambda), spectral, name: "logreg-ncvx" })
    }

    pub fn regularizer(&self) -> Regularizer {
        self.reg
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    pub fn spectral_estimate(&self) -> SpectralEstimate {
        self.spectral
    }

    fn margins(&self, x: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.data.samples()];
        self.data.features().matvec(x, &mut z);
        z.iter_mut().zip(self.data.labels()).for_each(|(zi, y)| *zi *= y);
        z
    }
}

/// `log(1 + exp(-t))` without overflow.
fn softplus_neg(t: f64) -> f64 {
    if t > 0.0 {
        (-t).exp().ln_1p()
    } else {
        -t + t.exp().ln_1p()
    }
}

/// `σ(-t) = 1 / (1 + exp(t))` without overflow.
fn sigmoid_neg(t: f64) -> f64 {
    if t >= 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

impl Problem for LogisticRegression {
    fn name(&self) -> &str {
        self.name
    }

    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let m = self.data.samples() as f64;
        let loss = self.margins(x).into_iter().map(softplus_neg).sum::<f64>() / m;
        let reg = match self.reg {
            Regularizer::L2(l2) => 0.5 * l2 * x.iter().map(|v| v * v).sum::<f64>(),
            Regularizer::Nonconvex(lambda) => lambda * x.iter().map(|v| v * v / (1.0 + v * v)).sum::<f64>(),
        };
        loss + reg
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let m = self.data.samples() as f64;
        let coeffs: Vec<f64> = self
            .margins(x)
            .into_iter()
            .zip(self.data.labels())
            .map(|(t, y)| -y * sigmoid_neg(t) / m)
            .collect();
        let mut g = vec![0.0; self.dim()];
        self.data.features().matvec_t(&coeffs, &mut g);
        match self.reg {
            Regularizer::L2(l2) => g.iter_mut().zip(x).for_each(|(gi, xi)| *gi += l2 * xi),
            Regularizer::Nonconvex(lambda) => g.iter_mut().zip(x).for_each(|(gi, xi)| {
                let d = 1.0 + xi * xi;
                *gi += 2.0 * lambda * xi / (d * d);
            }),
        }
        g
    }

    /// `λ_max(AᵀA)/(4M) + l2`, or `+ 2λ` for the non-convex regularizer.
    fn smoothness(&self) -> f64 {
        let base = self.spectral.upper() / (4.0 * self.data.samples() as f64);
        match self.reg {
            Regularizer::L2(l2) => base + l2,
            Regularizer::Nonconvex(lambda) => base + 2.0 * lambda,
        }
    }

    fn strong_convexity(&self) -> f64 {
        match self.reg {
            Regularizer::L2(l2) => l2,
            Regularizer::Nonconvex(_) => 0.0,
        }
    }

    fn is_convex(&self) -> bool {
        matches!(self.reg, Regularizer::L2(_))
    }

    fn lower_bound(&self) -> Option<f64> {
        // both the loss and the regularizers are nonnegative
        Some(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist, dot, norm, norm_sq};
    use crate::problems::test_util::max_gradient_error;
    use crate::problems::{CsrMatrix, FeatureMatrix, DENSE_MAX_COLS};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rows(m: usize, n: usize, density: f64, seed: u64) -> (Vec<Vec<(usize, f64)>>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::with_capacity(m);
        for _ in 0..m {
            let mut row = Vec::new();
            for c in 0..n {
                if rng.gen_bool(density) {
                    row.push((c, rng.gen_range(-1.0..1.0)));
                }
            }
            rows.push(row);
        }
        let labels = (0..m).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        (rows, labels)
    }

    fn dataset(m: usize, n: usize, seed: u64) -> Arc<Dataset> {
        let (rows, labels) = random_rows(m, n, 0.6, seed);
        Arc::new(Dataset::new(FeatureMatrix::from_rows(n, &rows).unwrap(), labels).unwrap())
    }

    fn single(a: f64, y: f64) -> Arc<Dataset> {
        Arc::new(Dataset::new(FeatureMatrix::from_rows(1, &[vec![(0, a)]]).unwrap(), vec![y]).unwrap())
    }

    #[test]
    fn value_at_origin() {
        let p = LogisticRegression::l2(dataset(30, 4, 1), 0.3).unwrap();
        assert_relative_eq!(p.value(&[0.0; 4]), std::f64::consts::LN_2, max_relative = 1e-15);
    }

    #[test]
    fn gradient_at_origin() {
        let data = dataset(30, 4, 2);
        let p = LogisticRegression::l2(data.clone(), 0.0).unwrap();
        let mut aty = vec![0.0; 4];
        data.features().matvec_t(data.labels(), &mut aty);
        let expected: Vec<f64> = aty.iter().map(|v| -v / (2.0 * 30.0)).collect();
        let g = p.gradient(&[0.0; 4]);
        assert!(dist(&g, &expected) <= 1e-15);
    }

    #[test]
    fn single_sample_value() {
        let p = LogisticRegression::l2(single(1.0, 1.0), 0.0).unwrap();
        assert_relative_eq!(p.value(&[10.0]), (-10.0f64).exp().ln_1p(), max_relative = 1e-14);
        assert!((p.value(&[10.0]) - 4.54e-5).abs() < 1e-7);
        // no overflow for huge margins
        assert!(p.value(&[-1e4]).is_finite());
        assert_relative_eq!(p.value(&[-1e4]), 1e4, max_relative = 1e-12);
        assert!(p.gradient(&[1e4])[0].abs() < 1e-300);
    }

    #[test]
    fn nonconvex_regularizer() {
        let data = single(0.0, 1.0);
        let lambda = 0.8;
        let p = LogisticRegression::nonconvex(data, lambda).unwrap();
        let base = std::f64::consts::LN_2;
        assert_relative_eq!(p.value(&[0.0]), base);
        assert_eq!(p.gradient(&[0.0])[0], 0.0);
        assert_relative_eq!(p.value(&[1.0]) - base, lambda / 2.0, max_relative = 1e-14);
        assert_relative_eq!(p.gradient(&[1.0])[0], lambda / 2.0, max_relative = 1e-14);
        assert!(p.value(&[1e8]) - base <= lambda);
        assert!(!p.is_convex());
        assert_eq!(p.strong_convexity(), 0.0);
    }

    #[test]
    fn smoothness_formulas() {
        let data = dataset(40, 6, 3);
        let base = base_smoothness(&data);
        let p = LogisticRegression::l2(data.clone(), 0.1).unwrap();
        assert_relative_eq!(p.smoothness(), base + 0.1, max_relative = 1e-14);
        assert_eq!(p.strong_convexity(), 0.1);
        let p = LogisticRegression::nonconvex(data, 0.1).unwrap();
        assert_relative_eq!(p.smoothness(), base + 0.2, max_relative = 1e-14);
    }

    #[test]
    fn rejects_negative_weights() {
        assert!(LogisticRegression::l2(single(1.0, 1.0), -1.0).is_err());
        assert!(LogisticRegression::nonconvex(single(1.0, 1.0), f64::NAN).is_err());
    }

    #[test]
    fn gradients_match_finite_differences() {
        let data = dataset(50, 7, 4);
        assert!(max_gradient_error(&LogisticRegression::l2(data.clone(), 0.05).unwrap(), 10, 1.0, 5) <= 1e-5);
        assert!(max_gradient_error(&LogisticRegression::nonconvex(data, 0.05).unwrap(), 10, 1.0, 6) <= 1e-5);
    }

    #[test]
    fn sparse_path_matches_dense_reference() {
        let n = DENSE_MAX_COLS + 6;
        let (rows, labels) = random_rows(25, n, 0.2, 9);
        let sparse = FeatureMatrix::from_rows(n, &rows).unwrap();
        assert!(matches!(sparse, FeatureMatrix::Sparse(_)));
        let dense = FeatureMatrix::Dense(CsrMatrix::from_rows(n, &rows).unwrap().to_dense());
        let ps = LogisticRegression::l2(Arc::new(Dataset::new(sparse, labels.clone()).unwrap()), 0.01).unwrap();
        let pd = LogisticRegression::l2(Arc::new(Dataset::new(dense, labels).unwrap()), 0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..5 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!((ps.value(&x) - pd.value(&x)).abs() <= 1e-12);
            assert!(dist(&ps.gradient(&x), &pd.gradient(&x)) <= 1e-12);
        }
    }

    #[test]
    fn lipschitz_and_strong_convexity_audits() {
        let p = LogisticRegression::l2(dataset(60, 5, 11), 0.02).unwrap();
        let l = p.smoothness();
        let mu = p.strong_convexity();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut ball = || -> Vec<f64> {
            let v: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s = norm(&v).max(1.0);
            v.iter().map(|x| x / s).collect()
        };
        for _ in 0..100 {
            let (x, y) = (ball(), ball());
            let gx = p.gradient(&x);
            assert!(dist(&gx, &p.gradient(&y)) <= 1.01 * l * dist(&x, &y));
            let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let lower = p.value(&x) + dot(&gx, &diff) + 0.5 * mu * norm_sq(&diff);
            assert!(p.value(&y) >= lower - 1e-14);
        }
    }
}
