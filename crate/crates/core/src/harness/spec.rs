use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{load_dataset, LabelPolicy};
use crate::error::{Error, Result};
use crate::problems::{base_smoothness, Dataset, LogisticRegression, Problem, Quadratic, Rosenbrock};

/// Regularization weight, either absolute or as a fraction of the
/// unregularized smoothness `L₀ = λ_max(AᵀA)/(4M)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegWeight {
    Absolute(f64),
    BaseFraction(f64),
}

impl RegWeight {
    pub fn resolve(&self, data: &Dataset) -> f64 {
        match *self {
            Self::Absolute(w) => w,
            Self::BaseFraction(frac) => frac * base_smoothness(data),
        }
    }
}

/// Problem identity and parameters, as recorded in trace metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "id")]
pub enum ProblemSpec {
    /// `½ xᵀ diag(d) x - bᵀx`
    Quadratic { diag: Vec<f64>, b: Vec<f64> },
    Rosenbrock,
    LogregL2 { data: PathBuf, l2: RegWeight, n_features: Option<usize> },
    LogregNcvx { data: PathBuf, lambda: RegWeight, n_features: Option<usize> },
}

impl ProblemSpec {
    /// `diag(1, 2, …, n)` with `b = 0`.
    pub fn quadratic_ladder(n: usize) -> Self {
        Self::Quadratic { diag: (1..=n).map(|i| i as f64).collect(), b: vec![0.0; n] }
    }

    pub fn data_path(&self) -> Option<&PathBuf> {
        match self {
            Self::LogregL2 { data, .. } | Self::LogregNcvx { data, .. } => Some(data),
            _ => None,
        }
    }

    fn n_features(&self) -> Option<usize> {
        match self {
            Self::LogregL2 { n_features, .. } | Self::LogregNcvx { n_features, .. } => *n_features,
            _ => None,
        }
    }

    /// Builds the problem, loading the dataset from disk for logistic
    /// regression.
    pub fn build(&self) -> Result<Arc<dyn Problem>> {
        match self.data_path() {
            Some(path) => {
                let data = load_dataset(path, LabelPolicy::Auto, self.n_features())?;
                self.build_with_dataset(Arc::new(data))
            }
            None => self.build_with_dataset_opt(None),
        }
    }

    /// Builds with an already loaded dataset (ignored by problems without
    /// data).
    pub fn build_with_dataset(&self, data: Arc<Dataset>) -> Result<Arc<dyn Problem>> {
        self.build_with_dataset_opt(Some(data))
    }

    fn build_with_dataset_opt(&self, data: Option<Arc<Dataset>>) -> Result<Arc<dyn Problem>> {
        let need_data = || data.clone().ok_or_else(|| Error::Dataset("problem needs a dataset".into()));
        Ok(match self {
            Self::Quadratic { diag, b } => Arc::new(Quadratic::diagonal(diag.clone(), b.clone())?),
            Self::Rosenbrock => Arc::new(Rosenbrock::new()),
            Self::LogregL2 { l2, .. } => {
                let data = need_data()?;
                let w = l2.resolve(&data);
                Arc::new(LogisticRegression::l2(data, w)?)
            }
            Self::LogregNcvx { lambda, .. } => {
                let data = need_data()?;
                let w = lambda.resolve(&data);
                Arc::new(LogisticRegression::nonconvex(data, w)?)
            }
        })
    }

    fn default_start(&self, dim: usize) -> Vec<f64> {
        match self {
            Self::Quadratic { .. } => vec![1.0; dim],
            Self::Rosenbrock => vec![-1.2, 1.0],
            Self::LogregL2 { .. } | Self::LogregNcvx { .. } => vec![0.0; dim],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitPoint {
    /// Problem default: ones for quadratics, `(-1.2, 1)` for Rosenbrock,
    /// the origin for logistic regression.
    Default,
    Zeros,
    Point(Vec<f64>),
    /// Uniform in `[-radius, radius]^n`, drawn from the run seed.
    Random { radius: f64 },
}

impl InitPoint {
    pub fn resolve(&self, spec: &ProblemSpec, dim: usize, seed: u64) -> Result<Vec<f64>> {
        let x0 = match self {
            Self::Default => spec.default_start(dim),
            Self::Zeros => vec![0.0; dim],
            Self::Point(p) => p.clone(),
            Self::Random { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidConfig(format!("random start radius {radius} must be > 0")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..dim).map(|_| rng.gen_range(-radius..*radius)).collect()
            }
        };
        if x0.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: x0.len() });
        }
        Ok(x0)
    }
}
