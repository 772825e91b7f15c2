//! Optimizer state machines.
//!
//! All optimizers take the gradient from the caller: [`Optimizer::step`]
//! receives `∇f(x_k)` for the current iterate and advances to `x_{k+1}`. This
//! keeps the state machines independent of any objective and lets tests feed
//! recorded gradient sequences.
//!
//! Buffer convention: momentum buffers start at zero, so the first step of
//! AggHB sets `V_0^{(i)} = ∇f(x_0)` and moves to
//! `x_1 = x_0 - (1/m) Σ γ_i ∇f(x_0)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::all_finite;

/// Momentum parameters and stepsizes of AggHB, one pair per buffer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AggConfigRepr")]
pub struct AggConfig {
    betas: Vec<f64>,
    gammas: Vec<f64>,
}

#[derive(Deserialize)]
struct AggConfigRepr {
    betas: Vec<f64>,
    gammas: Vec<f64>,
}

impl TryFrom<AggConfigRepr> for AggConfig {
    type Error = Error;

    fn try_from(r: AggConfigRepr) -> Result<Self> {
        AggConfig::new(r.betas, r.gammas)
    }
}

impl AggConfig {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::InvalidConfig("at least one momentum buffer is required".into()));
        }
        if betas.len() != gammas.len() {
            return Err(Error::InvalidConfig(format!(
                "{} momentum parameters but {} stepsizes",
                betas.len(),
                gammas.len()
            )));
        }
        validate_betas(&betas)?;
        if let Some(g) = gammas.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::InvalidConfig(format!("stepsize {g} must be finite and > 0")));
        }
        Ok(Self { betas, gammas })
    }

    /// Same stepsize for every buffer.
    pub fn uniform(betas: Vec<f64>, gamma: f64) -> Result<Self> {
        let gammas = vec![gamma; betas.len()];
        Self::new(betas, gammas)
    }

    /// Single-buffer configuration, i.e. classical Heavy-Ball.
    pub fn heavy_ball(beta: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![beta], vec![gamma])
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// Number of momentum buffers.
    pub fn m(&self) -> usize {
        self.betas.len()
    }

    /// `(1/m) Σ γ_i`, the stepsize of the very first step.
    pub fn mean_gamma(&self) -> f64 {
        self.gammas.iter().sum::<f64>() / self.m() as f64
    }

    /// Copy with every stepsize replaced by `gamma`.
    pub fn with_uniform_gamma(&self, gamma: f64) -> Result<Self> {
        Self::uniform(self.betas.clone(), gamma)
    }
}

/// Checks `β_i ∈ [0, 1)` for every entry.
pub fn validate_betas(betas: &[f64]) -> Result<()> {
    if betas.is_empty() {
        return Err(Error::InvalidConfig("empty momentum vector".into()));
    }
    match betas.iter().find(|b| !(**b >= 0.0 && **b < 1.0)) {
        Some(b) => Err(Error::InvalidConfig(format!("momentum parameter {b} outside [0, 1)"))),
        None => Ok(()),
    }
}

/// Common interface of the gradient-driven state machines.
pub trait Optimizer {
    /// Advance one iteration given `grad = ∇f(x_k)`. On error the state is
    /// left untouched.
    fn step(&mut self, grad: &[f64]) -> Result<()>;

    /// Current iterate `x_k`.
    fn x(&self) -> &[f64];

    /// Number of completed steps `k`.
    fn iteration(&self) -> usize;
}

fn check_start(x0: &[f64]) -> Result<()> {
    if x0.is_empty() {
        return Err(Error::InvalidConfig("starting point has dimension 0".into()));
    }
    if !all_finite(x0) {
        return Err(Error::NonFinite("starting point"));
    }
    Ok(())
}

fn check_grad(dim: usize, grad: &[f64], k: usize, x: &[f64]) -> Result<()> {
    if grad.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: grad.len() });
    }
    if !all_finite(grad) {
        return Err(Error::Diverged { step: k, last_x: x.to_vec() });
    }
    Ok(())
}

/// Plain gradient descent `x_{k+1} = x_k - α ∇f(x_k)`.
#[derive(Debug, Clone)]
pub struct GradientDescent {
    x: Vec<f64>,
    alpha: f64,
    k: usize,
}

impl GradientDescent {
    pub fn new(alpha: f64, x0: Vec<f64>) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidConfig(format!("stepsize {alpha} must be finite and > 0")));
        }
        check_start(&x0)?;
        Ok(Self { x: x0, alpha, k: 0 })
    }
}

impl Optimizer for GradientDescent {
    fn step(&mut self, grad: &[f64]) -> Result<()> {
        check_grad(self.x.len(), grad, self.k, &self.x)?;
        let next: Vec<f64> = self.x.iter().zip(grad).map(|(x, g)| x - self.alpha * g).collect();
        if !all_finite(&next) {
            return Err(Error::Diverged { step: self.k, last_x: self.x.clone() });
        }
        self.x = next;
        self.k += 1;
        Ok(())
    }

    fn x(&self) -> &[f64] {
        &self.x
    }

    fn iteration(&self) -> usize {
        self.k
    }
}

/// Classical Heavy-Ball: `V_k = β V_{k-1} + ∇f(x_k)`, `x_{k+1} = x_k - γ V_k`.
#[derive(Debug, Clone)]
pub struct HeavyBall {
    x: Vec<f64>,
    v: Vec<f64>,
    beta: f64,
    gamma: f64,
    k: usize,
}

impl HeavyBall {
    pub fn new(beta: f64, gamma: f64, x0: Vec<f64>) -> Result<Self> {
        // reuse the AggConfig validation rules
        AggConfig::heavy_ball(beta, gamma)?;
        check_start(&x0)?;
        let v = vec![0.0; x0.len()];
        Ok(Self { x: x0, v, beta, gamma, k: 0 })
    }

    pub fn buffer(&self) -> &[f64] {
        &self.v
    }
}

impl Optimizer for HeavyBall {
    fn step(&mut self, grad: &[f64]) -> Result<()> {
        check_grad(self.x.len(), grad, self.k, &self.x)?;
        let v: Vec<f64> = self.v.iter().zip(grad).map(|(v, g)| self.beta * v + g).collect();
        let x: Vec<f64> = self.x.iter().zip(&v).map(|(x, v)| x - self.gamma * v).collect();
        if !all_finite(&v) || !all_finite(&x) {
            return Err(Error::Diverged { step: self.k, last_x: self.x.clone() });
        }
        self.v = v;
        self.x = x;
        self.k += 1;
        Ok(())
    }

    fn x(&self) -> &[f64] {
        &self.x
    }

    fn iteration(&self) -> usize {
        self.k
    }
}

/// Aggregated Heavy-Ball: `m` momentum buffers with their own `(β_i, γ_i)`,
/// stepping along the average of the scaled buffers.
#[derive(Debug, Clone)]
pub struct AggregatedHeavyBall {
    config: AggConfig,
    x: Vec<f64>,
    buffers: Vec<Vec<f64>>,
    k: usize,
}

impl AggregatedHeavyBall {
    pub fn new(config: AggConfig, x0: Vec<f64>) -> Result<Self> {
        check_start(&x0)?;
        let buffers = vec![vec![0.0; x0.len()]; config.m()];
        Ok(Self { config, x: x0, buffers, k: 0 })
    }

    pub fn config(&self) -> &AggConfig {
        &self.config
    }

    /// Buffers `V^{(i)}` as of the last completed step (all zero before the
    /// first step).
    pub fn buffers(&self) -> &[Vec<f64>] {
        &self.buffers
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Virtual iterate `x̃_k = x_k - (1/m) Σ β_i γ_i / (1 - β_i) · V_{k-1}^{(i)}`.
    ///
    /// The stored buffers are exactly `V_{k-1}` relative to the next step, so
    /// they are read as-is. A fresh state gives `x̃_0 = x_0`.
    pub fn virtual_iterate(&self) -> Vec<f64> {
        let m = self.config.m() as f64;
        let mut shift = vec![0.0; self.x.len()];
        for ((beta, gamma), buf) in self.config.betas.iter().zip(&self.config.gammas).zip(&self.buffers) {
            let w = beta * gamma / (1.0 - beta);
            for (s, v) in shift.iter_mut().zip(buf) {
                *s += w * v;
            }
        }
        self.x.iter().zip(&shift).map(|(x, s)| x - s / m).collect()
    }

    /// `(1/m) Σ γ_i / (1 - β_i)`: the stepsize of the pure-gradient recursion
    /// followed by the virtual iterates.
    pub fn virtual_stepsize(&self) -> f64 {
        let m = self.config.m() as f64;
        self.config
            .betas
            .iter()
            .zip(&self.config.gammas)
            .map(|(b, g)| g / (1.0 - b))
            .sum::<f64>()
            / m
    }
}

impl Optimizer for AggregatedHeavyBall {
    fn step(&mut self, grad: &[f64]) -> Result<()> {
        check_grad(self.x.len(), grad, self.k, &self.x)?;
        let m = self.config.m() as f64;
        let buffers: Vec<Vec<f64>> = self
            .config
            .betas
            .iter()
            .zip(&self.buffers)
            .map(|(beta, buf)| buf.iter().zip(grad).map(|(v, g)| beta * v + g).collect())
            .collect();
        let mut direction = vec![0.0; self.x.len()];
        for (gamma, buf) in self.config.gammas.iter().zip(&buffers) {
            for (d, v) in direction.iter_mut().zip(buf) {
                *d += gamma * v;
            }
        }
        let x: Vec<f64> = self.x.iter().zip(&direction).map(|(x, d)| x - d / m).collect();
        if !all_finite(&x) || !buffers.iter().all(|b| all_finite(b)) {
            return Err(Error::Diverged { step: self.k, last_x: self.x.clone() });
        }
        self.buffers = buffers;
        self.x = x;
        self.k += 1;
        Ok(())
    }

    fn x(&self) -> &[f64] {
        &self.x
    }

    fn iteration(&self) -> usize {
        self.k
    }
}

/// Closed-form buffer contents `Σ_{l=0}^{k} β^l ∇f(x_{k-l})` for a recorded
/// gradient history `[∇f(x_0), …, ∇f(x_k)]`.
pub fn momentum_expansion(history: &[Vec<f64>], beta: f64) -> Result<Vec<f64>> {
    let last = history
        .last()
        .ok_or_else(|| Error::InvalidConfig("gradient history is empty".into()))?;
    let mut out = vec![0.0; last.len()];
    let mut weight = 1.0;
    for g in history.iter().rev() {
        if g.len() != out.len() {
            return Err(Error::DimensionMismatch { expected: out.len(), got: g.len() });
        }
        for (o, gi) in out.iter_mut().zip(g) {
            *o += weight * gi;
        }
        weight *= beta;
    }
    Ok(out)
}

/// Running weighted average `x̄_K = Σ w_k x_k / Σ w_k` with `w_k ∝ ρ^k`.
///
/// Weights are kept relative to the newest one: `weight_sum` stores
/// `W_K / w_K`, updated as `weight_sum / ρ + 1`, so nothing grows like `ρ^K`.
#[derive(Debug, Clone)]
pub struct AveragingState {
    xbar: Option<Vec<f64>>,
    weight_sum: f64,
    rho: f64,
}

impl AveragingState {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho >= 1.0) {
            return Err(Error::InvalidConfig(format!("weight ratio {rho} must be finite and >= 1")));
        }
        Ok(Self { xbar: None, weight_sum: 0.0, rho })
    }

    /// Averaging with `w_k = (1 - μF/2)^{-(k+1)}`.
    pub fn for_strong_convexity(mu: f64, f_const: f64) -> Result<Self> {
        let contraction = 1.0 - mu * f_const / 2.0;
        if !(contraction > 0.0 && contraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "1 - μF/2 = {contraction} must lie in (0, 1]"
            )));
        }
        Self::new(1.0 / contraction)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `W_K / w_K`; zero before the first update.
    pub fn weight_sum(&self) -> f64 {
        self.weight_sum
    }

    pub fn average(&self) -> Option<&[f64]> {
        self.xbar.as_deref()
    }

    pub fn update(&mut self, x: &[f64]) -> Result<()> {
        match &mut self.xbar {
            None => {
                self.xbar = Some(x.to_vec());
                self.weight_sum = 1.0;
            }
            Some(xbar) => {
                if xbar.len() != x.len() {
                    return Err(Error::DimensionMismatch { expected: xbar.len(), got: x.len() });
                }
                self.weight_sum = self.weight_sum / self.rho + 1.0;
                let frac = 1.0 / self.weight_sum;
                for (a, xi) in xbar.iter_mut().zip(x) {
                    *a += frac * (xi - *a);
                }
            }
        }
        Ok(())
    }
}
