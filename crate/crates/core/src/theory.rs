//! Stepsize constants, admissibility conditions and convergence bounds for
//! AggHB.
//!
//! Everything here is a pure function of the momentum/stepsize vectors and the
//! problem constants `L`, `μ`. Margins are reported in relative form
//! `1 - lhs / rhs`, so a positive margin means the condition holds with room to
//! spare.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{validate_betas, AggConfig};

/// Relative allowance for conditions that the closed-form stepsizes meet with
/// equality.
pub const ROUNDING_SLACK: f64 = 16.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    /// `(1/m) Σ β_i γ_i / (1 - β_i)`
    pub a: f64,
    /// `Σ γ_i / (1 - β_i)^2`
    pub c: f64,
    /// `max_i γ_i / (1 - β_i)`
    pub d: f64,
    /// `Σ 1 / (1 - β_i)`
    pub e: f64,
    /// `(1/m) Σ γ_i / (1 - β_i)`
    pub f: f64,
    /// `(1/m) Σ β_i γ_i (1 - β_i^{K+1}) / (1 - β_i)^2`, with the factor
    /// `1 - β_i^{K+1}` capped at 1 for an open horizon.
    pub b: f64,
}

/// Computes the constants for `config`. `horizon = None` uses the
/// `K → ∞` cap in `B`, which only makes conditions checked with it stricter.
pub fn constants(config: &AggConfig, horizon: Option<usize>) -> TheoryConstants {
    let m = config.m() as f64;
    let mut out = TheoryConstants { a: 0.0, c: 0.0, d: 0.0, e: 0.0, f: 0.0, b: 0.0 };
    for (&beta, &gamma) in config.betas().iter().zip(config.gammas()) {
        let one_minus = 1.0 - beta;
        let tail = match horizon {
            Some(k) => 1.0 - beta.powi(i32::try_from(k.saturating_add(1)).unwrap_or(i32::MAX)),
            None => 1.0,
        };
        out.a += beta * gamma / one_minus;
        out.c += gamma / (one_minus * one_minus);
        out.d = out.d.max(gamma / one_minus);
        out.e += 1.0 / one_minus;
        out.f += gamma / one_minus;
        out.b += beta * gamma * tail / (one_minus * one_minus);
    }
    out.a /= m;
    out.f /= m;
    out.b /= m;
    out
}

/// Single momentum values that reproduce the averaged quantities of a
/// momentum vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveBetas {
    /// Solves `β̃ / (1 - β̃)^2 = (1/m) Σ β_i / (1 - β_i)^2`.
    pub beta_tilde: f64,
    /// Solves `1 / (1 - β̂) = (1/m) Σ 1 / (1 - β_i)`.
    pub beta_hat: f64,
    pub beta_max: f64,
}

/// The two averaged sums behind the effective momenta:
/// `s = (1/m) Σ β_i/(1-β_i)^2` and `h = (1/m) Σ 1/(1-β_i)`.
#[derive(Debug, Clone, Copy)]
struct MomentSums {
    s: f64,
    h: f64,
    beta_max: f64,
}

fn moment_sums(betas: &[f64]) -> Result<MomentSums> {
    validate_betas(betas)?;
    let m = betas.len() as f64;
    let mut s = 0.0;
    let mut h = 0.0;
    let mut beta_max: f64 = 0.0;
    for &b in betas {
        let om = 1.0 - b;
        s += b / (om * om);
        h += 1.0 / om;
        beta_max = beta_max.max(b);
    }
    Ok(MomentSums { s: s / m, h: h / m, beta_max })
}

pub fn effective_betas(betas: &[f64]) -> Result<EffectiveBetas> {
    let sums = moment_sums(betas)?;
    // Root in [0, 1) of s(1-β)^2 = β, i.e. ((2s+1) - √(4s+1)) / (2s), written
    // without the cancellation; s = 0 gives 0.
    let s = sums.s;
    let beta_tilde = 2.0 * s / ((2.0 * s + 1.0) + (4.0 * s + 1.0).sqrt());
    let beta_hat = 1.0 - 1.0 / sums.h;
    Ok(EffectiveBetas { beta_tilde, beta_hat, beta_max: sums.beta_max })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Admissibility {
    Admissible,
    Inadmissible,
    /// All momenta are zero (`A = 0`); the non-convex bound degenerates.
    Vacuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonconvexVerdict {
    /// `1 - C D E L^2 / m^2 - L A`
    pub margin: f64,
    pub status: Admissibility,
}

/// Checks the non-convex admissibility condition in its stricter form
/// `1 - CDEL²/m² - LA > 0`.
pub fn check_nonconvex_condition(consts: &TheoryConstants, l: f64, m: usize) -> NonconvexVerdict {
    let m = m as f64;
    let margin = 1.0 - consts.c * consts.d * consts.e * l * l / (m * m) - l * consts.a;
    let status = if consts.a == 0.0 {
        Admissibility::Vacuous
    } else if margin > 0.0 {
        Admissibility::Admissible
    } else {
        Admissibility::Inadmissible
    };
    NonconvexVerdict { margin, status }
}

fn check_l(l: f64) -> Result<()> {
    if l.is_finite() && l > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("smoothness constant {l} must be finite and > 0")))
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("strong convexity constant {mu} must be finite and >= 0")))
    }
}

/// Uniform stepsize that keeps the non-convex margin at or above 1/2:
///
/// `γ = 1 / (L (2β̂/(1-β̂) + √(2 (β̃/(1-β̃)² + 1/(1-β̂)) / ((1 - max β_i)(1-β̂)))))`
pub fn stepsize_nonconvex(betas: &[f64], l: f64) -> Result<f64> {
    check_l(l)?;
    let MomentSums { s, h, beta_max } = moment_sums(betas)?;
    // β̂/(1-β̂) = h - 1, 1/(1-β̂) = h, β̃/(1-β̃)² = s
    let root = (2.0 * (s + h) * h / (1.0 - beta_max)).sqrt();
    Ok(1.0 / (l * (2.0 * (h - 1.0) + root)))
}

/// Uniform stepsize for the convex and strongly convex guarantees:
///
/// `γ = min{ (1-max β_i)²/(2μ), (1-β̂)/(4L), (1-β̃)√((1-β̂)(1-max β_i)) / (4√3 L √β̃) }`
///
/// The first term is dropped when `μ = 0` and the third when `β̃ = 0`.
pub fn stepsize_convex(betas: &[f64], l: f64, mu: f64) -> Result<f64> {
    check_l(l)?;
    check_mu(mu)?;
    let MomentSums { s, h, beta_max } = moment_sums(betas)?;
    let one_minus_max = 1.0 - beta_max;
    let mut gamma = 1.0 / (4.0 * l * h);
    if mu > 0.0 {
        gamma = gamma.min(one_minus_max * one_minus_max / (2.0 * mu));
    }
    if s > 0.0 {
        // (1-β̃)²/β̃ = 1/s
        gamma = gamma.min((one_minus_max / (48.0 * s * h)).sqrt() / l);
    }
    Ok(gamma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexVerdict {
    /// Per-buffer margins of `γ_i <= (1 - max β)(1 - β_i) / (2μ)`; `None`
    /// when `μ = 0`.
    pub gamma_margins: Option<Vec<f64>>,
    /// Margin of `F <= 1/(4L)`.
    pub f_margin: f64,
    /// Margin of `BF <= (1 - max β) / (48 L^2)`.
    pub bf_margin: f64,
    pub passed: bool,
}

fn holds(margin: f64) -> bool {
    margin >= -ROUNDING_SLACK
}

pub fn check_convex_conditions(
    config: &AggConfig,
    l: f64,
    mu: f64,
    horizon: Option<usize>,
) -> Result<ConvexVerdict> {
    check_l(l)?;
    check_mu(mu)?;
    let consts = constants(config, horizon);
    let beta_max = config.betas().iter().copied().fold(0.0, f64::max);
    let gamma_margins = (mu > 0.0).then(|| {
        config
            .betas()
            .iter()
            .zip(config.gammas())
            .map(|(b, g)| 1.0 - g / ((1.0 - beta_max) * (1.0 - b) / (2.0 * mu)))
            .collect::<Vec<_>>()
    });
    let f_margin = 1.0 - consts.f * 4.0 * l;
    let bf_margin = 1.0 - consts.b * consts.f * 48.0 * l * l / (1.0 - beta_max);
    let passed = holds(f_margin)
        && holds(bf_margin)
        && gamma_margins.as_ref().map_or(true, |ms| ms.iter().all(|m| holds(*m)));
    Ok(ConvexVerdict { gamma_margins, f_margin, bf_margin, passed })
}

/// Problem-side inputs of the convergence bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub l: f64,
    pub mu: f64,
    /// `f(x_0) - f_inf`
    pub delta0: f64,
    /// `‖x_0 - x_*‖²`
    pub r0_sq: f64,
}

impl BoundInputs {
    pub fn new(l: f64, mu: f64, delta0: f64, r0_sq: f64) -> Result<Self> {
        check_l(l)?;
        check_mu(mu)?;
        if !(delta0.is_finite() && delta0 >= 0.0) {
            return Err(Error::InvalidConfig(format!("initial suboptimality {delta0} must be >= 0")));
        }
        if !(r0_sq.is_finite() && r0_sq >= 0.0) {
            return Err(Error::InvalidConfig(format!("initial distance {r0_sq} must be >= 0")));
        }
        Ok(Self { l, mu, delta0, r0_sq })
    }
}

/// `min_{k=1..K} ‖∇f(x_k)‖² <= (2/K) Δ0 / (A (1 - CDEL²/m² - LA))`
pub fn bound_nonconvex(k: usize, inputs: &BoundInputs, consts: &TheoryConstants, m: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidConfig("non-convex bound needs K >= 1".into()));
    }
    let verdict = check_nonconvex_condition(consts, inputs.l, m);
    match verdict.status {
        Admissibility::Admissible => {}
        Admissibility::Vacuous => {
            return Err(Error::Inadmissible("A = 0 (no momentum): the non-convex bound is vacuous".into()))
        }
        Admissibility::Inadmissible => {
            return Err(Error::Inadmissible(format!(
                "non-convex condition violated, margin {}",
                verdict.margin
            )))
        }
    }
    Ok(2.0 / k as f64 * inputs.delta0 / (consts.a * verdict.margin))
}

/// `(1 - μF/2)^K · 4R0²/F` for `μ > 0`, `4R0²/(FK)` for `μ = 0`.
pub fn bound_convex(k: usize, inputs: &BoundInputs, f_const: f64) -> Result<f64> {
    if !(f_const.is_finite() && f_const > 0.0) {
        return Err(Error::InvalidConfig(format!("F = {f_const} must be finite and > 0")));
    }
    if f_const * 4.0 * inputs.l > 1.0 + ROUNDING_SLACK {
        return Err(Error::Inadmissible(format!("F = {f_const} exceeds 1/(4L)")));
    }
    let half_mu_f = inputs.mu * f_const / 2.0;
    if half_mu_f >= 1.0 {
        return Err(Error::Inadmissible(format!("μF/2 = {half_mu_f} must be < 1")));
    }
    let scale = 4.0 * inputs.r0_sq / f_const;
    if inputs.mu > 0.0 {
        let exp = i32::try_from(k).unwrap_or(i32::MAX);
        Ok((1.0 - half_mu_f).powi(exp) * scale)
    } else if k == 0 {
        Err(Error::InvalidConfig("convex bound with μ = 0 needs K >= 1".into()))
    } else {
        Ok(scale / k as f64)
    }
}
