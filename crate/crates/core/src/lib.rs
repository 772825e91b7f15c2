//! Heavy-Ball and Aggregated Heavy-Ball (AggHB) optimization toolkit.
//!
//! The crate is split along the lines of what a user needs to run and audit a
//! momentum method:
//!
//! * [`optim`] holds the deterministic optimizer state machines (GD, HB, AggHB)
//!   together with the virtual-iterate and weighted-averaging observables.
//! * [`theory`] computes the stepsize constants, admissibility conditions and
//!   convergence bounds for AggHB in the non-convex, convex and strongly convex
//!   settings.
//! * [`problems`] provides objectives with analytic gradients and smoothness
//!   constants (quadratic, Rosenbrock, two logistic-regression variants).
//! * [`data`] parses LIBSVM text files into [`problems::Dataset`] values.
//! * [`harness`] runs experiments, tunes stepsizes on the `a / L` grid, checks
//!   traces against the theoretical bounds, and exports CSV traces.

pub mod data;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod optim;
pub mod problems;
pub mod theory;

pub use error::{Error, Result};
pub use optim::{AggConfig, AggregatedHeavyBall, AveragingState, GradientDescent, HeavyBall};
pub use problems::{Dataset, Problem};
pub use theory::{EffectiveBetas, TheoryConstants};
