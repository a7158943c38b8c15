//! Simulation and verification toolkit for the derivative processes of
//! parabolic semilinear stochastic evolution equations
//!
//! ```text
//! dX_t = [A X_t + F(X_t)] dt + B(X_t) dW_t,    X_0 = x,
//! ```
//!
//! with respect to the initial value `x`. The generator `A` is diagonal in a
//! truncated eigenbasis, `W` is a spectrally truncated cylindrical Wiener
//! process, and the k-th derivative process `X^{k,(x,u_1,...,u_k)}` is obtained
//! by exponential Euler stepping of its mild equation, whose drift and
//! diffusion are sums over set partitions of the direction indices
//! (Faà di Bruno structure).
//!
//! Modules:
//!
//! * [`partitions`]: set partitions in canonical block order and the block selector.
//! * [`special`]: Beta function, generalized exponential function, smoothing
//!   constants `chi`, the Gronwall-type constant `theta`, and the exponent `iota`.
//! * [`spectral`]: diagonal generator, semigroup, fractional powers, `H_r` norms.
//! * [`model`]: drift/diffusion coefficients with multilinear derivative oracles.
//! * [`simulator`]: the subset-indexed derivative system under common noise.
//! * [`estimators`]: Monte Carlo norms, Fréchet checks, regularity and
//!   Lipschitz probes, and the recursive a-priori bound.
//! * [`cli`]: configuration, experiment orchestration and CSV output.

pub mod cli;
pub mod error;
pub mod estimators;
pub mod model;
pub mod parallel;
pub mod partitions;
pub mod simulator;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use parallel::Execution;
