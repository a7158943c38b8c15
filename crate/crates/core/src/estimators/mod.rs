//! Monte Carlo norm estimation, finite-difference Fréchet checks,
//! regularity and Lipschitz probes, and the recursive a-priori bound.
//!
//! All estimators stream: each sample's system is reduced to per-time
//! norms before the next sample is simulated, so memory stays at
//! `O(samples × steps)` regardless of the state dimension.

mod bound;
mod fit;
mod frechet;
mod mc;
mod probes;

pub use bound::{bound_rhs, bound_rhs_for_model};
pub use fit::{exponent_fit, PowerFit};
pub use frechet::{fd_frechet_check, FrechetTable};
pub use mc::{lp_norm_from_norms, mc_lp_norm, MCNormEstimate, MonteCarlo, NormTable};
pub use probes::{
    lipschitz_probe, probe_norms, regularity_probe, LipschitzReport, ProbeNorms, ProbeRatio, RatioReport,
};
