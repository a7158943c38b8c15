//! Analytic constants entering the a-priori bounds: the Beta function, the
//! generalized exponential function `E_{alpha,beta}`, the smoothing
//! constants `chi^{r,T}`, the Gronwall-type constant `Theta`, and the
//! time-weight exponent `iota`.
//!
//! Infinite values are represented by `f64::INFINITY`, which propagates
//! through the arithmetic used here and compares above every finite value.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::spectral::DiagonalOperator;

/// Relative truncation tolerance of the generalized exponential series.
pub const GEN_EXP_TOL: f64 = 1e-14;
/// Hard cap on the number of series terms.
pub const GEN_EXP_MAX_TERMS: usize = 10_000;

/// `B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y)`.
pub fn beta_fn(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Beta function needs positive finite arguments, got ({x}, {y})"
        )));
    }
    Ok((ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)).exp())
}

/// `E_{alpha,beta}[x] = 1 + sum_{n>=1} x^n prod_{k<n} B(1-beta, k(1-beta) + 1-alpha)`.
///
/// Terms are accumulated until the next one drops below
/// [`GEN_EXP_TOL`] times the partial sum and the geometric tail bound
/// (the term ratios decrease in `n`) certifies the remainder.
pub fn gen_exp(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    if !(alpha < 1.0 && beta < 1.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "generalized exponential needs alpha < 1 and beta < 1, got ({alpha}, {beta})"
        )));
    }
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("argument {x} must be >= 0")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let ratio = |k: usize| -> Result<f64> {
        Ok(x * beta_fn(1.0 - beta, k as f64 * (1.0 - beta) + 1.0 - alpha)?)
    };
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 0..GEN_EXP_MAX_TERMS {
        term *= ratio(n)?;
        sum += term;
        if !sum.is_finite() {
            return Ok(f64::INFINITY);
        }
        let next = ratio(n + 1)?;
        if next < 1.0 {
            let tail = term * next / (1.0 - next);
            if term * next < GEN_EXP_TOL * sum && tail < GEN_EXP_TOL * sum {
                return Ok(sum);
            }
        }
    }
    Err(Error::Divergence {
        terms: GEN_EXP_MAX_TERMS,
    })
}

/// Per-mode supremum of `t^r (eta - a)^r e^{a t}` over `t in (0, T]`.
fn chi_mode(a: f64, shift: f64, r: f64, t_final: f64) -> f64 {
    if r == 0.0 {
        // the t -> 0+ limit is 1 for a <= 0
        return if a > 0.0 { (a * t_final).exp() } else { 1.0 };
    }
    let t_star = if a < 0.0 { (r / -a).min(t_final) } else { t_final };
    (t_star * shift).powf(r) * (a * t_star).exp()
}

/// `chi^{r,T} = sup_{t in (0,T]} t^r ||(eta - A)^r e^{tA}||`, in closed form
/// per eigenvalue.
pub fn chi(op: &DiagonalOperator, r: f64, t_final: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!("chi exponent {r} outside [0, 1]")));
    }
    if !(t_final > 0.0) {
        return Err(Error::InvalidArgument(format!("horizon T = {t_final} must be > 0")));
    }
    Ok(op
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(i, &a)| chi_mode(a, op.shifted(i), r, t_final))
        .fold(0.0, f64::max))
}

/// Arguments of [`theta`]: exponents `alpha` (drift space), `beta`
/// (diffusion space), `lambda`, integrability `p`, horizon `T`, and the
/// coefficient Lipschitz bounds `L` (drift) and `L_hat` (diffusion).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub p: f64,
    pub t_final: f64,
    pub eta: f64,
    pub l: f64,
    pub l_hat: f64,
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(0.0..1.0).contains(&self.alpha) {
            bad.push(format!("alpha = {} must lie in [0, 1)", self.alpha));
        }
        if !(0.0..0.5).contains(&self.beta) {
            bad.push(format!("beta = {} must lie in [0, 1/2)", self.beta));
        }
        if !(self.lambda < 1.0) {
            bad.push(format!("lambda = {} must be < 1", self.lambda));
        }
        if !(self.p >= 2.0) {
            bad.push(format!("p = {} must be >= 2", self.p));
        }
        if !(self.t_final > 0.0) {
            bad.push(format!("T = {} must be > 0", self.t_final));
        }
        if !(self.l >= 0.0 && self.l_hat >= 0.0) {
            bad.push(format!("L = {}, L_hat = {} must be >= 0", self.l, self.l_hat));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(bad.join("; ")))
        }
    }
}

/// `Theta^{a,b,lambda}_{A,eta,p,T}(L, L_hat)` given `chi_a = chi^{a,T}` and
/// `chi_b = chi^{b,T}`.
pub fn theta(params: &BoundParams, chi_a: f64, chi_b: f64) -> Result<f64> {
    params.validate()?;
    let BoundParams {
        alpha: a,
        beta: b,
        lambda,
        p,
        t_final: t,
        l,
        l_hat,
        ..
    } = *params;
    if l_hat == 0.0 {
        return gen_exp(lambda, a, chi_a * l * t.powf(1.0 - a));
    }
    if lambda < 0.5 {
        let inner = chi_a * l * std::f64::consts::SQRT_2 * t.powf(1.0 - a) / (1.0 - a).sqrt()
            + chi_b * l_hat * (p * (p - 1.0) * t.powf(1.0 - 2.0 * b)).sqrt();
        let e = gen_exp(2.0 * lambda, a.max(2.0 * b), inner * inner)?;
        return Ok(std::f64::consts::SQRT_2 * e.sqrt());
    }
    Ok(f64::INFINITY)
}

/// Direction exponents `(delta_1, ..., delta_k)` with the drift and
/// diffusion space exponents `alpha`, `beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentSpec {
    pub deltas: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl ExponentSpec {
    pub fn new(deltas: Vec<f64>, alpha: f64, beta: f64) -> Self {
        ExponentSpec { deltas, alpha, beta }
    }

    pub fn k(&self) -> usize {
        self.deltas.len()
    }

    /// Checks `delta_i in [0, 1/2)` and `sum delta_i < 1/2`.
    pub fn validate(&self) -> Result<()> {
        if let Some(d) = self.deltas.iter().find(|d| !(0.0..0.5).contains(*d)) {
            return Err(Error::InvalidArgument(format!("delta = {d} outside [0, 1/2)")));
        }
        let s: f64 = self.deltas.iter().sum();
        if !(s < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "sum of deltas = {s} violates sum(delta_i) < 1/2"
            )));
        }
        Ok(())
    }

    /// Correction `min{1 - alpha, 1/2 - beta}` applied to index sets of size >= 2.
    pub fn correction(&self) -> f64 {
        (1.0 - self.alpha).min(0.5 - self.beta)
    }

    /// Restriction of the exponents to the one-based indices in `subset`.
    pub fn restrict(&self, subset: &[usize]) -> ExponentSpec {
        ExponentSpec {
            deltas: subset.iter().map(|&i| self.deltas[i - 1]).collect(),
            alpha: self.alpha,
            beta: self.beta,
        }
    }

    /// Appends an extra direction exponent.
    pub fn extended(&self, delta: f64) -> ExponentSpec {
        let mut deltas = self.deltas.clone();
        deltas.push(delta);
        ExponentSpec {
            deltas,
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

/// Index set argument of [`iota`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexSet {
    /// All of `N`; intersects `{1..k}` in `{1..k}`.
    All,
    Subset(Vec<usize>),
}

/// `iota^delta_J = sum_{i in J ∩ {1..k}} delta_i - 1{#(J ∩ {1..k}) >= 2} min{1-alpha, 1/2-beta}`.
pub fn iota(spec: &ExponentSpec, set: &IndexSet) -> f64 {
    let k = spec.k();
    let (sum, count) = match set {
        IndexSet::All => (spec.deltas.iter().sum::<f64>(), k),
        IndexSet::Subset(idx) => {
            let mut members: Vec<usize> = idx.iter().copied().filter(|&i| (1..=k).contains(&i)).collect();
            members.sort_unstable();
            members.dedup();
            (members.iter().map(|&i| spec.deltas[i - 1]).sum(), members.len())
        }
    };
    if count >= 2 {
        sum - spec.correction()
    } else {
        sum
    }
}
