//! Truncated spectral model of `H`, the diagonal generator `A`, its
//! semigroup, fractional powers of `eta - A`, and the `H_r` graph norms.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Diagonal generator with eigenvalues `a_1 >= a_2 >= ... >= a_N`, all
/// strictly below the spectral shift `eta`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOperator {
    eigenvalues: Vec<f64>,
    eta: f64,
}

impl DiagonalOperator {
    pub fn new(eigenvalues: Vec<f64>, eta: f64) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidArgument("operator needs at least one mode".into()));
        }
        if !eta.is_finite() || eigenvalues.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("non-finite eigenvalue or shift".into()));
        }
        if let Some(a) = eigenvalues.iter().find(|&&a| a >= eta) {
            return Err(Error::InvalidArgument(format!(
                "eigenvalue {a} is not strictly below eta = {eta}"
            )));
        }
        if eigenvalues.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("eigenvalues must be sorted nonincreasing".into()));
        }
        Ok(DiagonalOperator { eigenvalues, eta })
    }

    /// Dirichlet Laplacian on (0,1): `a_i = -pi^2 i^2`, `eta = 0`.
    pub fn dirichlet_laplacian(modes: usize) -> Result<Self> {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        Self::new((1..=modes).map(|i| -pi2 * (i * i) as f64).collect(), 0.0)
    }

    pub fn modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `eta - a_i` for mode `i` (zero-based).
    pub fn shifted(&self, i: usize) -> f64 {
        self.eta - self.eigenvalues[i]
    }

    /// Per-mode factors `e^{a_i t}`.
    pub fn semigroup_factors(&self, t: f64) -> Result<Vec<f64>> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("semigroup time {t} must be >= 0")));
        }
        Ok(self.eigenvalues.iter().map(|a| (a * t).exp()).collect())
    }

    fn check_len(&self, v: &SpectralVector) -> Result<()> {
        if v.len() != self.modes() {
            return Err(Error::SizeMismatch {
                expected: self.modes(),
                actual: v.len(),
            });
        }
        Ok(())
    }

    /// `e^{tA} v`.
    pub fn semigroup_apply(&self, t: f64, v: &SpectralVector) -> Result<SpectralVector> {
        self.check_len(v)?;
        if t == 0.0 {
            return Ok(v.clone());
        }
        let f = self.semigroup_factors(t)?;
        Ok(SpectralVector(v.iter().zip(f).map(|(x, e)| x * e).collect()))
    }

    /// `(eta - A)^r v`; `r` may be negative.
    pub fn frac_power_apply(&self, r: f64, v: &SpectralVector) -> Result<SpectralVector> {
        self.check_len(v)?;
        Ok(SpectralVector(
            v.iter()
                .enumerate()
                .map(|(i, x)| self.shifted(i).powf(r) * x)
                .collect(),
        ))
    }

    /// `||v||_{H_r} = ||(eta - A)^r v||_H`.
    pub fn h_norm(&self, r: f64, v: &SpectralVector) -> Result<f64> {
        self.check_len(v)?;
        Ok(self.h_norm_slice(r, v))
    }

    /// Unchecked variant of [`h_norm`](Self::h_norm) for hot loops.
    pub(crate) fn h_norm_slice(&self, r: f64, v: &[f64]) -> f64 {
        if r == 0.0 {
            return norm(v);
        }
        v.iter()
            .enumerate()
            .map(|(i, x)| {
                let w = self.shifted(i).powf(r) * x;
                w * w
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Coordinates of an element of `H` in the eigenbasis of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVector(Vec<f64>);

impl SpectralVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(SpectralVector(coeffs))
    }

    pub fn zeros(n: usize) -> Self {
        SpectralVector(vec![0.0; n])
    }

    /// Eigenbasis vector with coefficient `scale` at one-based mode `m`.
    pub fn basis(n: usize, m: usize, scale: f64) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::IndexOutOfRange {
                index: m,
                valid: format!("1..={n}"),
            });
        }
        let mut v = vec![0.0; n];
        v[m - 1] = scale;
        Ok(SpectralVector(v))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn dot(&self, other: &SpectralVector) -> f64 {
        dot(&self.0, &other.0)
    }

    /// `self * c + other * d`
    pub fn combine(&self, c: f64, other: &SpectralVector, d: f64) -> SpectralVector {
        SpectralVector(self.0.iter().zip(&other.0).map(|(a, b)| c * a + d * b).collect())
    }

    pub fn scaled(&self, c: f64) -> SpectralVector {
        SpectralVector(self.0.iter().map(|a| c * a).collect())
    }
}

impl Deref for SpectralVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}
