//! Drift and diffusion coefficients `F`, `B` with symmetric multilinear
//! derivative oracles, plus a finite-rank canonical model with analytic
//! `C_b^m` bounds.
//!
//! The noise space `U` is identified with `H` and truncated to its first
//! `N_U` eigenmodes. Noise modes are one-based throughout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{dot, norm, DiagonalOperator, SpectralVector};

/// Coefficient pair `(F, B)` with derivative oracles up to [`max_order`](ModelSpec::max_order).
///
/// The `add_*` methods accumulate `scale * F^{(m)}(x)(dirs)` (resp.
/// `scale * B^{(m)}(x)(dirs) dw`) into `out`. They assume `m <= max_order()`
/// and matching lengths; the checked entry points are [`drift_deriv`] and
/// [`diffusion_deriv`].
pub trait ModelSpec: Send + Sync {
    fn dim(&self) -> usize;

    fn noise_dim(&self) -> usize;

    fn max_order(&self) -> usize;

    fn add_drift(&self, m: usize, x: &[f64], dirs: &[&[f64]], scale: f64, out: &mut [f64]);

    /// `dw` has length `noise_dim()` and holds the coordinates of a noise
    /// vector in the truncated basis of `U`.
    fn add_diffusion(&self, m: usize, x: &[f64], dirs: &[&[f64]], dw: &[f64], scale: f64, out: &mut [f64]);

    /// Certified upper bounds on the coefficient norms, when available.
    fn cb_norms(&self, _op: &DiagonalOperator, _alpha: f64, _beta: f64) -> Option<CbNorms> {
        None
    }
}

/// Upper bounds for `|F|_{C_b^m(H, H_{-alpha})}` and
/// `|B|_{C_b^m(H, HS(U, H_{-beta}))}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CbNorms {
    /// `||F(0)||_{H_{-alpha}}`
    pub drift_at_zero: f64,
    /// `||B(0)||_{HS(U, H_{-beta})}`
    pub diffusion_at_zero: f64,
    /// `sup_x ||F(x)||`, infinite for unbounded profiles.
    pub drift_sup: f64,
    pub diffusion_sup: f64,
    /// `drift[m - 1]` bounds `|F|_{C_b^m}` for `m = 1..=max_order() + 1`.
    pub drift: Vec<f64>,
    pub diffusion: Vec<f64>,
}

impl CbNorms {
    /// `|F|_{C_b^m}`, `m >= 1`.
    pub fn drift_semi(&self, m: usize) -> Option<f64> {
        m.checked_sub(1).and_then(|i| self.drift.get(i)).copied()
    }

    pub fn diffusion_semi(&self, m: usize) -> Option<f64> {
        m.checked_sub(1).and_then(|i| self.diffusion.get(i)).copied()
    }

    /// `||F||_{C_b^k} = ||F(0)|| + sum_{m=1}^k |F|_{C_b^m}`.
    pub fn drift_full(&self, k: usize) -> Option<f64> {
        (1..=k).try_fold(self.drift_at_zero, |acc, m| Some(acc + self.drift_semi(m)?))
    }

    pub fn diffusion_full(&self, k: usize) -> Option<f64> {
        (1..=k).try_fold(self.diffusion_at_zero, |acc, m| Some(acc + self.diffusion_semi(m)?))
    }

    /// `|F|_{Lip^m}` is bounded by `|F|_{C_b^{m+1}}`.
    pub fn drift_lip(&self, m: usize) -> Option<f64> {
        self.drift_semi(m + 1)
    }

    pub fn diffusion_lip(&self, m: usize) -> Option<f64> {
        self.diffusion_semi(m + 1)
    }
}

fn check_order(model: &dyn ModelSpec, m: usize, x: &[f64], dirs: &[SpectralVector]) -> Result<()> {
    if m > model.max_order() {
        return Err(Error::Capability {
            requested: m,
            available: model.max_order(),
        });
    }
    if dirs.len() != m {
        return Err(Error::SizeMismatch {
            expected: m,
            actual: dirs.len(),
        });
    }
    for v in std::iter::once(x).chain(dirs.iter().map(|d| &d[..])) {
        if v.len() != model.dim() {
            return Err(Error::SizeMismatch {
                expected: model.dim(),
                actual: v.len(),
            });
        }
    }
    Ok(())
}

/// `F^{(m)}(x)(v_1, ..., v_m)`; `m = 0` gives `F(x)`.
pub fn drift_deriv(
    model: &dyn ModelSpec,
    m: usize,
    x: &SpectralVector,
    directions: &[SpectralVector],
) -> Result<SpectralVector> {
    check_order(model, m, x, directions)?;
    let dirs: Vec<&[f64]> = directions.iter().map(|d| &d[..]).collect();
    let mut out = vec![0.0; model.dim()];
    model.add_drift(m, x, &dirs, 1.0, &mut out);
    SpectralVector::new(out)
}

/// `B^{(m)}(x)(v_1, ..., v_m)` applied to the one-based noise basis vector `noise_mode`.
pub fn diffusion_deriv(
    model: &dyn ModelSpec,
    m: usize,
    x: &SpectralVector,
    directions: &[SpectralVector],
    noise_mode: usize,
) -> Result<SpectralVector> {
    check_order(model, m, x, directions)?;
    if noise_mode == 0 || noise_mode > model.noise_dim() {
        return Err(Error::IndexOutOfRange {
            index: noise_mode,
            valid: format!("1..={}", model.noise_dim()),
        });
    }
    let mut dw = vec![0.0; model.noise_dim()];
    dw[noise_mode - 1] = 1.0;
    let dirs: Vec<&[f64]> = directions.iter().map(|d| &d[..]).collect();
    let mut out = vec![0.0; model.dim()];
    model.add_diffusion(m, x, &dirs, &dw, 1.0, &mut out);
    SpectralVector::new(out)
}

/// Scalar profile `phi` of the canonical model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    Sin,
    Tanh,
    /// `phi(s) = s`; gives affine-linear coefficients.
    Linear,
}

impl std::str::FromStr for ProfileKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sin" => Ok(ProfileKind::Sin),
            "tanh" => Ok(ProfileKind::Tanh),
            "linear" => Ok(ProfileKind::Linear),
            other => Err(Error::InvalidArgument(format!(
                "unknown profile '{other}' (expected sin, tanh or linear)"
            ))),
        }
    }
}

/// A profile with its derivatives tabulated up to a fixed order.
#[derive(Clone, Debug)]
pub struct Profile {
    kind: ProfileKind,
    /// tanh^{(m)} = P_m(tanh), coefficients in ascending powers
    tanh_polys: Vec<Vec<f64>>,
    sup: Vec<f64>,
}

fn poly_eval(c: &[f64], y: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * y + a)
}

fn poly_deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, &a)| i as f64 * a).collect()
}

/// Certified bound of `sup_{|y| <= 1} |P(y)|`: grid maximum plus half the
/// spacing times a bound on `|P'|`.
fn poly_sup_on_unit(c: &[f64]) -> f64 {
    const N: usize = 20_000;
    let d = poly_deriv(c);
    let lip: f64 = d.iter().map(|a| a.abs()).sum();
    let grid = (0..=N)
        .map(|i| poly_eval(c, -1.0 + 2.0 * i as f64 / N as f64).abs())
        .fold(0.0, f64::max);
    grid + lip / N as f64
}

impl Profile {
    pub fn new(kind: ProfileKind, max_order: usize) -> Self {
        let mut tanh_polys = Vec::new();
        if kind == ProfileKind::Tanh {
            // P_0(y) = y, P_{m+1}(y) = P_m'(y) (1 - y^2)
            let mut p = vec![0.0, 1.0];
            for _ in 0..=max_order {
                tanh_polys.push(p.clone());
                let d = poly_deriv(&p);
                let mut next = vec![0.0; d.len() + 2];
                for (i, &a) in d.iter().enumerate() {
                    next[i] += a;
                    next[i + 2] -= a;
                }
                p = next;
            }
        }
        let sup = (0..=max_order)
            .map(|m| match kind {
                ProfileKind::Sin => 1.0,
                ProfileKind::Tanh if m == 0 => 1.0,
                ProfileKind::Tanh if m == 1 => 1.0,
                ProfileKind::Tanh => poly_sup_on_unit(&tanh_polys[m]),
                ProfileKind::Linear => match m {
                    0 => f64::INFINITY,
                    1 => 1.0,
                    _ => 0.0,
                },
            })
            .collect();
        Profile { kind, tanh_polys, sup }
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// `phi^{(m)}(s)`.
    pub fn derivative(&self, m: usize, s: f64) -> f64 {
        match self.kind {
            ProfileKind::Sin => match m % 4 {
                0 => s.sin(),
                1 => s.cos(),
                2 => -s.sin(),
                _ => -s.cos(),
            },
            ProfileKind::Tanh => poly_eval(&self.tanh_polys[m], s.tanh()),
            ProfileKind::Linear => match m {
                0 => s,
                1 => 1.0,
                _ => 0.0,
            },
        }
    }

    /// `sup_s |phi^{(m)}(s)|` (an upper bound for tanh).
    pub fn sup_abs(&self, m: usize) -> f64 {
        self.sup[m]
    }
}

/// `F(x) = c + sum_j phi(<x, f_j>) g_j`,
/// `B(x) u = sum_i q_i <u, e_i> e_i + sum_j psi(<x, f_j>) <u, a_j> b_j`.
#[derive(Clone, Debug)]
pub struct CanonicalModel {
    dim: usize,
    noise_dim: usize,
    max_order: usize,
    features: Vec<Vec<f64>>,
    drift_outputs: Vec<Vec<f64>>,
    diffusion_outputs: Vec<Vec<f64>>,
    noise_couplings: Vec<Vec<f64>>,
    drift_offset: Vec<f64>,
    additive: Vec<f64>,
    drift_profile: Profile,
    diffusion_profile: Profile,
}

/// Raw ingredients of a [`CanonicalModel`].
#[derive(Clone, Debug)]
pub struct CanonicalParts {
    pub dim: usize,
    pub noise_dim: usize,
    pub max_order: usize,
    pub features: Vec<Vec<f64>>,
    pub drift_outputs: Vec<Vec<f64>>,
    pub diffusion_outputs: Vec<Vec<f64>>,
    pub noise_couplings: Vec<Vec<f64>>,
    pub drift_offset: Option<Vec<f64>>,
    /// Per-mode additive amplitudes `q_i`; only the first `noise_dim` are used.
    pub additive: Vec<f64>,
    pub drift_profile: ProfileKind,
    pub diffusion_profile: ProfileKind,
}

/// Settings for the built-in canonical model family.
#[derive(Clone, Debug)]
pub struct CanonicalDefaults {
    pub rank: usize,
    pub profile: ProfileKind,
    pub diffusion_profile: ProfileKind,
    /// `q_i = additive_scale * i^{-decay}`
    pub additive_decay: f64,
    pub additive_scale: f64,
    /// Feature coefficients decay like `i^{-feature_decay}` before normalization.
    pub feature_decay: f64,
    pub drift_scale: f64,
    pub diffusion_scale: f64,
    pub max_order: usize,
}

impl Default for CanonicalDefaults {
    fn default() -> Self {
        CanonicalDefaults {
            rank: 2,
            profile: ProfileKind::Sin,
            diffusion_profile: ProfileKind::Sin,
            additive_decay: 1.5,
            additive_scale: 1.0,
            // 0.4 = 2 * 0.2 keeps <e_m, f_j> / ||e_m||_{H_{-0.2}} flat in m
            feature_decay: 0.4,
            drift_scale: 1.0,
            diffusion_scale: 0.5,
            max_order: 3,
        }
    }
}

/// Sign pattern of the default features: all ones for `j = 0`, then
/// square waves of doubling period.
fn feature_sign(j: usize, i: usize) -> f64 {
    if j == 0 || (i >> (j - 1)).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl CanonicalModel {
    pub fn new(parts: CanonicalParts) -> Result<Self> {
        let CanonicalParts {
            dim,
            noise_dim,
            max_order,
            features,
            drift_outputs,
            diffusion_outputs,
            noise_couplings,
            drift_offset,
            additive,
            drift_profile,
            diffusion_profile,
        } = parts;
        let mut bad = Vec::new();
        if dim == 0 {
            bad.push("model dimension must be >= 1".to_string());
        }
        if noise_dim > dim {
            bad.push(format!("noise modes N_U = {noise_dim} exceed state modes N = {dim}"));
        }
        let rank = features.len();
        for (name, list) in [
            ("drift_outputs", &drift_outputs),
            ("diffusion_outputs", &diffusion_outputs),
            ("noise_couplings", &noise_couplings),
        ] {
            if list.len() != rank {
                bad.push(format!("{name} has {} vectors, rank is {rank}", list.len()));
            }
        }
        let drift_offset = drift_offset.unwrap_or_else(|| vec![0.0; dim]);
        for v in features
            .iter()
            .chain(&drift_outputs)
            .chain(&diffusion_outputs)
            .chain(&noise_couplings)
            .chain(std::iter::once(&drift_offset))
            .chain(std::iter::once(&additive))
        {
            if v.len() != dim {
                bad.push(format!("vector of length {} (expected {dim})", v.len()));
                break;
            }
            if v.iter().any(|c| !c.is_finite()) {
                bad.push("non-finite model coefficient".to_string());
                break;
            }
        }
        if !bad.is_empty() {
            return Err(Error::InvalidArgument(bad.join("; ")));
        }
        Ok(CanonicalModel {
            dim,
            noise_dim,
            max_order,
            features,
            drift_outputs,
            diffusion_outputs,
            noise_couplings,
            drift_offset,
            additive,
            drift_profile: Profile::new(drift_profile, max_order + 1),
            diffusion_profile: Profile::new(diffusion_profile, max_order + 1),
        })
    }

    /// The built-in family: normalized full-support features, outputs on
    /// the lowest modes, couplings `a_j = e_j`.
    pub fn with_defaults(dim: usize, noise_dim: usize, d: &CanonicalDefaults) -> Result<Self> {
        if d.rank > dim || d.rank > noise_dim {
            return Err(Error::InvalidArgument(format!(
                "rank {} exceeds the number of modes (N = {dim}, N_U = {noise_dim})",
                d.rank
            )));
        }
        let features = (0..d.rank)
            .map(|j| {
                let raw: Vec<f64> = (0..dim)
                    .map(|i| feature_sign(j, i) * ((i + 1) as f64).powf(-d.feature_decay))
                    .collect();
                let n = norm(&raw);
                raw.into_iter().map(|c| c / n).collect()
            })
            .collect();
        let unit = |j: usize, scale: f64| {
            let mut v = vec![0.0; dim];
            v[j] = scale;
            v
        };
        CanonicalModel::new(CanonicalParts {
            dim,
            noise_dim,
            max_order: d.max_order,
            features,
            drift_outputs: (0..d.rank).map(|j| unit(j, d.drift_scale)).collect(),
            diffusion_outputs: (0..d.rank).map(|j| unit(j, d.diffusion_scale)).collect(),
            noise_couplings: (0..d.rank).map(|j| unit(j, 1.0)).collect(),
            drift_offset: None,
            additive: (1..=dim)
                .map(|i| d.additive_scale * (i as f64).powf(-d.additive_decay))
                .collect(),
            drift_profile: d.profile,
            diffusion_profile: d.diffusion_profile,
        })
    }

    /// `F = 0`, `B = 0`.
    pub fn zero(dim: usize, noise_dim: usize, max_order: usize) -> Result<Self> {
        CanonicalModel::new(CanonicalParts {
            dim,
            noise_dim,
            max_order,
            features: vec![],
            drift_outputs: vec![],
            diffusion_outputs: vec![],
            noise_couplings: vec![],
            drift_offset: None,
            additive: vec![0.0; dim],
            drift_profile: ProfileKind::Linear,
            diffusion_profile: ProfileKind::Linear,
        })
    }

    pub fn rank(&self) -> usize {
        self.features.len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    /// Affine-linear coefficients have vanishing derivatives of order >= 2.
    pub fn is_affine(&self) -> bool {
        self.rank() == 0
            || (self.drift_profile.kind() == ProfileKind::Linear
                && self.diffusion_profile.kind() == ProfileKind::Linear)
    }

    fn coupling(&self, j: usize, dw: &[f64]) -> f64 {
        dot(&self.noise_couplings[j][..self.noise_dim], dw)
    }

    fn product(&self, j: usize, dirs: &[&[f64]]) -> f64 {
        dirs.iter().map(|d| dot(d, &self.features[j])).product()
    }
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    if a == 0.0 {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

impl ModelSpec for CanonicalModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    fn max_order(&self) -> usize {
        self.max_order
    }

    fn add_drift(&self, m: usize, x: &[f64], dirs: &[&[f64]], scale: f64, out: &mut [f64]) {
        if m == 0 {
            axpy(scale, &self.drift_offset, out);
        }
        for j in 0..self.rank() {
            let s = dot(x, &self.features[j]);
            let prod = self.product(j, dirs);
            let coef = self.drift_profile.derivative(m, s) * prod;
            axpy(scale * coef, &self.drift_outputs[j], out);
        }
    }

    fn add_diffusion(&self, m: usize, x: &[f64], dirs: &[&[f64]], dw: &[f64], scale: f64, out: &mut [f64]) {
        if m == 0 {
            for i in 0..self.noise_dim {
                out[i] += scale * self.additive[i] * dw[i];
            }
        }
        for j in 0..self.rank() {
            let s = dot(x, &self.features[j]);
            let prod = self.product(j, dirs);
            let coef = self.diffusion_profile.derivative(m, s) * prod * self.coupling(j, dw);
            axpy(scale * coef, &self.diffusion_outputs[j], out);
        }
    }

    fn cb_norms(&self, op: &DiagonalOperator, alpha: f64, beta: f64) -> Option<CbNorms> {
        if op.modes() != self.dim {
            return None;
        }
        let neg = |r: f64, v: &[f64]| op.h_norm_slice(-r, v);
        let fnorm: Vec<f64> = self.features.iter().map(|f| norm(f)).collect();
        let g: Vec<f64> = self.drift_outputs.iter().map(|v| neg(alpha, v)).collect();
        let b: Vec<f64> = self.diffusion_outputs.iter().map(|v| neg(beta, v)).collect();
        let a: Vec<f64> = self.noise_couplings.iter().map(|v| norm(&v[..self.noise_dim])).collect();

        let mut f0 = self.drift_offset.clone();
        for j in 0..self.rank() {
            axpy(self.drift_profile.derivative(0, 0.0), &self.drift_outputs[j], &mut f0);
        }
        let drift_at_zero = neg(alpha, &f0);

        let zero = vec![0.0; self.dim];
        let mut hs2 = 0.0;
        let mut dw = vec![0.0; self.noise_dim];
        for i in 0..self.noise_dim {
            dw[i] = 1.0;
            let mut col = vec![0.0; self.dim];
            self.add_diffusion(0, &zero, &[], &dw, 1.0, &mut col);
            hs2 += neg(beta, &col).powi(2);
            dw[i] = 0.0;
        }
        let diffusion_at_zero = hs2.sqrt();

        let additive_hs = (0..self.noise_dim)
            .map(|i| (self.additive[i] * op.shifted(i).powf(-beta)).powi(2))
            .sum::<f64>()
            .sqrt();
        let sum_terms = |prof: &Profile, m: usize, out_norms: &[f64], extra: Option<&[f64]>| -> f64 {
            (0..self.rank())
                .map(|j| {
                    let s = prof.sup_abs(m);
                    if s == 0.0 {
                        return 0.0;
                    }
                    s * fnorm[j].powi(m as i32) * out_norms[j] * extra.map_or(1.0, |e| e[j])
                })
                .sum()
        };
        let drift_sup = neg(alpha, &self.drift_offset) + sum_terms(&self.drift_profile, 0, &g, None);
        let diffusion_sup = additive_hs + sum_terms(&self.diffusion_profile, 0, &b, Some(&a));
        let orders = 1..=self.max_order + 1;
        Some(CbNorms {
            drift_at_zero,
            diffusion_at_zero,
            drift_sup,
            diffusion_sup,
            drift: orders
                .clone()
                .map(|m| sum_terms(&self.drift_profile, m, &g, None))
                .collect(),
            diffusion: orders
                .map(|m| sum_terms(&self.diffusion_profile, m, &b, Some(&a)))
                .collect(),
        })
    }
}

/// Maximum deviation between an order-`m` oracle and the central difference
/// of the order-`m-1` oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct FdOrderReport {
    pub order: usize,
    pub drift_deviation: f64,
    pub diffusion_deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FdReport {
    pub epsilon: f64,
    pub orders: Vec<FdOrderReport>,
}

impl FdReport {
    pub fn max_deviation(&self) -> f64 {
        self.orders
            .iter()
            .map(|o| o.drift_deviation.max(o.diffusion_deviation))
            .fold(0.0, f64::max)
    }
}

/// Validates the oracles of orders `1..=orders` against central finite
/// differences of the next-lower oracle along random unit directions.
/// Deviations are relative to `max(||exact||, 1)`.
pub fn fd_validate_model(model: &dyn ModelSpec, x: &SpectralVector, orders: usize, epsilon: f64) -> Result<FdReport> {
    if orders > model.max_order() {
        return Err(Error::Capability {
            requested: orders,
            available: model.max_order(),
        });
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be > 0")));
    }
    let n = model.dim();
    if x.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: x.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut random_unit = || {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = norm(&v);
        v.into_iter().map(|c| c / s).collect::<Vec<f64>>()
    };
    let deviation = |exact: &[f64], fd: &[f64]| {
        let diff: Vec<f64> = exact.iter().zip(fd).map(|(a, b)| a - b).collect();
        norm(&diff) / norm(exact).max(1.0)
    };
    let mut reports = Vec::new();
    for m in 1..=orders {
        let dirs: Vec<Vec<f64>> = (0..m).map(|_| random_unit()).collect();
        let refs: Vec<&[f64]> = dirs.iter().map(|d| &d[..]).collect();
        let (lower, last) = refs.split_at(m - 1);
        let shift = |sign: f64| -> Vec<f64> { x.iter().zip(last[0]).map(|(a, b)| a + sign * epsilon * b).collect() };
        let (xp, xm) = (shift(1.0), shift(-1.0));

        let mut exact = vec![0.0; n];
        model.add_drift(m, x, &refs, 1.0, &mut exact);
        let mut fd = vec![0.0; n];
        model.add_drift(m - 1, &xp, lower, 0.5 / epsilon, &mut fd);
        model.add_drift(m - 1, &xm, lower, -0.5 / epsilon, &mut fd);
        let drift_deviation = deviation(&exact, &fd);

        let mut diffusion_deviation = 0.0f64;
        let mut dw = vec![0.0; model.noise_dim()];
        for i in 0..model.noise_dim() {
            dw[i] = 1.0;
            let mut exact = vec![0.0; n];
            model.add_diffusion(m, x, &refs, &dw, 1.0, &mut exact);
            let mut fd = vec![0.0; n];
            model.add_diffusion(m - 1, &xp, lower, &dw, 0.5 / epsilon, &mut fd);
            model.add_diffusion(m - 1, &xm, lower, &dw, -0.5 / epsilon, &mut fd);
            diffusion_deviation = diffusion_deviation.max(deviation(&exact, &fd));
            dw[i] = 0.0;
        }
        reports.push(FdOrderReport {
            order: m,
            drift_deviation,
            diffusion_deviation,
        });
    }
    Ok(FdReport {
        epsilon,
        orders: reports,
    })
}
