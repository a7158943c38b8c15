use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{CbNorms, ModelSpec};
use crate::partitions::enumerate_proper_partitions;
use crate::special::{beta_fn, chi, iota, theta, BoundParams, ExponentSpec, IndexSet};
use crate::spectral::DiagonalOperator;

struct Recursion<'a> {
    op: &'a DiagonalOperator,
    norms: &'a CbNorms,
    alpha: f64,
    beta: f64,
    t_final: f64,
    chi_a: f64,
    chi_b: f64,
    memo: HashMap<(Vec<u64>, u64), f64>,
}

impl Recursion<'_> {
    fn eval(&mut self, deltas: &[f64], p: f64) -> Result<f64> {
        let key = (deltas.iter().map(|d| d.to_bits()).collect::<Vec<_>>(), p.to_bits());
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let k = deltas.len();
        let spec = ExponentSpec::new(deltas.to_vec(), self.alpha, self.beta);
        let unavailable = || Error::Capability {
            requested: k,
            available: self.norms.drift.len().min(self.norms.diffusion.len()),
        };
        let params = BoundParams {
            alpha: self.alpha,
            beta: self.beta,
            lambda: iota(&spec, &IndexSet::All),
            p,
            t_final: self.t_final,
            eta: self.op.eta(),
            l: self.norms.drift_semi(1).ok_or_else(unavailable)?,
            l_hat: self.norms.diffusion_semi(1).ok_or_else(unavailable)?,
        };
        let prefactor = theta(&params, self.chi_a, self.chi_b)?;

        let bracket = if k == 1 {
            chi(self.op, deltas[0], self.t_final)?
        } else {
            let f_norm = self.norms.drift_full(k).ok_or_else(unavailable)?;
            let b_norm = self.norms.diffusion_full(k).ok_or_else(unavailable)?;
            let s: f64 = deltas.iter().sum();
            let a_term = self.chi_a * beta_fn(1.0 - self.alpha, 1.0 - s)? * f_norm;
            let b_term = self.chi_b * (p * (p - 1.0) / 2.0 * beta_fn(1.0 - 2.0 * self.beta, 1.0 - 2.0 * s)?).sqrt() * b_norm;
            let mut blocks = 0.0;
            for part in enumerate_proper_partitions(k)? {
                let q = p * part.len() as f64;
                let mut prod = 1.0;
                for block in part.blocks() {
                    let sub: Vec<f64> = block.iter().map(|&i| deltas[i - 1]).collect();
                    prod *= self.eval(&sub, q)?;
                }
                blocks += prod;
            }
            self.t_final.powi(k as i32).max(1.0) * (a_term + b_term) * blocks
        };
        let value = prefactor * bracket;
        self.memo.insert(key, value);
        Ok(value)
    }
}

/// Recursive a-priori bound on
/// `sup_u sup_t t^{iota^delta_N} ||X^{k,u}_t||_{L^p} / prod ||u_i||_{H_{-delta_i}}`.
///
/// Block quantities in the partition sum are bounded by the same formula at
/// their own order, restricted exponents and integrability `p * #blocks`.
/// Returns `f64::INFINITY` when a prefactor is infinite.
pub fn bound_rhs(op: &DiagonalOperator, norms: &CbNorms, spec: &ExponentSpec, p: f64, t_final: f64) -> Result<f64> {
    spec.validate()?;
    if spec.k() == 0 {
        return Err(Error::InvalidArgument("bound needs k >= 1".into()));
    }
    let mut rec = Recursion {
        op,
        norms,
        alpha: spec.alpha,
        beta: spec.beta,
        t_final,
        chi_a: chi(op, spec.alpha, t_final)?,
        chi_b: chi(op, spec.beta, t_final)?,
        memo: HashMap::new(),
    };
    rec.eval(&spec.deltas, p)
}

/// [`bound_rhs`] with the model's certified coefficient norms.
pub fn bound_rhs_for_model(
    op: &DiagonalOperator,
    model: &dyn ModelSpec,
    spec: &ExponentSpec,
    p: f64,
    t_final: f64,
) -> Result<f64> {
    if spec.k() > model.max_order() {
        return Err(Error::Capability {
            requested: spec.k(),
            available: model.max_order(),
        });
    }
    let norms = model.cb_norms(op, spec.alpha, spec.beta).ok_or(Error::Capability {
        requested: spec.k(),
        available: 0,
    })?;
    bound_rhs(op, &norms, spec, p, t_final)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CanonicalDefaults, CanonicalModel};
    use crate::special::gen_exp;
    use approx::assert_relative_eq;

    fn lap() -> DiagonalOperator {
        DiagonalOperator::dirichlet_laplacian(64).unwrap()
    }

    fn canonical() -> CanonicalModel {
        CanonicalModel::with_defaults(64, 64, &CanonicalDefaults::default()).unwrap()
    }

    #[test]
    fn zero_model_gives_one() {
        let op = lap();
        let model = CanonicalModel::zero(64, 64, 3).unwrap();
        let spec = ExponentSpec::new(vec![0.0], 0.0, 0.0);
        assert_eq!(bound_rhs_for_model(&op, &model, &spec, 2.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn drift_only_branch() {
        let op = lap();
        let d = CanonicalDefaults {
            diffusion_scale: 0.0,
            additive_scale: 0.0,
            ..CanonicalDefaults::default()
        };
        let model = CanonicalModel::with_defaults(64, 64, &d).unwrap();
        let alpha = 0.25;
        let spec = ExponentSpec::new(vec![0.0], alpha, 0.0);
        let norms = model.cb_norms(&op, alpha, 0.0).unwrap();
        assert_eq!(norms.diffusion_semi(1), Some(0.0));
        let t = 1.0;
        let ca = chi(&op, alpha, t).unwrap();
        let expected = chi(&op, 0.0, t).unwrap() * gen_exp(0.0, alpha, ca * norms.drift_semi(1).unwrap() * t.powf(1.0 - alpha)).unwrap();
        assert_relative_eq!(bound_rhs(&op, &norms, &spec, 2.0, t).unwrap(), expected, max_relative = 1e-15);
    }

    /// Straight-line transcription of the k = 2 bound, sharing only the
    /// primitive special functions with the recursive evaluator.
    #[allow(clippy::too_many_arguments)]
    fn k2_oracle(op: &DiagonalOperator, n: &CbNorms, d1: f64, d2: f64, a: f64, b: f64, p: f64, t: f64) -> f64 {
        let ca = chi(op, a, t).unwrap();
        let cb = chi(op, b, t).unwrap();
        let l = n.drift[0];
        let lh = n.diffusion[0];
        let th = |lam: f64, q: f64| -> f64 {
            if lh == 0.0 {
                return gen_exp(lam, a, ca * l * t.powf(1.0 - a)).unwrap();
            }
            let inner = ca * l * 2f64.sqrt() * t.powf(1.0 - a) / (1.0 - a).sqrt() + cb * lh * (q * (q - 1.0) * t.powf(1.0 - 2.0 * b)).sqrt();
            (2.0 * gen_exp(2.0 * lam, a.max(2.0 * b), inner * inner).unwrap()).sqrt()
        };
        let corr = (1.0 - a).min(0.5 - b);
        let s = d1 + d2;
        let f2 = n.drift_at_zero + n.drift[0] + n.drift[1];
        let b2 = n.diffusion_at_zero + n.diffusion[0] + n.diffusion[1];
        let one = |d: f64| th(d, 2.0 * p) * chi(op, d, t).unwrap();
        th(s - corr, p)
            * t.powi(2).max(1.0)
            * (ca * beta_fn(1.0 - a, 1.0 - s).unwrap() * f2
                + cb * (p * (p - 1.0) / 2.0 * beta_fn(1.0 - 2.0 * b, 1.0 - 2.0 * s).unwrap()).sqrt() * b2)
            * one(d1)
            * one(d2)
    }

    #[test]
    fn k2_matches_transcription() {
        let op = lap();
        let model = canonical();
        for &(d1, d2, a, b) in &[(0.0, 0.0, 0.0, 0.0), (0.2, 0.1, 0.0, 0.0), (0.1, 0.3, 0.3, 0.2)] {
            let norms = model.cb_norms(&op, a, b).unwrap();
            let spec = ExponentSpec::new(vec![d1, d2], a, b);
            for &(p, t) in &[(2.0, 1.0), (3.0, 0.5)] {
                let got = bound_rhs(&op, &norms, &spec, p, t).unwrap();
                let want = k2_oracle(&op, &norms, d1, d2, a, b, p, t);
                assert!(got.is_finite() && got > 0.0);
                assert_relative_eq!(got, want, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn monotone_in_inputs() {
        let op = lap();
        let base = canonical().cb_norms(&op, 0.0, 0.0).unwrap();
        for k in 1..=3 {
            let spec = ExponentSpec::new(vec![0.1; k], 0.0, 0.0);
            let b0 = bound_rhs(&op, &base, &spec, 2.0, 1.0).unwrap();
            for m in 0..base.drift.len() {
                let mut n = base.clone();
                n.drift[m] *= 1.5;
                assert!(bound_rhs(&op, &n, &spec, 2.0, 1.0).unwrap() >= b0);
                let mut n = base.clone();
                n.diffusion[m] *= 1.5;
                assert!(bound_rhs(&op, &n, &spec, 2.0, 1.0).unwrap() >= b0);
            }
            let mut prev = 0.0;
            for t in [0.25, 0.5, 1.0, 2.0] {
                let v = bound_rhs(&op, &base, &spec, 2.0, t).unwrap();
                assert!(v >= prev);
                prev = v;
            }
            let mut prev = 0.0;
            for p in [2.0, 3.0, 4.0, 8.0] {
                let v = bound_rhs(&op, &base, &spec, p, 1.0).unwrap();
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn infinity_and_capability() {
        let op = lap();
        let mut huge = canonical().cb_norms(&op, 0.0, 0.0).unwrap();
        huge.drift[0] = 1e300;
        let spec = ExponentSpec::new(vec![0.0, 0.0], 0.0, 0.0);
        assert_eq!(bound_rhs(&op, &huge, &spec, 2.0, 1.0).unwrap(), f64::INFINITY);

        let mut short = canonical().cb_norms(&op, 0.0, 0.0).unwrap();
        short.drift.truncate(1);
        assert!(matches!(bound_rhs(&op, &short, &spec, 2.0, 1.0), Err(Error::Capability { .. })));
        let model = canonical();
        let spec4 = ExponentSpec::new(vec![0.0; 4], 0.0, 0.0);
        assert!(matches!(
            bound_rhs_for_model(&op, &model, &spec4, 2.0, 1.0),
            Err(Error::Capability { .. })
        ));
        assert!(bound_rhs(&op, &short, &ExponentSpec::new(vec![0.3, 0.3], 0.0, 0.0), 2.0, 1.0).is_err());
    }
}
