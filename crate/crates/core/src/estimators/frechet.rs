use crate::error::{Error, Result};
use crate::simulator::{Simulator, Subset};
use crate::spectral::{norm, SpectralVector};

use super::fit::{exponent_fit, PowerFit};
use super::mc::{MonteCarlo, NormTable};

/// Finite-difference remainders `R(eps)` down an epsilon ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct FrechetTable {
    pub k: usize,
    pub p: f64,
    pub eps: Vec<f64>,
    /// `sup_n ||Delta(eps) - eps X^k_{t_n}||_{L^p} / (eps prod ||u_i||_H)`
    pub remainders: Vec<f64>,
    /// Delta-method standard error at the maximizing node.
    pub std_errors: Vec<f64>,
    /// Fit of `log R` against `log eps`; `None` below four rungs or when
    /// some remainder vanishes.
    pub fit: Option<PowerFit>,
}

impl FrechetTable {
    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }
}

fn check_ladder(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::InvalidArgument("empty epsilon ladder".into()));
    }
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument("epsilon ladder must be positive and finite".into()));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("epsilon ladder must be strictly decreasing".into()));
    }
    Ok(())
}

/// Compares the order-`k` derivative with a forward difference of the
/// order-`(k-1)` derivative in the last direction, under common noise.
///
/// For `k = 1` the difference is `X^{x + eps u_1} - X^x`; for `k > 1` it is
/// `X^{k-1,(x + eps u_k, u_1..u_{k-1})} - X^{k-1,(x, u_1..u_{k-1})}`.
pub fn fd_frechet_check(
    sim: &Simulator<'_>,
    x: &SpectralVector,
    directions: &[SpectralVector],
    p: f64,
    mc: MonteCarlo,
    eps_ladder: &[f64],
) -> Result<FrechetTable> {
    let k = directions.len();
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one direction".into()));
    }
    check_ladder(eps_ladder)?;
    mc.check()?;
    let plan_k = sim.plan(k)?;
    let plan_lo = sim.plan(k - 1)?;
    let u_k = &directions[k - 1];
    let lower = &directions[..k - 1];
    let dim = sim.model().dim();
    let scale: f64 = directions.iter().map(|u| u.norm()).product();
    if scale == 0.0 {
        return Err(Error::InvalidArgument("directions must be nonzero".into()));
    }

    // per sample: [eps][time] remainder norms
    let per_sample = sim.run_samples(mc.samples, mc.seed, mc.exec, |noise| {
        let exact = sim.simulate(&plan_k, x, directions, noise)?;
        let top = exact.top();
        let base = exact.path(Subset::full(k - 1)).expect("lower path");
        let mut rows = Vec::with_capacity(eps_ladder.len());
        let mut diff = vec![0.0; dim];
        for &eps in eps_ladder {
            let shifted = sim.simulate(&plan_lo, &x.combine(1.0, u_k, eps), lower, noise)?;
            let moved = shifted.top();
            let norms: Vec<f64> = (0..=sim.grid().steps())
                .map(|n| {
                    let r = n * dim..(n + 1) * dim;
                    for (((d, a), b), c) in diff.iter_mut().zip(&moved[r.clone()]).zip(&base[r.clone()]).zip(&top[r]) {
                        *d = (a - b) - eps * c;
                    }
                    norm(&diff) / (eps * scale)
                })
                .collect();
            rows.push(norms);
        }
        Ok(rows)
    })?;

    let mut remainders = Vec::with_capacity(eps_ladder.len());
    let mut std_errors = Vec::with_capacity(eps_ladder.len());
    for j in 0..eps_ladder.len() {
        let table = NormTable::from_rows(per_sample.iter().map(|rows| rows[j].clone()).collect())?;
        let best = table
            .lp_series(p)?
            .into_iter()
            .skip(1)
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .ok_or_else(|| Error::InvalidArgument("grid has no steps".into()))?;
        remainders.push(best.value);
        std_errors.push(best.std_error);
    }
    let fit = exponent_fit(eps_ladder, &remainders).ok();
    Ok(FrechetTable {
        k,
        p,
        eps: eps_ladder.to_vec(),
        remainders,
        std_errors,
        fit,
    })
}
