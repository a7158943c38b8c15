use crate::error::{Error, Result};
use crate::parallel::{pairwise_sum, Execution};
use crate::simulator::{DerivativeSystem, Subset};
use crate::spectral::norm;

/// Sample count, base seed and scheduling of a Monte Carlo run. Sample `i`
/// uses the noise seeded with `seed + i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl MonteCarlo {
    pub fn new(samples: usize, seed: u64, exec: Execution) -> Self {
        MonteCarlo { samples, seed, exec }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "Monte Carlo needs M >= 2 samples, got {}",
                self.samples
            )));
        }
        Ok(())
    }
}

/// H-norms of a flattened path at every grid node.
pub(crate) fn path_norms(path: &[f64], dim: usize) -> Vec<f64> {
    path.chunks_exact(dim).map(norm).collect()
}

/// `(E ||X_t||^p)^{1/p}` with its delta-method standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MCNormEstimate {
    pub p: f64,
    pub t_index: usize,
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

fn pow_p(v: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < 64.0 {
        v.powi(p as i32)
    } else {
        v.powf(p)
    }
}

/// L^p norm estimate from per-sample H-norms.
pub fn lp_norm_from_norms(norms: &[f64], p: f64, t_index: usize) -> Result<MCNormEstimate> {
    if norms.is_empty() {
        return Err(Error::InvalidArgument("empty ensemble".into()));
    }
    let m = norms.len() as f64;
    let moments: Vec<f64> = norms.iter().map(|&v| pow_p(v, p)).collect();
    let mean = pairwise_sum(&moments) / m;
    let value = mean.powf(1.0 / p);
    // identical samples (deterministic ensembles) get an exact zero
    let constant = moments.iter().all(|y| *y == moments[0]);
    let std_error = if !constant && mean > 0.0 {
        let dev: Vec<f64> = moments.iter().map(|y| (y - mean) * (y - mean)).collect();
        let se_mean = (pairwise_sum(&dev) / (m - 1.0) / m).sqrt();
        value / (p * mean) * se_mean
    } else {
        0.0
    };
    Ok(MCNormEstimate {
        p,
        t_index,
        value,
        std_error,
        samples: norms.len(),
    })
}

/// L^p(P; H) norm of one subset path at grid node `t_index` across an ensemble.
pub fn mc_lp_norm(ensemble: &[DerivativeSystem], subset: Subset, p: f64, t_index: usize) -> Result<MCNormEstimate> {
    let norms = ensemble
        .iter()
        .map(|sys| {
            sys.state(subset, t_index)
                .map(norm)
                .ok_or_else(|| Error::Scheduling(subset.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    lp_norm_from_norms(&norms, p, t_index)
}

/// Per-sample, per-time H-norms, sample-major.
#[derive(Clone, Debug, PartialEq)]
pub struct NormTable {
    times: usize,
    data: Vec<f64>,
}

impl NormTable {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let times = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || rows.iter().any(|r| r.len() != times) {
            return Err(Error::InvalidArgument("ragged or empty norm table".into()));
        }
        Ok(NormTable {
            times,
            data: rows.concat(),
        })
    }

    pub fn samples(&self) -> usize {
        self.data.len() / self.times
    }

    pub fn times(&self) -> usize {
        self.times
    }

    pub fn column(&self, t: usize) -> Vec<f64> {
        self.data.iter().skip(t).step_by(self.times).copied().collect()
    }

    pub fn lp_norm(&self, p: f64, t: usize) -> Result<MCNormEstimate> {
        lp_norm_from_norms(&self.column(t), p, t)
    }

    /// Estimates at every grid node.
    pub fn lp_series(&self, p: f64) -> Result<Vec<MCNormEstimate>> {
        (0..self.times).map(|t| self.lp_norm(p, t)).collect()
    }
}
