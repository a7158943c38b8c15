use crate::error::{Error, Result};
use crate::simulator::Simulator;
use crate::special::{iota, ExponentSpec, IndexSet};
use crate::spectral::{norm, DiagonalOperator, SpectralVector};

use super::fit::{exponent_fit, PowerFit};
use super::mc::{path_norms, MCNormEstimate, MonteCarlo, NormTable};

/// Per-sample norms `||X^{k,(x,e_{m_1},...,e_{m_k})}_t||_H` for a schedule
/// of eigenbasis probes. One simulation serves every exponent choice.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeNorms {
    pub k: usize,
    pub times: Vec<f64>,
    pub probes: Vec<Vec<usize>>,
    pub tables: Vec<NormTable>,
}

fn check_schedule(n: usize, k: usize, schedule: &[Vec<usize>]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty mode schedule".into()));
    }
    for probe in schedule {
        if probe.len() != k {
            return Err(Error::SizeMismatch {
                expected: k,
                actual: probe.len(),
            });
        }
        if let Some(&m) = probe.iter().find(|&&m| m == 0 || m > n) {
            return Err(Error::IndexOutOfRange {
                index: m,
                valid: format!("1..={n}"),
            });
        }
    }
    Ok(())
}

/// Simulates the order-`k` system once per probe tuple of one-based modes.
pub fn probe_norms(
    sim: &Simulator<'_>,
    x: &SpectralVector,
    k: usize,
    mode_schedule: &[Vec<usize>],
    mc: MonteCarlo,
) -> Result<ProbeNorms> {
    let n = sim.model().dim();
    check_schedule(n, k, mode_schedule)?;
    mc.check()?;
    let plan = sim.plan(k)?;
    let mut tables = Vec::with_capacity(mode_schedule.len());
    for probe in mode_schedule {
        let dirs = probe
            .iter()
            .map(|&m| SpectralVector::basis(n, m, 1.0))
            .collect::<Result<Vec<_>>>()?;
        let rows = sim.run_samples(mc.samples, mc.seed, mc.exec, |noise| {
            Ok(path_norms(sim.simulate(&plan, x, &dirs, noise)?.top(), n))
        })?;
        tables.push(NormTable::from_rows(rows)?);
    }
    let grid = sim.grid();
    Ok(ProbeNorms {
        k,
        times: (0..=grid.steps()).map(|i| grid.time(i)).collect(),
        probes: mode_schedule.to_vec(),
        tables,
    })
}

/// Weighted ratio series of one probe tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRatio {
    pub modes: Vec<usize>,
    /// `t_n^iota ||X^k_{t_n}||_{L^p} / prod ||e_{m_i}||_{H_{-delta_i}}` for `n = 1..=steps`.
    pub weighted: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub sup: f64,
    pub sup_std_error: f64,
    /// Grid node index of the supremum.
    pub sup_index: usize,
    /// `||X^k_{t_1}||_{L^p} / prod ||e_{m_i}||_H` at the first grid node.
    pub unweighted_first: f64,
}

/// Regularity probe over a schedule of eigenbasis direction tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub k: usize,
    pub deltas: Vec<f64>,
    pub iota: f64,
    pub p: f64,
    pub probes: Vec<ProbeRatio>,
    pub sup: f64,
    pub sup_std_error: f64,
    /// Fit of the per-probe supremum against the largest probe mode.
    pub trend: Option<PowerFit>,
    /// Fit of the first-node unweighted ratio against the largest probe mode.
    pub unweighted_trend: Option<PowerFit>,
}

impl RatioReport {
    /// Weights `t^{iota^delta_N}` and normalizes by `prod ||e_{m_i}||_{H_{-delta_i}}`.
    pub fn from_norms(op: &DiagonalOperator, norms: &ProbeNorms, spec: &ExponentSpec, p: f64) -> Result<Self> {
        spec.validate()?;
        if spec.k() != norms.k {
            return Err(Error::SizeMismatch {
                expected: norms.k,
                actual: spec.k(),
            });
        }
        let weight = iota(spec, &IndexSet::All);
        let mut probes = Vec::with_capacity(norms.probes.len());
        for (modes, table) in norms.probes.iter().zip(&norms.tables) {
            let denom: f64 = modes
                .iter()
                .zip(&spec.deltas)
                .map(|(&m, &d)| op.shifted(m - 1).powf(-d))
                .product();
            let series: Vec<MCNormEstimate> = table.lp_series(p)?;
            let mut weighted = Vec::with_capacity(series.len().saturating_sub(1));
            let mut std_errors = Vec::with_capacity(weighted.capacity());
            for (t, est) in norms.times.iter().zip(&series).skip(1) {
                let w = t.powf(weight) / denom;
                weighted.push(w * est.value);
                std_errors.push(w * est.std_error);
            }
            let (i, &sup) = weighted
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .ok_or_else(|| Error::InvalidArgument("grid has no steps".into()))?;
            probes.push(ProbeRatio {
                modes: modes.clone(),
                sup,
                sup_std_error: std_errors[i],
                sup_index: i + 1,
                unweighted_first: series[1].value,
                weighted,
                std_errors,
            });
        }
        let best = probes
            .iter()
            .max_by(|a, b| a.sup.total_cmp(&b.sup))
            .expect("schedule is nonempty");
        let (sup, sup_std_error) = (best.sup, best.sup_std_error);
        let ms: Vec<f64> = probes
            .iter()
            .map(|r| *r.modes.iter().max().unwrap_or(&1) as f64)
            .collect();
        let sups: Vec<f64> = probes.iter().map(|r| r.sup).collect();
        let firsts: Vec<f64> = probes.iter().map(|r| r.unweighted_first).collect();
        Ok(RatioReport {
            k: spec.k(),
            deltas: spec.deltas.clone(),
            iota: weight,
            p,
            sup,
            sup_std_error,
            trend: exponent_fit(&ms, &sups).ok(),
            unweighted_trend: exponent_fit(&ms, &firsts).ok(),
            probes,
        })
    }

    /// `max / min` of the per-probe suprema.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .probes
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.sup), hi.max(r.sup)));
        hi / lo
    }
}

/// Weighted regularity ratios for eigenbasis probes.
pub fn regularity_probe(
    sim: &Simulator<'_>,
    x: &SpectralVector,
    spec: &ExponentSpec,
    p: f64,
    mc: MonteCarlo,
    mode_schedule: &[Vec<usize>],
) -> Result<RatioReport> {
    spec.validate()?;
    let norms = probe_norms(sim, x, spec.k(), mode_schedule, mc)?;
    RatioReport::from_norms(sim.operator(), &norms, spec, p)
}

/// Common-noise Lipschitz ratio in the initial value.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzReport {
    /// Exponent `iota^{(delta, 0)}_N` of the time weight.
    pub iota: f64,
    /// Weighted ratio at `t_1, ..., t_steps`.
    pub series: Vec<f64>,
    pub ratio: f64,
    pub std_error: f64,
}

/// `sup_t t^{iota^{(delta,0)}_N} ||X^{k,(x,u)}_t - X^{k,(y,u)}_t||_{L^p}
/// / (||x - y||_H prod ||u_i||_{H_{-delta_i}})`.
pub fn lipschitz_probe(
    sim: &Simulator<'_>,
    x: &SpectralVector,
    y: &SpectralVector,
    directions: &[SpectralVector],
    spec: &ExponentSpec,
    p: f64,
    mc: MonteCarlo,
) -> Result<LipschitzReport> {
    spec.validate()?;
    mc.check()?;
    let k = directions.len();
    if spec.k() != k {
        return Err(Error::SizeMismatch {
            expected: k,
            actual: spec.k(),
        });
    }
    if x.len() != y.len() {
        return Err(Error::SizeMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let gap = x.combine(1.0, y, -1.0).norm();
    if gap == 0.0 {
        return Err(Error::InvalidArgument("Lipschitz probe needs x != y".into()));
    }
    let op = sim.operator();
    let mut denom = gap;
    for (u, &d) in directions.iter().zip(&spec.deltas) {
        denom *= op.h_norm(-d, u)?;
    }
    if denom == 0.0 {
        return Err(Error::InvalidArgument("directions must be nonzero".into()));
    }
    let plan = sim.plan(k)?;
    let n = sim.model().dim();
    let rows = sim.run_samples(mc.samples, mc.seed, mc.exec, |noise| {
        let a = sim.simulate(&plan, x, directions, noise)?;
        let b = sim.simulate(&plan, y, directions, noise)?;
        let diff: Vec<f64> = a.top().iter().zip(b.top()).map(|(u, v)| u - v).collect();
        Ok(diff.chunks_exact(n).map(norm).collect::<Vec<f64>>())
    })?;
    let table = NormTable::from_rows(rows)?;
    let weight = iota(&spec.extended(0.0), &IndexSet::All);
    let grid = sim.grid();
    let mut series = Vec::with_capacity(grid.steps());
    let mut errors = Vec::with_capacity(grid.steps());
    for step in 1..=grid.steps() {
        let est = table.lp_norm(p, step)?;
        let w = grid.time(step).powf(weight) / denom;
        series.push(w * est.value);
        errors.push(w * est.std_error);
    }
    let (i, &ratio) = series
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::InvalidArgument("grid has no steps".into()))?;
    Ok(LipschitzReport {
        iota: weight,
        std_error: errors[i],
        ratio,
        series,
    })
}
