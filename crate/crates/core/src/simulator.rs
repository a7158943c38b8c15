//! Exponential Euler simulation of the base process `X^{0,x}` and of every
//! derivative process `X^{#I,(x,u_I)}`, `I ⊆ {1..k}`, under one shared noise
//! realization.
//!
//! One step of a subset path reads
//!
//! ```text
//! X^I_{n+1} = e^{hA} ( X^I_n + h D_I(n) + S_I(n) ΔW_n )
//! ```
//!
//! where `D_I` (resp. `S_I`) is the sum over partitions `ϖ` of `I` of
//! `F^{(#ϖ)}(X^∅_n)` (resp. `B^{(#ϖ)}(X^∅_n)`) applied to the block paths.
//! For `I = ∅` the bracket is `X_n + h F(X_n) + B(X_n) ΔW_n`. The scheme is the
//! exact k-th derivative of the discrete base map, so it is multilinear and
//! symmetric in the directions.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::parallel::{map_indexed, Execution};
use crate::partitions::{enumerate_partitions, relabel_to_subset};
use crate::spectral::{DiagonalOperator, SpectralVector};

/// Largest derivative order the subset bitmask supports.
pub const MAX_ORDER: usize = 12;

/// Uniform grid `t_n = n T / steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> Result<Self> {
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::InvalidArgument(format!("horizon T = {t_final} must be > 0")));
        }
        if steps == 0 {
            return Err(Error::InvalidArgument("steps must be >= 1".into()));
        }
        Ok(TimeGrid { t_final, steps })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn h(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.h()
    }
}

/// Brownian increments `ΔW_n^i ~ N(0, h)`, row-major `[steps × N_U]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSample {
    increments: Vec<f64>,
    noise_dim: usize,
    seed: u64,
}

impl NoiseSample {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    pub fn steps(&self) -> usize {
        self.increments.len().checked_div(self.noise_dim).unwrap_or(0)
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.increments[n * self.noise_dim..(n + 1) * self.noise_dim]
    }
}

/// Deterministic increments from a ChaCha8 stream keyed by `seed`.
pub fn sample_noise(seed: u64, grid: &TimeGrid, noise_dim: usize) -> NoiseSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = grid.h().sqrt();
    let increments = (0..grid.steps() * noise_dim)
        .map(|_| sd * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
        .collect();
    NoiseSample {
        increments,
        noise_dim,
        seed,
    }
}

/// Subset of `{1, ..., k}` as a bitmask (bit `i - 1` for element `i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    /// `{1, ..., k}`
    pub fn full(k: usize) -> Subset {
        Subset(((1u64 << k) - 1) as u32)
    }

    pub fn from_indices(indices: &[usize]) -> Result<Subset> {
        let mut bits = 0u32;
        for &i in indices {
            if i == 0 || i > MAX_ORDER {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    valid: format!("1..={MAX_ORDER}"),
                });
            }
            bits |= 1 << (i - 1);
        }
        Ok(Subset(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i >= 1 && self.0 & (1 << (i - 1)) != 0
    }

    /// Sorted one-based elements.
    pub fn indices(self) -> Vec<usize> {
        (1..=32).filter(|&i| self.contains(i)).collect()
    }

    /// Image under a permutation given as `perm[i - 1] = sigma(i)`.
    pub fn permuted(self, perm: &[usize]) -> Subset {
        Subset(self.indices().iter().fold(0, |acc, &i| acc | 1 << (perm[i - 1] - 1)))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// One partition of a subset: its block count and the blocks themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionTerm {
    pub blocks: Vec<Subset>,
}

impl PartitionTerm {
    pub fn order(&self) -> usize {
        self.blocks.len()
    }
}

/// Partition families of every subset of `{1..k}`, relabeled onto the subset,
/// and the simulation schedule (increasing subset size).
#[derive(Clone, Debug)]
pub struct DerivativePlan {
    k: usize,
    schedule: Vec<Subset>,
    terms: Vec<Vec<PartitionTerm>>,
}

impl DerivativePlan {
    pub fn new(k: usize) -> Result<Self> {
        if k > MAX_ORDER {
            return Err(Error::PartitionGuard { k, max: MAX_ORDER });
        }
        let count = 1usize << k;
        let mut schedule: Vec<Subset> = (0..count as u32).map(Subset).collect();
        schedule.sort_by_key(|s| (s.len(), s.0));
        let families: Vec<_> = (0..=k).map(enumerate_partitions).collect::<Result<_>>()?;
        let mut terms = vec![Vec::new(); count];
        for &s in &schedule[1..] {
            let ground = s.indices();
            terms[s.0 as usize] = families[ground.len()]
                .iter()
                .map(|p| {
                    let r = relabel_to_subset(p, &ground)?;
                    Ok(PartitionTerm {
                        blocks: r.blocks.iter().map(|b| Subset::from_indices(b)).collect::<Result<_>>()?,
                    })
                })
                .collect::<Result<_>>()?;
        }
        Ok(DerivativePlan { k, schedule, terms })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn schedule(&self) -> &[Subset] {
        &self.schedule
    }

    /// Partitions of `subset` (empty for `∅`).
    pub fn terms(&self, subset: Subset) -> &[PartitionTerm] {
        &self.terms[subset.0 as usize]
    }
}

fn gather_rows<'a>(
    term: &PartitionTerm,
    rows: &dyn Fn(Subset) -> Option<&'a [f64]>,
    buf: &mut Vec<&'a [f64]>,
) -> Result<()> {
    buf.clear();
    for &b in &term.blocks {
        buf.push(rows(b).ok_or_else(|| Error::Scheduling(b.to_string()))?);
    }
    Ok(())
}

/// `sum_{ϖ} F^{(#ϖ)}(base)(X^{I_1}, ..., X^{I_#ϖ})`, reading block states via `rows`.
pub fn assemble_derivative_drift<'a>(
    model: &dyn ModelSpec,
    terms: &[PartitionTerm],
    base: &[f64],
    rows: &dyn Fn(Subset) -> Option<&'a [f64]>,
) -> Result<SpectralVector> {
    let mut out = vec![0.0; model.dim()];
    let mut dirs = Vec::new();
    for term in terms {
        gather_rows(term, rows, &mut dirs)?;
        model.add_drift(term.order(), base, &dirs, 1.0, &mut out);
    }
    SpectralVector::new(out)
}

/// Diffusion analogue of [`assemble_derivative_drift`] applied to the noise vector `dw`.
pub fn assemble_derivative_diffusion<'a>(
    model: &dyn ModelSpec,
    terms: &[PartitionTerm],
    base: &[f64],
    rows: &dyn Fn(Subset) -> Option<&'a [f64]>,
    dw: &[f64],
) -> Result<SpectralVector> {
    let mut out = vec![0.0; model.dim()];
    let mut dirs = Vec::new();
    for term in terms {
        gather_rows(term, rows, &mut dirs)?;
        model.add_diffusion(term.order(), base, &dirs, dw, 1.0, &mut out);
    }
    SpectralVector::new(out)
}

/// The simulated family `{X^{#I,(x,u_I)} : I ⊆ {1..k}}` for one noise sample.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeSystem {
    k: usize,
    dim: usize,
    steps: usize,
    seed: u64,
    x: SpectralVector,
    directions: Vec<SpectralVector>,
    paths: Vec<Vec<f64>>,
}

impl DerivativeSystem {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn x(&self) -> &SpectralVector {
        &self.x
    }

    pub fn directions(&self) -> &[SpectralVector] {
        &self.directions
    }

    /// Row-major path `[steps + 1 × N]` of `subset`.
    pub fn path(&self, subset: Subset) -> Option<&[f64]> {
        self.paths.get(subset.0 as usize).map(|p| &p[..])
    }

    /// State of `subset` at grid node `n`.
    pub fn state(&self, subset: Subset, n: usize) -> Option<&[f64]> {
        self.path(subset).map(|p| &p[n * self.dim..(n + 1) * self.dim])
    }

    /// The k-th derivative path `X^{k,(x,u_1..u_k)}`.
    pub fn top(&self) -> &[f64] {
        &self.paths[Subset::full(self.k).0 as usize]
    }

    pub fn subsets(&self) -> impl Iterator<Item = Subset> + '_ {
        (0..self.paths.len() as u32).map(Subset)
    }
}

/// Operator, coefficients and grid with the precomputed step factors.
pub struct Simulator<'a> {
    op: &'a DiagonalOperator,
    model: &'a dyn ModelSpec,
    grid: TimeGrid,
    decay: Vec<f64>,
}

impl<'a> Simulator<'a> {
    pub fn new(op: &'a DiagonalOperator, model: &'a dyn ModelSpec, grid: TimeGrid) -> Result<Self> {
        if model.dim() != op.modes() {
            return Err(Error::SizeMismatch {
                expected: op.modes(),
                actual: model.dim(),
            });
        }
        if model.noise_dim() > model.dim() {
            return Err(Error::InvalidArgument(format!(
                "noise modes N_U = {} exceed state modes N = {}",
                model.noise_dim(),
                model.dim()
            )));
        }
        let decay = op.semigroup_factors(grid.h())?;
        Ok(Simulator { op, model, grid, decay })
    }

    pub fn operator(&self) -> &DiagonalOperator {
        self.op
    }

    pub fn model(&self) -> &dyn ModelSpec {
        self.model
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn noise(&self, seed: u64) -> NoiseSample {
        sample_noise(seed, &self.grid, self.model.noise_dim())
    }

    pub fn plan(&self, k: usize) -> Result<DerivativePlan> {
        if k > self.model.max_order() {
            return Err(Error::Capability {
                requested: k,
                available: self.model.max_order(),
            });
        }
        DerivativePlan::new(k)
    }

    /// Base state transition `X_n -> X_{n+1}` for the noise row of step `n`.
    pub fn step_base(&self, n: usize, state: &[f64], dw: &[f64]) -> Result<Vec<f64>> {
        let mut next = state.to_vec();
        self.model.add_drift(0, state, &[], self.grid.h(), &mut next);
        self.model.add_diffusion(0, state, &[], dw, 1.0, &mut next);
        for (v, e) in next.iter_mut().zip(&self.decay) {
            *v *= e;
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                subset: Subset::EMPTY.to_string(),
                step: n + 1,
            });
        }
        Ok(next)
    }

    pub fn simulate(
        &self,
        plan: &DerivativePlan,
        x: &SpectralVector,
        directions: &[SpectralVector],
        noise: &NoiseSample,
    ) -> Result<DerivativeSystem> {
        let n = self.model.dim();
        let k = plan.k();
        let steps = self.grid.steps();
        if directions.len() != k {
            return Err(Error::SizeMismatch {
                expected: k,
                actual: directions.len(),
            });
        }
        if k > self.model.max_order() {
            return Err(Error::Capability {
                requested: k,
                available: self.model.max_order(),
            });
        }
        for v in std::iter::once(x).chain(directions) {
            if v.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    actual: v.len(),
                });
            }
        }
        if noise.noise_dim() != self.model.noise_dim() || noise.steps() != steps {
            return Err(Error::InvalidArgument(format!(
                "noise sample is [{} × {}], grid/model need [{} × {}]",
                noise.steps(),
                noise.noise_dim(),
                steps,
                self.model.noise_dim()
            )));
        }
        let h = self.grid.h();
        let mut paths: Vec<Vec<f64>> = vec![Vec::new(); 1 << k];
        let mut buf = vec![0.0; n];
        for &subset in plan.schedule() {
            let mut path = vec![0.0; (steps + 1) * n];
            match subset.len() {
                0 => path[..n].copy_from_slice(x),
                1 => path[..n].copy_from_slice(&directions[subset.indices()[0] - 1]),
                _ => {}
            }
            let terms = plan.terms(subset);
            for step in 0..steps {
                let (done, rest) = path.split_at_mut((step + 1) * n);
                let cur = &done[step * n..];
                buf.copy_from_slice(cur);
                let dw = noise.row(step);
                if subset.is_empty() {
                    self.model.add_drift(0, cur, &[], h, &mut buf);
                    self.model.add_diffusion(0, cur, &[], dw, 1.0, &mut buf);
                } else {
                    let base = &paths[0][step * n..(step + 1) * n];
                    let mut dirs: Vec<&[f64]> = Vec::with_capacity(k);
                    for term in terms {
                        dirs.clear();
                        for &b in &term.blocks {
                            if b == subset {
                                dirs.push(cur);
                            } else {
                                let p = &paths[b.0 as usize];
                                if p.is_empty() {
                                    return Err(Error::Scheduling(b.to_string()));
                                }
                                dirs.push(&p[step * n..(step + 1) * n]);
                            }
                        }
                        self.model.add_drift(term.order(), base, &dirs, h, &mut buf);
                        self.model.add_diffusion(term.order(), base, &dirs, dw, 1.0, &mut buf);
                    }
                }
                let next = &mut rest[..n];
                let mut finite = true;
                for ((o, b), e) in next.iter_mut().zip(&buf).zip(&self.decay) {
                    *o = b * e;
                    finite &= o.is_finite();
                }
                if !finite {
                    return Err(Error::NonFinite {
                        subset: subset.to_string(),
                        step: step + 1,
                    });
                }
            }
            paths[subset.0 as usize] = path;
        }
        Ok(DerivativeSystem {
            k,
            dim: n,
            steps,
            seed: noise.seed(),
            x: x.clone(),
            directions: directions.to_vec(),
            paths,
        })
    }

    /// Runs `f` for the seeds `base_seed + 0, ..., base_seed + samples - 1`
    /// and returns the results in seed order. Failures are collected with
    /// their seeds.
    pub fn run_samples<T, F>(&self, samples: usize, base_seed: u64, exec: Execution, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&NoiseSample) -> Result<T> + Sync + Send,
    {
        let results = map_indexed(samples, exec, |i| {
            let seed = base_seed.wrapping_add(i as u64);
            f(&self.noise(seed)).map_err(|e| (seed, e.to_string()))
        });
        let mut ok = Vec::with_capacity(samples);
        let mut failures = Vec::new();
        for r in results {
            match r {
                Ok(v) => ok.push(v),
                Err(e) => failures.push(e),
            }
        }
        if failures.is_empty() {
            Ok(ok)
        } else {
            Err(Error::Samples(failures))
        }
    }
}

/// Simulates the full derivative system of order `k` under `noise`.
pub fn simulate_system(
    op: &DiagonalOperator,
    model: &dyn ModelSpec,
    grid: &TimeGrid,
    x: &SpectralVector,
    directions: &[SpectralVector],
    k: usize,
    noise: &NoiseSample,
) -> Result<DerivativeSystem> {
    let sim = Simulator::new(op, model, *grid)?;
    let plan = sim.plan(k)?;
    sim.simulate(&plan, x, directions, noise)
}

/// `samples` independent systems with seeds `base_seed + i`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_ensemble(
    op: &DiagonalOperator,
    model: &dyn ModelSpec,
    grid: &TimeGrid,
    x: &SpectralVector,
    directions: &[SpectralVector],
    k: usize,
    samples: usize,
    base_seed: u64,
    exec: Execution,
) -> Result<Vec<DerivativeSystem>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("ensemble needs at least one sample".into()));
    }
    let sim = Simulator::new(op, model, *grid)?;
    let plan = sim.plan(k)?;
    sim.run_samples(samples, base_seed, exec, |noise| sim.simulate(&plan, x, directions, noise))
}
