//! Strict TOML experiment configuration.
//!
//! ```toml
//! seed = 7
//! M = 1024
//! k = 2
//! deltas = [0.2, 0.1]
//! p = 2.0
//!
//! [operator]
//! kind = "dirichlet-laplacian"
//! modes = 64
//!
//! [model]
//! kind = "canonical"
//! rank = 2
//! profile = "sin"
//! additive = { decay = 1.5 }
//!
//! [grid]
//! T = 1.0
//! steps = 256
//! ```
//!
//! Every cross-field constraint is checked before anything is simulated,
//! and all violations are reported together.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{CanonicalDefaults, CanonicalModel, CanonicalParts, ModelSpec, ProfileKind};
use crate::parallel::Execution;
use crate::simulator::{TimeGrid, MAX_ORDER};
use crate::special::ExponentSpec;
use crate::spectral::{DiagonalOperator, SpectralVector};

pub const DEFAULT_MODES: usize = 64;
pub const DEFAULT_STEPS: usize = 256;
pub const DEFAULT_SAMPLES: usize = 1024;
pub const DEFAULT_P: f64 = 2.0;
pub const DEFAULT_EPS_LADDER: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
const DEFAULT_PROBE_MODES: [usize; 6] = [1, 2, 4, 8, 16, 32];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    operator: Option<RawOperator>,
    model: Option<RawModel>,
    grid: Option<RawGrid>,
    k: Option<usize>,
    deltas: Option<Vec<f64>>,
    p: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    #[serde(rename = "M", alias = "samples")]
    samples: Option<usize>,
    seed: Option<u64>,
    noise_modes: Option<usize>,
    x: Option<Vec<f64>>,
    y: Option<Vec<f64>>,
    directions: Option<RawDirections>,
    mode_schedule: Option<Vec<Vec<usize>>>,
    eps_ladder: Option<Vec<f64>>,
    execution: Option<Execution>,
    max_spread: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    kind: Option<String>,
    modes: Option<usize>,
    eigenvalues: Option<Vec<f64>>,
    eta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    kind: Option<String>,
    rank: Option<usize>,
    profile: Option<String>,
    diffusion_profile: Option<String>,
    additive: Option<RawAdditive>,
    feature_decay: Option<f64>,
    drift_scale: Option<f64>,
    diffusion_scale: Option<f64>,
    n_max: Option<usize>,
    features: Option<Vec<Vec<f64>>>,
    drift_outputs: Option<Vec<Vec<f64>>>,
    diffusion_outputs: Option<Vec<Vec<f64>>>,
    noise_couplings: Option<Vec<Vec<f64>>>,
    drift_offset: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAdditive {
    decay: Option<f64>,
    scale: Option<f64>,
    values: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(rename = "T", alias = "t_final")]
    t_final: Option<f64>,
    steps: Option<usize>,
}

/// Eigenbasis indices or explicit coefficient vectors.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawDirections {
    Modes(Vec<usize>),
    Vectors(Vec<Vec<f64>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Canonical,
    Linear,
    Zero,
}

/// A validated experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub operator: DiagonalOperator,
    pub model: CanonicalModel,
    pub model_kind: ModelKind,
    pub grid: TimeGrid,
    pub k: usize,
    pub spec: ExponentSpec,
    pub p: f64,
    pub samples: usize,
    pub seed: u64,
    pub x: SpectralVector,
    pub y: SpectralVector,
    pub directions: Vec<SpectralVector>,
    pub mode_schedule: Vec<Vec<usize>>,
    pub eps_ladder: Vec<f64>,
    pub execution: Execution,
    /// Pass threshold for the regularity probe spread, when requested.
    pub max_spread: Option<f64>,
    /// The configuration text as read, archived with every run.
    pub source: String,
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

fn pad(v: &[f64], n: usize, what: &str, bad: &mut Vec<String>) -> Option<SpectralVector> {
    if v.len() > n {
        bad.push(format!("{what} has {} coefficients but the operator has N = {n} modes", v.len()));
        return None;
    }
    if v.iter().any(|c| !c.is_finite()) {
        bad.push(format!("{what} has a non-finite coefficient"));
        return None;
    }
    let mut full = v.to_vec();
    full.resize(n, 0.0);
    SpectralVector::new(full).ok()
}

fn profile(name: &Option<String>, what: &str, bad: &mut Vec<String>) -> ProfileKind {
    match name.as_deref().unwrap_or("sin").parse() {
        Ok(p) => p,
        Err(e) => {
            bad.push(format!("model.{what}: {e}"));
            ProfileKind::Sin
        }
    }
}

/// Parses and validates a configuration document.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
    let mut bad = Vec::new();

    let ro = raw.operator.unwrap_or_default();
    let operator = match (ro.kind.as_deref(), &ro.eigenvalues) {
        (Some("explicit") | None, Some(ev)) => {
            if ro.modes.is_some_and(|m| m != ev.len()) {
                bad.push("operator.modes disagrees with the number of eigenvalues".into());
            }
            DiagonalOperator::new(ev.clone(), ro.eta.unwrap_or(0.0))
        }
        (Some("dirichlet-laplacian") | None, None) => DiagonalOperator::dirichlet_laplacian(ro.modes.unwrap_or(DEFAULT_MODES))
            .and_then(|op| DiagonalOperator::new(op.eigenvalues().to_vec(), ro.eta.unwrap_or(0.0))),
        (Some(kind), _) => Err(Error::InvalidArgument(format!(
            "unknown operator kind {kind:?} (expected \"dirichlet-laplacian\" or \"explicit\" with eigenvalues)"
        ))),
    };
    let operator = match operator {
        Ok(op) => Some(op),
        Err(e) => {
            bad.push(format!("operator: {e}"));
            None
        }
    };
    let n = operator.as_ref().map_or(1, DiagonalOperator::modes);

    let rg = raw.grid.unwrap_or_default();
    let grid = match TimeGrid::new(rg.t_final.unwrap_or(1.0), rg.steps.unwrap_or(DEFAULT_STEPS)) {
        Ok(g) => Some(g),
        Err(e) => {
            bad.push(format!("grid: {e}"));
            None
        }
    };

    let k = raw.k.unwrap_or(1);
    if k > MAX_ORDER {
        bad.push(format!("k = {k} exceeds the supported maximum {MAX_ORDER}"));
    }
    let p = raw.p.unwrap_or(DEFAULT_P);
    if !(p >= 2.0 && p.is_finite()) {
        bad.push(format!("p = {p} must be a finite number >= 2"));
    }
    let alpha = raw.alpha.unwrap_or(0.0);
    let beta = raw.beta.unwrap_or(0.0);
    if !(0.0..1.0).contains(&alpha) {
        bad.push(format!("alpha = {alpha} must lie in [0, 1)"));
    }
    if !(0.0..0.5).contains(&beta) {
        bad.push(format!("beta = {beta} must lie in [0, 1/2)"));
    }
    let deltas = raw.deltas.unwrap_or_else(|| vec![0.0; k]);
    if deltas.len() != k {
        bad.push(format!("deltas has {} entries, k = {k}", deltas.len()));
    }
    if let Some(d) = deltas.iter().find(|d| !(0.0..0.5).contains(*d)) {
        bad.push(format!("delta = {d} outside [0, 1/2)"));
    }
    let sum: f64 = deltas.iter().sum();
    if !(sum < 0.5) {
        bad.push(format!(
            "sum of deltas = {sum} violates the regularity constraint sum(delta_i) < 1/2"
        ));
    }
    let spec = ExponentSpec::new(deltas, alpha, beta);

    let samples = raw.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples < 2 {
        bad.push(format!("M = {samples} must be >= 2"));
    }
    let noise_dim = raw.noise_modes.unwrap_or(n);
    if noise_dim > n {
        bad.push(format!("noise_modes N_U = {noise_dim} exceeds the state modes N = {n}"));
    }

    let rm = raw.model.unwrap_or_default();
    let model_kind = match rm.kind.as_deref().unwrap_or("canonical") {
        "canonical" => ModelKind::Canonical,
        "linear" => ModelKind::Linear,
        "zero" => ModelKind::Zero,
        other => {
            bad.push(format!("unknown model kind {other:?} (expected canonical, linear or zero)"));
            ModelKind::Canonical
        }
    };
    let n_max = rm.n_max.unwrap_or(3);
    if k > n_max {
        bad.push(
            Error::Capability {
                requested: k,
                available: n_max,
            }
            .to_string(),
        );
    }
    let mut d = CanonicalDefaults {
        max_order: n_max,
        ..CanonicalDefaults::default()
    };
    d.rank = rm.rank.unwrap_or(d.rank);
    d.profile = profile(&rm.profile, "profile", &mut bad);
    d.diffusion_profile = match &rm.diffusion_profile {
        Some(_) => profile(&rm.diffusion_profile, "diffusion_profile", &mut bad),
        None => d.profile,
    };
    if model_kind == ModelKind::Linear {
        if rm.profile.is_some() || rm.diffusion_profile.is_some() {
            bad.push("model.profile is fixed to linear for kind = \"linear\"".into());
        }
        d.profile = ProfileKind::Linear;
        d.diffusion_profile = ProfileKind::Linear;
    }
    let additive = rm.additive.unwrap_or_default();
    d.additive_decay = additive.decay.unwrap_or(d.additive_decay);
    d.additive_scale = additive.scale.unwrap_or(d.additive_scale);
    d.feature_decay = rm.feature_decay.unwrap_or(d.feature_decay);
    d.drift_scale = rm.drift_scale.unwrap_or(d.drift_scale);
    d.diffusion_scale = rm.diffusion_scale.unwrap_or(d.diffusion_scale);
    for (name, v) in [
        ("additive.decay", d.additive_decay),
        ("additive.scale", d.additive_scale),
        ("feature_decay", d.feature_decay),
        ("drift_scale", d.drift_scale),
        ("diffusion_scale", d.diffusion_scale),
    ] {
        if !v.is_finite() {
            bad.push(format!("model.{name} must be finite"));
        }
    }
    if d.additive_decay.is_finite() && d.additive_decay <= 0.5 && noise_dim > 0 {
        // still finite at every truncation, but no longer trace class in the limit
        bad.push(format!(
            "model.additive.decay = {} must exceed 1/2 so that sum q_i^2 stays bounded as N grows",
            d.additive_decay
        ));
    }
    if model_kind != ModelKind::Zero && (d.rank > n || d.rank > noise_dim) {
        bad.push(format!(
            "model.rank = {} exceeds the number of modes (N = {n}, N_U = {noise_dim})",
            d.rank
        ));
    }

    let vectors = |v: &Option<Vec<Vec<f64>>>, what: &str, bad: &mut Vec<String>| -> Option<Vec<Vec<f64>>> {
        v.as_ref().map(|list| {
            list.iter()
                .enumerate()
                .filter_map(|(j, c)| pad(c, n, &format!("model.{what}[{j}]"), bad).map(SpectralVector::into_inner))
                .collect()
        })
    };
    let inline = rm.features.is_some()
        || rm.drift_outputs.is_some()
        || rm.diffusion_outputs.is_some()
        || rm.noise_couplings.is_some()
        || rm.drift_offset.is_some()
        || additive.values.is_some();
    let features = vectors(&rm.features, "features", &mut bad);
    let drift_outputs = vectors(&rm.drift_outputs, "drift_outputs", &mut bad);
    let diffusion_outputs = vectors(&rm.diffusion_outputs, "diffusion_outputs", &mut bad);
    let noise_couplings = vectors(&rm.noise_couplings, "noise_couplings", &mut bad);
    let drift_offset = rm
        .drift_offset
        .as_ref()
        .and_then(|v| pad(v, n, "model.drift_offset", &mut bad).map(SpectralVector::into_inner));
    let additive_values = additive
        .values
        .as_ref()
        .and_then(|v| pad(v, n, "model.additive.values", &mut bad).map(SpectralVector::into_inner));

    let x = match &raw.x {
        Some(v) => pad(v, n, "x", &mut bad),
        None => SpectralVector::basis(n, 1, 1.0).ok(),
    };
    let y = match (&raw.y, &x) {
        (Some(v), _) => pad(v, n, "y", &mut bad),
        (None, Some(x)) => Some(x.combine(1.0, &SpectralVector::basis(n, n.min(2), 1.0).expect("n >= 1"), 0.1)),
        (None, None) => None,
    };
    if let (Some(x), Some(y)) = (&x, &y) {
        if x == y {
            bad.push("y must differ from x for the Lipschitz probe".into());
        }
    }
    let directions: Vec<SpectralVector> = match &raw.directions {
        None => (1..=k).filter_map(|m| SpectralVector::basis(n, m.min(n), 1.0).ok()).collect(),
        Some(RawDirections::Modes(ms)) => ms
            .iter()
            .filter_map(|&m| match SpectralVector::basis(n, m, 1.0) {
                Ok(v) => Some(v),
                Err(_) => {
                    bad.push(format!("direction mode {m} outside 1..={n}"));
                    None
                }
            })
            .collect(),
        Some(RawDirections::Vectors(vs)) => vs
            .iter()
            .enumerate()
            .filter_map(|(j, v)| pad(v, n, &format!("directions[{j}]"), &mut bad))
            .collect(),
    };
    let given = match &raw.directions {
        Some(RawDirections::Modes(ms)) => ms.len(),
        Some(RawDirections::Vectors(vs)) => vs.len(),
        None => k,
    };
    if given != k {
        bad.push(format!("{given} directions given, k = {k}"));
    }
    if directions.iter().any(|u| u.norm() == 0.0) {
        bad.push("directions must be nonzero".into());
    }

    let mode_schedule = raw.mode_schedule.unwrap_or_else(|| {
        DEFAULT_PROBE_MODES
            .iter()
            .filter(|&&m| m <= n)
            .map(|&m| vec![m; k])
            .collect()
    });
    if k > 0 && mode_schedule.is_empty() {
        bad.push("mode_schedule is empty".into());
    }
    for probe in &mode_schedule {
        if probe.len() != k {
            bad.push(format!("mode_schedule entry {probe:?} has {} modes, k = {k}", probe.len()));
        }
        if probe.iter().any(|&m| m == 0 || m > n) {
            bad.push(format!("mode_schedule entry {probe:?} outside 1..={n}"));
        }
    }
    let eps_ladder = raw.eps_ladder.unwrap_or_else(|| DEFAULT_EPS_LADDER.to_vec());
    if eps_ladder.is_empty() || eps_ladder.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        bad.push("eps_ladder must be a nonempty list of positive numbers".into());
    }
    if eps_ladder.windows(2).any(|w| w[1] >= w[0]) {
        bad.push("eps_ladder must be strictly decreasing".into());
    }
    if let Some(s) = raw.max_spread {
        if !(s >= 1.0) {
            bad.push(format!("max_spread = {s} must be >= 1"));
        }
    }

    // build the model only once the pieces are known to be consistent
    let model = if bad.is_empty() {
        let built = if model_kind == ModelKind::Zero {
            CanonicalModel::zero(n, noise_dim, n_max)
        } else if inline {
            let rank = features.as_ref().map_or(0, Vec::len);
            let additive = additive_values.unwrap_or_else(|| {
                (1..=n)
                    .map(|i| d.additive_scale * (i as f64).powf(-d.additive_decay))
                    .collect()
            });
            CanonicalModel::new(CanonicalParts {
                dim: n,
                noise_dim,
                max_order: n_max,
                features: features.unwrap_or_default(),
                drift_outputs: drift_outputs.unwrap_or_else(|| vec![vec![0.0; n]; rank]),
                diffusion_outputs: diffusion_outputs.unwrap_or_else(|| vec![vec![0.0; n]; rank]),
                noise_couplings: noise_couplings.unwrap_or_else(|| vec![vec![0.0; n]; rank]),
                drift_offset,
                additive,
                drift_profile: d.profile,
                diffusion_profile: d.diffusion_profile,
            })
        } else {
            CanonicalModel::with_defaults(n, noise_dim, &d)
        };
        match built {
            Ok(m) => Some(m),
            Err(e) => {
                bad.push(format!("model: {e}"));
                None
            }
        }
    } else {
        None
    };

    if !bad.is_empty() {
        return Err(Error::Config(bad));
    }
    let model = model.expect("validated");
    debug_assert_eq!(model.dim(), n);
    Ok(ExperimentConfig {
        operator: operator.expect("validated"),
        model,
        model_kind,
        grid: grid.expect("validated"),
        k,
        spec,
        p,
        samples,
        seed: raw.seed.unwrap_or(0),
        x: x.expect("validated"),
        y: y.expect("validated"),
        directions,
        mode_schedule,
        eps_ladder,
        execution: raw.execution.unwrap_or_default(),
        max_spread: raw.max_spread,
        source: text.to_string(),
    })
}
