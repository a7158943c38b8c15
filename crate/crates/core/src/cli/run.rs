//! Subcommand implementations. Each returns a [`Report`] that is written
//! out by a single writer once all reductions are done.

use std::path::Path;

use crate::error::{Error, Result};
use crate::estimators::{
    bound_rhs_for_model, fd_frechet_check, lipschitz_probe, probe_norms, MonteCarlo, RatioReport,
};
use crate::model::ModelSpec;
use crate::simulator::Simulator;
use crate::special::{beta_fn, chi, iota, theta, BoundParams, IndexSet};

use super::config::ExperimentConfig;
use super::output::{real, Report, SummaryRow, Table};

/// Remainders at or below this count as exact zeros for affine models.
pub const LINEAR_TOLERANCE: f64 = 1e-11;
/// Down-ladder growth allowed between consecutive Fréchet remainders.
pub const FD_MONOTONE_SLACK: f64 = 1.2;
pub const FD_MIN_SLOPE: f64 = 0.9;
/// Slack on the standard errors in the a-priori bound comparison.
pub const BOUND_SIGMAS: f64 = 3.0;

fn mc(cfg: &ExperimentConfig) -> MonteCarlo {
    MonteCarlo::new(cfg.samples, cfg.seed, cfg.execution)
}

fn need_order(cfg: &ExperimentConfig, what: &str) -> Result<()> {
    if cfg.k == 0 {
        return Err(Error::InvalidArgument(format!("{what} needs k >= 1")));
    }
    Ok(())
}

fn modes_label(modes: &[usize]) -> String {
    modes.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

/// The a-priori bound of the configured exponents.
pub fn bound(cfg: &ExperimentConfig) -> Result<Report> {
    need_order(cfg, "bound")?;
    let t = cfg.grid.t_final();
    let value = bound_rhs_for_model(&cfg.operator, &cfg.model, &cfg.spec, cfg.p, t)?;
    let mut table = Table::new("bound", &["k", "deltas", "alpha", "beta", "p", "T", "value"]);
    table.push(vec![
        cfg.k.to_string(),
        cfg.spec.deltas.iter().map(|d| real(*d)).collect::<Vec<_>>().join(";"),
        real(cfg.spec.alpha),
        real(cfg.spec.beta),
        real(cfg.p),
        real(t),
        real(value),
    ]);
    Ok(Report {
        tables: vec![table],
        summary: vec![SummaryRow::finite("bound", value)],
        files: vec![],
    })
}

/// Every constant entering the bound.
pub fn bounds(cfg: &ExperimentConfig) -> Result<Report> {
    need_order(cfg, "bounds")?;
    let op = &cfg.operator;
    let t = cfg.grid.t_final();
    let s = &cfg.spec;
    let norms = cfg.model.cb_norms(op, s.alpha, s.beta).ok_or(Error::Capability {
        requested: cfg.k,
        available: 0,
    })?;
    let chi_a = chi(op, s.alpha, t)?;
    let chi_b = chi(op, s.beta, t)?;
    let lambda = iota(s, &IndexSet::All);
    let th = theta(
        &BoundParams {
            alpha: s.alpha,
            beta: s.beta,
            lambda,
            p: cfg.p,
            t_final: t,
            eta: op.eta(),
            l: norms.drift_semi(1).unwrap_or(0.0),
            l_hat: norms.diffusion_semi(1).unwrap_or(0.0),
        },
        chi_a,
        chi_b,
    )?;
    let sum: f64 = s.deltas.iter().sum();
    let mut rows: Vec<(String, f64)> = vec![
        ("chi_alpha".into(), chi_a),
        ("chi_beta".into(), chi_b),
    ];
    for (i, d) in s.deltas.iter().enumerate() {
        rows.push((format!("chi_delta_{}", i + 1), chi(op, *d, t)?));
    }
    rows.push(("iota".into(), lambda));
    rows.push(("theta".into(), th));
    rows.push(("beta_drift".into(), beta_fn(1.0 - s.alpha, 1.0 - sum)?));
    rows.push(("beta_diffusion".into(), beta_fn(1.0 - 2.0 * s.beta, 1.0 - 2.0 * sum)?));
    rows.push(("drift_at_zero".into(), norms.drift_at_zero));
    rows.push(("diffusion_at_zero".into(), norms.diffusion_at_zero));
    for (m, v) in norms.drift.iter().enumerate() {
        rows.push((format!("drift_cb_{}", m + 1), *v));
    }
    for (m, v) in norms.diffusion.iter().enumerate() {
        rows.push((format!("diffusion_cb_{}", m + 1), *v));
    }
    let value = bound_rhs_for_model(op, &cfg.model, s, cfg.p, t)?;
    rows.push(("bound".into(), value));
    let mut table = Table::new("bounds", &["name", "value"]);
    for (name, v) in rows {
        table.push(vec![name, real(v)]);
    }
    Ok(Report {
        tables: vec![table],
        summary: vec![SummaryRow::finite("theta", th), SummaryRow::finite("bound", value)],
        files: vec![],
    })
}

/// Streams the simulated paths to `paths.csv`: one row per grid node,
/// subset and sample.
pub fn simulate(cfg: &ExperimentConfig, out: &Path, coefficients: bool) -> Result<Report> {
    const BATCH: usize = 64;
    let sim = Simulator::new(&cfg.operator, &cfg.model, cfg.grid)?;
    let plan = sim.plan(cfg.k)?;
    let n = cfg.model.dim();
    std::fs::create_dir_all(out)?;
    let mut w = csv::Writer::from_path(out.join("paths.csv"))?;
    let mut header: Vec<String> = ["sample", "seed", "subset", "step", "t", "norm"].map(String::from).to_vec();
    if coefficients {
        header.extend((1..=n).map(|i| format!("c{i}")));
    }
    w.write_record(&header)?;
    let mut rows_written = 0usize;
    let mut start = 0;
    while start < cfg.samples {
        let len = BATCH.min(cfg.samples - start);
        let systems = sim.run_samples(len, cfg.seed.wrapping_add(start as u64), cfg.execution, |noise| {
            sim.simulate(&plan, &cfg.x, &cfg.directions, noise)
        })?;
        for (offset, sys) in systems.iter().enumerate() {
            for &subset in plan.schedule() {
                for step in 0..=sys.steps() {
                    let state = sys.state(subset, step).expect("scheduled subset");
                    let mut rec = vec![
                        (start + offset).to_string(),
                        sys.seed().to_string(),
                        subset.to_string(),
                        step.to_string(),
                        real(cfg.grid.time(step)),
                        real(crate::spectral::norm(state)),
                    ];
                    if coefficients {
                        rec.extend(state.iter().map(|c| real(*c)));
                    }
                    w.write_record(&rec)?;
                    rows_written += 1;
                }
            }
        }
        start += len;
    }
    w.flush()?;
    let expected = cfg.samples * plan.schedule().len() * (cfg.grid.steps() + 1);
    Ok(Report {
        tables: vec![],
        summary: vec![SummaryRow::at_least("paths_rows", rows_written as f64, expected as f64)],
        files: vec!["paths.csv".into()],
    })
}

/// Finite-difference Fréchet check down the epsilon ladder.
pub fn fd_check(cfg: &ExperimentConfig) -> Result<Report> {
    need_order(cfg, "fd-check")?;
    let sim = Simulator::new(&cfg.operator, &cfg.model, cfg.grid)?;
    let t = fd_frechet_check(&sim, &cfg.x, &cfg.directions, cfg.p, mc(cfg), &cfg.eps_ladder)?;
    let mut table = Table::new("fd_check", &["eps", "remainder", "std_error"]);
    for ((e, r), s) in t.eps.iter().zip(&t.remainders).zip(&t.std_errors) {
        table.push(vec![real(*e), real(*r), real(*s)]);
    }
    let mut summary = Vec::new();
    if cfg.model.is_affine() {
        let worst = t.remainders.iter().copied().fold(0.0, f64::max);
        summary.push(SummaryRow::at_most("fd_linear_exact", worst, LINEAR_TOLERANCE));
    } else {
        summary.push(SummaryRow::at_least("fd_slope", t.slope().unwrap_or(f64::NAN), FD_MIN_SLOPE));
        if t.eps.len() >= 2 {
            let first = t.remainders[0];
            let last = *t.remainders.last().expect("nonempty");
            let ratio = t.eps.last().expect("nonempty") / t.eps[0];
            // first-order convergence with a factor-2 allowance
            summary.push(SummaryRow::at_most("fd_contraction", last / first, 2.0 * ratio));
            let growth = t.remainders.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
            summary.push(SummaryRow::at_most("fd_monotone", growth, FD_MONOTONE_SLACK));
        }
    }
    Ok(Report {
        tables: vec![table],
        summary,
        files: vec![],
    })
}

/// Weighted regularity ratios over the mode schedule.
pub fn regularity(cfg: &ExperimentConfig) -> Result<Report> {
    need_order(cfg, "regularity")?;
    let sim = Simulator::new(&cfg.operator, &cfg.model, cfg.grid)?;
    let norms = probe_norms(&sim, &cfg.x, cfg.k, &cfg.mode_schedule, mc(cfg))?;
    let report = RatioReport::from_norms(&cfg.operator, &norms, &cfg.spec, cfg.p)?;

    let mut series = Table::new("regularity", &["probe", "modes", "step", "t", "weighted", "std_error"]);
    let mut probes = Table::new("probes", &["probe", "modes", "sup", "std_error", "sup_step", "unweighted_first"]);
    for (i, r) in report.probes.iter().enumerate() {
        let label = modes_label(&r.modes);
        for (j, (w, s)) in r.weighted.iter().zip(&r.std_errors).enumerate() {
            series.push(vec![
                i.to_string(),
                label.clone(),
                (j + 1).to_string(),
                real(cfg.grid.time(j + 1)),
                real(*w),
                real(*s),
            ]);
        }
        probes.push(vec![
            i.to_string(),
            label,
            real(r.sup),
            real(r.sup_std_error),
            r.sup_index.to_string(),
            real(r.unweighted_first),
        ]);
    }
    let mut trend = Table::new("trend", &["name", "slope", "intercept", "residual"]);
    for (name, fit) in [("weighted_sup", report.trend), ("unweighted_first", report.unweighted_trend)] {
        if let Some(f) = fit {
            trend.push(vec![name.into(), real(f.slope), real(f.intercept), real(f.residual)]);
        }
    }

    let mut summary = vec![SummaryRow::finite("regularity_sup", report.sup)];
    match bound_rhs_for_model(&cfg.operator, &cfg.model, &cfg.spec, cfg.p, cfg.grid.t_final()) {
        Ok(b) => summary.push(SummaryRow::at_most(
            "regularity_bound",
            report.sup,
            b + BOUND_SIGMAS * report.sup_std_error,
        )),
        Err(Error::Capability { .. }) => {}
        Err(e) => return Err(e),
    }
    if let Some(max) = cfg.max_spread {
        summary.push(SummaryRow::at_most("regularity_spread", report.spread(), max));
    }
    Ok(Report {
        tables: vec![series, probes, trend],
        summary,
        files: vec![],
    })
}

/// Common-noise Lipschitz ratio between `x` and `y`.
pub fn lipschitz(cfg: &ExperimentConfig) -> Result<Report> {
    need_order(cfg, "lipschitz")?;
    let sim = Simulator::new(&cfg.operator, &cfg.model, cfg.grid)?;
    let r = lipschitz_probe(&sim, &cfg.x, &cfg.y, &cfg.directions, &cfg.spec, cfg.p, mc(cfg))?;
    let mut table = Table::new("lipschitz", &["step", "t", "ratio"]);
    for (j, v) in r.series.iter().enumerate() {
        table.push(vec![(j + 1).to_string(), real(cfg.grid.time(j + 1)), real(*v)]);
    }
    let row = if cfg.model.is_affine() {
        SummaryRow::at_most("lipschitz_linear", r.ratio, LINEAR_TOLERANCE)
    } else {
        SummaryRow::finite("lipschitz", r.ratio)
    };
    Ok(Report {
        tables: vec![table],
        summary: vec![row],
        files: vec![],
    })
}

/// `bound`, `fd-check`, `regularity` and `lipschitz` in one run.
pub fn full_report(cfg: &ExperimentConfig) -> Result<Report> {
    let mut all = Report::default();
    all.extend(bound(cfg)?);
    all.extend(fd_check(cfg)?);
    all.extend(regularity(cfg)?);
    all.extend(lipschitz(cfg)?);
    Ok(all)
}
