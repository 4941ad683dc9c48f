use anyhow::Result;

use fraclog::integrator::time_derivative;
use fraclog::{CouplingConstant, FractionalOrder, Params64, RegularizationLevel, Trajectory64};

use super::{evolve_recorded, fmt};
use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, Output};

const BASIS_HS: &str = "Gronwall bound e^{4|lambda|t} on the full H^s norm squared";
const BASIS_H1: &str = "Gronwall bound e^{4|lambda|t} on the H^1 seminorm squared";
const BASIS_DT: &str = "Gronwall bound e^{4|lambda|t} on the squared L2 norm of the time derivative";
const CONTROL_TOL: f64 = 1e-10;

pub(super) fn defaults(cfg: &mut ExperimentConfig) {
    cfg.grid.n = 512;
    cfg.sweeps.s = Some(vec![0.3, 0.5, 0.7]);
    cfg.sweeps.eps = Some(vec![0.0, 0.1]);
}

/// Squared quantities per sample: (full H^s, Ḣ^s, H^1, ∂ₜu).
fn squares(traj: &Trajectory64) -> Vec<[f64; 4]> {
    traj.series
        .iter()
        .zip(&traj.states)
        .map(|(r, u)| {
            let hs = r.hs_semi * r.hs_semi;
            let h1 = r.h1_semi.unwrap_or(0.0).powi(2);
            [r.mass + hs, hs, h1, time_derivative(u, &traj.params).norm_sq()]
        })
        .collect()
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut out = Output::create(&cfg.output_dir)?;
    let mut report = ExperimentReport::new(cfg);
    let grid = cfg.grid()?;
    let phi = cfg.datum(&grid)?;
    let base = cfg.params()?;
    let strength = base.lambda.get().abs();
    let s_values = cfg.sweeps.s.clone().unwrap_or_else(|| vec![base.s.get()]);
    let eps_values = cfg.sweeps.eps.clone().unwrap_or_else(|| vec![base.eps.get()]);
    let limit = 1.0 + cfg.slack.bound;

    let mut worst = [0.0f64; 4];
    let mut interior = [0.0f64; 4];
    let mut origin_dev = 0.0f64;
    let mut cases = 0;
    let mut rows = Vec::new();
    for &s in &s_values {
        for &lam in &[-strength, strength] {
            for &eps in &eps_values {
                let p = Params64 {
                    s: FractionalOrder::new(s)?,
                    lambda: CouplingConstant::new(lam)?,
                    eps: RegularizationLevel::new(eps)?,
                    ..base
                };
                let tag = format!("s{s}_lambda{lam:+}_eps{eps}");
                let traj = evolve_recorded(&mut out, &tag, &phi, &p, &p.probe())?;
                let sq = squares(&traj);
                cases += 1;
                for (t, q) in traj.times.iter().zip(&sq) {
                    let bound = (4.0 * lam.abs() * t).exp();
                    let ratios: Vec<f64> = (0..4).map(|j| q[j] / sq[0][j]).collect();
                    if *t == 0.0 {
                        origin_dev = ratios.iter().map(|r| (r - 1.0).abs()).fold(origin_dev, f64::max);
                    }
                    for j in 0..4 {
                        worst[j] = worst[j].max(ratios[j] / bound);
                        if *t > 0.0 {
                            interior[j] = interior[j].max(ratios[j] / bound);
                        }
                    }
                    let mut row = vec![s.to_string(), lam.to_string(), eps.to_string(), t.to_string()];
                    row.push(bound.to_string());
                    row.extend(ratios.iter().map(|r| r.to_string()));
                    rows.push(row);
                }
            }
        }
    }
    out.table(
        "growth_ratios",
        &[
            "s",
            "lambda",
            "eps",
            "t",
            "bound",
            "ratio_hs_full",
            "ratio_hs_semi",
            "ratio_h1",
            "ratio_dt",
        ],
        &rows,
    )?;

    report.record("cases", cases as f64);
    for (j, name) in ["hs_full", "hs_semi", "h1", "dt"].iter().enumerate() {
        report.record(format!("max_ratio_over_bound_t_positive_{name}"), interior[j]);
    }
    let detail = |name: &str, v: f64| format!("max over {cases} cases of {name} ratio / e^(4|lambda|t): {}", fmt(v));
    report.check(
        "gronwall_hs",
        BASIS_HS,
        worst[0] <= limit,
        worst[0],
        Some(limit),
        detail("full H^s", worst[0]),
    );
    report.diagnostic(
        "gronwall_hs_semi",
        BASIS_HS,
        worst[1],
        detail("seminorm-only H^s", worst[1]),
    );
    report.check(
        "gronwall_h1",
        BASIS_H1,
        worst[2] <= limit,
        worst[2],
        Some(limit),
        detail("H^1", worst[2]),
    );
    report.check(
        "gronwall_dt",
        BASIS_DT,
        worst[3] <= limit,
        worst[3],
        Some(limit),
        detail("d/dt", worst[3]),
    );
    report.check(
        "ratio_origin",
        BASIS_HS,
        origin_dev == 0.0,
        origin_dev,
        Some(0.0),
        "all ratios equal 1 at t = 0",
    );

    let control = Params64 {
        lambda: CouplingConstant::new(0.0)?,
        ..base
    };
    let traj = evolve_recorded(&mut out, "control_lambda0", &phi, &control, &control.probe())?;
    let sq = squares(&traj);
    let first = sq[0];
    let dev = sq
        .iter()
        .flat_map(|q| (0..4).map(move |j| (q[j] / first[j] - 1.0).abs()))
        .fold(0.0, f64::max);
    report.check(
        "control_constant",
        "the linear flow preserves every Fourier-multiplier norm",
        dev < CONTROL_TOL,
        dev,
        Some(CONTROL_TOL),
        "lambda = 0: all ratios equal 1",
    );
    out.finish(report)
}
