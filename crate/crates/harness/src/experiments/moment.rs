use anyhow::{bail, Result};

use fraclog::fractional::{commutator_apply, commutator_norm_estimate, hs_norm};
use fraclog::{CouplingConstant, FractionalOrder, MomentOrder, Params64};

use super::{evolve_recorded, fmt};
use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, Output};

const BASIS: &str = "weighted-norm Gronwall step d/dt W^2 <= 2 W |[(-Delta)^s, <x>^alpha] u|";
pub(crate) const ENSEMBLE: usize = 32;

pub(super) fn defaults(cfg: &mut ExperimentConfig) {
    cfg.sweeps.s = Some(vec![0.7, 0.4]);
    cfg.sweeps.alpha = Some(vec![1.0, 0.5]);
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut out = Output::create(&cfg.output_dir)?;
    let mut report = ExperimentReport::new(cfg);
    let grid = cfg.grid()?;
    let phi = cfg.datum(&grid)?;
    let base = cfg.params()?;
    let strength = base.lambda.get().abs();
    let s_values = cfg.sweeps.s.clone().unwrap_or_else(|| vec![base.s.get()]);
    let alphas = cfg.sweeps.alpha.clone().unwrap_or_else(|| vec![1.0]);
    if s_values.len() != alphas.len() {
        bail!("weighted_moment pairs sweeps.s with sweeps.alpha; lengths differ");
    }
    let slack = 1.0 + cfg.slack.moment;

    let mut rows = Vec::new();
    for (&s, &alpha) in s_values.iter().zip(&alphas) {
        let order = FractionalOrder::new(s)?;
        let moment = MomentOrder::new(alpha)?;
        let k = commutator_norm_estimate(&grid, order, moment, ENSEMBLE, cfg.seed)?;
        report.record(format!("K_s{s}_alpha{alpha}"), k);
        for lam in [-strength, strength] {
            let p = Params64 {
                s: order,
                lambda: CouplingConstant::new(lam)?,
                ..base
            };
            let tag = format!("s{s}_alpha{alpha}_lambda{lam:+}");
            let traj = evolve_recorded(&mut out, &tag, &phi, &p, &p.probe().with_alpha(moment))?;
            let w: Vec<f64> = traj
                .series
                .iter()
                .map(|r| r.weighted_alpha.expect("probe has alpha"))
                .collect();
            let m_t = traj.states.iter().map(|u| hs_norm(u, order)).fold(0.0, f64::max);
            let own = traj
                .states
                .iter()
                .map(|u| commutator_apply(u, order, moment).norm() / hs_norm(u, order))
                .fold(0.0, f64::max);
            let mut worst = 0.0f64;
            for (t, wt) in traj.times.iter().zip(&w) {
                let bound = w[0] + k * m_t * t * slack;
                if *t > 0.0 {
                    worst = worst.max((wt - w[0]) / (bound - w[0]));
                }
                rows.push(vec![
                    s.to_string(),
                    alpha.to_string(),
                    lam.to_string(),
                    t.to_string(),
                    wt.to_string(),
                    bound.to_string(),
                ]);
            }
            report.record(format!("M_T_{tag}"), m_t);
            report.record(format!("trajectory_commutator_{tag}"), own);
            let detail = format!(
                "K = {}, M_T = {}, W(0) = {}, W(T) = {}",
                fmt(k),
                fmt(m_t),
                fmt(w[0]),
                fmt(w[w.len() - 1])
            );
            if moment.is_admissible(order) {
                report.check(
                    &format!("moment_bound_{tag}"),
                    BASIS,
                    worst <= 1.0,
                    worst,
                    Some(1.0),
                    detail,
                );
            } else {
                report.diagnostic(
                    &format!("moment_bound_{tag}"),
                    BASIS,
                    worst,
                    format!("inadmissible pair; {detail}"),
                );
            }
            report.diagnostic(
                &format!("trajectory_commutator_{tag}"),
                BASIS,
                own / k,
                "largest commutator ratio along the trajectory divided by K",
            );
        }
    }
    out.table("weighted_moment", &["s", "alpha", "lambda", "t", "W", "bound"], &rows)?;

    let p = Params64 {
        s: FractionalOrder::new(s_values[0])?,
        ..base
    };
    let traj = evolve_recorded(
        &mut out,
        "control_alpha0",
        &phi,
        &p,
        &p.probe().with_alpha(MomentOrder::none()),
    )?;
    let w0 = traj.series[0].weighted_alpha.unwrap_or(f64::NAN);
    let dev = traj
        .series
        .iter()
        .map(|r| {
            (r.weighted_alpha.unwrap_or(f64::NAN) - r.l2)
                .abs()
                .max((r.l2 - w0).abs())
                / w0
        })
        .fold(0.0, f64::max);
    report.check(
        "control_alpha0",
        "with alpha = 0 the weighted norm is the conserved L2 norm",
        dev < 1e-12,
        dev,
        Some(1e-12),
        "W(t) = sqrt(mass), constant",
    );
    out.finish(report)
}
