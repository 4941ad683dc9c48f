use anyhow::Result;

use fraclog::fractional::commutator_norm_estimate;
use fraclog::{FractionalOrder, Grid64, MomentOrder};

use super::fmt;
use super::moment::ENSEMBLE;
use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, Output};

const BASIS: &str = "boundedness of [(-Delta)^s, <x>^alpha] from H^s to L2 for alpha < 2s, alpha <= 1";
const STABILITY_LIMIT: f64 = 0.20;

pub(super) fn defaults(cfg: &mut ExperimentConfig) {
    cfg.sweeps.s = Some(vec![0.3, 0.5, 0.7, 0.9]);
    cfg.sweeps.alpha = Some(vec![0.25, 0.5, 0.75, 1.0]);
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut out = Output::create(&cfg.output_dir)?;
    let mut report = ExperimentReport::new(cfg);
    let coarse = cfg.grid()?;
    let fine = Grid64::new(cfg.grid.d, 2 * cfg.grid.n, cfg.grid.length)?;
    let s_values = cfg.sweeps.s.clone().unwrap_or_else(|| vec![cfg.params.s]);
    let alphas = cfg.sweeps.alpha.clone().unwrap_or_else(|| vec![1.0]);

    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    let mut admissible_count = 0;
    let mut control_max = 0.0f64;
    for &s in &s_values {
        let order = FractionalOrder::new(s)?;
        let mut points: Vec<(f64, MomentOrder<f64>, bool)> = alphas
            .iter()
            .map(|&a| Ok((a, MomentOrder::new(a)?, false)))
            .collect::<Result<_>>()?;
        points.push((0.0, MomentOrder::none(), true));
        for (a, moment, control) in points {
            let kc = commutator_norm_estimate(&coarse, order, moment, ENSEMBLE, cfg.seed)?;
            let kf = commutator_norm_estimate(&fine, order, moment, ENSEMBLE, cfg.seed)?;
            let admissible = !control && moment.is_admissible(order);
            let change = if kc > 0.0 { (kf - kc).abs() / kc } else { 0.0 };
            if control {
                control_max = control_max.max(kc.abs()).max(kf.abs());
            }
            if admissible {
                admissible_count += 1;
                if change > worst {
                    worst = change;
                    worst_at = format!("s = {s}, alpha = {a}");
                }
            }
            rows.push(vec![
                s.to_string(),
                a.to_string(),
                if control {
                    "control"
                } else if admissible {
                    "admissible"
                } else {
                    "inadmissible"
                }
                .to_string(),
                kc.to_string(),
                kf.to_string(),
                change.to_string(),
            ]);
        }
    }
    out.table(
        "commutator_scan",
        &["s", "alpha", "class", "estimate_n", "estimate_2n", "relative_change"],
        &rows,
    )?;
    report.record("admissible_points", admissible_count as f64);
    report.record("table_rows", rows.len() as f64);
    report.check(
        "refinement_stability",
        BASIS,
        worst < STABILITY_LIMIT,
        worst,
        Some(STABILITY_LIMIT),
        format!(
            "largest relative change n = {} -> {} over {admissible_count} admissible points: {} at {worst_at}",
            cfg.grid.n,
            2 * cfg.grid.n,
            fmt(worst)
        ),
    );
    report.check(
        "control_zero",
        "the weight <x>^0 = 1 commutes with every multiplier",
        control_max == 0.0,
        control_max,
        Some(0.0),
        "alpha = 0 column",
    );
    out.finish(report)
}
