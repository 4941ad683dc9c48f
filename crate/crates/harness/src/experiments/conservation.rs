use anyhow::Result;

use fraclog::{CouplingConstant, Params64, Record64, Scheme};

use super::{evolve_recorded, fmt};
use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, Output};

const BASIS: &str = "mass and regularized energy are conserved by the regularized flow";
const MASS_LIMIT: f64 = 1e-11;
const CONTROL_LIMIT: f64 = 1e-12;

pub(super) fn defaults(_: &mut ExperimentConfig) {}

fn mass_drift(series: &[Record64]) -> f64 {
    let m0 = series[0].mass;
    series.iter().map(|r| (r.mass - m0).abs() / m0).fold(0.0, f64::max)
}

fn energy_drift(series: &[Record64]) -> f64 {
    let e0 = series[0].energy_eps;
    series.iter().map(|r| (r.energy_eps - e0).abs()).fold(0.0, f64::max)
}

fn ratio_window(scheme: Scheme) -> (f64, f64) {
    match scheme {
        Scheme::Strang => (3.0, 5.0),
        Scheme::Lie => (1.7, 2.5),
    }
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut out = Output::create(&cfg.output_dir)?;
    let mut report = ExperimentReport::new(cfg);
    let grid = cfg.grid()?;
    let phi = cfg.datum(&grid)?;
    let base = cfg.params()?;
    let strength = base.lambda.get().abs();

    for lam in [-strength, strength] {
        let lambda = CouplingConstant::new(lam)?;
        for scheme in [Scheme::Strang, Scheme::Lie] {
            let coarse = Params64 { lambda, scheme, ..base };
            let fine = Params64 {
                dt: coarse.dt / 2.0,
                sample_every: 2 * coarse.sample_every,
                ..coarse
            };
            let tag = format!("{}_lambda{lam:+}", scheme.name());
            let a = evolve_recorded(&mut out, &tag, &phi, &coarse, &coarse.probe())?;
            let b = evolve_recorded(&mut out, &format!("{tag}_half"), &phi, &fine, &fine.probe())?;

            let drift = mass_drift(&a.series).max(mass_drift(&b.series));
            report.record(format!("mass_drift_{tag}"), drift);
            if scheme == Scheme::Strang {
                report.check(
                    &format!("mass_drift_lambda{lam:+}"),
                    BASIS,
                    drift < MASS_LIMIT,
                    drift,
                    Some(MASS_LIMIT),
                    format!("{} strang steps", coarse.steps()),
                );
            }

            let (ea, eb) = (energy_drift(&a.series), energy_drift(&b.series));
            let ratio = ea / eb;
            report.record(format!("energy_drift_{tag}"), ea);
            report.record(format!("energy_drift_{tag}_half"), eb);
            let (lo, hi) = ratio_window(scheme);
            report.check(
                &format!("energy_order_{}_lambda{lam:+}", scheme.name()),
                BASIS,
                (lo..=hi).contains(&ratio),
                ratio,
                Some(hi),
                format!("drift {} at dt, {} at dt/2, window [{lo}, {hi}]", fmt(ea), fmt(eb)),
            );
        }
    }

    let control = Params64 {
        lambda: CouplingConstant::new(0.0)?,
        ..base
    };
    let c = evolve_recorded(&mut out, "control_lambda0", &phi, &control, &control.probe())?;
    let scale = c.series[0].energy_eps.abs().max(1.0);
    let drift = energy_drift(&c.series) / scale;
    report.check(
        "energy_control",
        "the linear flow is an exact unitary multiplier",
        drift < CONTROL_LIMIT,
        drift,
        Some(CONTROL_LIMIT),
        "lambda = 0, relative energy drift",
    );
    out.finish(report)
}
