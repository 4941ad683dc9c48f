use anyhow::{bail, Result};
use num_complex::Complex;

use fraclog::integrator::time_derivative;

use super::{evolve_recorded, fmt};
use crate::config::{ExperimentConfig, InitialDatum};
use crate::report::{ExperimentReport, Output};

const BASIS: &str = "u(t) = exp(i lambda d t) exp(lambda |x|^2 / 2) solves the s = 1 equation for lambda < 0";
const RESIDUAL_LIMIT: f64 = 1e-8;
const ERROR_LIMIT: f64 = 5e-3;

pub(super) fn defaults(cfg: &mut ExperimentConfig) {
    cfg.grid.n = 512;
    cfg.grid.length = 24.0;
    cfg.params.s = 1.0;
    cfg.params.lambda = -1.0;
    cfg.params.eps = 0.0;
    cfg.params.sample_every = 50;
    cfg.initial_datum = InitialDatum::Gausson;
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.params.s != 1.0 || cfg.initial_datum != InitialDatum::Gausson {
        bail!("the gausson experiment needs s = 1 and the gausson datum");
    }
    let mut out = Output::create(&cfg.output_dir)?;
    let mut report = ExperimentReport::new(cfg);
    let grid = cfg.grid()?;
    let phi = cfg.datum(&grid)?;
    let p = cfg.params()?;
    let omega = p.lambda.get() * grid.dim() as f64;

    let rotating = phi.scale(Complex::new(0.0, omega));
    let residual = time_derivative(&phi, &p).sub(&rotating)?.norm() / phi.norm();
    let verified = report.check(
        "residual",
        BASIS,
        residual < RESIDUAL_LIMIT,
        residual,
        Some(RESIDUAL_LIMIT),
        format!("|d/dt u - i lambda d u| / |u| at t = 0 with lambda d = {omega}"),
    );
    if !verified {
        return out.finish(report);
    }

    let traj = evolve_recorded(&mut out, "gausson", &phi, &p, &p.probe())?;
    let t = *traj.times.last().expect("non-empty");
    let exact = phi.scale(Complex::from_polar(1.0, omega * t));
    let error = traj.last().sub(&exact)?.norm();
    report.check(
        "stationary_error",
        BASIS,
        error < ERROR_LIMIT,
        error,
        Some(ERROR_LIMIT),
        format!("L2 error at T = {t}"),
    );
    let flipped = traj
        .last()
        .sub(&phi.scale(Complex::from_polar(1.0, -omega * t)))?
        .norm();
    report.diagnostic(
        "opposite_phase_error",
        BASIS,
        flipped,
        format!("error against exp(-i lambda d t) phi: {}", fmt(flipped)),
    );
    out.finish(report)
}
