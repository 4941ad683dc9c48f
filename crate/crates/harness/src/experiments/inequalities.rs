use anyhow::Result;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fraclog::log_nonlinearity::{check_holder_log, check_log_growth, check_log_lipschitz, mu_eps};
use fraclog::RegularizationLevel;

use super::fmt;
use crate::config::ExperimentConfig;
use crate::oracle::{log_growth_sup, mu_eps_quadrature};
use crate::report::{ExperimentReport, Output};

const BASIS_LIPSCHITZ: &str = "|Im((u log(|u|+eps) - v log(|v|+mu))(conj u - conj v))| <= |u-v|^2 + |eps-mu||u-v|";
const BASIS_GROWTH: &str = "|z log|z|^2| <= C(delta)(|z|^{1-delta} + |z|^{1+delta})";
const BASIS_HOLDER: &str = "Holder-type control of v log(|v|+eps) - u log|u|";
const BASIS_MU: &str = "closed form of mu_eps(sigma) = integral of 2 tau^2 / (tau + eps)";

pub const LIPSCHITZ_SAMPLES: usize = 1_000_000;
const GROWTH_SAMPLES: usize = 200_000;
const HOLDER_SAMPLES: usize = 200_000;
const MU_SAMPLES: usize = 1_000;
const MODULUS: f64 = 10.0;
const DELTA: f64 = 0.5;
const HOLDER_A: f64 = 0.5;
const GROWTH_C_LIMIT: f64 = 5.0;
const GROWTH_STABILITY: f64 = 0.01;
const MU_LIMIT: f64 = 1e-10;

pub(super) fn defaults(_: &mut ExperimentConfig) {}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Complex number with modulus at most `MODULUS`, mixing uniform and
/// log-uniform radii so both the bulk and the neighbourhood of 0 are hit.
fn point<R: Rng>(rng: &mut R) -> Complex<f64> {
    let r = match rng.random_range(0..4) {
        0 => 0.0,
        1 => log_uniform(rng, 1e-12, MODULUS),
        _ => rng.random_range(0.0..=MODULUS),
    };
    Complex::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

fn regularization<R: Rng>(rng: &mut R) -> f64 {
    match rng.random_range(0..4) {
        0 => 0.0,
        1 => log_uniform(rng, 1e-9, 1.0),
        _ => rng.random_range(0.0..=1.0),
    }
}

/// Partner of `u`: independent, or a small perturbation of it.
fn partner<R: Rng>(rng: &mut R, u: Complex<f64>) -> Complex<f64> {
    if rng.random_bool(0.5) {
        return point(rng);
    }
    let d = Complex::from_polar(
        log_uniform(rng, 1e-10, 1.0),
        rng.random_range(0.0..std::f64::consts::TAU),
    );
    let v = u + d;
    if v.norm() > MODULUS {
        v * (MODULUS / v.norm())
    } else {
        v
    }
}

fn growth_constant(rng: &mut ChaCha8Rng, samples: usize) -> Result<f64> {
    let mut best = 0.0f64;
    for _ in 0..samples {
        let z = Complex::from_polar(
            log_uniform(rng, 1e-12, 1e12),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        best = best.max(check_log_growth(z, DELTA)?.ratio);
    }
    Ok(best)
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut out = Output::create(&cfg.output_dir)?;
    let mut report = ExperimentReport::new(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut violations = 0usize;
    let mut worst_excess = f64::NEG_INFINITY;
    for _ in 0..LIPSCHITZ_SAMPLES {
        let u = point(&mut rng);
        let v = partner(&mut rng, u);
        let eps = regularization(&mut rng);
        let mu = if rng.random_bool(0.1) {
            eps
        } else {
            regularization(&mut rng)
        };
        let c = check_log_lipschitz(u, v, eps, mu);
        if !c.holds {
            violations += 1;
        }
        worst_excess = worst_excess.max(c.lhs - c.rhs);
    }
    report.record("lipschitz_worst_excess", worst_excess);
    report.check(
        "lipschitz_violations",
        BASIS_LIPSCHITZ,
        violations == 0,
        violations as f64,
        Some(0.0),
        format!("{LIPSCHITZ_SAMPLES} samples, |u|, |v| <= {MODULUS}, eps, mu in [0, 1], additive slack 1e-12"),
    );

    let c1 = growth_constant(&mut rng, GROWTH_SAMPLES)?;
    let c2 = c1.max(growth_constant(&mut rng, GROWTH_SAMPLES)?);
    let sup = log_growth_sup(DELTA);
    let change = (c2 - c1) / c1;
    report.record("growth_constant", c2);
    report.record("growth_constant_half_ensemble", c1);
    report.record("growth_sup_analytic", sup);
    report.check(
        "growth_constant",
        BASIS_GROWTH,
        c2 < GROWTH_C_LIMIT && c2 <= sup * (1.0 + 1e-12),
        c2,
        Some(GROWTH_C_LIMIT),
        format!(
            "delta = {DELTA}; empirical C = {}, analytic supremum {}",
            fmt(c2),
            fmt(sup)
        ),
    );
    report.check(
        "growth_stability",
        BASIS_GROWTH,
        change < GROWTH_STABILITY,
        change,
        Some(GROWTH_STABILITY),
        format!("relative change of C when the ensemble doubles from {GROWTH_SAMPLES}"),
    );

    let mut holder = 0.0f64;
    for _ in 0..HOLDER_SAMPLES {
        let u = point(&mut rng);
        let v = partner(&mut rng, u);
        let eps = regularization(&mut rng).min(0.999);
        let c = check_holder_log(u, v, eps, HOLDER_A)?;
        if c.bracket > 0.0 {
            holder = holder.max(c.lhs / c.bracket);
        }
    }
    report.record("holder_constant", holder);
    report.check(
        "holder_finite",
        BASIS_HOLDER,
        holder.is_finite(),
        holder,
        None,
        format!(
            "a = {HOLDER_A}: fitted constant {} over {HOLDER_SAMPLES} samples",
            fmt(holder)
        ),
    );

    let mut rows = Vec::with_capacity(MU_SAMPLES);
    let mut worst = 0.0f64;
    for _ in 0..MU_SAMPLES {
        let sigma = log_uniform(&mut rng, 1e-6, 10.0);
        let eps = log_uniform(&mut rng, 1e-6, 1.0);
        let closed = mu_eps(sigma, RegularizationLevel::new(eps)?);
        let quad = mu_eps_quadrature(sigma, eps);
        let rel = (closed - quad).abs() / quad.abs();
        worst = worst.max(rel);
        rows.push(vec![
            sigma.to_string(),
            eps.to_string(),
            closed.to_string(),
            quad.to_string(),
            rel.to_string(),
        ]);
    }
    out.table(
        "mu_eps_oracle",
        &["sigma", "eps", "closed_form", "quadrature", "relative_error"],
        &rows,
    )?;
    report.check(
        "mu_eps_quadrature",
        BASIS_MU,
        worst < MU_LIMIT,
        worst,
        Some(MU_LIMIT),
        format!("{MU_SAMPLES} samples, sigma in [1e-6, 10], eps in [1e-6, 1]"),
    );
    out.finish(report)
}
