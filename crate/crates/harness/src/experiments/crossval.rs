use anyhow::{bail, Result};
use num_complex::Complex;

use fraclog::fractional::{
    frac_laplacian, gagliardo_seminorm_sq, hs_seminorm_sq, singular_integral_constant, singular_integral_laplacian,
};
use fraclog::{Field64, FractionalOrder, Grid64};

use super::fmt;
use crate::config::{ExperimentConfig, InitialDatum};
use crate::report::{ExperimentReport, Output};

const BASIS_SYMBOL: &str = "the fractional Laplacian is the Fourier multiplier |xi|^{2s}";
const BASIS_GAGLIARDO: &str = "the Gagliardo double integral equals the spectral H^s seminorm up to a constant";
const BASIS_SINGULAR: &str = "singular-integral form of (-Delta)^s with second differences f(x+y)+f(x-y)-2f(x)";
const EXACTNESS_LIMIT: f64 = 1e-12;
const SPREAD_LIMIT: f64 = 0.02;
const DISTANCE_LIMIT: f64 = 0.05;
const FIELDS: u64 = 5;
const PLANE_WAVE_LENGTH: f64 = 32.0;
const MULTIPLIER_ORDERS: [f64; 4] = [0.3, 0.5, 0.7, 1.0];

pub(super) fn defaults(cfg: &mut ExperimentConfig) {
    cfg.grid.length = 16.0;
    cfg.initial_datum = InitialDatum::RandomBandlimited {
        band: 4.0,
        seed: cfg.seed,
    };
}

fn field(cfg: &ExperimentConfig, grid: &std::sync::Arc<Grid64>, offset: u64) -> Result<Field64> {
    let mut c = cfg.clone();
    if let InitialDatum::RandomBandlimited { seed, .. } = &mut c.initial_datum {
        *seed = seed.wrapping_add(offset);
    } else if offset > 0 {
        bail!("operator_crossval needs the random_bandlimited datum for its field ensemble");
    }
    c.datum(grid)
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut out = Output::create(&cfg.output_dir)?;
    let mut report = ExperimentReport::new(cfg);
    let s = FractionalOrder::new(cfg.params.s)?;
    let mut rows = Vec::new();

    let waves = Grid64::new(cfg.grid.d, cfg.grid.n, PLANE_WAVE_LENGTH)?;
    let mut worst = 0.0f64;
    let mut worst_residual = 0.0f64;
    for &order in &MULTIPLIER_ORDERS {
        let so = FractionalOrder::new(order)?;
        for m in [1usize, 3, 7, cfg.grid.n / 4, cfg.grid.n / 2 - 1] {
            let k0 = waves.wavenumbers()[m];
            let u = Field64::sample(waves.clone(), |x| Complex::from_polar(1.0, k0 * x[0]))?;
            let eig = k0.abs().powf(2.0 * order);
            let lu = frac_laplacian(&u, so);
            let rayleigh = lu.inner_product(&u)?.re / u.norm_sq();
            let err = (rayleigh - eig).abs() / eig;
            let residual = lu.sub(&u.scale(Complex::new(eig, 0.0)))?.norm() / (eig * u.norm());
            worst = worst.max(err);
            worst_residual = worst_residual.max(residual);
            rows.push(vec![
                "plane_wave".into(),
                order.to_string(),
                k0.to_string(),
                err.to_string(),
            ]);
        }
    }
    report.check(
        "multiplier_exactness",
        BASIS_SYMBOL,
        worst < EXACTNESS_LIMIT,
        worst,
        Some(EXACTNESS_LIMIT),
        format!("Rayleigh quotient of plane waves on L = {PLANE_WAVE_LENGTH}, s in {MULTIPLIER_ORDERS:?}"),
    );
    report.diagnostic(
        "multiplier_residual",
        BASIS_SYMBOL,
        worst_residual,
        "|L u - |k|^{2s} u| / (|k|^{2s} |u|), includes sampling roundoff amplified by |k_max|^{2s}",
    );

    let grid = cfg.grid()?;
    let mut ratios = Vec::new();
    for i in 0..FIELDS {
        let u = field(cfg, &grid, i)?;
        let ratio = gagliardo_seminorm_sq(&u, s)? / hs_seminorm_sq(&u, s);
        rows.push(vec![
            "gagliardo_ratio".into(),
            cfg.params.s.to_string(),
            i.to_string(),
            ratio.to_string(),
        ]);
        ratios.push(ratio);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread =
        (ratios.iter().cloned().fold(f64::MIN, f64::max) - ratios.iter().cloned().fold(f64::MAX, f64::min)) / mean;
    report.record("gagliardo_ratio_mean", mean);
    report.record(
        "gagliardo_ratio_normalized",
        mean * singular_integral_constant(cfg.grid.d, cfg.params.s) / 2.0,
    );
    report.check(
        "gagliardo_spread",
        BASIS_GAGLIARDO,
        spread < SPREAD_LIMIT,
        spread,
        Some(SPREAD_LIMIT),
        format!("(max - min) / mean over {FIELDS} fields at n = {}", cfg.grid.n),
    );

    let mut distances = Vec::new();
    for n in [cfg.grid.n / 4, cfg.grid.n / 2, cfg.grid.n] {
        let g = Grid64::new(cfg.grid.d, n, cfg.grid.length)?;
        let u = field(cfg, &g, 0)?;
        let spectral = frac_laplacian(&u, s);
        let quad = singular_integral_laplacian(&u, s)?;
        let d = quad.sub(&spectral)?.norm() / spectral.norm();
        report.record(format!("singular_distance_n{n}"), d);
        rows.push(vec![
            "singular_distance".into(),
            cfg.params.s.to_string(),
            n.to_string(),
            d.to_string(),
        ]);
        distances.push(d);
    }
    let finest = *distances.last().expect("three levels");
    report.check(
        "singular_integral_distance",
        BASIS_SINGULAR,
        finest < DISTANCE_LIMIT,
        finest,
        Some(DISTANCE_LIMIT),
        format!("relative L2 distance at n = {}", cfg.grid.n),
    );
    report.check(
        "singular_integral_refinement",
        BASIS_SINGULAR,
        distances.windows(2).all(|w| w[1] < w[0]),
        finest,
        None,
        format!(
            "distances at n/4, n/2, n: [{}]",
            distances.iter().map(|d| fmt(*d)).collect::<Vec<_>>().join(", ")
        ),
    );
    out.table("operator_crossval", &["check", "s", "parameter", "value"], &rows)?;
    out.finish(report)
}
