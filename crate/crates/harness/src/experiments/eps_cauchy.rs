use anyhow::{bail, Result};

use fraclog::{Field64, Params64, RegularizationLevel, Trajectory64};

use super::{evolve_recorded, fmt};
use crate::config::ExperimentConfig;
use crate::cutoff::CutoffZeta;
use crate::report::{ExperimentReport, Output};

const BASIS: &str = "localized L2 Cauchy estimate for the regularized solutions as eps decreases";

pub(super) fn defaults(cfg: &mut ExperimentConfig) {
    cfg.sweeps.eps = Some(vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3]);
    cfg.sweeps.radius = Some(vec![cfg.grid.length / 8.0, cfg.grid.length / 4.0]);
}

fn localized_distance(zeta: &[f64], a: &Field64, b: &Field64) -> Result<f64> {
    Ok(a.sub(b)?.weighted(|i| zeta[i]).norm())
}

/// Running supremum over samples of `‖ζ_R (u_a - u_b)‖`.
fn running_sup(zeta: &[f64], a: &Trajectory64, b: &Trajectory64) -> Result<Vec<f64>> {
    let mut sup = 0.0f64;
    let mut out = Vec::with_capacity(a.states.len());
    for (ua, ub) in a.states.iter().zip(&b.states) {
        sup = sup.max(localized_distance(zeta, ua, ub)?);
        out.push(sup);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
struct Fit {
    a: f64,
    b: f64,
    rms: f64,
}

/// Non-negative least squares for `y ≈ a·x0 + b·x1`, in relative residuals.
fn fit_two(rows: &[([f64; 2], f64)]) -> Fit {
    let scaled: Vec<([f64; 2], f64)> = rows.iter().map(|(x, y)| ([x[0] / y, x[1] / y], 1.0)).collect();
    let rms = |a: f64, b: f64| {
        let ss: f64 = scaled.iter().map(|(x, y)| (a * x[0] + b * x[1] - y).powi(2)).sum();
        (ss / scaled.len() as f64).sqrt()
    };
    let (mut s00, mut s01, mut s11, mut r0, mut r1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in &scaled {
        s00 += x[0] * x[0];
        s01 += x[0] * x[1];
        s11 += x[1] * x[1];
        r0 += x[0] * y;
        r1 += x[1] * y;
    }
    let det = s00 * s11 - s01 * s01;
    let (a, b) = ((r0 * s11 - r1 * s01) / det, (r1 * s00 - r0 * s01) / det);
    if a >= 0.0 && b >= 0.0 && det.abs() > 0.0 {
        return Fit { a, b, rms: rms(a, b) };
    }
    let only_a = Fit {
        a: (r0 / s00).max(0.0),
        b: 0.0,
        rms: rms((r0 / s00).max(0.0), 0.0),
    };
    let only_b = Fit {
        a: 0.0,
        b: (r1 / s11).max(0.0),
        rms: rms(0.0, (r1 / s11).max(0.0)),
    };
    if only_a.rms <= only_b.rms {
        only_a
    } else {
        only_b
    }
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut out = Output::create(&cfg.output_dir)?;
    let mut report = ExperimentReport::new(cfg);
    let grid = cfg.grid()?;
    let phi = cfg.datum(&grid)?;
    let base = cfg.params()?;
    let s = base.s.get();
    let eps_values = cfg.sweeps.eps.clone().unwrap_or_else(|| vec![base.eps.get()]);
    let radii = cfg.sweeps.radius.clone().unwrap_or_else(|| vec![grid.length() / 4.0]);
    if eps_values.iter().any(|&e| e <= 0.0) {
        bail!("the eps sweep needs positive values");
    }
    let cutoffs: Vec<CutoffZeta> = radii.iter().map(|&r| CutoffZeta::new(r)).collect::<Result<_>>()?;
    let zetas: Vec<Vec<f64>> = cutoffs.iter().map(|z| z.on_grid(&grid)).collect();

    let with_eps = |e: f64| -> Result<Params64> {
        Ok(Params64 {
            eps: RegularizationLevel::new(e)?,
            ..base
        })
    };

    let mut sups = vec![Vec::new(); radii.len()];
    let mut fit_rows_const = Vec::new();
    let mut fit_rows_linear = Vec::new();
    let mut table = Vec::new();
    let phi_norm = phi.norm();
    for &eps in &eps_values {
        let mu = eps / 2.0;
        let a = evolve_recorded(&mut out, &format!("eps{eps}"), &phi, &with_eps(eps)?, &base.probe())?;
        let b = evolve_recorded(&mut out, &format!("eps{mu}"), &phi, &with_eps(mu)?, &base.probe())?;
        for (j, (zeta, cut)) in zetas.iter().zip(&cutoffs).enumerate() {
            let run = running_sup(zeta, &a, &b)?;
            let sup = *run.last().expect("non-empty");
            sups[j].push(sup);
            report.record(format!("sup_eps{eps}_R{}", cut.radius()), sup);
            let x0 = cut.radius().powf(-s);
            let x1 = (eps - mu) * cut.support_measure(grid.dim()).sqrt() * phi_norm;
            for (t, y) in a.times.iter().zip(&run) {
                table.push(vec![
                    eps.to_string(),
                    mu.to_string(),
                    cut.radius().to_string(),
                    t.to_string(),
                    y.to_string(),
                ]);
                if *y > 0.0 {
                    fit_rows_const.push(([x0, x1], *y));
                    fit_rows_linear.push(([x0 * t, x1 * t], *y));
                }
            }
        }
    }
    out.table("eps_cauchy_sup", &["eps", "mu", "R", "t", "running_sup"], &table)?;

    for (j, cut) in cutoffs.iter().enumerate() {
        let v = &sups[j];
        let decreasing = v.windows(2).all(|w| w[1] < w[0]);
        let worst = v.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        report.check(
            &format!("eps_monotone_R{}", cut.radius()),
            BASIS,
            decreasing,
            worst,
            Some(1.0),
            format!(
                "sup differences along the sweep: [{}]",
                v.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(", ")
            ),
        );
    }

    let mut r_monotone = true;
    for j in 1..radii.len() {
        if radii[j] > radii[j - 1] && sups[j].iter().zip(&sups[j - 1]).any(|(big, small)| big > small) {
            r_monotone = false;
        }
    }
    report.diagnostic(
        "raw_radius_monotone",
        BASIS,
        if r_monotone { 1.0 } else { 0.0 },
        "1 if enlarging R never increased the raw sup (not implied by the estimate)",
    );

    let fc = fit_two(&fit_rows_const);
    let fl = fit_two(&fit_rows_linear);
    for (name, f) in [("const", fc), ("linear_t", fl)] {
        report.record(format!("fit_{name}_a"), f.a);
        report.record(format!("fit_{name}_b"), f.b);
        report.record(format!("fit_{name}_rms"), f.rms);
    }
    let ok = [fc.a, fc.b, fc.rms, fl.a, fl.b, fl.rms]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0);
    report.check(
        "fit_finite",
        BASIS,
        ok,
        fc.rms.min(fl.rms),
        None,
        "fitted constants of a/R^s + b|eps-mu||B_2R|^(1/2)|phi| (constant and linear in t) are finite and non-negative",
    );
    report.diagnostic(
        "better_form",
        BASIS,
        if fl.rms < fc.rms { 1.0 } else { 0.0 },
        format!(
            "relative rms: constant-in-t {}, linear-in-t {}; 1 means linear-in-t fits better",
            fmt(fc.rms),
            fmt(fl.rms)
        ),
    );

    let same = evolve_recorded(&mut out, "eps_equal", &phi, &with_eps(eps_values[0])?, &base.probe())?;
    let first = evolve_recorded(
        &mut out,
        "eps_equal_repeat",
        &phi,
        &with_eps(eps_values[0])?,
        &base.probe(),
    )?;
    let zero = running_sup(&zetas[0], &same, &first)?
        .last()
        .copied()
        .unwrap_or(f64::NAN);
    report.check(
        "eps_equal_zero",
        BASIS,
        zero == 0.0,
        zero,
        Some(0.0),
        "eps = mu gives identical runs",
    );
    out.finish(report)
}
