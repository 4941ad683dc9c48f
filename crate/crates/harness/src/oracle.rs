//! Independent numerical references used by the experiments.

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `μ_ε(σ) = ∫_0^σ 2τ² / (τ + ε) dτ` by quadrature.
pub fn mu_eps_quadrature(sigma: f64, eps: f64) -> f64 {
    let f = |t: f64| 2.0 * t * t / (t + eps);
    // |μ| >= 2σ³ / (3(σ + ε)), which fixes the relative scale
    let scale = 2.0 * sigma.powi(3) / (3.0 * (sigma + eps));
    adaptive_simpson(&f, 0.0, sigma, 1e-15 * scale)
}

/// `sup_r 2 r |log r| / (r^{1-δ} + r^{1+δ}) = max_y (y / cosh y) / δ`,
/// attained where `y tanh y = 1`.
pub fn log_growth_sup(delta: f64) -> f64 {
    let mut y = 1.2f64;
    for _ in 0..50 {
        let g = y * y.tanh() - 1.0;
        let dg = y.tanh() + y / y.cosh().powi(2);
        y -= g / dg;
    }
    y / y.cosh() / delta
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomials_and_exp() {
        assert!((adaptive_simpson(&|x| x * x * x, 0.0, 2.0, 1e-14) - 4.0).abs() < 1e-13);
        let e = adaptive_simpson(&f64::exp, 0.0, 1.0, 1e-14);
        assert!((e - (std::f64::consts::E - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn mu_limits() {
        // ε → 0 gives σ², and σ ≪ ε gives 2σ³/(3ε)
        assert!((mu_eps_quadrature(2.0, 1e-12) - 4.0).abs() < 1e-10);
        let (s, e) = (1e-4, 1.0);
        assert!((mu_eps_quadrature(s, e) / (2.0 * s.powi(3) / 3.0) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn growth_sup_value() {
        let brute = (1..200_000)
            .map(|i| {
                let x = -20.0 + 40.0 * i as f64 / 200_000.0;
                x.abs() / (0.5 * x).cosh()
            })
            .fold(0.0, f64::max);
        assert!((log_growth_sup(0.5) - brute).abs() < 1e-6);
        assert!((log_growth_sup(1.0) - 0.662_743_4).abs() < 1e-6);
    }
}
