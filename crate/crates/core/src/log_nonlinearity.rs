//! Logarithmic nonlinearity, its ε-regularization, auxiliary profiles and
//! pointwise inequality oracles.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::ComplexField;
use crate::scalar::Real;

/// Modulus below which `z log|z|` is replaced by its limit 0.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

fn floor<T: Real>() -> T {
    T::lit(UNDERFLOW_FLOOR).max(T::min_positive_value())
}

/// Regularization parameter `ε >= 0`; zero is the plain logarithm.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct RegularizationLevel<T>(T);

impl<T: Real> RegularizationLevel<T> {
    pub fn new(eps: T) -> Result<Self> {
        if eps >= T::zero() && eps.is_finite() {
            Ok(RegularizationLevel(eps))
        } else {
            Err(Error::InvalidParameter(format!(
                "regularization ε = {eps} must be finite and >= 0"
            )))
        }
    }

    pub fn zero() -> Self {
        RegularizationLevel(T::zero())
    }

    pub fn get(self) -> T {
        self.0
    }
}

/// Real coupling `λ` of either sign.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct CouplingConstant<T>(T);

impl<T: Real> CouplingConstant<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if lambda.is_finite() {
            Ok(CouplingConstant(lambda))
        } else {
            Err(Error::InvalidParameter(format!("coupling λ = {lambda} must be finite")))
        }
    }

    pub fn get(self) -> T {
        self.0
    }

    /// True for `λ < 0`.
    pub fn is_focusing(self) -> bool {
        self.0 < T::zero()
    }
}

/// `log(a + ε)`, or `None` when `a + ε` is below the underflow floor.
#[inline]
fn log_shifted<T: Real>(a: T, eps: T) -> Option<T> {
    let arg = a + eps;
    if arg <= floor() {
        None
    } else {
        Some(arg.ln())
    }
}

/// `z log(|z| + ε)`, zero at the singular point.
#[inline]
pub fn z_log<T: Real>(z: Complex<T>, eps: T) -> Complex<T> {
    match log_shifted(z.norm(), eps) {
        Some(l) => z * l,
        None => Complex::new(T::zero(), T::zero()),
    }
}

/// `g_ε(z) = 2 z log(|z| + ε)`.
pub fn g_eps<T: Real>(z: Complex<T>, eps: RegularizationLevel<T>) -> Complex<T> {
    z_log(z, eps.get()) * T::lit(2.0)
}

pub fn g_eps_field<T: Real>(u: &ComplexField<T>, eps: RegularizationLevel<T>) -> ComplexField<T> {
    u.map_values(|_, v| g_eps(v, eps))
}

/// Exact flow of `i ∂_t u = 2λ u log(|u| + ε)` over `dt`: a pointwise
/// rotation by `-2λ dt log(|u| + ε)`.
pub fn nonlinear_phase_flow<T: Real>(
    u: &ComplexField<T>,
    lambda: CouplingConstant<T>,
    eps: RegularizationLevel<T>,
    dt: T,
) -> ComplexField<T> {
    let rate = -T::lit(2.0) * lambda.get() * dt;
    let e = eps.get();
    u.map_values(|_, v| match log_shifted(v.norm(), e) {
        Some(l) => v * Complex::from_polar(T::one(), rate * l),
        None => v,
    })
}

const SERIES_SWITCH: f64 = 0.25;

/// `μ_ε(σ) = ∫_0^σ 2τ²/(τ + ε) dτ = σ² - 2εσ + 2ε² log(1 + σ/ε)`.
///
/// For `σ/ε` small the closed form cancels; the tail of the `log1p` series
/// is summed directly instead.
pub fn mu_eps<T: Real>(sigma: T, eps: RegularizationLevel<T>) -> T {
    let e = eps.get();
    if e == T::zero() {
        return sigma * sigma;
    }
    let x = sigma / e;
    if x < T::lit(SERIES_SWITCH) {
        // 2ε² Σ_{k>=3} (-1)^{k+1} x^k / k
        let mut term = x * x * x;
        let mut sum = T::zero();
        let mut k = 3;
        loop {
            let add = term / T::from_i32(k).unwrap();
            sum = if k % 2 == 1 { sum + add } else { sum - add };
            if add <= T::epsilon() * sum.abs() * T::lit(0.01) || k > 200 {
                break;
            }
            term = term * x;
            k += 1;
        }
        T::lit(2.0) * e * e * sum
    } else {
        sigma * sigma - T::lit(2.0) * e * sigma + T::lit(2.0) * e * e * x.ln_1p()
    }
}

/// Quintic smoothstep plateau: 1 on `r <= inner`, 0 on `r >= outer`, C² and
/// monotone in between.
pub fn smooth_plateau<T: Real>(r: T, inner: T, outer: T) -> T {
    if r <= inner {
        T::one()
    } else if r >= outer {
        T::zero()
    } else {
        let t = (r - inner) / (outer - inner);
        let up = t * t * t * (T::lit(10.0) + t * (T::lit(-15.0) + T::lit(6.0) * t));
        T::one() - up
    }
}

/// `θ(z)`: 1 for `|z| <= 1/4`, 0 for `|z| >= 1/2`.
pub fn theta_cutoff<T: Real>(z: Complex<T>) -> T {
    smooth_plateau(z.norm(), T::lit(0.25), T::lit(0.5))
}

/// `|z|² log((|z| + ε)²)`, zero at the singular point.
pub fn log_energy_density<T: Real>(z: Complex<T>, eps: T) -> T {
    match log_shifted(z.norm(), eps) {
        Some(l) => T::lit(2.0) * z.norm_sqr() * l,
        None => T::zero(),
    }
}

/// `(F_1ε, F_2ε) = (θ, 1 - θ) · |z|² log((|z| + ε)²)`.
pub fn f_split<T: Real>(z: Complex<T>, eps: RegularizationLevel<T>) -> (T, T) {
    let base = log_energy_density(z, eps.get());
    let th = theta_cutoff(z);
    (th * base, (T::one() - th) * base)
}

/// Both sides of the log-Lipschitz inequality
/// `|Im(u log(|u|+ε) - v log(|v|+μ))(ū - v̄)| <= |u-v|² + |ε-μ| |u-v|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InequalityCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

pub const LIPSCHITZ_SLACK: f64 = 1e-12;

pub fn check_log_lipschitz<T: Real>(u: Complex<T>, v: Complex<T>, eps: T, mu: T) -> InequalityCheck<T> {
    let diff = u - v;
    let lhs = ((z_log(u, eps) - z_log(v, mu)) * diff.conj()).im.abs();
    let dn = diff.norm();
    let rhs = dn * dn + (eps - mu).abs() * dn;
    let holds = lhs <= rhs + T::lit(LIPSCHITZ_SLACK);
    InequalityCheck { lhs, rhs, holds }
}

/// `|z log|z|²|` against `|z|^{1-δ} + |z|^{1+δ}`, with ratio 0 at `z = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub ratio: T,
}

pub fn check_log_growth<T: Real>(z: Complex<T>, delta: T) -> Result<GrowthCheck<T>> {
    if !(delta > T::zero() && delta < T::one()) {
        return Err(Error::InvalidParameter(format!("δ = {delta} not in (0, 1)")));
    }
    let r = z.norm();
    let lhs = if r <= floor() {
        T::zero()
    } else {
        T::lit(2.0) * r * r.ln().abs()
    };
    let rhs = r.powf(T::one() - delta) + r.powf(T::one() + delta);
    let ratio = if rhs == T::zero() { T::zero() } else { lhs / rhs };
    Ok(GrowthCheck { lhs, rhs, ratio })
}

/// Left side `|v log(|v|+ε) - u log|u||` and the bracket
/// `ε + |u-v| + (1 + |u|^{1-a} log⁺|u| + |v|^{1-a} log⁺|v|) |u-v|^a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderCheck<T> {
    pub lhs: T,
    pub bracket: T,
}

pub fn check_holder_log<T: Real>(u: Complex<T>, v: Complex<T>, eps: T, a: T) -> Result<HolderCheck<T>> {
    if !(eps >= T::zero() && eps < T::one()) || !(a > T::zero() && a < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "need ε in [0,1) and a in (0,1), got {eps}, {a}"
        )));
    }
    let lhs = (z_log(v, eps) - z_log(u, T::zero())).norm();
    let log_plus = |r: T| if r > T::one() { r.ln() } else { T::zero() };
    let (ru, rv) = (u.norm(), v.norm());
    let d = (u - v).norm();
    let bracket =
        eps + d + (T::one() + ru.powf(T::one() - a) * log_plus(ru) + rv.powf(T::one() - a) * log_plus(rv)) * d.powf(a);
    Ok(HolderCheck { lhs, bracket })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn eps(e: f64) -> RegularizationLevel<f64> {
        RegularizationLevel::new(e).unwrap()
    }

    #[test]
    fn g_eps_values() {
        assert_eq!(g_eps(c(0.0, 0.0), eps(0.1)), c(0.0, 0.0));
        assert_eq!(g_eps(c(1.0, 0.0), eps(0.0)), c(0.0, 0.0));
        let h = 0.5f64.exp();
        assert!((g_eps(c(h, 0.0), eps(0.0)) - c(h, 0.0)).norm() < 1e-15);
        assert_eq!(g_eps(c(1e-310, 0.0), eps(0.0)), c(0.0, 0.0));
        assert!(RegularizationLevel::new(-0.1).is_err());
        assert!(CouplingConstant::new(f64::NAN).is_err());
    }

    #[test]
    fn phase_flow_identity_cases() {
        let g = Grid::<f64>::new(1, 32, 8.0).unwrap();
        let u = ComplexField::sample(g.clone(), |x| c((-x[0] * x[0]).exp(), 0.3 * x[0])).unwrap();
        let lam = CouplingConstant::new(-1.3).unwrap();
        let same = nonlinear_phase_flow(&u, lam, eps(0.2), 0.0);
        assert_eq!(same.values(), u.values());
        let unit = ComplexField::sample(g, |x| Complex::from_polar(1.0, x[0])).unwrap();
        let out = nonlinear_phase_flow(&unit, lam, eps(0.0), 0.7);
        assert!(out.relative_distance(&unit).unwrap() < 1e-15);
    }

    #[test]
    fn mu_eps_edge_values() {
        assert_eq!(mu_eps(2.5, eps(0.0)), 6.25);
        assert_eq!(mu_eps(0.0, eps(0.3)), 0.0);
        // the two branches agree at the switch point
        let e = eps(1.0);
        let below = mu_eps(SERIES_SWITCH * (1.0 - 1e-12), e);
        let x = SERIES_SWITCH;
        let closed = x * x - 2.0 * x + 2.0 * x.ln_1p();
        assert!((below - closed).abs() / closed < 1e-11);
    }

    #[test]
    fn theta_plateaus_and_smoothness() {
        assert_eq!(theta_cutoff(c(0.2, 0.0)), 1.0);
        assert_eq!(theta_cutoff(c(0.0, 0.6)), 0.0);
        let mid = theta_cutoff(c(0.375, 0.0));
        assert!(mid > 0.0 && mid < 1.0);
        let f = |r: f64| theta_cutoff(c(r, 0.0));
        let h = 1e-6;
        for edge in [0.25, 0.5] {
            let left = (f(edge) - f(edge - h)) / h;
            let right = (f(edge + h) - f(edge)) / h;
            assert!(left.abs() < 1e-5 && right.abs() < 1e-5, "{left} {right}");
            assert!((f(edge + h) - f(edge - h)).abs() < 1e-9);
        }
        let mut prev = 1.0;
        for j in 0..=100 {
            let v = f(0.25 + 0.25 * j as f64 / 100.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn f_split_plateaus() {
        let (_, f2) = f_split(c(0.2, 0.1), eps(0.1));
        assert_eq!(f2, 0.0);
        let (f1, _) = f_split(c(0.4, 0.4), eps(0.1));
        assert_eq!(f1, 0.0);
        assert_eq!(f_split(c(0.0, 0.0), eps(0.0)), (0.0, 0.0));
    }

    #[test]
    fn lipschitz_trivial_case() {
        let r = check_log_lipschitz(c(0.3, -2.0), c(0.3, -2.0), 0.4, 0.4);
        assert_eq!(r.lhs, 0.0);
        assert!(r.holds);
        let r = check_log_lipschitz(c(1.5, 0.5), c(0.0, 0.0), 0.2, 0.0);
        assert!(r.holds && r.lhs <= r.rhs);
    }

    #[test]
    fn growth_conventions() {
        let one = check_log_growth(c(1.0, 0.0), 0.5).unwrap();
        assert_eq!(one.lhs, 0.0);
        let zero = check_log_growth(c(0.0, 0.0), 0.5).unwrap();
        assert_eq!((zero.lhs, zero.rhs, zero.ratio), (0.0, 0.0, 0.0));
        assert!(check_log_growth(c(1.0, 0.0), 1.0).is_err());
        let z = check_log_growth(c(0.0, 3.0), 0.5).unwrap();
        assert!((z.lhs - 3.0 * 9f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn holder_trivial_cases() {
        let r = check_holder_log(c(0.7, 0.2), c(0.7, 0.2), 0.0, 0.5).unwrap();
        assert_eq!(r.lhs, 0.0);
        let r = check_holder_log(c(0.0, 0.0), c(0.0, 0.0), 0.3, 0.5).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.bracket, 0.3);
    }

    proptest! {
        #[test]
        fn phase_flow_preserves_modulus_and_composes(
            re in -3.0f64..3.0, im in -3.0f64..3.0, lam in -2.0f64..2.0,
            e in 0.0f64..0.5, t1 in -1.0f64..1.0, t2 in -1.0f64..1.0,
        ) {
            let g = Grid::<f64>::new(1, 8, 8.0).unwrap();
            let u = ComplexField::sample(g, |x| c(re + x[0] * 0.1, im)).unwrap();
            let lam = CouplingConstant::new(lam).unwrap();
            let a = nonlinear_phase_flow(&nonlinear_phase_flow(&u, lam, eps(e), t1), lam, eps(e), t2);
            let b = nonlinear_phase_flow(&u, lam, eps(e), t1 + t2);
            for (p, q) in a.values().iter().zip(u.values()) {
                prop_assert!((p.norm() - q.norm()).abs() <= 1e-15 * q.norm().max(1e-300) * 4.0);
            }
            prop_assert!(a.sub(&b).unwrap().max_abs() <= 1e-13 * u.max_abs().max(1.0));
        }

        #[test]
        fn mu_eps_monotone_and_bounded(s1 in 0.0f64..20.0, ds in 0.0f64..5.0, e in 0.0f64..2.0) {
            let (a, b) = (mu_eps(s1, eps(e)), mu_eps(s1 + ds, eps(e)));
            prop_assert!(a >= 0.0 && a <= s1 * s1 * (1.0 + 1e-15));
            prop_assert!(b >= a * (1.0 - 1e-14));
        }

        #[test]
        fn f_split_sums_to_density(re in -5.0f64..5.0, im in -5.0f64..5.0, e in 0.0f64..1.0) {
            let z = c(re, im);
            let (f1, f2) = f_split(z, eps(e));
            let base = log_energy_density(z, e);
            prop_assert!((f1 + f2 - base).abs() <= 1e-13 * base.abs().max(1e-300));
        }
    }
}
