//! Realizations of the fractional Laplacian `(-Δ)^s` and related operators.
//!
//! The spectral multiplier `|k|^{2s}` is the reference realization. The
//! Gagliardo double sum and the singular-integral form are O(n²)
//! quadratures kept for cross-validation; both use the image-summed periodic
//! kernel so that on lattice modes they reproduce the continuum symbol up to
//! the near-diagonal discretization error.

use std::sync::Arc;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::datum::{random_bandlimited, BandlimitedSpec};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid};
use crate::scalar::Real;

/// Largest `n` accepted by the O(n²) quadratures.
pub const QUADRATURE_MAX_N: usize = 512;

/// Exponent `s` of `(-Δ)^s`, `0 < s <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct FractionalOrder<T>(T);

impl<T: Real> FractionalOrder<T> {
    pub fn new(s: T) -> Result<Self> {
        if s > T::zero() && s <= T::one() {
            Ok(FractionalOrder(s))
        } else {
            Err(Error::InvalidParameter(format!(
                "fractional order s = {s} not in (0, 1]"
            )))
        }
    }

    pub fn get(self) -> T {
        self.0
    }
}

/// Weight exponent `α` of `<x>^α`. Zero is reserved for the degenerate
/// control built by [`MomentOrder::none`].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct MomentOrder<T>(T);

impl<T: Real> MomentOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha > T::zero() && alpha <= T::one() {
            Ok(MomentOrder(alpha))
        } else {
            Err(Error::InvalidParameter(format!(
                "moment order α = {alpha} not in (0, 1]"
            )))
        }
    }

    /// `α = 0`, i.e. the weight `<x>^0 = 1`.
    pub fn none() -> Self {
        MomentOrder(T::zero())
    }

    pub fn get(self) -> T {
        self.0
    }

    /// `0 < α < 2s` and `α <= 1`.
    pub fn is_admissible(self, s: FractionalOrder<T>) -> bool {
        self.0 > T::zero() && self.0 < T::lit(2.0) * s.get() && self.0 <= T::one()
    }
}

fn radial_power<T: Real>(u: &ComplexField<T>, p: T) -> ComplexField<T> {
    u.forward()
        .apply_radial(|k| {
            if k == T::zero() {
                Complex::new(T::zero(), T::zero())
            } else {
                Complex::new(k.powf(p), T::zero())
            }
        })
        .inverse()
}

/// `F[(-Δ)^s u](k) = |k|^{2s} F[u](k)`.
pub fn frac_laplacian<T: Real>(u: &ComplexField<T>, s: FractionalOrder<T>) -> ComplexField<T> {
    radial_power(u, T::lit(2.0) * s.get())
}

/// `(-Δ)^{s/2} u`, multiplier `|k|^s`.
pub fn half_power<T: Real>(u: &ComplexField<T>, s: FractionalOrder<T>) -> ComplexField<T> {
    radial_power(u, s.get())
}

/// `‖(-Δ)^{s/2} u‖²` evaluated as the spectral sum `h^d Σ |k|^{2s} |û_k|²`.
pub fn hs_seminorm_sq<T: Real>(u: &ComplexField<T>, s: FractionalOrder<T>) -> T {
    let p = T::lit(2.0) * s.get();
    u.forward()
        .weighted_norm_sq(|k| if k == T::zero() { T::zero() } else { k.powf(p) })
}

/// Full `H^s` norm, `(‖u‖² + ‖(-Δ)^{s/2} u‖²)^{1/2}`.
pub fn hs_norm<T: Real>(u: &ComplexField<T>, s: FractionalOrder<T>) -> T {
    (u.norm_sq() + hs_seminorm_sq(u, s)).sqrt()
}

/// Exact flow of `i ∂_t u = (-Δ)^s u` over time `t`.
pub fn linear_propagator<T: Real>(u: &ComplexField<T>, s: FractionalOrder<T>, t: T) -> ComplexField<T> {
    let p = T::lit(2.0) * s.get();
    u.forward()
        .apply_radial(|k| {
            let w = if k == T::zero() { T::zero() } else { k.powf(p) };
            Complex::from_polar(T::one(), -t * w)
        })
        .inverse()
}

/// `C_{d,s} = 4^s Γ(d/2 + s) / (π^{d/2} |Γ(-s)|)`, defined for `0 < s < 1`.
pub fn singular_integral_constant(dim: usize, s: f64) -> f64 {
    use statrs::function::gamma::gamma;
    let d = dim as f64;
    // |Γ(-s)| = Γ(1 - s) / s on (0, 1)
    let gamma_neg = gamma(1.0 - s) / s;
    4f64.powf(s) * gamma(d / 2.0 + s) / (std::f64::consts::PI.powf(d / 2.0) * gamma_neg)
}

const IMAGE_TERMS: i64 = 32;

/// Periodized kernel `Σ_m |r + mL|^{-(1+2s)}` for every offset `j h`, `j = 1..n`.
/// Entry 0 is unused and set to zero.
fn periodic_kernel(n: usize, length: f64, s: f64) -> Vec<f64> {
    let h = length / n as f64;
    let p = 1.0 + 2.0 * s;
    let cut = (IMAGE_TERMS as f64 + 0.5) * length;
    let mut out = vec![0.0; n];
    for (j, slot) in out.iter_mut().enumerate().skip(1) {
        let r = j as f64 * h;
        let mut acc = 0.0;
        for m in -IMAGE_TERMS..=IMAGE_TERMS {
            acc += (r + m as f64 * length).abs().powf(-p);
        }
        // remaining images by the midpoint integral rule
        acc += ((cut + r).powf(1.0 - p) + (cut - r).powf(1.0 - p)) / ((p - 1.0) * length);
        *slot = acc;
    }
    out
}

fn quadrature_guard<T: Real>(grid: &Grid<T>, s: FractionalOrder<T>, need_fractional: bool) -> Result<()> {
    if grid.dim() != 1 {
        return Err(Error::CostGuard(format!(
            "double-sum quadrature is limited to d = 1, got d = {}",
            grid.dim()
        )));
    }
    if grid.n() > QUADRATURE_MAX_N {
        return Err(Error::CostGuard(format!(
            "double-sum quadrature is limited to n <= {QUADRATURE_MAX_N}, got n = {}",
            grid.n()
        )));
    }
    if need_fractional && s.get() >= T::one() {
        return Err(Error::InvalidParameter(
            "singular-integral form needs s < 1".to_string(),
        ));
    }
    Ok(())
}

/// Gagliardo seminorm squared, `Σ_{x ≠ y} |u(x) - u(y)|² K(x - y) h²` over
/// ordered pairs, with the periodized kernel `K` and the diagonal excluded.
pub fn gagliardo_seminorm_sq<T: Real>(u: &ComplexField<T>, s: FractionalOrder<T>) -> Result<T> {
    let grid = u.grid();
    quadrature_guard(grid, s, false)?;
    let n = grid.n();
    let h = grid.spacing().to_f64_lossy();
    let kernel = periodic_kernel(n, grid.length().to_f64_lossy(), s.get().to_f64_lossy());
    let v: Vec<Complex<f64>> = u
        .values()
        .iter()
        .map(|c| Complex::new(c.re.to_f64_lossy(), c.im.to_f64_lossy()))
        .collect();
    let mut total = 0.0;
    for (j, &kj) in kernel.iter().enumerate().skip(1) {
        let mut row = 0.0;
        for i in 0..n {
            row += (v[(i + j) % n] - v[i]).norm_sqr();
        }
        total += kj * row;
    }
    Ok(T::lit(total * h * h))
}

/// `-(C_{d,s}/2) Σ_{y ≠ 0} [u(x+y) + u(x-y) - 2u(x)] K(y) h` with the
/// periodized kernel `K`. Requires `d = 1` and `s < 1`.
pub fn singular_integral_laplacian<T: Real>(u: &ComplexField<T>, s: FractionalOrder<T>) -> Result<ComplexField<T>> {
    let grid = u.grid();
    quadrature_guard(grid, s, true)?;
    let n = grid.n();
    let sf = s.get().to_f64_lossy();
    let h = grid.spacing().to_f64_lossy();
    let kernel = periodic_kernel(n, grid.length().to_f64_lossy(), sf);
    let c = singular_integral_constant(1, sf);
    let v: Vec<Complex<f64>> = u
        .values()
        .iter()
        .map(|z| Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy()))
        .collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = Complex::new(0.0, 0.0);
        for (j, &kj) in kernel.iter().enumerate().skip(1) {
            let plus = v[(i + j) % n];
            let minus = v[(i + n - j) % n];
            acc += (plus + minus - v[i] * 2.0) * kj;
        }
        let r = acc * (-c / 2.0 * h);
        out.push(Complex::new(T::lit(r.re), T::lit(r.im)));
    }
    ComplexField::new(grid.clone(), out)
}

/// `<x>^α = (1 + |x|²)^{α/2}` at every grid point, using the box chart.
pub fn weight<T: Real>(grid: &Grid<T>, alpha: MomentOrder<T>) -> Vec<T> {
    let e = alpha.get() / T::lit(2.0);
    grid.r_sq().iter().map(|&r2| (T::one() + r2).powf(e)).collect()
}

pub fn weight_multiply<T: Real>(u: &ComplexField<T>, alpha: MomentOrder<T>) -> ComplexField<T> {
    let w = weight(u.grid(), alpha);
    u.weighted(|i| w[i])
}

/// `[(-Δ)^s, <x>^α] u = (-Δ)^s(<x>^α u) - <x>^α (-Δ)^s u`.
pub fn commutator_apply<T: Real>(u: &ComplexField<T>, s: FractionalOrder<T>, alpha: MomentOrder<T>) -> ComplexField<T> {
    let w = weight(u.grid(), alpha);
    let a = frac_laplacian(&u.weighted(|i| w[i]), s);
    let b = frac_laplacian(u, s);
    a.map_values(|i, v| v - b.values()[i] * w[i])
}

/// Smallest ensemble accepted by [`commutator_norm_estimate`].
pub const MIN_ENSEMBLE: usize = 16;

/// Ensemble maximum of `‖[(-Δ)^s, <x>^α] u‖ / ‖u‖_{H^s}` over seeded,
/// windowed band-limited random fields (see [`BandlimitedSpec::for_grid`]).
pub fn commutator_norm_estimate<T: Real>(
    grid: &Arc<Grid<T>>,
    s: FractionalOrder<T>,
    alpha: MomentOrder<T>,
    ensemble_size: usize,
    seed: u64,
) -> Result<T> {
    if ensemble_size < MIN_ENSEMBLE {
        return Err(Error::InvalidParameter(format!(
            "ensemble size {ensemble_size} below {MIN_ENSEMBLE}"
        )));
    }
    let spec = BandlimitedSpec::for_grid(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = T::zero();
    for _ in 0..ensemble_size {
        let u = random_bandlimited(grid, &spec, &mut rng)?;
        let ratio = commutator_apply(&u, s, alpha).norm() / hs_norm(&u, s);
        best = best.max(ratio);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn order(s: f64) -> FractionalOrder<f64> {
        FractionalOrder::new(s).unwrap()
    }

    fn gaussian(grid: &Arc<Grid<f64>>, width: f64, shift: f64) -> ComplexField<f64> {
        ComplexField::sample(grid.clone(), |x| {
            c((-(x[0] - shift).powi(2) / (2.0 * width * width)).exp())
        })
        .unwrap()
    }

    fn plane(grid: &Arc<Grid<f64>>, mode: usize) -> (f64, ComplexField<f64>) {
        let k0 = grid.wavenumbers()[mode];
        (
            k0,
            ComplexField::sample(grid.clone(), |x| Complex::from_polar(1.0, k0 * x[0])).unwrap(),
        )
    }

    #[test]
    fn order_validation() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(1.2).is_err());
        assert!(FractionalOrder::new(1.0).is_ok());
        assert!(MomentOrder::new(0.0).is_err());
        assert!(MomentOrder::new(1.0).unwrap().is_admissible(order(0.7)));
        assert!(!MomentOrder::new(0.75).unwrap().is_admissible(order(0.3)));
        assert!(!MomentOrder::<f64>::none().is_admissible(order(0.7)));
    }

    #[test]
    fn plane_wave_eigenvalue() {
        let g = Grid::<f64>::new(1, 64, 12.0).unwrap();
        for s in [0.3, 0.5, 0.7, 1.0] {
            let (k0, u) = plane(&g, 5);
            let lu = frac_laplacian(&u, order(s));
            let expect = u.scale(c(k0.abs().powf(2.0 * s)));
            assert!(lu.relative_distance(&expect).unwrap() < 1e-12);
            let hu = half_power(&u, order(s));
            assert!(hu.relative_distance(&u.scale(c(k0.abs().powf(s)))).unwrap() < 1e-12);
        }
    }

    #[test]
    fn constant_is_annihilated() {
        let g = Grid::<f64>::new(2, 16, 6.0).unwrap();
        let u = ComplexField::sample(g, |_| c(3.0)).unwrap();
        assert!(frac_laplacian(&u, order(0.4)).max_abs() < 1e-13);
    }

    #[test]
    fn classical_limit_matches_second_derivative() {
        let g = Grid::<f64>::new(1, 256, 24.0).unwrap();
        let u = gaussian(&g, 1.0, 0.0);
        let expect = ComplexField::sample(g.clone(), |x| c((1.0 - x[0] * x[0]) * (-x[0] * x[0] / 2.0).exp())).unwrap();
        let got = frac_laplacian(&u, order(1.0));
        let err = got.sub(&expect).unwrap().max_abs();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn half_power_composition_and_parseval() {
        let g = Grid::<f64>::new(1, 128, 16.0).unwrap();
        let u = ComplexField::sample(g.clone(), |x| {
            Complex::new((-x[0] * x[0]).exp(), (-(x[0] - 1.0).powi(2)).exp() * 0.5)
        })
        .unwrap();
        let s = order(0.35);
        let twice = half_power(&half_power(&u, s), s);
        assert!(twice.relative_distance(&frac_laplacian(&u, s)).unwrap() < 1e-12);
        let a = half_power(&u, s).norm_sq();
        let b = hs_seminorm_sq(&u, s);
        assert!((a - b).abs() / b < 1e-12);
    }

    #[test]
    fn propagator_identity_and_phase() {
        let g = Grid::<f64>::new(1, 64, 10.0).unwrap();
        let (k0, u) = plane(&g, 2);
        let s = order(0.6);
        assert!(linear_propagator(&u, s, 0.0).relative_distance(&u).unwrap() < 1e-14);
        let t = 0.37;
        let phase = Complex::from_polar(1.0, -t * k0.abs().powf(1.2));
        let got = linear_propagator(&u, s, t);
        assert!(got.relative_distance(&u.scale(phase)).unwrap() < 1e-12);
        assert!(got.values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-13));
    }

    #[test]
    fn gagliardo_constant_and_translation() {
        let g = Grid::<f64>::new(1, 128, 16.0).unwrap();
        let one = ComplexField::sample(g.clone(), |_| c(1.0)).unwrap();
        assert_eq!(gagliardo_seminorm_sq(&one, order(0.5)).unwrap(), 0.0);
        let u = gaussian(&g, 1.0, 0.3);
        let shifted = ComplexField::new(g.clone(), {
            let mut v = u.values().to_vec();
            v.rotate_left(17);
            v
        })
        .unwrap();
        let a = gagliardo_seminorm_sq(&u, order(0.5)).unwrap();
        let b = gagliardo_seminorm_sq(&shifted, order(0.5)).unwrap();
        assert!((a - b).abs() / a < 1e-10);
    }

    #[test]
    fn quadrature_cost_guard() {
        let g2 = Grid::<f64>::new(2, 16, 4.0).unwrap();
        let u = ComplexField::zeros(g2);
        assert!(matches!(
            gagliardo_seminorm_sq(&u, order(0.5)),
            Err(Error::CostGuard(_))
        ));
        let big = ComplexField::zeros(Grid::<f64>::new(1, 1024, 4.0).unwrap());
        assert!(matches!(
            singular_integral_laplacian(&big, order(0.5)),
            Err(Error::CostGuard(_))
        ));
        let small = ComplexField::zeros(Grid::<f64>::new(1, 64, 4.0).unwrap());
        assert!(singular_integral_laplacian(&small, order(1.0)).is_err());
    }

    #[test]
    fn singular_integral_constant_values() {
        // s = 1/2, d = 1: C = 2 Γ(1) / (π^{1/2} · 2 π^{1/2}) = 1/π
        assert!((singular_integral_constant(1, 0.5) - 1.0 / std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn singular_integral_plane_wave_and_constant() {
        let g = Grid::<f64>::new(1, 256, 32.0).unwrap();
        let one = ComplexField::sample(g.clone(), |_| c(1.0)).unwrap();
        assert!(singular_integral_laplacian(&one, order(0.5)).unwrap().max_abs() < 1e-12);
        let (k0, u) = plane(&g, 3);
        let out = singular_integral_laplacian(&u, order(0.5)).unwrap();
        let ratio = out.inner_product(&u).unwrap().re / u.norm_sq() / k0.abs();
        assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn singular_integral_gaussian_refines() {
        let mut errs = Vec::new();
        for n in [128, 256, 512] {
            let g = Grid::<f64>::new(1, n, 16.0).unwrap();
            let u = gaussian(&g, 1.0, 0.0);
            let a = singular_integral_laplacian(&u, order(0.5)).unwrap();
            let b = frac_laplacian(&u, order(0.5));
            errs.push(a.relative_distance(&b).unwrap());
        }
        assert!(errs[1] < 0.05);
        assert!(errs[2] < errs[1] && errs[1] < errs[0], "{errs:?}");
    }

    #[test]
    fn weight_pointwise() {
        let g = Grid::<f64>::new(1, 16, 8.0).unwrap();
        let alpha = MomentOrder::new(0.8).unwrap();
        // delta at x = 0 (index 8) and at x0 = 2 (index 12)
        for (idx, x0) in [(8usize, 0.0f64), (12, 2.0)] {
            let mut v = vec![c(0.0); 16];
            v[idx] = c(1.5);
            let u = ComplexField::new(g.clone(), v).unwrap();
            let w = weight_multiply(&u, alpha);
            let expect = 1.5 * (1.0 + x0 * x0).powf(0.4);
            assert!((w.values()[idx].re - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn commutator_with_trivial_weight_vanishes() {
        let g = Grid::<f64>::new(1, 64, 16.0).unwrap();
        let u = gaussian(&g, 1.0, 0.5);
        let z = commutator_apply(&u, order(0.6), MomentOrder::none());
        assert!(z.max_abs() < 1e-12);
        assert_eq!(
            commutator_norm_estimate(&g, order(0.6), MomentOrder::none(), 16, 1).unwrap(),
            0.0
        );
    }

    #[test]
    fn commutator_on_constant() {
        let g = Grid::<f64>::new(1, 64, 16.0).unwrap();
        let one = ComplexField::sample(g.clone(), |_| c(1.0)).unwrap();
        let alpha = MomentOrder::new(0.5).unwrap();
        let got = commutator_apply(&one, order(0.4), alpha);
        let w = ComplexField::new(g.clone(), weight(&g, alpha).into_iter().map(c).collect()).unwrap();
        let expect = frac_laplacian(&w, order(0.4));
        assert!(got.sub(&expect).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn commutator_ensemble_rejects_small_ensembles() {
        let g = Grid::<f64>::new(1, 64, 16.0).unwrap();
        assert!(commutator_norm_estimate(&g, order(0.6), MomentOrder::new(0.5).unwrap(), 8, 1).is_err());
    }

    #[test]
    fn commutator_estimate_is_deterministic() {
        let g = Grid::<f64>::new(1, 128, 32.0).unwrap();
        let a = MomentOrder::new(1.0).unwrap();
        let k1 = commutator_norm_estimate(&g, order(0.7), a, 16, 5).unwrap();
        let k2 = commutator_norm_estimate(&g, order(0.7), a, 16, 5).unwrap();
        assert_eq!(k1, k2);
        assert!(k1.is_finite() && k1 > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn self_adjoint_positive_and_bilinear(seed in any::<u64>(), s in 0.05f64..1.0) {
            use rand::Rng;
            let g = Grid::<f64>::new(1, 64, 10.0).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut field = || {
                let v = (0..64).map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
                ComplexField::new(g.clone(), v).unwrap()
            };
            let (u, v) = (field(), field());
            let s = order(s);
            let lhs = frac_laplacian(&u, s).inner_product(&v).unwrap();
            let rhs = u.inner_product(&frac_laplacian(&v, s)).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * u.norm() * v.norm() * 64f64.powf(s.get()).max(1.0));
            let q = frac_laplacian(&u, s).inner_product(&u).unwrap();
            prop_assert!(q.re >= -1e-12 * u.norm_sq());

            let alpha = MomentOrder::new(0.5).unwrap();
            let sum = commutator_apply(&u.add(&v).unwrap(), s, alpha);
            let parts = commutator_apply(&u, s, alpha).add(&commutator_apply(&v, s, alpha)).unwrap();
            prop_assert!(sum.sub(&parts).unwrap().norm() <= 1e-12 * parts.norm().max(1.0));
        }

        #[test]
        fn propagator_is_unitary_group(t1 in -5.0f64..5.0, t2 in -5.0f64..5.0, s in 0.1f64..1.0) {
            let g = Grid::<f64>::new(1, 64, 12.0).unwrap();
            let u = ComplexField::sample(g.clone(), |x| Complex::new((-x[0]*x[0]).exp(), x[0] * (-x[0]*x[0]).exp())).unwrap();
            let s = order(s);
            let a = linear_propagator(&linear_propagator(&u, s, t1), s, t2);
            let b = linear_propagator(&u, s, t1 + t2);
            prop_assert!(a.relative_distance(&b).unwrap() < 1e-12);
            prop_assert!((a.norm_sq() - u.norm_sq()).abs() / u.norm_sq() < 1e-14 * 10.0);
            let back = linear_propagator(&linear_propagator(&u, s, t1), s, -t1);
            prop_assert!(back.relative_distance(&u).unwrap() < 1e-12);
        }
    }
}
