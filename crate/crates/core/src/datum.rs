//! Initial-datum families. All of them are Schwartz-class on the scale of the box.

use std::sync::Arc;

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid};
use crate::scalar::Real;

/// `exp(-|x - c|² / (2 w²)) · exp(i k·x)`.
pub fn gaussian<T: Real>(grid: &Arc<Grid<T>>, width: T, center: [T; 2], phase_k: [T; 2]) -> Result<ComplexField<T>> {
    if !(width > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "gaussian width {width} must be positive"
        )));
    }
    let two_w2 = T::lit(2.0) * width * width;
    ComplexField::sample(grid.clone(), |x| {
        let r2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
        Complex::from_polar((-r2 / two_w2).exp(), phase_k[0] * x[0] + phase_k[1] * x[1])
    })
}

/// Stationary profile `exp(λ |x|² / 2)` of the classical (`s = 1`) equation, `λ < 0`.
pub fn gausson<T: Real>(grid: &Arc<Grid<T>>, lambda: T) -> Result<ComplexField<T>> {
    if !(lambda < T::zero()) {
        return Err(Error::InvalidParameter("gausson requires λ < 0".to_string()));
    }
    let half = lambda / T::lit(2.0);
    ComplexField::sample(grid.clone(), |x| {
        Complex::new((half * (x[0] * x[0] + x[1] * x[1])).exp(), T::zero())
    })
}

/// Random trigonometric polynomial with `|k| <= band`, multiplied by a
/// centred Gaussian window of the given width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandlimitedSpec {
    pub band: f64,
    pub envelope_width: f64,
}

impl BandlimitedSpec {
    /// Defaults that depend on the box length only, so the same seed yields
    /// the same continuum field on every resolution of a given box.
    pub fn for_grid<T: Real>(grid: &Grid<T>) -> Self {
        let length = grid.length().to_f64_lossy();
        BandlimitedSpec {
            band: 4.0f64.min(grid.nyquist().to_f64_lossy() / 4.0),
            envelope_width: length / 16.0,
        }
    }
}

pub fn random_bandlimited<T: Real, R: Rng>(
    grid: &Arc<Grid<T>>,
    spec: &BandlimitedSpec,
    rng: &mut R,
) -> Result<ComplexField<T>> {
    if !(spec.band >= 0.0) || !(spec.envelope_width > 0.0) {
        return Err(Error::InvalidParameter(format!("invalid band-limited spec {spec:?}")));
    }
    let length = grid.length().to_f64_lossy();
    let dk = 2.0 * std::f64::consts::PI / length;
    let mmax = (spec.band / dk).floor() as i64;
    let axis: Vec<i64> = (-mmax..=mmax).collect();
    let mut modes: Vec<([f64; 2], Complex<f64>)> = Vec::new();
    let second: Vec<i64> = if grid.dim() == 1 { vec![0] } else { axis.clone() };
    for &a in &axis {
        for &b in &second {
            let k = [a as f64 * dk, b as f64 * dk];
            if (k[0] * k[0] + k[1] * k[1]).sqrt() <= spec.band {
                let coef = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                modes.push((k, coef));
            }
        }
    }
    let two_w2 = 2.0 * spec.envelope_width * spec.envelope_width;
    let values = (0..grid.len())
        .map(|i| {
            let p = grid.position(i);
            let (x, y) = (p[0].to_f64_lossy(), p[1].to_f64_lossy());
            let mut acc = Complex::new(0.0, 0.0);
            for (k, coef) in &modes {
                acc += coef * Complex::from_polar(1.0, k[0] * x + k[1] * y);
            }
            let v = acc * (-(x * x + y * y) / two_w2).exp();
            Complex::new(T::lit(v.re), T::lit(v.im))
        })
        .collect();
    ComplexField::new(grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bandlimited_fields_agree_across_resolutions() {
        let coarse = Grid::<f64>::new(1, 256, 32.0).unwrap();
        let fine = Grid::<f64>::new(1, 512, 32.0).unwrap();
        let spec = BandlimitedSpec::for_grid(&coarse);
        assert_eq!(spec, BandlimitedSpec::for_grid(&fine));
        let a = random_bandlimited(&coarse, &spec, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = random_bandlimited(&fine, &spec, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        for j in 0..256 {
            assert!((a.values()[j] - b.values()[2 * j]).norm() < 1e-12);
        }
        assert!(a.boundary_ratio() < 1e-10);
    }

    #[test]
    fn gausson_requires_focusing_sign() {
        let g = Grid::<f64>::new(1, 64, 16.0).unwrap();
        assert!(gausson(&g, 1.0).is_err());
        let u = gausson(&g, -1.0).unwrap();
        assert_eq!(u.values()[32].re, 1.0);
    }

    #[test]
    fn gaussian_phase_and_center() {
        let g = Grid::<f64>::new(2, 32, 16.0).unwrap();
        let u = gaussian(&g, 1.5, [1.0, -1.0], [0.5, 0.0]).unwrap();
        let peak = u
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap()
            .0;
        assert_eq!(g.position(peak), [1.0, -1.0]);
        assert!(gaussian(&g, 0.0, [0.0; 2], [0.0; 2]).is_err());
    }
}
