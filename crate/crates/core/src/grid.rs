//! Periodic box discretization, unitary spectral transforms and quadrature.
//!
//! A [`Grid`] replaces ℝᵈ (d = 1 or 2) by the torus `[-L/2, L/2)ᵈ` sampled
//! at `n` points per axis. Values are stored row-major with axis 0 slowest.
//! Both transform directions carry `n^{-d/2}`, so Parseval holds with
//! constant one and the `L²` quadrature weight `h^d` is the same on both
//! sides.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub struct Grid<T: Real> {
    dim: usize,
    n: usize,
    length: T,
    spacing: T,
    coords: Vec<T>,
    wavenumbers: Vec<T>,
    k_abs: Vec<T>,
    r_sq: Vec<T>,
    fft: Arc<dyn Fft<T>>,
    ifft: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl<T: Real> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.length == other.length
    }
}

impl<T: Real> Grid<T> {
    pub fn new(dim: usize, n: usize, length: T) -> Result<Arc<Self>> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGridSize(n));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidLength(length.to_f64_lossy()));
        }
        let nt = T::from_usize(n).unwrap();
        let spacing = length / nt;
        let half = length / T::lit(2.0);
        let coords: Vec<T> = (0..n).map(|j| -half + T::from_usize(j).unwrap() * spacing).collect();
        let dk = T::lit(2.0) * T::PI() / length;
        let wavenumbers: Vec<T> = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
                T::from_i64(m).unwrap() * dk
            })
            .collect();

        let total = n.pow(dim as u32);
        let mut k_abs = Vec::with_capacity(total);
        let mut r_sq = Vec::with_capacity(total);
        for idx in 0..total {
            let (k2, x2) = if dim == 1 {
                (wavenumbers[idx].powi(2), coords[idx].powi(2))
            } else {
                let (a, b) = (idx / n, idx % n);
                (
                    wavenumbers[a].powi(2) + wavenumbers[b].powi(2),
                    coords[a].powi(2) + coords[b].powi(2),
                )
            };
            k_abs.push(k2.sqrt());
            r_sq.push(x2);
        }

        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        Ok(Arc::new(Grid {
            dim,
            n,
            length,
            spacing,
            coords,
            wavenumbers,
            k_abs,
            r_sq,
            fft,
            ifft,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of grid points, `n^d`.
    pub fn len(&self) -> usize {
        self.k_abs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Quadrature weight `h^d`.
    pub fn cell_volume(&self) -> T {
        self.spacing.powi(self.dim as i32)
    }

    /// Box measure `L^d`.
    pub fn volume(&self) -> T {
        self.length.powi(self.dim as i32)
    }

    /// Per-axis sample points `-L/2 + j h`.
    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    /// Per-axis wavenumbers `2π m / L` in FFT ordering.
    pub fn wavenumbers(&self) -> &[T] {
        &self.wavenumbers
    }

    /// `|k|` for every mode of the flattened spectral array.
    pub fn k_abs(&self) -> &[T] {
        &self.k_abs
    }

    /// `|x|²` for every point of the flattened physical array.
    pub fn r_sq(&self) -> &[T] {
        &self.r_sq
    }

    pub fn nyquist(&self) -> T {
        T::PI() * T::from_usize(self.n).unwrap() / self.length
    }

    /// Per-axis indices of a flattened index.
    pub fn unravel(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    /// Position of a flattened index; the second entry is zero when `d = 1`.
    pub fn position(&self, idx: usize) -> [T; 2] {
        let [a, b] = self.unravel(idx);
        if self.dim == 1 {
            [self.coords[a], T::zero()]
        } else {
            [self.coords[a], self.coords[b]]
        }
    }

    /// Wave vector of a flattened mode index.
    pub fn wavevector(&self, idx: usize) -> [T; 2] {
        let [a, b] = self.unravel(idx);
        if self.dim == 1 {
            [self.wavenumbers[a], T::zero()]
        } else {
            [self.wavenumbers[a], self.wavenumbers[b]]
        }
    }

    /// True for points on the outermost shell of the box.
    pub fn on_boundary(&self, idx: usize) -> bool {
        let last = self.n - 1;
        let [a, b] = self.unravel(idx);
        if self.dim == 1 {
            a == 0 || a == last
        } else {
            a == 0 || a == last || b == 0 || b == last
        }
    }

    /// True for modes in the top octave, i.e. `|m| >= n/4` on some axis.
    pub fn in_top_octave(&self, idx: usize) -> bool {
        let q = self.n / 4;
        let high = |j: usize| j >= q && j <= self.n - q;
        let [a, b] = self.unravel(idx);
        if self.dim == 1 {
            high(a)
        } else {
            high(a) || high(b)
        }
    }

    fn transform(&self, data: &mut [Complex<T>], inverse: bool) {
        let plan = if inverse { &self.ifft } else { &self.fft };
        if self.dim == 1 {
            plan.process(data);
        } else {
            let n = self.n;
            plan.process(data);
            transpose(data, n);
            plan.process(data);
            transpose(data, n);
        }
        let scale = T::one() / T::from_usize(self.len()).unwrap().sqrt();
        for v in data.iter_mut() {
            *v = *v * scale;
        }
    }
}

fn transpose<T: Copy>(data: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

pub fn make_grid<T: Real>(dim: usize, n: usize, length: T) -> Result<Arc<Grid<T>>> {
    Grid::new(dim, n, length)
}

/// Complex amplitudes on a grid, physical-space representation.
#[derive(Clone, Debug)]
pub struct ComplexField<T: Real> {
    grid: Arc<Grid<T>>,
    values: Vec<Complex<T>>,
}

/// Unitary DFT coefficients of a [`ComplexField`].
#[derive(Clone, Debug)]
pub struct SpectralField<T: Real> {
    grid: Arc<Grid<T>>,
    modes: Vec<Complex<T>>,
}

fn same_grid<T: Real>(a: &Arc<Grid<T>>, b: &Arc<Grid<T>>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

impl<T: Real> ComplexField<T> {
    pub fn new(grid: Arc<Grid<T>>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if let Some(idx) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(non_finite(&grid, idx, values[idx]));
        }
        Ok(ComplexField { grid, values })
    }

    /// Builds a field without the finiteness scan. Callers guarantee finite input.
    pub(crate) fn from_raw(grid: Arc<Grid<T>>, values: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ComplexField { grid, values }
    }

    pub fn zeros(grid: Arc<Grid<T>>) -> Self {
        let values = vec![Complex::new(T::zero(), T::zero()); grid.len()];
        ComplexField { grid, values }
    }

    /// Samples `f` at every grid point. `f` receives `[x, y]` (y = 0 when `d = 1`).
    pub fn sample<F>(grid: Arc<Grid<T>>, f: F) -> Result<Self>
    where
        F: Fn([T; 2]) -> Complex<T>,
    {
        let values: Vec<Complex<T>> = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub(crate) fn map_values<F>(&self, f: F) -> Self
    where
        F: Fn(usize, Complex<T>) -> Complex<T>,
    {
        let values = self.values.iter().enumerate().map(|(i, &v)| f(i, v)).collect();
        ComplexField::from_raw(self.grid.clone(), values)
    }

    pub fn forward(&self) -> SpectralField<T> {
        let mut modes = self.values.clone();
        self.grid.transform(&mut modes, false);
        SpectralField {
            grid: self.grid.clone(),
            modes,
        }
    }

    /// `(f, g) = h^d Σ f ḡ`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex<T>> {
        same_grid(&self.grid, &other.grid)?;
        let mut acc = Complex::new(T::zero(), T::zero());
        for (a, b) in self.values.iter().zip(&other.values) {
            acc = acc + a * b.conj();
        }
        Ok(acc * self.grid.cell_volume())
    }

    /// `h^d Σ |u|²`.
    pub fn norm_sq(&self) -> T {
        let mut acc = T::zero();
        for v in &self.values {
            acc = acc + v.norm_sqr();
        }
        acc * self.grid.cell_volume()
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map_values(|_, v| v * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(self.map_values(|i, v| v + other.values[i]))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(self.map_values(|i, v| v - other.values[i]))
    }

    /// Pointwise product with a real weight evaluated per grid point.
    pub fn weighted<F>(&self, w: F) -> Self
    where
        F: Fn(usize) -> T,
    {
        self.map_values(|i, v| v * w(i))
    }

    /// `‖u‖_{L²}` of `self - other` relative to `‖other‖`.
    pub fn relative_distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.norm() / other.norm())
    }

    /// Largest modulus on the outermost shell divided by the global peak.
    pub fn boundary_ratio(&self) -> T {
        let peak = self.max_abs();
        if peak == T::zero() {
            return T::zero();
        }
        let edge = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.on_boundary(*i))
            .fold(T::zero(), |m, (_, v)| m.max(v.norm()));
        edge / peak
    }
}

fn non_finite<T: Real>(grid: &Grid<T>, idx: usize, v: Complex<T>) -> Error {
    let p = grid.position(idx);
    Error::NonFinite {
        position: p[..grid.dim()].iter().map(|x| x.to_f64_lossy()).collect(),
        value: format!("{}", v),
    }
}

impl<T: Real> SpectralField<T> {
    pub fn new(grid: Arc<Grid<T>>, modes: Vec<Complex<T>>) -> Result<Self> {
        if modes.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: modes.len(),
            });
        }
        Ok(SpectralField { grid, modes })
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn modes(&self) -> &[Complex<T>] {
        &self.modes
    }

    pub fn inverse(&self) -> ComplexField<T> {
        let mut values = self.modes.clone();
        self.grid.transform(&mut values, true);
        ComplexField::from_raw(self.grid.clone(), values)
    }

    /// Multiplies each mode by `m(|k|)`.
    pub fn apply_radial<F>(&self, m: F) -> Self
    where
        F: Fn(T) -> Complex<T>,
    {
        let modes = self
            .modes
            .iter()
            .zip(self.grid.k_abs())
            .map(|(&c, &k)| c * m(k))
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            modes,
        }
    }

    /// Spectral side of Parseval: `h^d Σ |û_k|²`.
    pub fn norm_sq(&self) -> T {
        let mut acc = T::zero();
        for c in &self.modes {
            acc = acc + c.norm_sqr();
        }
        acc * self.grid.cell_volume()
    }

    /// `h^d Σ w(|k|) |û_k|²`.
    pub fn weighted_norm_sq<F>(&self, w: F) -> T
    where
        F: Fn(T) -> T,
    {
        let mut acc = T::zero();
        for (c, &k) in self.modes.iter().zip(self.grid.k_abs()) {
            acc = acc + w(k) * c.norm_sqr();
        }
        acc * self.grid.cell_volume()
    }

    /// Fraction of `Σ|û|²` carried by top-octave modes.
    pub fn tail_fraction(&self) -> T {
        let mut total = T::zero();
        let mut tail = T::zero();
        for (i, c) in self.modes.iter().enumerate() {
            let e = c.norm_sqr();
            total = total + e;
            if self.grid.in_top_octave(i) {
                tail = tail + e;
            }
        }
        if total == T::zero() {
            T::zero()
        } else {
            tail / total
        }
    }
}

pub fn sample<T, F>(grid: &Arc<Grid<T>>, f: F) -> Result<ComplexField<T>>
where
    T: Real,
    F: Fn([T; 2]) -> Complex<T>,
{
    ComplexField::sample(grid.clone(), f)
}

pub fn forward<T: Real>(field: &ComplexField<T>) -> SpectralField<T> {
    field.forward()
}

pub fn inverse<T: Real>(spec: &SpectralField<T>) -> ComplexField<T> {
    spec.inverse()
}

pub fn inner_product<T: Real>(f: &ComplexField<T>, g: &ComplexField<T>) -> Result<Complex<T>> {
    f.inner_product(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn random_field(grid: &Arc<Grid<f64>>, rng: &mut ChaCha8Rng) -> ComplexField<f64> {
        let values = (0..grid.len())
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexField::new(grid.clone(), values).unwrap()
    }

    #[test]
    fn unit_grid_coordinates() {
        let g = Grid::<f64>::new(1, 8, 8.0).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.coords(), &[-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        let kmax = g.wavenumbers().iter().fold(0.0f64, |m, k| m.max(k.abs()));
        assert!((kmax - PI).abs() < 1e-15);
        assert!((g.wavenumbers()[1] - PI / 4.0).abs() < 1e-15);
        assert!((g.wavenumbers()[7] + PI / 4.0).abs() < 1e-15);
        assert_eq!(g.wavenumbers()[0], 0.0);
    }

    #[test]
    fn two_dim_grid_size() {
        let g = Grid::<f64>::new(2, 16, 20.0).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.spacing(), 1.25);
        assert!((g.nyquist() - PI * 16.0 / 20.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_grids() {
        assert_eq!(Grid::<f64>::new(1, 12, 1.0).unwrap_err(), Error::InvalidGridSize(12));
        assert_eq!(Grid::<f64>::new(1, 4, 1.0).unwrap_err(), Error::InvalidGridSize(4));
        assert_eq!(Grid::<f64>::new(3, 8, 1.0).unwrap_err(), Error::InvalidDimension(3));
        assert!(matches!(Grid::<f64>::new(1, 8, -1.0), Err(Error::InvalidLength(_))));
    }

    #[test]
    fn sample_reports_offending_coordinate() {
        let g = Grid::<f64>::new(1, 8, 8.0).unwrap();
        let err = ComplexField::sample(g, |x| c(1.0 / x[0])).unwrap_err();
        match err {
            Error::NonFinite { position, .. } => assert_eq!(position, vec![0.0]),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn gaussian_sample_is_symmetric() {
        let g = Grid::<f64>::new(1, 64, 16.0).unwrap();
        let u = ComplexField::sample(g.clone(), |x| c((-x[0] * x[0] / 2.0).exp())).unwrap();
        let v = u.values();
        assert_eq!(v[32], c(1.0));
        for j in 1..32 {
            assert_eq!(v[32 + j], v[32 - j]);
        }
        assert_eq!(u.max_abs(), 1.0);
    }

    #[test]
    fn constant_field_transforms_to_zero_mode() {
        let g = Grid::<f64>::new(2, 8, 4.0).unwrap();
        let u = ComplexField::sample(g.clone(), |_| c(1.0)).unwrap();
        let s = u.forward();
        assert!((s.modes()[0].re - 8.0).abs() < 1e-13);
        for m in &s.modes()[1..] {
            assert!(m.norm() < 1e-13);
        }
    }

    #[test]
    fn plane_wave_has_one_mode() {
        let g = Grid::<f64>::new(1, 32, 10.0).unwrap();
        let k0 = g.wavenumbers()[3];
        let u = ComplexField::sample(g.clone(), |x| Complex::from_polar(1.0, k0 * x[0])).unwrap();
        assert!(u.values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
        let s = u.forward();
        for (i, m) in s.modes().iter().enumerate() {
            if i == 3 {
                assert!((m.norm() - 32f64.sqrt()).abs() < 1e-12);
            } else {
                assert!(m.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_and_parseval_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (d, n) in [(1, 64), (2, 16), (1, 256)] {
            let g = Grid::<f64>::new(d, n, 7.0).unwrap();
            for _ in 0..100 {
                let u = random_field(&g, &mut rng);
                let s = u.forward();
                let back = s.inverse();
                assert!(back.relative_distance(&u).unwrap() < 1e-12);
                let (p, q) = (u.norm_sq(), s.norm_sq());
                assert!((p - q).abs() / p < 1e-12);
                let ip = u.inner_product(&u).unwrap();
                assert!(ip.re >= 0.0 && ip.im.abs() < 1e-14 * ip.re.max(1.0));
            }
        }
    }

    #[test]
    fn inner_product_basics() {
        let g = Grid::<f64>::new(1, 8, 8.0).unwrap();
        let one = ComplexField::sample(g.clone(), |_| c(1.0)).unwrap();
        assert_eq!(one.inner_product(&one).unwrap(), c(8.0));
        let (k1, k2) = (g.wavenumbers()[1], g.wavenumbers()[2]);
        let a = ComplexField::sample(g.clone(), |x| Complex::from_polar(1.0, k1 * x[0])).unwrap();
        let b = ComplexField::sample(g.clone(), |x| Complex::from_polar(1.0, k2 * x[0])).unwrap();
        assert!(a.inner_product(&b).unwrap().norm() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_field(&g, &mut rng);
        let h = random_field(&g, &mut rng);
        let fg = f.inner_product(&h).unwrap();
        let gf = h.inner_product(&f).unwrap();
        assert!((fg - gf.conj()).norm() < 1e-14);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = ComplexField::zeros(Grid::<f64>::new(1, 8, 8.0).unwrap());
        let b = ComplexField::zeros(Grid::<f64>::new(1, 16, 8.0).unwrap());
        assert_eq!(a.inner_product(&b).unwrap_err(), Error::GridMismatch);
        assert_eq!(a.sub(&b).unwrap_err(), Error::GridMismatch);
        // equal parameters on distinct allocations are the same grid
        let c2 = ComplexField::zeros(Grid::<f64>::new(1, 8, 8.0).unwrap());
        assert!(a.inner_product(&c2).is_ok());
    }

    #[test]
    fn single_precision_round_trip() {
        let g = Grid::<f32>::new(1, 64, 8.0).unwrap();
        let u = ComplexField::sample(g, |x| Complex::new((-x[0] * x[0]).exp(), x[0].sin())).unwrap();
        assert!(u.forward().inverse().relative_distance(&u).unwrap() < 1e-5);
    }

    #[test]
    fn boundary_and_tail_diagnostics() {
        let g = Grid::<f64>::new(1, 128, 40.0).unwrap();
        let u = ComplexField::sample(g.clone(), |x| c((-x[0] * x[0] / 2.0).exp())).unwrap();
        assert!(u.boundary_ratio() < 1e-10);
        assert!(u.forward().tail_fraction() < 1e-10);
        let coarse = Grid::<f64>::new(1, 32, 40.0).unwrap();
        let v = ComplexField::sample(coarse, |x| c((-x[0] * x[0] / 2.0).exp())).unwrap();
        assert!(v.forward().tail_fraction() > 1e-8);
        let flat = ComplexField::sample(g, |_| c(2.0)).unwrap();
        assert_eq!(flat.boundary_ratio(), 1.0);
    }
}
