//! Conserved and monitored quantities.
//!
//! Kinetic terms are always spectral sums. `log|u|²` is evaluated as
//! `2 log|u|` with the underflow convention of [`crate::log_nonlinearity`].

use num_complex::Complex;

use crate::fractional::{hs_seminorm_sq, weight, FractionalOrder, MomentOrder};
use crate::grid::ComplexField;
use crate::log_nonlinearity::{f_split, log_energy_density, mu_eps, z_log, CouplingConstant, RegularizationLevel};
use crate::scalar::Real;

/// `M(u) = ‖u‖²_{L²}`.
pub fn mass<T: Real>(u: &ComplexField<T>) -> T {
    u.norm_sq()
}

/// Spectral gradient component `∂_axis u`.
pub fn gradient<T: Real>(u: &ComplexField<T>, axis: usize) -> ComplexField<T> {
    let grid = u.grid().clone();
    let spec = u.forward();
    let modes = spec
        .modes()
        .iter()
        .enumerate()
        .map(|(i, &c)| c * Complex::new(T::zero(), grid.wavevector(i)[axis]))
        .collect();
    crate::grid::SpectralField::new(grid, modes)
        .expect("mode count preserved")
        .inverse()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Momentum<T> {
    /// `Im ∫ ū ∇u` per axis.
    pub value: Vec<T>,
    /// Largest `|Re ∫ ū ∂_a u|` over axes, which vanishes for the exact integral.
    pub real_residual: T,
}

pub fn momentum_detailed<T: Real>(u: &ComplexField<T>) -> Momentum<T> {
    let mut value = Vec::with_capacity(u.grid().dim());
    let mut real_residual = T::zero();
    for axis in 0..u.grid().dim() {
        let du = gradient(u, axis);
        let ip = du.inner_product(u).expect("same grid");
        value.push(ip.im);
        real_residual = real_residual.max(ip.re.abs());
    }
    Momentum { value, real_residual }
}

/// `J(u) = Im ∫ ū ∇u`.
pub fn momentum<T: Real>(u: &ComplexField<T>) -> Vec<T> {
    momentum_detailed(u).value
}

fn kinetic<T: Real>(u: &ComplexField<T>, s: FractionalOrder<T>) -> T {
    hs_seminorm_sq(u, s) / T::lit(2.0)
}

/// `E(u) = ½‖(-Δ)^{s/2}u‖² + (λ/2) ∫ |u|² (log|u|² - 1)`.
pub fn energy<T: Real>(u: &ComplexField<T>, s: FractionalOrder<T>, lambda: CouplingConstant<T>) -> T {
    let mut pot = T::zero();
    for &z in u.values() {
        pot = pot + log_energy_density(z, T::zero()) - z.norm_sqr();
    }
    kinetic(u, s) + lambda.get() / T::lit(2.0) * pot * u.grid().cell_volume()
}

/// `E_ε(u) = ½‖(-Δ)^{s/2}u‖² + (λ/2) ∫ |u|² log((|u|+ε)²) - (λ/2) ∫ μ_ε(|u|)`.
pub fn energy_eps<T: Real>(
    u: &ComplexField<T>,
    s: FractionalOrder<T>,
    lambda: CouplingConstant<T>,
    eps: RegularizationLevel<T>,
) -> T {
    let mut pot = T::zero();
    for &z in u.values() {
        pot = pot + log_energy_density(z, eps.get()) - mu_eps(z.norm(), eps);
    }
    kinetic(u, s) + lambda.get() / T::lit(2.0) * pot * u.grid().cell_volume()
}

/// `‖(-Δ)^{s/2} u‖`.
pub fn hs_seminorm<T: Real>(u: &ComplexField<T>, s: FractionalOrder<T>) -> T {
    hs_seminorm_sq(u, s).sqrt()
}

/// `‖∇u‖`.
pub fn h1_seminorm<T: Real>(u: &ComplexField<T>) -> T {
    u.forward().weighted_norm_sq(|k| k * k).sqrt()
}

/// `‖<x>^α u‖`.
pub fn weighted_norm<T: Real>(u: &ComplexField<T>, alpha: MomentOrder<T>) -> T {
    let w = weight(u.grid(), alpha);
    let mut acc = T::zero();
    for (z, wi) in u.values().iter().zip(&w) {
        acc = acc + z.norm_sqr() * *wi * *wi;
    }
    (acc * u.grid().cell_volume()).sqrt()
}

/// `‖u log|u|²‖`, the defect measuring membership in the `W₂` energy space.
pub fn w2_defect<T: Real>(u: &ComplexField<T>) -> T {
    let mut acc = T::zero();
    for &z in u.values() {
        acc = acc + (z_log(z, T::zero()) * T::lit(2.0)).norm_sqr();
    }
    (acc * u.grid().cell_volume()).sqrt()
}

/// `(∫ F₁(u), ∫ F₂(u))` at ε = 0; `|∫F₁| + |∫F₂| = ∫ |u|² |log|u|²|`.
pub fn w1_split<T: Real>(u: &ComplexField<T>) -> (T, T) {
    let eps = RegularizationLevel::zero();
    let (mut a, mut b) = (T::zero(), T::zero());
    for &z in u.values() {
        let (f1, f2) = f_split(z, eps);
        a = a + f1;
        b = b + f2;
    }
    let h = u.grid().cell_volume();
    (a * h, b * h)
}

/// Which optional columns an [`ObservableRecord`] carries.
#[derive(Clone, Copy, Debug)]
pub struct Probe<T> {
    pub s: FractionalOrder<T>,
    pub lambda: CouplingConstant<T>,
    pub eps: RegularizationLevel<T>,
    pub h1: bool,
    pub alpha: Option<MomentOrder<T>>,
    pub w2: bool,
}

impl<T: Real> Probe<T> {
    pub fn new(s: FractionalOrder<T>, lambda: CouplingConstant<T>, eps: RegularizationLevel<T>) -> Self {
        Probe {
            s,
            lambda,
            eps,
            h1: true,
            alpha: None,
            w2: true,
        }
    }

    pub fn with_alpha(mut self, alpha: MomentOrder<T>) -> Self {
        self.alpha = Some(alpha);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableRecord<T> {
    pub t: T,
    pub mass: T,
    pub momentum: Vec<T>,
    pub energy: T,
    pub energy_eps: T,
    pub l2: T,
    pub hs_semi: T,
    pub h1_semi: Option<T>,
    pub weighted_alpha: Option<T>,
    pub w2_defect: Option<T>,
}

impl<T: Real> ObservableRecord<T> {
    pub fn measure(u: &ComplexField<T>, t: T, probe: &Probe<T>) -> Self {
        let mass = mass(u);
        ObservableRecord {
            t,
            mass,
            momentum: momentum(u),
            energy: energy(u, probe.s, probe.lambda),
            energy_eps: energy_eps(u, probe.s, probe.lambda, probe.eps),
            l2: mass.sqrt(),
            hs_semi: hs_seminorm(u, probe.s),
            h1_semi: probe.h1.then(|| h1_seminorm(u)),
            weighted_alpha: probe.alpha.map(|a| weighted_norm(u, a)),
            w2_defect: probe.w2.then(|| w2_defect(u)),
        }
    }

    /// Column names for a `dim`-dimensional record, in serialization order.
    pub fn csv_header(dim: usize) -> Vec<String> {
        let mut h = vec!["t".to_string(), "mass".to_string()];
        for a in 0..dim {
            h.push(format!("momentum_{a}"));
        }
        for name in [
            "energy",
            "energy_eps",
            "l2",
            "hs_semi",
            "h1_semi",
            "weighted_alpha",
            "w2_defect",
        ] {
            h.push(name.to_string());
        }
        h
    }

    /// One CSV row; missing optionals are empty strings. Floats use the
    /// shortest round-trip representation.
    pub fn csv_row(&self) -> Vec<String> {
        let opt = |v: Option<T>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut row = vec![self.t.to_string(), self.mass.to_string()];
        row.extend(self.momentum.iter().map(|m| m.to_string()));
        row.push(self.energy.to_string());
        row.push(self.energy_eps.to_string());
        row.push(self.l2.to_string());
        row.push(self.hs_semi.to_string());
        row.push(opt(self.h1_semi));
        row.push(opt(self.weighted_alpha));
        row.push(opt(self.w2_defect));
        row
    }
}
