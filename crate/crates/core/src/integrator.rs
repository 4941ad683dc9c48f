//! Split-step time integration of the regularized equation
//! `i ∂_t u - (-Δ)^s u = 2λ u log(|u| + ε)`.
//!
//! Both sub-flows are exact: the dispersive part is a unitary Fourier
//! multiplier and the nonlinear part is a pointwise phase rotation. Strang
//! places the nonlinear halves outside so a step costs one transform pair.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fractional::{frac_laplacian, linear_propagator, FractionalOrder};
use crate::grid::ComplexField;
use crate::log_nonlinearity::{g_eps_field, nonlinear_phase_flow, CouplingConstant, RegularizationLevel};
use crate::observables::{ObservableRecord, Probe};
use crate::scalar::Real;

/// Initial data must satisfy `max |φ|` on the outer shell `< BOUNDARY_LIMIT · max |φ|`.
pub const BOUNDARY_LIMIT: f64 = 1e-10;
/// Largest allowed share of `Σ|û|²` in the top octave at any sample.
pub const TAIL_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// `L(dt) ∘ N(dt)`, first order.
    Lie,
    /// `N(dt/2) ∘ L(dt) ∘ N(dt/2)`, second order.
    Strang,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Lie => "lie",
            Scheme::Strang => "strang",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lie" => Ok(Scheme::Lie),
            "strang" => Ok(Scheme::Strang),
            other => Err(Error::InvalidParameter(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimParams<T> {
    pub s: FractionalOrder<T>,
    pub lambda: CouplingConstant<T>,
    pub eps: RegularizationLevel<T>,
    pub dt: T,
    pub horizon: T,
    pub scheme: Scheme,
    pub sample_every: usize,
}

impl<T: Real> SimParams<T> {
    pub fn new(
        s: FractionalOrder<T>,
        lambda: CouplingConstant<T>,
        eps: RegularizationLevel<T>,
        dt: T,
        horizon: T,
        scheme: Scheme,
        sample_every: usize,
    ) -> Result<Self> {
        let p = SimParams {
            s,
            lambda,
            eps,
            dt,
            horizon,
            scheme,
            sample_every,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.dt > T::zero()) || !(self.horizon > T::zero()) {
            return bad(format!("dt = {} and T = {} must be positive", self.dt, self.horizon));
        }
        if self.dt > self.horizon {
            return bad(format!("dt = {} exceeds T = {}", self.dt, self.horizon));
        }
        let ratio = (self.horizon / self.dt).to_f64_lossy();
        if (ratio - ratio.round()).abs() >= 1e-9 {
            return bad(format!("T / dt = {ratio} is not an integer"));
        }
        if self.sample_every == 0 {
            return bad("sample_every must be >= 1".to_string());
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).to_f64_lossy().round() as usize
    }

    pub fn with_dt(&self, dt: T) -> Self {
        SimParams { dt, ..*self }
    }

    pub fn probe(&self) -> Probe<T> {
        Probe::new(self.s, self.lambda, self.eps)
    }
}

fn checked<T: Real>(u: ComplexField<T>, index: usize) -> Result<ComplexField<T>> {
    if u.is_finite() {
        Ok(u)
    } else {
        Err(Error::NonFiniteState { step: index })
    }
}

fn advance<T: Real>(u: &ComplexField<T>, p: &SimParams<T>) -> ComplexField<T> {
    match p.scheme {
        Scheme::Strang => {
            let half = p.dt / T::lit(2.0);
            let a = nonlinear_phase_flow(u, p.lambda, p.eps, half);
            let b = linear_propagator(&a, p.s, p.dt);
            nonlinear_phase_flow(&b, p.lambda, p.eps, half)
        }
        Scheme::Lie => {
            let a = nonlinear_phase_flow(u, p.lambda, p.eps, p.dt);
            linear_propagator(&a, p.s, p.dt)
        }
    }
}

/// One step of size `p.dt`.
pub fn step<T: Real>(u: &ComplexField<T>, p: &SimParams<T>) -> Result<ComplexField<T>> {
    checked(advance(u, p), 1)
}

/// A sampled run: states and observables at `t = 0` and every
/// `sample_every` steps, plus the final time.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub params: SimParams<T>,
    pub times: Vec<T>,
    pub states: Vec<ComplexField<T>>,
    pub series: Vec<ObservableRecord<T>>,
    /// Largest top-octave spectral fraction seen at the samples.
    pub max_tail_fraction: T,
}

impl<T: Real> Trajectory<T> {
    pub fn initial(&self) -> &ComplexField<T> {
        &self.states[0]
    }

    pub fn last(&self) -> &ComplexField<T> {
        self.states.last().expect("trajectory holds the initial datum")
    }
}

pub fn check_boundary<T: Real>(phi: &ComplexField<T>) -> Result<()> {
    let ratio = phi.boundary_ratio().to_f64_lossy();
    if ratio < BOUNDARY_LIMIT {
        Ok(())
    } else {
        Err(Error::BoundaryGuard {
            ratio,
            limit: BOUNDARY_LIMIT,
        })
    }
}

fn check_tail<T: Real>(u: &ComplexField<T>, t: T) -> Result<T> {
    let fraction = u.forward().tail_fraction();
    if fraction.to_f64_lossy() < TAIL_LIMIT {
        Ok(fraction)
    } else {
        Err(Error::Underresolved {
            t: t.to_f64_lossy(),
            fraction: fraction.to_f64_lossy(),
            limit: TAIL_LIMIT,
        })
    }
}

pub fn evolve<T: Real>(phi: &ComplexField<T>, p: &SimParams<T>) -> Result<Trajectory<T>> {
    evolve_with(phi, p, &p.probe())
}

/// [`evolve`] with a caller-chosen set of observable columns.
pub fn evolve_with<T: Real>(phi: &ComplexField<T>, p: &SimParams<T>, probe: &Probe<T>) -> Result<Trajectory<T>> {
    p.validate()?;
    check_boundary(phi)?;
    let n_steps = p.steps();
    let mut traj = Trajectory {
        params: *p,
        times: vec![T::zero()],
        states: vec![phi.clone()],
        series: vec![ObservableRecord::measure(phi, T::zero(), probe)],
        max_tail_fraction: check_tail(phi, T::zero())?,
    };
    let mut u = phi.clone();
    for k in 1..=n_steps {
        u = checked(advance(&u, p), k)?;
        if k % p.sample_every == 0 || k == n_steps {
            let t = T::from_usize(k).unwrap() * p.dt;
            let tail = check_tail(&u, t)?;
            traj.max_tail_fraction = traj.max_tail_fraction.max(tail);
            traj.times.push(t);
            traj.series.push(ObservableRecord::measure(&u, t, probe));
            traj.states.push(u.clone());
        }
    }
    Ok(traj)
}

/// Advances `n_steps` without sampling and returns the final state.
pub fn advance_steps<T: Real>(phi: &ComplexField<T>, p: &SimParams<T>, n_steps: usize) -> Result<ComplexField<T>> {
    let mut u = phi.clone();
    for k in 1..=n_steps {
        u = checked(advance(&u, p), k)?;
    }
    Ok(u)
}

/// `∂_t u = -i((-Δ)^s u + λ g_ε(u))`.
pub fn time_derivative<T: Real>(u: &ComplexField<T>, p: &SimParams<T>) -> ComplexField<T> {
    let lin = frac_laplacian(u, p.s);
    let g = g_eps_field(u, p.eps);
    let lam = p.lambda.get();
    let minus_i = Complex::new(T::zero(), -T::one());
    lin.map_values(|i, v| (v + g.values()[i] * lam) * minus_i)
}

/// Fitted convergence behaviour of a step-halving sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvergenceOrder {
    /// All errors at the round-off floor.
    Exact,
    Fitted(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderReport {
    pub dts: Vec<f64>,
    /// Relative `L²` errors at `T` against the reference run.
    pub errors: Vec<f64>,
    /// `log2(e_j / e_{j+1})` for successive levels.
    pub local_orders: Vec<f64>,
    pub order: ConvergenceOrder,
    /// False when some halving did not reduce the error.
    pub monotone: bool,
}

/// The reference run uses `dt / 2^(levels - 1 + REFERENCE_REFINEMENT)`.
pub const REFERENCE_REFINEMENT: u32 = 6;
const EXACT_FLOOR: f64 = 1e-12;

/// Runs the scheme at `dt, dt/2, …, dt/2^(levels-1)` and compares each final
/// state with a much finer run of the same scheme.
pub fn order_test<T: Real>(phi: &ComplexField<T>, p: &SimParams<T>, levels: usize) -> Result<OrderReport> {
    if levels < 3 {
        return Err(Error::InvalidParameter(format!(
            "order test needs >= 3 levels, got {levels}"
        )));
    }
    p.validate()?;
    check_boundary(phi)?;
    let base_steps = p.steps();
    let ref_factor = 1usize << (levels as u32 - 1 + REFERENCE_REFINEMENT);
    let ref_p = p.with_dt(p.dt / T::from_usize(ref_factor).unwrap());
    let reference = advance_steps(phi, &ref_p, base_steps * ref_factor)?;
    let ref_norm = reference.norm();

    let mut dts = Vec::with_capacity(levels);
    let mut errors = Vec::with_capacity(levels);
    for j in 0..levels {
        let factor = 1usize << j;
        let pj = p.with_dt(p.dt / T::from_usize(factor).unwrap());
        let u = advance_steps(phi, &pj, base_steps * factor)?;
        dts.push(pj.dt.to_f64_lossy());
        errors.push((u.sub(&reference)?.norm() / ref_norm).to_f64_lossy());
    }
    let local_orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let order = if errors.iter().all(|&e| e < EXACT_FLOOR) {
        ConvergenceOrder::Exact
    } else {
        ConvergenceOrder::Fitted(log_log_slope(&dts, &errors))
    };
    Ok(OrderReport {
        dts,
        errors,
        local_orders,
        order,
        monotone,
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in lx.iter().zip(&ly) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}
