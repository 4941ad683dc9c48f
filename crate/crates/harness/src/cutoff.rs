use anyhow::{bail, Result};

use fraclog::log_nonlinearity::smooth_plateau;
use fraclog::Grid64;

/// Radial bump `ζ_R`: 1 on `|x| <= R`, 0 on `|x| >= 2R`, quintic smoothstep between.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffZeta {
    radius: f64,
}

impl CutoffZeta {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            bail!("cutoff radius {radius} must be positive");
        }
        Ok(CutoffZeta { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn eval(&self, r: f64) -> f64 {
        smooth_plateau(r, self.radius, 2.0 * self.radius)
    }

    pub fn on_grid(&self, grid: &Grid64) -> Vec<f64> {
        grid.r_sq().iter().map(|r2| self.eval(r2.sqrt())).collect()
    }

    /// Lebesgue measure of the ball `B_{2R}` in dimension `dim`.
    pub fn support_measure(&self, dim: usize) -> f64 {
        let r = 2.0 * self.radius;
        match dim {
            1 => 2.0 * r,
            _ => std::f64::consts::PI * r * r,
        }
    }
}
