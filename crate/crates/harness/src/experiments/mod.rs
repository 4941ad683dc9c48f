//! Named experiments. Each takes a config, writes its artifacts into the
//! config's output directory and returns the report.

use std::path::Path;

use anyhow::{bail, Result};

use fraclog::integrator::evolve_with;
use fraclog::{Field64, Params64, Probe, Snapshot, Trajectory64};

use crate::config::{default_config, ExperimentConfig};
use crate::report::{ExperimentReport, Output};

mod commutator;
mod conservation;
mod crossval;
mod eps_cauchy;
mod gausson;
mod growth;
mod inequalities;
mod moment;

pub type Runner = fn(&ExperimentConfig) -> Result<ExperimentReport>;

pub struct Experiment {
    pub name: &'static str,
    pub summary: &'static str,
    pub run: Runner,
    defaults: fn(&mut ExperimentConfig),
}

impl Experiment {
    pub fn default_config(&self) -> ExperimentConfig {
        let mut cfg = default_config(self.name);
        (self.defaults)(&mut cfg);
        cfg
    }

    /// Default configuration with the given seed, writing into `out`.
    pub fn configured(&self, seed: u64, out: &Path) -> ExperimentConfig {
        let mut cfg = default_config(self.name);
        cfg.seed = seed;
        (self.defaults)(&mut cfg);
        cfg.output_dir = out.to_path_buf();
        cfg
    }
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "conservation",
        summary: "mass drift and step-halving of the regularized energy drift",
        run: conservation::run,
        defaults: conservation::defaults,
    },
    Experiment {
        name: "growth_bounds",
        summary: "exponential growth bounds for H^s, H^1 and the time derivative",
        run: growth::run,
        defaults: growth::defaults,
    },
    Experiment {
        name: "eps_cauchy",
        summary: "localized L2 differences along the regularization sweep",
        run: eps_cauchy::run,
        defaults: eps_cauchy::defaults,
    },
    Experiment {
        name: "weighted_moment",
        summary: "growth of the weighted norm against the commutator estimate",
        run: moment::run,
        defaults: moment::defaults,
    },
    Experiment {
        name: "commutator_scan",
        summary: "commutator norm estimates over (s, alpha) and their refinement stability",
        run: commutator::run,
        defaults: commutator::defaults,
    },
    Experiment {
        name: "gausson",
        summary: "stationary Gaussian profile of the classical equation",
        run: gausson::run,
        defaults: gausson::defaults,
    },
    Experiment {
        name: "operator_crossval",
        summary: "spectral multiplier against Gagliardo and singular-integral quadratures",
        run: crossval::run,
        defaults: crossval::defaults,
    },
    Experiment {
        name: "inequality_suite",
        summary: "randomized pointwise inequalities and the closed form of mu_eps",
        run: inequalities::run,
        defaults: inequalities::defaults,
    },
];

pub fn find(name: &str) -> Result<&'static Experiment> {
    match EXPERIMENTS.iter().find(|e| e.name == name) {
        Some(e) => Ok(e),
        None => {
            let known: Vec<&str> = EXPERIMENTS.iter().map(|e| e.name).collect();
            bail!("unknown experiment {name:?}; known: {}", known.join(", "))
        }
    }
}

/// Runs `cfg` through the experiment named by `cfg.name`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    (find(&cfg.name)?.run)(cfg)
}

/// Evolves `phi`, writes the observable series and the final snapshot under `tag`.
pub(crate) fn evolve_recorded(
    out: &mut Output,
    tag: &str,
    phi: &Field64,
    p: &Params64,
    probe: &Probe<f64>,
) -> Result<Trajectory64> {
    let traj = evolve_with(phi, p, probe)?;
    out.series(tag, phi.grid().dim(), &traj.series)?;
    let t = *traj.times.last().expect("non-empty trajectory");
    let snap = Snapshot::from_field(traj.last(), p.s.get(), p.lambda.get(), p.eps.get(), t);
    out.snapshot(tag, &snap)?;
    Ok(traj)
}

pub(crate) fn fmt(x: f64) -> String {
    format!("{x:.3e}")
}
