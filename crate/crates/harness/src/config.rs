//! Experiment configuration, read from TOML. Unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use fraclog::datum::{self, BandlimitedSpec};
use fraclog::{CouplingConstant, Field64, FractionalOrder, Grid64, MomentOrder, Params64, RegularizationLevel, Scheme};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub s: f64,
    pub lambda: f64,
    pub eps: f64,
    pub dt: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub scheme: String,
    pub sample_every: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDatum {
    Gaussian {
        width: f64,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        phase_k: [f64; 2],
    },
    Gausson,
    RandomBandlimited {
        band: f64,
        seed: u64,
    },
    PlaneGaussian {
        k0: f64,
        width: f64,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweeps {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<Vec<f64>>,
}

/// Multiplicative slack on bound assertions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slack {
    #[serde(default = "Slack::default_bound")]
    pub bound: f64,
    #[serde(default = "Slack::default_moment")]
    pub moment: f64,
}

impl Slack {
    fn default_bound() -> f64 {
        0.05
    }

    fn default_moment() -> f64 {
        0.10
    }
}

impl Default for Slack {
    fn default() -> Self {
        Slack {
            bound: Self::default_bound(),
            moment: Self::default_moment(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub grid: GridConfig,
    pub params: ParamsConfig,
    pub initial_datum: InitialDatum,
    #[serde(default)]
    pub sweeps: Sweeps,
    pub output_dir: PathBuf,
    pub seed: u64,
    #[serde(default)]
    pub slack: Slack,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).context("parsing experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.params()?;
        if let Some(v) = &self.sweeps.eps {
            for &e in v {
                RegularizationLevel::new(e)?;
            }
        }
        if let Some(v) = &self.sweeps.s {
            for &s in v {
                FractionalOrder::new(s)?;
            }
        }
        if let Some(v) = &self.sweeps.alpha {
            for &a in v {
                MomentOrder::new(a)?;
            }
        }
        if let Some(v) = &self.sweeps.radius {
            if let Some(r) = v.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
                bail!("sweep radius {r} must be positive");
            }
        }
        if !(self.slack.bound >= 0.0 && self.slack.moment >= 0.0) {
            bail!("slack factors must be non-negative");
        }
        match self.initial_datum {
            InitialDatum::Gaussian { width, .. } | InitialDatum::PlaneGaussian { width, .. } if !(width > 0.0) => {
                bail!("datum width {width} must be positive")
            }
            InitialDatum::Gausson if !(self.params.lambda < 0.0) => bail!("gausson datum needs lambda < 0"),
            InitialDatum::RandomBandlimited { band, .. } if !(band >= 0.0) => bail!("band {band} must be >= 0"),
            _ => Ok(()),
        }
    }

    pub fn grid(&self) -> Result<Arc<Grid64>> {
        Ok(Grid64::new(self.grid.d, self.grid.n, self.grid.length)?)
    }

    pub fn params(&self) -> Result<Params64> {
        let p = &self.params;
        Ok(Params64::new(
            FractionalOrder::new(p.s)?,
            CouplingConstant::new(p.lambda)?,
            RegularizationLevel::new(p.eps)?,
            p.dt,
            p.horizon,
            p.scheme.parse::<Scheme>()?,
            p.sample_every,
        )?)
    }

    pub fn datum(&self, grid: &Arc<Grid64>) -> Result<Field64> {
        let field = match &self.initial_datum {
            InitialDatum::Gaussian { width, center, phase_k } => datum::gaussian(grid, *width, *center, *phase_k)?,
            InitialDatum::Gausson => datum::gausson(grid, self.params.lambda)?,
            InitialDatum::RandomBandlimited { band, seed } => {
                let spec = BandlimitedSpec {
                    band: *band,
                    ..BandlimitedSpec::for_grid(grid)
                };
                datum::random_bandlimited(grid, &spec, &mut ChaCha8Rng::seed_from_u64(*seed))?
            }
            InitialDatum::PlaneGaussian { k0, width } => datum::gaussian(grid, *width, [0.0; 2], [*k0, 0.0])?,
        };
        Ok(field)
    }
}

pub(crate) fn default_config(name: &str) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        grid: GridConfig {
            d: 1,
            n: 256,
            length: 32.0,
        },
        params: ParamsConfig {
            s: 0.5,
            lambda: -1.0,
            eps: 0.1,
            dt: 1e-3,
            horizon: 1.0,
            scheme: "strang".to_string(),
            sample_every: 10,
        },
        initial_datum: InitialDatum::Gaussian {
            width: 1.0,
            center: [0.0; 2],
            phase_k: [0.0; 2],
        },
        sweeps: Sweeps::default(),
        output_dir: PathBuf::from("out").join(name),
        seed: 20240611,
        slack: Slack::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_unknown_keys() {
        let cfg = default_config("conservation");
        let text = cfg.to_toml();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
        let bad = text.replace("sample_every", "sample_evry");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let extra = format!("{text}\nbogus = 1\n");
        assert!(ExperimentConfig::from_toml(&extra).is_err());
    }

    #[test]
    fn datum_families() {
        let text = r#"
            name = "x"
            output_dir = "o"
            seed = 3
            [grid]
            d = 1
            n = 64
            L = 20.0
            [params]
            s = 0.5
            lambda = -1.0
            eps = 0.0
            dt = 0.01
            T = 0.1
            scheme = "lie"
            sample_every = 1
            [initial_datum]
            family = "random_bandlimited"
            band = 2.0
            seed = 9
            [sweeps]
            R = [2.0, 4.0]
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let g = cfg.grid().unwrap();
        assert!(cfg.datum(&g).unwrap().norm() > 0.0);
        assert!(ExperimentConfig::from_toml(&text.replace("band = 2.0", "band = 2.0\nwidth = 1.0")).is_err());
        assert!(ExperimentConfig::from_toml(&text.replace("R = [2.0, 4.0]", "R = [-1.0]")).is_err());
        assert!(ExperimentConfig::from_toml(&text.replace("\"lie\"", "\"rk4\"")).is_err());
        assert!(ExperimentConfig::from_toml(&text.replace("T = 0.1", "T = 0.105")).is_err());
    }
}
