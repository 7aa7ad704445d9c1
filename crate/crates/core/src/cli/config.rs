//! Scenario configuration file (TOML).
//!
//! ```toml
//! [data]
//! units = "units.csv"        # name,capacity_mw,availability
//! demand = "demand.csv"      # timestamp,demand_mw,winter_id
//! wind = "wind.csv"          # timestamp,load_factor
//! acs = "acs.csv"            # winter_id,acs_peak_mw
//! halfhourly = false         # demand given per half hour
//!
//! [scenario]
//! acs_target_mw = 55550.0
//! response_adjustment_mw = 700.0
//! installed_wind_mw = [0.0, 10000.0]
//! model = "independence"     # hindcast | independence | rescaled
//! grid_step_mw = 1.0
//!
//! [season]
//! weeks_per_winter = 20
//! allow_gaps = false
//!
//! [lambda]
//! d1_norm = 0.95
//! d2_norm = 1.03
//! l1 = 1.0
//! l2 = 0.5
//!
//! [capvalue]
//! tol_mw = 0.1
//!
//! [bootstrap]
//! enabled = false
//! n_replicates = 1000
//! ci_level = 0.95
//! seed = 1
//! scheme = "paired-blocks"   # optional; defaults by model kind
//!
//! [loess]
//! span = 0.75
//! threshold_norm = 0.9
//! grid_points = 50
//!
//! [topn]
//! n_max = 200
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bootstrap::{BootstrapSpec, Scheme};
use crate::capvalue::DEFAULT_TOL_MW;
use crate::error::{ensure, Error, Result};
use crate::ingest::SeasonSpec;
use crate::jointmodel::{ModelKind, ScalingFunction};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub data: DataSection,
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub season: SeasonSection,
    #[serde(default)]
    pub lambda: LambdaSection,
    #[serde(default)]
    pub capvalue: CapValueSection,
    #[serde(default)]
    pub bootstrap: BootstrapSection,
    #[serde(default)]
    pub loess: LoessSection,
    #[serde(default)]
    pub topn: TopNSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub units: PathBuf,
    pub demand: PathBuf,
    pub wind: PathBuf,
    pub acs: PathBuf,
    #[serde(default)]
    pub halfhourly: bool,
}

fn default_adjustment() -> f64 {
    700.0
}

fn default_step() -> f64 {
    1.0
}

fn default_model() -> ModelKind {
    ModelKind::Independence
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub acs_target_mw: f64,
    #[serde(default = "default_adjustment")]
    pub response_adjustment_mw: f64,
    pub installed_wind_mw: Vec<f64>,
    #[serde(default = "default_model")]
    pub model: ModelKind,
    #[serde(default = "default_step")]
    pub grid_step_mw: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeasonSection {
    pub weeks_per_winter: usize,
    pub allow_gaps: bool,
}

impl Default for SeasonSection {
    fn default() -> Self {
        let s = SeasonSpec::default();
        SeasonSection {
            weeks_per_winter: s.weeks_per_winter,
            allow_gaps: s.allow_gaps,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LambdaSection {
    pub d1_norm: f64,
    pub d2_norm: f64,
    pub l1: f64,
    pub l2: f64,
}

impl Default for LambdaSection {
    fn default() -> Self {
        LambdaSection {
            d1_norm: 0.95,
            d2_norm: 1.03,
            l1: 1.0,
            l2: 0.5,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapValueSection {
    pub tol_mw: f64,
}

impl Default for CapValueSection {
    fn default() -> Self {
        CapValueSection { tol_mw: DEFAULT_TOL_MW }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BootstrapSection {
    pub enabled: bool,
    pub n_replicates: usize,
    pub ci_level: f64,
    pub seed: u64,
    pub scheme: Option<Scheme>,
}

impl Default for BootstrapSection {
    fn default() -> Self {
        let s = BootstrapSpec::default();
        BootstrapSection {
            enabled: false,
            n_replicates: s.n_replicates,
            ci_level: s.ci_level,
            seed: s.seed,
            scheme: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoessSection {
    pub span: f64,
    pub threshold_norm: f64,
    pub grid_points: usize,
}

impl Default for LoessSection {
    fn default() -> Self {
        LoessSection {
            span: 0.75,
            threshold_norm: 0.9,
            grid_points: 50,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopNSection {
    pub n_max: usize,
}

impl Default for TopNSection {
    fn default() -> Self {
        TopNSection { n_max: 200 }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub span: Option<f64>,
    pub capacities: Option<Vec<f64>>,
    pub model: Option<ModelKind>,
    pub allow_gaps: bool,
    pub n_max: Option<usize>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file and resolves its data paths.
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Config::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.data.units,
            &mut cfg.data.demand,
            &mut cfg.data.wind,
            &mut cfg.data.acs,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.bootstrap.seed = seed;
        }
        if let Some(n) = o.replicates {
            self.bootstrap.n_replicates = n;
            self.bootstrap.enabled = true;
        }
        if let Some(span) = o.span {
            self.loess.span = span;
        }
        if let Some(c) = &o.capacities {
            self.scenario.installed_wind_mw = c.clone();
        }
        if let Some(m) = o.model {
            self.scenario.model = m;
        }
        if o.allow_gaps {
            self.season.allow_gaps = true;
        }
        if let Some(n) = o.n_max {
            self.topn.n_max = n;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        ensure!(
            s.acs_target_mw.is_finite() && s.acs_target_mw > 0.0,
            Config,
            "scenario.acs_target_mw must be positive"
        );
        ensure!(
            s.response_adjustment_mw.is_finite() && s.response_adjustment_mw >= 0.0,
            Config,
            "scenario.response_adjustment_mw must be nonnegative"
        );
        ensure!(
            !s.installed_wind_mw.is_empty(),
            Config,
            "scenario.installed_wind_mw must list at least one capacity"
        );
        ensure!(
            s.installed_wind_mw.iter().all(|c| c.is_finite() && *c >= 0.0),
            Config,
            "installed wind capacities must be nonnegative"
        );
        ensure!(
            s.grid_step_mw.is_finite() && s.grid_step_mw > 0.0,
            Config,
            "scenario.grid_step_mw must be positive"
        );
        ensure!(
            self.capvalue.tol_mw.is_finite() && self.capvalue.tol_mw > 0.0,
            Config,
            "capvalue.tol_mw must be positive"
        );
        ensure!(
            self.loess.span > 0.0 && self.loess.span <= 1.0,
            Config,
            "loess.span must lie in (0, 1], got {}",
            self.loess.span
        );
        ensure!(
            self.loess.grid_points >= 2,
            Config,
            "loess.grid_points must be at least 2"
        );
        ensure!(self.topn.n_max >= 1, Config, "topn.n_max must be at least 1");
        self.season_spec().validate().map_err(as_config)?;
        self.scaling().map_err(as_config)?;
        self.bootstrap_spec().validate()
    }

    pub fn season_spec(&self) -> SeasonSpec {
        SeasonSpec {
            weeks_per_winter: self.season.weeks_per_winter,
            allow_gaps: self.season.allow_gaps,
        }
    }

    /// Scaling function on demand net of the response adjustment, relative
    /// to the ACS target.
    pub fn scaling(&self) -> Result<ScalingFunction> {
        let l = &self.lambda;
        ScalingFunction::new(l.d1_norm, l.d2_norm, l.l1, l.l2, self.scenario.acs_target_mw)?
            .with_offset(self.scenario.response_adjustment_mw)
    }

    /// The configured scheme, or the one matching the model kind: paired
    /// blocks for hindcast, independent blocks otherwise.
    pub fn bootstrap_spec(&self) -> BootstrapSpec {
        let b = &self.bootstrap;
        let scheme = b.scheme.unwrap_or(match self.scenario.model {
            ModelKind::Hindcast => Scheme::PairedBlocks,
            _ => Scheme::IndependentBlocks,
        });
        BootstrapSpec {
            n_replicates: b.n_replicates,
            ci_level: b.ci_level,
            seed: b.seed,
            scheme,
        }
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}
