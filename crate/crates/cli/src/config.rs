//! Run configuration: built-in defaults, overlaid by a TOML file, overlaid
//! by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use spiroplanck::coverage::FieldSpec;
use spiroplanck::curve::{default_t_max, sample_count, SpirographParams};
use spiroplanck::oracle::{Topology, TrialConfig};
use spiroplanck::planner::{PlannerConfig, SelectPolicy, DEFAULT_ITERATION_FACTOR};
use spiroplanck::radiometry::{wavelength_grid, PhysicalConstants, SpectralForm, REFERENCE_TEMPERATURES};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub field: FieldSection,
    pub curve: CurveSection,
    pub planner: PlannerSection,
    pub planck: PlanckSection,
    pub montecarlo: MonteCarloSection,
    pub coverage: CoverageSection,
    pub bench: BenchSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSection {
    pub side_length: f64,
    pub range: f64,
}

impl Default for FieldSection {
    fn default() -> Self {
        Self {
            side_length: 100.0,
            range: 7.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurveSection {
    pub r1: f64,
    pub r2: f64,
    pub a: f64,
    pub t_step: f64,
    /// One closure of the curve when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

impl Default for CurveSection {
    fn default() -> Self {
        Self {
            r1: 180.0,
            r2: 40.0,
            a: 15.0,
            t_step: spiroplanck::curve::DEFAULT_T_STEP,
            t_max: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SelectMode {
    #[default]
    Sequential,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantSet {
    /// h = 6.626e-34, c = 3e8, k = 1.38e-23
    #[default]
    Rounded,
    /// h = 6.6261e-34, c = 2.9979e8, k = 1.3807e-23
    Precise,
}

impl ConstantSet {
    pub fn constants(self) -> PhysicalConstants<f64> {
        match self {
            ConstantSet::Rounded => PhysicalConstants::rounded(),
            ConstantSet::Precise => PhysicalConstants::precise(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FormName {
    #[default]
    Radiance,
    EnergyDensity,
}

impl From<FormName> for SpectralForm {
    fn from(f: FormName) -> Self {
        match f {
            FormName::Radiance => SpectralForm::Radiance,
            FormName::EnergyDensity => SpectralForm::EnergyDensity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyName {
    #[default]
    Torus,
    Bounded,
}

impl From<TopologyName> for Topology {
    fn from(t: TopologyName) -> Self {
        match t {
            TopologyName::Torus => Topology::Torus,
            TopologyName::Bounded => Topology::Bounded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerSection {
    pub threshold: f64,
    pub epsilon: f64,
    pub temperature: f64,
    pub wavelength_scale: f64,
    /// Ten times the curve length when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<u64>,
    pub select: SelectMode,
    /// Only used by the random policy.
    pub seed: u64,
    pub constants: ConstantSet,
    pub form: FormName,
}

impl Default for PlannerSection {
    fn default() -> Self {
        Self {
            threshold: spiroplanck::planner::DEFAULT_THRESHOLD,
            epsilon: spiroplanck::curve::DEFAULT_EPSILON,
            temperature: spiroplanck::planner::DEFAULT_TEMPERATURE,
            wavelength_scale: spiroplanck::planner::DEFAULT_WAVELENGTH_SCALE,
            max_iterations: None,
            select: SelectMode::Sequential,
            seed: 0,
            constants: ConstantSet::Rounded,
            form: FormName::Radiance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanckSection {
    pub temperatures: Vec<f64>,
    pub lambda_start: f64,
    pub lambda_step: f64,
    pub lambda_end: f64,
    pub form: FormName,
    pub constants: ConstantSet,
}

impl Default for PlanckSection {
    fn default() -> Self {
        Self {
            temperatures: REFERENCE_TEMPERATURES.to_vec(),
            lambda_start: 1e-9,
            lambda_step: 10e-9,
            lambda_end: 3000e-9,
            form: FormName::Radiance,
            constants: ConstantSet::Rounded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloSection {
    pub n_nodes: u64,
    pub trials: u64,
    pub seed: u64,
    pub topology: TopologyName,
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        Self {
            n_nodes: 321,
            trials: 10_000,
            seed: 2012,
            topology: TopologyName::Torus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverageSection {
    pub n_nodes: u64,
}

impl Default for CoverageSection {
    fn default() -> Self {
        Self { n_nodes: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    /// Bundled reference table when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<PathBuf>,
}

fn config_err(message: impl Into<String>) -> CliError {
    CliError::Config(message.into())
}

fn to_usize(name: &str, v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| config_err(format!("{name}: {v} does not fit in usize")))
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    /// Defaults, or the file at `path` when one is given.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn field(&self) -> Result<FieldSpec<f64>> {
        FieldSpec::new(self.field.side_length, self.field.range)
            .map_err(|e| config_err(format!("[field] {e}")))
    }

    /// Curve parameters with `t_max` defaulted.
    pub fn curve(&self) -> Result<SpirographParams<f64>> {
        let c = &self.curve;
        let t_max = c.t_max.unwrap_or_else(|| default_t_max(c.r1, c.r2));
        let params = SpirographParams::new(c.r1, c.r2, c.a).with_sampling(c.t_step, t_max);
        params.validate().map_err(|e| config_err(format!("[curve] {e}")))?;
        Ok(params)
    }

    pub fn planner(&self) -> Result<PlannerConfig<f64>> {
        let p = &self.planner;
        let mut config = PlannerConfig::new(self.field()?, self.curve()?);
        config.threshold = p.threshold;
        config.epsilon = p.epsilon;
        config.temperature = p.temperature;
        config.wavelength_scale = p.wavelength_scale;
        config.constants = p.constants.constants();
        config.form = p.form.into();
        config.max_iterations = p.max_iterations.map(|m| to_usize("max_iterations", m)).transpose()?;
        config.select = match p.select {
            SelectMode::Sequential => SelectPolicy::Sequential,
            SelectMode::Random => SelectPolicy::Random { seed: p.seed },
        };
        config.validate().map_err(|e| config_err(format!("[planner] {e}")))?;
        Ok(config)
    }

    pub fn wavelengths(&self) -> Result<Vec<f64>> {
        let p = &self.planck;
        wavelength_grid(p.lambda_start, p.lambda_step, p.lambda_end)
            .map_err(|e| config_err(format!("[planck] {e}")))
    }

    pub fn trials(&self) -> Result<TrialConfig<f64>> {
        let m = &self.montecarlo;
        let config = TrialConfig {
            field: self.field()?,
            n_nodes: to_usize("n_nodes", m.n_nodes)?,
            trials: to_usize("trials", m.trials)?,
            seed: m.seed,
            topology: m.topology.into(),
        };
        config.validate().map_err(|e| config_err(format!("[montecarlo] {e}")))?;
        Ok(config)
    }

    /// Fills every defaulted value so the manifest records what actually ran.
    pub fn materialize(&mut self) -> Result<()> {
        let curve = self.curve()?;
        self.curve.t_max = Some(curve.t_max);
        if self.planner.max_iterations.is_none() {
            let len = sample_count(&curve).map_err(|e| config_err(format!("[curve] {e}")))?;
            self.planner.max_iterations = Some((DEFAULT_ITERATION_FACTOR * len) as u64);
        }
        Ok(())
    }

    /// Nested TOML rendering of the whole configuration.
    pub fn to_toml_table(&self) -> Result<toml::Table> {
        toml::Table::try_from(self).map_err(|e| config_err(format!("cannot serialize configuration: {e}")))
    }

    pub fn from_toml_table(table: toml::Table) -> Result<Self> {
        Self::deserialize(toml::Value::Table(table)).map_err(|e| config_err(format!("invalid configuration: {e}")))
    }
}
