//! JSON run configuration and flag overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use ultsup::{ModelConfig, SimConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
#[clap(rename_all = "lowercase")]
pub enum Command {
    /// Print the model validation report.
    Validate,
    /// Solve the stopping problem and print threshold, case and barrier.
    Solve,
    /// Export (y, H, f_a..., V) curve tables.
    Curves,
    /// Run the Monte Carlo estimators and emit JSON records.
    Simulate,
    /// Simulate and compare against the closed forms; nonzero exit on failure.
    Verify,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl YGrid {
    pub fn points(&self) -> Vec<f64> {
        let mut ys = Vec::new();
        let mut i = 0u64;
        loop {
            let y = self.min + i as f64 * self.step;
            if y > self.max + 1e-9 * self.step {
                return ys;
            }
            ys.push(y);
            i += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSettings {
    pub n_paths: u64,
    pub seed: u64,
    pub time_step: f64,
    pub stop_level: Option<f64>,
    pub max_events: u64,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            seed: 42,
            time_step: 1e-3,
            stop_level: None,
            max_events: 50_000_000,
        }
    }
}

impl SimSettings {
    pub fn to_sim_config(self) -> SimConfig {
        let mut cfg = SimConfig::new(self.n_paths, self.seed)
            .with_time_step(self.time_step)
            .with_max_events(self.max_events);
        if let Some(level) = self.stop_level {
            cfg = cfg.with_stop_level(level);
        }
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// One run: a command applied to a model with its parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub model: ModelConfig,
    pub b: Option<f64>,
    #[serde(default)]
    pub a_list: Vec<f64>,
    pub y_grid: Option<YGrid>,
    #[serde(default)]
    pub sim: SimSettings,
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// Flag overrides applied on top of the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<Command>,
    pub b: Option<f64>,
    pub seed: Option<u64>,
    pub n_paths: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn apply(mut self, o: &Overrides) -> Self {
        if let Some(c) = o.command {
            self.command = Some(c);
        }
        if let Some(b) = o.b {
            self.b = Some(b);
        }
        if let Some(s) = o.seed {
            self.sim.seed = s;
        }
        if let Some(n) = o.n_paths {
            self.sim.n_paths = n;
        }
        if let Some(p) = &o.out {
            self.output_path = Some(p.clone());
        }
        self
    }

    fn check(&self) -> Result<(), CliError> {
        if let Some(g) = &self.y_grid {
            if !(g.step > 0.0 && g.step.is_finite()) {
                return Err(CliError::Config(format!(
                    "y_grid step must be positive, got {}",
                    g.step
                )));
            }
            if !(g.min.is_finite() && g.max.is_finite() && g.max >= g.min) {
                return Err(CliError::Config("y_grid must satisfy min <= max".into()));
            }
        }
        for &a in &self.a_list {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(CliError::Config(format!(
                    "a_list entries must be nonnegative, got {a}"
                )));
            }
        }
        Ok(())
    }

    pub fn command(&self) -> Result<Command, CliError> {
        self.command
            .ok_or_else(|| CliError::Config("no command given (config or --command)".into()))
    }

    pub fn b(&self) -> Result<f64, CliError> {
        self.b
            .ok_or_else(|| CliError::Config("this command requires b (config or --b)".into()))
    }
}
