//! TOML experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use ratchet_core::evoc::WorldConfig;
use ratchet_core::focus::{CfConfig, FitnessSchedule, FocusController};
use ratchet_core::portrait::PortraitParams;
use serde::{Deserialize, Serialize};

use crate::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Evoc,
    CfEvoc,
    Portrait,
    Oracle,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Evoc => "evoc",
            Experiment::CfEvoc => "cf_evoc",
            Experiment::Portrait => "portrait",
            Experiment::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PortraitSection {
    /// Sitter image (PNG, RGB).
    pub sitter: Option<PathBuf>,
    /// Face mask (PNG, same size; luminance >= 128 marks the face).
    pub mask: Option<PathBuf>,
    pub evolution: PortraitParams,
}

impl Default for PortraitSection {
    fn default() -> Self {
        PortraitSection {
            sitter: None,
            mask: None,
            evolution: PortraitParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the subcommand when given.
    pub experiment: Option<Experiment>,
    /// First seed; replicates use seed, seed + 1, ...
    pub seed: u64,
    pub replicates: usize,
    pub output_dir: PathBuf,
    pub world: WorldConfig,
    pub schedule: FitnessSchedule,
    pub controller: FocusController,
    pub portrait: PortraitSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: None,
            seed: 0,
            replicates: 1,
            output_dir: PathBuf::from("out"),
            world: WorldConfig::default(),
            schedule: FitnessSchedule::default(),
            controller: FocusController::default(),
            portrait: PortraitSection::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, AppError> {
        toml::from_str(text).map_err(|e| AppError::Validation(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Builds the effective configuration for `experiment`: file (or
    /// defaults), then command-line overrides, then validation.
    pub fn resolve(path: Option<&Path>, experiment: Experiment, overrides: &Overrides) -> Result<Self, AppError> {
        let mut cfg = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(e) = cfg.experiment {
            if e != experiment {
                return Err(AppError::Validation(format!(
                    "experiment: config file is for `{e}` but the command runs `{experiment}`"
                )));
            }
        }
        cfg.experiment = Some(experiment);
        if let Some(s) = overrides.seed {
            cfg.seed = s;
        }
        if let Some(r) = overrides.replicates {
            cfg.replicates = r;
        }
        if let Some(o) = &overrides.output_dir {
            cfg.output_dir = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn experiment(&self) -> Experiment {
        self.experiment.unwrap_or(Experiment::Evoc)
    }

    pub fn validate(&self) -> Result<(), AppError> {
        if self.replicates == 0 {
            return Err(AppError::Validation("replicates: must be >= 1".into()));
        }
        if self.seed.checked_add(self.replicates as u64 - 1).is_none() {
            return Err(AppError::Validation("seed: seed + replicates overflows u64".into()));
        }
        let core = |r: Result<(), ratchet_core::Error>, section: &str| {
            r.map_err(|e| AppError::Validation(format!("[{section}] {e}")))
        };
        match self.experiment() {
            Experiment::Evoc => core(self.world.validate(), "world"),
            Experiment::CfEvoc => {
                core(self.world.validate(), "world")?;
                core(self.schedule.validate(), "schedule")?;
                core(self.controller.validate(), "controller")
            }
            Experiment::Portrait => {
                core(self.portrait.evolution.validate(), "portrait.evolution")?;
                if self.portrait.sitter.is_none() {
                    return Err(AppError::Validation("portrait.sitter: a sitter image is required".into()));
                }
                if self.portrait.mask.is_none() {
                    return Err(AppError::Validation("portrait.mask: a face mask is required".into()));
                }
                Ok(())
            }
            Experiment::Oracle => core(self.world.fitness.validate(), "world.fitness"),
        }
    }

    pub fn cf_config(&self, seed: u64) -> CfConfig {
        CfConfig {
            world: self.world_for(seed),
            schedule: self.schedule,
            controller: self.controller,
        }
    }

    pub fn world_for(&self, seed: u64) -> WorldConfig {
        WorldConfig {
            seed,
            ..self.world.clone()
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.replicates as u64).map(|i| self.seed + i).collect()
    }

    /// The effective configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serializes")
    }
}
