use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::anfis::AnfisConfig;
use crate::data::{SplitSpec, Target};
use crate::error::{Error, Result};
use crate::esn::EsnConfig;
use crate::svr::SvrConfig;

/// Overrides `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "POSTBENCH_OUTPUT_DIR";

pub const DEFAULT_SEEDS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Svr,
    Esn,
    Anfis,
    /// Predicts the training mean of the target.
    Baseline,
}

impl Method {
    /// Published row order, baseline last.
    pub const ALL: [Method; 4] = [Method::Svr, Method::Esn, Method::Anfis, Method::Baseline];

    pub fn name(self) -> &'static str {
        match self {
            Method::Svr => "svr",
            Method::Esn => "esn",
            Method::Anfis => "anfis",
            Method::Baseline => "baseline",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Method::Svr => "SVR",
            Method::Esn => "ESN",
            Method::Anfis => "ANFIS",
            Method::Baseline => "Baseline",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Semicolon-delimited source file. Relative paths are resolved against
    /// the directory of the config file.
    pub data_path: PathBuf,
    pub output_dir: PathBuf,
    /// Split seeds; one full run per entry. `split.seed` is ignored.
    pub seeds: Vec<u64>,
    pub targets: Vec<Target>,
    pub models: Vec<Method>,
    /// Also write one JSON model dump per (model, target, seed).
    pub dump_models: bool,
    pub split: SplitSpec,
    pub esn: EsnConfig<f64>,
    pub svr: SvrConfig<f64>,
    pub anfis: AnfisConfig<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data_path: PathBuf::from("data/dataset_Facebook.csv"),
            output_dir: PathBuf::from("out"),
            seeds: (0..DEFAULT_SEEDS as u64).collect(),
            targets: Target::ALL.to_vec(),
            models: vec![Method::Svr, Method::Esn, Method::Anfis],
            dump_models: false,
            split: SplitSpec::default(),
            esn: EsnConfig::default(),
            svr: SvrConfig::default(),
            anfis: AnfisConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a TOML file and resolves `data_path` and `output_dir` against
    /// its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            config.data_path = dir.join(&config.data_path);
            config.output_dir = dir.join(&config.output_dir);
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::Config("at least one target is required".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("at least one model is required".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        self.esn.validate()?;
        self.svr.validate()?;
        self.anfis.validate()?;
        Ok(())
    }

    /// Applies the environment override for the output directory.
    pub fn with_env_overrides(mut self) -> Self {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            if !dir.is_empty() {
                self.output_dir = PathBuf::from(dir);
            }
        }
        self
    }

    /// Requested methods in report order, baseline always included.
    pub fn methods(&self) -> Vec<Method> {
        Method::ALL
            .into_iter()
            .filter(|m| *m == Method::Baseline || self.models.contains(m))
            .collect()
    }

    pub fn requested_targets(&self) -> Vec<Target> {
        Target::ALL
            .into_iter()
            .filter(|t| self.targets.contains(t))
            .collect()
    }

    /// SHA-256 over the settings that influence results. Paths are left out
    /// so the same experiment hashes identically from any directory.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.data_path = PathBuf::new();
        c.output_dir = PathBuf::new();
        let json = serde_json::to_string(&c).expect("config serialises");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
