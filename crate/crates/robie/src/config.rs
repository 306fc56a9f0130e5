use std::path::{Path, PathBuf};

use robie_core::cluster::DEFAULT_MAX_ITER;
use robie_core::restore::{DEFAULT_MASK_RATE, DEFAULT_TAU};
use robie_core::syndist::DistanceParams;
use serde::Deserialize;

use crate::error::CliError;

/// Pipeline settings. Absent fields take their defaults.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub tau: f64,
    /// Target parses sampled per sentence.
    pub k: usize,
    /// Source parses retrieved per sentence.
    pub m: usize,
    pub height: usize,
    pub alpha: f64,
    pub mask_rate: f64,
    pub clusters: usize,
    pub max_iter: usize,
    pub train_sample: usize,
    pub paths: Paths,
}

/// Input locations. Relative paths in a config file resolve against the
/// file's directory.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub pairs: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub lemmas: Option<PathBuf>,
    pub replies: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            tau: DEFAULT_TAU,
            k: 5,
            m: 2,
            height: DistanceParams::DEFAULT_HEIGHT,
            alpha: DistanceParams::DEFAULT_DISCOUNT,
            mask_rate: DEFAULT_MASK_RATE,
            clusters: 5,
            max_iter: DEFAULT_MAX_ITER,
            train_sample: 300,
            paths: Paths::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config = Self::from_toml(&text)
            .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            config.paths.rebase(dir);
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |what: &str| Err(CliError::invalid(what.to_string()));
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return fail("tau must be a finite value >= 0");
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return fail("alpha must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.mask_rate) {
            return fail("mask-rate must lie in [0, 1]");
        }
        for (name, value) in [
            ("k", self.k),
            ("m", self.m),
            ("height", self.height),
            ("clusters", self.clusters),
            ("max-iter", self.max_iter),
            ("train-sample", self.train_sample),
        ] {
            if value == 0 {
                return fail(&format!("{name} must be at least 1"));
            }
        }
        Ok(())
    }

    pub fn distance_params(&self) -> DistanceParams {
        DistanceParams::new(self.height, self.alpha).expect("validated")
    }
}

impl Paths {
    fn rebase(&mut self, dir: &Path) {
        for p in [
            &mut self.corpus,
            &mut self.train,
            &mut self.embeddings,
            &mut self.pairs,
            &mut self.gold,
            &mut self.predictions,
            &mut self.lemmas,
            &mut self.replies,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }
}
