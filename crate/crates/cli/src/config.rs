//! Optional TOML config file for the `bench` subcommand. Every key mirrors a
//! CLI flag; flags override file values, which override built-in defaults.
//!
//! ```toml
//! synth = "iotmix"
//! rows = 5000
//! attack_fraction = 0.3
//! noise_sigma = 1.0
//! seed = 7
//! train_fraction = 0.8
//! threshold = 0.05
//! out = "results"
//!
//! [gbt]
//! rounds = 100
//! depth = 6
//! learning_rate = 0.3
//! lambda = 1.0
//! gamma = 0.0
//! min_child_weight = 1.0
//!
//! [knn]
//! k = 5
//!
//! [sgd]
//! learning_rate = 0.01
//! epochs = 20
//! l2 = 1e-4
//! ```

use std::path::PathBuf;

use serde::Deserialize;

use flowml_core::error::{Error, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub synth: Option<String>,
    pub rows: Option<usize>,
    pub attack_fraction: Option<f64>,
    pub noise_sigma: Option<f64>,
    pub seed: Option<u64>,
    pub train_fraction: Option<f64>,
    pub threshold: Option<f64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub gbt: GbtSection,
    #[serde(default)]
    pub knn: KnnSection,
    #[serde(default)]
    pub sgd: SgdSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbtSection {
    pub rounds: Option<usize>,
    pub depth: Option<usize>,
    pub learning_rate: Option<f64>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub min_child_weight: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnnSection {
    pub k: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgdSection {
    pub learning_rate: Option<f64>,
    pub epochs: Option<usize>,
    pub l2: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &std::path::Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| {
            Error::Config(format!("{}: {}", path.display(), one_line(&e.to_string())))
        })
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
