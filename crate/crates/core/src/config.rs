//! Runtime configuration shared by the engine and the command line.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub const CACHE_DIR_ENV: &str = "GWQL_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    /// Seed of the first torus weight draw.
    pub weight_seed: u64,
    /// Weight draws tried before giving up on non-generic weights.
    pub retry_limit: u32,
    pub cache_dir: Option<PathBuf>,
    /// Extra λ-orders carried when expanding inverses.
    pub truncation_margin: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            weight_seed: 1729,
            retry_limit: 3,
            cache_dir: None,
            truncation_margin: 2,
        }
    }
}

impl Config {
    /// Defaults, with the cache directory taken from `GWQL_CACHE_DIR` if set.
    pub fn from_env() -> Self {
        let mut c = Config::default();
        if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
            if !dir.is_empty() {
                c.cache_dir = Some(PathBuf::from(dir));
            }
        }
        c
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.weight_seed = seed;
        self
    }
}
