use std::path::Path;

use serde::Deserialize;

use segsift::cimsim::HwConfig;
use segsift::filter::FilterParams;

use crate::error::{io_error, CliError};

pub const CONFIG_VERSION: u32 = 1;

/// Optional JSON run configuration; command-line flags override it.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default)]
    pub filter: Option<FilterParams>,
    #[serde(default)]
    pub hw: Option<HwConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if cfg.version != CONFIG_VERSION {
            return Err(CliError::Usage(format!(
                "{}: unsupported config version {} (expected {CONFIG_VERSION})",
                path.display(),
                cfg.version
            )));
        }
        Ok(cfg)
    }
}
