//! Run configuration: a flat key = value TOML file, overridden by flags.

use std::path::{Path, PathBuf};

use a2_core::risk::RiskThresholds;
use serde::Deserialize;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub method: Option<String>,
    pub base: Option<f64>,
    pub exploratory: Option<bool>,
    pub concur_all: Option<bool>,
    /// Output format, `text` or `json`.
    pub format: Option<String>,
    /// Case format, `dsl` or `json`; otherwise taken from the file extension.
    pub input_format: Option<String>,
    pub inputs: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub port: Option<u16>,
    pub persist: Option<PathBuf>,
    #[serde(flatten)]
    pub thresholds: ThresholdFile,
}

/// Risk thresholds; missing keys keep their current value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdFile {
    pub individual: Option<f64>,
    pub class: Option<f64>,
    pub negligible: Option<f64>,
}

impl ThresholdFile {
    pub fn apply(&self, t: RiskThresholds) -> RiskThresholds {
        RiskThresholds {
            individual: self.individual.unwrap_or(t.individual),
            class: self.class.unwrap_or(t.class),
            negligible: self.negligible.unwrap_or(t.negligible),
        }
    }
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {}", path.display(), e.message()))
}

pub fn load_config(path: &Path) -> Result<FileConfig, String> {
    let mut cfg: FileConfig = read_toml(path)?;
    // relative paths inside the file are relative to the file
    let dir = path.parent().unwrap_or(Path::new(""));
    for p in [&mut cfg.inputs, &mut cfg.persist].into_iter().flatten() {
        if p.is_relative() {
            *p = dir.join(&*p);
        }
    }
    Ok(cfg)
}

pub fn load_thresholds(path: &Path) -> Result<ThresholdFile, String> {
    read_toml(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_keys_parse() {
        let cfg: FileConfig =
            toml::from_str("method = \"doubts\"\nbase = 2.0\nindividual = 0.02\n").unwrap();
        assert_eq!(cfg.method.as_deref(), Some("doubts"));
        assert_eq!(cfg.base, Some(2.0));
        let t = cfg.thresholds.apply(RiskThresholds::default());
        assert_eq!((t.individual, t.class), (0.02, 0.05));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("colour = 1\n").is_err());
        assert!(toml::from_str::<ThresholdFile>("method = \"x\"\n").is_err());
    }
}
