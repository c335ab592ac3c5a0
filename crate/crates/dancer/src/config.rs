//! Pipeline configuration files.
//!
//! A pipeline config is TOML. Every key is optional and command-line flags
//! override it:
//!
//! ```toml
//! format = "arxiv-pubmed"
//! keyword_table = "keywords.toml"
//! summarizer = "lead:10"
//! block_trigrams = true
//! workers = 4
//!
//! [generation]
//! max_source_words = 500
//! max_target_words = 100
//! selected_types = ["introduction", "methods", "results", "conclusion"]
//!
//! [eval]
//! stem = false
//! resamples = 1000
//! seed = 1
//! ```
//!
//! A keyword table file maps section types to keyword lists and replaces the
//! built-in table:
//!
//! ```toml
//! introduction = ["introduction", "overview"]
//! results = ["results", "performance"]
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use dancer_core::{GenConfig, KeywordTable, SectionType};
use serde::Deserialize;
use thiserror::Error;

use crate::dataset::DatasetFormat;
use crate::eval::EvalOptions;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "DANCER_WORKERS";

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("{path}: section type `other` cannot have keywords")]
    OtherKeywords { path: PathBuf },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub format: Option<DatasetFormat>,
    /// Relative paths are resolved against the config file's directory.
    pub keyword_table: Option<PathBuf>,
    pub summarizer: Option<String>,
    pub block_trigrams: Option<bool>,
    pub workers: Option<usize>,
    pub timeout_ms: Option<u64>,
    pub generation: GenConfig,
    pub eval: EvalOptions,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigFileError> {
        let text = read(path)?;
        let mut config: PipelineConfig =
            toml::from_str(&text).map_err(|source| ConfigFileError::Parse {
                path: path.to_owned(),
                source,
            })?;
        if let (Some(table), Some(dir)) = (&config.keyword_table, path.parent()) {
            if table.is_relative() {
                config.keyword_table = Some(dir.join(table));
            }
        }
        Ok(config)
    }
}

fn read(path: &Path) -> Result<String, ConfigFileError> {
    fs::read_to_string(path).map_err(|source| ConfigFileError::Read {
        path: path.to_owned(),
        source,
    })
}

/// Reads a keyword table file.
pub fn load_keyword_table(path: &Path) -> Result<KeywordTable, ConfigFileError> {
    let text = read(path)?;
    let entries: BTreeMap<SectionType, Vec<String>> =
        toml::from_str(&text).map_err(|source| ConfigFileError::Parse {
            path: path.to_owned(),
            source,
        })?;
    if entries.contains_key(&SectionType::Other) {
        return Err(ConfigFileError::OtherKeywords {
            path: path.to_owned(),
        });
    }
    let mut table = KeywordTable::empty();
    for (ty, keywords) in entries {
        table.set(ty, keywords);
    }
    Ok(table)
}

/// Worker count: flag, then config, then the environment, then 1.
pub fn resolve_workers(flag: Option<usize>, config: Option<usize>) -> usize {
    flag.or(config)
        .or_else(|| std::env::var(WORKERS_ENV).ok()?.trim().parse().ok())
        .unwrap_or(1)
        .max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dancer_core::classify_header;

    #[test]
    fn full_config_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            r#"
format = "native"
keyword_table = "kw.toml"
summarizer = "lexrank:2"
workers = 3
[generation]
max_source_words = 400
selected_types = ["methods"]
[eval]
stem = true
seed = 7
"#,
        )
        .unwrap();
        let c = PipelineConfig::load(&path).unwrap();
        assert_eq!(c.format, Some(DatasetFormat::Native));
        assert_eq!(c.keyword_table, Some(dir.path().join("kw.toml")));
        assert_eq!(c.generation.max_source_words, 400);
        assert_eq!(c.generation.max_target_words, 100);
        assert_eq!(c.generation.selected_types, [SectionType::Methods]);
        assert!(c.eval.stem);
        assert_eq!(c.eval.seed, 7);
        assert_eq!(c.eval.resamples, 1000);
    }

    #[test]
    fn empty_config_uses_defaults() {
        let c: PipelineConfig = toml::from_str("").unwrap();
        assert_eq!(c.generation, GenConfig::default());
        assert_eq!(c.eval, EvalOptions::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<PipelineConfig>("wokers = 2").is_err());
    }

    #[test]
    fn keyword_file_replaces_table() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kw.toml");
        fs::write(
            &path,
            "results = [\"revenue\"]\nconclusion = [\"outlook\"]\n",
        )
        .unwrap();
        let t = load_keyword_table(&path).unwrap();
        assert_eq!(classify_header("Revenue", &t), SectionType::Results);
        assert_eq!(classify_header("Outlook", &t), SectionType::Conclusion);
        assert_eq!(classify_header("Introduction", &t), SectionType::Other);

        fs::write(&path, "other = [\"x\"]\n").unwrap();
        assert!(load_keyword_table(&path).is_err());
    }

    #[test]
    fn flag_beats_config() {
        assert_eq!(resolve_workers(Some(4), Some(2)), 4);
        assert_eq!(resolve_workers(None, Some(2)), 2);
        assert_eq!(resolve_workers(Some(0), None), 1);
    }
}
