//! Audit configuration: one JSON document, paths relative to its directory.
//! Command-line flags override config keys, which override defaults.

use std::path::{Path, PathBuf};
use std::time::Duration;

use mtaudit_core::scoring::ReferenceKind;
use mtaudit_core::translation::{EngineDescriptor, HttpOptions};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    inputs: InputsFile,
    engine: EngineFile,
    backend: BackendFile,
    references: Option<Vec<String>>,
    out: Option<String>,
    cache: Option<String>,
    jobs: Option<usize>,
    batch_size: Option<usize>,
    display_decimals: Option<u32>,
    base_template: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputsFile {
    occupations: String,
    categories_feor: String,
    categories_soc: String,
    crosswalk: String,
    sectors: Option<String>,
    survey: Option<String>,
    templates: Option<String>,
    adjectives: Option<String>,
    pronouns: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EngineFile {
    engine_id: String,
    endpoint: Option<String>,
    #[serde(default = "default_source_lang")]
    source_lang: String,
    #[serde(default = "default_target_lang")]
    target_lang: String,
    retrieved_at: Option<String>,
}

fn default_source_lang() -> String {
    "hu".into()
}

fn default_target_lang() -> String {
    "en".into()
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum BackendFile {
    Fixture {
        path: String,
    },
    Http {
        credentials_env: Option<String>,
        max_batch: Option<usize>,
        max_requests_per_second: Option<f64>,
        max_attempts: Option<u32>,
        timeout_secs: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inputs {
    pub occupations: PathBuf,
    pub categories_feor: PathBuf,
    pub categories_soc: PathBuf,
    pub crosswalk: PathBuf,
    pub sectors: Option<PathBuf>,
    pub survey: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub adjectives: Option<PathBuf>,
    pub pronouns: Option<PathBuf>,
}

impl Inputs {
    pub fn registry_files(&self) -> mtaudit_core::lexicon::RegistryFiles {
        mtaudit_core::lexicon::RegistryFiles {
            occupations: self.occupations.clone(),
            categories_feor: self.categories_feor.clone(),
            categories_soc: self.categories_soc.clone(),
            crosswalk: self.crosswalk.clone(),
            sectors: self.sectors.clone(),
        }
    }

    pub fn registry_paths(&self) -> Vec<&Path> {
        let mut out = vec![
            self.occupations.as_path(),
            &self.categories_feor,
            &self.categories_soc,
            &self.crosswalk,
        ];
        out.extend(self.sectors.as_deref());
        out
    }

    fn all(&self) -> Vec<&Path> {
        let mut out = self.registry_paths();
        out.extend(
            [&self.survey, &self.templates, &self.adjectives, &self.pronouns]
                .into_iter()
                .filter_map(|p| p.as_deref()),
        );
        out
    }
}

#[derive(Debug, Clone)]
pub enum BackendConfig {
    Fixture { path: PathBuf },
    Http { credentials_env: Option<String>, options: HttpOptions },
}

#[derive(Debug, Clone)]
pub struct AuditConfig {
    pub config_path: PathBuf,
    pub inputs: Inputs,
    pub engine: EngineDescriptor,
    pub backend: BackendConfig,
    pub references: Vec<ReferenceKind>,
    pub out_dir: PathBuf,
    pub cache: PathBuf,
    pub jobs: usize,
    pub batch_size: usize,
    pub display_decimals: u32,
    /// Template whose labels are scored; the first adjective-free template if unset.
    pub base_template: Option<String>,
}

/// Values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub references: Vec<ReferenceKind>,
    pub engine: Option<String>,
    pub jobs: Option<usize>,
}

impl AuditConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let file: ConfigFile = serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::from_file(file, path, &base, overrides)
    }

    fn from_file(file: ConfigFile, path: &Path, base: &Path, overrides: &Overrides) -> Result<Self> {
        let invalid = |reason: String| CliError::Config {
            path: path.to_path_buf(),
            reason,
        };
        let at = |p: &str| base.join(p);
        let inputs = Inputs {
            occupations: at(&file.inputs.occupations),
            categories_feor: at(&file.inputs.categories_feor),
            categories_soc: at(&file.inputs.categories_soc),
            crosswalk: at(&file.inputs.crosswalk),
            sectors: file.inputs.sectors.as_deref().map(at),
            survey: file.inputs.survey.as_deref().map(at),
            templates: file.inputs.templates.as_deref().map(at),
            adjectives: file.inputs.adjectives.as_deref().map(at),
            pronouns: file.inputs.pronouns.as_deref().map(at),
        };

        let references = if !overrides.references.is_empty() {
            overrides.references.clone()
        } else {
            match file.references {
                Some(names) => names
                    .iter()
                    .map(|n| n.parse::<ReferenceKind>().map_err(|e| invalid(e.to_string())))
                    .collect::<Result<_>>()?,
                None => ReferenceKind::ALL.to_vec(),
            }
        };
        let mut references: Vec<ReferenceKind> = references;
        references.sort();
        references.dedup();

        let engine_id = overrides.engine.clone().unwrap_or(file.engine.engine_id);
        let retrieved_at = file.engine.retrieved_at.unwrap_or_else(crate::manifest::now);
        let mut engine = EngineDescriptor::new(
            engine_id,
            file.engine.source_lang,
            file.engine.target_lang,
            retrieved_at,
        )
        .map_err(|e| invalid(e.to_string()))?;
        engine.endpoint = file.engine.endpoint;

        let backend = match file.backend {
            BackendFile::Fixture { path } => BackendConfig::Fixture { path: at(&path) },
            BackendFile::Http {
                credentials_env,
                max_batch,
                max_requests_per_second,
                max_attempts,
                timeout_secs,
            } => {
                if engine.endpoint.is_none() {
                    return Err(invalid("http backend needs engine.endpoint".into()));
                }
                let d = HttpOptions::default();
                BackendConfig::Http {
                    credentials_env,
                    options: HttpOptions {
                        max_batch: max_batch.unwrap_or(d.max_batch),
                        max_requests_per_second: max_requests_per_second
                            .unwrap_or(d.max_requests_per_second),
                        max_attempts: max_attempts.unwrap_or(d.max_attempts),
                        timeout: timeout_secs.map(Duration::from_secs).unwrap_or(d.timeout),
                        ..d
                    },
                }
            }
        };

        let out_dir = overrides
            .out
            .clone()
            .unwrap_or_else(|| at(file.out.as_deref().unwrap_or("out")));
        let cache = file
            .cache
            .as_deref()
            .map(at)
            .unwrap_or_else(|| out_dir.join("cache").join("translations.jsonl"));

        let config = Self {
            config_path: path.to_path_buf(),
            inputs,
            engine,
            backend,
            references,
            out_dir,
            cache,
            jobs: overrides.jobs.or(file.jobs).unwrap_or(1).max(1),
            batch_size: file.batch_size.unwrap_or(100).max(1),
            display_decimals: file.display_decimals.unwrap_or(1),
            base_template: file.base_template,
        };
        config.validate()?;
        Ok(config)
    }

    /// Every referenced input exists and at least one reference is enabled.
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| CliError::Config {
            path: self.config_path.clone(),
            reason,
        };
        if self.references.is_empty() {
            return Err(invalid("no reference kind enabled".into()));
        }
        if self.references.contains(&ReferenceKind::Perception) && self.inputs.survey.is_none() {
            return Err(invalid("perception reference needs inputs.survey".into()));
        }
        let mut paths = self.inputs.all();
        if let BackendConfig::Fixture { path } = &self.backend {
            paths.push(path);
        }
        for p in paths {
            if !p.is_file() {
                return Err(invalid(format!("input {} does not exist", p.display())));
            }
        }
        Ok(())
    }
}
