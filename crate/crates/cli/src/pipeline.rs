//! The staged pipeline. Each stage reads the previous stage's artifacts
//! from the output directory, so any stage can be rerun on its own.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use mtaudit_core::aggregation::{
    adjective_change_matrix, category_biases, perception_correlation, pronoun_distribution,
    sector_bias, summary_stats, ChangeMatrix,
};
use mtaudit_core::gendering::{Classifier, GenderLabel, LabelCounts, PronounLexicon};
use mtaudit_core::lexicon::{
    load_registry, resolve_reference, validate_registry, Dominance, GenderShare, Omission,
    OmissionReason, ReferenceMap, Registry,
};
use mtaudit_core::scoring::{score_share, Bias, BiasResult, ReferenceKind};
use mtaudit_core::sentences::{
    default_adjectives, default_templates, export_corpus, generate_corpus, load_adjectives,
    load_templates, AdjectiveVariant, SentenceRef, SentenceTemplate, SentenceUnit,
};
use mtaudit_core::survey::{load_survey, perception_reference, LikertTally};
use mtaudit_core::translation::{
    fixture_backend, http_backend, translate_corpus, Backend, TranslateOptions, TranslationCache,
    UnitError,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{AuditConfig, BackendConfig};
use crate::error::{CliError, Result};
use crate::manifest::{ManifestEntry, StageRecorder};
use crate::report;

pub const VALIDATION: &str = "validation.json";
pub const CORPUS: &str = "corpus.jsonl";
pub const CORPUS_TEXT: &str = "corpus.txt";
pub const TRANSLATIONS: &str = "translations.jsonl";
pub const ENGINE: &str = "engine.json";
pub const LABELS: &str = "labels.csv";
pub const LABEL_COUNTS: &str = "label_counts.csv";
pub const CHANGES: &str = "aggregate/changes.json";
pub const DISTRIBUTION: &str = "aggregate/pronoun_distribution.csv";
pub const CORRELATION: &str = "aggregate/perception_correlation.json";
pub const REPORT: &str = "report.md";

pub fn scores_path(r: ReferenceKind) -> String {
    format!("scores/{r}.csv")
}

pub fn coverage_path(r: ReferenceKind) -> String {
    format!("scores/{r}_coverage.json")
}

pub fn summary_path(r: ReferenceKind) -> String {
    format!("aggregate/summary_{r}.json")
}

pub fn sectors_path(r: ReferenceKind) -> String {
    format!("aggregate/sectors_{r}.csv")
}

pub fn categories_path(r: ReferenceKind) -> String {
    format!("aggregate/categories_{r}.csv")
}

pub fn change_path(adjective_id: &str) -> String {
    format!("aggregate/change_{adjective_id}.csv")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Stage {
    Validate,
    Generate,
    Translate,
    Classify,
    Score,
    Aggregate,
    Report,
    All,
}

impl Stage {
    pub const SEQUENCE: [Stage; 7] = [
        Stage::Validate,
        Stage::Generate,
        Stage::Translate,
        Stage::Classify,
        Stage::Score,
        Stage::Aggregate,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Validate => "validate",
            Stage::Generate => "generate",
            Stage::Translate => "translate",
            Stage::Classify => "classify",
            Stage::Score => "score",
            Stage::Aggregate => "aggregate",
            Stage::Report => "report",
            Stage::All => "all",
        }
    }
}

/// Runs one stage, or every stage in order for [`Stage::All`].
pub fn run_stage(stage: Stage, config: &AuditConfig) -> Result<Vec<ManifestEntry>> {
    if stage == Stage::All {
        return Stage::SEQUENCE
            .iter()
            .map(|&s| run_single(s, config))
            .collect();
    }
    Ok(vec![run_single(stage, config)?])
}

fn run_single(stage: Stage, config: &AuditConfig) -> Result<ManifestEntry> {
    log::info!("stage {}", stage.name());
    let mut rec = StageRecorder::start(&config.out_dir, stage.name());
    match stage {
        Stage::Validate => validate(config, &mut rec)?,
        Stage::Generate => generate(config, &mut rec)?,
        Stage::Translate => translate(config, &mut rec)?,
        Stage::Classify => classify(config, &mut rec)?,
        Stage::Score => score(config, &mut rec)?,
        Stage::Aggregate => aggregate(config, &mut rec)?,
        Stage::Report => report::write_report(config, &mut rec)?,
        Stage::All => unreachable!("expanded by run_stage"),
    }
    rec.finish()
}

// ---------------------------------------------------------------------------
// Shared loading
// ---------------------------------------------------------------------------

fn registry(config: &AuditConfig, rec: &mut StageRecorder) -> Result<Registry> {
    for p in config.inputs.registry_paths() {
        rec.input(p)?;
    }
    Ok(load_registry(&config.inputs.registry_files())?)
}

fn templates(config: &AuditConfig, rec: &mut StageRecorder) -> Result<Vec<SentenceTemplate>> {
    match &config.inputs.templates {
        Some(p) => {
            rec.input(p)?;
            Ok(load_templates(p)?)
        }
        None => Ok(default_templates()),
    }
}

fn adjectives(config: &AuditConfig, rec: &mut StageRecorder) -> Result<Vec<AdjectiveVariant>> {
    match &config.inputs.adjectives {
        Some(p) => {
            rec.input(p)?;
            Ok(load_adjectives(p)?)
        }
        None => Ok(default_adjectives()),
    }
}

fn survey(config: &AuditConfig, rec: &mut StageRecorder) -> Result<Option<Vec<LikertTally>>> {
    match &config.inputs.survey {
        Some(p) => {
            rec.input(p)?;
            Ok(Some(load_survey(p)?))
        }
        None => Ok(None),
    }
}

/// The template whose labels are scored.
pub fn base_template<'t>(config: &AuditConfig, templates: &'t [SentenceTemplate]) -> Result<&'t SentenceTemplate> {
    match &config.base_template {
        Some(id) => templates
            .iter()
            .find(|t| &t.id == id)
            .ok_or_else(|| CliError::Usage(format!("base_template `{id}` is not a known template"))),
        None => templates.iter().find(|t| !t.takes_adjective()).ok_or_else(|| {
            CliError::Usage("no template without an adjective placeholder to score".into())
        }),
    }
}

/// Shares under one reference, restricted to scoreable occupations.
fn reference_map(
    registry: &Registry,
    kind: ReferenceKind,
    tallies: Option<&[LikertTally]>,
) -> Result<ReferenceMap> {
    if kind != ReferenceKind::Perception {
        return Ok(resolve_reference(registry, kind)?);
    }
    let tallies = tallies.ok_or_else(|| CliError::Usage("perception reference needs a survey".into()))?;
    let perceived = perception_reference(tallies)?;
    let mut shares = BTreeMap::new();
    let mut omitted = Vec::new();
    for occ in registry.scoreable() {
        match perceived.get(&occ.id) {
            Some(s) => {
                shares.insert(occ.id.clone(), *s);
            }
            None => omitted.push(Omission {
                occupation_id: occ.id.clone(),
                reason: OmissionReason::NotSurveyed,
            }),
        }
    }
    for id in perceived.keys().filter(|id| registry.occupation(id).is_none()) {
        log::warn!("survey tally for unknown occupation `{id}` ignored");
    }
    Ok(ReferenceMap {
        kind,
        shares,
        omitted,
    })
}

fn require(config: &AuditConfig, stage: &'static str, rel: &str) -> Result<PathBuf> {
    let path = config.out_dir.join(rel);
    if path.is_file() {
        Ok(path)
    } else {
        Err(CliError::MissingArtifact { stage, path })
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn to_json(value: &impl Serialize) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("artifact serializes");
    out.push(b'\n');
    out
}

fn to_jsonl<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for row in rows {
        serde_json::to_writer(&mut out, row).expect("artifact serializes");
        out.push(b'\n');
    }
    out
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

/// A header-only CSV for an empty table.
fn header_only(header: &str) -> Vec<u8> {
    format!("{header}\n").into_bytes()
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::bad_artifact(path, e))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| CliError::bad_artifact(path, e))
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    read_text(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| CliError::bad_artifact(path, e)))
        .collect()
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Coverage<'a> {
    reference: ReferenceKind,
    covered: usize,
    omitted: &'a [Omission],
}

fn validate(config: &AuditConfig, rec: &mut StageRecorder) -> Result<()> {
    let registry = registry(config, rec)?;
    let templates = templates(config, rec)?;
    adjectives(config, rec)?;
    base_template(config, &templates)?;
    let tallies = survey(config, rec)?;
    if let Some(p) = &config.inputs.pronouns {
        rec.input(p)?;
        PronounLexicon::load(p)?;
    }

    let issues = validate_registry(&registry);
    for issue in &issues {
        log::warn!("data issue: {}", serde_json::to_string(issue).unwrap_or_default());
    }
    let maps: Vec<ReferenceMap> = config
        .references
        .iter()
        .map(|&k| reference_map(&registry, k, tallies.as_deref()))
        .collect::<Result<_>>()?;
    let coverage: Vec<Coverage> = maps
        .iter()
        .map(|m| Coverage {
            reference: m.kind,
            covered: m.len(),
            omitted: &m.omitted,
        })
        .collect();
    let excluded: Vec<_> = registry
        .occupations()
        .iter()
        .filter_map(|o| o.excluded.as_ref().map(|e| json!({"occupation_id": o.id, "rule": e})))
        .collect();
    let scoreable = registry.scoreable().count();
    rec.output(
        VALIDATION,
        &to_json(&json!({
            "occupations": registry.occupations().len(),
            "scoreable": scoreable,
            "excluded": excluded,
            "issues": issues,
            "coverage": coverage,
        })),
    )?;
    rec.stats(json!({"issues": issues.len(), "scoreable": scoreable}));
    Ok(())
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

fn generate(config: &AuditConfig, rec: &mut StageRecorder) -> Result<()> {
    let registry = registry(config, rec)?;
    let templates = templates(config, rec)?;
    let adjectives = adjectives(config, rec)?;
    let units = generate_corpus(&registry, &templates, &adjectives)?;
    rec.output(CORPUS, &to_jsonl(&units))?;
    rec.output(CORPUS_TEXT, export_corpus(&units).as_bytes())?;
    rec.stats(json!({"units": units.len()}));
    Ok(())
}

// ---------------------------------------------------------------------------
// translate
// ---------------------------------------------------------------------------

/// One line of `translations.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationLine {
    #[serde(flatten)]
    pub sentence_ref: SentenceRef,
    pub source_text: String,
    pub target_text: Option<String>,
    pub retrieved_at: Option<String>,
    pub error: Option<UnitError>,
}

fn backend(config: &AuditConfig, rec: &mut StageRecorder) -> Result<Box<dyn Backend>> {
    Ok(match &config.backend {
        BackendConfig::Fixture { path } => {
            rec.input(path)?;
            Box::new(fixture_backend(path)?)
        }
        BackendConfig::Http {
            credentials_env,
            options,
        } => {
            let credentials = match credentials_env {
                Some(var) => Some(std::env::var(var).map_err(|_| {
                    CliError::Usage(format!("environment variable {var} is not set"))
                })?),
                None => None,
            };
            Box::new(http_backend(&config.engine, credentials, options.clone())?)
        }
    })
}

fn translate(config: &AuditConfig, rec: &mut StageRecorder) -> Result<()> {
    let corpus = require(config, "translate", CORPUS)?;
    rec.input(&corpus)?;
    let units: Vec<SentenceUnit> = read_jsonl(&corpus)?;
    let backend = backend(config, rec)?;
    let mut cache = TranslationCache::open(&config.cache)?;
    let options = TranslateOptions {
        batch_size: config.batch_size,
        jobs: config.jobs,
    };
    let (outcomes, stats) = translate_corpus(&units, backend.as_ref(), &mut cache, &config.engine, &options)?;
    if stats.failed > 0 {
        log::warn!("{} of {} sentences have no translation", stats.failed, stats.units);
    }

    let lines: Vec<TranslationLine> = units
        .iter()
        .zip(outcomes)
        .map(|(unit, outcome)| match outcome {
            Ok(r) => TranslationLine {
                sentence_ref: unit.sentence_ref.clone(),
                source_text: unit.source_text.clone(),
                target_text: Some(r.target_text),
                retrieved_at: Some(r.engine.retrieved_at),
                error: None,
            },
            Err(e) => TranslationLine {
                sentence_ref: unit.sentence_ref.clone(),
                source_text: unit.source_text.clone(),
                target_text: None,
                retrieved_at: None,
                error: Some(e),
            },
        })
        .collect();
    rec.output(TRANSLATIONS, &to_jsonl(&lines))?;
    rec.output(
        ENGINE,
        &to_json(&json!({
            "engine_id": config.engine.engine_id,
            "endpoint": config.engine.endpoint,
            "source_lang": config.engine.source_lang,
            "target_lang": config.engine.target_lang,
        })),
    )?;
    if config.cache.is_file() {
        rec.external_output(&config.cache)?;
    }
    rec.stats(serde_json::to_value(stats).expect("stats serialize"));
    Ok(())
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub occupation_id: String,
    pub template_id: String,
    pub adjective_id: Option<String>,
    pub label: GenderLabel,
    pub target_text: String,
}

#[derive(Debug, Clone, Serialize)]
struct LabelCountRow {
    template_id: String,
    adjective_id: Option<String>,
    masculine: usize,
    feminine: usize,
    neutral: usize,
    ambiguous: usize,
    undetected: usize,
    untranslated: usize,
}

fn classify(config: &AuditConfig, rec: &mut StageRecorder) -> Result<()> {
    let path = require(config, "classify", TRANSLATIONS)?;
    rec.input(&path)?;
    let lines: Vec<TranslationLine> = read_jsonl(&path)?;
    let classifier = match &config.inputs.pronouns {
        Some(p) => {
            rec.input(p)?;
            Classifier::new(PronounLexicon::load(p)?)
        }
        None => Classifier::default(),
    };

    let mut rows = Vec::new();
    let mut counts: BTreeMap<(String, Option<String>), (LabelCounts, usize)> = BTreeMap::new();
    for line in &lines {
        let key = (
            line.sentence_ref.template_id.clone(),
            line.sentence_ref.adjective_id.clone(),
        );
        let entry = counts.entry(key).or_default();
        let Some(target) = &line.target_text else {
            entry.1 += 1;
            continue;
        };
        let label = classifier.classify(target);
        entry.0.add(label);
        rows.push(LabelRow {
            occupation_id: line.sentence_ref.occupation_id.clone(),
            template_id: line.sentence_ref.template_id.clone(),
            adjective_id: line.sentence_ref.adjective_id.clone(),
            label,
            target_text: target.clone(),
        });
    }
    let count_rows: Vec<LabelCountRow> = counts
        .into_iter()
        .map(|((template_id, adjective_id), (c, untranslated))| LabelCountRow {
            template_id,
            adjective_id,
            masculine: c.masculine,
            feminine: c.feminine,
            neutral: c.neutral,
            ambiguous: c.ambiguous,
            undetected: c.undetected,
            untranslated,
        })
        .collect();
    rec.output(LABELS, &to_csv(&rows)?)?;
    rec.output(LABEL_COUNTS, &to_csv(&count_rows)?)?;
    rec.stats(json!({"labelled": rows.len(), "untranslated": lines.len() - rows.len()}));
    Ok(())
}

/// Labels of one (template, adjective) variant keyed by occupation.
fn variant_labels(
    rows: &[LabelRow],
    template_id: &str,
    adjective_id: Option<&str>,
) -> BTreeMap<String, GenderLabel> {
    rows.iter()
        .filter(|r| r.template_id == template_id && r.adjective_id.as_deref() == adjective_id)
        .map(|r| (r.occupation_id.clone(), r.label))
        .collect()
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

/// One line of `scores/<reference>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub occupation_id: String,
    pub sector_id: String,
    pub category_code: Option<String>,
    pub label: GenderLabel,
    pub female_share: f64,
    pub male_share: f64,
    pub error_points: f64,
    pub optimal_error: f64,
    /// A decimal number, or `unbounded`.
    pub bias: String,
    pub direction: String,
}

impl ScoreRow {
    pub fn bias(&self) -> Option<Bias> {
        match self.bias.as_str() {
            "unbounded" => Some(Bias::Unbounded),
            s => s.parse().ok().map(Bias::Finite),
        }
    }
}

fn bias_field(b: Bias) -> String {
    match b {
        Bias::Finite(v) => format!("{v}"),
        Bias::Unbounded => "unbounded".into(),
    }
}

#[derive(Serialize)]
struct ScoreCoverage {
    reference: ReferenceKind,
    scored: usize,
    omitted: Vec<CoverageGap>,
}

#[derive(Serialize)]
struct CoverageGap {
    occupation_id: String,
    reason: String,
}

fn score(config: &AuditConfig, rec: &mut StageRecorder) -> Result<()> {
    let labels_path = require(config, "score", LABELS)?;
    rec.input(&labels_path)?;
    let rows: Vec<LabelRow> = read_csv(&labels_path)?;
    let registry = registry(config, rec)?;
    let templates = templates(config, rec)?;
    let base = base_template(config, &templates)?;
    let tallies = survey(config, rec)?;
    let labels = variant_labels(&rows, &base.id, None);

    let mut stats = serde_json::Map::new();
    for &kind in &config.references {
        let map = reference_map(&registry, kind, tallies.as_deref())?;
        let omitted: BTreeMap<&str, OmissionReason> = map
            .omitted
            .iter()
            .map(|o| (o.occupation_id.as_str(), o.reason))
            .collect();
        let mut occupations: Vec<_> = registry.scoreable().collect();
        occupations.sort_by(|a, b| a.id.cmp(&b.id));

        let mut out = Vec::new();
        let mut gaps = Vec::new();
        for occ in occupations {
            let gap = |reason: String| CoverageGap {
                occupation_id: occ.id.clone(),
                reason,
            };
            let Some(&label) = labels.get(&occ.id) else {
                gaps.push(gap("untranslated".into()));
                continue;
            };
            if !label.is_scoreable() {
                gaps.push(gap(format!("label_{label}")));
                continue;
            }
            let Some(share) = map.get(&occ.id) else {
                let reason = omitted.get(occ.id.as_str()).copied().unwrap_or(OmissionReason::NoCategory);
                gaps.push(gap(reason.to_string()));
                continue;
            };
            let r = score_share(&occ.id, label, kind, share)?;
            out.push(ScoreRow {
                occupation_id: occ.id.clone(),
                sector_id: occ.sector_id.clone(),
                category_code: occ.category_code(kind.grouping_system()).map(str::to_string),
                label,
                female_share: share.female(),
                male_share: share.male(),
                error_points: r.error_points,
                optimal_error: r.optimal_error,
                bias: bias_field(r.bias),
                direction: r.direction.to_string(),
            });
        }
        let csv = if out.is_empty() {
            header_only("occupation_id,sector_id,category_code,label,female_share,male_share,error_points,optimal_error,bias,direction")
        } else {
            to_csv(&out)?
        };
        rec.output(&scores_path(kind), &csv)?;
        stats.insert(kind.to_string(), json!({"scored": out.len(), "omitted": gaps.len()}));
        rec.output(
            &coverage_path(kind),
            &to_json(&ScoreCoverage {
                reference: kind,
                scored: out.len(),
                omitted: gaps,
            }),
        )?;
    }
    rec.stats(serde_json::Value::Object(stats));
    Ok(())
}

/// Reads a score file back into results.
pub fn read_scores(path: &Path, kind: ReferenceKind) -> Result<Vec<BiasResult>> {
    let rows: Vec<ScoreRow> = read_csv(path)?;
    rows.iter()
        .map(|row| {
            let share = GenderShare::new(row.female_share, row.male_share)
                .map_err(|e| CliError::bad_artifact(path, e))?;
            Ok(score_share(&row.occupation_id, row.label, kind, share)?)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// aggregate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SectorRow {
    sector_id: String,
    dominance: String,
    weighted_bias: Option<f64>,
    n_occupations: usize,
    unbounded_count: usize,
}

#[derive(Serialize)]
struct CategoryRow {
    category_code: String,
    mean_bias: Option<f64>,
    n_finite: usize,
    unbounded_count: usize,
}

#[derive(Serialize)]
struct DistributionRow {
    variant: String,
    total: usize,
    masculine: f64,
    feminine: f64,
    other: f64,
}

#[derive(Serialize)]
struct ChangeCell {
    from: &'static str,
    to: &'static str,
    count: usize,
}

#[derive(Serialize)]
struct SectorFigureRow {
    sector_id: String,
    sector_name: String,
    female_dominated_bias: Option<f64>,
    male_dominated_bias: Option<f64>,
    female_dominated_n: usize,
    male_dominated_n: usize,
    unbounded_count: usize,
}

#[derive(Serialize)]
struct ScatterRow {
    occupation_id: String,
    name_gloss: String,
    femininity: f64,
    female_share: f64,
}

#[derive(Serialize)]
struct PerceptionErrorRow {
    occupation_id: String,
    name_gloss: String,
    direction: String,
    bias_perception: String,
    bias_source: Option<String>,
}

fn aggregate(config: &AuditConfig, rec: &mut StageRecorder) -> Result<()> {
    let mut scored = Vec::new();
    for &kind in &config.references {
        let path = require(config, "aggregate", &scores_path(kind))?;
        rec.input(&path)?;
        scored.push((kind, read_scores(&path, kind)?));
    }
    let labels_path = require(config, "aggregate", LABELS)?;
    rec.input(&labels_path)?;
    let label_rows: Vec<LabelRow> = read_csv(&labels_path)?;
    let registry = registry(config, rec)?;
    let templates = templates(config, rec)?;
    let adjectives = adjectives(config, rec)?;
    let tallies = survey(config, rec)?;
    let base = base_template(config, &templates)?;

    let mut stats = serde_json::Map::new();
    for (kind, results) in &scored {
        let categories: Vec<CategoryRow> = category_biases(results, &registry, kind.grouping_system())
            .into_iter()
            .map(|c| CategoryRow {
                category_code: c.category_code,
                mean_bias: c.mean_bias,
                n_finite: c.n_finite,
                unbounded_count: c.unbounded_count,
            })
            .collect();
        rec.output(
            &categories_path(*kind),
            &if categories.is_empty() {
                header_only("category_code,mean_bias,n_finite,unbounded_count")
            } else {
                to_csv(&categories)?
            },
        )?;

        let female = sector_bias(results, &registry, Dominance::FemaleDominated)?;
        let male = sector_bias(results, &registry, Dominance::MaleDominated)?;
        let mut sector_rows = Vec::new();
        for entry in female.values().chain(male.values()) {
            sector_rows.push(SectorRow {
                sector_id: entry.sector_id.clone(),
                dominance: entry.dominance.to_string(),
                weighted_bias: entry.weighted_bias,
                n_occupations: entry.n_occupations,
                unbounded_count: entry.unbounded_count,
            });
        }
        sector_rows.sort_by(|a, b| (&a.sector_id, &a.dominance).cmp(&(&b.sector_id, &b.dominance)));
        rec.output(
            &sectors_path(*kind),
            &if sector_rows.is_empty() {
                header_only("sector_id,dominance,weighted_bias,n_occupations,unbounded_count")
            } else {
                to_csv(&sector_rows)?
            },
        )?;

        let figure: Vec<SectorFigureRow> = registry
            .sectors()
            .iter()
            .map(|s| {
                let f = female.get(&s.id);
                let m = male.get(&s.id);
                SectorFigureRow {
                    sector_id: s.id.clone(),
                    sector_name: s.name.clone(),
                    female_dominated_bias: f.and_then(|e| e.weighted_bias),
                    male_dominated_bias: m.and_then(|e| e.weighted_bias),
                    female_dominated_n: f.map_or(0, |e| e.n_occupations),
                    male_dominated_n: m.map_or(0, |e| e.n_occupations),
                    unbounded_count: f.map_or(0, |e| e.unbounded_count) + m.map_or(0, |e| e.unbounded_count),
                }
            })
            .collect();
        if !figure.is_empty() {
            rec.output(&format!("figures/sector_bias_{kind}.csv"), &to_csv(&figure)?)?;
        }

        let summary = summary_stats(results, *kind);
        stats.insert(kind.to_string(), json!({"scoreable": summary.scoreable, "wrong": summary.wrong}));
        rec.output(&summary_path(*kind), &to_json(&summary))?;
    }

    // Adjective perturbations against the scored template.
    let base_labels = variant_labels(&label_rows, &base.id, None);
    let mut changes: Vec<ChangeMatrix> = Vec::new();
    let mut distribution = vec![DistributionRow::from_labels(base.id.clone(), base_labels.values().copied())];
    if let Some(adj_template) = templates.iter().find(|t| t.takes_adjective()) {
        for adj in &adjectives {
            let with_adj = variant_labels(&label_rows, &adj_template.id, Some(&adj.id));
            let m = adjective_change_matrix(&base_labels, &with_adj, &adj.id);
            let cells = [
                ChangeCell { from: "she", to: "she", count: m.she_to_she },
                ChangeCell { from: "he", to: "he", count: m.he_to_he },
                ChangeCell { from: "she", to: "he", count: m.she_to_he },
                ChangeCell { from: "he", to: "she", count: m.he_to_she },
            ];
            rec.output(&change_path(&adj.id), &to_csv(&cells)?)?;
            distribution.push(DistributionRow::from_labels(adj.id.clone(), with_adj.values().copied()));
            changes.push(m);
        }
    }
    rec.output(CHANGES, &to_json(&changes))?;
    rec.output(DISTRIBUTION, &to_csv(&distribution)?)?;

    // Perception against the source-country census.
    if let Some(tallies) = &tallies {
        let perceived = reference_map(&registry, ReferenceKind::Perception, Some(tallies))?;
        let census = resolve_reference(&registry, ReferenceKind::SourceStats)?;
        let n = perceived
            .shares
            .keys()
            .filter(|id| census.shares.contains_key(*id))
            .count();
        let value = match perception_correlation(&perceived.shares, &census.shares) {
            Ok(r) => json!({"n": n, "pearson_r": r}),
            Err(e) => json!({"n": n, "pearson_r": null, "error": e.to_string()}),
        };
        rec.output(CORRELATION, &to_json(&value))?;

        let scatter: Vec<ScatterRow> = perceived
            .shares
            .iter()
            .filter_map(|(id, p)| {
                let c = census.get(id)?;
                let gloss = registry.occupation(id)?.name_gloss.clone().unwrap_or_default();
                Some(ScatterRow {
                    occupation_id: id.clone(),
                    name_gloss: gloss,
                    femininity: p.female(),
                    female_share: c.female(),
                })
            })
            .collect();
        rec.output("figures/perception_vs_census.csv", &to_csv(&scatter)?)?;

        let by_kind: BTreeMap<ReferenceKind, &Vec<BiasResult>> = scored.iter().map(|(k, r)| (*k, r)).collect();
        if let Some(perception) = by_kind.get(&ReferenceKind::Perception) {
            let source: BTreeMap<&str, Bias> = by_kind
                .get(&ReferenceKind::SourceStats)
                .map(|rs| rs.iter().map(|r| (r.occupation_id.as_str(), r.bias)).collect())
                .unwrap_or_default();
            let rows: Vec<PerceptionErrorRow> = perception
                .iter()
                .filter(|r| r.direction != mtaudit_core::scoring::Direction::None)
                .map(|r| PerceptionErrorRow {
                    occupation_id: r.occupation_id.clone(),
                    name_gloss: registry
                        .occupation(&r.occupation_id)
                        .and_then(|o| o.name_gloss.clone())
                        .unwrap_or_default(),
                    direction: r.direction.to_string(),
                    bias_perception: bias_field(r.bias),
                    bias_source: source.get(r.occupation_id.as_str()).map(|b| bias_field(*b)),
                })
                .collect();
            rec.output(
                "figures/perception_errors.csv",
                &if rows.is_empty() {
                    header_only("occupation_id,name_gloss,direction,bias_perception,bias_source")
                } else {
                    to_csv(&rows)?
                },
            )?;
        }
    }
    rec.stats(serde_json::Value::Object(stats));
    Ok(())
}

impl DistributionRow {
    fn from_labels(variant: String, labels: impl IntoIterator<Item = GenderLabel>) -> Self {
        let d = pronoun_distribution(labels);
        Self {
            variant,
            total: d.total,
            masculine: d.masculine,
            feminine: d.feminine,
            other: d.other,
        }
    }
}
