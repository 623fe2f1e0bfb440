//! Translation backends and the persistent replay cache.
//!
//! Audits are snapshots of one engine at one point in time. Every
//! translation obtained from a backend is appended to a JSON-lines cache
//! keyed by a SHA-256 over (engine id, language pair, source text); later
//! runs replay from the cache without contacting the engine.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::sentences::{SentenceRef, SentenceUnit};
use crate::{Error, Result};

/// The engine snapshot an audit talks to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineDescriptor {
    pub engine_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    pub source_lang: String,
    pub target_lang: String,
    /// ISO-8601 timestamp stamped on translations fetched in this run.
    pub retrieved_at: String,
}

impl EngineDescriptor {
    pub fn new(
        engine_id: impl Into<String>,
        source_lang: impl Into<String>,
        target_lang: impl Into<String>,
        retrieved_at: impl Into<String>,
    ) -> Result<Self> {
        let engine_id = engine_id.into();
        if engine_id.trim().is_empty() {
            return Err(Error::InsufficientData("engine_id must not be empty".into()));
        }
        Ok(Self {
            engine_id,
            endpoint: None,
            source_lang: source_lang.into(),
            target_lang: target_lang.into(),
            retrieved_at: retrieved_at.into(),
        })
    }

    /// Cache key of a source sentence under this engine and language pair.
    pub fn cache_key(&self, source_text: &str) -> String {
        let mut hasher = Sha256::new();
        for part in [
            self.engine_id.as_str(),
            self.source_lang.as_str(),
            self.target_lang.as_str(),
            source_text,
        ] {
            hasher.update((part.len() as u64).to_le_bytes());
            hasher.update(part.as_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRecord {
    #[serde(flatten)]
    pub sentence_ref: SentenceRef,
    pub source_text: String,
    pub target_text: String,
    pub engine: EngineDescriptor,
}

/// Why a single sentence has no translation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnitError {
    #[error("no fixture entry for this sentence")]
    MissingFixture,
    #[error("backend unavailable: {message}")]
    BackendUnavailable { message: String },
    #[error("authentication failed: {message}")]
    AuthFailure { message: String },
    #[error("engine returned {got} lines for {expected}")]
    AlignmentError { expected: usize, got: usize },
    #[error("engine returned an empty translation")]
    EmptyTranslation,
}

pub type BatchResult = std::result::Result<Vec<std::result::Result<String, UnitError>>, UnitError>;

/// A translation engine answering ordered batches of source lines.
///
/// The outer error fails every line of the batch; inner errors are per line.
pub trait Backend: Send + Sync {
    fn translate_batch(&self, lines: &[String]) -> BatchResult;

    /// Number of queries issued to the engine so far.
    fn query_count(&self) -> u64;

    /// Largest batch the backend accepts.
    fn max_batch(&self) -> usize {
        usize::MAX
    }
}

/// Answers from a `source<TAB>target` file.
#[derive(Debug)]
pub struct FixtureBackend {
    entries: HashMap<String, String>,
    queries: AtomicU64,
}

impl FixtureBackend {
    pub fn from_pairs<I, S, T>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        Self {
            entries: pairs.into_iter().map(|(s, t)| (s.into(), t.into())).collect(),
            queries: AtomicU64::new(0),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Loads a TSV fixture; source lines must be unique.
pub fn fixture_backend(path: &Path) -> Result<FixtureBackend> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let malformed = |line: usize, reason: String| Error::MalformedFixture {
        path: path.to_path_buf(),
        line: line as u64,
        reason,
    };
    let mut entries: HashMap<String, String> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            continue;
        }
        let (src, tgt) = line
            .split_once('\t')
            .ok_or_else(|| malformed(i + 1, "missing TAB separator".into()))?;
        if src.is_empty() || tgt.is_empty() {
            return Err(malformed(i + 1, "empty source or target".into()));
        }
        if let Some(prev) = entries.get(src) {
            if prev != tgt {
                return Err(malformed(i + 1, format!("conflicting targets for `{src}`")));
            }
            continue;
        }
        entries.insert(src.to_string(), tgt.to_string());
    }
    Ok(FixtureBackend {
        entries,
        queries: AtomicU64::new(0),
    })
}

impl Backend for FixtureBackend {
    fn translate_batch(&self, lines: &[String]) -> BatchResult {
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(lines
            .iter()
            .map(|l| self.entries.get(l).cloned().ok_or(UnitError::MissingFixture))
            .collect())
    }

    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

/// Limits for the HTTP adapter.
#[derive(Debug, Clone)]
pub struct HttpOptions {
    pub max_batch: usize,
    pub max_requests_per_second: f64,
    pub max_attempts: u32,
    pub initial_backoff: Duration,
    pub timeout: Duration,
}

impl Default for HttpOptions {
    fn default() -> Self {
        Self {
            max_batch: 100,
            max_requests_per_second: 2.0,
            max_attempts: 5,
            initial_backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(60),
        }
    }
}

#[derive(Serialize)]
struct BatchRequest<'a> {
    source_lang: &'a str,
    target_lang: &'a str,
    lines: &'a [String],
}

#[derive(Deserialize)]
struct BatchResponse {
    lines: Vec<String>,
}

/// Document-mode adapter: POSTs `{source_lang, target_lang, lines}` and
/// expects `{lines}` of equal length back.
pub struct HttpBackend {
    agent: ureq::Agent,
    endpoint: String,
    source_lang: String,
    target_lang: String,
    credentials: Option<String>,
    options: HttpOptions,
    next_slot: Mutex<Instant>,
    queries: AtomicU64,
}

pub fn http_backend(
    descriptor: &EngineDescriptor,
    credentials: Option<String>,
    options: HttpOptions,
) -> Result<HttpBackend> {
    let endpoint = descriptor
        .endpoint
        .clone()
        .ok_or_else(|| Error::InsufficientData("http backend needs an endpoint".into()))?;
    let config = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(options.timeout))
        .build();
    Ok(HttpBackend {
        agent: ureq::Agent::new_with_config(config),
        endpoint,
        source_lang: descriptor.source_lang.clone(),
        target_lang: descriptor.target_lang.clone(),
        credentials,
        options,
        next_slot: Mutex::new(Instant::now()),
        queries: AtomicU64::new(0),
    })
}

enum Attempt {
    Done(BatchResult),
    Retry(String),
}

impl HttpBackend {
    fn wait_for_slot(&self) {
        if self.options.max_requests_per_second <= 0.0 {
            return;
        }
        let interval = Duration::from_secs_f64(1.0 / self.options.max_requests_per_second);
        let wait = {
            let mut next = self.next_slot.lock().expect("rate limiter poisoned");
            let now = Instant::now();
            let slot = (*next).max(now);
            *next = slot + interval;
            slot - now
        };
        if !wait.is_zero() {
            thread::sleep(wait);
        }
    }

    fn attempt(&self, lines: &[String]) -> Attempt {
        self.wait_for_slot();
        self.queries.fetch_add(1, Ordering::Relaxed);
        let mut request = self.agent.post(&self.endpoint);
        if let Some(token) = &self.credentials {
            request = request.header("Authorization", format!("Bearer {token}"));
        }
        let body = BatchRequest {
            source_lang: &self.source_lang,
            target_lang: &self.target_lang,
            lines,
        };
        let mut response = match request.send_json(&body) {
            Ok(r) => r,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        let status = response.status().as_u16();
        match status {
            200..=299 => {}
            401 | 403 => {
                return Attempt::Done(Err(UnitError::AuthFailure {
                    message: format!("HTTP {status}"),
                }))
            }
            408 | 429 | 500..=599 => return Attempt::Retry(format!("HTTP {status}")),
            _ => {
                return Attempt::Done(Err(UnitError::BackendUnavailable {
                    message: format!("HTTP {status}"),
                }))
            }
        }
        let parsed: BatchResponse = match response.body_mut().read_json() {
            Ok(p) => p,
            Err(e) => {
                return Attempt::Done(Err(UnitError::BackendUnavailable {
                    message: format!("unreadable response: {e}"),
                }))
            }
        };
        if parsed.lines.len() != lines.len() {
            return Attempt::Done(Err(UnitError::AlignmentError {
                expected: lines.len(),
                got: parsed.lines.len(),
            }));
        }
        Attempt::Done(Ok(parsed.lines.into_iter().map(Ok).collect()))
    }
}

impl Backend for HttpBackend {
    fn translate_batch(&self, lines: &[String]) -> BatchResult {
        let mut backoff = self.options.initial_backoff;
        let mut last = String::new();
        for attempt in 0..self.options.max_attempts.max(1) {
            if attempt > 0 {
                log::warn!("retrying batch after {last} (attempt {})", attempt + 1);
                thread::sleep(backoff);
                backoff *= 2;
            }
            match self.attempt(lines) {
                Attempt::Done(result) => return result,
                Attempt::Retry(reason) => last = reason,
            }
        }
        Err(UnitError::BackendUnavailable {
            message: format!("{last} after {} attempts", self.options.max_attempts.max(1)),
        })
    }

    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    fn max_batch(&self) -> usize {
        self.options.max_batch.max(1)
    }
}

/// One line of the cache file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub engine: String,
    pub src: String,
    pub tgt: String,
    pub retrieved_at: String,
    pub checksum: String,
}

impl CacheEntry {
    pub fn new(engine: &EngineDescriptor, src: &str, tgt: &str) -> Self {
        let key = engine.cache_key(src);
        let checksum = entry_checksum(&key, &engine.engine_id, src, tgt, &engine.retrieved_at);
        Self {
            key,
            engine: engine.engine_id.clone(),
            src: src.to_string(),
            tgt: tgt.to_string(),
            retrieved_at: engine.retrieved_at.clone(),
            checksum,
        }
    }

    fn is_intact(&self) -> bool {
        self.checksum == entry_checksum(&self.key, &self.engine, &self.src, &self.tgt, &self.retrieved_at)
    }
}

fn entry_checksum(key: &str, engine: &str, src: &str, tgt: &str, retrieved_at: &str) -> String {
    let mut hasher = Sha256::new();
    for part in [key, engine, src, tgt, retrieved_at] {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    hex::encode(&hasher.finalize()[..16])
}

/// Append-only JSON-lines translation cache.
#[derive(Debug)]
pub struct TranslationCache {
    path: PathBuf,
    entries: HashMap<String, CacheEntry>,
}

impl TranslationCache {
    /// Opens (or starts) the cache at `path`, verifying every line.
    pub fn open(path: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        let file = match File::open(path) {
            Ok(f) => Some(f),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
            Err(source) => {
                return Err(Error::Io {
                    path: path.to_path_buf(),
                    source,
                })
            }
        };
        if let Some(file) = file {
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|source| Error::Io {
                    path: path.to_path_buf(),
                    source,
                })?;
                if line.trim().is_empty() {
                    continue;
                }
                let corrupt = || Error::CacheCorrupt {
                    path: path.to_path_buf(),
                    line: i as u64 + 1,
                };
                let entry: CacheEntry = serde_json::from_str(&line).map_err(|_| corrupt())?;
                if !entry.is_intact() {
                    return Err(corrupt());
                }
                entries.entry(entry.key.clone()).or_insert(entry);
            }
        }
        Ok(Self {
            path: path.to_path_buf(),
            entries,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, key: &str) -> Option<&CacheEntry> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends entries whose keys are not cached yet, in the given order.
    pub fn append(&mut self, new: Vec<CacheEntry>) -> Result<usize> {
        let fresh: Vec<CacheEntry> = new
            .into_iter()
            .filter(|e| !self.entries.contains_key(&e.key))
            .collect();
        if fresh.is_empty() {
            return Ok(0);
        }
        let io = |source| Error::Io {
            path: self.path.clone(),
            source,
        };
        if let Some(parent) = self.path.parent() {
            fs::create_dir_all(parent).map_err(io)?;
        }
        let mut buf = String::new();
        for entry in &fresh {
            buf.push_str(&serde_json::to_string(entry)?);
            buf.push('\n');
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(io)?;
        file.write_all(buf.as_bytes()).map_err(io)?;
        file.sync_data().map_err(io)?;
        let n = fresh.len();
        for entry in fresh {
            self.entries.insert(entry.key.clone(), entry);
        }
        Ok(n)
    }
}

#[derive(Debug, Clone)]
pub struct TranslateOptions {
    /// Lines per backend request.
    pub batch_size: usize,
    /// Concurrent backend requests.
    pub jobs: usize,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        Self {
            batch_size: 100,
            jobs: 1,
        }
    }
}

pub type UnitOutcome = std::result::Result<TranslationRecord, UnitError>;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TranslateStats {
    pub units: usize,
    pub cache_hits: usize,
    pub fetched: usize,
    pub failed: usize,
    pub backend_queries: u64,
}

/// Translates every unit, replaying from the cache where possible.
///
/// Output order equals input order. Backend failures are reported per
/// unit; only cache I/O aborts the call.
pub fn translate_corpus(
    units: &[SentenceUnit],
    backend: &dyn Backend,
    cache: &mut TranslationCache,
    engine: &EngineDescriptor,
    options: &TranslateOptions,
) -> Result<(Vec<UnitOutcome>, TranslateStats)> {
    let queries_before = backend.query_count();
    let keys: Vec<String> = units.iter().map(|u| engine.cache_key(&u.source_text)).collect();

    let mut seen = HashSet::new();
    let misses: Vec<(&str, &str)> = units
        .iter()
        .zip(&keys)
        .filter(|(_, k)| cache.get(k).is_none() && seen.insert(k.as_str()))
        .map(|(u, k)| (k.as_str(), u.source_text.as_str()))
        .collect();

    let batch_size = options.batch_size.max(1).min(backend.max_batch());
    let batches: Vec<&[(&str, &str)]> = misses.chunks(batch_size).collect();
    let results = run_batches(&batches, backend, options.jobs.max(1));

    let mut fresh: HashMap<&str, std::result::Result<String, UnitError>> = HashMap::new();
    let mut new_entries = Vec::new();
    for (batch, result) in batches.iter().zip(results) {
        match result {
            Ok(lines) => {
                for (&(key, src), line) in batch.iter().zip(lines) {
                    let line = line.and_then(|t| {
                        if t.trim().is_empty() {
                            Err(UnitError::EmptyTranslation)
                        } else {
                            Ok(t)
                        }
                    });
                    if let Ok(tgt) = &line {
                        new_entries.push(CacheEntry::new(engine, src, tgt));
                    }
                    fresh.insert(key, line);
                }
            }
            Err(err) => {
                for &(key, _) in batch.iter() {
                    fresh.insert(key, Err(err.clone()));
                }
            }
        }
    }
    let fetched = new_entries.len();
    cache.append(new_entries)?;

    let mut stats = TranslateStats {
        units: units.len(),
        fetched,
        ..Default::default()
    };
    let mut outcomes = Vec::with_capacity(units.len());
    for (unit, key) in units.iter().zip(&keys) {
        let outcome = match cache.get(key) {
            Some(entry) if !fresh.contains_key(key.as_str()) => {
                stats.cache_hits += 1;
                Ok(record(unit, &entry.tgt, engine, &entry.retrieved_at))
            }
            Some(entry) => Ok(record(unit, &entry.tgt, engine, &entry.retrieved_at)),
            None => Err(fresh
                .get(key.as_str())
                .and_then(|r| r.clone().err())
                .unwrap_or(UnitError::MissingFixture)),
        };
        if outcome.is_err() {
            stats.failed += 1;
        }
        outcomes.push(outcome);
    }
    stats.backend_queries = backend.query_count() - queries_before;
    Ok((outcomes, stats))
}

fn record(
    unit: &SentenceUnit,
    target_text: &str,
    engine: &EngineDescriptor,
    retrieved_at: &str,
) -> TranslationRecord {
    TranslationRecord {
        sentence_ref: unit.sentence_ref.clone(),
        source_text: unit.source_text.clone(),
        target_text: target_text.to_string(),
        engine: EngineDescriptor {
            retrieved_at: retrieved_at.to_string(),
            ..engine.clone()
        },
    }
}

/// Runs batches on up to `jobs` threads; results come back in batch order.
fn run_batches(batches: &[&[(&str, &str)]], backend: &dyn Backend, jobs: usize) -> Vec<BatchResult> {
    let slots: Vec<Mutex<Option<BatchResult>>> = batches.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        let Some(batch) = batches.get(i) else { break };
        let lines: Vec<String> = batch.iter().map(|(_, src)| src.to_string()).collect();
        let result = backend.translate_batch(&lines).and_then(|out| {
            if out.len() == lines.len() {
                Ok(out)
            } else {
                Err(UnitError::AlignmentError {
                    expected: lines.len(),
                    got: out.len(),
                })
            }
        });
        *slots[i].lock().expect("result slot poisoned") = Some(result);
    };
    let workers = jobs.min(batches.len());
    if workers <= 1 {
        work();
    } else {
        thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(work);
            }
        });
    }
    slots
        .into_iter()
        .map(|m| {
            m.into_inner()
                .expect("result slot poisoned")
                .expect("every batch was processed")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> EngineDescriptor {
        EngineDescriptor::new("fixture-2020-04", "hu", "en", "2020-04-15T00:00:00Z").unwrap()
    }

    fn unit(occ: &str, text: &str) -> SentenceUnit {
        SentenceUnit {
            sentence_ref: SentenceRef {
                occupation_id: occ.into(),
                template_id: "base".into(),
                adjective_id: None,
            },
            source_text: text.into(),
        }
    }

    #[test]
    fn engine_id_required() {
        assert!(EngineDescriptor::new(" ", "hu", "en", "x").is_err());
    }

    #[test]
    fn cache_key_separates_fields() {
        let e = engine();
        let mut other = e.clone();
        other.target_lang = "de".into();
        assert_ne!(e.cache_key("ő egy orvos"), other.cache_key("ő egy orvos"));
        assert_eq!(e.cache_key("ő egy orvos").len(), 64);
    }

    #[test]
    fn fixture_examples() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.tsv");
        fs::write(&path, "ő egy statisztikus\the is a statistician\n").unwrap();
        let backend = fixture_backend(&path).unwrap();
        let out = backend.translate_batch(&["ő egy statisztikus".into(), "ő egy orvos".into()]).unwrap();
        assert_eq!(out[0].as_deref(), Ok("he is a statistician"));
        assert_eq!(out[1], Err(UnitError::MissingFixture));

        fs::write(&path, "").unwrap();
        let backend = fixture_backend(&path).unwrap();
        assert_eq!(backend.translate_batch(&["x".into()]).unwrap()[0], Err(UnitError::MissingFixture));

        fs::write(&path, "a\tb\na\tc\n").unwrap();
        assert!(matches!(fixture_backend(&path), Err(Error::MalformedFixture { line: 2, .. })));
        fs::write(&path, "a b\n").unwrap();
        assert!(matches!(fixture_backend(&path), Err(Error::MalformedFixture { line: 1, .. })));
    }

    #[test]
    fn cache_roundtrip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache").join("t.jsonl");
        let mut cache = TranslationCache::open(&path).unwrap();
        assert!(cache.is_empty());
        let e = engine();
        cache.append(vec![CacheEntry::new(&e, "ő egy orvos", "he is a doctor")]).unwrap();
        // Re-appending an existing key is a no-op.
        assert_eq!(cache.append(vec![CacheEntry::new(&e, "ő egy orvos", "she is a doctor")]).unwrap(), 0);
        let reopened = TranslationCache::open(&path).unwrap();
        assert_eq!(reopened.get(&e.cache_key("ő egy orvos")).unwrap().tgt, "he is a doctor");

        let text = fs::read_to_string(&path).unwrap().replace("he is a doctor", "she is a doctor");
        fs::write(&path, text).unwrap();
        assert!(matches!(TranslationCache::open(&path), Err(Error::CacheCorrupt { line: 1, .. })));
    }

    #[test]
    fn warm_cache_issues_no_queries() {
        let dir = tempfile::tempdir().unwrap();
        let mut cache = TranslationCache::open(&dir.path().join("c.jsonl")).unwrap();
        let backend = FixtureBackend::from_pairs([("ő egy orvos", "he is a doctor")]);
        let units = vec![unit("o1", "ő egy orvos")];
        let e = engine();
        let (first, stats) = translate_corpus(&units, &backend, &mut cache, &e, &Default::default()).unwrap();
        assert_eq!(first[0].as_ref().unwrap().target_text, "he is a doctor");
        assert_eq!((stats.fetched, stats.cache_hits, stats.backend_queries), (1, 0, 1));
        let before = backend.query_count();
        let (second, stats) = translate_corpus(&units, &backend, &mut cache, &e, &Default::default()).unwrap();
        assert_eq!(first, second);
        assert_eq!(backend.query_count(), before);
        assert_eq!((stats.cache_hits, stats.backend_queries), (1, 0));
    }

    #[test]
    fn missing_entry_fails_only_that_unit() {
        let dir = tempfile::tempdir().unwrap();
        let mut cache = TranslationCache::open(&dir.path().join("c.jsonl")).unwrap();
        let backend = FixtureBackend::from_pairs([("a", "he is a"), ("c", "she is c")]);
        let units = vec![unit("o1", "a"), unit("o2", "b"), unit("o3", "c"), unit("o4", "a")];
        let opts = TranslateOptions { batch_size: 2, jobs: 3 };
        let (out, stats) = translate_corpus(&units, &backend, &mut cache, &engine(), &opts).unwrap();
        assert!(out[0].is_ok());
        assert_eq!(out[1], Err(UnitError::MissingFixture));
        assert_eq!(out[2].as_ref().unwrap().sentence_ref.occupation_id, "o3");
        assert_eq!(out[3].as_ref().unwrap().target_text, "he is a");
        assert_eq!(stats.failed, 1);
        // Duplicate source lines are fetched once.
        assert_eq!(cache.len(), 2);
    }

    struct ShortBackend;

    impl Backend for ShortBackend {
        fn translate_batch(&self, lines: &[String]) -> BatchResult {
            Ok(lines.iter().skip(1).map(|l| Ok(l.clone())).collect())
        }
        fn query_count(&self) -> u64 {
            0
        }
    }

    #[test]
    fn misaligned_batch_fails_as_a_whole() {
        let dir = tempfile::tempdir().unwrap();
        let mut cache = TranslationCache::open(&dir.path().join("c.jsonl")).unwrap();
        let units = vec![unit("o1", "a"), unit("o2", "b")];
        let (out, _) = translate_corpus(&units, &ShortBackend, &mut cache, &engine(), &Default::default()).unwrap();
        for o in out {
            assert_eq!(o, Err(UnitError::AlignmentError { expected: 2, got: 1 }));
        }
        assert!(cache.is_empty());
    }
}
