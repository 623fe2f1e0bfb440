//! Atomic artifact writes and the provenance manifest.
//!
//! Timestamps live only in `manifest.jsonl` so that data artifacts stay
//! byte-identical across reruns.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.jsonl";

pub fn now() -> String {
    chrono::DateTime::<chrono::Utc>::from(std::time::SystemTime::now())
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("artifact");
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub stage: String,
    pub started_at: String,
    pub finished_at: String,
    /// Input path → sha256 of its contents.
    pub inputs: BTreeMap<String, String>,
    /// Output path, relative to the output directory → sha256.
    pub outputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub stats: serde_json::Value,
}

/// Collects hashes for one stage run and appends the finished entry.
pub struct StageRecorder {
    out_dir: PathBuf,
    entry: ManifestEntry,
}

impl StageRecorder {
    pub fn start(out_dir: &Path, stage: &str) -> Self {
        Self {
            out_dir: out_dir.to_path_buf(),
            entry: ManifestEntry {
                stage: stage.to_string(),
                started_at: now(),
                finished_at: String::new(),
                inputs: BTreeMap::new(),
                outputs: BTreeMap::new(),
                stats: serde_json::Value::Null,
            },
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let hash = sha256_file(path)?;
        self.entry.inputs.insert(self.display(path), hash);
        Ok(())
    }

    /// Writes `contents` atomically to `rel` under the output directory.
    pub fn output(&mut self, rel: &str, contents: &[u8]) -> Result<PathBuf> {
        let path = self.out_dir.join(rel);
        write_atomic(&path, contents)?;
        self.entry
            .outputs
            .insert(rel.to_string(), hex::encode(Sha256::digest(contents)));
        Ok(path)
    }

    /// Records a file some other component wrote.
    pub fn external_output(&mut self, path: &Path) -> Result<()> {
        let hash = sha256_file(path)?;
        self.entry.outputs.insert(self.display(path), hash);
        Ok(())
    }

    pub fn stats(&mut self, stats: serde_json::Value) {
        self.entry.stats = stats;
    }

    pub fn finish(mut self) -> Result<ManifestEntry> {
        self.entry.finished_at = now();
        let path = self.out_dir.join(MANIFEST_FILE);
        fs::create_dir_all(&self.out_dir).map_err(|e| CliError::io(&self.out_dir, e))?;
        let mut line = serde_json::to_string(&self.entry).expect("manifest entry serializes");
        line.push('\n');
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| CliError::io(&path, e))?;
        f.write_all(line.as_bytes()).map_err(|e| CliError::io(&path, e))?;
        Ok(self.entry)
    }

    fn display(&self, path: &Path) -> String {
        path.strip_prefix(&self.out_dir)
            .unwrap_or(path)
            .to_string_lossy()
            .replace('\\', "/")
    }
}

pub fn read_manifest(out_dir: &Path) -> Result<Vec<ManifestEntry>> {
    let path = out_dir.join(MANIFEST_FILE);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(CliError::io(&path, e)),
    };
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| CliError::bad_artifact(&path, e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_and_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        let names: Vec<_> = fs::read_dir(dir.path().join("sub")).unwrap().collect();
        assert_eq!(names.len(), 1);
    }

    #[test]
    fn recorder_appends_hashes() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.csv");
        fs::write(&input, "x\n").unwrap();
        let out = dir.path().join("out");
        for _ in 0..2 {
            let mut rec = StageRecorder::start(&out, "demo");
            rec.input(&input).unwrap();
            rec.output("data/result.csv", b"a,b\n").unwrap();
            rec.finish().unwrap();
        }
        let entries = read_manifest(&out).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(
            entries[0].outputs["data/result.csv"],
            hex::encode(Sha256::digest(b"a,b\n"))
        );
        assert_eq!(entries[0].inputs.values().next().unwrap(), &sha256_file(&input).unwrap());
    }
}
