//! Gender-neutral source sentences built from occupation names.
//!
//! Templates are plain substitution patterns with one `{occ}` placeholder
//! and an optional `{adj}` placeholder, e.g. `ő egy {adj} {occ}`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::csvio::{self, Columns};
use crate::lexicon::{Occupation, Registry};
use crate::{Error, Result};

const OCC: &str = "{occ}";
const ADJ: &str = "{adj}";

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Literal(String),
    Occupation,
    Adjective,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceTemplate {
    pub id: String,
    pub pattern: String,
    /// Sentence starts with an uppercase letter.
    pub capitalized: bool,
    /// The pattern carries the indefinite article "egy".
    pub article_present: bool,
    segments: Vec<Segment>,
}

impl SentenceTemplate {
    pub fn new(id: impl Into<String>, pattern: impl Into<String>) -> Result<Self> {
        let id = id.into();
        let pattern = pattern.into();
        let mismatch = |reason: String| Error::PlaceholderMismatch {
            template: id.clone(),
            reason,
        };
        let occ = pattern.matches(OCC).count();
        if occ != 1 {
            return Err(mismatch(format!("expected exactly one {OCC}, found {occ}")));
        }
        if pattern.matches(ADJ).count() > 1 {
            return Err(mismatch(format!("more than one {ADJ}")));
        }
        let mut segments = Vec::new();
        let mut rest = pattern.as_str();
        while !rest.is_empty() {
            let next = [OCC, ADJ]
                .iter()
                .filter_map(|p| rest.find(p).map(|i| (i, *p)))
                .min();
            match next {
                Some((i, placeholder)) => {
                    if i > 0 {
                        segments.push(Segment::Literal(rest[..i].to_string()));
                    }
                    segments.push(if placeholder == OCC {
                        Segment::Occupation
                    } else {
                        Segment::Adjective
                    });
                    rest = &rest[i + placeholder.len()..];
                }
                None => {
                    segments.push(Segment::Literal(rest.to_string()));
                    rest = "";
                }
            }
        }
        let capitalized = pattern.chars().next().is_some_and(char::is_uppercase);
        let article_present = pattern
            .split_whitespace()
            .any(|w| w.eq_ignore_ascii_case("egy"));
        Ok(Self {
            id,
            pattern,
            capitalized,
            article_present,
            segments,
        })
    }

    pub fn takes_adjective(&self) -> bool {
        self.segments.contains(&Segment::Adjective)
    }

    fn fill(&self, segments: &[Segment], occupation: &str, adjective: Option<&str>) -> String {
        let mut out = String::new();
        for segment in segments {
            match segment {
                Segment::Literal(s) => out.push_str(s),
                Segment::Occupation => out.push_str(occupation),
                Segment::Adjective => out.push_str(adjective.unwrap_or_default()),
            }
        }
        out
    }

    /// Recovers the occupation name from a rendered sentence.
    pub fn extract_occupation<'t>(&self, text: &'t str, adjective: Option<&str>) -> Option<&'t str> {
        let split = self.segments.iter().position(|s| *s == Segment::Occupation)?;
        let prefix = self.fill(&self.segments[..split], "", adjective);
        let suffix = self.fill(&self.segments[split + 1..], "", adjective);
        text.strip_prefix(prefix.as_str())?
            .strip_suffix(suffix.trim_end())
    }
}

/// The sentence variants shipped by default; `base` is the standard form.
pub fn default_templates() -> Vec<SentenceTemplate> {
    [
        ("base", "ő egy {occ}"),
        ("capitalized", "Ő egy {occ}"),
        ("no_article", "ő {occ}"),
        ("adjective", "ő egy {adj} {occ}"),
    ]
    .into_iter()
    .map(|(id, p)| SentenceTemplate::new(id, p).expect("built-in templates are valid"))
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjectiveVariant {
    pub id: String,
    pub text: String,
    pub polarity: Polarity,
    pub intensified: bool,
}

/// "good", "very good", "bad", "very bad".
pub fn default_adjectives() -> Vec<AdjectiveVariant> {
    [
        ("good", "jó", Polarity::Positive, false),
        ("very_good", "nagyon jó", Polarity::Positive, true),
        ("bad", "rossz", Polarity::Negative, false),
        ("very_bad", "nagyon rossz", Polarity::Negative, true),
    ]
    .into_iter()
    .map(|(id, text, polarity, intensified)| AdjectiveVariant {
        id: id.into(),
        text: text.into(),
        polarity,
        intensified,
    })
    .collect()
}

/// Identifies one generated sentence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SentenceRef {
    pub occupation_id: String,
    pub template_id: String,
    pub adjective_id: Option<String>,
}

impl fmt::Display for SentenceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.occupation_id, self.template_id)?;
        if let Some(adj) = &self.adjective_id {
            write!(f, "/{adj}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceUnit {
    #[serde(flatten)]
    pub sentence_ref: SentenceRef,
    pub source_text: String,
}

pub fn render(
    occupation: &Occupation,
    template: &SentenceTemplate,
    adjective: Option<&AdjectiveVariant>,
) -> Result<SentenceUnit> {
    match (template.takes_adjective(), adjective) {
        (true, None) => {
            return Err(Error::PlaceholderMismatch {
                template: template.id.clone(),
                reason: format!("{ADJ} present but no adjective given"),
            })
        }
        (false, Some(adj)) => {
            return Err(Error::PlaceholderMismatch {
                template: template.id.clone(),
                reason: format!("adjective `{}` given but pattern has no {ADJ}", adj.id),
            })
        }
        _ => {}
    }
    let text = template.fill(
        &template.segments,
        &occupation.name_source,
        adjective.map(|a| a.text.as_str()),
    );
    Ok(SentenceUnit {
        sentence_ref: SentenceRef {
            occupation_id: occupation.id.clone(),
            template_id: template.id.clone(),
            adjective_id: adjective.map(|a| a.id.clone()),
        },
        source_text: text.trim_end().to_string(),
    })
}

/// One unit per (occupation, plain template) and per (occupation,
/// adjective template, adjective), ordered by occupation id, template id
/// and adjective id.
pub fn generate_corpus(
    registry: &Registry,
    templates: &[SentenceTemplate],
    adjectives: &[AdjectiveVariant],
) -> Result<Vec<SentenceUnit>> {
    let mut occupations: Vec<&Occupation> = registry.scoreable().collect();
    occupations.sort_by(|a, b| a.id.cmp(&b.id));
    let mut templates: Vec<&SentenceTemplate> = templates.iter().collect();
    templates.sort_by(|a, b| a.id.cmp(&b.id));
    let mut adjectives: Vec<&AdjectiveVariant> = adjectives.iter().collect();
    adjectives.sort_by(|a, b| a.id.cmp(&b.id));

    let mut units = Vec::new();
    for occ in occupations {
        for template in &templates {
            if template.takes_adjective() {
                for adj in &adjectives {
                    units.push(render(occ, template, Some(adj))?);
                }
            } else {
                units.push(render(occ, template, None)?);
            }
        }
    }
    Ok(units)
}

/// The corpus as a document: one sentence per line, LF endings.
pub fn export_corpus(units: &[SentenceUnit]) -> String {
    let mut out = String::new();
    for unit in units {
        out.push_str(&unit.source_text);
        out.push('\n');
    }
    out
}

/// Reads `id,pattern`.
pub fn load_templates(path: &Path) -> Result<Vec<SentenceTemplate>> {
    let mut reader = csvio::open(path)?;
    let headers = reader.headers().map_err(|e| csvio::csv_error(path, e))?.clone();
    let cols = Columns::resolve(path, &headers, &["id", "pattern"])?;
    let mut out: Vec<SentenceTemplate> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csvio::csv_error(path, e))?;
        let id = cols.get(&record, 0);
        if id.is_empty() {
            return Err(cols.malformed(&record, "empty id"));
        }
        if out.iter().any(|t| t.id == id) {
            return Err(cols.malformed(&record, format!("duplicate template `{id}`")));
        }
        // Patterns keep interior spacing; only the outer edges are trimmed.
        out.push(SentenceTemplate::new(id, cols.get(&record, 1))?);
    }
    Ok(out)
}

/// Reads `id,text,polarity,intensified`.
pub fn load_adjectives(path: &Path) -> Result<Vec<AdjectiveVariant>> {
    let mut reader = csvio::open(path)?;
    let headers = reader.headers().map_err(|e| csvio::csv_error(path, e))?.clone();
    let cols = Columns::resolve(path, &headers, &["id", "text", "polarity", "intensified"])?;
    let mut out: Vec<AdjectiveVariant> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csvio::csv_error(path, e))?;
        let id = cols.get(&record, 0);
        let text = cols.get(&record, 1);
        if id.is_empty() || text.is_empty() {
            return Err(cols.malformed(&record, "id and text are required"));
        }
        if out.iter().any(|a| a.id == id) {
            return Err(cols.malformed(&record, format!("duplicate adjective `{id}`")));
        }
        let polarity = match cols.get(&record, 2) {
            "positive" => Polarity::Positive,
            "negative" => Polarity::Negative,
            other => return Err(cols.malformed(&record, format!("unknown polarity `{other}`"))),
        };
        let intensified = match cols.get(&record, 3) {
            "1" | "true" => true,
            "0" | "false" | "" => false,
            other => return Err(cols.malformed(&record, format!("intensified must be 0/1, got `{other}`"))),
        };
        out.push(AdjectiveVariant {
            id: id.into(),
            text: text.into(),
            polarity,
            intensified,
        });
    }
    Ok(out)
}
