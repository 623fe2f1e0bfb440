//! Rule-based pronoun classification of translated sentences.
//!
//! Sentences are split into word tokens (letters, digits and apostrophes),
//! lowercased, and looked up in a pronoun lexicon. Lexicon entries are
//! either subject pronouns or secondary forms (object, reflexive,
//! possessive). Secondary forms are only consulted when the sentence has no
//! subject pronoun.
//!
//! Within a tier:
//! * masculine and feminine tokens together give [`GenderLabel::Ambiguous`];
//! * a pronoun in first-token position decides between a gendered and a
//!   neutral reading ("it is said he ..." is Neutral, "he says it ..." is
//!   Masculine);
//! * otherwise any gendered token wins over neutral ones.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::csvio::{self, Columns};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenderLabel {
    Masculine,
    Feminine,
    Neutral,
    Ambiguous,
    Undetected,
}

impl GenderLabel {
    pub const ALL: [GenderLabel; 5] = [
        Self::Masculine,
        Self::Feminine,
        Self::Neutral,
        Self::Ambiguous,
        Self::Undetected,
    ];

    /// Only masculine and feminine translations enter bias scoring.
    pub fn is_scoreable(self) -> bool {
        matches!(self, Self::Masculine | Self::Feminine)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Masculine => "masculine",
            Self::Feminine => "feminine",
            Self::Neutral => "neutral",
            Self::Ambiguous => "ambiguous",
            Self::Undetected => "undetected",
        }
    }
}

impl fmt::Display for GenderLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GenderLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GenderLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown label `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PronounGender {
    Masculine,
    Feminine,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PronounRole {
    Subject,
    Secondary,
}

/// Token → (gender, role) table.
#[derive(Debug, Clone)]
pub struct PronounLexicon {
    entries: HashMap<String, (PronounGender, PronounRole)>,
}

const ENGLISH: &[(&str, PronounGender, PronounRole)] = {
    use PronounGender::*;
    use PronounRole::*;
    &[
        ("he", Masculine, Subject),
        ("he's", Masculine, Subject),
        ("he'd", Masculine, Subject),
        ("he'll", Masculine, Subject),
        ("she", Feminine, Subject),
        ("she's", Feminine, Subject),
        ("she'd", Feminine, Subject),
        ("she'll", Feminine, Subject),
        ("it", Neutral, Subject),
        ("it's", Neutral, Subject),
        ("they", Neutral, Subject),
        ("they're", Neutral, Subject),
        ("him", Masculine, Secondary),
        ("himself", Masculine, Secondary),
        ("his", Masculine, Secondary),
        ("her", Feminine, Secondary),
        ("herself", Feminine, Secondary),
        ("hers", Feminine, Secondary),
        ("them", Neutral, Secondary),
        ("themselves", Neutral, Secondary),
        ("its", Neutral, Secondary),
        ("their", Neutral, Secondary),
        ("theirs", Neutral, Secondary),
    ]
};

impl Default for PronounLexicon {
    /// The built-in English lexicon.
    fn default() -> Self {
        Self {
            entries: ENGLISH
                .iter()
                .map(|&(t, g, r)| (t.to_string(), (g, r)))
                .collect(),
        }
    }
}

impl PronounLexicon {
    pub fn insert(&mut self, token: &str, gender: PronounGender, role: PronounRole) {
        self.entries
            .insert(normalize(token), (gender, role));
    }

    pub fn lookup(&self, token: &str) -> Option<(PronounGender, PronounRole)> {
        self.entries.get(token).copied()
    }

    /// Reads `token,gender[,role]` with gender in {M,F,N} and role in
    /// {subject, object, reflexive, possessive}; role defaults to subject.
    pub fn load(path: &Path) -> Result<Self> {
        let mut reader = csvio::open_flexible(path)?;
        let headers = reader.headers().map_err(|e| csvio::csv_error(path, e))?.clone();
        let cols = Columns::resolve(path, &headers, &["token", "gender"])?;
        let role_col = headers.iter().position(|h| h.trim() == "role");
        let mut entries = HashMap::new();
        for record in reader.records() {
            let record = record.map_err(|e| csvio::csv_error(path, e))?;
            let token = normalize(cols.get(&record, 0));
            if token.is_empty() {
                return Err(cols.malformed(&record, "empty token"));
            }
            let gender = match cols.get(&record, 1) {
                "M" | "m" => PronounGender::Masculine,
                "F" | "f" => PronounGender::Feminine,
                "N" | "n" => PronounGender::Neutral,
                other => return Err(cols.malformed(&record, format!("gender `{other}` not in M/F/N"))),
            };
            let role = match role_col.and_then(|i| record.get(i)).map(str::trim) {
                None | Some("") | Some("subject") => PronounRole::Subject,
                Some("object") | Some("reflexive") | Some("possessive") => PronounRole::Secondary,
                Some(other) => return Err(cols.malformed(&record, format!("unknown role `{other}`"))),
            };
            entries.insert(token, (gender, role));
        }
        Ok(Self { entries })
    }
}

fn normalize(token: &str) -> String {
    token.trim().replace('\u{2019}', "'").to_lowercase()
}

/// Lowercased word tokens; apostrophes stay inside words.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.replace('\u{2019}', "'").to_lowercase();
    lowered
        .split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .map(|t| t.trim_matches('\''))
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

#[derive(Default)]
struct Tier {
    masculine: bool,
    feminine: bool,
    neutral: bool,
    first: Option<PronounGender>,
}

impl Tier {
    fn decide(&self) -> Option<GenderLabel> {
        if self.masculine && self.feminine {
            return Some(GenderLabel::Ambiguous);
        }
        if let Some(first) = self.first {
            return Some(label_of(first));
        }
        if self.masculine {
            Some(GenderLabel::Masculine)
        } else if self.feminine {
            Some(GenderLabel::Feminine)
        } else if self.neutral {
            Some(GenderLabel::Neutral)
        } else {
            None
        }
    }
}

fn label_of(gender: PronounGender) -> GenderLabel {
    match gender {
        PronounGender::Masculine => GenderLabel::Masculine,
        PronounGender::Feminine => GenderLabel::Feminine,
        PronounGender::Neutral => GenderLabel::Neutral,
    }
}

/// Classifier over one target language.
#[derive(Debug, Clone, Default)]
pub struct Classifier {
    lexicon: PronounLexicon,
}

impl Classifier {
    pub fn new(lexicon: PronounLexicon) -> Self {
        Self { lexicon }
    }

    pub fn classify(&self, target_text: &str) -> GenderLabel {
        let mut subject = Tier::default();
        let mut secondary = Tier::default();
        for (i, token) in tokenize(target_text).iter().enumerate() {
            let Some((gender, role)) = self.lexicon.lookup(token) else {
                continue;
            };
            let tier = match role {
                PronounRole::Subject => &mut subject,
                PronounRole::Secondary => &mut secondary,
            };
            match gender {
                PronounGender::Masculine => tier.masculine = true,
                PronounGender::Feminine => tier.feminine = true,
                PronounGender::Neutral => tier.neutral = true,
            }
            if i == 0 {
                tier.first = Some(gender);
            }
        }
        subject
            .decide()
            .or_else(|| secondary.decide())
            .unwrap_or(GenderLabel::Undetected)
    }

    /// Labels every record and tallies the labels.
    pub fn classify_corpus<'a, K, I>(&self, records: I) -> (BTreeMap<K, GenderLabel>, LabelCounts)
    where
        K: Ord + Clone + 'a,
        I: IntoIterator<Item = (&'a K, &'a str)>,
    {
        let mut labels = BTreeMap::new();
        let mut counts = LabelCounts::default();
        for (key, text) in records {
            let label = self.classify(text);
            counts.add(label);
            labels.insert(key.clone(), label);
        }
        (labels, counts)
    }
}

/// Classifies with the built-in English lexicon.
pub fn classify(target_text: &str) -> GenderLabel {
    thread_local! {
        static DEFAULT: Classifier = Classifier::default();
    }
    DEFAULT.with(|c| c.classify(target_text))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub masculine: usize,
    pub feminine: usize,
    pub neutral: usize,
    pub ambiguous: usize,
    pub undetected: usize,
}

impl LabelCounts {
    pub fn add(&mut self, label: GenderLabel) {
        *self.slot(label) += 1;
    }

    fn slot(&mut self, label: GenderLabel) -> &mut usize {
        match label {
            GenderLabel::Masculine => &mut self.masculine,
            GenderLabel::Feminine => &mut self.feminine,
            GenderLabel::Neutral => &mut self.neutral,
            GenderLabel::Ambiguous => &mut self.ambiguous,
            GenderLabel::Undetected => &mut self.undetected,
        }
    }

    pub fn total(&self) -> usize {
        self.masculine + self.feminine + self.neutral + self.ambiguous + self.undetected
    }

    pub fn as_tuple(&self) -> (usize, usize, usize, usize, usize) {
        (
            self.masculine,
            self.feminine,
            self.neutral,
            self.ambiguous,
            self.undetected,
        )
    }
}

impl FromIterator<GenderLabel> for LabelCounts {
    fn from_iter<T: IntoIterator<Item = GenderLabel>>(iter: T) -> Self {
        let mut counts = Self::default();
        for label in iter {
            counts.add(label);
        }
        counts
    }
}
