//! Occupation registry: occupations, FEOR/SOC categories with their gender
//! shares, the FEOR→ISCO→SOC crosswalk and employment sectors.
//!
//! Shares are held as fractions in `[0, 1]`; the category files carry
//! percentages and are converted on load. Suppressed categories (blank
//! percentages, e.g. BLS categories under 50,000 employees) stay in the
//! registry without a share so coverage reports can name what was skipped.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::csvio::{self, Columns};
use crate::scoring::ReferenceKind;
use crate::{Error, Result};

/// Tolerance on `female + male = 1`.
pub const SHARE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassificationSystem {
    #[serde(rename = "FEOR")]
    Feor,
    #[serde(rename = "SOC")]
    Soc,
}

impl fmt::Display for ClassificationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Feor => "FEOR",
            Self::Soc => "SOC",
        })
    }
}

/// Female/male split of an occupation, as fractions summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenderShare {
    female: f64,
    male: f64,
}

/// Which gender holds the strict majority of a share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    FemaleDominated,
    MaleDominated,
    Tied,
}

impl fmt::Display for Dominance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FemaleDominated => "female_dominated",
            Self::MaleDominated => "male_dominated",
            Self::Tied => "tied",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShareError {
    #[error("fraction {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("female {female} + male {male} does not sum to 1")]
    SumViolation { female: f64, male: f64 },
}

impl GenderShare {
    pub fn new(female: f64, male: f64) -> Result<Self, ShareError> {
        for v in [female, male] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ShareError::OutOfRange(v));
            }
        }
        if (female + male - 1.0).abs() > SHARE_TOLERANCE {
            return Err(ShareError::SumViolation { female, male });
        }
        Ok(Self { female, male })
    }

    /// Share with `male = 1 - female`.
    pub fn from_female(female: f64) -> Result<Self, ShareError> {
        if !(0.0..=1.0).contains(&female) {
            return Err(ShareError::OutOfRange(female));
        }
        Ok(Self {
            female,
            male: 1.0 - female,
        })
    }

    pub fn female(&self) -> f64 {
        self.female
    }

    pub fn male(&self) -> f64 {
        self.male
    }

    /// The mirrored share (female and male exchanged).
    pub fn swapped(&self) -> Self {
        Self {
            female: self.male,
            male: self.female,
        }
    }

    pub fn dominance(&self) -> Dominance {
        if self.female > self.male {
            Dominance::FemaleDominated
        } else if self.male > self.female {
            Dominance::MaleDominated
        } else {
            Dominance::Tied
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExclusionKind {
    GenderMarkedName,
    ReligiousOccupation,
    NotWellKnown,
    Other,
}

impl ExclusionKind {
    fn parse(s: &str) -> Option<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Some(match norm.as_str() {
            "gendermarkedname" => Self::GenderMarkedName,
            "religiousoccupation" => Self::ReligiousOccupation,
            "notwellknown" => Self::NotWellKnown,
            "other" => Self::Other,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusionRule {
    pub kind: ExclusionKind,
    pub note: String,
}

/// How an occupation's SOC category was determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SocLink {
    /// Named on the occupation row itself.
    Explicit,
    /// The unique official crosswalk mapping of its FEOR category.
    Crosswalk,
    /// A manually corrected crosswalk mapping.
    Override,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Occupation {
    pub id: String,
    pub name_source: String,
    pub name_gloss: Option<String>,
    pub feor_code: String,
    pub soc_code: Option<String>,
    pub soc_link: Option<SocLink>,
    pub isco_code: Option<String>,
    pub sector_id: String,
    pub excluded: Option<ExclusionRule>,
}

impl Occupation {
    pub fn is_excluded(&self) -> bool {
        self.excluded.is_some()
    }

    /// Category code of this occupation in `system`, if linked.
    pub fn category_code(&self, system: ClassificationSystem) -> Option<&str> {
        match system {
            ClassificationSystem::Feor => Some(&self.feor_code),
            ClassificationSystem::Soc => self.soc_code.as_deref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationCategory {
    pub code: String,
    pub system: ClassificationSystem,
    pub name: String,
    /// Percentages as published, converted to fractions; `None` when suppressed.
    pub reported: Option<(f64, f64)>,
    pub employment_count: Option<i64>,
    /// Ids of occupations mapped to this category, in registry order.
    pub members: Vec<String>,
}

impl OccupationCategory {
    /// The validated share; `None` for suppressed or inconsistent rows.
    pub fn share(&self) -> Option<GenderShare> {
        self.reported
            .and_then(|(female, male)| GenderShare::new(female, male).ok())
    }

    pub fn is_suppressed(&self) -> bool {
        self.reported.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrosswalkEntry {
    pub feor_code: String,
    pub isco_code: Option<String>,
    pub soc_code: String,
    pub r#override: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sector {
    pub id: String,
    pub name: String,
}

/// Input files of a registry.
#[derive(Debug, Clone)]
pub struct RegistryFiles {
    pub occupations: PathBuf,
    pub categories_feor: PathBuf,
    pub categories_soc: PathBuf,
    pub crosswalk: PathBuf,
    /// When given, every occupation's sector must be listed here.
    pub sectors: Option<PathBuf>,
}

/// The loaded, immutable occupation registry.
#[derive(Debug, Clone, Serialize)]
pub struct Registry {
    occupations: Vec<Occupation>,
    feor: BTreeMap<String, OccupationCategory>,
    soc: BTreeMap<String, OccupationCategory>,
    crosswalk: Vec<CrosswalkEntry>,
    sectors: Vec<Sector>,
    /// Occupations whose FEOR category maps to several SOC categories
    /// with no explicit choice on the occupation row.
    ambiguous_soc: BTreeMap<String, Vec<String>>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Registry {
    pub fn occupations(&self) -> &[Occupation] {
        &self.occupations
    }

    /// Occupations that enter sentence generation and scoring.
    pub fn scoreable(&self) -> impl Iterator<Item = &Occupation> {
        self.occupations.iter().filter(|o| !o.is_excluded())
    }

    pub fn occupation(&self, id: &str) -> Option<&Occupation> {
        self.index.get(id).map(|&i| &self.occupations[i])
    }

    pub fn categories(
        &self,
        system: ClassificationSystem,
    ) -> &BTreeMap<String, OccupationCategory> {
        match system {
            ClassificationSystem::Feor => &self.feor,
            ClassificationSystem::Soc => &self.soc,
        }
    }

    pub fn category(&self, system: ClassificationSystem, code: &str) -> Option<&OccupationCategory> {
        self.categories(system).get(code)
    }

    /// The category an occupation belongs to in `system`.
    pub fn category_of(
        &self,
        occupation: &Occupation,
        system: ClassificationSystem,
    ) -> Option<&OccupationCategory> {
        occupation
            .category_code(system)
            .and_then(|code| self.category(system, code))
    }

    pub fn crosswalk(&self) -> &[CrosswalkEntry] {
        &self.crosswalk
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// Deterministic JSON rendering of the registry.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Loads and cross-links all registry files.
pub fn load_registry(files: &RegistryFiles) -> Result<Registry> {
    let feor = load_categories(&files.categories_feor, ClassificationSystem::Feor)?;
    let soc = load_categories(&files.categories_soc, ClassificationSystem::Soc)?;
    let crosswalk = load_crosswalk(&files.crosswalk)?;
    let sectors = match &files.sectors {
        Some(path) => Some(load_sectors(path)?),
        None => None,
    };
    let rows = load_occupation_rows(&files.occupations)?;
    link(rows, feor, soc, crosswalk, sectors, &files.occupations)
}

struct OccupationRow {
    line: u64,
    occupation: Occupation,
}

fn load_occupation_rows(path: &Path) -> Result<Vec<OccupationRow>> {
    const COLS: [&str; 9] = [
        "id",
        "name_source",
        "name_gloss",
        "feor_code",
        "soc_code",
        "isco_code",
        "sector_id",
        "excluded_kind",
        "excluded_note",
    ];
    let mut reader = csvio::open(path)?;
    let headers = reader.headers().map_err(|e| csvio::csv_error(path, e))?.clone();
    let cols = Columns::resolve(path, &headers, &COLS)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csvio::csv_error(path, e))?;
        let id = cols.get(&record, 0);
        let name_source = cols.get(&record, 1);
        let feor_code = cols.get(&record, 3);
        let sector_id = cols.get(&record, 6);
        if id.is_empty() {
            return Err(cols.malformed(&record, "empty id"));
        }
        if name_source.is_empty() {
            return Err(cols.malformed(&record, "empty name_source"));
        }
        if name_source.chars().any(char::is_control) {
            return Err(cols.malformed(&record, "control character in name_source"));
        }
        if feor_code.is_empty() {
            return Err(cols.malformed(&record, "empty feor_code"));
        }
        if sector_id.is_empty() {
            return Err(cols.malformed(&record, "empty sector_id"));
        }
        let kind = cols.get(&record, 7);
        let note = cols.get(&record, 8);
        let excluded = match (kind.is_empty(), note.is_empty()) {
            (true, true) => None,
            (true, false) => {
                return Err(cols.malformed(&record, "excluded_note without excluded_kind"))
            }
            (false, _) => {
                let kind = ExclusionKind::parse(kind).ok_or_else(|| {
                    cols.malformed(&record, format!("unknown exclusion kind `{kind}`"))
                })?;
                Some(ExclusionRule {
                    kind,
                    note: note.to_string(),
                })
            }
        };
        rows.push(OccupationRow {
            line: csvio::line_of(&record),
            occupation: Occupation {
                id: id.to_string(),
                name_source: name_source.to_string(),
                name_gloss: csvio::optional(cols.get(&record, 2)),
                feor_code: feor_code.to_string(),
                soc_code: csvio::optional(cols.get(&record, 4)),
                soc_link: None,
                isco_code: csvio::optional(cols.get(&record, 5)),
                sector_id: sector_id.to_string(),
                excluded,
            },
        });
    }
    Ok(rows)
}

fn parse_pct(cols: &Columns, record: &csv::StringRecord, field: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| cols.malformed(record, format!("`{field}` is not a number")))?;
    if !(0.0..=100.0).contains(&v) {
        return Err(cols.malformed(record, format!("percentage {v} outside 0..100")));
    }
    Ok(v / 100.0)
}

/// Reads a `code,name,female_pct,male_pct,employment_count` file.
pub fn load_categories(
    path: &Path,
    system: ClassificationSystem,
) -> Result<BTreeMap<String, OccupationCategory>> {
    const COLS: [&str; 5] = ["code", "name", "female_pct", "male_pct", "employment_count"];
    let mut reader = csvio::open(path)?;
    let headers = reader.headers().map_err(|e| csvio::csv_error(path, e))?.clone();
    let cols = Columns::resolve(path, &headers, &COLS)?;
    let mut out = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csvio::csv_error(path, e))?;
        let code = cols.get(&record, 0);
        if code.is_empty() {
            return Err(cols.malformed(&record, "empty code"));
        }
        let (f, m) = (cols.get(&record, 2), cols.get(&record, 3));
        let reported = match (f.is_empty(), m.is_empty()) {
            (true, true) => None,
            (false, false) => Some((
                parse_pct(&cols, &record, f)?,
                parse_pct(&cols, &record, m)?,
            )),
            _ => {
                return Err(cols.malformed(
                    &record,
                    "female_pct and male_pct must both be present or both blank",
                ))
            }
        };
        let count = cols.get(&record, 4);
        let employment_count = if count.is_empty() {
            None
        } else {
            Some(count.parse::<i64>().map_err(|_| {
                cols.malformed(&record, format!("employment_count `{count}` is not an integer"))
            })?)
        };
        let category = OccupationCategory {
            code: code.to_string(),
            system,
            name: cols.get(&record, 1).to_string(),
            reported,
            employment_count,
            members: Vec::new(),
        };
        if out.insert(code.to_string(), category).is_some() {
            return Err(cols.malformed(&record, format!("duplicate {system} code `{code}`")));
        }
    }
    Ok(out)
}

/// Reads a `feor_code,isco_code,soc_code,override` file.
pub fn load_crosswalk(path: &Path) -> Result<Vec<CrosswalkEntry>> {
    const COLS: [&str; 4] = ["feor_code", "isco_code", "soc_code", "override"];
    let mut reader = csvio::open(path)?;
    let headers = reader.headers().map_err(|e| csvio::csv_error(path, e))?.clone();
    let cols = Columns::resolve(path, &headers, &COLS)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csvio::csv_error(path, e))?;
        let feor_code = cols.get(&record, 0);
        let soc_code = cols.get(&record, 2);
        if feor_code.is_empty() || soc_code.is_empty() {
            return Err(cols.malformed(&record, "feor_code and soc_code are required"));
        }
        let r#override = match cols.get(&record, 3) {
            "0" | "" => false,
            "1" => true,
            other => {
                return Err(cols.malformed(&record, format!("override must be 0 or 1, got `{other}`")))
            }
        };
        if !seen.insert((feor_code.to_string(), soc_code.to_string())) {
            return Err(cols.malformed(
                &record,
                format!("duplicate crosswalk pair ({feor_code}, {soc_code})"),
            ));
        }
        out.push(CrosswalkEntry {
            feor_code: feor_code.to_string(),
            isco_code: csvio::optional(cols.get(&record, 1)),
            soc_code: soc_code.to_string(),
            r#override,
        });
    }
    Ok(out)
}

/// Reads a `sector_id,name` file.
pub fn load_sectors(path: &Path) -> Result<Vec<Sector>> {
    let mut reader = csvio::open(path)?;
    let headers = reader.headers().map_err(|e| csvio::csv_error(path, e))?.clone();
    let cols = Columns::resolve(path, &headers, &["sector_id", "name"])?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csvio::csv_error(path, e))?;
        let id = cols.get(&record, 0);
        if id.is_empty() {
            return Err(cols.malformed(&record, "empty sector_id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(cols.malformed(&record, format!("duplicate sector `{id}`")));
        }
        out.push(Sector {
            id: id.to_string(),
            name: cols.get(&record, 1).to_string(),
        });
    }
    Ok(out)
}

fn link(
    rows: Vec<OccupationRow>,
    mut feor: BTreeMap<String, OccupationCategory>,
    mut soc: BTreeMap<String, OccupationCategory>,
    crosswalk: Vec<CrosswalkEntry>,
    sectors: Option<Vec<Sector>>,
    path: &Path,
) -> Result<Registry> {
    let mut by_feor: HashMap<&str, Vec<&CrosswalkEntry>> = HashMap::new();
    for entry in &crosswalk {
        by_feor.entry(entry.feor_code.as_str()).or_default().push(entry);
    }
    let sector_ids: Option<BTreeSet<&str>> = sectors
        .as_ref()
        .map(|s| s.iter().map(|s| s.id.as_str()).collect());

    let mut index = HashMap::new();
    let mut names = BTreeSet::new();
    let mut ambiguous_soc = BTreeMap::new();
    let mut occupations = Vec::with_capacity(rows.len());

    for OccupationRow { line, mut occupation } in rows {
        if index.contains_key(&occupation.id) {
            return Err(Error::DuplicateOccupation {
                path: path.to_path_buf(),
                line,
                name: occupation.id,
            });
        }
        if !names.insert(occupation.name_source.clone()) {
            return Err(Error::DuplicateOccupation {
                path: path.to_path_buf(),
                line,
                name: occupation.name_source,
            });
        }
        if !feor.contains_key(&occupation.feor_code) {
            return Err(Error::MissingCategory {
                path: path.to_path_buf(),
                line,
                occupation: occupation.id,
                system: ClassificationSystem::Feor,
                code: occupation.feor_code,
            });
        }
        if let Some(ids) = &sector_ids {
            if !ids.contains(occupation.sector_id.as_str()) {
                return Err(Error::UnknownSector {
                    path: path.to_path_buf(),
                    line,
                    occupation: occupation.id,
                    sector: occupation.sector_id,
                });
            }
        }

        let candidates = by_feor
            .get(occupation.feor_code.as_str())
            .map(|entries| {
                let overrides: Vec<&CrosswalkEntry> =
                    entries.iter().copied().filter(|e| e.r#override).collect();
                if overrides.is_empty() {
                    entries.clone()
                } else {
                    overrides
                }
            })
            .unwrap_or_default();

        if let Some(code) = &occupation.soc_code {
            if !soc.contains_key(code) {
                return Err(Error::MissingCategory {
                    path: path.to_path_buf(),
                    line,
                    occupation: occupation.id,
                    system: ClassificationSystem::Soc,
                    code: code.clone(),
                });
            }
            occupation.soc_link = Some(SocLink::Explicit);
            if occupation.isco_code.is_none() {
                occupation.isco_code = by_feor
                    .get(occupation.feor_code.as_str())
                    .and_then(|es| es.iter().find(|e| &e.soc_code == code))
                    .and_then(|e| e.isco_code.clone());
            }
        } else {
            // Dangling crosswalk targets are reported by validation, not linked.
            let linkable: Vec<&CrosswalkEntry> = candidates
                .into_iter()
                .filter(|e| soc.contains_key(&e.soc_code))
                .collect();
            match linkable.as_slice() {
                [] => {}
                [entry] => {
                    occupation.soc_code = Some(entry.soc_code.clone());
                    occupation.soc_link = Some(if entry.r#override {
                        SocLink::Override
                    } else {
                        SocLink::Crosswalk
                    });
                    if occupation.isco_code.is_none() {
                        occupation.isco_code = entry.isco_code.clone();
                    }
                }
                many => {
                    ambiguous_soc.insert(
                        occupation.id.clone(),
                        many.iter().map(|e| e.soc_code.clone()).collect(),
                    );
                }
            }
        }

        if let Some(cat) = feor.get_mut(&occupation.feor_code) {
            cat.members.push(occupation.id.clone());
        }
        if let Some(code) = &occupation.soc_code {
            if let Some(cat) = soc.get_mut(code) {
                cat.members.push(occupation.id.clone());
            }
        }
        index.insert(occupation.id.clone(), occupations.len());
        occupations.push(occupation);
    }

    Ok(Registry {
        occupations,
        feor,
        soc,
        crosswalk,
        sectors: sectors.unwrap_or_default(),
        ambiguous_soc,
        index,
    })
}

/// Why an occupation has no value under a reference point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmissionReason {
    /// No category in the reference's classification system.
    NoCategory,
    /// Category present but its share is suppressed.
    Suppressed,
    /// Category share fails validation.
    InvalidShare,
    /// No survey tally for the occupation.
    NotSurveyed,
}

impl fmt::Display for OmissionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NoCategory => "no_category",
            Self::Suppressed => "suppressed",
            Self::InvalidShare => "invalid_share",
            Self::NotSurveyed => "not_surveyed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Omission {
    pub occupation_id: String,
    pub reason: OmissionReason,
}

/// Per-occupation reference shares plus what could not be covered.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceMap {
    pub kind: ReferenceKind,
    pub shares: BTreeMap<String, GenderShare>,
    pub omitted: Vec<Omission>,
}

impl ReferenceMap {
    pub fn get(&self, occupation_id: &str) -> Option<GenderShare> {
        self.shares.get(occupation_id).copied()
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }
}

/// Employment-statistics shares for every non-excluded occupation.
pub fn resolve_reference(registry: &Registry, kind: ReferenceKind) -> Result<ReferenceMap> {
    let system = kind.system().ok_or(Error::NotStatistical(kind))?;
    let mut shares = BTreeMap::new();
    let mut omitted = Vec::new();
    for occ in registry.scoreable() {
        let reason = match registry.category_of(occ, system) {
            None => Some(OmissionReason::NoCategory),
            Some(cat) if cat.is_suppressed() => Some(OmissionReason::Suppressed),
            Some(cat) => match cat.share() {
                Some(share) => {
                    shares.insert(occ.id.clone(), share);
                    None
                }
                None => Some(OmissionReason::InvalidShare),
            },
        };
        if let Some(reason) = reason {
            omitted.push(Omission {
                occupation_id: occ.id.clone(),
                reason,
            });
        }
    }
    Ok(ReferenceMap {
        kind,
        shares,
        omitted,
    })
}

/// A data-quality finding; none of these abort loading.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum Issue {
    /// A FEOR category used by a scoreable occupation has no share.
    MissingShare {
        system: ClassificationSystem,
        code: String,
    },
    /// A category with a share used by a scoreable occupation lacks a head count.
    MissingEmploymentCount {
        system: ClassificationSystem,
        code: String,
    },
    DanglingCrosswalk {
        feor_code: String,
        soc_code: String,
    },
    ShareSumViolation {
        system: ClassificationSystem,
        code: String,
        female: f64,
        male: f64,
    },
    NegativeCount {
        system: ClassificationSystem,
        code: String,
        count: i64,
    },
    AmbiguousCrosswalk {
        occupation_id: String,
        candidates: Vec<String>,
    },
}

/// Lists data-quality issues; an empty list means the registry is clean.
pub fn validate_registry(registry: &Registry) -> Vec<Issue> {
    let mut issues = Vec::new();
    let in_use = |cat: &OccupationCategory| {
        cat.members
            .iter()
            .filter_map(|id| registry.occupation(id))
            .any(|o| !o.is_excluded())
    };
    for system in [ClassificationSystem::Feor, ClassificationSystem::Soc] {
        for cat in registry.categories(system).values() {
            if let Some((female, male)) = cat.reported {
                if (female + male - 1.0).abs() > SHARE_TOLERANCE {
                    issues.push(Issue::ShareSumViolation {
                        system,
                        code: cat.code.clone(),
                        female,
                        male,
                    });
                }
            }
            if let Some(count) = cat.employment_count.filter(|&c| c < 0) {
                issues.push(Issue::NegativeCount {
                    system,
                    code: cat.code.clone(),
                    count,
                });
            }
            if !in_use(cat) {
                continue;
            }
            if system == ClassificationSystem::Feor && cat.reported.is_none() {
                issues.push(Issue::MissingShare {
                    system,
                    code: cat.code.clone(),
                });
            }
            if cat.reported.is_some() && cat.employment_count.is_none() {
                issues.push(Issue::MissingEmploymentCount {
                    system,
                    code: cat.code.clone(),
                });
            }
        }
    }
    for entry in &registry.crosswalk {
        if !registry.feor.contains_key(&entry.feor_code) || !registry.soc.contains_key(&entry.soc_code)
        {
            issues.push(Issue::DanglingCrosswalk {
                feor_code: entry.feor_code.clone(),
                soc_code: entry.soc_code.clone(),
            });
        }
    }
    for (occupation_id, candidates) in &registry.ambiguous_soc {
        issues.push(Issue::AmbiguousCrosswalk {
            occupation_id: occupation_id.clone(),
            candidates: candidates.clone(),
        });
    }
    issues
}
