//! Roll-ups of per-occupation bias results: category means, employment
//! weighted sector means split by dominance, corpus summaries, adjective
//! change matrices, pronoun distributions and the perception/statistics
//! correlation.
//!
//! Unbounded results never enter a mean or median; they are counted.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::gendering::GenderLabel;
use crate::lexicon::{ClassificationSystem, Dominance, GenderShare, Registry};
use crate::scoring::{Bias, BiasResult, Direction, ReferenceKind};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryBias {
    pub category_code: String,
    /// Unweighted mean over finite member scores; `None` if all are unbounded.
    pub mean_bias: Option<f64>,
    pub n_finite: usize,
    pub unbounded_count: usize,
}

pub fn category_bias(category_code: &str, members: &[Bias]) -> Result<CategoryBias> {
    if members.is_empty() {
        return Err(Error::EmptyGroup(format!("category {category_code}")));
    }
    let finite: Vec<f64> = members.iter().filter_map(|b| b.finite()).collect();
    let mean_bias = if finite.is_empty() {
        None
    } else {
        Some(finite.iter().sum::<f64>() / finite.len() as f64)
    };
    Ok(CategoryBias {
        category_code: category_code.to_string(),
        mean_bias,
        n_finite: finite.len(),
        unbounded_count: members.len() - finite.len(),
    })
}

/// Category means for every category with at least one scored member.
pub fn category_biases(
    results: &[BiasResult],
    registry: &Registry,
    system: ClassificationSystem,
) -> Vec<CategoryBias> {
    let mut groups: BTreeMap<&str, Vec<Bias>> = BTreeMap::new();
    for r in results {
        let code = registry
            .occupation(&r.occupation_id)
            .and_then(|o| o.category_code(system));
        if let Some(code) = code {
            groups.entry(code).or_default().push(r.bias);
        }
    }
    groups
        .into_iter()
        .map(|(code, members)| category_bias(code, &members).expect("groups are non-empty"))
        .collect()
}

/// Employment weight of each scoreable occupation: its category's head
/// count split evenly over the scoreable occupations mapped to it.
pub fn occupation_weights(registry: &Registry, system: ClassificationSystem) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for category in registry.categories(system).values() {
        let Some(count) = category.employment_count else {
            continue;
        };
        let members: Vec<&str> = category
            .members
            .iter()
            .filter(|id| registry.occupation(id).is_some_and(|o| !o.is_excluded()))
            .map(String::as_str)
            .collect();
        for id in &members {
            out.insert(id.to_string(), count as f64 / members.len() as f64);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorEntry {
    pub sector_id: String,
    pub dominance: Dominance,
    /// Weighted mean over finite scores; `None` if every member is unbounded.
    pub weighted_bias: Option<f64>,
    pub n_occupations: usize,
    pub unbounded_count: usize,
    pub total_weight: f64,
}

/// Weighted mean of finite scores; weights must be positive.
pub fn weighted_mean(items: &[(Bias, f64)]) -> Result<(Option<f64>, usize)> {
    if items.is_empty() {
        return Err(Error::EmptyGroup("no occupations".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut unbounded = 0;
    for &(bias, w) in items {
        match bias {
            Bias::Finite(b) => {
                num += w * b;
                den += w;
            }
            Bias::Unbounded => unbounded += 1,
        }
    }
    Ok(((den > 0.0).then(|| num / den), unbounded))
}

/// Sector means over the occupations of one dominance class. Sectors with
/// no occupation in the class are absent from the map.
pub fn sector_bias(
    results: &[BiasResult],
    registry: &Registry,
    dominance: Dominance,
) -> Result<BTreeMap<String, SectorEntry>> {
    let mut by_reference: BTreeMap<ReferenceKind, ()> = BTreeMap::new();
    for r in results {
        by_reference.insert(r.reference, ());
    }
    if by_reference.len() > 1 {
        return Err(Error::InsufficientData(
            "sector_bias needs results from a single reference".into(),
        ));
    }
    let Some(&reference) = by_reference.keys().next() else {
        return Ok(BTreeMap::new());
    };
    let weights = occupation_weights(registry, reference.grouping_system());

    let mut groups: BTreeMap<&str, Vec<(Bias, f64)>> = BTreeMap::new();
    for r in results.iter().filter(|r| r.share.dominance() == dominance) {
        let occ = registry.occupation(&r.occupation_id).ok_or_else(|| {
            Error::InsufficientData(format!("occupation `{}` not in registry", r.occupation_id))
        })?;
        let weight = *weights.get(&r.occupation_id).ok_or_else(|| {
            Error::InsufficientData(format!(
                "no employment count for occupation `{}`",
                r.occupation_id
            ))
        })?;
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::InvalidWeight {
                occupation: r.occupation_id.clone(),
                weight,
            });
        }
        groups.entry(&occ.sector_id).or_default().push((r.bias, weight));
    }

    let mut out = BTreeMap::new();
    for (sector, items) in groups {
        let (weighted_bias, unbounded_count) = weighted_mean(&items)?;
        out.insert(
            sector.to_string(),
            SectorEntry {
                sector_id: sector.to_string(),
                dominance,
                weighted_bias,
                n_occupations: items.len(),
                unbounded_count,
                total_weight: items
                    .iter()
                    .filter(|(b, _)| !b.is_unbounded())
                    .map(|(_, w)| w)
                    .sum(),
            },
        );
    }
    Ok(out)
}

/// Both dominance classes of one sector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorReport {
    pub sector_id: String,
    pub female_dominated: Option<SectorEntry>,
    pub male_dominated: Option<SectorEntry>,
    pub weights_basis: &'static str,
}

pub const WEIGHTS_BASIS: &str = "category employment count split evenly over member occupations";

pub fn sector_reports(results: &[BiasResult], registry: &Registry) -> Result<Vec<SectorReport>> {
    let mut female = sector_bias(results, registry, Dominance::FemaleDominated)?;
    let mut male = sector_bias(results, registry, Dominance::MaleDominated)?;
    let mut ids: Vec<String> = registry.sectors().iter().map(|s| s.id.clone()).collect();
    for id in female.keys().chain(male.keys()) {
        if !ids.contains(id) {
            ids.push(id.clone());
        }
    }
    Ok(ids
        .into_iter()
        .map(|id| SectorReport {
            female_dominated: female.remove(&id),
            male_dominated: male.remove(&id),
            sector_id: id,
            weights_basis: WEIGHTS_BASIS,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionSplit {
    /// Share of wrong translations using "he" where "she" was optimal.
    pub he_for_she: f64,
    pub she_for_he: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub reference: ReferenceKind,
    pub scoreable: usize,
    pub wrong: usize,
    pub wrong_fraction: Option<f64>,
    pub he_for_she: usize,
    pub she_for_he: usize,
    pub wrong_direction_split: Option<DirectionSplit>,
    pub female_dominated: usize,
    pub male_dominated: usize,
    pub tied: usize,
    pub p_wrong_given_female_dominated: Option<f64>,
    pub p_wrong_given_male_dominated: Option<f64>,
    pub bias_min: Option<f64>,
    pub bias_median: Option<f64>,
    pub bias_max: Option<f64>,
    pub unbounded_count: usize,
}

/// Median; the mean of the middle pair for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 0 {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    })
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn summary_stats(results: &[BiasResult], reference: ReferenceKind) -> SummaryStats {
    let results: Vec<&BiasResult> = results.iter().filter(|r| r.reference == reference).collect();
    let wrong = |r: &&&BiasResult| r.direction != Direction::None;
    let he_for_she = results.iter().filter(|r| r.direction == Direction::AgainstWomen).count();
    let she_for_he = results.iter().filter(|r| r.direction == Direction::AgainstMen).count();
    let n_wrong = results.iter().filter(wrong).count();

    let class = |d: Dominance| results.iter().filter(move |r| r.share.dominance() == d);
    let female_dominated = class(Dominance::FemaleDominated).count();
    let male_dominated = class(Dominance::MaleDominated).count();
    let wrong_female = class(Dominance::FemaleDominated).filter(wrong).count();
    let wrong_male = class(Dominance::MaleDominated).filter(wrong).count();

    let positive: Vec<f64> = results
        .iter()
        .filter_map(|r| r.bias.finite())
        .filter(|&b| b > 0.0)
        .collect();

    SummaryStats {
        reference,
        scoreable: results.len(),
        wrong: n_wrong,
        wrong_fraction: ratio(n_wrong, results.len()),
        he_for_she,
        she_for_he,
        wrong_direction_split: (n_wrong > 0).then(|| DirectionSplit {
            he_for_she: he_for_she as f64 / n_wrong as f64,
            she_for_he: she_for_he as f64 / n_wrong as f64,
        }),
        female_dominated,
        male_dominated,
        tied: results.len() - female_dominated - male_dominated,
        p_wrong_given_female_dominated: ratio(wrong_female, female_dominated),
        p_wrong_given_male_dominated: ratio(wrong_male, male_dominated),
        bias_min: positive.iter().copied().reduce(f64::min),
        bias_median: median(&positive),
        bias_max: positive.iter().copied().reduce(f64::max),
        unbounded_count: results.iter().filter(|r| r.bias.is_unbounded()).count(),
    }
}

/// Pronoun transitions from the plain sentence to its adjective variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChangeMatrix {
    pub adjective_id: String,
    pub she_to_she: usize,
    pub he_to_he: usize,
    pub she_to_he: usize,
    pub he_to_she: usize,
    /// Occupations with a masculine or feminine label in both forms.
    pub paired: usize,
    pub changed_fraction: Option<f64>,
    pub unchanged_fraction: Option<f64>,
    /// Changes, if any, flow mostly from "she" to "he".
    pub mostly_she_to_he: bool,
}

pub fn adjective_change_matrix(
    base: &BTreeMap<String, GenderLabel>,
    with_adjective: &BTreeMap<String, GenderLabel>,
    adjective_id: &str,
) -> ChangeMatrix {
    use GenderLabel::{Feminine as F, Masculine as M};
    let (mut ff, mut mm, mut fm, mut mf) = (0, 0, 0, 0);
    for (occ, &before) in base {
        let Some(&after) = with_adjective.get(occ) else {
            continue;
        };
        match (before, after) {
            (F, F) => ff += 1,
            (M, M) => mm += 1,
            (F, M) => fm += 1,
            (M, F) => mf += 1,
            _ => {}
        }
    }
    let paired = ff + mm + fm + mf;
    ChangeMatrix {
        adjective_id: adjective_id.to_string(),
        she_to_she: ff,
        he_to_he: mm,
        she_to_he: fm,
        he_to_she: mf,
        paired,
        changed_fraction: ratio(fm + mf, paired),
        unchanged_fraction: ratio(ff + mm, paired),
        mostly_she_to_he: fm >= mf,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PronounDistribution {
    pub total: usize,
    pub masculine: f64,
    pub feminine: f64,
    pub other: f64,
}

pub fn pronoun_distribution<I>(labels: I) -> PronounDistribution
where
    I: IntoIterator<Item = GenderLabel>,
{
    let (mut m, mut f, mut o) = (0usize, 0usize, 0usize);
    for label in labels {
        match label {
            GenderLabel::Masculine => m += 1,
            GenderLabel::Feminine => f += 1,
            _ => o += 1,
        }
    }
    let total = m + f + o;
    let frac = |n: usize| ratio(n, total).unwrap_or(0.0);
    PronounDistribution {
        total,
        masculine: frac(m),
        feminine: frac(f),
        other: frac(o),
    }
}

/// Pearson correlation of female shares over occupations present in both maps.
pub fn perception_correlation(
    perception: &BTreeMap<String, GenderShare>,
    census: &BTreeMap<String, GenderShare>,
) -> Result<f64> {
    let pairs: Vec<(f64, f64)> = perception
        .iter()
        .filter_map(|(id, p)| census.get(id).map(|c| (p.female(), c.female())))
        .collect();
    if pairs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} occupations in common, need at least 3",
            pairs.len()
        )));
    }
    let n = pairs.len() as f64;
    let mean_x = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &pairs {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InsufficientData("zero variance".into()));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}
