//! Likert-scale perception survey scoring.
//!
//! Each occupation is rated from 1 ("very masculine") to 6 ("very
//! feminine"). Responses are re-weighted by their distance from the scale
//! midpoint (1 and 6 count 2.5, 2 and 5 count 1.5, 3 and 4 count 0.5); the
//! masculinity score is the weighted mass of responses 1-3 over the total
//! weighted mass, the femininity score the mass of 4-6.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;

use crate::csvio::{self, Columns};
use crate::lexicon::GenderShare;
use crate::{Error, Result};

/// Response counts for answers 1 through 6.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LikertTally {
    pub occupation_id: String,
    pub counts: [u64; 6],
}

impl LikertTally {
    pub fn new(occupation_id: impl Into<String>, counts: [u64; 6]) -> Self {
        Self {
            occupation_id: occupation_id.into(),
            counts,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerceptionScore {
    pub masculinity: f64,
    pub femininity: f64,
}

impl PerceptionScore {
    /// Integer percentages, rounded half-up.
    pub fn display_percent(&self) -> (u32, u32) {
        (percent(self.masculinity), percent(self.femininity))
    }
}

fn percent(fraction: f64) -> u32 {
    crate::scoring::round_half_up(fraction * 100.0, 0) as u32
}

/// Weight of a single Likert response.
pub fn likert_weight(response: i64) -> Result<f64> {
    match response {
        1 | 6 => Ok(2.5),
        2 | 5 => Ok(1.5),
        3 | 4 => Ok(0.5),
        other => Err(Error::OutOfRange(other)),
    }
}

const WEIGHTS: [f64; 6] = [2.5, 1.5, 0.5, 0.5, 1.5, 2.5];

pub fn perception_scores(tally: &LikertTally) -> Result<PerceptionScore> {
    if tally.total() == 0 {
        return Err(Error::EmptyTally(tally.occupation_id.clone()));
    }
    let mass: Vec<f64> = tally
        .counts
        .iter()
        .zip(WEIGHTS)
        .map(|(&c, w)| c as f64 * w)
        .collect();
    let masculine = mass[0] + mass[1] + mass[2];
    // Summed outside-in on both sides so mirrored tallies swap exactly.
    let feminine = mass[5] + mass[4] + mass[3];
    let total = masculine + feminine;
    Ok(PerceptionScore {
        masculinity: masculine / total,
        femininity: feminine / total,
    })
}

/// Perception scores as shares: femininity is the female share.
pub fn perception_reference(tallies: &[LikertTally]) -> Result<BTreeMap<String, GenderShare>> {
    let mut out = BTreeMap::new();
    for tally in tallies {
        let score = perception_scores(tally)?;
        // Both parts come from the same total, so they sum to one up to rounding.
        let share = GenderShare::new(score.femininity, score.masculinity)
            .expect("perception scores always form a valid share");
        out.insert(tally.occupation_id.clone(), share);
    }
    Ok(out)
}

/// Reads `occupation_id,c1,c2,c3,c4,c5,c6`.
pub fn load_survey(path: &Path) -> Result<Vec<LikertTally>> {
    const COLS: [&str; 7] = ["occupation_id", "c1", "c2", "c3", "c4", "c5", "c6"];
    let mut reader = csvio::open(path)?;
    let headers = reader.headers().map_err(|e| csvio::csv_error(path, e))?.clone();
    let cols = Columns::resolve(path, &headers, &COLS)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csvio::csv_error(path, e))?;
        let id = cols.get(&record, 0);
        if id.is_empty() {
            return Err(cols.malformed(&record, "empty occupation_id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(cols.malformed(&record, format!("duplicate tally for `{id}`")));
        }
        let mut counts = [0u64; 6];
        for (i, slot) in counts.iter_mut().enumerate() {
            let raw = cols.get(&record, i + 1);
            *slot = raw.parse().map_err(|_| {
                cols.malformed(&record, format!("c{} `{raw}` is not a non-negative integer", i + 1))
            })?;
        }
        let tally = LikertTally::new(id, counts);
        if tally.total() == 0 {
            return Err(cols.malformed(&record, format!("tally for `{id}` has no responses")));
        }
        out.push(tally);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn weights() {
        assert_eq!(likert_weight(1).unwrap(), 2.5);
        assert_eq!(likert_weight(6).unwrap(), 2.5);
        assert_eq!(likert_weight(2).unwrap(), 1.5);
        assert_eq!(likert_weight(5).unwrap(), 1.5);
        assert_eq!(likert_weight(4).unwrap(), 0.5);
        assert!(matches!(likert_weight(7), Err(Error::OutOfRange(7))));
        assert!(matches!(likert_weight(0), Err(Error::OutOfRange(0))));
    }

    #[test]
    fn carpenter() {
        let s = perception_scores(&LikertTally::new("asztalos", [170, 12, 7, 3, 4, 0])).unwrap();
        assert!((s.masculinity - 446.5 / 454.0).abs() < 1e-12);
        assert!((s.femininity - 7.5 / 454.0).abs() < 1e-12);
        assert_eq!(s.display_percent(), (98, 2));
    }

    #[test]
    fn symmetric_and_unanimous() {
        let s = perception_scores(&LikertTally::new("x", [0, 0, 100, 100, 0, 0])).unwrap();
        assert_eq!((s.masculinity, s.femininity), (0.5, 0.5));
        let s = perception_scores(&LikertTally::new("x", [200, 0, 0, 0, 0, 0])).unwrap();
        assert_eq!(s.masculinity, 1.0);
        assert_eq!(s.femininity, 0.0);
    }

    #[test]
    fn empty_tally() {
        assert!(matches!(
            perception_scores(&LikertTally::new("x", [0; 6])),
            Err(Error::EmptyTally(_))
        ));
        assert!(perception_reference(&[LikertTally::new("x", [0; 6])]).is_err());
    }

    #[test]
    fn reference_maps_femininity_to_female() {
        let map = perception_reference(&[LikertTally::new("asztalos", [170, 12, 7, 3, 4, 0])])
            .unwrap();
        let share = map["asztalos"];
        assert!((share.female() - 0.0165).abs() < 1e-4);
        assert!(perception_reference(&[]).unwrap().is_empty());
    }

    #[test]
    fn sixty_percent_feminine() {
        // Only "somewhat" answers: 60 feminine vs 40 masculine.
        let map = perception_reference(&[LikertTally::new("a", [0, 0, 40, 60, 0, 0])]).unwrap();
        assert!((map["a"].female() - 0.60).abs() < 1e-12);
    }

    fn tally() -> impl Strategy<Value = [u64; 6]> {
        prop::array::uniform6(0u64..500).prop_filter("non-empty", |c| c.iter().sum::<u64>() > 0)
    }

    proptest! {
        #[test]
        fn scores_sum_to_one(counts in tally()) {
            let s = perception_scores(&LikertTally::new("x", counts)).unwrap();
            prop_assert!((s.masculinity + s.femininity - 1.0).abs() <= 1e-9);
        }

        #[test]
        fn moving_four_to_three_never_lowers_masculinity(counts in tally()) {
            prop_assume!(counts[3] > 0);
            let before = perception_scores(&LikertTally::new("x", counts)).unwrap();
            let mut moved = counts;
            moved[3] -= 1;
            moved[2] += 1;
            let after = perception_scores(&LikertTally::new("x", moved)).unwrap();
            prop_assert!(after.masculinity >= before.masculinity);
        }

        #[test]
        fn scale_invariant(counts in tally(), k in 1u64..50) {
            let a = perception_scores(&LikertTally::new("x", counts)).unwrap();
            let scaled = counts.map(|c| c * k);
            let b = perception_scores(&LikertTally::new("x", scaled)).unwrap();
            prop_assert!((a.masculinity - b.masculinity).abs() <= 1e-12);
            prop_assert!((a.femininity - b.femininity).abs() <= 1e-12);
        }

        #[test]
        fn mirror_swaps_scores(counts in tally()) {
            let a = perception_scores(&LikertTally::new("x", counts)).unwrap();
            let mut rev = counts;
            rev.reverse();
            let b = perception_scores(&LikertTally::new("x", rev)).unwrap();
            prop_assert_eq!(a.masculinity, b.femininity);
            prop_assert_eq!(a.femininity, b.masculinity);
        }
    }
}
