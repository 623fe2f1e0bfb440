//! Error points, optimal-translator error and the bias score.
//!
//! For an occupation with female share `p`, a translation with "he" leaves
//! `100·p` percent of the workers unrepresented and one with "she" leaves
//! `100·(1-p)`. The optimal deterministic translator always picks the
//! majority pronoun, so its error is `100·min(p, 1-p)`. The bias score
//! relates the two: `B = (E_t - E_o) / E_o`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::gendering::GenderLabel;
use crate::lexicon::{ClassificationSystem, Dominance, GenderShare, ReferenceMap};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    SourceStats,
    TargetStats,
    Perception,
}

impl ReferenceKind {
    pub const ALL: [ReferenceKind; 3] = [Self::SourceStats, Self::TargetStats, Self::Perception];

    /// The classification system that supplies this reference's categories.
    pub fn system(self) -> Option<ClassificationSystem> {
        match self {
            Self::SourceStats => Some(ClassificationSystem::Feor),
            Self::TargetStats => Some(ClassificationSystem::Soc),
            Self::Perception => None,
        }
    }

    /// System whose categories group occupations for this reference.
    pub fn grouping_system(self) -> ClassificationSystem {
        self.system().unwrap_or(ClassificationSystem::Feor)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::SourceStats => "source",
            Self::TargetStats => "target",
            Self::Perception => "perception",
        }
    }
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReferenceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "source" | "source_stats" => Ok(Self::SourceStats),
            "target" | "target_stats" => Ok(Self::TargetStats),
            "perception" => Ok(Self::Perception),
            other => Err(format!("unknown reference `{other}`")),
        }
    }
}

/// A bias score, or the marker for a wrong pronoun on a unanimous occupation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bias {
    Finite(f64),
    Unbounded,
}

impl Bias {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(b) => Some(b),
            Self::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Self::Unbounded)
    }

    pub fn is_zero(self) -> bool {
        self == Self::Finite(0.0)
    }
}

/// Which gender a biased translation fails to represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AgainstWomen,
    AgainstMen,
    None,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AgainstWomen => "against_women",
            Self::AgainstMen => "against_men",
            Self::None => "none",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "against_women" => Ok(Self::AgainstWomen),
            "against_men" => Ok(Self::AgainstMen),
            "none" => Ok(Self::None),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasResult {
    pub occupation_id: String,
    pub reference: ReferenceKind,
    pub label: GenderLabel,
    /// Engine error points, in `[0, 100]`.
    pub error_points: f64,
    /// Optimal deterministic error points, in `[0, 50]`.
    pub optimal_error: f64,
    pub bias: Bias,
    pub direction: Direction,
    /// The reference share the result was scored against.
    pub share: GenderShare,
}

/// Percentage of workers not represented by the chosen pronoun.
pub fn error_points(label: GenderLabel, share: GenderShare) -> Result<f64> {
    match label {
        GenderLabel::Masculine => Ok(100.0 * share.female()),
        GenderLabel::Feminine => Ok(100.0 * share.male()),
        other => Err(Error::UnscorableLabel(other)),
    }
}

/// Error points of the translator that always picks the majority pronoun.
pub fn optimal_error(share: GenderShare) -> f64 {
    100.0 * share.female().min(share.male())
}

pub fn bias_score(error_points: f64, optimal_error: f64) -> Result<Bias> {
    if error_points < optimal_error {
        return Err(Error::InvalidOrder {
            e_t: error_points,
            e_o: optimal_error,
        });
    }
    if optimal_error > 0.0 {
        Ok(Bias::Finite((error_points - optimal_error) / optimal_error))
    } else if error_points == 0.0 {
        Ok(Bias::Finite(0.0))
    } else {
        Ok(Bias::Unbounded)
    }
}

fn direction(label: GenderLabel, share: GenderShare) -> Direction {
    match (label, share.dominance()) {
        (GenderLabel::Masculine, Dominance::FemaleDominated) => Direction::AgainstWomen,
        (GenderLabel::Feminine, Dominance::MaleDominated) => Direction::AgainstMen,
        _ => Direction::None,
    }
}

/// Scores one occupation's label against a reference map.
pub fn score_occupation(
    occupation_id: &str,
    label: GenderLabel,
    reference: &ReferenceMap,
) -> Result<BiasResult> {
    let share = reference.get(occupation_id).ok_or_else(|| Error::MissingReference {
        occupation: occupation_id.to_string(),
        reference: reference.kind,
    })?;
    score_share(occupation_id, label, reference.kind, share)
}

pub fn score_share(
    occupation_id: &str,
    label: GenderLabel,
    reference: ReferenceKind,
    share: GenderShare,
) -> Result<BiasResult> {
    let e_t = error_points(label, share)?;
    let e_o = optimal_error(share);
    let bias = bias_score(e_t, e_o)?;
    Ok(BiasResult {
        occupation_id: occupation_id.to_string(),
        reference,
        label,
        error_points: e_t,
        optimal_error: e_o,
        bias,
        direction: direction(label, share),
        share,
    })
}

/// Expected error points of the translator that says "she" with
/// probability equal to the female share.
pub fn probabilistic_expected_error(share: GenderShare) -> f64 {
    let p = share.female();
    200.0 * p * (1.0 - p)
}

/// Rounds half away from zero to `decimals` places, treating values within
/// 1e-9 of a half step as exactly on it.
pub fn round_half_up(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    let scaled = value * scale;
    let floor = scaled.floor();
    let frac = scaled - floor;
    let rounded = if frac >= 0.5 || (0.5 - frac) < 1e-9 {
        floor + 1.0
    } else {
        floor
    };
    rounded / scale
}

/// Display string of a bias value at the given precision.
pub fn display_bias(bias: Bias, decimals: u32) -> String {
    match bias {
        Bias::Finite(b) => {
            let r = round_half_up(b, decimals);
            if r == r.trunc() {
                format!("{r:.0}")
            } else {
                format!("{r:.*}", decimals as usize)
            }
        }
        Bias::Unbounded => "unbounded".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn share(female: f64) -> GenderShare {
        GenderShare::from_female(female).unwrap()
    }

    #[test]
    fn error_points_worked_example() {
        assert_eq!(error_points(GenderLabel::Feminine, share(0.6)).unwrap().round(), 40.0);
        assert_eq!(error_points(GenderLabel::Masculine, share(0.6)).unwrap(), 60.0);
        assert_eq!(error_points(GenderLabel::Masculine, share(0.0)).unwrap(), 0.0);
        assert!(matches!(
            error_points(GenderLabel::Neutral, share(0.6)),
            Err(Error::UnscorableLabel(GenderLabel::Neutral))
        ));
    }

    #[test]
    fn optimal_error_cases() {
        assert!((optimal_error(share(0.6)) - 40.0).abs() < 1e-12);
        assert_eq!(optimal_error(share(0.5)), 50.0);
        assert_eq!(optimal_error(share(1.0)), 0.0);
    }

    #[test]
    fn bias_score_cases() {
        assert_eq!(bias_score(60.0, 40.0).unwrap(), Bias::Finite(0.5));
        assert_eq!(bias_score(40.0, 40.0).unwrap(), Bias::Finite(0.0));
        assert_eq!(bias_score(0.0, 0.0).unwrap(), Bias::Finite(0.0));
        assert_eq!(bias_score(100.0, 0.0).unwrap(), Bias::Unbounded);
        let b = bias_score(73.0, 27.0).unwrap().finite().unwrap();
        assert!((b - 46.0 / 27.0).abs() < 1e-12);
        assert_eq!(display_bias(Bias::Finite(b), 1), "1.7");
        assert!(matches!(bias_score(30.0, 40.0), Err(Error::InvalidOrder { .. })));
    }

    #[test]
    fn table_rows() {
        let stat = score_share("statistician", GenderLabel::Masculine, ReferenceKind::SourceStats, GenderShare::new(0.73, 0.27).unwrap()).unwrap();
        assert_eq!(display_bias(stat.bias, 1), "1.7");
        assert_eq!(stat.direction, Direction::AgainstWomen);

        let dancer = score_share("dancer", GenderLabel::Feminine, ReferenceKind::SourceStats, GenderShare::new(0.58, 0.42).unwrap()).unwrap();
        assert_eq!(dancer.bias, Bias::Finite(0.0));
        assert_eq!(dancer.direction, Direction::None);

        let choreo = score_share("choreographer", GenderLabel::Masculine, ReferenceKind::SourceStats, GenderShare::new(0.58, 0.42).unwrap()).unwrap();
        let b = choreo.bias.finite().unwrap();
        assert!((b - 16.0 / 42.0).abs() < 1e-12);
        assert_eq!(display_bias(choreo.bias, 1), "0.4");
    }

    #[test]
    fn missing_reference() {
        let map = ReferenceMap {
            kind: ReferenceKind::TargetStats,
            shares: Default::default(),
            omitted: vec![],
        };
        assert!(matches!(
            score_occupation("x", GenderLabel::Masculine, &map),
            Err(Error::MissingReference { .. })
        ));
    }

    #[test]
    fn probabilistic_cases() {
        assert_eq!(probabilistic_expected_error(share(0.5)), 50.0);
        assert_eq!(probabilistic_expected_error(share(1.0)), 0.0);
        assert!((probabilistic_expected_error(share(0.6)) - 48.0).abs() < 1e-12);
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_up(0.25, 1), 0.3);
        assert_eq!(round_half_up(1.15, 1), 1.2);
        assert_eq!(round_half_up(0.19047, 1), 0.2);
        assert_eq!(round_half_up(98.348, 0), 98.0);
        assert_eq!(round_half_up(1.65, 0), 2.0);
        assert_eq!(display_bias(Bias::Finite(0.0), 1), "0");
        assert_eq!(display_bias(Bias::Unbounded, 1), "unbounded");
    }

    #[test]
    fn grid_monotone_for_minority_label() {
        // "he" for a female-dominated occupation grows with the female share.
        let mut prev = -1.0;
        for i in 501..1000 {
            let r = score_share("x", GenderLabel::Masculine, ReferenceKind::SourceStats, share(i as f64 / 1000.0)).unwrap();
            let b = r.bias.finite().unwrap();
            assert!(b > prev, "not increasing at {i}");
            prev = b;
        }
    }
}
