use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core::prob::argmax_where;
use crate::core::{ClassVocabulary, Identity, ProbVector, RosterVector, TeamLabel, Track, TrackId};
use crate::error::{Error, Result};

use super::infer::{jersey_visible, window_probs, Aggregation};
use super::scorer::{FrameScorer, TeamScorer, WindowScorer};
use super::team::team_vote;
use super::IdentParams;

/// Roster-masked identity for a tracklet.
///
/// Home tracklets take the best class admitted by `home`, away tracklets the
/// best admitted by `away`, referees get [`Identity::Referee`]. Only admitted
/// classes compete, so the result is always on the roster or null; ties go to
/// the lower class index.
pub fn identify(
    team: TeamLabel,
    p_jn: &ProbVector,
    home: &RosterVector,
    away: &RosterVector,
    vocab: &ClassVocabulary,
) -> Result<Identity> {
    for mask in [home, away] {
        if mask.len() != p_jn.len() {
            return Err(Error::Dimension {
                expected: mask.len(),
                actual: p_jn.len(),
            });
        }
    }
    if p_jn.len() != vocab.class_count() {
        return Err(Error::Dimension {
            expected: vocab.class_count(),
            actual: p_jn.len(),
        });
    }
    let mask = match team {
        TeamLabel::Home => home,
        TeamLabel::Away => away,
        TeamLabel::Referee => return Ok(Identity::Referee),
    };
    let class = argmax_where(p_jn.values(), |j| mask.admits(j)).unwrap_or(vocab.null_index());
    Ok(vocab.identity_of(class))
}

/// The three probability providers the pipeline consumes.
#[derive(Clone, Copy)]
pub struct Scorers<'a> {
    pub jersey: &'a dyn FrameScorer,
    pub windows: &'a dyn WindowScorer,
    pub team: &'a dyn TeamScorer,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineParams {
    pub ident: IdentParams,
    pub aggregation: Aggregation,
    pub roster_masking: bool,
}

impl PipelineParams {
    pub fn with_masking(mut self, on: bool) -> Self {
        self.roster_masking = on;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackIdentity {
    pub track_id: TrackId,
    pub team: TeamLabel,
    pub identity: Identity,
    /// Identity before roster masking.
    pub unmasked: Identity,
    pub visible: bool,
    pub p_jn: ProbVector,
}

/// Team vote, window scoring, visibility filtering, aggregation and (when
/// enabled) roster masking for every track. Output follows input order.
pub fn run_pipeline(
    tracks: &[Track],
    scorers: Scorers<'_>,
    rosters: (&RosterVector, &RosterVector),
    vocab: &ClassVocabulary,
    params: &PipelineParams,
) -> Result<Vec<TrackIdentity>> {
    params.ident.validate()?;
    let (home, away) = rosters;
    tracks
        .par_iter()
        .map(|track| {
            let team = team_vote(track, scorers.team)?;
            let probs = window_probs(track, scorers.windows, &params.ident)?;
            let visible = if params.aggregation.visibility_filter {
                jersey_visible(track, scorers.jersey, params.ident.theta)?
            } else {
                true
            };
            let (class, p_jn) = params.aggregation.apply(
                &probs,
                visible,
                vocab,
                params.ident.empty_filtered,
            )?;
            let unmasked = match team {
                TeamLabel::Referee => Identity::Referee,
                _ => vocab.identity_of(class),
            };
            let identity = if params.roster_masking {
                identify(team, &p_jn, home, away, vocab)?
            } else {
                unmasked
            };
            Ok(TrackIdentity {
                track_id: track.track_id(),
                team,
                identity,
                unmasked,
                visible,
                p_jn,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pv(v: &[f64]) -> ProbVector {
        ProbVector::new(v.to_vec()).unwrap()
    }

    fn vocab() -> ClassVocabulary {
        ClassVocabulary::new(vec![6, 8]).unwrap()
    }

    fn mask(bits: &[u8], v: &ClassVocabulary) -> RosterVector {
        let roster = v
            .labels()
            .iter()
            .zip(bits)
            .filter(|(_, b)| **b == 1)
            .map(|(n, _)| *n)
            .collect();
        RosterVector::build(&roster, v).unwrap()
    }

    #[test]
    fn mask_removes_top_class() {
        let v = vocab();
        let p = pv(&[0.5, 0.3, 0.2]);
        let h = mask(&[0, 1], &v);
        let all = RosterVector::admit_all(&v);
        assert_eq!(identify(TeamLabel::Home, &p, &h, &all, &v).unwrap(), Identity::Jersey(8));
        assert_eq!(identify(TeamLabel::Away, &p, &h, &all, &v).unwrap(), Identity::Jersey(6));
    }

    #[test]
    fn referee_ignores_probabilities() {
        let v = vocab();
        let p = pv(&[0.5, 0.3, 0.2]);
        let all = RosterVector::admit_all(&v);
        assert_eq!(identify(TeamLabel::Referee, &p, &all, &all, &v).unwrap(), Identity::Referee);
    }

    #[test]
    fn zero_mass_on_roster_falls_to_null() {
        let v = vocab();
        let p = pv(&[1.0, 0.0, 0.0]);
        let h = mask(&[0, 1], &v);
        // Masked scores are [0, 0, 0]; the first admitted class is 8.
        assert_eq!(identify(TeamLabel::Home, &p, &h, &h, &v).unwrap(), Identity::Jersey(8));
        let none = mask(&[0, 0], &v);
        assert_eq!(identify(TeamLabel::Home, &p, &none, &none, &v).unwrap(), Identity::Null);
    }

    #[test]
    fn dimension_mismatch() {
        let v = vocab();
        let other = ClassVocabulary::new(vec![1]).unwrap();
        let p = pv(&[0.5, 0.5]);
        let m = RosterVector::admit_all(&v);
        assert!(identify(TeamLabel::Home, &p, &m, &m, &v).is_err());
        let small = RosterVector::admit_all(&other);
        assert!(identify(TeamLabel::Home, &pv(&[0.2, 0.3, 0.5]), &small, &m, &v).is_err());
    }

    proptest! {
        #[test]
        fn masked_identity_is_always_admitted(
            weights in prop::collection::vec(0.0f64..1.0, 6),
            bits in prop::collection::vec(0u8..2, 5),
            team in 0usize..2,
        ) {
            prop_assume!(weights.iter().sum::<f64>() > 0.0);
            let v = ClassVocabulary::new(vec![1, 2, 3, 4, 5]).unwrap();
            let p = ProbVector::from_weights(weights).unwrap();
            let m = mask(&bits, &v);
            let id = identify(TeamLabel::ALL[team], &p, &m, &m, &v).unwrap();
            match id {
                Identity::Jersey(n) => prop_assert!(m.admits(v.index_of(n).unwrap())),
                Identity::Null => {}
                Identity::Referee => prop_assert!(false),
            }
        }
    }
}
