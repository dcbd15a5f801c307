use crate::core::{TeamLabel, Track};
use crate::error::Result;

use super::scorer::TeamScorer;

/// Majority vote of per-frame team argmaxes.
///
/// Ties go to the label with the larger summed winning score, then to
/// Home < Away < Referee.
pub fn team_vote(track: &Track, scorer: &dyn TeamScorer) -> Result<TeamLabel> {
    let mut votes = [0usize; 3];
    let mut confidence = [0.0f64; 3];
    for pos in 0..track.len() {
        let probs = scorer.team_probs(track, pos)?;
        let label = probs.argmax();
        votes[label.index()] += 1;
        confidence[label.index()] += probs.get(label);
    }
    let mut best = TeamLabel::Home;
    for label in TeamLabel::ALL {
        let (i, b) = (label.index(), best.index());
        if votes[i] > votes[b] || (votes[i] == votes[b] && confidence[i] > confidence[b]) {
            best = label;
        }
    }
    Ok(best)
}
