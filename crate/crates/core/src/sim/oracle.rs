use std::collections::HashMap;

use crate::core::{BoundingBox, Frame, ProbVector, TeamLabel, Track};
use crate::error::{Error, Result};
use crate::ident::{FrameScorer, TeamProbs, TeamScorer, WindowScorer};

use super::generate::GroundTruthBundle;

/// Minimum IoU for a detection to be attributed to a ground-truth object.
const ATTRIBUTION_IOU: f64 = 0.3;

/// Hidden simulator state of one entity in one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(super) struct FrameLatent {
    /// The number is legible in this frame.
    pub readable: bool,
    /// A fragment of the number is visible while it is otherwise hidden.
    pub glimpse: bool,
    /// Class a reader would see, after confusion.
    pub class: usize,
    /// Null probability emitted by the frame reader.
    pub null_prob: f64,
    /// Team the classifier favours in this frame.
    pub team: TeamLabel,
}

/// Scorers that read the simulator's latent state. Detections are attributed
/// to ground truth by IoU, so they work on tracker output as well as on
/// ground-truth tracks. Unattributed detections score as unreadable.
///
/// Frames where the number is hidden put at least `1 - hidden_epsilon` on
/// null, except fragment frames (`glimpse_rate`), which read as a lookalike
/// with a moderate null probability.
#[derive(Debug)]
pub struct OracleScorers<'a> {
    bundle: &'a GroundTruthBundle,
    boxes: HashMap<Frame, Vec<(usize, BoundingBox)>>,
}

fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

fn rounded(values: Vec<f64>) -> Result<ProbVector> {
    ProbVector::new(values.into_iter().map(round9).collect())
}

impl<'a> OracleScorers<'a> {
    pub(super) fn new(bundle: &'a GroundTruthBundle) -> Self {
        let mut boxes: HashMap<Frame, Vec<(usize, BoundingBox)>> = HashMap::new();
        for t in &bundle.gt_tracks {
            let idx = (t.track_id() - 1) as usize;
            for d in t.detections() {
                boxes.entry(d.frame).or_default().push((idx, d.bbox));
            }
        }
        Self { bundle, boxes }
    }

    /// Entity index behind detection `pos` of `track`, if any.
    pub fn attribute(&self, track: &Track, pos: usize) -> Option<usize> {
        let d = track.detections().get(pos)?;
        let mut best: Option<(usize, f64)> = None;
        for &(idx, b) in self.boxes.get(&d.frame)? {
            let iou = d.bbox.iou(&b);
            if iou >= ATTRIBUTION_IOU && best.is_none_or(|(_, v)| iou > v) {
                best = Some((idx, iou));
            }
        }
        best.map(|(i, _)| i)
    }

    fn latent(&self, entity: usize, frame: Frame) -> &FrameLatent {
        &self.bundle.latent[entity][frame as usize]
    }

    fn check(&self, track: &Track, pos: usize) -> Result<()> {
        if pos >= track.len() {
            return Err(Error::MissingScores {
                track_id: track.track_id(),
                detail: format!("position {pos} past track length {}", track.len()),
            });
        }
        Ok(())
    }

    fn unreadable(&self, null_prob: f64) -> Result<ProbVector> {
        let labels = self.bundle.vocab.labels().len();
        let rest = (1.0 - null_prob) / labels as f64;
        let mut v = vec![rest; labels + 1];
        v[labels] = null_prob;
        rounded(v)
    }
}

impl FrameScorer for OracleScorers<'_> {
    fn jersey_probs(&self, track: &Track, pos: usize) -> Result<ProbVector> {
        self.check(track, pos)?;
        let eps = self.bundle.config.scorer.hidden_epsilon;
        let Some(e) = self.attribute(track, pos) else {
            return self.unreadable(1.0 - eps);
        };
        let lat = self.latent(e, track.detections()[pos].frame);
        let null = self.bundle.vocab.null_index();
        let shown = if lat.readable && lat.class != null {
            lat.class
        } else if lat.glimpse && self.bundle.lookalike[e] != null {
            self.bundle.lookalike[e]
        } else {
            return self.unreadable(lat.null_prob);
        };
        let labels = self.bundle.vocab.labels().len();
        let mass = 1.0 - lat.null_prob;
        let other = if labels > 1 { 0.1 * mass / (labels - 1) as f64 } else { 0.0 };
        let mut v = vec![other; labels + 1];
        v[shown] = if labels > 1 { 0.9 * mass } else { mass };
        v[null] = lat.null_prob;
        rounded(v)
    }
}

impl WindowScorer for OracleScorers<'_> {
    fn window_probs(&self, track: &Track, start: usize, len: usize) -> Result<ProbVector> {
        if len == 0 || start + len > track.len() {
            return Err(Error::MissingScores {
                track_id: track.track_id(),
                detail: format!("window {start}+{len} outside track of length {}", track.len()),
            });
        }
        let vocab = &self.bundle.vocab;
        let s = &self.bundle.config.scorer;
        let classes = vocab.class_count();
        let null = vocab.null_index();

        let owners: Vec<Option<usize>> =
            (start..start + len).map(|p| self.attribute(track, p)).collect();
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for o in owners.iter().flatten() {
            *counts.entry(*o).or_default() += 1;
        }
        let dominant = counts
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(e, _)| e);

        let mut w = vec![0.0; classes];
        let mut hist = vec![0usize; classes];
        let mut visible = 0usize;
        if let Some(e) = dominant {
            for (p, o) in (start..).zip(&owners) {
                if *o != Some(e) {
                    continue;
                }
                let lat = self.latent(e, track.detections()[p].frame);
                if lat.readable && lat.class != null {
                    visible += 1;
                    hist[lat.class] += 1;
                }
            }
        }
        if visible == 0 {
            w[null] = 1.0;
        } else {
            let v = visible as f64;
            let g = (0.5 * v / s.window_half_visible).min(1.0);
            let q = s.misread * (-(v - 1.0) / s.misread_scale).exp();
            for (c, &h) in hist.iter().enumerate() {
                w[c] = g * (1.0 - q) * h as f64 / v;
            }
            let look = self.bundle.lookalike[dominant.expect("visible implies owner")];
            w[look] += g * q;
            w[null] += 1.0 - g;
        }
        let floor = s.floor / classes as f64;
        rounded(w.into_iter().map(|x| (1.0 - s.floor) * x + floor).collect())
    }
}

impl TeamScorer for OracleScorers<'_> {
    fn team_probs(&self, track: &Track, pos: usize) -> Result<TeamProbs> {
        self.check(track, pos)?;
        let Some(e) = self.attribute(track, pos) else {
            return Ok(TeamProbs([0.34, 0.33, 0.33]));
        };
        let lat = self.latent(e, track.detections()[pos].frame);
        let mut p = [0.05; 3];
        p[lat.team.index()] = 0.9;
        Ok(TeamProbs(p))
    }
}
