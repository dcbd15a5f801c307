use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;

use crate::core::{BoundingBox, Frame, Track, TrackId};
use crate::error::{Error, Result};
use crate::tracker::hungarian;

/// Matching outcome for one frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameMatch {
    /// `(gt_id, pred_id)` pairs, sorted by gt id.
    pub matches: Vec<(TrackId, TrackId)>,
    pub unmatched_gt: Vec<TrackId>,
    pub unmatched_pred: Vec<TrackId>,
}

impl FrameMatch {
    pub fn gt_count(&self) -> usize {
        self.matches.len() + self.unmatched_gt.len()
    }
}

/// Per-frame CLEAR correspondences over a whole video.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameMatching {
    pub frames: BTreeMap<Frame, FrameMatch>,
}

impl FrameMatching {
    pub fn false_negatives(&self) -> usize {
        self.frames.values().map(|f| f.unmatched_gt.len()).sum()
    }

    pub fn false_positives(&self) -> usize {
        self.frames.values().map(|f| f.unmatched_pred.len()).sum()
    }

    pub fn gt_total(&self) -> usize {
        self.frames.values().map(FrameMatch::gt_count).sum()
    }

    pub fn matched(&self) -> usize {
        self.frames.values().map(|f| f.matches.len()).sum()
    }
}

type FrameBoxes = BTreeMap<Frame, Vec<(TrackId, BoundingBox)>>;

pub(crate) fn boxes_by_frame(tracks: &[Track]) -> FrameBoxes {
    let mut frames: FrameBoxes = BTreeMap::new();
    for t in tracks {
        for d in t.detections() {
            frames.entry(d.frame).or_default().push((t.track_id(), d.bbox));
        }
    }
    for boxes in frames.values_mut() {
        boxes.sort_by_key(|(id, _)| *id);
    }
    frames
}

/// CLEAR MOT matching.
///
/// A ground-truth object keeps its last matched prediction while their IoU
/// stays at or above `iou_threshold`; the rest are matched by Hungarian
/// assignment on `1 - IoU`, rejecting pairs below the threshold.
pub fn match_frames(gt: &[Track], pred: &[Track], iou_threshold: f64) -> FrameMatching {
    let gt_frames = boxes_by_frame(gt);
    let pred_frames = boxes_by_frame(pred);
    let all_frames: std::collections::BTreeSet<Frame> =
        gt_frames.keys().chain(pred_frames.keys()).copied().collect();
    let empty = Vec::new();
    let mut last: HashMap<TrackId, TrackId> = HashMap::new();
    let mut out = FrameMatching::default();

    for frame in all_frames {
        let g = gt_frames.get(&frame).unwrap_or(&empty);
        let p = pred_frames.get(&frame).unwrap_or(&empty);
        let pred_index: HashMap<TrackId, usize> =
            p.iter().enumerate().map(|(i, (id, _))| (*id, i)).collect();

        let mut g_used = vec![false; g.len()];
        let mut p_used = vec![false; p.len()];
        let mut matches = Vec::new();

        for (gi, (gid, gbox)) in g.iter().enumerate() {
            let Some(pid) = last.get(gid) else { continue };
            let Some(&pi) = pred_index.get(pid) else { continue };
            if !p_used[pi] && gbox.iou(&p[pi].1) >= iou_threshold {
                g_used[gi] = true;
                p_used[pi] = true;
                matches.push((*gid, *pid));
            }
        }

        let free_g: Vec<usize> = (0..g.len()).filter(|&i| !g_used[i]).collect();
        let free_p: Vec<usize> = (0..p.len()).filter(|&i| !p_used[i]).collect();
        if !free_g.is_empty() && !free_p.is_empty() {
            let ious = DMatrix::from_fn(free_g.len(), free_p.len(), |i, j| {
                g[free_g[i]].1.iou(&p[free_p[j]].1)
            });
            // Pairs under the threshold cost more than any valid pair.
            let cost = ious.map(|v| if v >= iou_threshold { 1.0 - v } else { 2.0 });
            for (i, j) in hungarian(&cost).expect("IoU costs are finite") {
                if ious[(i, j)] >= iou_threshold {
                    g_used[free_g[i]] = true;
                    p_used[free_p[j]] = true;
                    matches.push((g[free_g[i]].0, p[free_p[j]].0));
                }
            }
        }

        matches.sort_unstable();
        for &(gid, pid) in &matches {
            last.insert(gid, pid);
        }
        out.frames.insert(
            frame,
            FrameMatch {
                matches,
                unmatched_gt: (0..g.len()).filter(|&i| !g_used[i]).map(|i| g[i].0).collect(),
                unmatched_pred: (0..p.len()).filter(|&i| !p_used[i]).map(|i| p[i].0).collect(),
            },
        );
    }
    out
}

/// Identity switches over a matching: a ground-truth object switches when
/// its matched prediction differs from its last known match.
pub fn count_idsw(matching: &FrameMatching) -> usize {
    let mut last: HashMap<TrackId, TrackId> = HashMap::new();
    let mut switches = 0;
    for frame in matching.frames.values() {
        for &(gid, pid) in &frame.matches {
            if let Some(prev) = last.insert(gid, pid) {
                if prev != pid {
                    switches += 1;
                }
            }
        }
    }
    switches
}

/// Switches in one object's per-frame match sequence (`None` = unmatched).
pub fn switch_count(sequence: &[Option<TrackId>]) -> usize {
    let mut last = None;
    let mut switches = 0;
    for id in sequence.iter().flatten() {
        if last.is_some_and(|l| l != *id) {
            switches += 1;
        }
        last = Some(*id);
    }
    switches
}

/// `1 - (fn + fp + idsw) / gt_total`; may be negative.
pub fn mota(fp: usize, fn_: usize, idsw: usize, gt_total: usize) -> Result<f64> {
    if gt_total == 0 {
        return Err(Error::Validation("MOTA undefined with no ground truth".into()));
    }
    Ok(1.0 - (fn_ + fp + idsw) as f64 / gt_total as f64)
}

#[cfg(test)]
pub(crate) fn one_to_one(matching: &FrameMatching) -> bool {
    use std::collections::HashSet;
    matching.frames.values().all(|f| {
        let g: HashSet<_> = f.matches.iter().map(|m| m.0).collect();
        let p: HashSet<_> = f.matches.iter().map(|m| m.1).collect();
        g.len() == f.matches.len() && p.len() == f.matches.len()
    })
}
