use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::core::{Track, TrackId};
use crate::tracker::hungarian;

use super::clear::boxes_by_frame;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Idf1 {
    pub idf1: f64,
    pub idtp: usize,
    pub idfp: usize,
    pub idfn: usize,
}

impl Idf1 {
    pub fn from_counts(idtp: usize, idfp: usize, idfn: usize) -> Self {
        let denom = 2 * idtp + idfp + idfn;
        let idf1 = if denom == 0 {
            0.0
        } else {
            2.0 * idtp as f64 / denom as f64
        };
        Self {
            idf1,
            idtp,
            idfp,
            idfn,
        }
    }
}

/// Frames in which each (gt, pred) pair overlaps with IoU at or above the
/// threshold. Rows follow `gt`, columns follow `pred`.
pub(crate) fn overlap_counts(gt: &[Track], pred: &[Track], iou_threshold: f64) -> DMatrix<f64> {
    let g_index: HashMap<TrackId, usize> =
        gt.iter().enumerate().map(|(i, t)| (t.track_id(), i)).collect();
    let p_index: HashMap<TrackId, usize> =
        pred.iter().enumerate().map(|(i, t)| (t.track_id(), i)).collect();
    let pred_frames = boxes_by_frame(pred);
    let mut counts = DMatrix::zeros(gt.len(), pred.len());
    for (frame, gboxes) in boxes_by_frame(gt) {
        let Some(pboxes) = pred_frames.get(&frame) else { continue };
        for (gid, gb) in &gboxes {
            for (pid, pb) in pboxes {
                if gb.iou(pb) >= iou_threshold {
                    counts[(g_index[gid], p_index[pid])] += 1.0;
                }
            }
        }
    }
    counts
}

/// Identification F1 under the one-to-one gt/pred identity mapping that
/// maximises identity true positives.
pub fn idf1(gt: &[Track], pred: &[Track], iou_threshold: f64) -> Idf1 {
    let gt_total: usize = gt.iter().map(Track::len).sum();
    let pred_total: usize = pred.iter().map(Track::len).sum();
    let counts = overlap_counts(gt, pred, iou_threshold);
    let idtp: usize = hungarian(&counts.map(|c| -c))
        .expect("finite counts")
        .into_iter()
        .map(|(g, p)| counts[(g, p)] as usize)
        .sum();
    Idf1::from_counts(idtp, pred_total - idtp, gt_total - idtp)
}
