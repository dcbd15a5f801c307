//! Tracking-by-detection: links per-frame detections into tracks.

mod hungarian;
mod kalman;
mod sort;

use std::collections::BTreeMap;

use crate::core::{BoundingBox, Detection, Frame, Track};

pub use hungarian::{assignment_cost, hungarian};
pub use kalman::{KalmanNoise, KalmanTrackState, StateCovariance, StateVector};
pub use sort::{SortTracker, TrackPhase, TrackStatus, TrackerParams};

/// Intersection over union of two boxes.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    a.iou(b)
}

/// Produces tracks for one video from detections grouped by frame.
///
/// Implementations hold no per-video state between calls.
pub trait Associator {
    fn associate(&self, frames: &BTreeMap<Frame, Vec<Detection>>) -> Vec<Track>;
}

/// Runs the SORT associator with `params`.
pub fn track(frames: &BTreeMap<Frame, Vec<Detection>>, params: &TrackerParams) -> Vec<Track> {
    SortTracker::new(params.clone()).associate(frames)
}
