use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::hungarian::hungarian;
use super::kalman::{KalmanNoise, KalmanTrackState};
use super::Associator;
use crate::core::{Detection, Frame, Track, TrackId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerParams {
    /// Matches with IoU below this are rejected.
    pub iou_threshold: f64,
    /// Confirmed tracks are dropped after this many consecutive misses.
    pub max_age: u32,
    /// Consecutive matches needed before a track is reported.
    pub min_hits: u32,
    /// Detections below this confidence are ignored.
    pub min_confidence: f64,
    pub noise: KalmanNoise,
}

impl Default for TrackerParams {
    fn default() -> Self {
        Self {
            iou_threshold: 0.3,
            max_age: 30,
            min_hits: 3,
            min_confidence: 0.5,
            noise: KalmanNoise::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackPhase {
    Tentative,
    Confirmed,
    Lost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrackStatus {
    pub phase: TrackPhase,
    /// Frames since the last match.
    pub age: u32,
    /// Consecutive matches.
    pub hits: u32,
}

struct LiveTrack {
    id: Option<TrackId>,
    state: KalmanTrackState,
    status: TrackStatus,
    detections: Vec<Detection>,
}

impl LiveTrack {
    fn finish(self) -> Option<Track> {
        let id = self.id?;
        Some(Track::new(id, self.detections).expect("tracker emits ordered detections"))
    }
}

/// SORT: Kalman prediction, `1 - IoU` cost, Hungarian matching.
///
/// Tracks are numbered from 1 in order of confirmation. A confirmed track
/// keeps every detection it matched, including those from its tentative
/// phase. Tentative tracks are discarded on their first miss.
#[derive(Debug, Clone, Default)]
pub struct SortTracker {
    params: TrackerParams,
}

impl SortTracker {
    pub fn new(params: TrackerParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &TrackerParams {
        &self.params
    }
}

impl Associator for SortTracker {
    fn associate(&self, frames: &BTreeMap<Frame, Vec<Detection>>) -> Vec<Track> {
        let (Some(&first), Some(&last)) = (frames.keys().next(), frames.keys().next_back()) else {
            return Vec::new();
        };
        let mut run = SortRun {
            params: &self.params,
            live: Vec::new(),
            done: Vec::new(),
            next_id: 1,
        };
        let empty = Vec::new();
        for frame in first..=last {
            run.step(frames.get(&frame).unwrap_or(&empty));
        }
        let SortRun { live, mut done, .. } = run;
        done.extend(live.into_iter().filter_map(LiveTrack::finish));
        done.sort_by_key(Track::track_id);
        done
    }
}

struct SortRun<'a> {
    params: &'a TrackerParams,
    live: Vec<LiveTrack>,
    done: Vec<Track>,
    next_id: TrackId,
}

impl SortRun<'_> {
    fn step(&mut self, detections: &[Detection]) {
        let p = self.params;
        let dets: Vec<&Detection> = detections
            .iter()
            .filter(|d| d.confidence >= p.min_confidence)
            .collect();

        for t in &mut self.live {
            t.state = t.state.predict(&p.noise);
        }

        let cost = DMatrix::from_fn(self.live.len(), dets.len(), |i, j| {
            1.0 - self.live[i].state.bbox().iou(&dets[j].bbox)
        });
        let mut track_matched = vec![false; self.live.len()];
        let mut det_matched = vec![false; dets.len()];
        let pairs = hungarian(&cost).expect("IoU costs are finite");
        for (ti, di) in pairs {
            if 1.0 - cost[(ti, di)] < p.iou_threshold {
                continue;
            }
            track_matched[ti] = true;
            det_matched[di] = true;
            let t = &mut self.live[ti];
            let det = dets[di];
            t.state = t.state.update(&det.bbox, &p.noise);
            t.detections.push(*det);
            t.status.age = 0;
            t.status.hits += 1;
            if t.status.hits >= p.min_hits || t.status.phase == TrackPhase::Lost {
                t.status.phase = TrackPhase::Confirmed;
            }
            if t.status.phase == TrackPhase::Confirmed && t.id.is_none() {
                t.id = Some(self.next_id);
                self.next_id += 1;
            }
        }

        let mut kept = Vec::with_capacity(self.live.len());
        for (t, matched) in std::mem::take(&mut self.live).into_iter().zip(track_matched) {
            let mut t = t;
            if !matched {
                t.status.age += 1;
                t.status.hits = 0;
                match t.status.phase {
                    TrackPhase::Tentative => continue,
                    TrackPhase::Confirmed | TrackPhase::Lost => t.status.phase = TrackPhase::Lost,
                }
                if t.status.age > p.max_age {
                    self.done.extend(t.finish());
                    continue;
                }
            }
            kept.push(t);
        }
        self.live = kept;

        for (det, _) in dets.iter().zip(det_matched).filter(|(_, m)| !m) {
            let mut t = LiveTrack {
                id: None,
                state: KalmanTrackState::initiate(&det.bbox, &p.noise),
                status: TrackStatus {
                    phase: TrackPhase::Tentative,
                    age: 0,
                    hits: 1,
                },
                detections: vec![**det],
            };
            if p.min_hits <= 1 {
                t.status.phase = TrackPhase::Confirmed;
                t.id = Some(self.next_id);
                self.next_id += 1;
            }
            self.live.push(t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::BoundingBox;
    use crate::tracker::track;

    fn det(frame: Frame, x: f64, y: f64) -> Detection {
        Detection::new(frame, BoundingBox::new(x, y, 40.0, 80.0).unwrap(), 1.0).unwrap()
    }

    fn frames_of(objects: &[Vec<Detection>]) -> BTreeMap<Frame, Vec<Detection>> {
        let mut frames: BTreeMap<Frame, Vec<Detection>> = BTreeMap::new();
        for obj in objects {
            for d in obj {
                frames.entry(d.frame).or_default().push(*d);
            }
        }
        frames
    }

    fn assert_well_formed(tracks: &[Track], total: usize) {
        let mut seen = std::collections::HashSet::new();
        for t in tracks {
            for w in t.detections().windows(2) {
                assert!(w[0].frame < w[1].frame);
            }
            for d in t.detections() {
                let key = (d.frame, d.bbox.x.to_bits(), d.bbox.y.to_bits());
                assert!(seen.insert(key), "detection reused");
            }
        }
        assert!(seen.len() <= total);
    }

    #[test]
    fn single_linear_object_gives_one_track() {
        let obj: Vec<Detection> = (0..100).map(|f| det(f, 10.0 + 3.0 * f as f64, 100.0)).collect();
        let tracks = track(&frames_of(&[obj]), &TrackerParams::default());
        assert_eq!(tracks.len(), 1);
        assert_eq!(tracks[0].len(), 100);
        assert_eq!(tracks[0].track_id(), 1);
    }

    #[test]
    fn passing_objects_on_separate_lanes_keep_identity() {
        // Boxes are 80 px tall and 60 px apart vertically: peak IoU is 0.2.
        let a: Vec<Detection> = (0..120).map(|f| det(f, 10.0 + 4.0 * f as f64, 100.0)).collect();
        let b: Vec<Detection> = (0..120).map(|f| det(f, 490.0 - 4.0 * f as f64, 160.0)).collect();
        let tracks = track(&frames_of(&[a, b]), &TrackerParams::default());
        assert_eq!(tracks.len(), 2);
        for t in &tracks {
            assert_eq!(t.len(), 120);
            let y0 = t.detections()[0].bbox.y;
            assert!(t.detections().iter().all(|d| d.bbox.y == y0));
        }
        assert_well_formed(&tracks, 240);
    }

    #[test]
    fn long_absence_yields_new_identity() {
        let p = TrackerParams::default();
        let mut obj: Vec<Detection> = (0..20).map(|f| det(f, 200.0, 100.0)).collect();
        let gap = p.max_age + 5;
        obj.extend((20 + gap..60 + gap).map(|f| det(f, 200.0, 100.0)));
        let tracks = track(&frames_of(&[obj]), &p);
        assert_eq!(tracks.len(), 2);
        assert_ne!(tracks[0].track_id(), tracks[1].track_id());
    }

    #[test]
    fn short_absence_keeps_identity() {
        let p = TrackerParams::default();
        let mut obj: Vec<Detection> = (0..20).map(|f| det(f, 200.0, 100.0)).collect();
        obj.extend((30..60).map(|f| det(f, 200.0, 100.0)));
        let tracks = track(&frames_of(&[obj]), &p);
        assert_eq!(tracks.len(), 1);
        assert_eq!(tracks[0].len(), 50);
    }

    #[test]
    fn short_lived_detections_are_not_reported() {
        let blip = vec![det(5, 0.0, 0.0), det(6, 0.0, 0.0)];
        let noise = vec![det(20, 500.0, 500.0)];
        let tracks = track(&frames_of(&[blip, noise]), &TrackerParams::default());
        assert!(tracks.is_empty());
    }

    #[test]
    fn low_confidence_detections_are_ignored() {
        let obj: Vec<Detection> = (0..10)
            .map(|f| {
                let mut d = det(f, 0.0, 0.0);
                d.confidence = 0.2;
                d
            })
            .collect();
        assert!(track(&frames_of(&[obj]), &TrackerParams::default()).is_empty());
    }

    #[test]
    fn empty_input_and_empty_frames() {
        assert!(track(&BTreeMap::new(), &TrackerParams::default()).is_empty());
        let mut frames = frames_of(&[(0..10).map(|f| det(f, 0.0, 0.0)).collect()]);
        frames.insert(3, Vec::new());
        frames.get_mut(&3).unwrap().clear();
        let tracks = track(&frames, &TrackerParams::default());
        assert_eq!(tracks.len(), 1);
        assert_eq!(tracks[0].len(), 9);
    }
}
