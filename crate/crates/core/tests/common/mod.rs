#![allow(dead_code)]

use std::path::Path;

use rinktrack::core::{
    BoundingBox, ClassVocabulary, Detection, Identity, ProbVector, Rosters, RosterVector,
    TeamLabel, Track,
};
use rinktrack::ident::{
    run_pipeline, FrameScorer, PipelineParams, Scorers, TrackIdentity, WindowScorer,
};
use rinktrack::metrics::IdentificationAccuracy;
use rinktrack::sim::{Confusion, DetectionNoise, GroundTruthBundle, PanKeyframe, ScenarioConfig};
use rinktrack::tracker::{track, TrackerParams};

/// Detector noise that still leaves most objects trackable.
pub fn moderate_noise() -> DetectionNoise {
    DetectionNoise {
        fp_rate: 0.02,
        fn_rate: 0.05,
        jitter_sigma: 2.0,
    }
}

/// Home and away numbers misread as numbers that team does not carry.
pub fn off_roster_confusions(prob: f64) -> Vec<Confusion> {
    [
        (6, 8),
        (3, 8),
        (5, 8),
        (9, 4),
        (13, 18),
        (7, 1),
        (4, 1),
        (10, 1),
        (12, 21),
        (16, 19),
        (11, 14),
        (2, 12),
    ]
    .into_iter()
    .map(|(from, to)| Confusion { from, to, prob })
    .collect()
}

pub fn panning_scenario() -> ScenarioConfig {
    ScenarioConfig {
        rink_width: 2560.0,
        pan_profile: vec![
            PanKeyframe { frame: 0, offset: 0.0 },
            PanKeyframe { frame: 120, offset: 1280.0 },
            PanKeyframe { frame: 300, offset: 1280.0 },
            PanKeyframe { frame: 420, offset: 300.0 },
            PanKeyframe { frame: 600, offset: 300.0 },
            PanKeyframe { frame: 720, offset: 1280.0 },
        ],
        ..ScenarioConfig::default()
    }
}

/// Non-referee identities outside their predicted team's roster.
pub fn roster_violations(ids: &[TrackIdentity], rosters: &Rosters) -> usize {
    ids.iter()
        .filter(|id| {
            let roster = match id.team {
                TeamLabel::Home => &rosters.home,
                TeamLabel::Away => &rosters.away,
                TeamLabel::Referee => return id.identity != Identity::Referee,
            };
            match id.identity {
                Identity::Jersey(n) => !roster.contains(&n),
                Identity::Null => false,
                Identity::Referee => true,
            }
        })
        .count()
}

/// Runs the pipeline with the bundle's oracle scorers and fails on any
/// roster violation when masking is on.
pub fn run_checked(
    bundle: &GroundTruthBundle,
    tracks: &[Track],
    params: &PipelineParams,
) -> Vec<TrackIdentity> {
    let rosters = &bundle.config.rosters;
    let (home, away) = rosters.vectors(&bundle.vocab).unwrap();
    let oracle = bundle.oracle_scorers();
    let scorers = Scorers {
        jersey: &oracle,
        windows: &oracle,
        team: &oracle,
    };
    let ids = run_pipeline(tracks, scorers, (&home, &away), &bundle.vocab, params).unwrap();
    if params.roster_masking {
        assert_eq!(roster_violations(&ids, rosters), 0, "roster violation");
    }
    ids
}

pub fn tracked(bundle: &GroundTruthBundle) -> Vec<Track> {
    track(&bundle.detection_frames(), &TrackerParams::default())
}

pub fn accuracy(
    bundle: &GroundTruthBundle,
    tracks: &[Track],
    ids: &[TrackIdentity],
) -> IdentificationAccuracy {
    IdentificationAccuracy::evaluate(&bundle.gt_tracks, &bundle.labels(), tracks, ids, 0.5)
}

/// Track with `k` consecutive dummy detections.
pub fn dummy_track(id: i64, k: usize) -> Track {
    let dets = (0..k as u32)
        .map(|f| Detection::new(f, BoundingBox::new(0.0, 0.0, 10.0, 10.0).unwrap(), 1.0).unwrap())
        .collect();
    Track::new(id, dets).unwrap()
}

/// Scorer backed by explicit per-position vectors.
pub struct TableScorer {
    pub frames: Vec<ProbVector>,
    pub windows: Vec<ProbVector>,
}

impl FrameScorer for TableScorer {
    fn jersey_probs(&self, _: &Track, pos: usize) -> rinktrack::Result<ProbVector> {
        Ok(self.frames[pos].clone())
    }
}

impl WindowScorer for TableScorer {
    fn window_probs(&self, _: &Track, start: usize, _: usize) -> rinktrack::Result<ProbVector> {
        Ok(self.windows[start].clone())
    }
}

fn first_max(v: &[f64], allowed: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &x) in v.iter().enumerate() {
        if allowed(i) && best.is_none_or(|b| x > v[b]) {
            best = Some(i);
        }
    }
    best
}

fn mean(vs: &[&[f64]]) -> Vec<f64> {
    let n = vs.len() as f64;
    (0..vs[0].len())
        .map(|i| vs.iter().fold(0.0, |s, v| s + v[i]) / n)
        .collect()
}

/// Straight-line reading of the aggregation algorithm, written without the
/// library: presence gate, window filtering, then averaging or voting, with
/// the average-everything fallback when filtering leaves nothing.
pub fn brute_force(
    frames: &[Vec<f64>],
    windows: &[Vec<f64>],
    theta: f64,
    majority: bool,
) -> usize {
    let null = windows[0].len() - 1;
    let present = frames.iter().any(|f| f[null] < theta);
    if !present {
        return null;
    }
    let kept: Vec<&[f64]> = windows
        .iter()
        .filter(|w| first_max(w, |_| true) != Some(null))
        .map(|w| w.as_slice())
        .collect();
    if kept.is_empty() {
        let all: Vec<&[f64]> = windows.iter().map(|w| w.as_slice()).collect();
        return first_max(&mean(&all), |i| i != null).unwrap_or(null);
    }
    if majority {
        let mut votes = vec![0usize; null + 1];
        for w in &kept {
            votes[first_max(w, |_| true).unwrap()] += 1;
        }
        let top = *votes.iter().max().unwrap();
        votes.iter().position(|&v| v == top).unwrap()
    } else {
        first_max(&mean(&kept), |_| true).unwrap()
    }
}

/// Every file under `dir`, relative path and bytes, in sorted order.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

pub fn cli(args: &[&str]) -> i32 {
    let mut full = vec!["rinktrack"];
    full.extend_from_slice(args);
    rinktrack::cli::main_with_args(full)
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn default_vocab() -> ClassVocabulary {
    ClassVocabulary::default()
}

pub fn admit_all() -> RosterVector {
    RosterVector::admit_all(&default_vocab())
}
