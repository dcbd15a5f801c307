//! Probability providers standing in for the learned classifiers.
//!
//! * [`FrameScorer`]: per-detection jersey distribution (the image-wise
//!   classifier whose null score drives visibility filtering).
//! * [`WindowScorer`]: one jersey distribution per contiguous window of a
//!   tracklet (the temporal tracklet model).
//! * [`TeamScorer`]: per-detection home/away/referee distribution.
//!
//! File-backed implementations read JSON lines keyed by track id.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::core::{Frame, ProbVector, TeamLabel, Track, TrackId};
use crate::error::{Error, Result};

pub trait FrameScorer: Sync {
    /// Jersey-class distribution for detection `pos` of `track`.
    fn jersey_probs(&self, track: &Track, pos: usize) -> Result<ProbVector>;
}

pub trait WindowScorer: Sync {
    /// Jersey-class distribution for detections `start..start + len` of
    /// `track`. Any `len >= 1` must be accepted.
    fn window_probs(&self, track: &Track, start: usize, len: usize) -> Result<ProbVector>;
}

pub trait TeamScorer: Sync {
    fn team_probs(&self, track: &Track, pos: usize) -> Result<TeamProbs>;
}

/// Home/away/referee scores for one detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeamProbs(pub [f64; 3]);

impl TeamProbs {
    pub fn one_hot(label: TeamLabel) -> Self {
        let mut p = [0.0; 3];
        p[label.index()] = 1.0;
        Self(p)
    }

    pub fn get(&self, label: TeamLabel) -> f64 {
        self.0[label.index()]
    }

    /// Most likely label; ties resolve Home < Away < Referee.
    pub fn argmax(&self) -> TeamLabel {
        let mut best = TeamLabel::Home;
        for label in TeamLabel::ALL {
            if self.get(label) > self.get(best) {
                best = label;
            }
        }
        best
    }
}

/// Collapses a colour-class team distribution onto home/away/referee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamColorMap {
    pub classes: Vec<(String, TeamLabel)>,
}

impl Default for TeamColorMap {
    /// White jerseys are the away team; every dark colour is home.
    fn default() -> Self {
        let c = |name: &str, t| (name.to_string(), t);
        Self {
            classes: vec![
                c("blue", TeamLabel::Home),
                c("red", TeamLabel::Home),
                c("yellow", TeamLabel::Home),
                c("white", TeamLabel::Away),
                c("red-blue", TeamLabel::Home),
                c("referee", TeamLabel::Referee),
            ],
        }
    }
}

impl TeamColorMap {
    pub fn collapse(&self, color_probs: &[f64]) -> Result<TeamProbs> {
        if color_probs.len() != self.classes.len() {
            return Err(Error::Dimension {
                expected: self.classes.len(),
                actual: color_probs.len(),
            });
        }
        let mut out = [0.0; 3];
        for (p, (_, team)) in color_probs.iter().zip(&self.classes) {
            out[team.index()] += p;
        }
        Ok(TeamProbs(out))
    }
}

/// One line of a frame-score file. Exactly one of `probs`, `team_probs`
/// or `color_probs` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameScoreRecord {
    pub track_id: TrackId,
    pub frame: Frame,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub team_probs: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color_probs: Option<Vec<f64>>,
}

/// One line of a window-score file. `window_start` is the position of the
/// window's first detection within the track (0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowScoreRecord {
    pub track_id: TrackId,
    pub window_start: usize,
    pub probs: Vec<f64>,
}

/// Jersey and team scores loaded from JSON lines.
#[derive(Debug, Clone, Default)]
pub struct FileFrameScores {
    jersey: HashMap<(TrackId, Frame), ProbVector>,
    team: HashMap<(TrackId, Frame), TeamProbs>,
}

impl FileFrameScores {
    pub fn load(path: impl AsRef<Path>, colors: &TeamColorMap) -> Result<Self> {
        let mut scores = Self::default();
        for_each_line(path.as_ref(), |rec: FrameScoreRecord| {
            scores.insert(rec, colors)
        })?;
        Ok(scores)
    }

    pub fn from_records(
        records: impl IntoIterator<Item = FrameScoreRecord>,
        colors: &TeamColorMap,
    ) -> Result<Self> {
        let mut scores = Self::default();
        for rec in records {
            scores.insert(rec, colors)?;
        }
        Ok(scores)
    }

    fn insert(&mut self, rec: FrameScoreRecord, colors: &TeamColorMap) -> Result<()> {
        let key = (rec.track_id, rec.frame);
        match (rec.probs, rec.team_probs, rec.color_probs) {
            (Some(p), None, None) => {
                self.jersey.insert(key, ProbVector::new(p)?);
            }
            (None, Some(t), None) => {
                self.team.insert(key, TeamProbs(t));
            }
            (None, None, Some(c)) => {
                self.team.insert(key, colors.collapse(&c)?);
            }
            _ => {
                return Err(Error::Validation(format!(
                    "frame score for track {} frame {} must carry exactly one of probs, team_probs, color_probs",
                    rec.track_id, rec.frame
                )))
            }
        }
        Ok(())
    }

    pub fn has_jersey_scores(&self) -> bool {
        !self.jersey.is_empty()
    }

    pub fn has_team_scores(&self) -> bool {
        !self.team.is_empty()
    }
}

impl FrameScorer for FileFrameScores {
    fn jersey_probs(&self, track: &Track, pos: usize) -> Result<ProbVector> {
        let frame = track.detections()[pos].frame;
        self.jersey
            .get(&(track.track_id(), frame))
            .cloned()
            .ok_or_else(|| Error::MissingScores {
                track_id: track.track_id(),
                detail: format!("no jersey probabilities at frame {frame}"),
            })
    }
}

impl TeamScorer for FileFrameScores {
    fn team_probs(&self, track: &Track, pos: usize) -> Result<TeamProbs> {
        let frame = track.detections()[pos].frame;
        self.team
            .get(&(track.track_id(), frame))
            .copied()
            .ok_or_else(|| Error::MissingScores {
                track_id: track.track_id(),
                detail: format!("no team probabilities at frame {frame}"),
            })
    }
}

/// Window scores loaded from JSON lines.
#[derive(Debug, Clone, Default)]
pub struct FileWindowScores {
    windows: HashMap<(TrackId, usize), ProbVector>,
}

impl FileWindowScores {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut scores = Self::default();
        for_each_line(path.as_ref(), |rec: WindowScoreRecord| scores.insert(rec))?;
        Ok(scores)
    }

    pub fn from_records(records: impl IntoIterator<Item = WindowScoreRecord>) -> Result<Self> {
        let mut scores = Self::default();
        for rec in records {
            scores.insert(rec)?;
        }
        Ok(scores)
    }

    fn insert(&mut self, rec: WindowScoreRecord) -> Result<()> {
        self.windows
            .insert((rec.track_id, rec.window_start), ProbVector::new(rec.probs)?);
        Ok(())
    }
}

impl WindowScorer for FileWindowScores {
    fn window_probs(&self, track: &Track, start: usize, _len: usize) -> Result<ProbVector> {
        self.windows
            .get(&(track.track_id(), start))
            .cloned()
            .ok_or_else(|| Error::MissingScores {
                track_id: track.track_id(),
                detail: format!("no window probabilities at window_start {start}"),
            })
    }
}

fn for_each_line<T: serde::de::DeserializeOwned>(
    path: &Path,
    mut f: impl FnMut(T) -> Result<()>,
) -> Result<()> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: T = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        f(rec).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
    }
    Ok(())
}

/// Writes records as JSON lines.
pub fn write_jsonl<T: Serialize>(path: impl AsRef<Path>, records: &[T]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for rec in records {
        serde_json::to_writer(&mut out, rec).map_err(|e| Error::json(path, e))?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Window records for `track` from any scorer, covering the windows that
/// [`super::window_starts`] produces.
pub fn window_records(
    track: &Track,
    scorer: &dyn WindowScorer,
    window: usize,
    stride: usize,
) -> Result<Vec<WindowScoreRecord>> {
    super::window_starts(track.len(), window, stride)
        .map(|(start, len)| {
            Ok(WindowScoreRecord {
                track_id: track.track_id(),
                window_start: start,
                probs: scorer.window_probs(track, start, len)?.values().to_vec(),
            })
        })
        .collect()
}

/// Jersey and team frame records for `track` from any scorers.
pub fn frame_records(
    track: &Track,
    jersey: &dyn FrameScorer,
    team: &dyn TeamScorer,
) -> Result<Vec<FrameScoreRecord>> {
    let mut out = Vec::with_capacity(track.len() * 2);
    for (pos, d) in track.detections().iter().enumerate() {
        out.push(FrameScoreRecord {
            track_id: track.track_id(),
            frame: d.frame,
            probs: Some(jersey.jersey_probs(track, pos)?.values().to_vec()),
            team_probs: None,
            color_probs: None,
        });
        out.push(FrameScoreRecord {
            track_id: track.track_id(),
            frame: d.frame,
            probs: None,
            team_probs: Some(team.team_probs(track, pos)?.0),
            color_probs: None,
        });
    }
    Ok(out)
}
