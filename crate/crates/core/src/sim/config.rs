use serde::{Deserialize, Serialize};

use crate::core::{ClassVocabulary, Rosters};
use crate::error::{Error, Result};

/// Camera offset (left edge of the view in rink pixels) at a frame.
/// Offsets between keyframes are interpolated linearly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanKeyframe {
    pub frame: u32,
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Each entity roams its own grid cell, so boxes never overlap.
    Cells,
    /// Entities roam the whole rink and may cross.
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MotionConfig {
    /// Speed range in pixels per frame.
    pub speed_min: f64,
    pub speed_max: f64,
    /// Expected direction changes per frame.
    pub direction_change_rate: f64,
    pub layout: Layout,
}

impl Default for MotionConfig {
    fn default() -> Self {
        Self {
            speed_min: 1.0,
            speed_max: 4.0,
            direction_change_rate: 0.02,
            layout: Layout::Cells,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectionNoise {
    /// Chance of a spurious box per visible object and frame.
    pub fp_rate: f64,
    /// Chance a visible object is missed.
    pub fn_rate: f64,
    /// Standard deviation of box position jitter in pixels.
    pub jitter_sigma: f64,
}

impl DetectionNoise {
    pub fn is_zero(&self) -> bool {
        self.fp_rate == 0.0 && self.fn_rate == 0.0 && self.jitter_sigma == 0.0
    }
}

/// A systematic misreading: `from` is shown as `to` with probability `prob`
/// on each visible frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Confusion {
    pub from: u8,
    pub to: u8,
    pub prob: f64,
}

/// Shape of the synthetic classifier outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScorerModel {
    /// Null mass given to frames where the number is hidden is at least
    /// `1 - hidden_epsilon`.
    pub hidden_epsilon: f64,
    /// Visible frames draw their null probability log-uniformly from this
    /// range.
    pub visible_null_range: (f64, f64),
    /// Visible detections in a window at which its non-null mass reaches one
    /// half.
    pub window_half_visible: f64,
    /// Share of window mass given to a partial-digit misreading when a single
    /// frame is visible; decays with more visible frames.
    pub misread: f64,
    /// Visible-frame count over which the misreading share decays by `1/e`.
    pub misread_scale: f64,
    /// Uniform floor mixed into every window distribution.
    pub floor: f64,
    /// Mean length, in frames, of a run of visible frames.
    pub visible_run: f64,
    /// Per-frame chance that a hidden number shows a fragment, giving a
    /// moderate null probability with the rest on a lookalike class.
    pub glimpse_rate: f64,
    /// Null-probability range of such fragments, sampled log-uniformly.
    pub glimpse_null_range: (f64, f64),
}

impl Default for ScorerModel {
    fn default() -> Self {
        Self {
            hidden_epsilon: 0.02,
            visible_null_range: (1e-4, 0.05),
            window_half_visible: 2.0,
            misread: 0.8,
            misread_scale: 3.0,
            floor: 0.01,
            visible_run: 15.0,
            glimpse_rate: 0.002,
            glimpse_null_range: (0.02, 0.9),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub players_per_team: usize,
    pub num_referees: usize,
    /// Frames.
    pub duration: u32,
    pub fps: u32,
    pub camera_width: f64,
    pub camera_height: f64,
    /// Width of the rink in pixels; wider than the camera enables panning.
    pub rink_width: f64,
    pub box_width: f64,
    pub box_height: f64,
    pub pan_profile: Vec<PanKeyframe>,
    pub motion: MotionConfig,
    pub detection_noise: DetectionNoise,
    pub confusion: Vec<Confusion>,
    /// Long-run fraction of frames with the number readable, for players
    /// whose number can be read at all.
    pub visibility_profile: f64,
    /// Fraction of players whose number is never readable.
    pub null_rate: f64,
    /// Chance a frame's team score points at a wrong team.
    pub team_error_rate: f64,
    pub rosters: Rosters,
    /// Jersey vocabulary; the default 85-number vocabulary when absent.
    pub vocabulary: Option<Vec<u8>>,
    pub scorer: ScorerModel,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            players_per_team: 10,
            num_referees: 2,
            duration: 900,
            fps: 30,
            camera_width: 1280.0,
            camera_height: 720.0,
            rink_width: 1280.0,
            box_width: 40.0,
            box_height: 80.0,
            pan_profile: Vec::new(),
            motion: MotionConfig::default(),
            detection_noise: DetectionNoise::default(),
            confusion: Vec::new(),
            visibility_profile: 1.0,
            null_rate: 0.5,
            team_error_rate: 0.0,
            rosters: Rosters {
                home: [2, 3, 5, 6, 9, 11, 13, 15, 17, 19, 21, 22, 24, 26, 27, 29, 33, 37, 44, 55]
                    .into_iter()
                    .collect(),
                away: [4, 7, 8, 10, 12, 14, 16, 18, 20, 23, 25, 28, 30, 31, 34, 38, 41, 48, 52, 61]
                    .into_iter()
                    .collect(),
            },
            vocabulary: None,
            scorer: ScorerModel::default(),
        }
    }
}

fn unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Infeasible(format!("{name} must be in [0, 1], got {v}")))
    }
}

impl ScenarioConfig {
    pub fn vocabulary(&self) -> Result<ClassVocabulary> {
        match &self.vocabulary {
            Some(labels) => ClassVocabulary::new(labels.clone()),
            None => Ok(ClassVocabulary::default()),
        }
    }

    pub fn entity_count(&self) -> usize {
        2 * self.players_per_team + self.num_referees
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration < 1 {
            return Err(Error::Infeasible("duration must be at least one frame".into()));
        }
        if self.fps == 0 {
            return Err(Error::Infeasible("fps must be positive".into()));
        }
        unit("fp_rate", self.detection_noise.fp_rate)?;
        unit("fn_rate", self.detection_noise.fn_rate)?;
        unit("visibility_profile", self.visibility_profile)?;
        unit("null_rate", self.null_rate)?;
        unit("team_error_rate", self.team_error_rate)?;
        let sc = &self.scorer;
        unit("hidden_epsilon", sc.hidden_epsilon)?;
        unit("misread", sc.misread)?;
        unit("floor", sc.floor)?;
        unit("glimpse_rate", sc.glimpse_rate)?;
        for (name, (lo, hi)) in [
            ("visible_null_range", sc.visible_null_range),
            ("glimpse_null_range", sc.glimpse_null_range),
        ] {
            if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
                return Err(Error::Infeasible(format!("{name} must satisfy 0 < lo <= hi <= 1")));
            }
        }
        if !(sc.visible_run >= 1.0 && sc.window_half_visible > 0.0 && sc.misread_scale > 0.0) {
            return Err(Error::Infeasible(
                "visible_run must be at least 1; window_half_visible and misread_scale positive".into(),
            ));
        }
        for c in &self.confusion {
            unit("confusion prob", c.prob)?;
        }
        if self.detection_noise.jitter_sigma < 0.0 {
            return Err(Error::Infeasible("jitter_sigma must be non-negative".into()));
        }
        if !(self.box_width > 0.0 && self.box_height > 0.0) {
            return Err(Error::Infeasible("box size must be positive".into()));
        }
        if self.rink_width < self.camera_width {
            return Err(Error::Infeasible("rink narrower than the camera view".into()));
        }
        if self.box_width > self.rink_width || self.box_height > self.camera_height {
            return Err(Error::Infeasible("box larger than the rink".into()));
        }
        let m = &self.motion;
        if !(m.speed_min >= 0.0 && m.speed_max >= m.speed_min) {
            return Err(Error::Infeasible("speed range is empty".into()));
        }
        if m.direction_change_rate < 0.0 {
            return Err(Error::Infeasible("direction_change_rate must be non-negative".into()));
        }
        for (team, roster) in [("home", &self.rosters.home), ("away", &self.rosters.away)] {
            if roster.len() < self.players_per_team {
                return Err(Error::Infeasible(format!(
                    "{team} roster has {} numbers for {} players",
                    roster.len(),
                    self.players_per_team
                )));
            }
        }
        let vocab = self.vocabulary()?;
        self.rosters.vectors(&vocab)?;
        for c in &self.confusion {
            for n in [c.from, c.to] {
                if vocab.index_of(n).is_none() {
                    return Err(Error::OutOfVocabulary(vec![n]));
                }
            }
        }
        let s = &self.scorer;
        unit("hidden_epsilon", s.hidden_epsilon)?;
        unit("misread", s.misread)?;
        unit("floor", s.floor)?;
        let (lo, hi) = s.visible_null_range;
        if !(lo > 0.0 && hi >= lo && hi < 1.0) {
            return Err(Error::Infeasible("visible_null_range must satisfy 0 < lo <= hi < 1".into()));
        }
        if s.window_half_visible <= 0.0 || s.misread_scale <= 0.0 || s.visible_run < 1.0 {
            return Err(Error::Infeasible("scorer scales must be positive".into()));
        }
        Ok(())
    }
}
