use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::core::files::read_json;
use crate::core::{load_rosters, load_vocabulary, ClassVocabulary};
use crate::error::{Error, Result};
use crate::ident::scorer::TeamColorMap;
use crate::ident::{Aggregation, IdentParams};
use crate::metrics::MetricsParams;
use crate::sim::ScenarioConfig;
use crate::tracker::TrackerParams;

/// Input files for one video. Relative paths resolve against the directory
/// of the config file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VideoConfig {
    pub name: String,
    pub detections: Option<PathBuf>,
    pub ground_truth: Option<PathBuf>,
    /// Tracker output; when absent the tracker runs on `detections`.
    pub tracks: Option<PathBuf>,
    pub rosters: Option<PathBuf>,
    /// Ground-truth identities (`identities.json` of a simulated bundle).
    pub identities: Option<PathBuf>,
    pub frame_scores: Option<PathBuf>,
    pub window_scores: Option<PathBuf>,
    /// `scenario.json` of a simulated bundle. Its oracle scorers are used
    /// when no score files are given.
    pub scenario: Option<PathBuf>,
}

/// Everything a run needs, in one JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub vocabulary: Option<PathBuf>,
    pub videos: Vec<VideoConfig>,
    /// Scenario simulated by `pipeline` before the listed videos.
    pub scenario: Option<ScenarioConfig>,
    pub tracker: TrackerParams,
    pub ident: IdentParams,
    pub metrics: MetricsParams,
    pub aggregation: Aggregation,
    pub roster_masking: bool,
    pub team_colors: TeamColorMap,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            vocabulary: None,
            videos: Vec::new(),
            scenario: None,
            tracker: TrackerParams::default(),
            ident: IdentParams::default(),
            metrics: MetricsParams::default(),
            aggregation: Aggregation::proposed(),
            roster_masking: true,
            team_colors: TeamColorMap::default(),
        }
    }
}

/// Scenario file written next to a simulated bundle.
#[derive(Debug, Clone, Deserialize)]
pub(crate) struct SeededScenario {
    pub seed: u64,
    pub config: ScenarioConfig,
}

impl RunConfig {
    /// Loads `path`, resolves relative paths and validates the result.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: RunConfig = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve(base);
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(p) = p.as_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        fix(&mut self.vocabulary);
        for v in &mut self.videos {
            for p in [
                &mut v.detections,
                &mut v.ground_truth,
                &mut v.tracks,
                &mut v.rosters,
                &mut v.identities,
                &mut v.frame_scores,
                &mut v.window_scores,
                &mut v.scenario,
            ] {
                fix(p);
            }
        }
    }

    /// Checks parameters and that every referenced file exists.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.ident.validate().map_err(|e| Error::Config(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.tracker.iou_threshold)
            || !(0.0..=1.0).contains(&self.metrics.iou_threshold)
        {
            return bad("IoU thresholds must be in [0, 1]".into());
        }
        if let Some(s) = &self.scenario {
            s.validate()?;
        }
        let mut names = std::collections::BTreeSet::new();
        for v in &self.videos {
            if v.name.is_empty() {
                return bad("every video needs a name".into());
            }
            if !names.insert(&v.name) {
                return bad(format!("duplicate video name {:?}", v.name));
            }
            if v.detections.is_none() && v.tracks.is_none() {
                return bad(format!("video {:?} has neither detections nor tracks", v.name));
            }
            if v.frame_scores.is_some() != v.window_scores.is_some() {
                return bad(format!(
                    "video {:?} needs both frame_scores and window_scores",
                    v.name
                ));
            }
        }
        for p in self.paths() {
            if !p.is_file() {
                return bad(format!("file not found: {}", p.display()));
            }
        }
        Ok(())
    }

    fn paths(&self) -> impl Iterator<Item = &PathBuf> {
        self.vocabulary.iter().chain(self.videos.iter().flat_map(|v| {
            [
                &v.detections,
                &v.ground_truth,
                &v.tracks,
                &v.rosters,
                &v.identities,
                &v.frame_scores,
                &v.window_scores,
                &v.scenario,
            ]
            .into_iter()
            .flatten()
        }))
    }

    pub fn vocab(&self) -> Result<ClassVocabulary> {
        match &self.vocabulary {
            Some(p) => load_vocabulary(p),
            None => Ok(ClassVocabulary::default()),
        }
    }
}

impl VideoConfig {
    pub(crate) fn rosters(&self) -> Result<Option<crate::core::Rosters>> {
        self.rosters.as_deref().map(load_rosters).transpose()
    }
}
