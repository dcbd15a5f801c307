//! Tracklet-level identification: team voting, sliding-window jersey
//! inference with visibility filtering, and roster masking.

mod infer;
mod pipeline;
pub mod scorer;
mod team;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use infer::{
    aggregate, aggregate_majority, jersey_visible, theta_sweep, window_probs, window_starts,
    Aggregation, AggregationMethod, ThetaPoint, PRESENCE_THETAS,
};
pub use pipeline::{identify, run_pipeline, PipelineParams, Scorers, TrackIdentity};
pub use scorer::{FrameScorer, TeamProbs, TeamScorer, WindowScorer};
pub use team::team_vote;

/// What to do when a tracklet passes the visibility filter but every window
/// argmaxes to null.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyFilteredPolicy {
    /// Average all windows and take the best non-null class.
    #[default]
    AverageAll,
    /// Report null.
    StrictNull,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IdentParams {
    /// Visibility threshold on the per-frame null probability.
    pub theta: f64,
    /// Sliding-window length in detections.
    pub window: usize,
    pub stride: usize,
    pub empty_filtered: EmptyFilteredPolicy,
}

impl Default for IdentParams {
    fn default() -> Self {
        Self {
            theta: 0.01,
            window: 30,
            stride: 1,
            empty_filtered: EmptyFilteredPolicy::AverageAll,
        }
    }
}

impl IdentParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::Validation(format!(
                "theta must be in (0, 1), got {}",
                self.theta
            )));
        }
        if self.window == 0 || self.stride == 0 {
            return Err(Error::Validation("window and stride must be at least 1".into()));
        }
        Ok(())
    }
}
