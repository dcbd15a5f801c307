//! Synthetic rink scenarios with ground truth and oracle scorers.
//!
//! Players move piecewise-linearly with Poisson-timed direction changes,
//! the camera pans across a wider rink (players leaving the view create
//! ground-truth gaps), detections are derived from ground truth with
//! configurable misses, false alarms and jitter, and per-frame latent
//! visibility/confusion state drives the scorer outputs.

mod config;
mod generate;
mod oracle;

pub use config::{
    Confusion, DetectionNoise, Layout, MotionConfig, PanKeyframe, ScenarioConfig, ScorerModel,
};
pub use generate::{generate, EntityTruth, GroundTruthBundle, PanExit, BUNDLE_FILES};
pub use oracle::OracleScorers;
