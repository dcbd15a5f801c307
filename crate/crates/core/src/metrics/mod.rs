//! CLEAR MOT matching, MOTA, IDF1, identity switches and the pan
//! identity-switch estimator.

mod clear;
mod idf1;
mod pan;
mod report;

use serde::{Deserialize, Serialize};

pub use clear::{count_idsw, match_frames, mota, switch_count, FrameMatch, FrameMatching};
pub use idf1::{idf1, Idf1};
pub use pan::{default_deltas, pan_idsw, pan_proportion, pan_sweep, PanPoint};
pub use report::{
    evaluate_video, format_ablation_table, format_identification_table, format_method_table,
    format_tracking_table, macro_f1, AblationRow, EvalReport, IdentificationAccuracy,
    VideoMetrics,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricsParams {
    /// Minimum IoU for a ground-truth/prediction match.
    pub iou_threshold: f64,
    /// Frame gap above which a ground-truth gap counts as a pan exit.
    pub delta: u32,
    pub sweep_deltas: Vec<u32>,
}

impl Default for MetricsParams {
    fn default() -> Self {
        Self {
            iou_threshold: 0.5,
            delta: 40,
            sweep_deltas: default_deltas(),
        }
    }
}
