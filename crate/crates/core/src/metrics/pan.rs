use serde::{Deserialize, Serialize};

use crate::core::Track;

/// Gap thresholds swept when plotting pan-switch proportions: 40 to 80
/// frames in steps of 5.
pub fn default_deltas() -> Vec<u32> {
    (40..=80).step_by(5).collect()
}

/// Consecutive ground-truth detections more than `delta` frames apart,
/// summed over all trajectories. Each such gap is an expected pan switch.
pub fn pan_idsw(gt: &[Track], delta: u32) -> usize {
    gt.iter()
        .map(|t| {
            t.detections()
                .windows(2)
                .filter(|w| w[1].frame - w[0].frame > delta)
                .count()
        })
        .sum()
}

/// Share of identity switches attributable to panning; `None` without
/// switches.
pub fn pan_proportion(pan: usize, idsw: usize) -> Option<f64> {
    (idsw > 0).then(|| pan as f64 / idsw as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanPoint {
    pub delta: u32,
    pub pan_idsw: usize,
    pub proportion: Option<f64>,
}

pub fn pan_sweep(gt: &[Track], idsw: usize, deltas: &[u32]) -> Vec<PanPoint> {
    deltas
        .iter()
        .map(|&delta| {
            let pan = pan_idsw(gt, delta);
            PanPoint {
                delta,
                pan_idsw: pan,
                proportion: pan_proportion(pan, idsw),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{BoundingBox, Detection, Frame};
    use proptest::prelude::*;

    fn track(frames: &[Frame]) -> Track {
        let bb = BoundingBox::new(0.0, 0.0, 1.0, 1.0).unwrap();
        Track::new(1, frames.iter().map(|&f| Detection::new(f, bb, 1.0).unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn counts_long_gaps() {
        // Gaps 1, 1, 50, 1.
        assert_eq!(pan_idsw(&[track(&[0, 1, 2, 52, 53])], 40), 1);
        assert_eq!(pan_idsw(&[track(&[0, 1, 2, 3, 4])], 40), 0);
        let three: Vec<Track> = (0..3).map(|_| track(&[0, 45, 46])).collect();
        assert_eq!(pan_idsw(&three, 40), 3);
        // Strictly greater than delta.
        assert_eq!(pan_idsw(&[track(&[0, 40])], 40), 0);
        assert_eq!(pan_idsw(&[track(&[0, 41])], 40), 1);
    }

    #[test]
    fn proportions() {
        assert_eq!(pan_proportion(27, 30), Some(0.9));
        assert_eq!(pan_proportion(0, 30), Some(0.0));
        assert_eq!(pan_proportion(3, 0), None);
        assert_eq!(default_deltas(), vec![40, 45, 50, 55, 60, 65, 70, 75, 80]);
    }

    proptest! {
        #[test]
        fn sweep_is_non_increasing(gaps in prop::collection::vec(1u32..120, 1..30)) {
            let mut frames = vec![0];
            for g in gaps {
                let last = *frames.last().unwrap();
                frames.push(last + g);
            }
            let sweep = pan_sweep(&[track(&frames)], 10, &default_deltas());
            for w in sweep.windows(2) {
                prop_assert!(w[1].pan_idsw <= w[0].pan_idsw);
            }
        }
    }
}
