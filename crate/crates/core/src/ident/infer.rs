//! Sliding-window jersey inference over a tracklet.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::core::prob::argmax_where;
use crate::core::{ClassVocabulary, ProbVector, Track};
use crate::error::{Error, Result};

use super::scorer::{FrameScorer, WindowScorer};
use super::{EmptyFilteredPolicy, IdentParams};

/// Visibility thresholds evaluated when choosing `theta`.
pub const PRESENCE_THETAS: [f64; 6] = [0.0033, 0.01, 0.03, 0.09, 0.27, 0.81];

/// `(start, len)` of each window over `k` detections. A tracklet shorter
/// than `window` gets a single window covering all of it.
pub fn window_starts(
    k: usize,
    window: usize,
    stride: usize,
) -> impl Iterator<Item = (usize, usize)> {
    let (len, last_start) = if k <= window { (k, 0) } else { (window, k - window) };
    (0..=last_start).step_by(stride.max(1)).map(move |s| (s, len))
}

/// Window distributions for `track`, in window order.
pub fn window_probs(
    track: &Track,
    scorer: &dyn WindowScorer,
    params: &IdentParams,
) -> Result<Vec<ProbVector>> {
    window_starts(track.len(), params.window, params.stride)
        .map(|(start, len)| scorer.window_probs(track, start, len))
        .collect()
}

/// True as soon as one detection has null probability strictly below `theta`.
pub fn jersey_visible(track: &Track, scorer: &dyn FrameScorer, theta: f64) -> Result<bool> {
    for pos in 0..track.len() {
        if scorer.jersey_probs(track, pos)?.null_prob() < theta {
            return Ok(true);
        }
    }
    Ok(false)
}

fn check_dims(probs: &[ProbVector], classes: usize) -> Result<()> {
    match probs.iter().find(|p| p.len() != classes) {
        Some(p) => Err(Error::Dimension {
            expected: classes,
            actual: p.len(),
        }),
        None => Ok(()),
    }
}

/// Averages the non-null windows of a visible tracklet.
///
/// Returns the class index (null is `vocab.null_index()`) and the averaged
/// distribution. Invisible tracklets return null with a one-hot null
/// distribution. When every window is null-argmax, all windows are averaged
/// and the best non-null class is returned.
pub fn aggregate(
    probs: &[ProbVector],
    visible: bool,
    vocab: &ClassVocabulary,
) -> Result<(usize, ProbVector)> {
    Aggregation::proposed().apply(probs, visible, vocab, EmptyFilteredPolicy::AverageAll)
}

/// Mode of the non-null window argmaxes; ties go to the lower class.
pub fn aggregate_majority(
    probs: &[ProbVector],
    visible: bool,
    vocab: &ClassVocabulary,
) -> Result<usize> {
    Aggregation::majority()
        .apply(probs, visible, vocab, EmptyFilteredPolicy::AverageAll)
        .map(|(c, _)| c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationMethod {
    /// Mean of window probabilities.
    #[serde(alias = "avg")]
    Averaging,
    /// Vote over window argmaxes.
    Majority,
}

/// Tracklet aggregation strategy, including the ablated variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Aggregation {
    pub method: AggregationMethod,
    /// Gate on the per-frame null probability; when off every tracklet is
    /// treated as visible.
    pub visibility_filter: bool,
    /// Drop windows whose argmax is null before combining.
    pub post_process: bool,
}

impl Default for Aggregation {
    fn default() -> Self {
        Self::proposed()
    }
}

impl Aggregation {
    pub fn proposed() -> Self {
        Self {
            method: AggregationMethod::Averaging,
            visibility_filter: true,
            post_process: true,
        }
    }

    pub fn majority() -> Self {
        Self {
            method: AggregationMethod::Majority,
            ..Self::proposed()
        }
    }

    pub fn probability_averaging() -> Self {
        Self {
            method: AggregationMethod::Averaging,
            visibility_filter: false,
            post_process: false,
        }
    }

    pub fn without_post_processing() -> Self {
        Self {
            post_process: false,
            ..Self::proposed()
        }
    }

    pub fn without_visibility_filter() -> Self {
        Self {
            visibility_filter: false,
            ..Self::proposed()
        }
    }

    /// The ablation rows, in report order.
    pub fn ablation_rows() -> [(&'static str, Aggregation); 5] {
        [
            ("Majority voting", Self::majority()),
            ("Probability averaging", Self::probability_averaging()),
            ("Proposed w/o postprocessing", Self::without_post_processing()),
            ("Proposed w/o visibility filtering", Self::without_visibility_filter()),
            ("Proposed", Self::proposed()),
        ]
    }

    /// Combines window distributions into `(class, p_jn)`.
    ///
    /// `visible` is the visibility-filter outcome and is ignored when the
    /// filter is disabled. For majority voting `p_jn` is the vote share of
    /// each class, so roster masking picks the most-voted admissible class.
    pub fn apply(
        &self,
        probs: &[ProbVector],
        visible: bool,
        vocab: &ClassVocabulary,
        policy: EmptyFilteredPolicy,
    ) -> Result<(usize, ProbVector)> {
        if probs.is_empty() {
            return Err(Error::Empty("window probabilities"));
        }
        let classes = vocab.class_count();
        let null = vocab.null_index();
        check_dims(probs, classes)?;

        if self.visibility_filter && !visible {
            return Ok((null, ProbVector::one_hot(classes, null)));
        }

        let kept: Vec<&ProbVector> = if self.post_process {
            probs.iter().filter(|p| p.argmax() != null).collect()
        } else {
            probs.iter().collect()
        };

        if kept.is_empty() {
            return match policy {
                EmptyFilteredPolicy::StrictNull => Ok((null, ProbVector::one_hot(classes, null))),
                EmptyFilteredPolicy::AverageAll => {
                    let mean = ProbVector::mean(probs)?;
                    let class = argmax_where(mean.values(), |i| i != null).unwrap_or(null);
                    Ok((class, mean))
                }
            };
        }

        match self.method {
            AggregationMethod::Averaging => {
                let mean = ProbVector::mean(kept)?;
                Ok((mean.argmax(), mean))
            }
            AggregationMethod::Majority => {
                let mut votes: BTreeMap<usize, usize> = BTreeMap::new();
                for p in &kept {
                    *votes.entry(p.argmax()).or_default() += 1;
                }
                let mut best = (0usize, 0usize);
                for (&class, &n) in &votes {
                    if n > best.1 {
                        best = (class, n);
                    }
                }
                let total = kept.len() as f64;
                let mut share = vec![0.0; classes];
                for (&class, &n) in &votes {
                    share[class] = n as f64 / total;
                }
                Ok((best.0, ProbVector::from_weights(share)?))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaPoint {
    pub theta: f64,
    /// Fraction of tracklets whose visibility decision matches the label.
    pub accuracy: f64,
}

/// Jersey-presence accuracy of the visibility filter for each threshold.
///
/// `labeled` pairs each tracklet with whether a number is truly present.
pub fn theta_sweep(
    labeled: &[(Track, bool)],
    scorer: &dyn FrameScorer,
    thetas: &[f64],
) -> Result<Vec<ThetaPoint>> {
    if labeled.is_empty() {
        return Err(Error::Empty("labeled tracklets"));
    }
    // Minimum null probability per tracklet decides visibility at every theta.
    let mins: Vec<(f64, bool)> = labeled
        .iter()
        .map(|(t, present)| {
            let mut min = f64::INFINITY;
            for pos in 0..t.len() {
                min = min.min(scorer.jersey_probs(t, pos)?.null_prob());
            }
            Ok((min, *present))
        })
        .collect::<Result<_>>()?;
    Ok(thetas
        .iter()
        .map(|&theta| {
            let correct = mins.iter().filter(|(m, present)| (*m < theta) == *present).count();
            ThetaPoint {
                theta,
                accuracy: correct as f64 / mins.len() as f64,
            }
        })
        .collect())
}
