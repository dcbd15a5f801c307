//! Per-video evaluation and the text tables printed by the CLI.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::core::{Identity, Track, TrackId};
use crate::error::Result;
use crate::ident::{Aggregation, TrackIdentity};

use super::clear::{count_idsw, match_frames, mota};
use super::idf1::{idf1, overlap_counts, Idf1};
use super::pan::{pan_idsw, pan_proportion, pan_sweep, PanPoint};
use super::MetricsParams;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IdentificationAccuracy {
    /// Predicted tracks that overlap some ground-truth identity.
    pub tracks: usize,
    pub correct_without_roster: usize,
    pub correct_with_roster: usize,
    pub without_roster: f64,
    pub with_roster: f64,
}

impl IdentificationAccuracy {
    fn from_counts(tracks: usize, without: usize, with: usize) -> Self {
        let ratio = |c: usize| if tracks == 0 { 0.0 } else { c as f64 / tracks as f64 };
        Self {
            tracks,
            correct_without_roster: without,
            correct_with_roster: with,
            without_roster: ratio(without),
            with_roster: ratio(with),
        }
    }

    /// Scores `identities` against the label of the ground-truth object each
    /// predicted track overlaps most (lowest gt id on ties). Tracks that
    /// overlap nothing are skipped.
    pub fn evaluate(
        gt: &[Track],
        labels: &HashMap<TrackId, Identity>,
        pred: &[Track],
        identities: &[TrackIdentity],
        iou_threshold: f64,
    ) -> Self {
        let truth = dominant_labels(gt, labels, pred, iou_threshold);
        let (mut n, mut without, mut with) = (0, 0, 0);
        for id in identities {
            let Some(label) = truth.get(&id.track_id) else { continue };
            n += 1;
            without += usize::from(id.unmasked == *label);
            with += usize::from(id.identity == *label);
        }
        Self::from_counts(n, without, with)
    }
}

/// Ground-truth label for each predicted track that overlaps ground truth.
pub(crate) fn dominant_labels(
    gt: &[Track],
    labels: &HashMap<TrackId, Identity>,
    pred: &[Track],
    iou_threshold: f64,
) -> HashMap<TrackId, Identity> {
    let counts = overlap_counts(gt, pred, iou_threshold);
    let mut out = HashMap::new();
    for (j, p) in pred.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..gt.len() {
            let c = counts[(i, j)];
            if c > 0.0 && best.is_none_or(|(bi, bc)| c > bc || (c == bc && gt[i].track_id() < gt[bi].track_id())) {
                best = Some((i, c));
            }
        }
        if let Some((i, _)) = best {
            if let Some(label) = labels.get(&gt[i].track_id()) {
                out.insert(p.track_id(), *label);
            }
        }
    }
    out
}

/// Macro-averaged F1 over every label seen in truth or prediction.
pub fn macro_f1(pairs: &[(Identity, Identity)]) -> f64 {
    let classes: BTreeSet<Identity> = pairs.iter().flat_map(|(t, p)| [*t, *p]).collect();
    if classes.is_empty() {
        return 0.0;
    }
    let total: f64 = classes
        .iter()
        .map(|c| {
            let tp = pairs.iter().filter(|(t, p)| t == c && p == c).count() as f64;
            let fp = pairs.iter().filter(|(t, p)| t != c && p == c).count() as f64;
            let fn_ = pairs.iter().filter(|(t, p)| t == c && p != c).count() as f64;
            if tp == 0.0 {
                0.0
            } else {
                2.0 * tp / (2.0 * tp + fp + fn_)
            }
        })
        .sum();
    total / classes.len() as f64
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VideoMetrics {
    pub name: String,
    pub mota: f64,
    pub idf1: f64,
    pub idsw: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub gt: usize,
    pub idtp: usize,
    pub idfp: usize,
    pub idfn: usize,
    /// Expected pan switches at the configured delta.
    pub pan_idsw: usize,
    pub pan_proportion: Option<f64>,
    pub pan_sweep: Vec<PanPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identification: Option<IdentificationAccuracy>,
}

pub fn evaluate_video(
    name: &str,
    gt: &[Track],
    pred: &[Track],
    params: &MetricsParams,
) -> Result<VideoMetrics> {
    let matching = match_frames(gt, pred, params.iou_threshold);
    let (fp, fn_, gt_total) = (
        matching.false_positives(),
        matching.false_negatives(),
        matching.gt_total(),
    );
    let idsw = count_idsw(&matching);
    let id = idf1(gt, pred, params.iou_threshold);
    let pan = pan_idsw(gt, params.delta);
    Ok(VideoMetrics {
        name: name.to_string(),
        mota: mota(fp, fn_, idsw, gt_total)?,
        idf1: id.idf1,
        idsw,
        fp,
        fn_,
        gt: gt_total,
        idtp: id.idtp,
        idfp: id.idfp,
        idfn: id.idfn,
        pan_idsw: pan,
        pan_proportion: pan_proportion(pan, idsw),
        pan_sweep: pan_sweep(gt, idsw, &params.sweep_deltas),
        identification: None,
    })
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub videos: Vec<VideoMetrics>,
    pub aggregate: VideoMetrics,
}

impl EvalReport {
    /// Pools error counts across videos; identification accuracy is the
    /// mean of per-video accuracies.
    pub fn new(videos: Vec<VideoMetrics>) -> Result<Self> {
        let sum = |f: fn(&VideoMetrics) -> usize| videos.iter().map(f).sum::<usize>();
        let (fp, fn_, idsw, gt) = (sum(|v| v.fp), sum(|v| v.fn_), sum(|v| v.idsw), sum(|v| v.gt));
        let id = Idf1::from_counts(sum(|v| v.idtp), sum(|v| v.idfp), sum(|v| v.idfn));
        let pan = sum(|v| v.pan_idsw);

        let mut sweep: BTreeMap<u32, usize> = BTreeMap::new();
        for v in &videos {
            for p in &v.pan_sweep {
                *sweep.entry(p.delta).or_default() += p.pan_idsw;
            }
        }
        let idents: Vec<&IdentificationAccuracy> =
            videos.iter().filter_map(|v| v.identification.as_ref()).collect();
        let identification = (!idents.is_empty()).then(|| {
            let n = idents.len() as f64;
            IdentificationAccuracy {
                tracks: idents.iter().map(|a| a.tracks).sum(),
                correct_without_roster: idents.iter().map(|a| a.correct_without_roster).sum(),
                correct_with_roster: idents.iter().map(|a| a.correct_with_roster).sum(),
                without_roster: idents.iter().map(|a| a.without_roster).sum::<f64>() / n,
                with_roster: idents.iter().map(|a| a.with_roster).sum::<f64>() / n,
            }
        });
        let aggregate = VideoMetrics {
            name: "all".into(),
            mota: if gt == 0 { 0.0 } else { mota(fp, fn_, idsw, gt)? },
            idf1: id.idf1,
            idsw,
            fp,
            fn_,
            gt,
            idtp: id.idtp,
            idfp: id.idfp,
            idfn: id.idfn,
            pan_idsw: pan,
            pan_proportion: pan_proportion(pan, idsw),
            pan_sweep: sweep
                .into_iter()
                .map(|(delta, pan_idsw)| PanPoint {
                    delta,
                    pan_idsw,
                    proportion: pan_proportion(pan_idsw, idsw),
                })
                .collect(),
            identification,
        };
        Ok(Self { videos, aggregate })
    }

    /// CSV of pan proportions per video and delta.
    pub fn sweep_csv(&self) -> String {
        let mut out = String::from("video,delta,pan_idsw,idsw,proportion\n");
        for v in self.videos.iter().chain(std::iter::once(&self.aggregate)) {
            for p in &v.pan_sweep {
                let prop = p.proportion.map(|x| format!("{x:.6}")).unwrap_or_default();
                let _ = writeln!(out, "{},{},{},{},{}", v.name, p.delta, p.pan_idsw, v.idsw, prop);
            }
        }
        out
    }
}

fn pct(x: f64) -> String {
    format!("{:.1}", x * 100.0)
}

/// Per-video IDF1, MOTA, ID switches, FP and FN, plus the pooled row.
pub fn format_tracking_table(report: &EvalReport) -> String {
    let rows: Vec<(String, &VideoMetrics)> = report
        .videos
        .iter()
        .map(|v| (v.name.clone(), v))
        .chain(std::iter::once(("Total".to_string(), &report.aggregate)))
        .collect();
    tracking_rows("Video", &rows)
}

/// Same columns, one row per tracking method.
pub fn format_method_table(rows: &[(String, &VideoMetrics)]) -> String {
    tracking_rows("Method", rows)
}

fn tracking_rows(first: &str, rows: &[(String, &VideoMetrics)]) -> String {
    let header = [first, "IDF1", "MOTA", "ID-switches", "FP", "FN"];
    let body: Vec<[String; 6]> = rows
        .iter()
        .map(|(name, v)| {
            [
                name.clone(),
                pct(v.idf1),
                pct(v.mota),
                v.idsw.to_string(),
                v.fp.to_string(),
                v.fn_.to_string(),
            ]
        })
        .collect();
    render(&header, &body)
}

/// Per-video identification accuracy without and with roster vectors, plus
/// the mean row.
pub fn format_identification_table(rows: &[(String, IdentificationAccuracy)]) -> String {
    let header = ["Video", "Without roster vectors", "With roster vectors"];
    let mut body: Vec<[String; 3]> = rows
        .iter()
        .map(|(n, a)| [n.clone(), pct(a.without_roster), pct(a.with_roster)])
        .collect();
    if !rows.is_empty() {
        let n = rows.len() as f64;
        let mean = |f: fn(&IdentificationAccuracy) -> f64| rows.iter().map(|(_, a)| f(a)).sum::<f64>() / n;
        body.push([
            "Mean".into(),
            pct(mean(|a| a.without_roster)),
            pct(mean(|a| a.with_roster)),
        ]);
    }
    render(&header, &body)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub method: String,
    pub aggregation: Aggregation,
    pub accuracy: f64,
    pub macro_f1: f64,
}

/// Accuracy and F1 per aggregation variant with its filter/post-process flags.
pub fn format_ablation_table(rows: &[AblationRow]) -> String {
    let header = ["Method", "Accuracy", "F1 score", "Visibility filtering", "Postprocessing"];
    let tick = |b: bool| if b { "yes" } else { "" }.to_string();
    let body: Vec<[String; 5]> = rows
        .iter()
        .map(|r| {
            [
                r.method.clone(),
                pct(r.accuracy),
                pct(r.macro_f1),
                tick(r.aggregation.visibility_filter),
                tick(r.aggregation.post_process),
            ]
        })
        .collect();
    render(&header, &body)
}

fn render<const N: usize>(header: &[&str; N], body: &[[String; N]]) -> String {
    let mut widths: [usize; N] = header.map(str::len);
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", parts.join(" | ").trim_end());
    };
    line(&mut out, header.to_vec());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "{}", rule.join("-+-"));
    for row in body {
        line(&mut out, row.iter().map(String::as_str).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{BoundingBox, Detection, Frame};

    fn track(id: TrackId, frames: std::ops::Range<Frame>, x: f64) -> Track {
        Track::new(
            id,
            frames
                .map(|f| Detection::new(f, BoundingBox::new(x, 0.0, 10.0, 10.0).unwrap(), 1.0).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn self_evaluation_is_perfect() {
        let gt = vec![track(1, 0..50, 0.0), track(2, 0..50, 40.0)];
        let v = evaluate_video("v", &gt, &gt, &MetricsParams::default()).unwrap();
        assert_eq!((v.mota, v.idf1, v.idsw, v.fp, v.fn_), (1.0, 1.0, 0, 0, 0));
        let report = EvalReport::new(vec![v]).unwrap();
        assert_eq!(report.aggregate.mota, 1.0);
        let table = format_tracking_table(&report);
        assert!(table.lines().next().unwrap().contains("ID-switches"));
        assert!(table.contains("100.0"));
        assert_eq!(table.lines().count(), 4);
    }

    #[test]
    fn constructed_errors_give_hand_computed_mota() {
        // 100 gt boxes; 3 missed frames, 2 spurious boxes, 1 handover.
        let gt = vec![track(1, 0..100, 0.0)];
        let pred = vec![
            track(7, 0..40, 0.0),
            track(8, 43..100, 0.0),
            track(9, 10..12, 300.0),
        ];
        let v = evaluate_video("v", &gt, &pred, &MetricsParams::default()).unwrap();
        assert_eq!((v.fp, v.fn_, v.idsw, v.gt), (2, 3, 1, 100));
        assert_eq!(v.mota, 0.94);
    }

    #[test]
    fn sweep_rows_per_delta() {
        let gt = vec![track(1, 0..10, 0.0)];
        let v = evaluate_video("v", &gt, &gt, &MetricsParams::default()).unwrap();
        let report = EvalReport::new(vec![v]).unwrap();
        let csv = report.sweep_csv();
        // Header plus nine deltas for the video and for the aggregate.
        assert_eq!(csv.lines().count(), 1 + 9 * 2);
    }

    #[test]
    fn identification_uses_dominant_gt_label() {
        let gt = vec![track(1, 0..10, 0.0), track(2, 0..10, 100.0)];
        let pred = vec![track(10, 0..10, 0.0), track(11, 0..10, 100.0), track(12, 0..5, 500.0)];
        let labels: HashMap<TrackId, Identity> =
            [(1, Identity::Jersey(6)), (2, Identity::Referee)].into_iter().collect();
        let p = crate::core::ProbVector::one_hot(2, 1);
        let mk = |id, identity, unmasked| TrackIdentity {
            track_id: id,
            team: crate::core::TeamLabel::Home,
            identity,
            unmasked,
            visible: true,
            p_jn: p.clone(),
        };
        let ids = vec![
            mk(10, Identity::Jersey(6), Identity::Jersey(8)),
            mk(11, Identity::Referee, Identity::Referee),
            mk(12, Identity::Null, Identity::Null),
        ];
        let acc = IdentificationAccuracy::evaluate(&gt, &labels, &pred, &ids, 0.5);
        assert_eq!(acc.tracks, 2);
        assert_eq!(acc.correct_with_roster, 2);
        assert_eq!(acc.correct_without_roster, 1);
        let table = format_identification_table(&[("1".into(), acc)]);
        assert!(table.contains("Mean"));
    }

    #[test]
    fn macro_f1_values() {
        let j = Identity::Jersey;
        assert_eq!(macro_f1(&[(j(1), j(1)), (j(2), j(2))]), 1.0);
        // Class 1: tp 1, fn 1 -> 2/3. Class 2: tp 0 -> 0.
        let f = macro_f1(&[(j(1), j(1)), (j(1), j(2))]);
        assert!((f - (2.0 / 3.0) / 2.0).abs() < 1e-12);
    }
}
