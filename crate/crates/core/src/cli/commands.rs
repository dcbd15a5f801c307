use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::core::files::{read_json, write_json};
use crate::core::{
    parse_detection_file, tracks_from_rows, write_detection_file, tracks_to_rows, ClassVocabulary,
    Detection, Frame, Identity, RosterVector, Track, TrackId,
};
use crate::error::{Error, Result};
use crate::ident::scorer::{FileFrameScores, FileWindowScores};
use crate::ident::{run_pipeline, PipelineParams, Scorers, TrackIdentity};
use crate::metrics::{
    evaluate_video, format_identification_table, format_tracking_table, EvalReport,
    IdentificationAccuracy, VideoMetrics,
};
use crate::sim::{generate, EntityTruth, GroundTruthBundle, ScenarioConfig};
use crate::tracker::track;

use super::config::{RunConfig, SeededScenario, VideoConfig};

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Writes a simulated bundle plus two ready-made run configs:
/// `config.json` (track, then score with the scenario's oracle) and
/// `config_gt.json` (ground-truth tracklets with the emitted score files).
pub fn cmd_simulate(scenario: &ScenarioConfig, seed: u64, out: &Path, run: &RunConfig) -> Result<String> {
    let bundle = generate(scenario, seed)?;
    let files = bundle.write_to(out, run.ident.window, run.ident.stride)?;

    let name = format!("sim-{seed}");
    let rel = |f: &str| Some(PathBuf::from(f));
    let base = VideoConfig {
        name: name.clone(),
        ground_truth: rel("gt.csv"),
        rosters: rel("rosters.json"),
        identities: rel("identities.json"),
        ..VideoConfig::default()
    };
    let tracked = RunConfig {
        vocabulary: rel("vocab.json"),
        videos: vec![VideoConfig {
            detections: rel("detections.csv"),
            scenario: rel("scenario.json"),
            ..base.clone()
        }],
        scenario: None,
        ..run.clone()
    };
    let on_gt = RunConfig {
        videos: vec![VideoConfig {
            name: format!("{name}-gt"),
            tracks: rel("gt.csv"),
            frame_scores: rel("frame_scores.jsonl"),
            window_scores: rel("window_scores.jsonl"),
            ..base
        }],
        ..tracked.clone()
    };
    write_json(&out.join("config.json"), &tracked)?;
    write_json(&out.join("config_gt.json"), &on_gt)?;

    let mut msg = format!(
        "simulated {} entities, {} ground-truth tracks, {} detections, {} pan exits (seed {seed})\n",
        bundle.entities.len(),
        bundle.gt_tracks.len(),
        bundle.detections.len(),
        bundle.events.len()
    );
    for f in files.iter().chain([&out.join("config.json"), &out.join("config_gt.json")]) {
        let _ = writeln!(msg, "  {}", f.display());
    }
    Ok(msg)
}

enum ScoreSource {
    Files(FileFrameScores, FileWindowScores),
    Oracle(Box<GroundTruthBundle>),
}

/// One video's inputs, loaded and tracked.
struct Video {
    name: String,
    gt: Option<Vec<Track>>,
    tracks: Vec<Track>,
    rosters: Option<(RosterVector, RosterVector)>,
    labels: Option<HashMap<TrackId, Identity>>,
    scores: Option<ScoreSource>,
}

fn detection_frames(path: &Path) -> Result<BTreeMap<Frame, Vec<Detection>>> {
    let mut frames: BTreeMap<Frame, Vec<Detection>> = BTreeMap::new();
    for r in parse_detection_file(path)? {
        frames.entry(r.detection.frame).or_default().push(r.detection);
    }
    Ok(frames)
}

fn load_video(v: &VideoConfig, run: &RunConfig, vocab: &ClassVocabulary) -> Result<Video> {
    let tracks = match (&v.tracks, &v.detections) {
        (Some(p), _) => tracks_from_rows(&parse_detection_file(p)?)?,
        (None, Some(p)) => track(&detection_frames(p)?, &run.tracker),
        (None, None) => return Err(Error::Config(format!("video {:?} has no input", v.name))),
    };
    let gt = v
        .ground_truth
        .as_deref()
        .map(|p| parse_detection_file(p).and_then(|rows| tracks_from_rows(&rows)))
        .transpose()?;
    let rosters = v.rosters()?.map(|r| r.vectors(vocab)).transpose()?;
    let labels = v
        .identities
        .as_deref()
        .map(|p| {
            read_json::<Vec<EntityTruth>>(p)
                .map(|es| es.into_iter().map(|e| (e.gt_id, e.label)).collect())
        })
        .transpose()?;
    let scores = match (&v.frame_scores, &v.window_scores, &v.scenario) {
        (Some(f), Some(w), _) => Some(ScoreSource::Files(
            FileFrameScores::load(f, &run.team_colors)?,
            FileWindowScores::load(w)?,
        )),
        (_, _, Some(s)) => {
            let s: SeededScenario = read_json(s)?;
            Some(ScoreSource::Oracle(Box::new(generate(&s.config, s.seed)?)))
        }
        _ => None,
    };
    Ok(Video {
        name: v.name.clone(),
        gt,
        tracks,
        rosters,
        labels,
        scores,
    })
}

fn load_videos(run: &RunConfig, vocab: &ClassVocabulary) -> Result<Vec<Video>> {
    run.videos.par_iter().map(|v| load_video(v, run, vocab)).collect()
}

/// `track`: tracker output per video as `<out>/<name>/tracks.csv`.
pub fn cmd_track(run: &RunConfig, out: &Path) -> Result<String> {
    let vocab = run.vocab()?;
    let videos = load_videos(run, &vocab)?;
    let mut msg = String::new();
    for v in &videos {
        write_tracks(out, v)?;
        let _ = writeln!(msg, "{}: {} tracks", v.name, v.tracks.len());
    }
    Ok(msg)
}

fn write_tracks(out: &Path, v: &Video) -> Result<()> {
    let dir = out.join(&v.name);
    create_dir(&dir)?;
    write_detection_file(dir.join("tracks.csv"), &tracks_to_rows(&v.tracks))
}

/// Identification overrides given on the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentFlags {
    pub no_roster: bool,
    pub aggregation: Option<crate::ident::AggregationMethod>,
}

impl IdentFlags {
    fn apply(&self, run: &mut RunConfig) {
        if self.no_roster {
            run.roster_masking = false;
        }
        if let Some(m) = self.aggregation {
            run.aggregation.method = m;
        }
    }
}

struct Identified {
    identities: Vec<TrackIdentity>,
    accuracy: Option<IdentificationAccuracy>,
}

fn identify_video(v: &Video, run: &RunConfig, vocab: &ClassVocabulary) -> Result<Identified> {
    let Some(scores) = &v.scores else {
        return Err(Error::Config(format!(
            "video {:?} has no score files and no scenario",
            v.name
        )));
    };
    let admit_all = RosterVector::admit_all(vocab);
    let rosters = match (&v.rosters, run.roster_masking) {
        (Some((h, a)), _) => (h, a),
        (None, false) => (&admit_all, &admit_all),
        (None, true) => {
            return Err(Error::Config(format!(
                "video {:?} has no rosters; pass --no-roster to run without them",
                v.name
            )))
        }
    };
    // Masking runs whenever rosters exist so both accuracy columns can be
    // reported; the emitted identity honours the flag.
    let params = PipelineParams {
        ident: run.ident,
        aggregation: run.aggregation,
        roster_masking: v.rosters.is_some(),
    };
    let oracle;
    let scorers = match scores {
        ScoreSource::Files(f, w) => Scorers { jersey: f, windows: w, team: f },
        ScoreSource::Oracle(b) => {
            oracle = b.oracle_scorers();
            Scorers { jersey: &oracle, windows: &oracle, team: &oracle }
        }
    };
    let mut identities = run_pipeline(&v.tracks, scorers, rosters, vocab, &params)?;
    let accuracy = match (&v.gt, &v.labels) {
        (Some(gt), Some(labels)) => Some(IdentificationAccuracy::evaluate(
            gt,
            labels,
            &v.tracks,
            &identities,
            run.metrics.iou_threshold,
        )),
        _ => None,
    };
    if !run.roster_masking {
        for id in &mut identities {
            id.identity = id.unmasked;
        }
    }
    Ok(Identified { identities, accuracy })
}

fn write_identities(out: &Path, name: &str, ids: &[TrackIdentity]) -> Result<()> {
    let dir = out.join(name);
    create_dir(&dir)?;
    write_json(&dir.join("identities.json"), &ids)
}

fn identification_outputs(out: &Path, rows: &[(String, IdentificationAccuracy)]) -> Result<String> {
    if rows.is_empty() {
        return Ok(String::new());
    }
    let table = format_identification_table(rows);
    write_text(&out.join("identification.txt"), &table)?;
    let json: BTreeMap<&str, &IdentificationAccuracy> =
        rows.iter().map(|(n, a)| (n.as_str(), a)).collect();
    write_json(&out.join("identification.json"), &json)?;
    Ok(table)
}

/// `identify`: `<out>/<name>/identities.json` per video, plus an accuracy
/// table with and without roster vectors when ground truth is available.
pub fn cmd_identify(run: &RunConfig, flags: IdentFlags, out: &Path) -> Result<String> {
    let mut run = run.clone();
    flags.apply(&mut run);
    let vocab = run.vocab()?;
    let videos = load_videos(&run, &vocab)?;
    let results = videos
        .par_iter()
        .map(|v| identify_video(v, &run, &vocab))
        .collect::<Result<Vec<_>>>()?;
    create_dir(out)?;
    let mut msg = String::new();
    let mut rows = Vec::new();
    for (v, r) in videos.iter().zip(&results) {
        write_identities(out, &v.name, &r.identities)?;
        let named = r.identities.iter().filter(|i| i.identity != Identity::Null).count();
        let _ = writeln!(msg, "{}: {} tracks, {} with a jersey or referee label", v.name, r.identities.len(), named);
        if let Some(a) = &r.accuracy {
            rows.push((v.name.clone(), a.clone()));
        }
    }
    msg.push_str(&identification_outputs(out, &rows)?);
    Ok(msg)
}

/// Restricts tracks to frames in `lo..=hi`, dropping tracks left empty.
fn clip(tracks: &[Track], lo: Frame, hi: Frame) -> Result<Vec<Track>> {
    let rows: Vec<_> = tracks_to_rows(tracks)
        .into_iter()
        .filter(|r| (lo..=hi).contains(&r.detection.frame))
        .collect();
    tracks_from_rows(&rows)
}

fn frame_span(tracks: &[Track]) -> Option<(Frame, Frame)> {
    let lo = tracks.iter().map(Track::first_frame).min()?;
    let hi = tracks.iter().map(Track::last_frame).max()?;
    Some((lo, hi))
}

fn evaluate(v: &Video, run: &RunConfig, warnings: &mut Vec<String>) -> Result<Option<VideoMetrics>> {
    let Some(gt) = &v.gt else { return Ok(None) };
    let (gt, pred) = match (frame_span(gt), frame_span(&v.tracks)) {
        (Some(g), Some(p)) if g != p => {
            let (lo, hi) = (g.0.max(p.0), g.1.min(p.1));
            warnings.push(format!(
                "{}: ground truth spans frames {}..={}, tracks span {}..={}; evaluating {lo}..={hi}",
                v.name, g.0, g.1, p.0, p.1
            ));
            if lo > hi {
                (Vec::new(), Vec::new())
            } else {
                (clip(gt, lo, hi)?, clip(&v.tracks, lo, hi)?)
            }
        }
        _ => (gt.clone(), v.tracks.clone()),
    };
    if gt.is_empty() {
        warnings.push(format!("{}: no ground truth to evaluate", v.name));
        return Ok(None);
    }
    evaluate_video(&v.name, &gt, &pred, &run.metrics).map(Some)
}

fn eval_outputs(out: &Path, metrics: Vec<VideoMetrics>) -> Result<String> {
    let report = EvalReport::new(metrics)?;
    let table = format_tracking_table(&report);
    write_json(&out.join("report.json"), &report)?;
    write_text(&out.join("report.txt"), &table)?;
    write_text(&out.join("pan_sweep.csv"), &report.sweep_csv())?;
    Ok(table)
}

/// `eval`: `report.json`, `report.txt` and `pan_sweep.csv` in `out`.
pub fn cmd_eval(run: &RunConfig, out: &Path) -> Result<String> {
    let vocab = run.vocab()?;
    let videos = load_videos(run, &vocab)?;
    let mut warnings = Vec::new();
    let mut metrics = Vec::new();
    for v in &videos {
        match evaluate(v, run, &mut warnings)? {
            Some(m) => metrics.push(m),
            None if v.gt.is_none() => warnings.push(format!("{}: no ground truth, skipped", v.name)),
            None => {}
        }
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if metrics.is_empty() {
        return Err(Error::Config("no video has ground truth to evaluate".into()));
    }
    create_dir(out)?;
    eval_outputs(out, metrics)
}

/// `pipeline`: simulate (when the config carries a scenario), then track,
/// identify and evaluate every video. Per-video work runs in parallel;
/// outputs are written afterwards in config order.
pub fn cmd_pipeline(run: &RunConfig, flags: IdentFlags, seed: u64, out: &Path) -> Result<String> {
    let mut run = run.clone();
    flags.apply(&mut run);
    create_dir(out)?;
    let mut msg = String::new();
    if let Some(scenario) = run.scenario.take() {
        let dir = out.join("simulated");
        msg.push_str(&cmd_simulate(&scenario, seed, &dir, &run)?);
        let sim = RunConfig::load(&dir.join("config.json"))?;
        if run.vocabulary.is_none() {
            run.vocabulary = sim.vocabulary.clone();
        }
        run.videos.extend(sim.videos);
    }
    let vocab = run.vocab()?;
    let videos = load_videos(&run, &vocab)?;
    let results = videos
        .par_iter()
        .map(|v| {
            let ident = v.scores.is_some().then(|| identify_video(v, &run, &vocab)).transpose()?;
            let mut warnings = Vec::new();
            let mut metrics = evaluate(v, &run, &mut warnings)?;
            if let (Some(m), Some(i)) = (metrics.as_mut(), &ident) {
                m.identification = i.accuracy.clone();
            }
            Ok((ident, metrics, warnings))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut all = Vec::new();
    let mut rows = Vec::new();
    for (v, (ident, metrics, warnings)) in videos.iter().zip(results) {
        for w in warnings {
            eprintln!("warning: {w}");
        }
        write_tracks(out, v)?;
        if let Some(i) = ident {
            write_identities(out, &v.name, &i.identities)?;
            if let Some(a) = i.accuracy {
                rows.push((v.name.clone(), a));
            }
        }
        all.extend(metrics);
        let _ = writeln!(msg, "{}: {} tracks", v.name, v.tracks.len());
    }
    if !all.is_empty() {
        msg.push_str(&eval_outputs(out, all)?);
    }
    msg.push_str(&identification_outputs(out, &rows)?);
    Ok(msg)
}
