use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::core::files::write_json;
use crate::core::{
    save_rosters, save_vocabulary, tracks_to_rows, write_detection_file, BoundingBox,
    ClassVocabulary, Detection, DetectionRow, Frame, Identity, TeamLabel, Track, TrackId,
};
use crate::error::{Error, Result};
use crate::ident::scorer::{frame_records, window_records, write_jsonl};

use super::config::{Layout, ScenarioConfig};
use super::oracle::{FrameLatent, OracleScorers};

/// Files written by [`GroundTruthBundle::write_to`].
pub const BUNDLE_FILES: [&str; 10] = [
    "scenario.json",
    "gt.csv",
    "detections.csv",
    "rosters.json",
    "vocab.json",
    "identities.json",
    "events.json",
    "frame_scores.jsonl",
    "window_scores.jsonl",
    "manifest.json",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityTruth {
    pub gt_id: TrackId,
    pub team: TeamLabel,
    pub jersey: Option<u8>,
    /// Whether the number can ever be read.
    pub readable: bool,
    /// Expected pipeline output for this identity.
    pub label: Identity,
}

/// A ground-truth object re-entering the view after leaving it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanExit {
    pub gt_id: TrackId,
    /// Last frame in view before leaving.
    pub exit_frame: Frame,
    pub reentry_frame: Frame,
    /// `reentry_frame - exit_frame`.
    pub gap: u32,
}

#[derive(Debug, Clone, Serialize)]
struct ScenarioFile<'a> {
    seed: u64,
    config: &'a ScenarioConfig,
}

/// Everything generated for one scenario.
#[derive(Debug, Clone)]
pub struct GroundTruthBundle {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub vocab: ClassVocabulary,
    pub entities: Vec<EntityTruth>,
    /// One track per entity that is ever in view, id = `gt_id`.
    pub gt_tracks: Vec<Track>,
    /// Detector output, `track_id = -1`.
    pub detections: Vec<DetectionRow>,
    pub events: Vec<PanExit>,
    pub(super) latent: Vec<Vec<FrameLatent>>,
    pub(super) lookalike: Vec<usize>,
}

impl GroundTruthBundle {
    /// Ground-truth labels keyed by gt id.
    pub fn labels(&self) -> HashMap<TrackId, Identity> {
        self.entities.iter().map(|e| (e.gt_id, e.label)).collect()
    }

    pub fn oracle_scorers(&self) -> OracleScorers<'_> {
        OracleScorers::new(self)
    }

    /// Detections grouped by frame for the tracker.
    pub fn detection_frames(&self) -> BTreeMap<Frame, Vec<Detection>> {
        let mut frames: BTreeMap<Frame, Vec<Detection>> = BTreeMap::new();
        for r in &self.detections {
            frames.entry(r.detection.frame).or_default().push(r.detection);
        }
        frames
    }

    /// Writes every bundle file into `dir`, with window scores laid out for
    /// the given window length and stride. Returns the written paths.
    pub fn write_to(&self, dir: &Path, window: usize, stride: usize) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let p = |name: &str| dir.join(name);
        write_json(
            &p("scenario.json"),
            &ScenarioFile {
                seed: self.seed,
                config: &self.config,
            },
        )?;
        write_detection_file(p("gt.csv"), &tracks_to_rows(&self.gt_tracks))?;
        write_detection_file(p("detections.csv"), &self.detections)?;
        save_rosters(p("rosters.json"), &self.config.rosters)?;
        save_vocabulary(p("vocab.json"), &self.vocab)?;
        write_json(&p("identities.json"), &self.entities)?;
        write_json(&p("events.json"), &self.events)?;

        let oracle = self.oracle_scorers();
        let mut frames = Vec::new();
        let mut windows = Vec::new();
        for t in &self.gt_tracks {
            frames.extend(frame_records(t, &oracle, &oracle)?);
            windows.extend(window_records(t, &oracle, window, stride)?);
        }
        write_jsonl(p("frame_scores.jsonl"), &frames)?;
        write_jsonl(p("window_scores.jsonl"), &windows)?;

        let files: Vec<PathBuf> = BUNDLE_FILES.iter().map(|f| p(f)).collect();
        let manifest = serde_json::json!({
            "seed": self.seed,
            "entities": self.entities.len(),
            "gt_tracks": self.gt_tracks.len(),
            "detections": self.detections.len(),
            "pan_exits": self.events.len(),
            "files": BUNDLE_FILES,
        });
        write_json(&p("manifest.json"), &manifest)?;
        Ok(files)
    }
}

struct Mover {
    pos: (f64, f64),
    vel: (f64, f64),
    bounds: (f64, f64, f64, f64),
    next_change: f64,
}

fn random_velocity(rng: &mut ChaCha8Rng, min: f64, max: f64) -> (f64, f64) {
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    let speed = if max > min { rng.random_range(min..=max) } else { min };
    (speed * angle.cos(), speed * angle.sin())
}

fn reflect(x: &mut f64, v: &mut f64, lo: f64, hi: f64) {
    if hi <= lo {
        *x = lo;
        return;
    }
    for _ in 0..4 {
        if *x < lo {
            *x = 2.0 * lo - *x;
            *v = -*v;
        } else if *x > hi {
            *x = 2.0 * hi - *x;
            *v = -*v;
        } else {
            return;
        }
    }
    *x = x.clamp(lo, hi);
}

fn camera_offset(cfg: &ScenarioConfig, frame: Frame) -> f64 {
    let max = cfg.rink_width - cfg.camera_width;
    let keys = &cfg.pan_profile;
    let raw = match keys.iter().position(|k| k.frame > frame) {
        _ if keys.is_empty() => 0.0,
        Some(0) => keys[0].offset,
        None => keys[keys.len() - 1].offset,
        Some(i) => {
            let (a, b) = (keys[i - 1], keys[i]);
            let t = (frame - a.frame) as f64 / (b.frame - a.frame) as f64;
            a.offset + t * (b.offset - a.offset)
        }
    };
    raw.clamp(0.0, max.max(0.0))
}

/// Partial-digit misreading of a number: one of its digits when that is in
/// the vocabulary, otherwise another random class.
fn lookalike(rng: &mut ChaCha8Rng, jersey: Option<u8>, vocab: &ClassVocabulary) -> usize {
    let labels = vocab.labels();
    let own = jersey.and_then(|n| vocab.index_of(n));
    let mut candidates: Vec<usize> = match jersey {
        Some(n) if n >= 10 => [n / 10, n % 10]
            .into_iter()
            .filter_map(|d| vocab.index_of(d))
            .filter(|&c| Some(c) != own)
            .collect(),
        _ => Vec::new(),
    };
    if candidates.is_empty() {
        candidates = (0..labels.len()).filter(|&c| Some(c) != own).collect();
    }
    if candidates.is_empty() {
        return vocab.null_index();
    }
    candidates[rng.random_range(0..candidates.len())]
}

/// Generates a scenario. Identical `(config, seed)` give identical bundles.
pub fn generate(config: &ScenarioConfig, seed: u64) -> Result<GroundTruthBundle> {
    config.validate()?;
    let cfg = config;
    let vocab = cfg.vocabulary()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_entities = cfg.entity_count();
    let frames = cfg.duration;

    // Identities.
    let mut entities = Vec::with_capacity(n_entities);
    let mut next_id: TrackId = 1;
    for (team, roster) in [
        (TeamLabel::Home, &cfg.rosters.home),
        (TeamLabel::Away, &cfg.rosters.away),
    ] {
        let mut numbers: Vec<u8> = roster.iter().copied().collect();
        numbers.shuffle(&mut rng);
        for &n in numbers.iter().take(cfg.players_per_team) {
            let readable = rng.random::<f64>() >= cfg.null_rate;
            entities.push(EntityTruth {
                gt_id: next_id,
                team,
                jersey: Some(n),
                readable,
                label: if readable { Identity::Jersey(n) } else { Identity::Null },
            });
            next_id += 1;
        }
    }
    for _ in 0..cfg.num_referees {
        entities.push(EntityTruth {
            gt_id: next_id,
            team: TeamLabel::Referee,
            jersey: None,
            readable: false,
            label: Identity::Referee,
        });
        next_id += 1;
    }
    let lookalikes: Vec<usize> = entities
        .iter()
        .map(|e| lookalike(&mut rng, e.jersey, &vocab))
        .collect();

    // Motion bounds, top-left corner of the box in rink coordinates.
    let (bw, bh) = (cfg.box_width, cfg.box_height);
    let bounds: Vec<(f64, f64, f64, f64)> = match cfg.motion.layout {
        Layout::Free => vec![(0.0, cfg.rink_width - bw, 0.0, cfg.camera_height - bh); n_entities],
        Layout::Cells => {
            let n = n_entities.max(1);
            let aspect = cfg.rink_width / cfg.camera_height;
            let cols = ((n as f64 * aspect).sqrt().ceil() as usize).clamp(1, n);
            let rows = n.div_ceil(cols);
            let (cw, ch) = (cfg.rink_width / cols as f64, cfg.camera_height / rows as f64);
            if cw < bw || ch < bh {
                return Err(Error::Infeasible(format!(
                    "{n} entities do not fit a {cols}x{rows} grid of {bw}x{bh} boxes"
                )));
            }
            // Scatter entities over the cells.
            let mut cells: Vec<usize> = (0..cols * rows).collect();
            cells.shuffle(&mut rng);
            cells
                .into_iter()
                .take(n_entities)
                .map(|c| {
                    let (cx, cy) = ((c % cols) as f64 * cw, (c / cols) as f64 * ch);
                    (cx, cx + cw - bw, cy, cy + ch - bh)
                })
                .collect()
        }
    };

    let m = &cfg.motion;
    let exp = (m.direction_change_rate > 0.0)
        .then(|| Exp::new(m.direction_change_rate).expect("positive rate"));
    let mut movers: Vec<Mover> = bounds
        .into_iter()
        .map(|b| {
            let pos = (
                if b.1 > b.0 { rng.random_range(b.0..=b.1) } else { b.0 },
                if b.3 > b.2 { rng.random_range(b.2..=b.3) } else { b.2 },
            );
            let vel = random_velocity(&mut rng, m.speed_min, m.speed_max);
            let next_change = exp.map_or(f64::INFINITY, |e| e.sample(&mut rng));
            Mover {
                pos,
                vel,
                bounds: b,
                next_change,
            }
        })
        .collect();

    // Ground truth in camera coordinates; entities outside the view are absent.
    let mut gt_dets: Vec<Vec<Detection>> = vec![Vec::new(); n_entities];
    for f in 0..frames {
        let offset = camera_offset(cfg, f);
        for (i, mv) in movers.iter_mut().enumerate() {
            if f > 0 {
                while mv.next_change <= f as f64 {
                    mv.vel = random_velocity(&mut rng, m.speed_min, m.speed_max);
                    mv.next_change += exp.map_or(f64::INFINITY, |e| e.sample(&mut rng));
                }
                mv.pos.0 += mv.vel.0;
                mv.pos.1 += mv.vel.1;
                let (x0, x1, y0, y1) = mv.bounds;
                reflect(&mut mv.pos.0, &mut mv.vel.0, x0, x1);
                reflect(&mut mv.pos.1, &mut mv.vel.1, y0, y1);
            }
            let center = mv.pos.0 + bw / 2.0;
            if center >= offset && center < offset + cfg.camera_width {
                let bbox = BoundingBox::new(mv.pos.0 - offset, mv.pos.1, bw, bh)?;
                gt_dets[i].push(Detection::new(f, bbox, 1.0)?);
            }
        }
    }

    let mut events = Vec::new();
    for (i, dets) in gt_dets.iter().enumerate() {
        for w in dets.windows(2) {
            if w[1].frame - w[0].frame > 1 {
                events.push(PanExit {
                    gt_id: entities[i].gt_id,
                    exit_frame: w[0].frame,
                    reentry_frame: w[1].frame,
                    gap: w[1].frame - w[0].frame,
                });
            }
        }
    }

    // Latent readability, confusion and team state per entity and frame.
    let s = &cfg.scorer;
    let v = cfg.visibility_profile;
    let p_hide = 1.0 / s.visible_run;
    let p_show = if v >= 1.0 {
        1.0
    } else {
        (v / (s.visible_run * (1.0 - v))).min(1.0)
    };
    let (ln_lo, ln_hi) = (s.visible_null_range.0.ln(), s.visible_null_range.1.ln());
    let (gl_lo, gl_hi) = (s.glimpse_null_range.0.ln(), s.glimpse_null_range.1.ln());
    let confusions: HashMap<u8, (usize, f64)> = cfg
        .confusion
        .iter()
        .map(|c| (c.from, (vocab.index_of(c.to).expect("validated"), c.prob)))
        .collect();
    let mut latent = Vec::with_capacity(n_entities);
    for e in &entities {
        let own = e.jersey.and_then(|n| vocab.index_of(n)).unwrap_or(vocab.null_index());
        let confusion = e.jersey.and_then(|n| confusions.get(&n).copied());
        let mut shown = e.readable && v > 0.0 && (v >= 1.0 || rng.random::<f64>() < v);
        let mut row = Vec::with_capacity(frames as usize);
        for f in 0..frames {
            if f > 0 && e.readable && v > 0.0 && v < 1.0 {
                let flip = rng.random::<f64>();
                shown = if shown { flip >= p_hide } else { flip < p_show };
            }
            let class = match confusion {
                Some((to, p)) if rng.random::<f64>() < p => to,
                _ => own,
            };
            let glimpse = !shown && rng.random::<f64>() < s.glimpse_rate;
            let null_prob = if shown {
                rng.random_range(ln_lo..=ln_hi).exp()
            } else if glimpse {
                rng.random_range(gl_lo..=gl_hi).exp()
            } else {
                1.0 - s.hidden_epsilon * rng.random::<f64>()
            };
            let team = if rng.random::<f64>() < cfg.team_error_rate {
                let others: Vec<TeamLabel> =
                    TeamLabel::ALL.into_iter().filter(|t| *t != e.team).collect();
                others[rng.random_range(0..others.len())]
            } else {
                e.team
            };
            row.push(FrameLatent {
                readable: shown,
                glimpse,
                class,
                null_prob,
                team,
            });
        }
        latent.push(row);
    }

    // Detector output.
    let noise = &cfg.detection_noise;
    let jitter = Normal::new(0.0, noise.jitter_sigma.max(f64::MIN_POSITIVE)).expect("valid sigma");
    let mut detections = Vec::new();
    for f in 0..frames {
        for dets in &gt_dets {
            let Ok(k) = dets.binary_search_by_key(&f, |d| d.frame) else { continue };
            let gt = dets[k];
            if noise.fn_rate > 0.0 && rng.random::<f64>() < noise.fn_rate {
                continue;
            }
            let mut det = gt;
            if noise.jitter_sigma > 0.0 {
                let b = gt.bbox;
                det.bbox = BoundingBox::new(
                    b.x + jitter.sample(&mut rng),
                    b.y + jitter.sample(&mut rng),
                    (b.w + jitter.sample(&mut rng) / 2.0).max(1.0),
                    (b.h + jitter.sample(&mut rng) / 2.0).max(1.0),
                )?;
            }
            if !noise.is_zero() {
                det.confidence = rng.random_range(0.6..=1.0);
            }
            detections.push(DetectionRow {
                track_id: -1,
                detection: det,
            });
            if noise.fp_rate > 0.0 && rng.random::<f64>() < noise.fp_rate {
                let x = rng.random_range(0.0..(cfg.camera_width - bw).max(1.0));
                let y = rng.random_range(0.0..(cfg.camera_height - bh).max(1.0));
                detections.push(DetectionRow {
                    track_id: -1,
                    detection: Detection::new(
                        f,
                        BoundingBox::new(x, y, bw, bh)?,
                        rng.random_range(0.5..=0.9),
                    )?,
                });
            }
        }
    }

    let gt_tracks = entities
        .iter()
        .zip(gt_dets)
        .filter(|(_, d)| !d.is_empty())
        .map(|(e, d)| Track::new(e.gt_id, d))
        .collect::<Result<Vec<_>>>()?;

    Ok(GroundTruthBundle {
        config: cfg.clone(),
        seed,
        vocab,
        entities,
        gt_tracks,
        detections,
        events,
        latent,
        lookalike: lookalikes,
    })
}
