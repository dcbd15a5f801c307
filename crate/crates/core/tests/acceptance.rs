//! Acceptance criteria 1 to 10. Each test prints one PASS/FAIL line with
//! the measured values and then asserts the verdict.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rinktrack::core::{
    BoundingBox, ClassVocabulary, Detection, Identity, ProbVector, Rosters, TeamLabel, Track,
};
use rinktrack::ident::{
    aggregate, aggregate_majority, identify, jersey_visible, window_probs, window_starts,
    Aggregation, IdentParams, PipelineParams,
};
use rinktrack::metrics::{
    count_idsw, evaluate_video, match_frames, mota, pan_idsw, switch_count, MetricsParams,
};
use rinktrack::sim::{generate, ScenarioConfig};
use rinktrack::tracker::{assignment_cost, hungarian, track, TrackerParams};

use common::*;

fn verdict(n: u32, name: &str, pass: bool, detail: String) {
    let status = if pass { "PASS" } else { "FAIL" };
    // Written to the stderr handle directly so the line shows without
    // --nocapture.
    let _ = writeln!(std::io::stderr(), "criterion {n:>2} [PRIMARY] {name}: {status} ({detail})");
    assert!(pass, "criterion {n} failed: {detail}");
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let t = start.elapsed();
    (t < limit, format!("{:.2}s of {}s", t.as_secs_f64(), limit.as_secs()))
}

#[test]
fn criterion_01_mota_formula() {
    let start = Instant::now();
    let exact = mota(2, 3, 1, 100).unwrap() == 0.94;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let gt = rng.random_range(1..10_000usize);
        let (fp, fn_, idsw) = (
            rng.random_range(0..2 * gt),
            rng.random_range(0..=gt),
            rng.random_range(0..gt),
        );
        let direct = 1.0 - ((fn_ + fp + idsw) as f64) / gt as f64;
        worst = worst.max((mota(fp, fn_, idsw, gt).unwrap() - direct).abs());
    }
    let (fast, time) = within(start, Duration::from_secs(1));
    verdict(
        1,
        "MOTA formula",
        exact && worst <= 1e-12 && fast,
        format!("0.94 exact: {exact}, max deviation {worst:e}, {time}"),
    );
}

fn brute_min_cost(cost: &DMatrix<f64>) -> f64 {
    let (r, c) = cost.shape();
    let (small, large, transpose) = if r <= c { (r, c, false) } else { (c, r, true) };
    let mut best = f64::INFINITY;
    let mut used = vec![false; large];
    fn rec(
        i: usize,
        small: usize,
        large: usize,
        used: &mut [bool],
        acc: f64,
        best: &mut f64,
        at: &dyn Fn(usize, usize) -> f64,
    ) {
        if i == small {
            *best = best.min(acc);
            return;
        }
        for j in 0..large {
            if !used[j] {
                used[j] = true;
                rec(i + 1, small, large, used, acc + at(i, j), best, at);
                used[j] = false;
            }
        }
    }
    let at = |i: usize, j: usize| if transpose { cost[(j, i)] } else { cost[(i, j)] };
    rec(0, small, large, &mut used, 0.0, &mut best, &at);
    best
}

#[test]
fn criterion_02_hungarian_optimality() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    for case in 0..500 {
        let (r, c) = (rng.random_range(1..=7), rng.random_range(1..=7));
        let cost = DMatrix::from_fn(r, c, |_, _| {
            if case % 2 == 0 {
                rng.random_range(0..10) as f64
            } else {
                rng.random::<f64>()
            }
        });
        let pairs = hungarian(&cost).unwrap();
        let ok = pairs.len() == r.min(c)
            && (assignment_cost(&cost, &pairs) - brute_min_cost(&cost)).abs() < 1e-9;
        mismatches += usize::from(!ok);
    }
    let (fast, time) = within(start, Duration::from_secs(10));
    verdict(
        2,
        "Hungarian optimality",
        mismatches == 0 && fast,
        format!("{mismatches}/500 non-optimal, {time}"),
    );
}

fn random_distribution(rng: &mut ChaCha8Rng, classes: usize, null: Option<f64>) -> Vec<f64> {
    let mut w: Vec<f64> = (0..classes).map(|_| rng.random_range(0..4) as f64).collect();
    if w.iter().all(|x| *x == 0.0) {
        w[rng.random_range(0..classes)] = 1.0;
    }
    match null {
        Some(p) => {
            let rest: f64 = w[..classes - 1].iter().sum();
            if rest == 0.0 {
                w[..classes - 1].iter_mut().for_each(|x| *x = 1.0 / (classes - 1).max(1) as f64);
            }
            let rest: f64 = w[..classes - 1].iter().sum();
            let mut v: Vec<f64> = w[..classes - 1].iter().map(|x| x / rest * (1.0 - p)).collect();
            v.push(p);
            v
        }
        None => {
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        }
    }
}

#[test]
fn criterion_03_aggregation_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let nulls = [0.001, 0.005, 0.0033, 0.01, 0.02, 0.5, 0.81, 0.9, 1.0];
    let params = IdentParams {
        window: 3,
        stride: 1,
        ..IdentParams::default()
    };
    let (mut mismatches, mut fallbacks) = (0usize, 0usize);
    for _ in 0..1000 {
        let labels = rng.random_range(1..=5u8);
        let vocab = ClassVocabulary::new((1..=labels).collect()).unwrap();
        let classes = vocab.class_count();
        let k = rng.random_range(1..=12usize);
        let frames: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let p = if labels == 0 { 1.0 } else { nulls[rng.random_range(0..nulls.len())] };
                random_distribution(&mut rng, classes, Some(p))
            })
            .collect();
        let n_windows = window_starts(k, 3, 1).count();
        let windows: Vec<Vec<f64>> = (0..n_windows)
            .map(|_| random_distribution(&mut rng, classes, None))
            .collect();
        let scorer = TableScorer {
            frames: frames.iter().map(|v| ProbVector::new(v.clone()).unwrap()).collect(),
            windows: windows.iter().map(|v| ProbVector::new(v.clone()).unwrap()).collect(),
        };
        let t = dummy_track(1, k);
        let probs = window_probs(&t, &scorer, &params).unwrap();
        let null = vocab.null_index();
        if windows.iter().all(|w| {
            let m = w.iter().cloned().fold(f64::MIN, f64::max);
            w[null] == m && w[..null].iter().all(|x| *x < m)
        }) {
            fallbacks += 1;
        }
        for theta in [0.0033, 0.01, 0.81] {
            let visible = jersey_visible(&t, &scorer, theta).unwrap();
            let (avg, _) = aggregate(&probs, visible, &vocab).unwrap();
            let maj = aggregate_majority(&probs, visible, &vocab).unwrap();
            mismatches += usize::from(avg != brute_force(&frames, &windows, theta, false));
            mismatches += usize::from(maj != brute_force(&frames, &windows, theta, true));
        }
    }
    let (fast, time) = within(start, Duration::from_secs(5));
    verdict(
        3,
        "Aggregation oracle equivalence",
        mismatches == 0 && fast,
        format!("{mismatches}/6000 mismatches, {fallbacks} all-null tracklets, {time}"),
    );
}

#[test]
fn criterion_04_roster_mask_soundness() {
    let mut violations = 0;
    let mut runs = 0;
    let mut identities = 0;
    for seed in 0..6 {
        let cfg = ScenarioConfig {
            detection_noise: moderate_noise(),
            confusion: off_roster_confusions(0.8),
            team_error_rate: 0.2,
            visibility_profile: 0.6,
            ..ScenarioConfig::default()
        };
        let b = generate(&cfg, seed).unwrap();
        let pred = tracked(&b);
        for tracks in [&b.gt_tracks, &pred] {
            for (_, agg) in Aggregation::ablation_rows() {
                let params = PipelineParams {
                    aggregation: agg,
                    ..PipelineParams::default()
                }
                .with_masking(true);
                let ids = run_checked(&b, tracks, &params);
                violations += roster_violations(&ids, &b.config.rosters);
                identities += ids.len();
                runs += 1;
            }
        }
    }
    // Arbitrary distributions straight into the masking step.
    let vocab = ClassVocabulary::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..2000 {
        let pick = |rng: &mut ChaCha8Rng| {
            (0..rng.random_range(0..15))
                .map(|_| rng.random_range(1..=85u8))
                .collect::<std::collections::BTreeSet<u8>>()
        };
        let rosters = Rosters {
            home: pick(&mut rng),
            away: pick(&mut rng),
        };
        let (home, away) = rosters.vectors(&vocab).unwrap();
        let p = ProbVector::new(random_distribution(&mut rng, vocab.class_count(), None)).unwrap();
        let team = TeamLabel::ALL[rng.random_range(0..3)];
        let id = identify(team, &p, &home, &away, &vocab).unwrap();
        let ok = match (team, id) {
            (TeamLabel::Referee, i) => i == Identity::Referee,
            (_, Identity::Null) => true,
            (TeamLabel::Home, Identity::Jersey(n)) => rosters.home.contains(&n),
            (TeamLabel::Away, Identity::Jersey(n)) => rosters.away.contains(&n),
            _ => false,
        };
        violations += usize::from(!ok);
    }
    verdict(
        4,
        "Roster-mask soundness",
        violations == 0,
        format!("{violations} violations over {runs} pipeline runs ({identities} identities) and 2000 direct draws"),
    );
}

#[test]
fn criterion_05_perfect_input_end_to_end() {
    let start = Instant::now();
    let cfg = ScenarioConfig::default();
    let b = generate(&cfg, 1).unwrap();
    let pred = tracked(&b);
    let m = evaluate_video("clean", &b.gt_tracks, &pred, &MetricsParams::default()).unwrap();
    let ids = run_checked(&b, &pred, &PipelineParams::default().with_masking(true));
    let acc = accuracy(&b, &pred, &ids);
    let (fast, time) = within(start, Duration::from_secs(30));
    let pass = m.mota == 1.0
        && m.idf1 == 1.0
        && m.idsw == 0
        && acc.tracks == b.gt_tracks.len()
        && acc.with_roster == 1.0
        && acc.without_roster == 1.0
        && fast;
    verdict(
        5,
        "Perfect-input end-to-end",
        pass,
        format!(
            "MOTA {} IDF1 {} IDSW {}, identification {}/{} ({}/{} unmasked), {time}",
            m.mota, m.idf1, m.idsw, acc.correct_with_roster, acc.tracks, acc.correct_without_roster, acc.tracks
        ),
    );
}

#[test]
fn criterion_06_pan_idsw_estimator() {
    let b = generate(&panning_scenario(), 5).unwrap();
    let logged = b.events.iter().filter(|e| e.gap > 40).count();
    let estimated = pan_idsw(&b.gt_tracks, 40);
    let pred = tracked(&b);
    let m = evaluate_video("pan", &b.gt_tracks, &pred, &MetricsParams::default()).unwrap();
    let sweep: Vec<usize> = m.pan_sweep.iter().map(|p| p.pan_idsw).collect();
    let monotone = sweep.windows(2).all(|w| w[0] >= w[1]);
    let deltas: Vec<u32> = m.pan_sweep.iter().map(|p| p.delta).collect();
    verdict(
        6,
        "Pan-IDSW estimator",
        logged > 0 && estimated == logged && monotone && deltas == (40..=80).step_by(5).collect::<Vec<_>>(),
        format!("logged exits {logged}, pan_idsw {estimated}, tracker IDSW {}, sweep {sweep:?}", m.idsw),
    );
}

#[test]
fn criterion_07_roster_masking_benefit() {
    let start = Instant::now();
    let cfg = ScenarioConfig {
        detection_noise: moderate_noise(),
        confusion: off_roster_confusions(0.7),
        ..ScenarioConfig::default()
    };
    let (mut never_worse, mut strictly_better) = (0, 0);
    let (mut sum_without, mut sum_with) = (0.0, 0.0);
    for seed in 0..20 {
        let b = generate(&cfg, seed).unwrap();
        let pred = tracked(&b);
        let ids = run_checked(&b, &pred, &PipelineParams::default().with_masking(true));
        let acc = accuracy(&b, &pred, &ids);
        never_worse += usize::from(acc.with_roster >= acc.without_roster);
        strictly_better += usize::from(acc.with_roster > acc.without_roster);
        sum_without += acc.without_roster;
        sum_with += acc.with_roster;
    }
    let (fast, time) = within(start, Duration::from_secs(120));
    verdict(
        7,
        "Roster-masking benefit",
        never_worse == 20 && strictly_better >= 15 && fast,
        format!(
            "mean {:.3} -> {:.3}, never worse in {never_worse}/20, strictly better in {strictly_better}/20, {time}",
            sum_without / 20.0,
            sum_with / 20.0
        ),
    );
}

#[test]
fn criterion_08_aggregation_ablation_ordering() {
    let cfg = ScenarioConfig {
        detection_noise: moderate_noise(),
        visibility_profile: 0.3,
        ..ScenarioConfig::default()
    };
    let unmasked = |agg: Aggregation| PipelineParams {
        aggregation: agg,
        ..PipelineParams::default()
    };
    let (mut proposed_sum, mut majority_sum) = (0.0, 0.0);
    let (mut ge_seeds, mut degraded) = (0, 0);
    for seed in 0..20 {
        let b = generate(&cfg, seed).unwrap();
        let pred = tracked(&b);
        let acc = |agg| accuracy(&b, &pred, &run_checked(&b, &pred, &unmasked(agg))).without_roster;
        let proposed = acc(Aggregation::proposed());
        let majority = acc(Aggregation::majority());
        let no_filter = acc(Aggregation::without_visibility_filter());
        proposed_sum += proposed;
        majority_sum += majority;
        ge_seeds += usize::from(proposed >= majority);
        degraded += usize::from(no_filter < proposed);
    }
    verdict(
        8,
        "Aggregation ablation ordering",
        proposed_sum >= majority_sum && degraded >= 15,
        format!(
            "mean proposed {:.3} vs majority {:.3} (>= in {ge_seeds}/20 seeds), no-filter degrades in {degraded}/20",
            proposed_sum / 20.0,
            majority_sum / 20.0
        ),
    );
}

fn static_track(id: i64, x: f64, frames: impl IntoIterator<Item = u32>) -> Track {
    let dets = frames
        .into_iter()
        .map(|f| Detection::new(f, BoundingBox::new(x, 50.0, 40.0, 80.0).unwrap(), 1.0).unwrap())
        .collect();
    Track::new(id, dets).unwrap()
}

/// IDSW for a single object whose per-frame matched prediction follows
/// `seq`; `None` frames have no prediction near it.
fn idsw_for(seq: &[Option<i64>]) -> usize {
    let gt = vec![static_track(1, 100.0, 0..seq.len() as u32)];
    let mut by_id: std::collections::BTreeMap<i64, Vec<u32>> = Default::default();
    for (f, id) in seq.iter().enumerate() {
        if let Some(id) = id {
            by_id.entry(*id).or_default().push(f as u32);
        }
    }
    let pred: Vec<Track> = by_id.into_iter().map(|(id, fs)| static_track(id, 100.0, fs)).collect();
    count_idsw(&match_frames(&gt, &pred, 0.5))
}

#[test]
fn criterion_09_idsw_counting() {
    let cases: [(&[Option<i64>], usize); 3] = [
        (&[Some(1), Some(1), Some(2), Some(2)], 1),
        (&[Some(1), None, Some(1)], 0),
        (&[Some(1), None, Some(2), Some(1)], 2),
    ];
    let counted: Vec<(usize, usize)> =
        cases.iter().map(|(s, want)| (idsw_for(s), *want)).collect();
    let sequences_ok = counted.iter().all(|(got, want)| got == want)
        && cases.iter().all(|(s, want)| switch_count(s) == *want);

    // One object moving right; the detector loses it for 40 frames, longer
    // than the tracker's max_age, while it stays in the ground truth.
    let params = TrackerParams::default();
    let boxes = |f: u32| BoundingBox::new(100.0 + 2.0 * f as f64, 200.0, 40.0, 80.0).unwrap();
    let gt_dets: Vec<Detection> = (0..150).map(|f| Detection::new(f, boxes(f), 1.0).unwrap()).collect();
    let gt = vec![Track::new(1, gt_dets.clone()).unwrap()];
    let mut frames = std::collections::BTreeMap::new();
    for d in gt_dets.iter().filter(|d| !(50..90).contains(&d.frame)) {
        frames.insert(d.frame, vec![*d]);
    }
    let pred = track(&frames, &params);
    let idsw = count_idsw(&match_frames(&gt, &pred, 0.5));
    verdict(
        9,
        "IDSW counting",
        sequences_ok && idsw >= 1,
        format!(
            "sequences (got, want) {counted:?}; re-appearance after {} frames > max_age {}: {} tracks, IDSW {idsw}",
            40,
            params.max_age,
            pred.len()
        ),
    );
}

#[test]
fn criterion_10_determinism() {
    let root = tempfile::tempdir().unwrap();
    let dir = |s: &str| root.path().join(s);
    let scenario = ScenarioConfig {
        duration: 300,
        detection_noise: moderate_noise(),
        confusion: off_roster_confusions(0.6),
        visibility_profile: 0.5,
        ..panning_scenario()
    };
    let scenario_path = dir("scenario.json");
    std::fs::write(&scenario_path, serde_json::to_string_pretty(&scenario).unwrap()).unwrap();
    let run_path = dir("run.json");
    let run = serde_json::json!({ "scenario": scenario });
    std::fs::write(&run_path, serde_json::to_string_pretty(&run).unwrap()).unwrap();

    let mut results = Vec::new();
    let mut all_ok = true;
    for (label, args) in [
        ("simulate", vec!["simulate", "--config", path_str(&scenario_path), "--seed", "9"]),
        ("track", vec!["track", "--config", "SIM/config.json"]),
        ("identify", vec!["identify", "--config", "SIM/config.json"]),
        ("identify-gt", vec!["identify", "--config", "SIM/config_gt.json", "--aggregation", "majority"]),
        ("eval", vec!["eval", "--config", "SIM/config.json"]),
        ("pipeline", vec!["pipeline", "--config", path_str(&run_path), "--seed", "9"]),
    ] {
        let mut snaps = Vec::new();
        for rep in 0..2 {
            let out = dir(&format!("{label}-{rep}"));
            let sim = dir("simulate-0");
            let sim = path_str(&sim).to_string();
            let mut full: Vec<String> = args.iter().map(|a| a.replace("SIM", &sim)).collect();
            full.extend(["--out".to_string(), path_str(&out).to_string()]);
            let argv: Vec<&str> = full.iter().map(String::as_str).collect();
            let code = cli(&argv);
            all_ok &= code == 0;
            snaps.push(snapshot(&out));
        }
        let same = snaps[0] == snaps[1] && !snaps[0].is_empty();
        all_ok &= same;
        results.push(format!("{label}: {} files {}", snaps[0].len(), if same { "identical" } else { "DIFFER" }));
    }
    verdict(10, "Determinism", all_ok, results.join(", "));
}
