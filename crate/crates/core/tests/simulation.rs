mod common;

use rinktrack::core::Rosters;
use rinktrack::ident::{jersey_visible, PipelineParams};
use rinktrack::sim::{generate, Confusion, ScenarioConfig};

use common::*;

#[test]
fn clean_full_visibility_identifies_everyone() {
    for seed in 0..3 {
        let b = generate(&ScenarioConfig::default(), seed).unwrap();
        let ids = run_checked(&b, &b.gt_tracks, &PipelineParams::default().with_masking(true));
        let acc = accuracy(&b, &b.gt_tracks, &ids);
        assert_eq!(acc.with_roster, 1.0, "seed {seed}");
        assert_eq!(acc.without_roster, 1.0, "seed {seed}");
    }
}

#[test]
fn off_roster_confusion_is_undone_by_masking() {
    // 8 is on neither roster.
    let cfg = ScenarioConfig {
        players_per_team: 6,
        null_rate: 0.0,
        rosters: Rosters {
            home: [2, 3, 5, 6, 9, 11].into(),
            away: [4, 7, 10, 12, 14, 16].into(),
        },
        confusion: vec![Confusion { from: 6, to: 8, prob: 0.6 }],
        ..ScenarioConfig::default()
    };
    let b = generate(&cfg, 0).unwrap();
    let ids = run_checked(&b, &b.gt_tracks, &PipelineParams::default().with_masking(true));
    let acc = accuracy(&b, &b.gt_tracks, &ids);
    assert!(acc.with_roster > acc.without_roster, "{acc:?}");
}

#[test]
fn hidden_numbers_are_never_present() {
    let cfg = ScenarioConfig {
        visibility_profile: 0.0,
        ..ScenarioConfig::default()
    };
    let b = generate(&cfg, 3).unwrap();
    let o = b.oracle_scorers();
    assert!(b.gt_tracks.iter().all(|t| !jersey_visible(t, &o, 0.01).unwrap()));
}

#[test]
fn tracker_output_is_scored_through_attribution() {
    let cfg = ScenarioConfig {
        detection_noise: moderate_noise(),
        ..ScenarioConfig::default()
    };
    let b = generate(&cfg, 12).unwrap();
    let pred = tracked(&b);
    let ids = run_checked(&b, &pred, &PipelineParams::default().with_masking(true));
    let acc = accuracy(&b, &pred, &ids);
    assert!(acc.tracks >= b.gt_tracks.len());
    assert!(acc.with_roster > 0.9, "{acc:?}");
}

#[test]
fn pan_exits_are_logged_per_reentry() {
    let b = generate(&panning_scenario(), 1).unwrap();
    for e in &b.events {
        let t = b.gt_tracks.iter().find(|t| t.track_id() == e.gt_id).unwrap();
        let frames: Vec<u32> = t.detections().iter().map(|d| d.frame).collect();
        assert!(frames.contains(&e.exit_frame) && frames.contains(&e.reentry_frame));
        assert!(!frames.iter().any(|f| (e.exit_frame + 1..e.reentry_frame).contains(f)));
    }
}
