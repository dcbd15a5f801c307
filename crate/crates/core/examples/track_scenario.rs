//! Simulate a noisy rink, run the tracker and report CLEAR MOT and IDF1.
//!
//!     cargo run --example track_scenario -- [seed]

use rinktrack::metrics::{evaluate_video, format_method_table, MetricsParams};
use rinktrack::sim::{generate, DetectionNoise, Layout, ScenarioConfig};
use rinktrack::tracker::{track, TrackerParams};

fn main() -> rinktrack::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let clean = ScenarioConfig::default();
    let mut noisy = ScenarioConfig {
        detection_noise: DetectionNoise {
            fp_rate: 0.03,
            fn_rate: 0.08,
            jitter_sigma: 3.0,
        },
        ..ScenarioConfig::default()
    };
    noisy.motion.layout = Layout::Free;
    noisy.motion.direction_change_rate = 0.05;

    let params = TrackerParams::default();
    let metrics = MetricsParams::default();
    let mut rows = Vec::new();
    for (name, cfg) in [("clean, separated", clean), ("noisy, crossing", noisy)] {
        let bundle = generate(&cfg, seed)?;
        let tracks = track(&bundle.detection_frames(), &params);
        println!(
            "{name}: {} detections -> {} tracks ({} objects)",
            bundle.detections.len(),
            tracks.len(),
            bundle.gt_tracks.len()
        );
        rows.push((name.to_string(), evaluate_video(name, &bundle.gt_tracks, &tracks, &metrics)?));
    }
    let refs: Vec<_> = rows.iter().map(|(n, m)| (n.clone(), m)).collect();
    println!("\n{}", format_method_table(&refs));
    Ok(())
}
