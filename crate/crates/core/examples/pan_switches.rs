//! Camera panning makes players leave and re-enter the view. Ground-truth
//! gaps longer than delta estimate how many identity switches panning
//! causes.
//!
//!     cargo run --example pan_switches

use rinktrack::metrics::{evaluate_video, MetricsParams};
use rinktrack::sim::{generate, PanKeyframe, ScenarioConfig};
use rinktrack::tracker::{track, TrackerParams};

fn main() -> rinktrack::Result<()> {
    let cfg = ScenarioConfig {
        rink_width: 2560.0,
        pan_profile: vec![
            PanKeyframe { frame: 0, offset: 0.0 },
            PanKeyframe { frame: 120, offset: 1280.0 },
            PanKeyframe { frame: 300, offset: 1280.0 },
            PanKeyframe { frame: 420, offset: 300.0 },
            PanKeyframe { frame: 600, offset: 300.0 },
            PanKeyframe { frame: 720, offset: 1280.0 },
        ],
        ..ScenarioConfig::default()
    };
    let bundle = generate(&cfg, 5)?;
    let tracks = track(&bundle.detection_frames(), &TrackerParams::default());
    let m = evaluate_video("pan", &bundle.gt_tracks, &tracks, &MetricsParams::default())?;

    println!("{} re-entries logged by the simulator:", bundle.events.len());
    for e in &bundle.events {
        println!("  object {:>2} left after frame {:>3}, back at {:>3} (gap {})", e.gt_id, e.exit_frame, e.reentry_frame, e.gap);
    }
    println!("\nIDSW {}  MOTA {:.3}  IDF1 {:.3}", m.idsw, m.mota, m.idf1);
    println!("\ndelta  pan-IDSW  share of IDSW");
    for p in &m.pan_sweep {
        let share = p.proportion.map_or("-".into(), |x| format!("{x:.2}"));
        println!("{:>5}  {:>8}  {share:>13}", p.delta, p.pan_idsw);
    }
    Ok(())
}
