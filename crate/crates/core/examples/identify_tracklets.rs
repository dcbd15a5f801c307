//! Team vote, sliding-window jersey inference and roster masking on
//! ground-truth tracklets, scored by the simulator's oracle.
//!
//!     cargo run --example identify_tracklets

use rinktrack::ident::{run_pipeline, PipelineParams, Scorers};
use rinktrack::sim::{generate, ScenarioConfig};

fn main() -> rinktrack::Result<()> {
    let cfg = ScenarioConfig {
        visibility_profile: 0.5,
        ..ScenarioConfig::default()
    };
    let bundle = generate(&cfg, 42)?;
    let (home, away) = cfg.rosters.vectors(&bundle.vocab)?;
    let oracle = bundle.oracle_scorers();
    let scorers = Scorers {
        jersey: &oracle,
        windows: &oracle,
        team: &oracle,
    };
    let params = PipelineParams::default().with_masking(true);
    let ids = run_pipeline(&bundle.gt_tracks, scorers, (&home, &away), &bundle.vocab, &params)?;

    println!("track  team     visible  predicted  truth");
    let mut correct = 0;
    for (id, truth) in ids.iter().zip(&bundle.entities) {
        correct += usize::from(id.identity == truth.label);
        println!(
            "{:>5}  {:<7}  {:<7}  {:<9}  {}",
            id.track_id,
            id.team.to_string(),
            id.visible,
            id.identity.to_string(),
            truth.label
        );
    }
    println!("\n{correct}/{} correct", ids.len());
    Ok(())
}
