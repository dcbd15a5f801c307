//! Aggregation variants on partially visible numbers, without roster
//! masking.
//!
//!     cargo run --release --example aggregation_ablation

use rinktrack::core::Identity;
use rinktrack::ident::{run_pipeline, Aggregation, PipelineParams, Scorers};
use rinktrack::metrics::{format_ablation_table, macro_f1, AblationRow};
use rinktrack::sim::{generate, ScenarioConfig};

fn main() -> rinktrack::Result<()> {
    let cfg = ScenarioConfig {
        visibility_profile: 0.3,
        ..ScenarioConfig::default()
    };
    let bundles = (0..10).map(|seed| generate(&cfg, seed)).collect::<rinktrack::Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (method, aggregation) in Aggregation::ablation_rows() {
        let params = PipelineParams {
            aggregation,
            ..PipelineParams::default()
        };
        let mut pairs: Vec<(Identity, Identity)> = Vec::new();
        for b in &bundles {
            let (home, away) = cfg.rosters.vectors(&b.vocab)?;
            let oracle = b.oracle_scorers();
            let scorers = Scorers {
                jersey: &oracle,
                windows: &oracle,
                team: &oracle,
            };
            let ids = run_pipeline(&b.gt_tracks, scorers, (&home, &away), &b.vocab, &params)?;
            pairs.extend(b.entities.iter().zip(&ids).map(|(e, i)| (e.label, i.identity)));
        }
        let correct = pairs.iter().filter(|(t, p)| t == p).count();
        rows.push(AblationRow {
            method: method.to_string(),
            aggregation,
            accuracy: correct as f64 / pairs.len() as f64,
            macro_f1: macro_f1(&pairs),
        });
    }
    println!("{}", format_ablation_table(&rows));
    Ok(())
}
