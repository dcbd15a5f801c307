//! Jersey-presence accuracy of the visibility filter across thresholds.
//!
//!     cargo run --example theta_sweep

use rinktrack::ident::{theta_sweep, PRESENCE_THETAS};
use rinktrack::sim::{generate, ScenarioConfig};

fn main() -> rinktrack::Result<()> {
    let cfg = ScenarioConfig {
        visibility_profile: 0.2,
        ..ScenarioConfig::default()
    };
    for seed in 0..4 {
        let b = generate(&cfg, seed)?;
        let labeled: Vec<_> = b
            .gt_tracks
            .iter()
            .zip(&b.entities)
            .map(|(t, e)| (t.clone(), e.readable))
            .collect();
        println!("seed {seed}:");
        for p in theta_sweep(&labeled, &b.oracle_scorers(), &PRESENCE_THETAS)? {
            println!("  theta {:<6}  presence accuracy {:.3}", p.theta, p.accuracy);
        }
    }
    Ok(())
}
