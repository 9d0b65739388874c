//! How often geometries pick the same parent, and how often they match the masks.

use hyperlens::data::{generate_synthetic, SyntheticConfig};
use hyperlens::hierarchy::{build_hierarchies, BinarizationPolicy, LevelPair};
use hyperlens::metrics::agreement_analysis;
use hyperlens::ManifoldSpec;

fn main() -> hyperlens::Result<()> {
    let bundle = generate_synthetic(&SyntheticConfig {
        n_scenes: 40,
        child_noise: 0.6,
        seed: 9,
        ..SyntheticConfig::default()
    })?;
    let pairs = LevelPair::consecutive(&bundle.levels);
    let graphs = build_hierarchies(&bundle, &pairs, BinarizationPolicy::Argmax, 0.95)?;
    let m = agreement_analysis(&bundle, &graphs, &pairs, &ManifoldSpec::default_grid())?;

    println!("{} fine slots compared", m.n_compared);
    print!("{:>14}", "");
    for l in &m.labels {
        print!("{l:>14}");
    }
    println!();
    for (l, row) in m.labels.iter().zip(&m.entries) {
        print!("{l:>14}");
        for e in row {
            print!("{:>14}", e.map_or("NA".into(), |v| format!("{v:.4}")));
        }
        println!();
    }
    Ok(())
}
