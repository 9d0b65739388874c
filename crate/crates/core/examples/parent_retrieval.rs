//! Hit@1 of mask-derived parents under each candidate geometry.

use hyperlens::data::{generate_synthetic, SyntheticConfig};
use hyperlens::hierarchy::{build_hierarchies, BinarizationPolicy, LevelPair};
use hyperlens::metrics::retrieval_analysis;
use hyperlens::ManifoldSpec;

fn main() -> hyperlens::Result<()> {
    let bundle = generate_synthetic(&SyntheticConfig {
        n_scenes: 50,
        child_noise: 0.3,
        seed: 11,
        ..SyntheticConfig::default()
    })?;
    let pairs = LevelPair::consecutive(&bundle.levels);
    let graphs = build_hierarchies(&bundle, &pairs, BinarizationPolicy::Argmax, 0.95)?;
    let results = retrieval_analysis(&bundle, &graphs, &pairs, &ManifoldSpec::default_grid())?;

    for r in results {
        let hit = r.hit_at_1.map_or("n/a".to_string(), |h| format!("{h:6.2}%"));
        println!(
            "{:<14} {:<7} {hit}  ({} slots, chance {:.2}%)",
            r.manifold.to_string(),
            r.level_pair.to_string(),
            r.n_evaluated,
            r.random_baseline
        );
    }
    Ok(())
}
