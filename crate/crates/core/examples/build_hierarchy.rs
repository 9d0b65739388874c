//! Recover parent links from nested attention masks.

use hyperlens::data::{generate_synthetic, SyntheticConfig};
use hyperlens::hierarchy::{build_hierarchy, BinarizationPolicy, LevelPair};

fn main() -> hyperlens::Result<()> {
    let bundle = generate_synthetic(&SyntheticConfig {
        n_scenes: 1,
        seed: 7,
        ..SyntheticConfig::default()
    })?;
    let scene = &bundle.scenes[0];
    let pairs = LevelPair::consecutive(&bundle.levels);
    let graph = build_hierarchy(scene, &pairs, BinarizationPolicy::Argmax, 0.95)?;

    for a in &graph.assignments {
        println!("{}:", a.level_pair);
        for (j, parent) in a.parent_of.iter().enumerate() {
            let note = match a.excluded.get(&j) {
                Some(reason) => format!("  excluded ({reason:?})"),
                None => String::new(),
            };
            println!("  slot {j:2} -> {parent:2}  inclusion {:.3}{note}", a.inclusion[j]);
        }
    }
    Ok(())
}
