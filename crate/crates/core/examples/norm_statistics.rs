//! Per-level slot depth and the hyperboloid time component.

use hyperlens::data::{generate_synthetic, SyntheticConfig};
use hyperlens::metrics::norm_stats;
use hyperlens::ManifoldSpec;

fn main() -> hyperlens::Result<()> {
    let bundle = generate_synthetic(&SyntheticConfig {
        n_scenes: 100,
        norm_profile: [(3, 1.446), (5, 1.254), (7, 1.193), (11, 1.146), (13, 1.137)].into_iter().collect(),
        norm_jitter: 0.02,
        seed: 3,
        ..SyntheticConfig::default()
    })?;

    for m in ManifoldSpec::default_grid() {
        let stats = norm_stats(&bundle, m)?;
        println!("{m} (spread ratio {:.3})", stats.spread_ratio);
        for (level, n) in &stats.per_level {
            match n.time_mean {
                Some(t) => println!("  {level:2}: {:.4} ± {:.4}   x0 {t:.4}", n.mean, n.std),
                None => println!("  {level:2}: {:.4} ± {:.4}", n.mean, n.std),
            }
        }
    }
    Ok(())
}
