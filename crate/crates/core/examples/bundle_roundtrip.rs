//! Save a bundle, validate it on disk and load it back.

use hyperlens::data::{generate_synthetic, load_bundle, save_bundle, validate_bundle, SyntheticConfig};

fn main() -> hyperlens::Result<()> {
    let bundle = generate_synthetic(&SyntheticConfig {
        n_scenes: 4,
        seed: 42,
        ..SyntheticConfig::default()
    })?;
    let dir = std::env::temp_dir().join("hyperlens-roundtrip");
    save_bundle(&bundle, &dir)?;
    println!("saved {} scenes to {}", bundle.scenes.len(), dir.display());

    let report = validate_bundle(&dir);
    for s in &report.scenes {
        println!("  {}: {}", s.scene, if s.violations.is_empty() { "OK" } else { "FAIL" });
    }

    let loaded = load_bundle(&dir)?;
    println!("identical after reload: {}", loaded == bundle);
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
