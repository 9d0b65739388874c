//! Every analysis on one bundle, written out as a JSON report and CSV tables.

use hyperlens::data::{export_report, generate_synthetic, write_tables, ReportFormat, SyntheticConfig};
use hyperlens::{run_analyses, AnalysisConfig};

fn main() -> hyperlens::Result<()> {
    let bundle = generate_synthetic(&SyntheticConfig {
        n_scenes: 30,
        child_noise: 0.3,
        seed: 1,
        ..SyntheticConfig::default()
    })?;
    let config = AnalysisConfig::default();
    let report = run_analyses(&bundle, &config, None, &|msg| eprintln!("{msg}"))?;

    let out = std::env::temp_dir().join("hyperlens-pipeline");
    export_report(&report, out.join("report.json"), ReportFormat::Structured)?;
    for path in write_tables(&report, out.join("tables"))? {
        println!("wrote {}", path.display());
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
