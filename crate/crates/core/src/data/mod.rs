//! Slot bundles: in-memory representation, on-disk layout, synthetic
//! generation, and report export.
//!
//! On disk a bundle is a directory holding `manifest.json` plus one pair of
//! raw little-endian `f32` blobs per scene and level:
//!
//! ```text
//! manifest.json
//! slots_<scene>_<N>.bin    N x d_s, row-major
//! masks_<scene>_<N>.bin    N x L, row-major, values in [0, 1]
//! planted_<scene>.json     optional planted truth
//! ```

mod bundle;
mod report;
mod synth;

pub use bundle::{
    load_bundle, save_bundle, validate_bundle, LevelData, PlantedTruth, SceneRecord, SceneValidation,
    SlotBundle, ValidationReport, FORMAT_VERSION,
};
pub use report::{export_report, report_json, write_tables, AnalysisReport, BundleSummary, ReportFormat, REPORT_DIGITS};
pub use synth::{generate_synthetic, SlotMode, SyntheticConfig, MIN_REGION_PATCHES};
