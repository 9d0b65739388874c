//! Hierarchy probes for object-centric slot embeddings.
//!
//! Slots are compared in Euclidean space and on the Lorentz hyperboloid
//! after the exponential map at the origin. The [`metrics`] module holds the
//! analyses (parent retrieval, level separation, norm statistics, Gromov
//! hyperbolicity, cross-manifold agreement); [`hierarchy`] derives the
//! reference parent maps from attention masks; [`data`] reads, writes and
//! synthesizes slot bundles.

pub mod analysis;
pub mod cli;
pub mod data;
pub mod error;
pub mod hierarchy;
pub mod manifold;
pub mod metrics;
pub mod numerics;

pub use analysis::{run_analyses, Analysis, AnalysisConfig};
pub use error::{Error, Result};
pub use manifold::{Curvature, LorentzPoint, ManifoldSpec};
