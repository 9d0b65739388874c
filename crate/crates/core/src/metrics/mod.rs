//! Hierarchy metrics over slot bundles.
//!
//! Each analysis takes a [`ManifoldSpec`] and tags its result with it; the
//! Euclidean and Lorentz code paths only meet in the dispatch helpers below.
//! Per-scene work runs on the ambient rayon pool and is reduced in scene
//! order, so results do not depend on the number of workers.

mod agreement;
mod gromov;
mod kde;
mod norms;
mod retrieval;
mod separation;

pub use agreement::{agreement_analysis, AgreementMatrix};
pub use gromov::{
    gromov_delta, gromov_delta_detailed, hyperbolicity_analysis, DeltaSample, DistanceMatrix, GromovDelta,
    HyperbolicityResult, HyperbolicityScope,
};
pub use kde::{kde_overlap, silverman_bandwidth, GaussianKde, OV_GRID_POINTS};
pub use norms::{norm_stats, LevelNorm, NormStats};
pub use retrieval::{hit_at_1, predicted_parent, retrieval_analysis, RetrievalResult};
pub use separation::{centroid_depth, separation_analysis, SeparationResult};

use serde::{Deserialize, Serialize};

use crate::data::SceneRecord;
use crate::error::{Error, Result};
use crate::manifold::{self, ManifoldSpec};
use crate::numerics;

/// Mean, spread and quartiles of a sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Summary {
            count: values.len(),
            mean: numerics::mean(values),
            std: numerics::std_dev(values),
            min: sorted[0],
            q1: numerics::quantile_sorted(&sorted, 0.25),
            median: numerics::quantile_sorted(&sorted, 0.5),
            q3: numerics::quantile_sorted(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
        })
    }
}

/// Slots of every level of a scene, mapped into the manifold's ambient
/// coordinates (raw vectors for Euclidean, hyperboloid points for Lorentz).
pub(crate) fn project_level(scene: &SceneRecord, level: usize, manifold: ManifoldSpec) -> Option<Result<Vec<Vec<f64>>>> {
    let slots = scene.slots(level)?;
    Some(project(&slots, manifold))
}

pub(crate) fn project<V: AsRef<[f64]>>(slots: &[V], manifold: ManifoldSpec) -> Result<Vec<Vec<f64>>> {
    slots
        .iter()
        .map(|s| match manifold {
            ManifoldSpec::Euclidean => Ok(s.as_ref().to_vec()),
            ManifoldSpec::Lorentz(c) => manifold::exp_map_origin(s.as_ref(), c.get()).map(|p| p.coords().to_vec()),
        })
        .collect()
}

/// Distance used to rank candidate parents: cosine in Euclidean space,
/// geodesic on the hyperboloid. Inputs are projected coordinates.
pub(crate) fn retrieval_distance(manifold: ManifoldSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    match manifold {
        ManifoldSpec::Euclidean => manifold::cosine_distance(x, y),
        ManifoldSpec::Lorentz(c) => Ok(manifold::distance_coords(x, y, c.get())),
    }
}

/// Metric distance between projected points: `l2` or geodesic.
pub(crate) fn metric_distance(manifold: ManifoldSpec, x: &[f64], y: &[f64]) -> f64 {
    match manifold {
        ManifoldSpec::Euclidean => numerics::pairwise_sum_by(x.len(), |k| (x[k] - y[k]).powi(2)).sqrt(),
        ManifoldSpec::Lorentz(c) => manifold::distance_coords(x, y, c.get()),
    }
}

pub(crate) fn require_manifolds(manifolds: &[ManifoldSpec]) -> Result<()> {
    if manifolds.is_empty() {
        Err(Error::InvalidParameter("at least one manifold is required".into()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_small_sample() {
        let s = Summary::of(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!((s.min, s.max, s.median, s.mean), (1.0, 4.0, 2.5, 2.5));
        assert!(Summary::of(&[]).is_none());
    }
}
