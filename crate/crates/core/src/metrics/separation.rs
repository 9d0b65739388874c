use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{kde_overlap, require_manifolds};
use crate::data::SlotBundle;
use crate::error::{Error, Result};
use crate::manifold::{self, ManifoldSpec};
use crate::numerics;

/// Distance from the origin to the centroid of one level's slots.
///
/// Euclidean: norm of the mean slot. Lorentz: geodesic distance from the
/// origin to the Lorentzian centroid of the exp-mapped slots.
pub fn centroid_depth<V: AsRef<[f64]>>(slots: &[V], manifold: ManifoldSpec) -> Result<f64> {
    match manifold {
        ManifoldSpec::Euclidean => Ok(manifold::euclidean_centroid(slots)?.norm()),
        ManifoldSpec::Lorentz(c) => {
            if slots.is_empty() {
                return Err(Error::InvalidInput("centroid of an empty slot set".into()));
            }
            let points = super::project(slots, manifold)?;
            let mu = manifold::centroid_coords(&points, c.get())?;
            Ok(manifold::origin_distance_coords(&mu, c.get()))
        }
    }
}

/// Level separation under one manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationResult {
    pub manifold: ManifoldSpec,
    pub levels: Vec<usize>,
    pub scene_ids: Vec<String>,
    /// One centroid depth per usable scene, per level.
    pub per_level_samples: BTreeMap<usize, Vec<f64>>,
    pub level_means: BTreeMap<usize, f64>,
    /// Pairwise overlap, indexed like `levels`; `None` where a KDE could not be fit.
    pub ov_matrix: Vec<Vec<Option<f64>>>,
    /// Mean over distinct level pairs.
    pub ov_mean: Option<f64>,
    /// Levels sorted by decreasing mean depth.
    pub depth_order: Vec<usize>,
    /// Mean depth strictly decreases from the coarsest to the finest level.
    pub inverted: bool,
    /// Mean depth of the coarsest level over that of the finest.
    pub spread_ratio: f64,
    pub warnings: Vec<String>,
}

/// Centroid-depth distributions per level and their pairwise KDE overlap,
/// for every manifold.
pub fn separation_analysis(bundle: &SlotBundle, manifolds: &[ManifoldSpec]) -> Result<Vec<SeparationResult>> {
    require_manifolds(manifolds)?;
    manifolds.iter().map(|&m| separation_one(bundle, m)).collect()
}

fn separation_one(bundle: &SlotBundle, manifold: ManifoldSpec) -> Result<SeparationResult> {
    let levels = &bundle.levels;
    let mut warnings = Vec::new();

    let depths: Vec<Result<Vec<f64>, String>> = bundle
        .scenes
        .par_iter()
        .map(|scene| {
            levels
                .iter()
                .map(|&n| {
                    let slots = scene
                        .slots(n)
                        .ok_or_else(|| format!("scene {} skipped: level {n} missing", scene.id))?;
                    centroid_depth(&slots, manifold).map_err(|e| format!("scene {} skipped: {e}", scene.id))
                })
                .collect()
        })
        .collect();

    let mut scene_ids = Vec::new();
    let mut per_level_samples: BTreeMap<usize, Vec<f64>> = levels.iter().map(|&n| (n, Vec::new())).collect();
    for (scene, d) in bundle.scenes.iter().zip(depths) {
        match d {
            Ok(values) => {
                scene_ids.push(scene.id.clone());
                for (&n, v) in levels.iter().zip(values) {
                    per_level_samples.get_mut(&n).unwrap().push(v);
                }
            }
            Err(w) => warnings.push(w),
        }
    }
    if scene_ids.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "separation under {manifold} needs at least 2 usable scenes, found {}",
            scene_ids.len()
        )));
    }

    let level_means: BTreeMap<usize, f64> = per_level_samples
        .iter()
        .map(|(&n, v)| (n, numerics::mean(v)))
        .collect();

    let k = levels.len();
    let mut ov_matrix = vec![vec![None; k]; k];
    let mut off_diagonal = Vec::new();
    for a in 0..k {
        ov_matrix[a][a] = Some(1.0);
        for b in a + 1..k {
            let (na, nb) = (levels[a], levels[b]);
            match kde_overlap(&per_level_samples[&na], &per_level_samples[&nb]) {
                Ok(ov) => {
                    ov_matrix[a][b] = Some(ov);
                    ov_matrix[b][a] = Some(ov);
                    off_diagonal.push(ov);
                }
                Err(e) => warnings.push(format!("OV({na}, {nb}) under {manifold} unavailable: {e}")),
            }
        }
    }
    let ov_mean = (!off_diagonal.is_empty()).then(|| numerics::mean(&off_diagonal));

    let mut depth_order = levels.clone();
    depth_order.sort_by(|a, b| level_means[b].total_cmp(&level_means[a]).then(a.cmp(b)));
    let inverted = levels.windows(2).all(|w| level_means[&w[0]] > level_means[&w[1]]);
    let spread_ratio = level_means[&levels[0]] / level_means[&levels[k - 1]];

    Ok(SeparationResult {
        manifold,
        levels: levels.clone(),
        scene_ids,
        per_level_samples,
        level_means,
        ov_matrix,
        ov_mean,
        depth_order,
        inverted,
        spread_ratio,
        warnings,
    })
}
