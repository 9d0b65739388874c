use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::SlotBundle;
use crate::error::{Error, Result};
use crate::manifold::{self, ManifoldSpec};
use crate::numerics;

/// Depth statistics of individual slots at one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelNorm {
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// Mean and std of the hyperboloid time component `x_0` (Lorentz only).
    pub time_mean: Option<f64>,
    pub time_std: Option<f64>,
}

/// Per-level slot depth: `l2` norm in Euclidean space, distance to the
/// hyperboloid origin under Lorentz.
///
/// The exponential map at the origin is a radial isometry, so the Lorentz
/// depth of a single slot equals its Euclidean norm; the time component
/// `x_0 = cosh(sqrt(c) |s|) / sqrt(c)` is reported alongside as the
/// curvature-dependent quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub manifold: ManifoldSpec,
    pub per_level: BTreeMap<usize, LevelNorm>,
    /// Mean depth of the coarsest level over that of the finest.
    pub spread_ratio: f64,
}

pub fn norm_stats(bundle: &SlotBundle, manifold: ManifoldSpec) -> Result<NormStats> {
    if bundle.scenes.is_empty() {
        return Err(Error::InsufficientData("norm statistics of an empty bundle".into()));
    }
    let per_level = bundle
        .levels
        .iter()
        .map(|&n| {
            let values: Vec<(f64, f64)> = bundle
                .scenes
                .par_iter()
                .map(|scene| {
                    let slots = scene.slots(n).ok_or_else(|| Error::IncompleteScene {
                        scene: scene.id.clone(),
                        level: n,
                    })?;
                    slots
                        .iter()
                        .map(|s| depth_and_time(s, manifold))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            let depth: Vec<f64> = values.iter().map(|v| v.0).collect();
            let time: Vec<f64> = values.iter().map(|v| v.1).collect();
            let lorentz = matches!(manifold, ManifoldSpec::Lorentz(_));
            Ok((
                n,
                LevelNorm {
                    count: depth.len(),
                    mean: numerics::mean(&depth),
                    std: numerics::std_dev(&depth),
                    time_mean: lorentz.then(|| numerics::mean(&time)),
                    time_std: lorentz.then(|| numerics::std_dev(&time)),
                },
            ))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let first = &per_level[&bundle.levels[0]];
    let last = &per_level[bundle.levels.last().unwrap()];
    Ok(NormStats {
        manifold,
        spread_ratio: first.mean / last.mean,
        per_level,
    })
}

fn depth_and_time(slot: &[f64], manifold: ManifoldSpec) -> Result<(f64, f64)> {
    match manifold {
        ManifoldSpec::Euclidean => Ok((numerics::norm(slot), f64::NAN)),
        ManifoldSpec::Lorentz(c) => {
            let x = manifold::exp_map_origin(slot, c.get())?;
            Ok((manifold::origin_distance_coords(x.coords(), c.get()), x.time()))
        }
    }
}
