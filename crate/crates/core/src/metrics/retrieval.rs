use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{project, project_level, require_manifolds, retrieval_distance};
use crate::data::SlotBundle;
use crate::error::{Error, Result};
use crate::hierarchy::{HierarchyGraph, LevelPair, ParentAssignment};
use crate::manifold::ManifoldSpec;

/// Hit@1 of one level pair under one manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub level_pair: LevelPair,
    pub manifold: ManifoldSpec,
    /// Percentage of evaluated fine slots whose mask parent is strictly the
    /// nearest coarse slot; `None` when nothing was evaluated.
    pub hit_at_1: Option<f64>,
    pub hits: usize,
    pub n_evaluated: usize,
    /// Chance level `100 / N1`, in percent.
    pub random_baseline: f64,
}

impl RetrievalResult {
    fn new(level_pair: LevelPair, manifold: ManifoldSpec, hits: usize, n_evaluated: usize) -> Self {
        RetrievalResult {
            level_pair,
            manifold,
            hit_at_1: (n_evaluated > 0).then(|| 100.0 * hits as f64 / n_evaluated as f64),
            hits,
            n_evaluated,
            random_baseline: 100.0 / level_pair.coarse as f64,
        }
    }
}

/// Nearest coarse slot to `fine` (lowest index on ties) and whether it is
/// strictly nearer than every other coarse slot. Inputs are projected
/// coordinates for `manifold`.
pub fn predicted_parent<V: AsRef<[f64]>>(
    fine: &[f64],
    coarse: &[V],
    manifold: ManifoldSpec,
) -> Result<(usize, bool)> {
    let mut best = (0, f64::INFINITY);
    let mut unique = true;
    for (i, c) in coarse.iter().enumerate() {
        let d = retrieval_distance(manifold, fine, c.as_ref())?;
        if d < best.1 {
            best = (i, d);
            unique = true;
        } else if d == best.1 {
            unique = false;
        }
    }
    if coarse.is_empty() {
        return Err(Error::InvalidInput("no coarse slots to rank".into()));
    }
    Ok((best.0, unique))
}

fn count_hits(
    coarse: &[Vec<f64>],
    fine: &[Vec<f64>],
    gt: &ParentAssignment,
    manifold: ManifoldSpec,
) -> Result<(usize, usize)> {
    let mut hits = 0;
    let mut n = 0;
    for j in gt.evaluable() {
        let (pred, unique) = predicted_parent(&fine[j], coarse, manifold)?;
        n += 1;
        if unique && pred == gt.parent_of[j] {
            hits += 1;
        }
    }
    Ok((hits, n))
}

fn check_shapes(coarse: usize, fine: usize, gt: &ParentAssignment) -> Result<()> {
    if coarse != gt.level_pair.coarse || fine != gt.level_pair.fine || gt.parent_of.len() != fine {
        return Err(Error::InvalidInput(format!(
            "got {coarse} coarse and {fine} fine slots for level pair {}",
            gt.level_pair
        )));
    }
    Ok(())
}

/// Hit@1 of one scene's fine slots against their mask-derived parents.
///
/// Ties at rank 1 count as misses.
pub fn hit_at_1<V: AsRef<[f64]>>(
    coarse_slots: &[V],
    fine_slots: &[V],
    gt: &ParentAssignment,
    manifold: ManifoldSpec,
) -> Result<RetrievalResult> {
    check_shapes(coarse_slots.len(), fine_slots.len(), gt)?;
    let coarse = project(coarse_slots, manifold)?;
    let fine = project(fine_slots, manifold)?;
    let (hits, n) = count_hits(&coarse, &fine, gt, manifold)?;
    Ok(RetrievalResult::new(gt.level_pair, manifold, hits, n))
}

/// Hit@1 pooled over all scenes, for every manifold and level pair.
///
/// `graphs` must be in scene order. Results are ordered manifold-major.
pub fn retrieval_analysis(
    bundle: &SlotBundle,
    graphs: &[HierarchyGraph],
    pairs: &[LevelPair],
    manifolds: &[ManifoldSpec],
) -> Result<Vec<RetrievalResult>> {
    require_manifolds(manifolds)?;
    if graphs.len() != bundle.scenes.len() {
        return Err(Error::InvalidInput(format!(
            "{} hierarchy graphs for {} scenes",
            graphs.len(),
            bundle.scenes.len()
        )));
    }
    let mut out = Vec::with_capacity(manifolds.len() * pairs.len());
    for &manifold in manifolds {
        let per_scene: Vec<Vec<(usize, usize)>> = bundle
            .scenes
            .par_iter()
            .zip(graphs)
            .map(|(scene, graph)| {
                pairs
                    .iter()
                    .map(|&pair| {
                        let gt = graph.assignment(pair).ok_or_else(|| {
                            Error::InvalidInput(format!("scene {} has no assignment for {pair}", scene.id))
                        })?;
                        let missing = |level| Error::IncompleteScene {
                            scene: scene.id.clone(),
                            level,
                        };
                        let coarse = project_level(scene, pair.coarse, manifold).ok_or_else(|| missing(pair.coarse))??;
                        let fine = project_level(scene, pair.fine, manifold).ok_or_else(|| missing(pair.fine))??;
                        check_shapes(coarse.len(), fine.len(), gt)?;
                        count_hits(&coarse, &fine, gt, manifold)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        for (k, &pair) in pairs.iter().enumerate() {
            let (hits, n) = per_scene
                .iter()
                .fold((0, 0), |(h, n), s| (h + s[k].0, n + s[k].1));
            out.push(RetrievalResult::new(pair, manifold, hits, n));
        }
    }
    Ok(out)
}
