use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{predicted_parent, project_level, require_manifolds};
use crate::data::SlotBundle;
use crate::error::{Error, Result};
use crate::hierarchy::{HierarchyGraph, LevelPair};
use crate::manifold::ManifoldSpec;

/// Label of the mask-derived hierarchy in [`AgreementMatrix::labels`].
pub const GT_LABEL: &str = "gt";

/// Pairwise agreement of the parent assignments induced by each manifold and
/// by the masks.
///
/// A manifold assigns each fine slot to its nearest coarse slot (lowest index
/// on ties). Agreement between two sources is the fraction of evaluated fine
/// slots, pooled over scenes and level pairs, given the same parent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub definition: String,
    /// Manifold names followed by `gt`.
    pub labels: Vec<String>,
    /// Symmetric with unit diagonal; off-diagonal `None` when no fine slot
    /// was evaluated.
    pub entries: Vec<Vec<Option<f64>>>,
    pub n_compared: usize,
}

impl AgreementMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        self.entries[i][j]
    }
}

pub fn agreement_analysis(
    bundle: &SlotBundle,
    graphs: &[HierarchyGraph],
    pairs: &[LevelPair],
    manifolds: &[ManifoldSpec],
) -> Result<AgreementMatrix> {
    require_manifolds(manifolds)?;
    if graphs.len() != bundle.scenes.len() {
        return Err(Error::InvalidInput(format!(
            "{} hierarchy graphs for {} scenes",
            graphs.len(),
            bundle.scenes.len()
        )));
    }
    let k = manifolds.len() + 1;

    // per scene: one row of parent choices per evaluated fine slot
    let choices: Vec<Vec<Vec<usize>>> = bundle
        .scenes
        .par_iter()
        .zip(graphs)
        .map(|(scene, graph)| -> Result<_> {
            let mut rows = Vec::new();
            for &pair in pairs {
                let gt = graph.assignment(pair).ok_or_else(|| {
                    Error::InvalidInput(format!("scene {} has no assignment for {pair}", scene.id))
                })?;
                let missing = |level| Error::IncompleteScene {
                    scene: scene.id.clone(),
                    level,
                };
                let projected = manifolds
                    .iter()
                    .map(|&m| {
                        let coarse = project_level(scene, pair.coarse, m).ok_or_else(|| missing(pair.coarse))??;
                        let fine = project_level(scene, pair.fine, m).ok_or_else(|| missing(pair.fine))??;
                        Ok((coarse, fine))
                    })
                    .collect::<Result<Vec<_>>>()?;
                for j in gt.evaluable() {
                    let mut row = Vec::with_capacity(k);
                    for (&m, (coarse, fine)) in manifolds.iter().zip(&projected) {
                        row.push(predicted_parent(&fine[j], coarse, m)?.0);
                    }
                    row.push(gt.parent_of[j]);
                    rows.push(row);
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;

    let mut agree = vec![vec![0usize; k]; k];
    let mut n = 0usize;
    for row in choices.iter().flatten() {
        n += 1;
        for a in 0..k {
            for b in a + 1..k {
                if row[a] == row[b] {
                    agree[a][b] += 1;
                }
            }
        }
    }
    let mut entries = vec![vec![None; k]; k];
    for a in 0..k {
        entries[a][a] = Some(1.0);
        for b in a + 1..k {
            let v = (n > 0).then(|| agree[a][b] as f64 / n as f64);
            entries[a][b] = v;
            entries[b][a] = v;
        }
    }

    let mut labels: Vec<String> = manifolds.iter().map(ToString::to_string).collect();
    labels.push(GT_LABEL.into());
    Ok(AgreementMatrix {
        definition: "fraction of non-excluded fine slots assigned the same parent \
                     (nearest coarse slot per manifold, mask inclusion for gt)"
            .into(),
        labels,
        entries,
        n_compared: n,
    })
}
