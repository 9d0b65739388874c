//! Worst-case four-point Gromov hyperbolicity, normalized by diameter.
//!
//! For points `x, y, z, w` the three pairing sums
//! `d(x,y)+d(z,w)`, `d(x,z)+d(y,w)`, `d(x,w)+d(y,z)` are sorted
//! `S1 >= S2 >= S3`; the quadruple defect is `(S1 - S2) / 2`. The worst-case
//! `delta` is the largest defect over all quadruples and the reported score is
//! `2 delta / diam`, which lies in `[0, 1]` for any metric and does not change
//! when the metric is rescaled.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{metric_distance, project, Summary};
use crate::data::SlotBundle;
use crate::error::{Error, Result};
use crate::manifold::ManifoldSpec;

/// Symmetric, nonnegative matrix with zero diagonal, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidMetric(format!("{} entries for a {n} x {n} matrix", data.len())));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidMetric(format!("nonzero diagonal at {i}")));
            }
            for j in i + 1..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if !(a.is_finite() && a >= 0.0) {
                    return Err(Error::InvalidMetric(format!("entry ({i}, {j}) = {a} is not a finite distance")));
                }
                if a != b {
                    return Err(Error::InvalidMetric(format!("asymmetric at ({i}, {j}): {a} vs {b}")));
                }
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMetric("distance matrix must be square".into()));
        }
        Self::new(n, rows.concat())
    }

    /// Pairwise distances of `points` under `metric`, which must be symmetric.
    pub fn from_points<V: AsRef<[f64]>>(points: &[V], metric: impl Fn(&[f64], &[f64]) -> f64) -> Result<Self> {
        let n = points.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = metric(points[i].as_ref(), points[j].as_ref());
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Self::new(n, data)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn diameter(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}

/// Full outcome of a hyperbolicity computation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GromovDelta {
    /// Worst-case defect.
    pub delta: f64,
    pub diameter: f64,
    /// `2 delta / diameter`, or 0 for a zero-diameter set.
    pub normalized: f64,
    /// Quadruples examined before finishing.
    pub quadruples: u64,
}

/// Normalized worst-case hyperbolicity of a finite metric space.
pub fn gromov_delta(distances: &DistanceMatrix) -> Result<f64> {
    gromov_delta_detailed(distances).map(|g| g.normalized)
}

/// Exhaustive enumeration of unordered quadruples. Stops early once a
/// quadruple attains the upper bound `diam / 2`.
pub fn gromov_delta_detailed(distances: &DistanceMatrix) -> Result<GromovDelta> {
    let n = distances.n;
    if n < 4 {
        return Err(Error::InsufficientPoints(n));
    }
    let diameter = distances.diameter();
    let bound = diameter / 2.0;
    let d = |i: usize, j: usize| distances.get(i, j);
    let mut worst = 0.0f64;
    let mut quadruples = 0u64;
    'outer: for x in 0..n {
        for y in x + 1..n {
            let dxy = d(x, y);
            for z in y + 1..n {
                let (dxz, dyz) = (d(x, z), d(y, z));
                for w in z + 1..n {
                    quadruples += 1;
                    let s1 = dxy + d(z, w);
                    let s2 = dxz + d(y, w);
                    let s3 = d(x, w) + dyz;
                    // largest minus middle of three
                    let hi = s1.max(s2).max(s3);
                    let mid = s1.min(s2).max(s1.max(s2).min(s3));
                    let defect = (hi - mid) / 2.0;
                    if defect > worst {
                        worst = defect;
                        if worst >= bound {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let normalized = if diameter > 0.0 {
        (2.0 * worst / diameter).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(GromovDelta {
        delta: worst,
        diameter,
        normalized,
        quadruples,
    })
}

/// Which slots of a scene form one point set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicityScope {
    /// All slots of all levels together.
    #[default]
    Union,
    /// Each level on its own; levels with fewer than 4 slots are skipped.
    PerLevel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaSample {
    pub scene: String,
    /// Set in per-level scope.
    pub level: Option<usize>,
    pub delta_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityResult {
    pub manifold: ManifoldSpec,
    pub scope: HyperbolicityScope,
    pub samples: Vec<DeltaSample>,
    pub summary: Option<Summary>,
    pub warnings: Vec<String>,
}

impl HyperbolicityResult {
    pub fn per_scene_delta(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.delta_norm).collect()
    }
}

/// Distribution of normalized hyperbolicity over scenes.
///
/// Distances are `l2` under the Euclidean manifold and geodesic under Lorentz.
pub fn hyperbolicity_analysis(
    bundle: &SlotBundle,
    manifold: ManifoldSpec,
    scope: HyperbolicityScope,
) -> Result<HyperbolicityResult> {
    let per_scene: Vec<(Vec<DeltaSample>, Vec<String>)> = bundle
        .scenes
        .par_iter()
        .map(|scene| -> Result<_> {
            let sets: Vec<(Option<usize>, Vec<&[f64]>)> = match scope {
                HyperbolicityScope::Union => vec![(
                    None,
                    bundle
                        .levels
                        .iter()
                        .filter_map(|&n| scene.slots(n))
                        .flatten()
                        .collect(),
                )],
                HyperbolicityScope::PerLevel => bundle
                    .levels
                    .iter()
                    .filter_map(|&n| scene.slots(n).map(|s| (Some(n), s)))
                    .collect(),
            };
            let mut samples = Vec::new();
            let mut warnings = Vec::new();
            for (level, slots) in sets {
                if slots.len() < 4 {
                    if scope == HyperbolicityScope::Union {
                        warnings.push(format!("scene {} skipped: {} slots (< 4)", scene.id, slots.len()));
                    }
                    continue;
                }
                let points = project(&slots, manifold)?;
                let m = DistanceMatrix::from_points(&points, |a, b| metric_distance(manifold, a, b))?;
                samples.push(DeltaSample {
                    scene: scene.id.clone(),
                    level,
                    delta_norm: gromov_delta(&m)?,
                });
            }
            Ok((samples, warnings))
        })
        .collect::<Result<_>>()?;

    let mut samples = Vec::new();
    let mut warnings = Vec::new();
    for (s, w) in per_scene {
        samples.extend(s);
        warnings.extend(w);
    }
    let summary = Summary::of(&samples.iter().map(|s| s.delta_norm).collect::<Vec<_>>());
    Ok(HyperbolicityResult {
        manifold,
        scope,
        samples,
        summary,
        warnings,
    })
}
