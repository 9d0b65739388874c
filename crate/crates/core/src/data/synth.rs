//! Synthetic bundles with a planted hierarchy.
//!
//! Every scene gets three root slots; each finer level splits every slot of
//! the previous level into a balanced number of children. Masks follow the
//! same tree: the patch region of a parent is cut into contiguous runs, one
//! per child. A configurable fraction of each child's run is handed to a slot
//! under a different parent, so children are not exact copies of their
//! parents' regions and survive the near-duplicate exclusion.
//!
//! Randomness is drawn from ChaCha8 streams keyed by
//! `(seed, scene, level, slot)`, so any scene can be regenerated alone and
//! output does not depend on thread count.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{LevelData, PlantedTruth, SceneRecord, SlotBundle};
use crate::error::{Error, Result};
use crate::hierarchy::{LevelPair, PAPER_LEVELS};
use crate::numerics;

/// Smallest patch run a finest-level slot may own.
pub const MIN_REGION_PATCHES: usize = 2;

const STREAM_SLOT: u64 = 0;
const STREAM_NORM: u64 = 1;
const STREAM_MASK: u64 = 2;
const STREAM_PERM: u64 = 3;
const STREAM_SHARED: u64 = 4;

/// How slot vectors are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SlotMode {
    /// Children are noisy copies of their planted parents.
    #[default]
    Planted,
    /// Slots are i.i.d. standard normal, unrelated to the mask hierarchy.
    Gaussian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_scenes: usize,
    /// Slot dimension `d_s`.
    pub dim: usize,
    /// Patch count `L`.
    pub patches: usize,
    /// Strictly ascending slot counts; the first is the root level.
    pub levels: Vec<usize>,
    /// Distance between root cluster centers before norm rescaling.
    pub parent_separation: f64,
    /// Per-component std of child offsets, as a fraction of `parent_separation`.
    pub child_noise: f64,
    /// Target slot norm per level; levels not listed default to 1.
    pub norm_profile: BTreeMap<usize, f64>,
    /// Relative std of per-slot norms around the profile.
    pub norm_jitter: f64,
    /// Length of a scene-wide component shared by all roots, in units of
    /// `parent_separation`.
    pub scene_bias: f64,
    /// Fraction of each child's patch run given to a slot under another parent.
    pub mask_bleed: f64,
    pub mode: SlotMode,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_scenes: 100,
            dim: 64,
            patches: 576,
            levels: PAPER_LEVELS.to_vec(),
            parent_separation: 1.0,
            child_noise: 0.05,
            norm_profile: BTreeMap::new(),
            norm_jitter: 0.0,
            scene_bias: 1.5,
            mask_bleed: 0.1,
            mode: SlotMode::Planted,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn target_norm(&self, level: usize) -> f64 {
        self.norm_profile.get(&level).copied().unwrap_or(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.dim == 0 {
            return bad("slot dimension must be positive".into());
        }
        if self.levels.is_empty() || self.levels[0] == 0 || self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("levels {:?} must be positive and strictly increasing", self.levels));
        }
        if !(self.parent_separation.is_finite() && self.parent_separation > 0.0) {
            return bad(format!("parent_separation {} must be > 0", self.parent_separation));
        }
        if !(self.child_noise.is_finite() && self.child_noise > 0.0) {
            return bad(format!("child_noise {} must be > 0", self.child_noise));
        }
        if !(self.norm_jitter.is_finite() && self.norm_jitter >= 0.0) {
            return bad(format!("norm_jitter {} must be >= 0", self.norm_jitter));
        }
        if !(self.scene_bias.is_finite() && self.scene_bias >= 0.0) {
            return bad(format!("scene_bias {} must be >= 0", self.scene_bias));
        }
        if !(0.0..0.5).contains(&self.mask_bleed) {
            return bad(format!("mask_bleed {} must lie in [0, 0.5)", self.mask_bleed));
        }
        if let Some((n, v)) = self.norm_profile.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return bad(format!("norm_profile entry for level {n} must be > 0, got {v}"));
        }
        Tree::build(&self.levels, self.patches, self.mask_bleed).map(|_| ())
    }
}

/// Canonical (unshuffled) nested structure shared by every scene.
struct Tree {
    /// Per level, the canonical parent of each canonical slot (empty at the root level).
    parent: Vec<Vec<usize>>,
    /// Per level, the canonical owner of each patch.
    owner: Vec<Vec<usize>>,
}

/// Splits `total` into `parts` near-equal counts, remainder to the lowest indices.
fn balanced(total: usize, parts: usize) -> Vec<usize> {
    (0..parts)
        .map(|i| total / parts + usize::from(i < total % parts))
        .collect()
}

impl Tree {
    /// Each level cuts every parent's region (after that level's bleed) into
    /// contiguous runs in patch order, one per child, then applies its own
    /// bleed. A child keeps more of its run than it can receive, so its
    /// largest overlap is always with its own parent.
    fn build(levels: &[usize], patches: usize, bleed: f64) -> Result<Tree> {
        let too_small = |level: usize, len: usize| {
            Error::InvalidConfig(format!(
                "{patches} patches cannot be split into nested regions of at least \
                 {MIN_REGION_PATCHES} patches per slot for levels {levels:?} \
                 (level {level} gets a region of {len} patches)"
            ))
        };
        let mut parent: Vec<Vec<usize>> = vec![Vec::new()];
        let mut regions: Vec<Vec<usize>> = Vec::new();
        let mut s = 0;
        for len in balanced(patches, levels[0]) {
            regions.push((s..s + len).collect());
            s += len;
        }
        let mut owner = vec![owner_of(&regions, patches)];

        for (k, w) in levels.windows(2).enumerate() {
            let counts = balanced(w[1], w[0]);
            let mut par = Vec::with_capacity(w[1]);
            let mut base: Vec<Vec<usize>> = Vec::with_capacity(w[1]);
            for (p, (region, &n_children)) in regions.iter().zip(&counts).enumerate() {
                let mut at = 0;
                for len in balanced(region.len(), n_children) {
                    par.push(p);
                    base.push(region[at..at + len].to_vec());
                    at += len;
                }
            }
            if let Some(r) = base.iter().find(|r| r.len() < MIN_REGION_PATCHES) {
                return Err(too_small(levels[k + 1], r.len()));
            }
            regions = bleed_regions(&base, &par, bleed);
            owner.push(owner_of(&regions, patches));
            parent.push(par);
        }
        if let Some(r) = regions.iter().find(|r| r.len() < MIN_REGION_PATCHES) {
            return Err(too_small(*levels.last().unwrap(), r.len()));
        }
        Ok(Tree { parent, owner })
    }
}

/// Slot `j` hands the tail of its region to slot `(j + g) mod N`, where `g`
/// is the largest sibling group, unless both share a parent. The amount is
/// capped for donor and receiver alike, so every slot keeps strictly more
/// than it receives.
fn bleed_regions(base: &[Vec<usize>], parents: &[usize], bleed: f64) -> Vec<Vec<usize>> {
    let n = base.len();
    let mut out = base.to_vec();
    if bleed == 0.0 {
        return out;
    }
    let group = (0..n)
        .map(|j| parents.iter().filter(|p| **p == parents[j]).count())
        .max()
        .unwrap_or(1);
    let cap = |j: usize| ((bleed * base[j].len() as f64).round() as usize).min((base[j].len() - 1) / 2);
    let mut received = vec![Vec::new(); n];
    for j in 0..n {
        let r = (j + group) % n;
        if parents[r] == parents[j] {
            continue;
        }
        let give = cap(j).min(cap(r));
        let keep = base[j].len() - give;
        received[r].extend_from_slice(&base[j][keep..]);
        out[j].truncate(keep);
    }
    for (region, extra) in out.iter_mut().zip(received) {
        region.extend(extra);
        region.sort_unstable();
    }
    out
}

fn owner_of(regions: &[Vec<usize>], patches: usize) -> Vec<usize> {
    let mut owner = vec![0; patches];
    for (j, region) in regions.iter().enumerate() {
        for &p in region {
            owner[p] = j;
        }
    }
    owner
}

fn rng_for(seed: u64, scene: u64, level: u64, slot: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&scene.to_le_bytes());
    key[16..24].copy_from_slice(&level.to_le_bytes());
    key[24..].copy_from_slice(&slot.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

fn gaussian_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

fn quantize(v: f64) -> f64 {
    f64::from(v as f32)
}

/// Generates a bundle; a pure function of `config`.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<SlotBundle> {
    config.validate()?;
    let tree = Tree::build(&config.levels, config.patches, config.mask_bleed)?;
    let scenes = (0..config.n_scenes)
        .into_par_iter()
        .map(|s| generate_scene(config, &tree, s as u64))
        .collect();
    Ok(SlotBundle {
        dim: config.dim,
        patches: config.patches,
        levels: config.levels.clone(),
        source: format!(
            "synthetic:{}",
            match config.mode {
                SlotMode::Planted => "planted",
                SlotMode::Gaussian => "gaussian",
            }
        ),
        scenes,
    })
}

fn generate_scene(config: &SyntheticConfig, tree: &Tree, scene: u64) -> SceneRecord {
    let seed = config.seed;
    let dim = config.dim;
    let levels = &config.levels;

    // canonical -> stored slot index, per level
    let perms: Vec<Vec<usize>> = levels
        .iter()
        .map(|&n| {
            let mut rng = rng_for(seed, scene, n as u64, 0, STREAM_PERM);
            let mut p: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                p.swap(i, rng.gen_range(0..=i));
            }
            p
        })
        .collect();

    let raw = match config.mode {
        SlotMode::Planted => planted_vectors(config, tree, scene),
        SlotMode::Gaussian => levels
            .iter()
            .map(|&n| {
                (0..n)
                    .map(|j| gaussian_vec(&mut rng_for(seed, scene, n as u64, j as u64, STREAM_SLOT), dim))
                    .collect()
            })
            .collect(),
    };

    let mut level_data = BTreeMap::new();
    for (k, &n) in levels.iter().enumerate() {
        let mut slots = vec![0.0; n * dim];
        for (j, v) in raw[k].iter().enumerate() {
            let row = &mut slots[perms[k][j] * dim..(perms[k][j] + 1) * dim];
            match config.mode {
                SlotMode::Planted => {
                    let mut rng = rng_for(seed, scene, n as u64, j as u64, STREAM_NORM);
                    let z: f64 = StandardNormal.sample(&mut rng);
                    let target = (config.target_norm(n) * (1.0 + config.norm_jitter * z)).max(1e-6);
                    let scale = target / numerics::norm(v);
                    for (dst, src) in row.iter_mut().zip(v) {
                        *dst = quantize(src * scale);
                    }
                }
                SlotMode::Gaussian => {
                    for (dst, src) in row.iter_mut().zip(v) {
                        *dst = quantize(*src);
                    }
                }
            }
        }

        let l = config.patches;
        let mut masks = vec![0.0; n * l];
        let mut rng = rng_for(seed, scene, n as u64, 0, STREAM_MASK);
        let mut rest = vec![0.0; n];
        for (p, &owner) in tree.owner[k].iter().enumerate() {
            let hi: f64 = 0.55 + 0.4 * rng.gen::<f64>();
            for r in rest.iter_mut() {
                *r = rng.gen::<f64>();
            }
            rest[owner] = 0.0;
            let total: f64 = numerics::pairwise_sum(&rest);
            for j in 0..n {
                let w = if j == owner {
                    hi
                } else if total > 0.0 {
                    (1.0 - hi) * rest[j] / total
                } else {
                    0.0
                };
                masks[perms[k][j] * l + p] = quantize(w);
            }
        }
        level_data.insert(n, LevelData { slots, masks });
    }

    let parents = levels
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let mut map = vec![0; w[1]];
            for (j, &p) in tree.parent[k + 1].iter().enumerate() {
                map[perms[k + 1][j]] = perms[k][p];
            }
            (LevelPair { coarse: w[0], fine: w[1] }, map)
        })
        .collect();
    let norm_profile = levels.iter().map(|&n| (n, config.target_norm(n))).collect();

    SceneRecord {
        id: format!("s{scene:05}"),
        dim,
        patches: config.patches,
        levels: level_data,
        planted: Some(PlantedTruth {
            parents,
            norm_profile,
        }),
    }
}

/// Raw (unscaled) slot vectors in canonical order, per level.
fn planted_vectors(config: &SyntheticConfig, tree: &Tree, scene: u64) -> Vec<Vec<Vec<f64>>> {
    let (seed, dim, sep) = (config.seed, config.dim, config.parent_separation);
    let roots = config.levels[0];

    // shared direction first, then one direction per root, orthonormalized
    // when the dimension allows
    let mut basis = vec![gaussian_vec(&mut rng_for(seed, scene, roots as u64, 0, STREAM_SHARED), dim)];
    for i in 0..roots {
        basis.push(gaussian_vec(
            &mut rng_for(seed, scene, roots as u64, i as u64, STREAM_SLOT),
            dim,
        ));
    }
    let orthogonal = dim > roots;
    for i in 0..basis.len() {
        if orthogonal {
            for j in 0..i {
                let proj = numerics::dot(&basis[i], &basis[j]);
                let (head, tail) = basis.split_at_mut(i);
                for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                    *a -= proj * b;
                }
            }
        }
        let norm = numerics::norm(&basis[i]);
        basis[i].iter_mut().for_each(|v| *v /= norm);
    }

    let offset = sep / std::f64::consts::SQRT_2;
    let shared = config.scene_bias * sep;
    let mut out: Vec<Vec<Vec<f64>>> = vec![(0..roots)
        .map(|i| {
            (0..dim)
                .map(|k| shared * basis[0][k] + offset * basis[i + 1][k])
                .collect()
        })
        .collect()];

    let std = config.child_noise * sep;
    for (k, &n) in config.levels.iter().enumerate().skip(1) {
        let level: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let parent = &out[k - 1][tree.parent[k][j]];
                let mut rng = rng_for(seed, scene, n as u64, j as u64, STREAM_SLOT);
                parent
                    .iter()
                    .map(|p| p + std * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        out.push(level);
    }
    out
}
