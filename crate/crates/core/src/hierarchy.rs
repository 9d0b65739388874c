//! Mask-based parent/child hierarchy across granularity levels.
//!
//! Masks at each level are binarized, every fine slot is scored against every
//! coarse slot by the fraction of its area inside the coarse region, and the
//! best-scoring coarse slot becomes its parent. Fine slots that sit almost
//! entirely inside their parent have not split into anything finer and are
//! excluded from evaluation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::data::{SceneRecord, SlotBundle};
use crate::error::{Error, Result};

/// Slot counts used for the five granularities.
pub const PAPER_LEVELS: [usize; 5] = [3, 5, 7, 11, 13];

/// Inclusion above which a fine slot counts as a duplicate of its parent.
pub const DEFAULT_TAU_EXCL: f64 = 0.95;

/// A (coarse, fine) pair of slot counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelPair {
    pub coarse: usize,
    pub fine: usize,
}

impl LevelPair {
    pub fn new(coarse: usize, fine: usize) -> Result<Self> {
        if coarse == 0 || fine <= coarse {
            return Err(Error::InvalidParameter(format!(
                "level pair ({coarse}, {fine}) must satisfy 0 < coarse < fine"
            )));
        }
        Ok(LevelPair { coarse, fine })
    }

    /// Consecutive pairs of an ascending level list.
    pub fn consecutive(levels: &[usize]) -> Vec<LevelPair> {
        levels
            .windows(2)
            .map(|w| LevelPair {
                coarse: w[0],
                fine: w[1],
            })
            .collect()
    }
}

impl fmt::Display for LevelPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.coarse, self.fine)
    }
}

impl FromStr for LevelPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once("->")
            .or_else(|| s.split_once(':'))
            .ok_or_else(|| Error::InvalidParameter(format!("level pair {s:?} is not `N1->N2`")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad level in pair {s:?}")))
        };
        LevelPair::new(parse(a)?, parse(b)?)
    }
}

impl Serialize for LevelPair {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LevelPair {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How soft attention weights become binary regions.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum BinarizationPolicy {
    /// Each patch goes to the slot with the largest weight (lowest index on ties).
    #[default]
    Argmax,
    /// A patch belongs to every slot whose weight is at least the threshold.
    Threshold(f64),
}

impl fmt::Display for BinarizationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinarizationPolicy::Argmax => f.write_str("argmax"),
            BinarizationPolicy::Threshold(t) => write!(f, "threshold:{t}"),
        }
    }
}

impl FromStr for BinarizationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "argmax" {
            return Ok(BinarizationPolicy::Argmax);
        }
        if let Some(t) = s.strip_prefix("threshold:") {
            let t: f64 = t
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad threshold in {s:?}")))?;
            check_threshold(t)?;
            return Ok(BinarizationPolicy::Threshold(t));
        }
        Err(Error::InvalidParameter(format!(
            "unknown binarization {s:?}; expected `argmax` or `threshold:<t>`"
        )))
    }
}

impl Serialize for BinarizationPolicy {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinarizationPolicy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "binarization threshold {t} must lie in (0, 1)"
        )))
    }
}

/// Soft attention of `level` slots over `patches` patches, row-major.
#[derive(Clone, Copy, Debug)]
pub struct AttentionMaskSet<'a> {
    level: usize,
    patches: usize,
    weights: &'a [f64],
}

impl<'a> AttentionMaskSet<'a> {
    pub fn new(level: usize, patches: usize, weights: &'a [f64]) -> Result<Self> {
        if level == 0 || patches == 0 {
            return Err(Error::InvalidInput("mask set needs at least one slot and one patch".into()));
        }
        if weights.len() != level * patches {
            return Err(Error::InvalidInput(format!(
                "mask set of {level} x {patches} holds {} values",
                weights.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidInput(format!(
                "mask weight {} at slot {} patch {} outside [0, 1]",
                weights[i],
                i / patches,
                i % patches
            )));
        }
        Ok(AttentionMaskSet {
            level,
            patches,
            weights,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn patches(&self) -> usize {
        self.patches
    }

    pub fn weight(&self, slot: usize, patch: usize) -> f64 {
        self.weights[slot * self.patches + patch]
    }
}

/// Binary slot regions at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryMaskSet {
    level: usize,
    patches: usize,
    bits: Vec<bool>,
    policy: BinarizationPolicy,
}

impl BinaryMaskSet {
    /// Builds a mask set from explicit rows.
    pub fn from_rows(rows: &[Vec<bool>], policy: BinarizationPolicy) -> Result<Self> {
        let patches = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || patches == 0 || rows.iter().any(|r| r.len() != patches) {
            return Err(Error::InvalidInput("mask rows must be nonempty and equally long".into()));
        }
        Ok(BinaryMaskSet {
            level: rows.len(),
            patches,
            bits: rows.concat(),
            policy,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn patches(&self) -> usize {
        self.patches
    }

    pub fn policy(&self) -> BinarizationPolicy {
        self.policy
    }

    pub fn row(&self, slot: usize) -> &[bool] {
        &self.bits[slot * self.patches..(slot + 1) * self.patches]
    }

    pub fn area(&self, slot: usize) -> usize {
        self.row(slot).iter().filter(|b| **b).count()
    }
}

/// Turns soft attention into binary regions.
pub fn binarize_masks(masks: &AttentionMaskSet<'_>, policy: BinarizationPolicy) -> Result<BinaryMaskSet> {
    let (n, l) = (masks.level, masks.patches);
    let mut bits = vec![false; n * l];
    match policy {
        BinarizationPolicy::Argmax => {
            for p in 0..l {
                let mut best = 0;
                for i in 1..n {
                    if masks.weight(i, p) > masks.weight(best, p) {
                        best = i;
                    }
                }
                bits[best * l + p] = true;
            }
        }
        BinarizationPolicy::Threshold(t) => {
            check_threshold(t)?;
            for (b, w) in bits.iter_mut().zip(masks.weights) {
                *b = *w >= t;
            }
        }
    }
    Ok(BinaryMaskSet {
        level: n,
        patches: l,
        bits,
        policy,
    })
}

/// Fraction of the child region that lies inside the parent region.
pub fn inclusion_score(child: &[bool], parent: &[bool]) -> Result<f64> {
    if child.len() != parent.len() {
        return Err(Error::InvalidInput(format!(
            "mask length mismatch: {} vs {}",
            child.len(),
            parent.len()
        )));
    }
    let area = child.iter().filter(|b| **b).count();
    if area == 0 {
        return Err(Error::EmptyChild);
    }
    let overlap = child.iter().zip(parent).filter(|(c, p)| **c && **p).count();
    Ok(overlap as f64 / area as f64)
}

/// Why a fine slot is left out of evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    /// Inclusion in its parent exceeds the exclusion threshold.
    NearDuplicate,
    /// Its binary region is empty.
    Empty,
}

/// Parent of every fine slot for one level pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParentAssignment {
    pub level_pair: LevelPair,
    pub parent_of: Vec<usize>,
    pub inclusion: Vec<f64>,
    pub excluded: BTreeMap<usize, ExclusionReason>,
}

impl ParentAssignment {
    pub fn is_excluded(&self, fine: usize) -> bool {
        self.excluded.contains_key(&fine)
    }

    /// Fine slots that take part in evaluation, ascending.
    pub fn evaluable(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.parent_of.len()).filter(|j| !self.is_excluded(*j))
    }
}

/// Assigns each fine slot to the coarse slot that contains most of it.
pub fn assign_parents(
    fine: &BinaryMaskSet,
    coarse: &BinaryMaskSet,
    tau_excl: f64,
) -> Result<ParentAssignment> {
    if fine.patches != coarse.patches {
        return Err(Error::InvalidInput(format!(
            "patch count mismatch: fine {} vs coarse {}",
            fine.patches, coarse.patches
        )));
    }
    let level_pair = LevelPair::new(coarse.level, fine.level)?;
    let mut parent_of = Vec::with_capacity(fine.level);
    let mut inclusion = Vec::with_capacity(fine.level);
    let mut excluded = BTreeMap::new();

    for j in 0..fine.level {
        let child = fine.row(j);
        let mut best = (0, f64::NEG_INFINITY);
        let mut empty = false;
        for i in 0..coarse.level {
            match inclusion_score(child, coarse.row(i)) {
                Ok(score) if score > best.1 => best = (i, score),
                Ok(_) => {}
                Err(Error::EmptyChild) => {
                    empty = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if empty {
            parent_of.push(0);
            inclusion.push(0.0);
            excluded.insert(j, ExclusionReason::Empty);
            continue;
        }
        if best.1 > tau_excl {
            excluded.insert(j, ExclusionReason::NearDuplicate);
        }
        parent_of.push(best.0);
        inclusion.push(best.1);
    }

    Ok(ParentAssignment {
        level_pair,
        parent_of,
        inclusion,
        excluded,
    })
}

/// Parent assignments of one scene across level pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyGraph {
    pub scene_id: String,
    pub assignments: Vec<ParentAssignment>,
}

impl HierarchyGraph {
    pub fn assignment(&self, pair: LevelPair) -> Option<&ParentAssignment> {
        self.assignments.iter().find(|a| a.level_pair == pair)
    }
}

/// Builds the hierarchy of one scene for the given level pairs.
pub fn build_hierarchy(
    scene: &SceneRecord,
    pairs: &[LevelPair],
    policy: BinarizationPolicy,
    tau_excl: f64,
) -> Result<HierarchyGraph> {
    let mut cache: BTreeMap<usize, BinaryMaskSet> = BTreeMap::new();
    let mut binarized = |level: usize| -> Result<BinaryMaskSet> {
        if let Some(b) = cache.get(&level) {
            return Ok(b.clone());
        }
        let masks = scene.mask_set(level).ok_or_else(|| Error::IncompleteScene {
            scene: scene.id.clone(),
            level,
        })??;
        let b = binarize_masks(&masks, policy)?;
        cache.insert(level, b.clone());
        Ok(b)
    };

    let mut assignments = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let coarse = binarized(pair.coarse)?;
        let fine = binarized(pair.fine)?;
        assignments.push(assign_parents(&fine, &coarse, tau_excl)?);
    }
    Ok(HierarchyGraph {
        scene_id: scene.id.clone(),
        assignments,
    })
}

/// Hierarchies of every scene in `bundle`, in scene order.
pub fn build_hierarchies(
    bundle: &SlotBundle,
    pairs: &[LevelPair],
    policy: BinarizationPolicy,
    tau_excl: f64,
) -> Result<Vec<HierarchyGraph>> {
    bundle
        .scenes
        .par_iter()
        .map(|scene| build_hierarchy(scene, pairs, policy, tau_excl))
        .collect()
}
