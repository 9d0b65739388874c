use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
#[cfg(test)]
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{AttentionMaskSet, LevelPair};

pub const FORMAT_VERSION: u32 = 1;
const MANIFEST: &str = "manifest.json";
const PRECISION: &str = "f32";
/// Violations reported per blob before the rest are summarized.
const MAX_VIOLATIONS_PER_BLOB: usize = 20;

/// Slots and masks of one scene at one level, widened to `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelData {
    /// `N x d_s`, row-major.
    pub slots: Vec<f64>,
    /// `N x L`, row-major.
    pub masks: Vec<f64>,
}

/// Ground truth recorded by the synthetic generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedTruth {
    /// Coarse parent index of every fine slot, per consecutive level pair.
    pub parents: BTreeMap<LevelPair, Vec<usize>>,
    pub norm_profile: BTreeMap<usize, f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneRecord {
    pub id: String,
    pub dim: usize,
    pub patches: usize,
    pub levels: BTreeMap<usize, LevelData>,
    pub planted: Option<PlantedTruth>,
}

impl SceneRecord {
    pub fn level(&self, level: usize) -> Option<&LevelData> {
        self.levels.get(&level)
    }

    /// Slot `i` of `level`.
    pub fn slot(&self, level: usize, i: usize) -> &[f64] {
        &self.levels[&level].slots[i * self.dim..(i + 1) * self.dim]
    }

    /// All slots of `level` as row slices.
    pub fn slots(&self, level: usize) -> Option<Vec<&[f64]>> {
        self.levels
            .get(&level)
            .map(|d| d.slots.chunks_exact(self.dim).collect())
    }

    pub fn mask_set(&self, level: usize) -> Option<Result<AttentionMaskSet<'_>>> {
        self.levels
            .get(&level)
            .map(|d| AttentionMaskSet::new(level, self.patches, &d.masks))
    }

    fn check(&self, levels: &[usize]) -> Vec<Error> {
        let mut errs = Vec::new();
        if !valid_scene_id(&self.id) {
            errs.push(Error::Format(format!(
                "scene id {:?} must be nonempty and use only [A-Za-z0-9_-]",
                self.id
            )));
        }
        for &n in levels {
            let Some(data) = self.levels.get(&n) else {
                errs.push(Error::IncompleteScene {
                    scene: self.id.clone(),
                    level: n,
                });
                continue;
            };
            if data.slots.len() != n * self.dim {
                errs.push(Error::Format(format!(
                    "scene {} level {n}: {} slot values, expected {n} x {}",
                    self.id,
                    data.slots.len(),
                    self.dim
                )));
            }
            if data.masks.len() != n * self.patches {
                errs.push(Error::Format(format!(
                    "scene {} level {n}: {} mask values, expected {n} x {}",
                    self.id,
                    data.masks.len(),
                    self.patches
                )));
            }
            let ctx = BlobContext {
                scene: &self.id,
                level: n,
                cols: self.dim,
            };
            errs.extend(ctx.check_values(&data.slots, false));
            let ctx = BlobContext {
                cols: self.patches,
                ..ctx
            };
            errs.extend(ctx.check_values(&data.masks, true));
        }
        if let Some(extra) = self.levels.keys().find(|n| !levels.contains(n)) {
            errs.push(Error::Format(format!(
                "scene {} carries undeclared level {extra}",
                self.id
            )));
        }
        errs
    }
}

fn valid_scene_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

/// A dataset of scenes sharing slot dimension, patch count and levels.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotBundle {
    pub dim: usize,
    pub patches: usize,
    /// Ascending slot counts.
    pub levels: Vec<usize>,
    /// Free-form provenance tag.
    pub source: String,
    pub scenes: Vec<SceneRecord>,
}

impl SlotBundle {
    pub fn is_planted(&self) -> bool {
        self.scenes.iter().any(|s| s.planted.is_some())
    }

    /// Checks every bundle invariant.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.patches == 0 {
            return Err(Error::Format("d_s and L must be positive".into()));
        }
        if self.levels.is_empty() || self.levels.windows(2).any(|w| w[0] >= w[1]) || self.levels[0] == 0 {
            return Err(Error::Format(format!(
                "levels {:?} must be nonempty, positive and strictly ascending",
                self.levels
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for scene in &self.scenes {
            if !seen.insert(scene.id.as_str()) {
                return Err(Error::Format(format!("duplicate scene id {}", scene.id)));
            }
            if scene.dim != self.dim || scene.patches != self.patches {
                return Err(Error::Format(format!(
                    "scene {} has shape d_s={} L={}, bundle declares d_s={} L={}",
                    scene.id, scene.dim, scene.patches, self.dim, self.patches
                )));
            }
            if let Some(e) = scene.check(&self.levels).into_iter().next() {
                return Err(e);
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct LevelFiles {
    slots: String,
    masks: String,
}

#[derive(Serialize, Deserialize)]
struct SceneEntry {
    id: String,
    files: BTreeMap<usize, LevelFiles>,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    d_s: usize,
    #[serde(rename = "L")]
    l: usize,
    levels: Vec<usize>,
    precision: String,
    #[serde(default)]
    source: String,
    scenes: Vec<SceneEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    planted: Option<bool>,
}

fn slots_file(scene: &str, level: usize) -> String {
    format!("slots_{scene}_{level}.bin")
}

fn masks_file(scene: &str, level: usize) -> String {
    format!("masks_{scene}_{level}.bin")
}

fn planted_file(scene: &str) -> String {
    format!("planted_{scene}.json")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn encode_f32(values: &[f64]) -> Vec<u8> {
    values
        .iter()
        .flat_map(|v| (*v as f32).to_le_bytes())
        .collect()
}

fn to_json_bytes<T: Serialize>(value: &T, path: &Path) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes `bundle` under directory `dir`, creating it if needed.
///
/// Values are narrowed to `f32`; output bytes depend only on the bundle.
pub fn save_bundle(bundle: &SlotBundle, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    bundle.validate()?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let planted = bundle.is_planted();
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        d_s: bundle.dim,
        l: bundle.patches,
        levels: bundle.levels.clone(),
        precision: PRECISION.into(),
        source: bundle.source.clone(),
        scenes: bundle
            .scenes
            .iter()
            .map(|s| SceneEntry {
                id: s.id.clone(),
                files: bundle
                    .levels
                    .iter()
                    .map(|&n| {
                        (
                            n,
                            LevelFiles {
                                slots: slots_file(&s.id, n),
                                masks: masks_file(&s.id, n),
                            },
                        )
                    })
                    .collect(),
            })
            .collect(),
        planted: planted.then_some(true),
    };

    bundle.scenes.par_iter().try_for_each(|scene| -> Result<()> {
        for (&n, data) in &scene.levels {
            write_file(&dir.join(slots_file(&scene.id, n)), &encode_f32(&data.slots))?;
            write_file(&dir.join(masks_file(&scene.id, n)), &encode_f32(&data.masks))?;
        }
        if let Some(truth) = &scene.planted {
            let path = dir.join(planted_file(&scene.id));
            write_file(&path, &to_json_bytes(truth, &path)?)?;
        }
        Ok(())
    })?;

    let path = dir.join(MANIFEST);
    write_file(&path, &to_json_bytes(&manifest, &path)?)
}

/// Context for messages about one blob.
#[derive(Clone, Copy)]
struct BlobContext<'a> {
    scene: &'a str,
    level: usize,
    cols: usize,
}

impl BlobContext<'_> {
    fn check_values(&self, values: &[f64], is_mask: bool) -> Vec<Error> {
        let mut errs = Vec::new();
        let mut hidden = 0usize;
        let what = if is_mask { "patch" } else { "component" };
        for (idx, v) in values.iter().enumerate() {
            let bad = if !v.is_finite() {
                Some(format!("non-finite value {v}"))
            } else if is_mask && !(0.0..=1.0).contains(v) {
                Some(format!("mask value {v} outside [0, 1]"))
            } else {
                None
            };
            if let Some(msg) = bad {
                if errs.len() < MAX_VIOLATIONS_PER_BLOB {
                    errs.push(Error::DataCorruption(format!(
                        "scene {} level {} slot {} {what} {}: {msg}",
                        self.scene,
                        self.level,
                        idx / self.cols,
                        idx % self.cols
                    )));
                } else {
                    hidden += 1;
                }
            }
        }
        if hidden > 0 {
            errs.push(Error::DataCorruption(format!(
                "scene {} level {}: {hidden} further {} violations not shown",
                self.scene,
                self.level,
                if is_mask { "mask" } else { "slot" }
            )));
        }
        errs
    }
}

fn read_blob(dir: &Path, name: &str, ctx: BlobContext<'_>, is_mask: bool) -> Result<Vec<f64>, Vec<Error>> {
    let path = dir.join(name);
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(vec![Error::MissingFile(path)]),
        Err(e) => return Err(vec![Error::io(path, e)]),
    };
    let expected = ctx.level * ctx.cols * 4;
    if bytes.len() != expected {
        let row_bytes = ctx.cols * 4;
        return Err(vec![Error::Format(format!(
            "scene {} level {}: {name} holds {} bytes ({} rows of {} float32), expected {expected} bytes ({} rows)",
            ctx.scene,
            ctx.level,
            bytes.len(),
            if bytes.len() % row_bytes == 0 {
                (bytes.len() / row_bytes).to_string()
            } else {
                format!("{:.2}", bytes.len() as f64 / row_bytes as f64)
            },
            ctx.cols,
            ctx.level
        ))]);
    }
    let values: Vec<f64> = bytes
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
        .collect();
    let errs = ctx.check_values(&values, is_mask);
    if errs.is_empty() {
        Ok(values)
    } else {
        Err(errs)
    }
}

fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text = match fs::read(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::MissingFile(path)),
        Err(e) => return Err(Error::io(path, e)),
    };
    let manifest: Manifest = serde_json::from_slice(&text).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format_version {} (expected {FORMAT_VERSION})",
            manifest.format_version
        )));
    }
    if manifest.precision != PRECISION {
        return Err(Error::Format(format!(
            "unsupported precision {:?} (expected {PRECISION:?})",
            manifest.precision
        )));
    }
    if manifest.d_s == 0 || manifest.l == 0 {
        return Err(Error::Format("d_s and L must be positive".into()));
    }
    if manifest.levels.is_empty()
        || manifest.levels[0] == 0
        || manifest.levels.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::Format(format!(
            "levels {:?} must be nonempty, positive and strictly ascending",
            manifest.levels
        )));
    }
    Ok(manifest)
}

/// Everything wrong with one scene.
#[derive(Debug)]
pub struct SceneValidation {
    pub scene: String,
    pub violations: Vec<Error>,
}

/// Outcome of [`validate_bundle`].
#[derive(Debug)]
pub struct ValidationReport {
    /// Problems with the manifest itself; when nonempty, no scene was read.
    pub manifest: Vec<Error>,
    pub scenes: Vec<SceneValidation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.manifest.is_empty() && self.scenes.iter().all(|s| s.violations.is_empty())
    }
}

fn read_scene(dir: &Path, manifest: &Manifest, entry: &SceneEntry) -> Result<SceneRecord, Vec<Error>> {
    let mut errs = Vec::new();
    if !valid_scene_id(&entry.id) {
        errs.push(Error::Format(format!(
            "scene id {:?} must be nonempty and use only [A-Za-z0-9_-]",
            entry.id
        )));
        return Err(errs);
    }
    let mut levels = BTreeMap::new();
    for &n in &manifest.levels {
        let Some(files) = entry.files.get(&n) else {
            errs.push(Error::Format(format!(
                "scene {} lists no files for declared level {n}",
                entry.id
            )));
            continue;
        };
        let ctx = BlobContext {
            scene: &entry.id,
            level: n,
            cols: manifest.d_s,
        };
        let slots = read_blob(dir, &files.slots, ctx, false);
        let masks = read_blob(dir, &files.masks, BlobContext { cols: manifest.l, ..ctx }, true);
        match (slots, masks) {
            (Ok(slots), Ok(masks)) => {
                levels.insert(n, LevelData { slots, masks });
            }
            (s, m) => {
                errs.extend(s.err().into_iter().flatten());
                errs.extend(m.err().into_iter().flatten());
            }
        }
    }
    if let Some(extra) = entry.files.keys().find(|n| !manifest.levels.contains(n)) {
        errs.push(Error::Format(format!(
            "scene {} lists files for undeclared level {extra}",
            entry.id
        )));
    }

    let mut planted = None;
    if manifest.planted == Some(true) {
        let path = dir.join(planted_file(&entry.id));
        match fs::read(&path) {
            Ok(bytes) => match serde_json::from_slice::<PlantedTruth>(&bytes) {
                Ok(truth) => planted = Some(truth),
                Err(source) => errs.push(Error::Json { path, source }),
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => errs.push(Error::MissingFile(path)),
            Err(e) => errs.push(Error::io(path, e)),
        }
    }

    if errs.is_empty() {
        Ok(SceneRecord {
            id: entry.id.clone(),
            dim: manifest.d_s,
            patches: manifest.l,
            levels,
            planted,
        })
    } else {
        Err(errs)
    }
}

/// Reads and fully validates a bundle directory.
pub fn load_bundle(dir: impl AsRef<Path>) -> Result<SlotBundle> {
    let dir = dir.as_ref();
    let manifest = read_manifest(dir)?;
    let scenes = manifest
        .scenes
        .par_iter()
        .map(|entry| read_scene(dir, &manifest, entry).map_err(|mut errs| errs.swap_remove(0)))
        .collect::<Result<Vec<_>>>()?;
    let bundle = SlotBundle {
        dim: manifest.d_s,
        patches: manifest.l,
        levels: manifest.levels,
        source: manifest.source,
        scenes,
    };
    bundle.validate()?;
    Ok(bundle)
}

/// Checks a bundle directory and collects every violation instead of
/// stopping at the first.
pub fn validate_bundle(dir: impl AsRef<Path>) -> ValidationReport {
    let dir = dir.as_ref();
    let manifest = match read_manifest(dir) {
        Ok(m) => m,
        Err(e) => {
            return ValidationReport {
                manifest: vec![e],
                scenes: Vec::new(),
            }
        }
    };
    let mut seen = std::collections::BTreeSet::new();
    let scenes = manifest
        .scenes
        .iter()
        .map(|entry| {
            let mut violations = match read_scene(dir, &manifest, entry) {
                Ok(_) => Vec::new(),
                Err(errs) => errs,
            };
            if !seen.insert(entry.id.as_str()) {
                violations.push(Error::Format(format!("duplicate scene id {}", entry.id)));
            }
            SceneValidation {
                scene: entry.id.clone(),
                violations,
            }
        })
        .collect();
    ValidationReport {
        manifest: Vec::new(),
        scenes,
    }
}

#[cfg(test)]
fn blob_path(dir: &Path, kind: &str, scene: &str, level: usize) -> PathBuf {
    dir.join(format!("{kind}_{scene}_{level}.bin"))
}
