//! Runs a chosen set of analyses over a bundle and gathers an
//! [`AnalysisReport`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{AnalysisReport, BundleSummary, SlotBundle};
use crate::error::{Error, Result};
use crate::hierarchy::{build_hierarchies, BinarizationPolicy, LevelPair, DEFAULT_TAU_EXCL};
use crate::manifold::ManifoldSpec;
use crate::metrics::{
    agreement_analysis, hyperbolicity_analysis, norm_stats, retrieval_analysis, separation_analysis,
    HyperbolicityScope,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Retrieve,
    Separate,
    Norms,
    Hyperbolicity,
    Agreement,
}

impl Analysis {
    pub const ALL: [Analysis; 5] = [
        Analysis::Retrieve,
        Analysis::Separate,
        Analysis::Norms,
        Analysis::Hyperbolicity,
        Analysis::Agreement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Retrieve => "retrieve",
            Analysis::Separate => "separate",
            Analysis::Norms => "norms",
            Analysis::Hyperbolicity => "hyperbolicity",
            Analysis::Agreement => "agreement",
        }
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Analysis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Analysis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown analysis {s:?}; expected one of retrieve, separate, norms, hyperbolicity, agreement"
                ))
            })
    }
}

/// Effective settings of an analysis run. Echoed verbatim into the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub manifolds: Vec<ManifoldSpec>,
    /// Empty means every consecutive pair of the bundle's levels.
    pub pairs: Vec<LevelPair>,
    pub binarization: BinarizationPolicy,
    pub tau_excl: f64,
    pub analyses: BTreeSet<Analysis>,
    pub hyperbolicity_scope: HyperbolicityScope,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            manifolds: ManifoldSpec::default_grid().to_vec(),
            pairs: Vec::new(),
            binarization: BinarizationPolicy::Argmax,
            tau_excl: DEFAULT_TAU_EXCL,
            analyses: Analysis::ALL.into_iter().collect(),
            hyperbolicity_scope: HyperbolicityScope::Union,
            seed: 0,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.manifolds.is_empty() {
            return Err(Error::InvalidConfig("at least one manifold is required".into()));
        }
        if !(self.tau_excl > 0.0 && self.tau_excl <= 1.0) {
            return Err(Error::InvalidConfig(format!("tau_excl {} must lie in (0, 1]", self.tau_excl)));
        }
        if self.analyses.is_empty() {
            return Err(Error::InvalidConfig("no analyses selected".into()));
        }
        Ok(())
    }

    /// Copy with `pairs` filled in for `bundle`, checked against its levels.
    pub fn resolved(&self, bundle: &SlotBundle) -> Result<AnalysisConfig> {
        self.validate()?;
        let mut out = self.clone();
        if out.pairs.is_empty() {
            out.pairs = LevelPair::consecutive(&bundle.levels);
        }
        for p in &out.pairs {
            for level in [p.coarse, p.fine] {
                if !bundle.levels.contains(&level) {
                    return Err(Error::InvalidConfig(format!(
                        "level pair {p} refers to level {level}, which the bundle does not have (levels {:?})",
                        bundle.levels
                    )));
                }
            }
        }
        Ok(out)
    }

    pub fn runs(&self, analysis: Analysis) -> bool {
        self.analyses.contains(&analysis)
    }
}

/// Runs the configured analyses on a pool of `workers` threads (`None` for
/// the rayon default). The report does not depend on the worker count.
///
/// `progress` receives one line per stage.
pub fn run_analyses(
    bundle: &SlotBundle,
    config: &AnalysisConfig,
    workers: Option<usize>,
    progress: &(dyn Fn(&str) + Sync),
) -> Result<AnalysisReport> {
    let config = config.resolved(bundle)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_in_pool(bundle, config, progress))
}

fn run_in_pool(
    bundle: &SlotBundle,
    config: AnalysisConfig,
    progress: &(dyn Fn(&str) + Sync),
) -> Result<AnalysisReport> {
    let mut warnings = Vec::new();
    let manifolds = &config.manifolds;

    let graphs = if config.runs(Analysis::Retrieve) || config.runs(Analysis::Agreement) {
        progress(&format!("building hierarchies for {} scenes", bundle.scenes.len()));
        Some(build_hierarchies(bundle, &config.pairs, config.binarization, config.tau_excl)?)
    } else {
        None
    };

    let retrieval = if config.runs(Analysis::Retrieve) {
        progress("parent retrieval");
        Some(retrieval_analysis(bundle, graphs.as_deref().unwrap(), &config.pairs, manifolds)?)
    } else {
        None
    };

    let separation = if config.runs(Analysis::Separate) {
        progress("level separation");
        match separation_analysis(bundle, manifolds) {
            Ok(r) => {
                warnings.extend(r.iter().flat_map(|s| s.warnings.iter().cloned()));
                Some(r)
            }
            Err(e @ Error::InsufficientData(_)) => {
                warnings.push(format!("separation unavailable: {e}"));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let norms = if config.runs(Analysis::Norms) {
        progress("norm statistics");
        match manifolds.iter().map(|&m| norm_stats(bundle, m)).collect::<Result<Vec<_>>>() {
            Ok(r) => Some(r),
            Err(e @ Error::InsufficientData(_)) => {
                warnings.push(format!("norm statistics unavailable: {e}"));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let hyperbolicity = if config.runs(Analysis::Hyperbolicity) {
        let mut out = Vec::with_capacity(manifolds.len());
        for &m in manifolds {
            progress(&format!("hyperbolicity under {m}"));
            let r = hyperbolicity_analysis(bundle, m, config.hyperbolicity_scope)?;
            warnings.extend(r.warnings.iter().cloned());
            out.push(r);
        }
        Some(out)
    } else {
        None
    };

    let agreement = if config.runs(Analysis::Agreement) {
        progress("cross-manifold agreement");
        Some(agreement_analysis(bundle, graphs.as_deref().unwrap(), &config.pairs, manifolds)?)
    } else {
        None
    };

    Ok(AnalysisReport {
        toolkit: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: config.seed,
        bundle: BundleSummary::of(bundle),
        config,
        retrieval,
        separation,
        norms,
        hyperbolicity,
        agreement,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analysis_names_round_trip() {
        for a in Analysis::ALL {
            assert_eq!(a.name().parse::<Analysis>().unwrap(), a);
        }
        assert!(matches!("retrieval".parse::<Analysis>(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn config_validation() {
        let mut c = AnalysisConfig::default();
        assert!(c.validate().is_ok());
        c.tau_excl = 0.0;
        assert!(c.validate().is_err());
        c.tau_excl = 1.0;
        c.manifolds.clear();
        assert!(c.validate().is_err());
    }
}
