//! The `hyperlens` command line: `gen`, `analyze` and `validate`.
//!
//! Exit codes: 0 success, 1 I/O or unreadable input, 2 usage or config,
//! 3 validation failure.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{run_analyses, Analysis, AnalysisConfig};
use crate::data::{
    export_report, generate_synthetic, load_bundle, report_json, save_bundle, validate_bundle, write_tables,
    AnalysisReport, ReportFormat, SlotMode, SyntheticConfig,
};
use crate::error::Error;
use crate::hierarchy::{BinarizationPolicy, LevelPair, DEFAULT_TAU_EXCL, PAPER_LEVELS};
use crate::manifold::ManifoldSpec;
use crate::metrics::HyperbolicityScope;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "hyperlens", version, about = "Hierarchy probes for slot embeddings in Euclidean and Lorentz space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic slot bundle with a planted hierarchy.
    Gen(GenArgs),
    /// Run analyses on a bundle and write a report.
    Analyze(AnalyzeArgs),
    /// Check a bundle directory for integrity problems.
    Validate(ValidateArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Planted,
    Gaussian,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ScopeArg {
    Union,
    PerLevel,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Output directory.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    scenes: usize,
    /// Slot dimension.
    #[arg(long, default_value_t = 64)]
    dim: usize,
    /// Patches per mask.
    #[arg(long, default_value_t = 576)]
    patches: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Slot counts, ascending.
    #[arg(long, value_delimiter = ',', default_values_t = PAPER_LEVELS.to_vec())]
    levels: Vec<usize>,
    #[arg(long, value_enum, default_value = "planted")]
    mode: ModeArg,
    /// Child offset std as a fraction of the root separation.
    #[arg(long, default_value_t = 0.05)]
    child_noise: f64,
    /// Distance between root cluster centers.
    #[arg(long, default_value_t = 1.0)]
    separation: f64,
    /// Target slot norm per level, e.g. `3=1.446,13=1.137`.
    #[arg(long, value_parser = parse_profile)]
    norm_profile: Option<BTreeMap<usize, f64>>,
    /// Relative std of slot norms around the profile.
    #[arg(long, default_value_t = 0.0)]
    norm_jitter: f64,
    /// Shared scene component, in units of the root separation.
    #[arg(long, default_value_t = 1.5)]
    scene_bias: f64,
    /// Fraction of each child's patches handed to a slot under another parent.
    #[arg(long, default_value_t = 0.1)]
    bleed: f64,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    bundle: PathBuf,
    /// Comma-separated list of `euclidean` and `lorentz:<c>`.
    #[arg(long, value_delimiter = ',', default_values_t = ManifoldSpec::default_grid().to_vec())]
    manifolds: Vec<ManifoldSpec>,
    /// Run every analysis (the default).
    #[arg(long, conflicts_with = "only")]
    all: bool,
    /// Comma-separated subset of retrieve, separate, norms, hyperbolicity, agreement.
    #[arg(long, value_delimiter = ',')]
    only: Vec<Analysis>,
    /// Level pairs such as `3->5,5->7`; defaults to all consecutive pairs.
    #[arg(long, value_delimiter = ',')]
    pairs: Vec<LevelPair>,
    /// `argmax` or `threshold:<t>`.
    #[arg(long, default_value = "argmax")]
    binarize: BinarizationPolicy,
    #[arg(long, default_value_t = DEFAULT_TAU_EXCL)]
    tau_excl: f64,
    #[arg(long, value_enum, default_value = "union")]
    scope: ScopeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to one per core.
    #[arg(long, env = "HYPERLENS_WORKERS")]
    workers: Option<usize>,
    /// Report path; the JSON goes to stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also write CSV tables into this directory.
    #[arg(long)]
    tables: Option<PathBuf>,
    /// No progress or summary output.
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    bundle: PathBuf,
}

fn parse_profile(s: &str) -> Result<BTreeMap<usize, f64>, String> {
    s.split(',')
        .map(|item| {
            let (n, v) = item
                .split_once('=')
                .ok_or_else(|| format!("expected `<level>=<norm>`, got {item:?}"))?;
            let n = n.trim().parse::<usize>().map_err(|e| format!("level in {item:?}: {e}"))?;
            let v = v.trim().parse::<f64>().map_err(|e| format!("norm in {item:?}: {e}"))?;
            Ok((n, v))
        })
        .collect()
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) | Error::InvalidParameter(_) | Error::InvalidCurvature(_) => EXIT_USAGE,
        _ => EXIT_IO,
    }
}

fn fail(err: Error) -> i32 {
    eprintln!("error: {err}");
    exit_code(&err)
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn cmd_gen(a: GenArgs) -> i32 {
    let config = SyntheticConfig {
        n_scenes: a.scenes,
        dim: a.dim,
        patches: a.patches,
        levels: a.levels,
        parent_separation: a.separation,
        child_noise: a.child_noise,
        norm_profile: a.norm_profile.unwrap_or_default(),
        norm_jitter: a.norm_jitter,
        scene_bias: a.scene_bias,
        mask_bleed: a.bleed,
        mode: match a.mode {
            ModeArg::Planted => SlotMode::Planted,
            ModeArg::Gaussian => SlotMode::Gaussian,
        },
        seed: a.seed,
    };
    let bundle = match generate_synthetic(&config) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    if let Err(e) = save_bundle(&bundle, &a.out) {
        return fail(e);
    }
    println!(
        "wrote {} scenes (seed {}) to {}",
        bundle.scenes.len(),
        config.seed,
        a.out.display()
    );
    EXIT_OK
}

fn cmd_analyze(a: AnalyzeArgs) -> i32 {
    let quiet = a.quiet;
    let progress = |msg: &str| {
        if !quiet {
            eprintln!("{msg}");
        }
    };
    let analyses: BTreeSet<Analysis> = if a.only.is_empty() {
        Analysis::ALL.into_iter().collect()
    } else {
        a.only.iter().copied().collect()
    };
    let config = AnalysisConfig {
        manifolds: a.manifolds,
        pairs: a.pairs,
        binarization: a.binarize,
        tau_excl: a.tau_excl,
        analyses,
        hyperbolicity_scope: match a.scope {
            ScopeArg::Union => HyperbolicityScope::Union,
            ScopeArg::PerLevel => HyperbolicityScope::PerLevel,
        },
        seed: a.seed,
    };
    if let Err(e) = config.validate() {
        return fail(e);
    }

    progress(&format!("loading {}", a.bundle.display()));
    let bundle = match load_bundle(&a.bundle) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_IO;
        }
    };
    let report = match run_analyses(&bundle, &config, a.workers, &progress) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };

    match &a.out {
        Some(path) => {
            if let Err(e) = export_report(&report, path, ReportFormat::Structured) {
                return fail(e);
            }
            progress(&format!("report written to {}", path.display()));
        }
        None => match report_json(&report) {
            Ok(text) => {
                let mut out = std::io::stdout().lock();
                if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                    return EXIT_IO;
                }
            }
            Err(e) => return fail(e),
        },
    }
    if let Some(dir) = &a.tables {
        match write_tables(&report, dir) {
            Ok(paths) => progress(&format!("{} tables written to {}", paths.len(), dir.display())),
            Err(e) => return fail(e),
        }
    }
    for w in &report.warnings {
        progress(&format!("warning: {w}"));
    }
    if !quiet {
        let table = summary_table(&report);
        if a.out.is_some() {
            print!("{table}");
        } else {
            eprint!("{table}");
        }
    }
    EXIT_OK
}

/// Hit@1 with pairs as columns and manifolds as rows, then OV and mean
/// hyperbolicity per manifold.
pub fn summary_table(report: &AnalysisReport) -> String {
    let mut s = String::new();
    let manifolds = &report.config.manifolds;
    let pairs = &report.config.pairs;
    let fmt_opt = |v: Option<f64>, digits: usize| v.map_or_else(|| "-".to_string(), |x| format!("{x:.digits$}"));

    if let Some(retrieval) = &report.retrieval {
        let _ = write!(s, "{:<16}", "Hit@1 (%)");
        for p in pairs {
            let _ = write!(s, "{:>9}", p.to_string());
        }
        s.push('\n');
        for m in manifolds {
            let _ = write!(s, "{:<16}", m.to_string());
            for p in pairs {
                let v = retrieval
                    .iter()
                    .find(|r| r.manifold == *m && r.level_pair == *p)
                    .and_then(|r| r.hit_at_1);
                let _ = write!(s, "{:>9}", fmt_opt(v, 2));
            }
            s.push('\n');
        }
        let _ = write!(s, "{:<16}", "random");
        for p in pairs {
            let _ = write!(s, "{:>9.2}", 100.0 / p.coarse as f64);
        }
        s.push_str("\n\n");
    }

    if report.separation.is_some() || report.hyperbolicity.is_some() {
        let _ = writeln!(s, "{:<16}{:>9}{:>9}", "manifold", "OV", "delta");
        for m in manifolds {
            let ov = report
                .separation
                .as_ref()
                .and_then(|v| v.iter().find(|r| r.manifold == *m))
                .and_then(|r| r.ov_mean);
            let delta = report
                .hyperbolicity
                .as_ref()
                .and_then(|v| v.iter().find(|r| r.manifold == *m))
                .and_then(|r| r.summary.as_ref().map(|x| x.mean));
            let _ = writeln!(s, "{:<16}{:>9}{:>9}", m.to_string(), fmt_opt(ov, 4), fmt_opt(delta, 4));
        }
    }
    s
}

fn cmd_validate(a: ValidateArgs) -> i32 {
    let report = validate_bundle(&a.bundle);
    if !report.manifest.is_empty() {
        let io_only = report
            .manifest
            .iter()
            .all(|e| matches!(e, Error::Io { .. }));
        for e in &report.manifest {
            println!("manifest: {e}");
        }
        return if io_only { EXIT_IO } else { EXIT_INVALID };
    }
    let mut failed = 0;
    for scene in &report.scenes {
        if scene.violations.is_empty() {
            println!("{:<12} OK", scene.scene);
        } else {
            failed += 1;
            println!("{:<12} FAIL ({} violations)", scene.scene, scene.violations.len());
            for v in &scene.violations {
                println!("  {}: {v}", scene.scene);
            }
        }
    }
    if failed == 0 {
        println!("all scenes OK ({})", report.scenes.len());
        EXIT_OK
    } else {
        println!("{failed} of {} scenes failed", report.scenes.len());
        EXIT_INVALID
    }
}
