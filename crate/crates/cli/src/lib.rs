//! Command implementations behind the `helixlab` binary.
//!
//! Every command takes a resolved [`Config`] and an output directory and
//! returns structured results; `main` only parses flags, prints and maps
//! errors to exit codes.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use helixlab_core::corpus::{builtin_corpus, check_entry, configured_spec, Check, CorpusEntry, CorpusSource};
use helixlab_core::helix::{AnalysisSeries, SCHEMA_VERSION};
use helixlab_core::synthesis::{negative_family, slant_family, NegativeKind, SlantParams};
use helixlab_core::{
    analyze, analyze_sampled, integrate_frenet, Analysis, Config, CurvatureSpec, CurveSpec, ErrorClass, HelixReport,
    MetricSignature, SampledCurve,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_DRIFT: i32 = 4;

/// JSON schema that every `report.json` validates against.
pub const REPORT_SCHEMA: &str = include_str!("../schemas/helix_report.v1.schema.json");

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] helixlab_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.class() {
                ErrorClass::Input => EXIT_INPUT,
                ErrorClass::Numerical => EXIT_NUMERICAL,
                ErrorClass::Drift => EXIT_DRIFT,
            },
            CliError::Io { .. } => EXIT_INPUT,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.name(),
            CliError::Io { .. } => "IoError",
        }
    }

    /// One-line JSON object for standard error.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.name(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(io_error(path))
}

/// Config sources in increasing precedence: defaults, a JSON file, flags.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub samples: Option<usize>,
    pub jet_order: Option<usize>,
    /// `KEY=VAL` assignments.
    pub tolerances: Vec<String>,
    pub step: Option<f64>,
    pub seed: Option<u64>,
}

pub fn build_config(o: &Overrides) -> CliResult<Config> {
    let mut cfg = match &o.config {
        Some(path) => Config::from_json(&read(path)?)?,
        None => Config::default(),
    };
    for t in &o.tolerances {
        cfg.set_tolerance(t)?;
    }
    cfg.samples = o.samples.or(cfg.samples);
    cfg.jet_order = o.jet_order.or(cfg.jet_order);
    cfg.step = o.step.or(cfg.step);
    cfg.seed = o.seed.or(cfg.seed);
    cfg.validate()?;
    Ok(cfg)
}

/// Writes `contents` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_error(dir))?;
    tmp.write_all(contents).map_err(io_error(&path))?;
    tmp.persist(&path).map_err(|e| CliError::Io {
        path: path.clone(),
        source: e.error,
    })?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

/// 17 significant digits, enough to round-trip any double.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_row(out: &mut String, values: impl IntoIterator<Item = f64>) {
    let row: Vec<String> = values.into_iter().map(num).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

fn to_json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value).map_err(helixlab_core::Error::from)?;
    text.push('\n');
    Ok(text.into_bytes())
}

/// `s, k_1..k_{n-1}, H*_1..H*_{n-2}, lemma_sum, relation_residual`.
pub fn profile_csv(series: &AnalysisSeries) -> String {
    let n = series.dim();
    let mut header = vec!["s".to_string()];
    header.extend((1..n).map(|i| format!("k_{i}")));
    header.extend((1..=n - 2).map(|i| format!("H*_{i}")));
    header.extend(["lemma_sum".to_string(), "relation_residual".to_string()]);
    let mut out = header.join(",") + "\n";
    for (s, p) in series.grid.iter().zip(&series.profiles) {
        let row = std::iter::once(*s)
            .chain(p.curvatures.iter().map(|k| k.value()))
            .chain(p.values())
            .chain([p.lemma_sum(), p.relation_residual()]);
        csv_row(&mut out, row);
    }
    out
}

/// `s, X_1..X_n`.
pub fn axis_csv(report: &HelixReport, series: &AnalysisSeries) -> String {
    let mut header = vec!["s".to_string()];
    header.extend((1..=report.dimension).map(|i| format!("X_{i}")));
    let mut out = header.join(",") + "\n";
    for (s, x) in series.grid.iter().zip(&report.axis) {
        csv_row(&mut out, std::iter::once(*s).chain(x.iter().copied()));
    }
    out
}

/// `s, alpha_1..alpha_n, V1_1..V1_n, .., Vn_1..Vn_n` at every integration step.
pub fn curve_csv(curve: &SampledCurve) -> String {
    let n = curve.dim();
    let mut header = vec!["s".to_string()];
    header.extend((1..=n).map(|c| format!("alpha_{c}")));
    for v in 1..=n {
        header.extend((1..=n).map(|c| format!("V{v}_{c}")));
    }
    let mut out = header.join(",") + "\n";
    for j in 0..curve.len() {
        let row = std::iter::once(curve.s[j])
            .chain(curve.points[j].iter().copied())
            .chain(curve.frames[j].iter().flat_map(|v| v.iter().copied()));
        csv_row(&mut out, row);
    }
    out
}

fn write_analysis(out_dir: &Path, analysis: &Analysis) -> CliResult<()> {
    write_atomic(out_dir, "report.json", &to_json(&analysis.report)?)?;
    write_atomic(out_dir, "profile.csv", profile_csv(&analysis.series).as_bytes())?;
    write_atomic(
        out_dir,
        "axis.csv",
        axis_csv(&analysis.report, &analysis.series).as_bytes(),
    )?;
    Ok(())
}

/// Analyzes a closed-form curve file; writes `report.json`, `profile.csv`
/// and `axis.csv` into `out_dir`.
pub fn cmd_analyze(curve_file: &Path, cfg: &Config, out_dir: &Path) -> CliResult<HelixReport> {
    let spec = CurveSpec::from_json(&read(curve_file)?)?;
    let analysis = analyze(&spec, cfg)?;
    write_analysis(out_dir, &analysis)?;
    Ok(analysis.report)
}

/// Built-in curvature families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Slant helices by construction: n = 3 or 4.
    Slant,
    /// n = 3 with a linear curvature ratio.
    RatioLinear,
    /// n = 4 with constant curvatures.
    WCurve,
}

impl Family {
    pub fn default_dimension(self) -> usize {
        match self {
            Family::Slant => 4,
            Family::RatioLinear => 3,
            Family::WCurve => 4,
        }
    }

    pub fn spec(self, n: usize) -> helixlab_core::Result<CurvatureSpec> {
        match self {
            Family::Slant => slant_family(n, &SlantParams::default()),
            Family::RatioLinear => negative_family(n, NegativeKind::RatioLinear),
            Family::WCurve => negative_family(n, NegativeKind::WCurve),
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "slant" => Ok(Family::Slant),
            "ratio_linear" => Ok(Family::RatioLinear),
            "w_curve" => Ok(Family::WCurve),
            other => Err(format!(
                "unknown family {other:?}; expected slant, ratio_linear or w_curve"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub enum SynthesisSource {
    File(PathBuf),
    Family { family: Family, dimension: Option<usize> },
}

/// Integrates a curvature spec and analyzes the result; writes `curve.csv`
/// next to the analysis outputs.
pub fn cmd_synthesize(source: &SynthesisSource, cfg: &Config, out_dir: &Path) -> CliResult<HelixReport> {
    cfg.validate()?;
    let spec = match source {
        SynthesisSource::File(path) => CurvatureSpec::from_json(&read(path)?)?,
        SynthesisSource::Family { family, dimension } => {
            family.spec(dimension.unwrap_or_else(|| family.default_dimension()))?
        }
    };
    let spec = configured_spec(&spec, cfg)?;
    let curve = integrate_frenet(&spec, &spec.initial_frame()?, cfg)?;
    let analysis = analyze_sampled(&curve, cfg)?;
    write_atomic(out_dir, "curve.csv", curve_csv(&curve).as_bytes())?;
    write_analysis(out_dir, &analysis)?;
    Ok(analysis.report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryError {
    pub error: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryResult {
    pub name: String,
    pub description: String,
    pub dimension: usize,
    pub metric: MetricSignature,
    pub expect_helix: bool,
    pub verdict_theorem: Option<bool>,
    pub verdict_corollary: Option<bool>,
    pub checks: Vec<Check>,
    pub error: Option<EntryError>,
    pub passed: bool,
}

/// Result of a corpus verification; contains no timings so repeated runs
/// serialize identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub config: Config,
    pub entries: Vec<EntryResult>,
    pub passed: bool,
}

fn verify_entry(entry: &CorpusEntry, cfg: &Config) -> EntryResult {
    let mut result = EntryResult {
        name: entry.name.to_string(),
        description: entry.description.to_string(),
        dimension: entry.dimension(),
        metric: entry.metric().clone(),
        expect_helix: entry.expect_helix,
        verdict_theorem: None,
        verdict_corollary: None,
        checks: Vec::new(),
        error: None,
        passed: false,
    };
    match entry.run(cfg) {
        Ok(run) => {
            result.verdict_theorem = Some(run.analysis.report.verdict_theorem);
            result.verdict_corollary = Some(run.analysis.report.verdict_corollary);
            result.checks = check_entry(entry, &run, cfg);
            result.passed = result.checks.iter().all(|c| c.passed);
        }
        Err(e) => {
            result.error = Some(EntryError {
                error: e.name().to_string(),
                message: e.to_string(),
            })
        }
    }
    log::info!("{}: {}", entry.name, if result.passed { "pass" } else { "fail" });
    result
}

/// Runs the built-in corpus through every invariant. Writes `verify.json`
/// into `out_dir` when given.
pub fn cmd_verify(cfg: &Config, out_dir: Option<&Path>) -> CliResult<VerifyReport> {
    cfg.validate()?;
    let entries: Vec<EntryResult> = builtin_corpus().par_iter().map(|e| verify_entry(e, cfg)).collect();
    let report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        passed: entries.iter().all(|e| e.passed),
        entries,
    };
    if let Some(dir) = out_dir {
        write_atomic(dir, "verify.json", &to_json(&report)?)?;
    }
    Ok(report)
}

/// Pass/fail table, one line per check.
pub fn render_table(report: &VerifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<38} {:<24} {:>24} {:>5} {:>12}  result",
        "entry", "check", "value", "", "threshold"
    );
    for e in &report.entries {
        if let Some(err) = &e.error {
            let _ = writeln!(out, "{:<38} {:<24} {}: {}  FAIL", e.name, "run", err.error, err.message);
            continue;
        }
        for c in &e.checks {
            let op = match c.comparison {
                helixlab_core::corpus::Comparison::Below => "<",
                helixlab_core::corpus::Comparison::Above => ">",
                helixlab_core::corpus::Comparison::Equal => "==",
            };
            let _ = writeln!(
                out,
                "{:<38} {:<24} {:>24.16e} {:>5} {:>12.3e}  {}",
                e.name,
                c.name,
                c.value,
                op,
                c.threshold,
                if c.passed { "PASS" } else { "FAIL" }
            );
        }
    }
    let failed = report.entries.iter().filter(|e| !e.passed).count();
    let _ = writeln!(
        out,
        "{} of {} entries passed{}",
        report.entries.len() - failed,
        report.entries.len(),
        if failed == 0 { "" } else { "; verification FAILED" }
    );
    out
}

/// Corpus listing without running anything.
pub fn list_corpus() -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<38} {:>2} {:<10} {:<11} {:<5}  description",
        "entry", "n", "metric", "source", "helix"
    );
    for e in builtin_corpus() {
        let metric: String = e
            .metric()
            .eta()
            .iter()
            .map(|s| if s.value() > 0.0 { '+' } else { '-' })
            .collect();
        let source = match e.source {
            CorpusSource::Curve(_) => "closed-form",
            CorpusSource::Synthesized(_) => "synthesized",
        };
        let _ = writeln!(
            out,
            "{:<38} {:>2} {:<10} {:<11} {:<5}  {}",
            e.name,
            e.dimension(),
            metric,
            source,
            e.expect_helix,
            e.description
        );
    }
    out
}
