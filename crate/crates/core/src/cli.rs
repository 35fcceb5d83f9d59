//! Command-line front end. Every subcommand writes one JSON report.
//!
//! Exit codes: `0` analysis completed (whatever the verdict), `2` invalid or
//! unsupported input, `1` internal error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::algebra::{GroupAlgebra, MatrixOverGroupAlgebra};
use crate::embedding::{verify_homomorphism, verify_trace_identity, EmbeddingError, LiftTable};
use crate::engine::{
    derive_tags, lambda_max_locally_finite, rr0_obstruction_analyze, strongly_not_fs_derive, AnalysisConfig,
    EngineError, MaxLocallyFiniteNormal, ObstructionCertificate, PropertyTagSet,
};
use crate::group::{
    normalize_normal_series, AbelianElement, GroupError, GroupNode, HirschLength, NormalSeries, SeriesLabel,
};
use crate::io::{parse_description, DescriptionFile, InputError, ParsedDescription};
use crate::oscillation::{
    finite_spectrum_distance_bracket, oscillation_exact, oscillation_sampled_with_surface, write_surface_csv,
    DistanceBracket, DualDescription, NormMode, OscillationError, OscillationEstimate, SamplingConfig,
    DEFAULT_COMPONENTS_CAP,
};
use crate::DEFAULT_SEED;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;

const DEFAULT_TOL: f64 = 1e-3;
const DEFAULT_TRIALS: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "rr0cert", version, about = "Real-rank-zero obstruction certificates for group C*-algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive property tags and an obstruction verdict.
    Analyze(FileArgs),
    /// Hirsch length, plus the largest locally finite normal subgroup for abelian groups.
    Hirsch(FileArgs),
    /// Oscillation of the element in the file's analysis section.
    Oscillation {
        #[command(flatten)]
        args: FileArgs,
        /// Write the sampled norm surface as CSV.
        #[arg(long, value_name = "PATH", env = "RR0CERT_DUMP_SURFACE")]
        dump_surface: Option<PathBuf>,
    },
    /// Exact homomorphism and trace audits of the matrix embedding.
    EmbedAudit(FileArgs),
    /// Merge adjacent locally finite factors of a normal series.
    SeriesNormalize {
        /// Description file whose analysis section lists the series.
        file: Option<PathBuf>,
        /// Comma-separated labels `LF` / `Ab`, bottom first.
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<String>>,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Debug, Args)]
pub struct FileArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Points per torus axis.
    #[arg(long, env = "RR0CERT_GRID")]
    pub grid: Option<usize>,
    /// Refinement levels around sampled extrema.
    #[arg(long, env = "RR0CERT_REFINE")]
    pub refine: Option<usize>,
    /// Dual components enumerated before switching to sampling.
    #[arg(long, env = "RR0CERT_COMPONENTS_CAP")]
    pub components_cap: Option<usize>,
    /// Agreement tolerance between exact and sampled oscillation.
    #[arg(long, env = "RR0CERT_TOL")]
    pub tol: Option<f64>,
    /// Seed for every randomized step.
    #[arg(long, env = "RR0CERT_SEED")]
    pub seed: Option<u64>,
    /// Random trials per audit.
    #[arg(long, env = "RR0CERT_TRIALS")]
    pub trials: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, env = "RR0CERT_OUT")]
    pub out: Option<PathBuf>,
    /// Record wall-clock time (makes reports run-dependent).
    #[arg(long)]
    pub timings: bool,
}

/// Configuration actually used, echoed into every report. Flags and
/// environment override the file's analysis section, which overrides defaults.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectiveConfig {
    pub grid: usize,
    pub refine: usize,
    pub zoom: usize,
    pub max_points: usize,
    pub components_cap: usize,
    pub tol: f64,
    pub seed: u64,
    pub trials: usize,
}

impl EffectiveConfig {
    pub fn resolve(flags: &Flags, file: Option<&DescriptionFile>) -> Self {
        let a = file.map(|f| f.analysis.clone()).unwrap_or_default();
        let base = SamplingConfig::default();
        EffectiveConfig {
            grid: flags.grid.or(a.grid).unwrap_or(base.grid),
            refine: flags.refine.or(a.refine).unwrap_or(base.refine),
            zoom: base.zoom,
            max_points: base.max_points,
            components_cap: flags.components_cap.or(a.components_cap).unwrap_or(DEFAULT_COMPONENTS_CAP),
            tol: flags.tol.or(a.tol).unwrap_or(DEFAULT_TOL),
            seed: flags.seed.or(a.seed).unwrap_or(DEFAULT_SEED),
            trials: flags.trials.or(a.trials).unwrap_or(DEFAULT_TRIALS),
        }
    }

    pub fn sampling(&self) -> SamplingConfig {
        SamplingConfig {
            grid: self.grid,
            refine: self.refine,
            zoom: self.zoom,
            seed: self.seed,
            max_points: self.max_points,
            ..SamplingConfig::default()
        }
    }

    pub fn analysis(&self, wall_clock: bool) -> AnalysisConfig {
        AnalysisConfig { sampling: self.sampling(), components_cap: self.components_cap, tol: self.tol, wall_clock }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<DescriptionFile>,
    pub config: EffectiveConfig,
    pub result: T,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeResult {
    pub certificate: ObstructionCertificate,
    pub properties: PropertyTagSet,
}

#[derive(Debug, Serialize)]
pub struct HirschResult {
    pub hirsch_length: HirschLength,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_locally_finite_normal: Option<MaxLocallyFiniteNormal>,
}

#[derive(Debug, Serialize)]
pub struct SurfaceDump {
    pub path: String,
    pub points: usize,
}

#[derive(Debug, Serialize)]
pub struct OscillationResult {
    pub element: MatrixOverGroupAlgebra<AbelianElement>,
    pub self_adjoint: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<OscillationEstimate>,
    pub sampled: OscillationEstimate,
    /// `|exact − sampled| ≤ tol`, when a closed form exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_bracket: Option<DistanceBracket>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceDump>,
}

#[derive(Debug, Serialize)]
pub struct EmbedAuditResult {
    pub index: usize,
    pub homomorphism: crate::embedding::AuditReport,
    pub trace_identity: crate::embedding::AuditReport,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct SeriesResult {
    pub series: NormalSeries,
    pub normalized: NormalSeries,
    pub changed: bool,
}

/// Failure classified by exit code.
#[derive(Debug)]
pub enum CliError {
    Unsupported(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Unsupported(_) => EXIT_UNSUPPORTED,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Unsupported(m) => write!(f, "unsupported input: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Unsupported(e.to_string())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::Overflow(_) => CliError::Internal(e.to_string()),
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<OscillationError> for CliError {
    fn from(e: OscillationError) -> Self {
        match e {
            OscillationError::NonFinite => CliError::Internal(e.to_string()),
            OscillationError::Shape(g) => g.into(),
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<EmbeddingError> for CliError {
    fn from(e: EmbeddingError) -> Self {
        CliError::Unsupported(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::NoFixedPoint(_) | EngineError::Internal(_) => CliError::Internal(e.to_string()),
            EngineError::Group(g) => g.into(),
            EngineError::Oscillation(o) => o.into(),
            EngineError::Embedding(x) => x.into(),
            EngineError::InconsistentTags { .. } | EngineError::Unsupported(_) => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

fn report<T: Serialize>(
    command: &'static str,
    parsed: Option<&ParsedDescription>,
    config: EffectiveConfig,
    result: T,
) -> Report<T> {
    Report { tool: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), command, input: parsed.map(|p| p.file.clone()), config, result }
}

fn emit<T: Serialize>(report: &Report<T>, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn analyze(args: &FileArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let parsed = parse_description(&args.file)?;
    let config = EffectiveConfig::resolve(&args.flags, Some(&parsed.file));
    let d = &parsed.description;
    let certificate = rr0_obstruction_analyze(d, &config.analysis(args.flags.timings))?;
    let properties = strongly_not_fs_derive(d, &derive_tags(d)?)?.tags;
    let rep = report("analyze", Some(&parsed), config, AnalyzeResult { certificate, properties });
    emit(&rep, args.flags.out.as_deref(), stdout)
}

fn hirsch(args: &FileArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let parsed = parse_description(&args.file)?;
    let config = EffectiveConfig::resolve(&args.flags, Some(&parsed.file));
    let d = &parsed.description;
    let hirsch_length = d.hirsch_length()?;
    let lambda = match d.node {
        GroupNode::Abelian(_) => Some(lambda_max_locally_finite(d)?),
        _ => None,
    };
    let rep = report("hirsch", Some(&parsed), config, HirschResult { hirsch_length, max_locally_finite_normal: lambda });
    emit(&rep, args.flags.out.as_deref(), stdout)
}

fn oscillation(args: &FileArgs, dump_surface: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let parsed = parse_description(&args.file)?;
    let config = EffectiveConfig::resolve(&args.flags, Some(&parsed.file));
    let GroupNode::Abelian(group) = &parsed.description.node else {
        return Err(CliError::Unsupported("oscillation needs an abelian group description".into()));
    };
    let spec = parsed
        .file
        .analysis
        .element
        .as_ref()
        .ok_or_else(|| CliError::Unsupported("analysis.element is required for oscillation".into()))?;
    let m = spec.to_matrix(group)?;
    let dual = DualDescription::new(group.clone()).with_cap(config.components_cap);
    let sampling = config.sampling();
    let self_adjoint = GroupAlgebra::new(group.clone()).matrix_is_self_adjoint(&m);
    let mode = if self_adjoint { NormMode::Hermitian } else { NormMode::SingularValues };
    let (sampled, surface) = oscillation_sampled_with_surface(&m, &dual, &sampling, mode, dump_surface.is_some())?;
    let exact = match oscillation_exact(&m, &dual) {
        Ok(e) => Some(e),
        Err(OscillationError::NotBetaDiagonal) => None,
        Err(e) => return Err(e.into()),
    };
    let agreement = exact.as_ref().map(|e| (e.omega_lower - sampled.omega_lower).abs() <= config.tol);
    let distance_bracket =
        if self_adjoint { Some(finite_spectrum_distance_bracket(&m, &dual, &sampling)?) } else { None };
    let surface = match dump_surface {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_surface_csv(&mut w, dual.dimension(), &surface)?;
            w.flush()?;
            Some(SurfaceDump { path: path.display().to_string(), points: surface.len() })
        }
        None => None,
    };
    let result = OscillationResult { element: m, self_adjoint, exact, sampled, agreement, distance_bracket, surface };
    emit(&report("oscillation", Some(&parsed), config, result), args.flags.out.as_deref(), stdout)
}

fn embed_audit(args: &FileArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let parsed = parse_description(&args.file)?;
    let config = EffectiveConfig::resolve(&args.flags, Some(&parsed.file));
    let lt = LiftTable::from_description(&parsed.description)?;
    let homomorphism = verify_homomorphism(&lt, config.trials, config.seed);
    let trace_identity = verify_trace_identity(&lt, config.trials, config.seed);
    let passed = homomorphism.passed() && trace_identity.passed();
    let result = EmbedAuditResult { index: lt.index(), homomorphism, trace_identity, passed };
    emit(&report("embed-audit", Some(&parsed), config, result), args.flags.out.as_deref(), stdout)
}

fn parse_label(s: &str) -> Result<SeriesLabel, CliError> {
    match s.trim() {
        "LF" => Ok(SeriesLabel::LocallyFinite),
        "Ab" => Ok(SeriesLabel::Abelian),
        other => Err(CliError::Unsupported(format!("unknown series label `{other}`, expected LF or Ab"))),
    }
}

fn series_normalize(
    file: Option<&Path>,
    labels: Option<&[String]>,
    flags: &Flags,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let parsed = file.map(parse_description).transpose()?;
    let config = EffectiveConfig::resolve(flags, parsed.as_ref().map(|p| &p.file));
    let series = match (labels, parsed.as_ref().and_then(|p| p.file.analysis.series.clone())) {
        (Some(ls), _) => ls.iter().map(|s| parse_label(s)).collect::<Result<Vec<_>, _>>()?,
        (None, Some(s)) => s,
        (None, None) => return Err(CliError::Unsupported("no series given: use --labels or analysis.series".into())),
    };
    let series = NormalSeries(series);
    let normalized = normalize_normal_series(&series);
    let changed = normalized != series;
    let rep = report("series-normalize", parsed.as_ref(), config, SeriesResult { series, normalized, changed });
    emit(&rep, flags.out.as_deref(), stdout)
}

/// Parses `args`, runs the command, and returns the exit code. Clap usage
/// errors exit with `2`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_UNSUPPORTED } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a, stdout),
        Command::Hirsch(a) => hirsch(a, stdout),
        Command::Oscillation { args, dump_surface } => oscillation(args, dump_surface.as_deref(), stdout),
        Command::EmbedAudit(a) => embed_audit(a, stdout),
        Command::SeriesNormalize { file, labels, flags } => {
            series_normalize(file.as_deref(), labels.as_deref(), flags, stdout)
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "rr0cert: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file: DescriptionFile = serde_json::from_str(
            r#"{"version": 1, "group": {"kind": "abelian"}, "analysis": {"grid": 32, "seed": 9}}"#,
        )
        .unwrap();
        let flags = Flags { grid: Some(128), ..Flags::default() };
        let c = EffectiveConfig::resolve(&flags, Some(&file));
        assert_eq!((c.grid, c.seed, c.refine), (128, 9, 2));
        assert_eq!(EffectiveConfig::resolve(&Flags::default(), None).seed, DEFAULT_SEED);
    }

    #[test]
    fn series_from_flag() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(["rr0cert", "series-normalize", "--labels", "LF,LF,Ab"], &mut out, &mut err);
        assert_eq!(code, EXIT_OK, "{}", String::from_utf8_lossy(&err));
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["result"]["normalized"], serde_json::json!(["LF", "Ab"]));
        assert_eq!(run(["rr0cert", "series-normalize", "--labels", "XX"], &mut out, &mut err), EXIT_UNSUPPORTED);
        assert_eq!(run(["rr0cert", "bogus"], &mut out, &mut err), EXIT_UNSUPPORTED);
    }
}
