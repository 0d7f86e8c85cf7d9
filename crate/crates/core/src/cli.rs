//! Batch commands behind the `chen-bounds` binary: `gen`, `check`, `sweep`,
//! `oracle` and `report`.
//!
//! Exit codes: 0 success, 2 validation failure, 3 exact-mode inequality
//! violation, 4 I/O failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ambient::FCoefficients;
use crate::error::Error;
use crate::forge::{forge_instance, oracle_invariants_seeded, Family, FrameKind, FSource, GeneratorSpec, Mode, OracleRecord};
use crate::inequalities::{
    detect_equality_form_basic, detect_equality_form_delta, CheckMode, EqualityFormReport, InequalityContext,
    InequalityReport, Tolerances,
};
use crate::invariants::{enumerate_tuples, Certification, SearchBudget, TupleSpec, Witness};
use crate::linalg::{derive_seed, random_orthogonal_with, random_unit, rng_from_seed, Subspace, Vector};
use crate::submanifold::SubmanifoldPoint;

pub const SCHEMA_VERSION: u32 = 1;
pub const SEED_ENV: &str = "CHEN_BOUNDS_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation failed for {instance}: {message}")]
    Validation { instance: String, message: String },
    #[error(transparent)]
    Spec(Error),
    #[error("{violations} exact-mode check(s) violated")]
    Violation { violations: usize },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } | CliError::Spec(_) | CliError::Usage(_) => 2,
            CliError::Violation { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Parser)]
#[command(name = "chen-bounds", version, about = "Curvature invariants and Chen-type inequality checks")]
pub struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate instance JSON files plus a manifest.
    Gen(GenArgs),
    /// Run the inequality checks over instance files.
    Check(CheckArgs),
    /// Sweep one generator parameter and record the worst slack per check.
    Sweep(SweepArgs),
    /// Recompute invariants by brute force and compare with the engine.
    Oracle(OracleArgs),
    /// Summarize a check report.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    General,
    Sasakian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Random,
    Geodesic,
    Umbilical,
    Basic,
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FSourceArg {
    Explicit,
    KappaMu,
    NonSasakian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameArg {
    Adapted,
    Twisted,
}

/// Generator parameters shared by `gen` and `sweep`.
#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    #[arg(long, value_enum, default_value = "sasakian")]
    pub mode: ModeArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "random")]
    pub family: FamilyArg,
    /// Umbilical mean curvature norm.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Diagonal entries a, b of the basic equality form.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 2.0)]
    pub b: f64,
    /// Block sizes of the delta equality form, e.g. `2,2`.
    #[arg(long, value_delimiter = ',')]
    pub dims: Vec<usize>,
    /// Where f comes from; `explicit` needs `--f`.
    #[arg(long, value_enum, default_value = "kappa-mu")]
    pub f_source: FSourceArg,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    /// Seven coefficients f1,f2,f3,f4,f51,f52,f6.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub f: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h_eigenvalues: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_scale: f64,
    #[arg(long, value_enum, default_value = "adapted")]
    pub frame: FrameArg,
    #[arg(long)]
    pub conjugate: bool,
    /// In Sasakian mode also require f2 = f1 - 1.
    #[arg(long)]
    pub strict_sasakian: bool,
}

impl InstanceArgs {
    pub fn to_spec(&self, seed: u64) -> CliResult<GeneratorSpec> {
        let f_source = match self.f_source {
            FSourceArg::Explicit => {
                let arr: [f64; 7] = self
                    .f
                    .clone()
                    .try_into()
                    .map_err(|_| CliError::Usage("--f needs exactly seven comma-separated values".into()))?;
                FSource::Explicit { f: FCoefficients::from_array(arr) }
            }
            FSourceArg::KappaMu => FSource::KappaMu { c: self.c, kappa: self.kappa, mu: self.mu },
            FSourceArg::NonSasakian => FSource::NonSasakian { kappa: self.kappa, mu: self.mu },
        };
        let family = match self.family {
            FamilyArg::Random => Family::Random,
            FamilyArg::Geodesic => Family::TotallyGeodesic,
            FamilyArg::Umbilical => Family::Umbilical { lambda: self.lambda },
            FamilyArg::Basic => Family::EqualityBasic { a: self.a, b: self.b },
            FamilyArg::Delta => Family::EqualityDelta { dims: self.dims.clone() },
        };
        Ok(GeneratorSpec {
            m: self.m,
            n: self.n,
            mode: match self.mode {
                ModeArg::General => Mode::General,
                ModeArg::Sasakian => Mode::Sasakian,
            },
            f_source,
            h_eigenvalues: if self.h_eigenvalues.is_empty() { None } else { Some(self.h_eigenvalues.clone()) },
            sigma_scale: self.sigma_scale,
            seed,
            frame: match self.frame {
                FrameArg::Adapted => FrameKind::Adapted,
                FrameArg::Twisted => FrameKind::Twisted,
            },
            conjugate: self.conjugate,
            family,
            strict_sasakian: self.strict_sasakian,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Base seed; falls back to CHEN_BOUNDS_SEED, then 0.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Identity,
    Chen,
    Ricci,
    Mean,
    Theta,
    Sasakian,
    Delta,
    Detectors,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::Identity,
        CheckKind::Chen,
        CheckKind::Ricci,
        CheckKind::Mean,
        CheckKind::Theta,
        CheckKind::Sasakian,
        CheckKind::Delta,
        CheckKind::Detectors,
    ];
}

/// Search budget, tolerances and witness counts shared by `check` and `sweep`.
#[derive(Debug, Clone, Args)]
pub struct CheckSettingsArgs {
    /// Checks to run (default: all).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub checks: Vec<CheckKind>,
    /// Random planes per instance for the per-plane bounds.
    #[arg(long, default_value_t = 64)]
    pub planes: usize,
    /// Random unit vectors per instance for the Ricci bounds.
    #[arg(long, default_value_t = 64)]
    pub vectors: usize,
    /// Random orthogonal tuples per admissible tuple type.
    #[arg(long, default_value_t = 16)]
    pub tuples: usize,
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
    #[arg(long, default_value_t = 16)]
    pub multistarts: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub step_tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub eq_tol: f64,
    #[arg(long, default_value_t = -1e-8, allow_hyphen_values = true)]
    pub slack_tol: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub form_tol: f64,
}

impl CheckSettingsArgs {
    fn settings(&self, seed: u64) -> CliResult<CheckSettings> {
        for (name, v) in [("eq-tol", self.eq_tol), ("form-tol", self.form_tol), ("step-tol", self.step_tol)] {
            if !(v > 0.0) {
                return Err(CliError::Usage(format!("--{name} must be positive")));
            }
        }
        Ok(CheckSettings {
            checks: if self.checks.is_empty() { CheckKind::ALL.to_vec() } else { self.checks.clone() },
            planes: self.planes,
            vectors: self.vectors,
            tuples: self.tuples,
            budget: SearchBudget {
                samples: self.samples,
                multistarts: self.multistarts,
                step_tol: self.step_tol,
                max_iters: self.max_iters,
                seed,
            },
            tol: Tolerances { eq_tol: self.eq_tol, slack_tol: self.slack_tol, form_tol: self.form_tol },
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Instance files or directories containing them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub settings: CheckSettingsArgs,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Report JSON path (stdout when absent).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Optional CSV summary, one row per (instance, check).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    SigmaScale,
    Lambda,
    C,
    Kappa,
    Mu,
    N,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 5)]
    pub steps: usize,
    /// Instances per parameter value.
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub settings: CheckSettingsArgs,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// CSV path (stdout when absent).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Samples per oracle sweep.
    #[arg(long, default_value_t = 100_000)]
    pub density: usize,
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// A report written by `check`.
    pub input: PathBuf,
    /// Optional CSV of the per-check aggregate.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct CheckSettings {
    pub checks: Vec<CheckKind>,
    pub planes: usize,
    pub vectors: usize,
    pub tuples: usize,
    pub budget: SearchBudget,
    pub tol: Tolerances,
}

impl CheckSettings {
    fn wants(&self, k: CheckKind) -> bool {
        self.checks.contains(&k)
    }
}

/// Worst report of one check name on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub mode: CheckMode,
    pub count: usize,
    pub violations: usize,
    pub all_equal: bool,
    pub worst: InequalityReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectorEntry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<String>,
    pub report: EqualityFormReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceInvariants {
    pub tau: f64,
    pub mean_curvature_sq: f64,
    pub sigma_norm_sq: f64,
    pub inf_sectional: f64,
    pub inf_sectional_certified: Certification,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub id: String,
    pub n: usize,
    pub m: usize,
    pub sasakian_mode: bool,
    pub invariants: InstanceInvariants,
    pub checks: Vec<CheckSummary>,
    pub detectors: Vec<DetectorEntry>,
    pub violations: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchSummary {
    pub instances: usize,
    pub violations: usize,
    pub identity_failures: usize,
    pub conservative_negative: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub tolerances: Tolerances,
    pub budget: SearchBudget,
    pub instances: Vec<InstanceReport>,
    pub summary: BatchSummary,
}

fn seed_for(id: &str, seed: u64) -> u64 {
    let d = Sha256::digest(id.as_bytes());
    let mut b = [0u8; 8];
    b.copy_from_slice(&d[..8]);
    derive_seed(seed, u64::from_le_bytes(b))
}

fn push(map: &mut BTreeMap<String, Vec<InequalityReport>>, r: InequalityReport) {
    map.entry(r.name.clone()).or_default().push(r);
}

fn record(r: crate::error::Result<InequalityReport>, map: &mut BTreeMap<String, Vec<InequalityReport>>, errors: &mut Vec<String>) {
    match r {
        Ok(r) => push(map, r),
        Err(e) => errors.push(e.to_string()),
    }
}

/// Runs the selected checks on one instance at its sampled witnesses.
pub fn check_instance(s: &SubmanifoldPoint, id: &str, settings: &CheckSettings) -> InstanceReport {
    let n = s.n();
    let seed = seed_for(id, settings.budget.seed);
    let budget = SearchBudget { seed, ..settings.budget };
    let ctx = InequalityContext::new(s, settings.tol);
    let table = ctx.table();
    let inf = table.inf_sectional(&budget);
    let sasakian = ctx.is_sasakian_mode();
    let mut by_name: BTreeMap<String, Vec<InequalityReport>> = BTreeMap::new();
    let mut detectors = Vec::new();
    let mut errors = Vec::new();
    let mut rng = rng_from_seed(derive_seed(seed, 0xc4ec));

    let inf_plane = match &inf.witness {
        Witness::Plane(p) => p.clone(),
        _ => Subspace::coordinate(n, &[0, 1]),
    };
    let mut planes = vec![inf_plane.clone()];
    for i in 0..n {
        for j in i + 1..n {
            planes.push(Subspace::coordinate(n, &[i, j]));
        }
    }
    for _ in 0..settings.planes {
        let q = random_orthogonal_with(&mut rng, n);
        planes.push(Subspace::from_orthonormal(q.columns(0, 2).into_owned()).expect("orthonormal"));
    }
    let (ric_vals, ric_vecs) = table.ricci_tensor().eigen();
    let top = ric_vecs.column(ric_vals.len() - 1).into_owned();
    let mut vectors: Vec<Vector> = (0..n).map(|i| Subspace::coordinate(n, &[i]).vector(0)).collect();
    vectors.extend((0..n).map(|i| ric_vecs.column(i).into_owned()));
    vectors.extend(s.relative_null_space().vectors());
    vectors.extend((0..settings.vectors).map(|_| random_unit(&mut rng, n)));


    if settings.wants(CheckKind::Identity) {
        push(&mut by_name, ctx.scalar_curvature_identity());
    }
    if n >= 3 {
        if settings.wants(CheckKind::Chen) {
            for p in &planes {
                record(ctx.chen_first(p), &mut by_name, &mut errors);
            }
        }
        if settings.wants(CheckKind::Ricci) {
            for u in &vectors {
                record(ctx.ricci_bound(u), &mut by_name, &mut errors);
            }
        }
        if settings.wants(CheckKind::Mean) {
            record(ctx.mean_vs_scalar(), &mut by_name, &mut errors);
        }
        if settings.wants(CheckKind::Theta) {
            for k in 2..=n {
                record(ctx.theta_bound(k, &budget), &mut by_name, &mut errors);
            }
        }
        if sasakian && settings.wants(CheckKind::Sasakian) {
            match ctx.sasakian_suite(&inf_plane, &top) {
                Ok(rs) => rs.into_iter().for_each(|r| push(&mut by_name, r)),
                Err(e) => errors.push(e.to_string()),
            }
            for p in planes.iter().skip(1) {
                if let Ok(rs) = ctx.sasakian_suite(p, &vectors[0]) {
                    push(&mut by_name, rs.into_iter().next().expect("three reports"));
                }
            }
        }
    }
    if sasakian && settings.wants(CheckKind::Delta) {
        for t in enumerate_tuples(n) {
            let mut tuples: Vec<Vec<Subspace>> = Vec::new();
            match table.delta_invariant(&t, &budget) {
                Ok(d) => {
                    if let Witness::Tuple(ls) = d.witness {
                        tuples.push(ls);
                    }
                }
                Err(e) => errors.push(e.to_string()),
            }
            for _ in 0..settings.tuples {
                let q = random_orthogonal_with(&mut rng, n);
                let mut c = 0;
                let mut ls = Vec::new();
                for &d in t.dims() {
                    ls.push(Subspace::from_orthonormal(q.columns(c, d).into_owned()).expect("orthonormal"));
                    c += d;
                }
                tuples.push(ls);
            }
            for ls in &tuples {
                record(ctx.delta_tuple(&t, ls), &mut by_name, &mut errors);
            }
        }
    }
    if settings.wants(CheckKind::Detectors) {
        if n >= 3 {
            match detect_equality_form_basic(s, &Subspace::coordinate(n, &[0, 1]), settings.tol.form_tol) {
                Ok(r) => detectors.push(DetectorEntry { name: "basic".into(), tuple: None, report: r }),
                Err(e) => errors.push(e.to_string()),
            }
        }
        if sasakian {
            for t in enumerate_tuples(n).into_iter().filter(|t| !t.is_empty()) {
                match detect_equality_form_delta(s, &t, settings.tol.form_tol) {
                    Ok(r) => detectors.push(DetectorEntry { name: "delta".into(), tuple: Some(t.to_string()), report: r }),
                    Err(e) => errors.push(e.to_string()),
                }
            }
        }
    }

    let mut checks = Vec::new();
    let mut violations = 0;
    for (name, reps) in by_name {
        let v = reps.iter().filter(|r| r.violated() || (r.name == "scalar-curvature-identity" && !r.equality)).count();
        violations += v;
        let all_equal = reps.iter().all(|r| r.equality);
        let worst = reps
            .iter()
            .min_by(|a, b| a.slack.total_cmp(&b.slack))
            .cloned()
            .expect("non-empty");
        checks.push(CheckSummary { name, mode: worst.mode, count: reps.len(), violations: v, all_equal, worst });
    }
    InstanceReport {
        id: id.to_string(),
        n,
        m: s.ambient().m(),
        sasakian_mode: sasakian,
        invariants: InstanceInvariants {
            tau: ctx.tau(),
            mean_curvature_sq: s.mean_curvature().norm_sq,
            sigma_norm_sq: s.sigma_norm_sq(),
            inf_sectional: inf.value,
            inf_sectional_certified: inf.certified,
        },
        checks,
        detectors,
        violations,
        errors,
    }
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, text).map_err(io_err(path))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub spec: GeneratorSpec,
    pub spec_hash: String,
    pub instances: Vec<ManifestEntry>,
}

/// Writes `instance-NNNN.json` files and `manifest.json` into `args.out`.
pub fn cmd_gen(args: &GenArgs) -> CliResult<Manifest> {
    let spec = args.instance.to_spec(args.seed)?;
    let spec_json = serde_json::to_string(&spec).expect("serializable");
    let spec_hash = hex::encode(Sha256::digest(spec_json.as_bytes()));
    let built: Vec<(String, u64, SubmanifoldPoint)> = (0..args.count)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(args.seed, i as u64);
            let s = forge_instance(&GeneratorSpec { seed, ..spec.clone() })?;
            Ok((format!("instance-{i:04}.json"), seed, s))
        })
        .collect::<crate::error::Result<_>>()
        .map_err(CliError::Spec)?;
    fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    let mut instances = Vec::with_capacity(built.len());
    for (file, seed, s) in &built {
        write_text(&args.out.join(file), &to_json(s))?;
        instances.push(ManifestEntry { file: file.clone(), seed: *seed });
    }
    let manifest = Manifest { schema_version: SCHEMA_VERSION, spec, spec_hash, instances };
    write_text(&args.out.join("manifest.json"), &to_json(&manifest))?;
    Ok(manifest)
}

/// Instance files named on the command line or found in listed directories
/// (every `*.json` except `manifest.json`), sorted by id.
pub fn collect_instances(inputs: &[PathBuf]) -> CliResult<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for p in inputs {
        let meta = fs::metadata(p).map_err(io_err(p))?;
        if meta.is_dir() {
            for entry in fs::read_dir(p).map_err(io_err(p))? {
                let path = entry.map_err(io_err(p))?.path();
                let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
                if name.ends_with(".json") && name != "manifest.json" {
                    out.push(path);
                }
            }
        } else {
            out.push(p.clone());
        }
    }
    let mut named: Vec<(String, PathBuf)> = out
        .into_iter()
        .map(|p| (p.file_stem().and_then(|s| s.to_str()).unwrap_or("instance").to_string(), p))
        .collect();
    named.sort();
    Ok(named)
}

pub fn load_instance(id: &str, path: &Path) -> CliResult<SubmanifoldPoint> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation { instance: id.to_string(), message: e.to_string() })
}

fn load_all(inputs: &[PathBuf]) -> CliResult<Vec<(String, SubmanifoldPoint)>> {
    collect_instances(inputs)?
        .into_iter()
        .map(|(id, p)| Ok((id.clone(), load_instance(&id, &p)?)))
        .collect()
}

pub fn run_checks(instances: &[(String, SubmanifoldPoint)], settings: &CheckSettings) -> CheckReport {
    let reports: Vec<InstanceReport> =
        instances.par_iter().map(|(id, s)| check_instance(s, id, settings)).collect();
    let summary = BatchSummary {
        instances: reports.len(),
        violations: reports.iter().map(|r| r.violations).sum(),
        identity_failures: reports
            .iter()
            .flat_map(|r| &r.checks)
            .filter(|c| c.name == "scalar-curvature-identity" && c.violations > 0)
            .count(),
        conservative_negative: reports
            .iter()
            .flat_map(|r| &r.checks)
            .filter(|c| c.mode == CheckMode::Conservative && c.worst.slack < settings.tol.slack_tol)
            .count(),
    };
    CheckReport { schema_version: SCHEMA_VERSION, tolerances: settings.tol, budget: settings.budget, instances: reports, summary }
}

const CSV_HEADER: [&str; 9] = ["instance", "check", "mode", "count", "violations", "min_slack", "lhs", "rhs", "all_equal"];

fn mode_str(m: CheckMode) -> &'static str {
    match m {
        CheckMode::Exact => "exact",
        CheckMode::Conservative => "conservative",
    }
}

fn check_csv(report: &CheckReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory");
    for inst in &report.instances {
        for c in &inst.checks {
            w.write_record([
                inst.id.clone(),
                c.name.clone(),
                mode_str(c.mode).to_string(),
                c.count.to_string(),
                c.violations.to_string(),
                c.worst.slack.to_string(),
                c.worst.lhs.to_string(),
                c.worst.rhs.to_string(),
                c.all_equal.to_string(),
            ])
            .expect("in-memory");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory")).expect("utf8")
}

/// Loads, checks and writes the report. Returns the report even when it
/// contains violations; [`run`] turns those into exit code 3.
pub fn cmd_check(args: &CheckArgs) -> CliResult<CheckReport> {
    let settings = args.settings.settings(args.seed)?;
    let instances = load_all(&args.inputs)?;
    let report = run_checks(&instances, &settings);
    let text = to_json(&report);
    match &args.out {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = &args.csv {
        write_text(p, &check_csv(&report))?;
    }
    Ok(report)
}

fn sweep_values(args: &SweepArgs) -> Vec<f64> {
    match args.steps {
        0 => Vec::new(),
        1 => vec![args.from],
        k => (0..k).map(|i| args.from + (args.to - args.from) * i as f64 / (k - 1) as f64).collect(),
    }
}

fn apply_param(base: &InstanceArgs, param: SweepParam, v: f64) -> InstanceArgs {
    let mut a = base.clone();
    match param {
        SweepParam::SigmaScale => a.sigma_scale = v,
        SweepParam::Lambda => {
            a.family = FamilyArg::Umbilical;
            a.lambda = v;
        }
        SweepParam::C => a.c = v,
        SweepParam::Kappa => a.kappa = v,
        SweepParam::Mu => a.mu = v,
        SweepParam::N => a.n = v.round() as usize,
    }
    a
}

/// One CSV row per (parameter value, check) with the minimum slack over the
/// instances generated at that value.
pub fn cmd_sweep(args: &SweepArgs) -> CliResult<String> {
    let settings = args.settings.settings(args.seed)?;
    let param = format!("{:?}", args.param).to_lowercase();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["param", "value", "check", "mode", "instances", "min_slack", "violations"]).expect("in-memory");
    for (vi, v) in sweep_values(args).into_iter().enumerate() {
        let inst = apply_param(&args.instance, args.param, v);
        let base = inst.to_spec(args.seed)?;
        let instances: Vec<(String, SubmanifoldPoint)> = (0..args.count)
            .map(|i| {
                let seed = derive_seed(derive_seed(args.seed, vi as u64), i as u64);
                forge_instance(&GeneratorSpec { seed, ..base.clone() }).map(|s| (format!("sweep-{vi:03}-{i:04}"), s))
            })
            .collect::<crate::error::Result<_>>()
            .map_err(CliError::Spec)?;
        let report = run_checks(&instances, &settings);
        let mut agg: BTreeMap<String, (CheckMode, usize, f64, usize)> = BTreeMap::new();
        for r in &report.instances {
            for c in &r.checks {
                let e = agg.entry(c.name.clone()).or_insert((c.mode, 0, f64::INFINITY, 0));
                e.1 += 1;
                e.2 = e.2.min(c.worst.slack);
                e.3 += c.violations;
                if c.mode == CheckMode::Conservative {
                    e.0 = CheckMode::Conservative;
                }
            }
        }
        for (name, (mode, count, min, viol)) in agg {
            w.write_record([
                param.clone(),
                v.to_string(),
                name,
                mode_str(mode).to_string(),
                count.to_string(),
                min.to_string(),
                viol.to_string(),
            ])
            .expect("in-memory");
        }
    }
    let text = String::from_utf8(w.into_inner().expect("in-memory")).expect("utf8");
    match &args.out {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    Ok(text)
}

#[derive(Debug, Clone, Serialize)]
pub struct EngineRecord {
    pub tau: f64,
    pub inf_sectional: f64,
    pub delta: BTreeMap<String, f64>,
    pub theta: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleEntry {
    pub id: String,
    pub oracle: OracleRecord,
    pub engine: EngineRecord,
    /// Engine inf K minus oracle inf K (never positive beyond rounding).
    pub inf_sectional_gap: f64,
    pub tau_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub schema_version: u32,
    pub density: usize,
    pub instances: Vec<OracleEntry>,
}

pub fn cmd_oracle(args: &OracleArgs) -> CliResult<OracleReport> {
    let instances = load_all(&args.inputs)?;
    let entries: Vec<OracleEntry> = instances
        .par_iter()
        .map(|(id, s)| {
            let seed = seed_for(id, args.seed);
            let oracle = oracle_invariants_seeded(s, args.density, seed).map_err(CliError::Spec)?;
            let table = crate::invariants::CurvatureTable::new(s);
            let budget = SearchBudget { samples: args.samples, seed, ..SearchBudget::default() };
            let mut delta = BTreeMap::new();
            for t in enumerate_tuples(s.n()) {
                delta.insert(t.to_string(), table.delta_invariant(&t, &budget).map_err(CliError::Spec)?.value);
            }
            let mut theta = BTreeMap::new();
            for k in 2..=s.n() {
                theta.insert(k, table.theta_k(k, &budget).map_err(CliError::Spec)?.value);
            }
            let engine =
                EngineRecord { tau: table.scalar_curvature(), inf_sectional: table.inf_sectional(&budget).value, delta, theta };
            Ok(OracleEntry {
                id: id.clone(),
                inf_sectional_gap: engine.inf_sectional - oracle.inf_sectional,
                tau_gap: engine.tau - oracle.tau,
                oracle,
                engine,
            })
        })
        .collect::<CliResult<_>>()?;
    let report = OracleReport { schema_version: SCHEMA_VERSION, density: args.density, instances: entries };
    let text = to_json(&report);
    match &args.out {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReportLine {
    pub check: String,
    pub mode: String,
    pub instances: usize,
    pub violations: u64,
    pub equalities: usize,
    pub min_slack: f64,
}

/// Aggregates a `check` report per check name.
pub fn cmd_report(args: &ReportArgs) -> CliResult<Vec<ReportLine>> {
    let text = fs::read_to_string(&args.input).map_err(io_err(&args.input))?;
    let bad = |msg: &str| CliError::Validation { instance: args.input.display().to_string(), message: msg.to_string() };
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    if v["schema_version"].as_u64() != Some(SCHEMA_VERSION as u64) {
        return Err(bad("unsupported or missing schema_version"));
    }
    let mut agg: BTreeMap<String, ReportLine> = BTreeMap::new();
    for inst in v["instances"].as_array().ok_or_else(|| bad("missing instances"))? {
        for c in inst["checks"].as_array().ok_or_else(|| bad("missing checks"))? {
            let name = c["name"].as_str().unwrap_or("?").to_string();
            let line = agg.entry(name.clone()).or_insert(ReportLine {
                check: name,
                mode: c["mode"].as_str().unwrap_or("?").to_string(),
                min_slack: f64::INFINITY,
                ..ReportLine::default()
            });
            line.instances += 1;
            line.violations += c["violations"].as_u64().unwrap_or(0);
            line.equalities += usize::from(c["all_equal"].as_bool().unwrap_or(false));
            line.min_slack = line.min_slack.min(c["worst"]["slack"].as_f64().unwrap_or(f64::NAN));
        }
    }
    let lines: Vec<ReportLine> = agg.into_values().collect();
    println!("{:<28} {:<13} {:>9} {:>10} {:>10} {:>14}", "check", "mode", "instances", "violations", "all-equal", "min slack");
    for l in &lines {
        println!(
            "{:<28} {:<13} {:>9} {:>10} {:>10} {:>14.6e}",
            l.check, l.mode, l.instances, l.violations, l.equalities, l.min_slack
        );
    }
    if let Some(p) = &args.csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        for l in &lines {
            w.serialize(l).expect("in-memory");
        }
        write_text(p, &String::from_utf8(w.into_inner().expect("in-memory")).expect("utf8"))?;
    }
    Ok(lines)
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> CliResult<()> {
    with_pool(cli.workers, || match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(|m| eprintln!("wrote {} instance(s) to {}", m.instances.len(), a.out.display())),
        Command::Check(a) => {
            let r = cmd_check(a)?;
            if r.summary.violations > 0 {
                return Err(CliError::Violation { violations: r.summary.violations });
            }
            Ok(())
        }
        Command::Sweep(a) => cmd_sweep(a).map(|_| ()),
        Command::Oracle(a) => cmd_oracle(a).map(|_| ()),
        Command::Report(a) => cmd_report(a).map(|_| ()),
    })?
}

/// Re-export for callers that only need a tuple parser.
pub fn parse_tuple(text: &str) -> CliResult<TupleSpec> {
    let dims = text
        .trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<usize>().map_err(|e| CliError::Usage(format!("bad tuple {text:?}: {e}"))))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(TupleSpec::new(&dims))
}
