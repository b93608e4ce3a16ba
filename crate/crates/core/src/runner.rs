//! Experiment configuration, the analysis pipeline, reports, plot-data export
//! and re-verification of stored artifacts.
//!
//! A config is a JSON object (or `{"experiments": [...]}` for a batch):
//!
//! ```json
//! {"system": {"name": "heis", "b": [2, 1, 1, 1], "k": 1},
//!  "analyses": ["autonomy", "classify", "lyapunov"],
//!  "seed": 7}
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::circle::{FiberAxis, FiberedMap, LinearizationReport, MIN_PROFILE_SAMPLES};
use crate::classify::{classify_2d, classify_algebra, classify_3d, AlgebraClass, MatrixClass2D, Branch3D};
use crate::cocycle::{
    autonomy_check, determinant_check, log_moduli, lyapunov_exponents, verify_partial_hyperbolicity, CocycleReport,
    DetSign, LyapunovSpectrum, PartialHyperbolicSpec,
};
use crate::error::{Error, Result};
use crate::fields::{StructureTensor, DEFAULT_BRACKET_STEP, DEFAULT_CONSTANCY_TOL};
use crate::geometry::ManifoldKind;
use crate::linalg::IntMatrix;
use crate::models::{
    anosov_3d_matrix, cat_map, circle_extension, heis_system, parabolic_twist, perturbed_cat, sol_system, suspension,
    toral_affine, BaseFraming, FourierSum, FramedSystem, SystemData, DEFAULT_SUSPENSION_WARP,
};
use crate::splitting::{
    cone_converge, holder_exponent, Axis, ConeIterationReport, GridLineField, HolderEstimate, HEAVY_GRID,
};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "FRAMELAB_THREADS";
pub const REPORT_FILE: &str = "report.json";
pub const NORMALIZED_REPORT_FILE: &str = "report.normalized.json";

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const ANALYSIS_FAILED: i32 = 2;
    pub const CONFIG_ERROR: i32 = 3;
}

/// Caps the global worker pool from [`THREADS_ENV`]; returns the cap.
pub fn configure_threads() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // A pool may already exist when called twice; the first cap wins.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(Some(n))
}

fn cat_entries() -> [i64; 4] {
    [2, 1, 1, 1]
}
fn one() -> u32 {
    1
}
fn one_i32() -> i32 {
    1
}
fn default_warp() -> f64 {
    DEFAULT_SUSPENSION_WARP
}
fn default_rho() -> FourierSum {
    FourierSum::sin_x(0.2)
}

/// Constructor name and parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum SystemSpec {
    ToralAffine {
        matrix: IntMatrix,
        #[serde(default)]
        translation: Vec<f64>,
    },
    CatMap,
    #[serde(rename = "anosov-3d")]
    Anosov3d,
    PerturbedCat,
    Heis {
        b: [i64; 4],
        #[serde(default = "one")]
        k: u32,
    },
    Sol {
        monodromy: [i64; 4],
    },
    Suspension {
        #[serde(default = "cat_entries")]
        base: [i64; 4],
        #[serde(default = "one_i32")]
        power: i32,
        #[serde(default)]
        shift: [f64; 2],
        #[serde(default = "default_warp")]
        warp: f64,
    },
    CircleExtension {
        #[serde(default = "cat_entries")]
        base: [i64; 4],
        #[serde(default = "default_rho")]
        rho: FourierSum,
        #[serde(default)]
        base_framing: BaseFraming,
    },
    ParabolicTwist {
        k: i64,
        #[serde(default)]
        eps: f64,
    },
}

impl SystemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SystemSpec::ToralAffine { .. } => "toral-affine",
            SystemSpec::CatMap => "cat-map",
            SystemSpec::Anosov3d => "anosov-3d",
            SystemSpec::PerturbedCat => "perturbed-cat",
            SystemSpec::Heis { .. } => "heis",
            SystemSpec::Sol { .. } => "sol",
            SystemSpec::Suspension { .. } => "suspension",
            SystemSpec::CircleExtension { .. } => "circle-extension",
            SystemSpec::ParabolicTwist { .. } => "parabolic-twist",
        }
    }

    pub fn build(&self) -> Result<FramedSystem> {
        match self {
            SystemSpec::ToralAffine { matrix, translation } => {
                let v = if translation.is_empty() {
                    vec![0.0; matrix.dim()]
                } else {
                    translation.clone()
                };
                toral_affine(matrix, &v)
            }
            SystemSpec::CatMap => Ok(cat_map()),
            SystemSpec::Anosov3d => toral_affine(&anosov_3d_matrix(), &[0.0; 3]),
            SystemSpec::PerturbedCat => Ok(perturbed_cat()),
            SystemSpec::Heis { b, k } => heis_system(&IntMatrix::from_flat2(*b), *k),
            SystemSpec::Sol { monodromy } => sol_system(&IntMatrix::from_flat2(*monodromy)),
            SystemSpec::Suspension {
                base,
                power,
                shift,
                warp,
            } => suspension(&IntMatrix::from_flat2(*base), *power, *shift, *warp),
            SystemSpec::CircleExtension {
                base,
                rho,
                base_framing,
            } => circle_extension(&IntMatrix::from_flat2(*base), rho.clone(), *base_framing),
            SystemSpec::ParabolicTwist { k, eps } => parabolic_twist(*k, *eps),
        }
    }
}

/// Analyses, run in the order given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Autonomy,
    Classify,
    Lyapunov,
    Splitting,
    RotationProfile,
    Regularity,
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::Autonomy => "autonomy",
            Analysis::Classify => "classify",
            Analysis::Lyapunov => "lyapunov",
            Analysis::Splitting => "splitting",
            Analysis::RotationProfile => "rotation-profile",
            Analysis::Regularity => "regularity",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string())).map_err(|_| Error::Config(format!("unknown analysis {s:?}")))
    }

    fn stream(&self) -> u64 {
        *self as u64 + 1
    }
}

/// Tolerance overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Cocycle deviation; `None` picks by Jacobian mode.
    pub autonomy: Option<f64>,
    pub constancy: f64,
    pub lyapunov: f64,
    pub cone: f64,
    pub oracle: f64,
    pub contraction: f64,
    pub fit_quality: f64,
    pub linearization: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            autonomy: None,
            constancy: DEFAULT_CONSTANCY_TOL,
            lyapunov: 1e-3,
            cone: 1e-10,
            oracle: 1e-8,
            contraction: 0.02,
            fit_quality: 0.98,
            linearization: 1e-4,
        }
    }
}

/// Sampling and resolution settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub autonomy_samples: usize,
    pub tensor_samples: usize,
    pub lyapunov_starts: usize,
    pub lyapunov_iterations: usize,
    /// Rows kept in the reported Lyapunov history.
    pub history_rows: usize,
    pub grid: [usize; 3],
    pub max_cone_iterations: usize,
    pub oracle_terms: usize,
    pub regularity_grid: [usize; 3],
    pub fiber_axis: FiberAxis,
    pub profile_samples: usize,
    pub linearization_grid: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            autonomy_samples: 10_000,
            tensor_samples: 64,
            lyapunov_starts: 16,
            lyapunov_iterations: 1000,
            history_rows: 200,
            grid: [256, 256, 64],
            max_cone_iterations: 80,
            oracle_terms: 40,
            regularity_grid: [256, 256, 8],
            fiber_axis: FiberAxis::X,
            profile_samples: MIN_PROFILE_SAMPLES,
            linearization_grid: 64,
        }
    }
}

/// One experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub settings: Settings,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Use the large regularity grid.
    #[serde(default)]
    pub heavy: bool,
}

impl ExperimentConfig {
    pub fn new(system: SystemSpec, analyses: Vec<Analysis>) -> Self {
        Self {
            system,
            analyses,
            tolerances: Tolerances::default(),
            settings: Settings::default(),
            seed: 0,
            output_dir: None,
            heavy: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.analyses.is_empty() {
            return Err(Error::Config("analyses must not be empty".into()));
        }
        let s = &self.settings;
        if s.autonomy_samples == 0 || s.lyapunov_starts == 0 || s.lyapunov_iterations == 0 {
            return Err(Error::Config("sample counts must be positive".into()));
        }
        if s.grid.iter().chain(&s.regularity_grid).any(|&n| n == 0) {
            return Err(Error::Config("grid dimensions must be positive".into()));
        }
        Ok(())
    }

    fn regularity_grid(&self) -> [usize; 3] {
        if self.heavy {
            [HEAVY_GRID.0, HEAVY_GRID.1, HEAVY_GRID.2]
        } else {
            self.settings.regularity_grid
        }
    }
}

/// A config file: one experiment or a batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigFile {
    Batch { experiments: Vec<ExperimentConfig> },
    Single(ExperimentConfig),
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        // Untagged errors are unhelpful, so try each shape for the message.
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if value.get("experiments").is_some() {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct Batch {
                experiments: Vec<ExperimentConfig>,
            }
            let b: Batch = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
            if b.experiments.is_empty() {
                return Err(Error::Config("batch has no experiments".into()));
            }
            Ok(ConfigFile::Batch {
                experiments: b.experiments,
            })
        } else {
            Ok(ConfigFile::Single(
                serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?,
            ))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn experiments(&self) -> Vec<ExperimentConfig> {
        match self {
            ConfigFile::Batch { experiments } => experiments.clone(),
            ConfigFile::Single(c) => vec![c.clone()],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Passed,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutonomyResult {
    pub report: CocycleReport,
    pub det_sign: DetSign,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResult {
    pub dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_class: Option<MatrixClass2D>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<PartialHyperbolicSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tensor: Option<StructureTensor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tensor_constant: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch3D>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovResult {
    pub spectrum: LyapunovSpectrum,
    /// `log |eig|` of the cocycle matrix when the system is autonomous.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_reference_error: Option<f64>,
    /// `(iteration, running estimates)` along the first orbit, subsampled.
    pub history: Vec<(usize, Vec<f64>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingResult {
    pub grid: [usize; 3],
    pub cone: ConeIterationReport,
    pub expected_contraction: f64,
    pub oracle_terms: usize,
    pub oracle_distance: f64,
    pub field_range: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationProfileResult {
    pub axis: FiberAxis,
    pub degree_k: i64,
    pub z: Vec<f64>,
    pub alpha: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linearization: Option<LinearizationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityResult {
    pub grid: [usize; 3],
    pub x: HolderEstimate,
    pub y: HolderEstimate,
    /// Smaller of the two exponents.
    pub exponent: f64,
    /// True when the exponent is compatible with a `C^1` field.
    pub c1_compatible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AnalysisResult {
    Autonomy(AutonomyResult),
    Classify(ClassifyResult),
    Lyapunov(LyapunovResult),
    Splitting(SplittingResult),
    RotationProfile(RotationProfileResult),
    Regularity(RegularityResult),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub analysis: Analysis,
    pub status: Status,
    /// Prerequisite that decided whether the analysis could run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<AnalysisResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub name: String,
    pub dimension: usize,
    pub manifold: ManifoldKind,
    pub framing: String,
}

/// A file written by a run, relative to the output directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub analysis: Analysis,
    pub path: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub system: SystemSummary,
    pub analyses: Vec<AnalysisRecord>,
    pub passed: bool,
    pub artifacts: Vec<Artifact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl ExperimentReport {
    /// The report without wall-clock timings or machine-specific paths.
    pub fn normalized(&self) -> Self {
        let mut r = self.clone();
        r.timings_ms = None;
        r.config.output_dir = None;
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_normalized_json(&self) -> Result<String> {
        self.normalized().to_json()
    }

    pub fn record(&self, analysis: Analysis) -> Option<&AnalysisRecord> {
        self.analyses.iter().find(|r| r.analysis == analysis)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            exit::PASS
        } else {
            exit::ANALYSIS_FAILED
        }
    }

    /// Writes `report.json` and `report.normalized.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(REPORT_FILE), self.to_json()?)?;
        fs::write(dir.join(NORMALIZED_REPORT_FILE), self.to_normalized_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    sys: &'a FramedSystem,
    out: Option<&'a Path>,
    autonomy: Option<AutonomyResult>,
    field: Option<GridLineField>,
    artifacts: Vec<Artifact>,
}

impl Context<'_> {
    fn rng(&self, analysis: Analysis) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(analysis.stream());
        rng
    }

    fn artifact(&mut self, analysis: Analysis, name: &str, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
        let Some(dir) = self.out else { return Ok(()) };
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        write(&path)?;
        self.artifacts.push(Artifact {
            analysis,
            path: name.to_string(),
            bytes: fs::metadata(&path)?.len(),
        });
        Ok(())
    }

    fn autonomy(&mut self) -> Result<AutonomyResult> {
        if let Some(a) = &self.autonomy {
            return Ok(a.clone());
        }
        let mut rng = self.rng(Analysis::Autonomy);
        let samples = self.sys.sample_points(&mut rng, self.config.settings.autonomy_samples);
        let report = autonomy_check(&self.sys.map, &self.sys.framing, &samples, self.config.tolerances.autonomy)?;
        let result = AutonomyResult {
            det_sign: determinant_check(&report),
            report,
        };
        self.autonomy = Some(result.clone());
        Ok(result)
    }
}

fn circle_data(sys: &FramedSystem) -> Result<&crate::models::CircleExtensionData> {
    match &sys.data {
        SystemData::CircleExtension(d) => Ok(d),
        _ => Err(Error::UnsupportedManifold(format!(
            "{} is not a circle extension",
            sys.name
        ))),
    }
}

fn run_classify(ctx: &mut Context) -> Result<(Status, ClassifyResult)> {
    let auto = ctx.autonomy.clone().expect("gated on autonomy");
    let m = auto.report.matrix();
    let dim = m.nrows();
    let mut out = ClassifyResult {
        dimension: dim,
        matrix_class: None,
        spectrum: None,
        tensor: None,
        tensor_constant: None,
        algebra: None,
        branch: None,
        note: None,
    };
    if dim == 2 {
        out.matrix_class = Some(classify_2d(&m)?);
        return Ok((Status::Passed, out));
    }
    let spec = verify_partial_hyperbolicity(&m)?;
    out.spectrum = Some(spec);
    if let SystemData::CircleExtension(d) = &ctx.sys.data {
        if !d.rho.is_constant() {
            out.note = Some("horizontal framing is only continuous; bracket routing does not apply".into());
            return Ok((Status::Passed, out));
        }
    }
    let mut rng = ctx.rng(Analysis::Classify);
    let samples = ctx.sys.sample_points(&mut rng, ctx.config.settings.tensor_samples);
    let tensor = ctx.sys.structure_tensor(&samples, DEFAULT_BRACKET_STEP)?;
    let constant = tensor.is_constant(ctx.config.tolerances.constancy);
    if constant {
        out.algebra = Some(classify_algebra(&tensor)?);
    }
    out.tensor_constant = Some(constant);
    let branch = classify_3d(&auto.report, &spec, &tensor, constant);
    out.tensor = Some(tensor);
    out.branch = Some(branch?);
    Ok((Status::Passed, out))
}

fn run_lyapunov(ctx: &mut Context) -> Result<(Status, LyapunovResult)> {
    let s = &ctx.config.settings;
    let mut rng = ctx.rng(Analysis::Lyapunov);
    let starts = ctx.sys.sample_points(&mut rng, s.lyapunov_starts);
    let spectrum = lyapunov_exponents(&ctx.sys.map, &ctx.sys.framing, &ctx.sys.manifold, &starts, s.lyapunov_iterations)?;
    let tol = ctx.config.tolerances.lyapunov;
    let auto = ctx.autonomy()?;
    let reference = auto.report.autonomous.then(|| log_moduli(&auto.report.matrix()));
    let max_reference_error = reference.as_ref().map(|r| {
        r.iter()
            .zip(&spectrum.exponents)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    });
    let stride = (spectrum.history.len() / s.history_rows.max(1)).max(1);
    let history: Vec<(usize, Vec<f64>)> = spectrum
        .history
        .iter()
        .enumerate()
        .filter(|(i, _)| (i + 1) % stride == 0)
        .map(|(i, row)| (i + 1, row.clone()))
        .collect();
    let rows = spectrum.history.clone();
    ctx.artifact(Analysis::Lyapunov, "lyapunov_history.csv", |p| {
        write_history_csv(p, rows.iter().enumerate().map(|(i, r)| (i + 1, r.as_slice())))
    })?;
    let ok = spectrum.per_point_spread < tol && max_reference_error.is_none_or(|e| e < tol);
    let status = if ok { Status::Passed } else { Status::Failed };
    Ok((
        status,
        LyapunovResult {
            spectrum,
            reference,
            max_reference_error,
            history,
        },
    ))
}

fn write_history_csv<'a>(path: &Path, rows: impl Iterator<Item = (usize, &'a [f64])>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    let mut header_done = false;
    for (i, row) in rows {
        if !header_done {
            let cols: Vec<String> = (0..row.len()).map(|k| format!("exponent_{k}")).collect();
            writeln!(w, "iteration,{}", cols.join(","))?;
            header_done = true;
        }
        let vals: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{i},{}", vals.join(","))?;
    }
    if !header_done {
        writeln!(w, "iteration")?;
    }
    w.flush()?;
    Ok(())
}

fn run_splitting(ctx: &mut Context) -> Result<(Status, SplittingResult)> {
    let data = circle_data(ctx.sys)?.clone();
    let s = &ctx.config.settings;
    let tol = &ctx.config.tolerances;
    let [nx, ny, nth] = s.grid;
    let (field, cone) = cone_converge(ctx.sys, GridLineField::constant(nx, ny, nth, 0.0), tol.cone, s.max_cone_iterations)?;
    let terms = s.oracle_terms;
    let oracle_distance = (0..nx * ny)
        .into_par_iter()
        .map(|b| {
            let (i, j) = (b / ny, b % ny);
            let sigma = data.unstable_slope(i as f64 / nx as f64, j as f64 / ny as f64, terms);
            field.slope[b * nth..(b + 1) * nth]
                .iter()
                .map(|v| (v - sigma).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let expected_contraction = 1.0 / data.eigen.lambda_u.abs();
    let contraction_ok = cone
        .contraction_estimate
        .is_none_or(|c| (c - expected_contraction).abs() <= tol.contraction);
    let ok = cone.converged
        && cone.invariance_residual <= 10.0 * tol.cone
        && oracle_distance <= tol.oracle
        && contraction_ok;
    let f = &field;
    ctx.artifact(Analysis::Splitting, "splitting_field.bin", |p| f.write_binary(p))?;
    ctx.artifact(Analysis::Splitting, "splitting_slice.csv", |p| f.write_csv_slice(p, 64))?;
    let result = SplittingResult {
        grid: s.grid,
        field_range: field.range(),
        cone,
        expected_contraction,
        oracle_terms: terms,
        oracle_distance,
    };
    ctx.field = Some(field);
    Ok((if ok { Status::Passed } else { Status::Failed }, result))
}

fn run_rotation_profile(ctx: &mut Context) -> Result<(Status, RotationProfileResult)> {
    let s = &ctx.config.settings;
    let axis = s.fiber_axis;
    let fibered = FiberedMap::from_system(ctx.sys, axis)?;
    let profile = crate::circle::rotation_profile(&fibered, s.profile_samples)?;
    let mut result = RotationProfileResult {
        axis,
        degree_k: profile.degree_k,
        z: profile.z.clone(),
        alpha: profile.alpha.clone(),
        linearization: None,
        note: None,
    };
    let mut ok = true;
    match crate::circle::linearize_parabolic(&fibered, s.profile_samples) {
        Ok(lin) => {
            let rep = lin.report(s.linearization_grid)?;
            ok = rep.sup_distance <= ctx.config.tolerances.linearization;
            result.linearization = Some(rep);
        }
        Err(Error::NotLocalDiffeo(slope)) => {
            result.note = Some(format!("profile is not a covering (min slope {slope:e}); no linear model"));
        }
        Err(e) => return Err(e),
    }
    let p = &profile;
    ctx.artifact(Analysis::RotationProfile, "rotation_profile.csv", |path| p.write_csv(path))?;
    Ok((if ok { Status::Passed } else { Status::Failed }, result))
}

fn run_regularity(ctx: &mut Context) -> Result<(Status, RegularityResult)> {
    circle_data(ctx.sys)?;
    let grid = ctx.config.regularity_grid();
    let reuse = ctx.field.as_ref().filter(|f| [f.nx, f.ny, f.nth] == grid).cloned();
    let field = match reuse {
        Some(f) => f,
        None => {
            cone_converge(
                ctx.sys,
                GridLineField::constant(grid[0], grid[1], grid[2], 0.0),
                ctx.config.tolerances.cone,
                ctx.config.settings.max_cone_iterations,
            )?
            .0
        }
    };
    let x = holder_exponent(&field, Axis::X)?;
    let y = holder_exponent(&field, Axis::Y)?;
    let exponent = x.exponent.min(y.exponent);
    let fit_tol = ctx.config.tolerances.fit_quality;
    let ok = x.fit_quality >= fit_tol && y.fit_quality >= fit_tol;
    let rows: Vec<(f64, f64, f64)> = x.scales.iter().zip(&y.scales).map(|(a, b)| (a.0, a.1, b.1)).collect();
    ctx.artifact(Analysis::Regularity, "regularity_scales.csv", |p| {
        let mut w = BufWriter::new(fs::File::create(p)?);
        writeln!(w, "delta,osc_x,osc_y")?;
        for (d, ox, oy) in &rows {
            writeln!(w, "{d},{ox},{oy}")?;
        }
        w.flush()?;
        Ok(())
    })?;
    Ok((
        if ok { Status::Passed } else { Status::Failed },
        RegularityResult {
            grid,
            c1_compatible: exponent >= 0.95,
            exponent,
            x,
            y,
        },
    ))
}

fn record(analysis: Analysis, outcome: Result<(Status, AnalysisResult)>, gate: Option<String>) -> AnalysisRecord {
    match outcome {
        Ok((status, result)) => AnalysisRecord {
            analysis,
            status,
            gate,
            error: None,
            result: Some(result),
        },
        Err(e) => AnalysisRecord {
            analysis,
            status: Status::Failed,
            gate,
            error: Some(e.to_string()),
            result: None,
        },
    }
}

fn skipped(analysis: Analysis, gate: String) -> AnalysisRecord {
    AnalysisRecord {
        analysis,
        status: Status::Skipped,
        gate: Some(gate),
        error: None,
        result: None,
    }
}

/// Runs one experiment. Artifacts go to `config.output_dir` unless
/// `write_artifacts` is false. Unknown or invalid systems are config errors;
/// analysis failures are recorded in the report.
pub fn run(config: &ExperimentConfig, write_artifacts: bool) -> Result<ExperimentReport> {
    config.validate()?;
    let sys = config
        .system
        .build()
        .map_err(|e| Error::Config(format!("cannot build {}: {e}", config.system.name())))?;
    let out = if write_artifacts {
        config.output_dir.as_deref()
    } else {
        None
    };
    let mut ctx = Context {
        config,
        sys: &sys,
        out,
        autonomy: None,
        field: None,
        artifacts: Vec::new(),
    };
    let mut records = Vec::new();
    let mut timings = BTreeMap::new();
    for (index, &analysis) in config.analyses.iter().enumerate() {
        let start = Instant::now();
        let rec = match analysis {
            Analysis::Autonomy => record(
                analysis,
                ctx.autonomy().map(|a| {
                    let status = if a.report.autonomous {
                        Status::Passed
                    } else {
                        Status::Failed
                    };
                    (status, AnalysisResult::Autonomy(a))
                }),
                None,
            ),
            Analysis::Classify => match ctx.autonomy() {
                Ok(a) if a.report.autonomous => {
                    let gate = Some(format!("autonomy passed (max deviation {:e})", a.report.max_deviation));
                    record(analysis, run_classify(&mut ctx).map(|(s, r)| (s, AnalysisResult::Classify(r))), gate)
                }
                Ok(a) => skipped(
                    analysis,
                    format!("autonomy failed (max deviation {:e})", a.report.max_deviation),
                ),
                Err(e) => skipped(analysis, format!("autonomy errored: {e}")),
            },
            Analysis::Lyapunov => record(
                analysis,
                run_lyapunov(&mut ctx).map(|(s, r)| (s, AnalysisResult::Lyapunov(r))),
                None,
            ),
            Analysis::Splitting => record(
                analysis,
                run_splitting(&mut ctx).map(|(s, r)| (s, AnalysisResult::Splitting(r))),
                None,
            ),
            Analysis::RotationProfile => record(
                analysis,
                run_rotation_profile(&mut ctx).map(|(s, r)| (s, AnalysisResult::RotationProfile(r))),
                None,
            ),
            Analysis::Regularity => {
                let failed_split = records
                    .iter()
                    .any(|r: &AnalysisRecord| r.analysis == Analysis::Splitting && r.status != Status::Passed);
                if failed_split {
                    skipped(analysis, "splitting failed".into())
                } else {
                    record(
                        analysis,
                        run_regularity(&mut ctx).map(|(s, r)| (s, AnalysisResult::Regularity(r))),
                        None,
                    )
                }
            }
        };
        timings.insert(
            format!("{index:02}-{}", analysis.name()),
            start.elapsed().as_secs_f64() * 1e3,
        );
        records.push(rec);
    }
    let summary = SystemSummary {
        name: sys.name.clone(),
        dimension: sys.dim(),
        manifold: sys.manifold.kind().clone(),
        framing: sys.framing.descriptor().to_string(),
    };
    Ok(ExperimentReport {
        passed: records.iter().all(|r| r.status == Status::Passed),
        config: config.clone(),
        system: summary,
        analyses: records,
        artifacts: ctx.artifacts,
        timings_ms: Some(timings),
    })
}

/// Reports of a batch, in config order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub reports: Vec<ExperimentReport>,
    pub passed: bool,
}

impl BatchReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            exit::PASS
        } else {
            exit::ANALYSIS_FAILED
        }
    }
}

/// Runs every experiment; experiments without an output directory get
/// `base/NN-<system>` when `base` is given.
pub fn run_batch(configs: &[ExperimentConfig], base: Option<&Path>, write_artifacts: bool) -> Result<BatchReport> {
    let mut reports = Vec::with_capacity(configs.len());
    for (i, c) in configs.iter().enumerate() {
        let mut c = c.clone();
        if c.output_dir.is_none() {
            c.output_dir = base.map(|b| b.join(format!("{i:02}-{}", c.system.name())));
        }
        reports.push(run(&c, write_artifacts)?);
    }
    Ok(BatchReport {
        passed: reports.iter().all(|r| r.passed),
        reports,
    })
}

/// A constructor parameter in the catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSchema {
    pub name: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub default: Option<Value>,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub summary: String,
    pub parameters: Vec<ParamSchema>,
    /// Classification branch the system realizes.
    pub branch: String,
    pub example: Value,
}

fn param(name: &str, kind: &str, default: Option<Value>, description: &str) -> ParamSchema {
    ParamSchema {
        name: name.into(),
        kind: kind.into(),
        default,
        description: description.into(),
    }
}

/// Every constructor with its parameters and branch.
pub fn list_systems() -> Vec<CatalogEntry> {
    let entry = |name: &str, summary: &str, parameters: Vec<ParamSchema>, branch: &str, example: Value| CatalogEntry {
        name: name.into(),
        summary: summary.into(),
        parameters,
        branch: branch.into(),
        example,
    };
    vec![
        entry(
            "toral-affine",
            "x -> A x + v on T^n, canonical framing",
            vec![
                param("matrix", "integer matrix (rows), 2x2 or 3x3, det ±1", None, "linear part A"),
                param("translation", "real vector", Some(json!([])), "translation v (zeros when empty)"),
            ],
            "anosov-torus when A is hyperbolic; 2D matrix classes otherwise",
            json!({"name": "toral-affine", "matrix": [[2, 1], [1, 1]], "translation": [0.1, 0.0]}),
        ),
        entry(
            "cat-map",
            "the cat map [[2,1],[1,1]] on T^2",
            vec![],
            "2D hyperbolic",
            json!({"name": "cat-map"}),
        ),
        entry(
            "anosov-3d",
            "hyperbolic automorphism of T^3 with three real eigenvalues",
            vec![],
            "anosov-torus",
            json!({"name": "anosov-3d"}),
        ),
        entry(
            "perturbed-cat",
            "cat map plus a small sine perturbation; not autonomous",
            vec![],
            "none (fails autonomy)",
            json!({"name": "perturbed-cat"}),
        ),
        entry(
            "heis",
            "lattice automorphism of the Heisenberg nilmanifold",
            vec![
                param("b", "4 integers", None, "hyperbolic matrix acting on the abelianization"),
                param("k", "positive integer", Some(json!(1)), "lattice index"),
            ],
            "algebraic (heis3)",
            json!({"name": "heis", "b": [2, 1, 1, 1], "k": 1}),
        ),
        entry(
            "sol",
            "time-one translation on a Sol manifold",
            vec![param("monodromy", "4 integers", None, "hyperbolic SL(2,Z) monodromy")],
            "algebraic (sol)",
            json!({"name": "sol", "monodromy": [2, 1, 1, 1]}),
        ),
        entry(
            "suspension",
            "base map on the mapping torus of a hyperbolic toral automorphism",
            vec![
                param("base", "4 integers", Some(json!(cat_entries())), "gluing matrix"),
                param("power", "integer", Some(json!(1)), "power of the base map"),
                param("shift", "2 reals", Some(json!([0.0, 0.0])), "translation commuting with the gluing"),
                param("warp", "real", Some(json!(DEFAULT_SUSPENSION_WARP)), "framing warp along the circle"),
            ],
            "suspension",
            json!({"name": "suspension", "base": [2, 1, 1, 1]}),
        ),
        entry(
            "circle-extension",
            "skew product (x, θ) -> (A x, θ + r(x)) on T^2 x S^1",
            vec![
                param("base", "4 integers", Some(json!(cat_entries())), "hyperbolic base matrix"),
                param(
                    "rho",
                    "Fourier sum {constant, terms: [{kx, ky, cos, sin}]}",
                    Some(serde_json::to_value(default_rho()).expect("serializable")),
                    "fiber phase r in turns",
                ),
                param("base_framing", "canonical | eigen", Some(json!("canonical")), "horizontal lift basis"),
            ],
            "none for non-constant rho (framing only continuous); algebraic (abelian) for constant rho",
            json!({"name": "circle-extension", "rho": {"terms": [{"kx": 1, "ky": 0, "sin": 0.2}]}}),
        ),
        entry(
            "parabolic-twist",
            "(x, y) -> (x + k y + eps sin 2πy, y) on T^2",
            vec![
                param("k", "integer", None, "covering degree"),
                param("eps", "real", Some(json!(0.0)), "nonlinear part; |k| > 2π|eps|"),
            ],
            "2D parabolic",
            json!({"name": "parabolic-twist", "k": 2, "eps": 0.1}),
        ),
    ]
}

/// Writes plot-ready CSV for one analysis of a report into `out_dir`.
/// `report_dir` is where the report's artifacts live.
pub fn export_plot_data(
    report: &ExperimentReport,
    report_dir: &Path,
    analysis: Analysis,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let rec = report
        .record(analysis)
        .ok_or_else(|| Error::NotInReport(analysis.name().to_string()))?;
    let result = rec
        .result
        .as_ref()
        .ok_or_else(|| Error::NotInReport(format!("{} has no result", analysis.name())))?;
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(format!("{}.csv", analysis.name()));
    match result {
        AnalysisResult::Splitting(_) => {
            let art = report
                .artifacts
                .iter()
                .find(|a| a.analysis == analysis && a.path.ends_with(".bin"))
                .ok_or_else(|| Error::NotInReport("splitting field artifact".into()))?;
            GridLineField::read_binary(&report_dir.join(&art.path))?.write_csv_slice(&path, usize::MAX)?;
        }
        AnalysisResult::RotationProfile(r) => {
            let mut w = BufWriter::new(fs::File::create(&path)?);
            writeln!(w, "z,alpha")?;
            for (z, a) in r.z.iter().zip(&r.alpha) {
                writeln!(w, "{z},{a}")?;
            }
            w.flush()?;
        }
        AnalysisResult::Lyapunov(r) => {
            write_history_csv(&path, r.history.iter().map(|(i, row)| (*i, row.as_slice())))?;
        }
        AnalysisResult::Regularity(r) => {
            let mut w = BufWriter::new(fs::File::create(&path)?);
            writeln!(w, "delta,osc_x,osc_y")?;
            for (a, b) in r.x.scales.iter().zip(&r.y.scales) {
                writeln!(w, "{},{},{}", a.0, a.1, b.1)?;
            }
            w.flush()?;
        }
        AnalysisResult::Autonomy(a) => {
            let mut w = BufWriter::new(fs::File::create(&path)?);
            writeln!(w, "row,col,value")?;
            for (i, row) in a.report.m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    writeln!(w, "{i},{j},{v}")?;
                }
            }
            w.flush()?;
        }
        AnalysisResult::Classify(_) => {
            return Err(Error::NotInReport("classify has no plot data".into()));
        }
    }
    Ok(vec![path])
}

/// One check performed by [`verify`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
    pub passed: bool,
}

/// Re-checks a stored report: artifact presence and sizes, and for stored
/// grid fields finiteness and invariance under the rebuilt system.
pub fn verify(report_path: &Path) -> Result<VerifyReport> {
    let report_path = if report_path.is_dir() {
        report_path.join(REPORT_FILE)
    } else {
        report_path.to_path_buf()
    };
    let report = ExperimentReport::load(&report_path)?;
    let dir = report_path.parent().unwrap_or(Path::new("."));
    let mut checks = Vec::new();
    let mut check = |name: String, passed: bool, detail: String| checks.push(VerifyCheck { name, passed, detail });
    for art in &report.artifacts {
        let path = dir.join(&art.path);
        match fs::metadata(&path) {
            Ok(m) => check(
                format!("size {}", art.path),
                m.len() == art.bytes,
                format!("recorded {} bytes, found {}", art.bytes, m.len()),
            ),
            Err(e) => check(format!("exists {}", art.path), false, e.to_string()),
        }
        if art.path.ends_with(".bin") {
            let field = match GridLineField::read_binary(&path) {
                Ok(f) => f,
                Err(e) => {
                    check(format!("read {}", art.path), false, e.to_string());
                    continue;
                }
            };
            check(format!("finite {}", art.path), field.all_finite(), format!("{} values", field.len()));
            let sys = report.config.system.build()?;
            let transform = crate::splitting::GraphTransform::new(
                &sys,
                (field.nx, field.ny, field.nth),
                crate::splitting::Direction::Unstable,
            )?;
            let residual = transform.invariance_residual(&field)?;
            let bound = 10.0 * report.config.tolerances.cone;
            check(
                format!("invariance {}", art.path),
                residual <= bound,
                format!("residual {residual:e}, bound {bound:e}"),
            );
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: &str) -> ExperimentConfig {
        match ConfigFile::from_json(json).unwrap() {
            ConfigFile::Single(c) => c,
            ConfigFile::Batch { .. } => panic!("expected single"),
        }
    }

    fn result(report: &ExperimentReport, a: Analysis) -> &AnalysisResult {
        report.record(a).unwrap().result.as_ref().unwrap()
    }

    #[test]
    fn cat_map_pipeline() {
        let c = cfg(r#"{"system": {"name": "cat-map"}, "analyses": ["autonomy", "classify"], "seed": 3}"#);
        let r = run(&c, false).unwrap();
        assert!(r.passed);
        let AnalysisResult::Autonomy(a) = result(&r, Analysis::Autonomy) else { panic!() };
        assert_eq!(a.report.m, vec![vec![2.0, 1.0], vec![1.0, 1.0]]);
        let AnalysisResult::Classify(k) = result(&r, Analysis::Classify) else { panic!() };
        assert_eq!(k.matrix_class, Some(MatrixClass2D::Hyperbolic));
        assert_eq!(r.exit_code(), exit::PASS);
    }

    #[test]
    fn heis_pipeline() {
        let mut c = cfg(
            r#"{"system": {"name": "heis", "b": [2, 1, 1, 1], "k": 1},
                "analyses": ["autonomy", "classify", "lyapunov"], "seed": 1}"#,
        );
        c.settings.autonomy_samples = 500;
        c.settings.lyapunov_iterations = 300;
        let r = run(&c, false).unwrap();
        assert!(r.passed, "{}", r.to_json().unwrap());
        let AnalysisResult::Classify(k) = result(&r, Analysis::Classify) else { panic!() };
        assert_eq!(
            k.branch,
            Some(Branch3D::Algebraic {
                group: AlgebraClass::Heis3
            })
        );
        let AnalysisResult::Lyapunov(l) = result(&r, Analysis::Lyapunov) else { panic!() };
        let e = &l.spectrum.exponents;
        assert!((e[0] - 0.9624).abs() < 1e-3 && e[1].abs() < 1e-3 && (e[2] + 0.9624).abs() < 1e-3);
    }

    #[test]
    fn gating_on_failed_autonomy() {
        let mut c = cfg(r#"{"system": {"name": "perturbed-cat"}, "analyses": ["autonomy", "classify"]}"#);
        c.settings.autonomy_samples = 200;
        let r = run(&c, false).unwrap();
        assert!(!r.passed);
        assert_eq!(r.record(Analysis::Autonomy).unwrap().status, Status::Failed);
        let cl = r.record(Analysis::Classify).unwrap();
        assert_eq!(cl.status, Status::Skipped);
        assert!(cl.gate.as_ref().unwrap().contains("autonomy failed"));
        assert_eq!(r.exit_code(), exit::ANALYSIS_FAILED);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            ConfigFile::from_json(r#"{"system": {"name": "klein-bottle"}, "analyses": ["autonomy"]}"#),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ConfigFile::from_json(r#"{"system": {"name": "cat-map"}, "analyses": ["dance"]}"#),
            Err(Error::Config(_))
        ));
        let c = cfg(r#"{"system": {"name": "cat-map"}, "analyses": []}"#);
        assert!(matches!(run(&c, false), Err(Error::Config(_))));
        let c = cfg(r#"{"system": {"name": "heis", "b": [1, 0, 0, 1]}, "analyses": ["autonomy"]}"#);
        assert!(matches!(run(&c, false), Err(Error::Config(_))));
        assert_eq!(Analysis::parse("rotation-profile").unwrap(), Analysis::RotationProfile);
    }

    #[test]
    fn wrong_system_for_analysis_is_recorded() {
        let c = cfg(r#"{"system": {"name": "cat-map"}, "analyses": ["splitting"]}"#);
        let r = run(&c, false).unwrap();
        let rec = r.record(Analysis::Splitting).unwrap();
        assert_eq!(rec.status, Status::Failed);
        assert!(rec.error.as_ref().unwrap().contains("circle extension"));
    }

    #[test]
    fn splitting_and_regularity_with_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(r#"{"system": {"name": "circle-extension"}, "analyses": ["splitting", "regularity"]}"#);
        c.settings.grid = [64, 64, 4];
        c.settings.regularity_grid = [256, 256, 2];
        c.output_dir = Some(dir.path().to_path_buf());
        let r = run(&c, true).unwrap();
        assert!(r.passed, "{}", r.to_json().unwrap());
        let AnalysisResult::Splitting(s) = result(&r, Analysis::Splitting) else { panic!() };
        assert!((s.cone.contraction_estimate.unwrap() - 0.382).abs() < 0.02);
        let AnalysisResult::Regularity(g) = result(&r, Analysis::Regularity) else { panic!() };
        assert!(g.exponent < 0.95 && !g.c1_compatible);
        r.write(dir.path()).unwrap();
        let v = verify(dir.path()).unwrap();
        assert!(v.passed, "{v:?}");
        let out = dir.path().join("plots");
        let files = export_plot_data(&r, dir.path(), Analysis::Splitting, &out).unwrap();
        let text = fs::read_to_string(&files[0]).unwrap();
        assert!(text.starts_with("x,y,theta,slope\n"));
        assert_eq!(text.lines().count(), 1 + 64 * 64);
        assert!(matches!(
            export_plot_data(&r, dir.path(), Analysis::Lyapunov, &out),
            Err(Error::NotInReport(_))
        ));
        // Tampering is caught.
        fs::write(dir.path().join("splitting_slice.csv"), "x").unwrap();
        assert!(!verify(dir.path()).unwrap().passed);
    }

    #[test]
    fn rotation_profile_analysis() {
        let c = cfg(r#"{"system": {"name": "parabolic-twist", "k": 3, "eps": 0.1}, "analyses": ["rotation-profile"]}"#);
        let r = run(&c, false).unwrap();
        assert!(r.passed);
        let AnalysisResult::RotationProfile(p) = result(&r, Analysis::RotationProfile) else { panic!() };
        assert_eq!(p.degree_k, 3);
        assert!(p.linearization.as_ref().unwrap().sup_distance < 1e-4);
        let flat = cfg(
            r#"{"system": {"name": "toral-affine", "matrix": [[1, 0], [0, 1]], "translation": [0.3, 0.0]},
                "analyses": ["rotation-profile"]}"#,
        );
        let r = run(&flat, false).unwrap();
        let AnalysisResult::RotationProfile(p) = result(&r, Analysis::RotationProfile) else { panic!() };
        assert_eq!(p.degree_k, 0);
        assert!(p.note.is_some());
    }

    #[test]
    fn normalized_reports_are_deterministic() {
        let mut c = cfg(
            r#"{"system": {"name": "sol", "monodromy": [2, 1, 1, 1]},
                "analyses": ["autonomy", "classify", "lyapunov"], "seed": 11}"#,
        );
        c.settings.autonomy_samples = 300;
        c.settings.lyapunov_iterations = 200;
        let a = run(&c, false).unwrap().to_normalized_json().unwrap();
        let b = run(&c, false).unwrap().to_normalized_json().unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("timings_ms"));
        let back: ExperimentReport = serde_json::from_str(&a).unwrap();
        assert_eq!(back.to_json().unwrap(), a);
    }

    #[test]
    fn batch_configs() {
        let f = ConfigFile::from_json(
            r#"{"experiments": [
                {"system": {"name": "cat-map"}, "analyses": ["autonomy"]},
                {"system": {"name": "anosov-3d"}, "analyses": ["autonomy", "classify"]}]}"#,
        )
        .unwrap();
        let mut exps = f.experiments();
        for e in &mut exps {
            e.settings.autonomy_samples = 200;
        }
        let b = run_batch(&exps, None, false).unwrap();
        assert!(b.passed);
        let AnalysisResult::Classify(k) = result(&b.reports[1], Analysis::Classify) else { panic!() };
        assert_eq!(k.branch, Some(Branch3D::AnosovTorus));
    }

    #[test]
    fn catalog() {
        let cat = list_systems();
        for name in ["toral-affine", "heis", "sol", "suspension", "circle-extension"] {
            assert!(cat.iter().any(|e| e.name == name), "{name}");
        }
        assert!(cat.iter().all(|e| !e.branch.is_empty()));
        let heis = cat.iter().find(|e| e.name == "heis").unwrap();
        let names: Vec<&str> = heis.parameters.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["b", "k"]);
        assert_eq!(heis.parameters[0].kind, "4 integers");
        // Every example parses and builds.
        for e in &cat {
            let spec: SystemSpec = serde_json::from_value(e.example.clone()).unwrap();
            assert_eq!(spec.name(), e.name);
            spec.build().unwrap();
        }
    }
}
