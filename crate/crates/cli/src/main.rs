//! Command line front end for activated-simplex models: generate datasets,
//! train, prune, project, classify, fit per-simplex densities, synthesize,
//! lift 2-d observations to 3-d, and emit the plot tables.
//!
//! Reported errors are mean Euclidean (unsquared) distances; the objective
//! trace stored inside model files is the squared training surrogate.
//!
//! Exit codes: 0 on success, 1 on data errors, 2 on usage errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::{Array1, Array2};
use serde_json::{Map, Value};

use asx_core::apps::{self, CameraMatrix, ClassModel};
use asx_core::learn::{self, TrainConfig, TrainOutcome};
use asx_core::model::{DataSet, SimplicialModel};
use asx_core::simplices::{self, PruneConfig};
use asx_core::synth::{self, Shape};
use asx_core::{geometry, io, project_onto_model, Error, Result, SolverConfig};

#[derive(Parser)]
#[command(name = "asx", version, about = "Learn and use mixtures of activated simplices")]
struct Cli {
    /// Worker thread cap (env ASX_THREADS is the fallback; default all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Omit the creation timestamp from written model files.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic dataset and emit it as CSV.
    Gen(GenArgs),
    /// Learn bases and activated simplices from a CSV dataset.
    Train(TrainArgs),
    /// Greedily select a subset of a model's simplices against data.
    Prune(PruneArgs),
    /// Project data onto a model and report per-point simplex and error.
    Project(ProjectArgs),
    /// Label points by the class model that reconstructs them best.
    Classify(ClassifyArgs),
    /// Fit a Dirichlet density on each simplex from data activations.
    FitDirichlet(FitDirichletArgs),
    /// Sample new points from a model with fitted densities.
    Synthesize(SynthesizeArgs),
    /// Recover 3-d poses from 2-d observations through a pose model.
    PoseEstimate(PoseEstimateArgs),
    /// List the boundary faces of a model's maximal simplices.
    Boundary(BoundaryArgs),
    /// Train over a grid of basis counts and radii; emit the error table.
    Eval(EvalArgs),
    /// Emit the greedy pruning trajectory as an error-vs-count table.
    PruneCurve(PruneCurveArgs),
}

/// How rows are mapped onto the unit sphere before touching a model.
#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Norm {
    /// Scale each row to unit length.
    Unit,
    /// Subtract the sample mean, then scale each row to unit length.
    CenterUnit,
    /// Stereographic lift into one dimension up.
    Stereographic,
}

#[derive(Args)]
struct DataOpts {
    /// Treat the last CSV column as a text label.
    #[arg(long)]
    labels: bool,
    /// Stack consecutive rows into snippet vectors before normalization
    /// (bare flag means 10). Rows must be ordered by sequence; a snippet
    /// keeps the label of its first row.
    #[arg(long, num_args = 0..=1, default_missing_value = "10", value_name = "ROWS")]
    window: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    /// One of: circle, torus, hemisphere, swissroll-plane, ribbon-circle.
    #[arg(long, value_parser = parse_shape)]
    shape: Shape,
    #[arg(long)]
    count: usize,
    /// Isotropic Gaussian jitter added to every coordinate.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Input CSV, one point per row.
    input: PathBuf,
    /// Output model path; with --labels, a directory receiving one
    /// <label>.asx model per class.
    output: PathBuf,
    #[arg(long, default_value_t = 8)]
    bases: usize,
    /// Coefficient mass in (0, 1]; below 1 pushes points onto facets.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    /// Points per statistics flush; >= N trains full batch.
    #[arg(long, default_value_t = 1)]
    batch: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative objective change that stops training early.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Down-weight old coefficient statistics at each online step.
    #[arg(long)]
    forget: bool,
    #[arg(long, value_enum, default_value_t = Norm::CenterUnit)]
    norm: Norm,
    #[command(flatten)]
    data: DataOpts,
}

#[derive(Args)]
struct PruneArgs {
    /// Trained model to prune.
    model: PathBuf,
    /// Output model path.
    output: PathBuf,
    /// CSV whose points the selection is scored on.
    #[arg(long)]
    data: PathBuf,
    /// Penalty per kept simplex; default 0.001 / candidate count.
    #[arg(long)]
    lambda1: Option<f64>,
    /// Penalty per kept dimension; default 0.01 / candidate count.
    #[arg(long)]
    lambda2: Option<f64>,
    #[command(flatten)]
    opts: DataOpts,
}

#[derive(Args)]
struct ProjectArgs {
    model: PathBuf,
    /// CSV of query points.
    input: PathBuf,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    opts: DataOpts,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Directory of per-class models (<label>.asx).
    models: PathBuf,
    /// CSV of query points; with --labels the output gains an `actual`
    /// column and accuracy is logged.
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    opts: DataOpts,
}

#[derive(Args)]
struct FitDirichletArgs {
    model: PathBuf,
    /// Output model path.
    output: PathBuf,
    /// CSV whose activations the densities are fitted on.
    #[arg(long)]
    data: PathBuf,
    /// Simplices activated fewer times than this keep a flat density.
    #[arg(long, default_value_t = 5)]
    min_samples: usize,
    #[command(flatten)]
    opts: DataOpts,
}

#[derive(Args)]
struct SynthesizeArgs {
    model: PathBuf,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Map samples back to the original frame through the stored
    /// normalization (mean and scale, or the inverse stereographic map).
    #[arg(long)]
    denormalize: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PoseEstimateArgs {
    /// Model over flattened 3-d poses (x1,y1,z1,x2,...).
    model: PathBuf,
    /// CSV of 2-d observations, one row per frame (u1,v1,u2,...).
    input: PathBuf,
    /// Weak-perspective camera, row major: m11,m12,m13,m21,m22,m23.
    #[arg(long, allow_hyphen_values = true)]
    camera: String,
    /// Map recovered poses back to the original frame.
    #[arg(long)]
    denormalize: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundaryArgs {
    model: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// CSV dataset the sweep retrains on.
    input: PathBuf,
    /// Basis counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    bases: Vec<usize>,
    /// Radii, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 1)]
    batch: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Norm::CenterUnit)]
    norm: Norm,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    opts: DataOpts,
}

#[derive(Args)]
struct PruneCurveArgs {
    model: PathBuf,
    /// CSV whose points the selection is scored on.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    opts: DataOpts,
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    configure_threads(cli.threads)?;
    let no_timestamp = cli.no_timestamp;
    match cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Train(a) => run_train(a, no_timestamp),
        Command::Prune(a) => run_prune(a),
        Command::Project(a) => run_project(a),
        Command::Classify(a) => run_classify(a),
        Command::FitDirichlet(a) => run_fit_dirichlet(a),
        Command::Synthesize(a) => run_synthesize(a),
        Command::PoseEstimate(a) => run_pose_estimate(a),
        Command::Boundary(a) => run_boundary(a),
        Command::Eval(a) => run_eval(a),
        Command::PruneCurve(a) => run_prune_curve(a),
    }
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("ASX_THREADS") {
            Ok(v) => Some(v.parse::<usize>().map_err(|_| {
                Error::Config(format!("ASX_THREADS={v} is not a thread count"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::Config("thread count must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn parse_shape(s: &str) -> std::result::Result<Shape, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn run_gen(a: GenArgs) -> Result<()> {
    let points = synth::generate(a.shape, a.count, a.noise, a.seed)?;
    let w = open_out(a.out.as_deref())?;
    io::write_csv_to(w, &points, None).map_err(|e| out_error(a.out.as_deref(), e))
}

fn run_train(a: TrainArgs, no_timestamp: bool) -> Result<()> {
    let prepared = load_points(&a.input, &a.data)?;
    let mut cfg = TrainConfig::new(a.bases);
    cfg.radius = a.radius;
    cfg.epochs = a.epochs;
    cfg.batch_size = a.batch;
    cfg.seed = a.seed;
    cfg.tol_rel_objective = a.tol;
    cfg.forget = a.forget;

    if a.data.labels {
        let labels = prepared
            .labels
            .clone()
            .expect("--labels parsed a label column");
        // One model per class, but normalization parameters come from the
        // whole file so every class model lives in the same frame.
        let data = normalize_points(&prepared.points, a.norm)?;
        let meta = train_meta(data.meta(), &cfg, no_timestamp);
        let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, label) in labels.iter().enumerate() {
            groups.entry(label).or_default().push(i);
        }
        std::fs::create_dir_all(&a.output).map_err(|source| Error::Io {
            path: a.output.clone(),
            source,
        })?;
        for (label, rows) in groups {
            let subset = DataSet::new(select_rows(data.points(), &rows), None)?;
            let outcome = learn::train(&subset, &cfg)?;
            let model = build_model(outcome, meta.clone())?;
            let path = a.output.join(label_file(label)?);
            model.save(&path)?;
            log::info!(
                "class {label}: {} points, {} simplices -> {}",
                rows.len(),
                model.simplices().len(),
                path.display()
            );
        }
    } else {
        let data = normalize_points(&prepared.points, a.norm)?;
        let meta = train_meta(data.meta(), &cfg, no_timestamp);
        let outcome = learn::train(&data, &cfg)?;
        let model = build_model(outcome, meta)?;
        model.save(&a.output)?;
        log::info!(
            "{} simplices, final objective {:?} -> {}",
            model.simplices().len(),
            model.training_stats().last(),
            a.output.display()
        );
    }
    Ok(())
}

fn run_prune(a: PruneArgs) -> Result<()> {
    let model = SimplicialModel::load(&a.model)?;
    let prepared = load_points(&a.data, &a.opts)?;
    let data = normalize_for(&model, &prepared.points)?;
    let cfg = PruneConfig {
        lambda1: a.lambda1,
        lambda2: a.lambda2,
        solver: SolverConfig::default(),
    };
    let pruned = simplices::prune(model.simplices(), &data, model.basis_set(), &cfg)?;
    // The selection step starts from a bare model; carry the provenance
    // (normalization, seed, trace) of the model it came from.
    let merged = SimplicialModel::new(
        pruned.basis_set().clone(),
        pruned.simplices().to_vec(),
        true,
        model.training_stats().to_vec(),
        model.meta().clone(),
    )?;
    merged.save(&a.output)?;
    log::info!(
        "kept {} of {} simplices -> {}",
        merged.simplices().len(),
        model.simplices().len(),
        a.output.display()
    );
    Ok(())
}

fn run_project(a: ProjectArgs) -> Result<()> {
    let model = SimplicialModel::load(&a.model)?;
    let prepared = load_points(&a.input, &a.opts)?;
    let data = normalize_for(&model, &prepared.points)?;
    let cfg = SolverConfig::default();
    let mut rows = Vec::with_capacity(data.n());
    let mut err_sum = 0.0;
    for i in 0..data.n() {
        let (t, _, err) = project_onto_model(data.row(i), &model, &cfg)?;
        err_sum += err;
        rows.push(vec![
            i.to_string(),
            t.to_string(),
            model.simplex(t).dimension().to_string(),
            fmt(err),
        ]);
    }
    log::info!("mean projection error {}", err_sum / data.n() as f64);
    write_table(a.out.as_deref(), &["index", "simplex", "dim", "error"], rows)
}

fn run_classify(a: ClassifyArgs) -> Result<()> {
    let classes = load_class_dir(&a.models)?;
    let shared_meta = consistent_meta(&classes)?;
    let class_model = ClassModel::new(classes)?;
    let prepared = load_points(&a.input, &a.opts)?;
    let data = normalize_like(&shared_meta, &prepared.points)?;
    check_dim(class_model.dim(), data.dim())?;

    let cfg = SolverConfig::default();
    let mut header = vec!["index".to_string(), "predicted".to_string()];
    if prepared.labels.is_some() {
        header.push("actual".to_string());
    }
    for label in class_model.classes().keys() {
        header.push(format!("err_{label}"));
    }

    let mut rows = Vec::with_capacity(data.n());
    let mut hits = 0usize;
    for i in 0..data.n() {
        let (predicted, errors) = class_model.classify(data.row(i), &cfg)?;
        let mut row = vec![i.to_string(), predicted.clone()];
        if let Some(labels) = &prepared.labels {
            if labels[i] == predicted {
                hits += 1;
            }
            row.push(labels[i].clone());
        }
        row.extend(errors.values().map(|e| fmt(*e)));
        rows.push(row);
    }
    if prepared.labels.is_some() {
        log::info!(
            "accuracy {hits}/{} = {}",
            data.n(),
            hits as f64 / data.n() as f64
        );
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(a.out.as_deref(), &header_refs, rows)
}

fn run_fit_dirichlet(a: FitDirichletArgs) -> Result<()> {
    let mut model = SimplicialModel::load(&a.model)?;
    let prepared = load_points(&a.data, &a.opts)?;
    let data = normalize_for(&model, &prepared.points)?;
    let cfg = SolverConfig::default();

    let mut samples: Vec<Vec<f64>> = vec![Vec::new(); model.simplices().len()];
    for i in 0..data.n() {
        let (t, coeffs, _) = project_onto_model(data.row(i), &model, &cfg)?;
        let total: f64 = coeffs.values().sum();
        samples[t].extend(coeffs.values().iter().map(|v| v / total));
    }
    for t in 0..model.simplices().len() {
        let k = model.simplex(t).vertices().len();
        let m = samples[t].len() / k;
        let rows = Array2::from_shape_vec((m, k), std::mem::take(&mut samples[t]))
            .expect("activation rows have simplex width");
        let params = apps::fit_dirichlet(&rows, a.min_samples)?;
        model.set_dirichlet(t, params)?;
    }
    model.save(&a.output)?;
    Ok(())
}

fn run_synthesize(a: SynthesizeArgs) -> Result<()> {
    let model = SimplicialModel::load(&a.model)?;
    let mut points = apps::synthesize(&model, a.count, a.seed)?;
    if a.denormalize {
        points = denormalize(points, model.meta())?;
    }
    let w = open_out(a.out.as_deref())?;
    io::write_csv_to(w, &points, None).map_err(|e| out_error(a.out.as_deref(), e))
}

fn run_pose_estimate(a: PoseEstimateArgs) -> Result<()> {
    let model = SimplicialModel::load(&a.model)?;
    let camera = parse_camera(&a.camera)?;
    // Observations live in image space already; no normalization.
    let obs = io::read_csv(&a.input, false)?;
    let cfg = SolverConfig::default();

    let d = model.basis_set().dim();
    let mut poses = Array2::zeros((obs.n(), d));
    let mut picked = Vec::with_capacity(obs.n());
    for i in 0..obs.n() {
        let est = apps::estimate_pose(&model, &camera, obs.row(i), &cfg)?;
        poses.row_mut(i).assign(est.pose.values());
        picked.push((est.simplex, est.residual));
    }
    if a.denormalize {
        poses = denormalize(poses, model.meta())?;
    }

    let mut header = vec!["index".to_string(), "simplex".to_string(), "residual".to_string()];
    header.extend((0..poses.ncols()).map(|j| format!("p{j}")));
    let rows = picked
        .into_iter()
        .enumerate()
        .map(|(i, (t, residual))| {
            let mut row = vec![i.to_string(), t.to_string(), fmt(residual)];
            row.extend(poses.row(i).iter().map(|v| fmt(*v)));
            row
        })
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(a.out.as_deref(), &header_refs, rows)
}

fn run_boundary(a: BoundaryArgs) -> Result<()> {
    let model = SimplicialModel::load(&a.model)?;
    let mut faces = simplices::boundary_simplices(&model);
    faces.sort();
    let rows = faces
        .iter()
        .enumerate()
        .flat_map(|(f, verts)| {
            verts
                .iter()
                .map(move |v| vec![f.to_string(), v.to_string()])
        })
        .collect();
    write_table(a.out.as_deref(), &["face", "vertex"], rows)
}

fn run_eval(a: EvalArgs) -> Result<()> {
    let prepared = load_points(&a.input, &a.opts)?;
    let data = normalize_points(&prepared.points, a.norm)?;
    let mut rows = Vec::new();
    for &p in &a.bases {
        for &r in &a.radii {
            let mut cfg = TrainConfig::new(p);
            cfg.radius = r;
            cfg.epochs = a.epochs;
            cfg.batch_size = a.batch;
            cfg.seed = a.seed;
            let outcome = learn::train(&data, &cfg)?;
            let mut err_sum = 0.0;
            for (i, coeffs) in outcome.activations.iter().enumerate() {
                let resid = &outcome.basis_set.bases().dot(coeffs.values()) - &data.row(i);
                err_sum += resid.dot(&resid).sqrt();
            }
            let extracted = simplices::extract_simplices(&outcome.activations)?;
            let dim_sum: usize = extracted.iter().map(|s| s.dimension()).sum();
            rows.push(vec![
                p.to_string(),
                fmt(r),
                fmt(err_sum / data.n() as f64),
                extracted.len().to_string(),
                fmt(dim_sum as f64 / extracted.len() as f64),
            ]);
        }
    }
    write_table(
        a.out.as_deref(),
        &["p", "r", "meanError", "simplexCount", "meanDim"],
        rows,
    )
}

fn run_prune_curve(a: PruneCurveArgs) -> Result<()> {
    let model = SimplicialModel::load(&a.model)?;
    let prepared = load_points(&a.data, &a.opts)?;
    let data = normalize_for(&model, &prepared.points)?;
    let cfg = PruneConfig {
        lambda1: a.lambda1,
        lambda2: a.lambda2,
        solver: SolverConfig::default(),
    };
    let (_, trace) =
        simplices::prune_with_trace(model.simplices(), &data, model.basis_set(), &cfg)?;
    let rows = trace
        .iter()
        .map(|s| {
            vec![
                s.selected_count.to_string(),
                s.candidate.to_string(),
                fmt(s.loss),
                fmt(s.objective),
            ]
        })
        .collect();
    write_table(
        a.out.as_deref(),
        &["step", "candidate", "loss", "objective"],
        rows,
    )
}

/// Rows read from disk plus their labels, after optional snippet stacking.
struct Prepared {
    points: Array2<f64>,
    labels: Option<Vec<String>>,
}

fn load_points(path: &Path, opts: &DataOpts) -> Result<Prepared> {
    let data = io::read_csv(path, opts.labels)?;
    let mut points = data.points().clone();
    let mut labels = data.labels().map(<[String]>::to_vec);
    if let Some(w) = opts.window {
        points = apps::stack_snippets(&points, w)?;
        labels = labels.map(|ls| ls[..points.nrows()].to_vec());
    }
    Ok(Prepared { points, labels })
}

fn normalize_points(points: &Array2<f64>, norm: Norm) -> Result<DataSet> {
    match norm {
        Norm::Unit => geometry::normalize(points),
        Norm::CenterUnit => geometry::center_normalize(points).map(|(d, _)| d),
        Norm::Stereographic => geometry::stereographic_lift(points),
    }
}

/// Re-apply the normalization a model was trained under to fresh points.
fn normalize_like(meta: &Map<String, Value>, points: &Array2<f64>) -> Result<DataSet> {
    match meta.get("norm").and_then(Value::as_str) {
        Some("center-unit") => {
            let mean = meta_mean(meta)?;
            if mean.len() != points.ncols() {
                return Err(Error::Validation(format!(
                    "data has {} columns but the model was trained on {}",
                    points.ncols(),
                    mean.len()
                )));
            }
            geometry::normalize(&(points - &mean))
        }
        Some("stereographic") => geometry::stereographic_lift(points),
        Some("unit") | None => geometry::normalize(points),
        Some(other) => Err(Error::Validation(format!(
            "model meta names unknown normalization '{other}'"
        ))),
    }
}

fn normalize_for(model: &SimplicialModel, points: &Array2<f64>) -> Result<DataSet> {
    let data = normalize_like(model.meta(), points)?;
    check_dim(model.basis_set().dim(), data.dim())?;
    Ok(data)
}

fn check_dim(model_dim: usize, data_dim: usize) -> Result<()> {
    if model_dim != data_dim {
        return Err(Error::Validation(format!(
            "normalized data dimension {data_dim} does not match model dimension {model_dim}"
        )));
    }
    Ok(())
}

/// Undo the stored normalization: scale and shift for centered data, the
/// inverse stereographic map for lifted data. Plain unit scaling loses the
/// per-row norms, so those points come back unchanged.
fn denormalize(points: Array2<f64>, meta: &Map<String, Value>) -> Result<Array2<f64>> {
    match meta.get("norm").and_then(Value::as_str) {
        Some("center-unit") => {
            let mean = meta_mean(meta)?;
            let scale = meta
                .get("scale")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Validation("model meta lacks the training scale".into()))?;
            Ok(points.mapv(|v| v * scale) + &mean)
        }
        Some("stereographic") => geometry::stereographic_drop(&points),
        _ => {
            log::warn!("model records no invertible normalization; emitting model-space points");
            Ok(points)
        }
    }
}

fn meta_mean(meta: &Map<String, Value>) -> Result<Array1<f64>> {
    let arr = meta
        .get("mean")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Validation("model meta lacks the training mean".into()))?;
    let vals: Option<Vec<f64>> = arr.iter().map(Value::as_f64).collect();
    vals.map(Array1::from)
        .ok_or_else(|| Error::Validation("model meta mean is not numeric".into()))
}

fn train_meta(
    data_meta: &Map<String, Value>,
    cfg: &TrainConfig,
    no_timestamp: bool,
) -> Map<String, Value> {
    let mut meta = data_meta.clone();
    meta.insert("rng".into(), Value::String("chacha20".into()));
    meta.insert("seed".into(), Value::from(cfg.seed));
    if !no_timestamp {
        meta.insert("created_unix".into(), Value::from(unix_now()));
    }
    meta
}

fn build_model(outcome: TrainOutcome, meta: Map<String, Value>) -> Result<SimplicialModel> {
    let simplices = simplices::extract_simplices(&outcome.activations)?;
    SimplicialModel::new(
        outcome.basis_set,
        simplices,
        false,
        outcome.objective_trace,
        meta,
    )
}

fn select_rows(points: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((rows.len(), points.ncols()));
    for (k, &i) in rows.iter().enumerate() {
        out.row_mut(k).assign(&points.row(i));
    }
    out
}

fn label_file(label: &str) -> Result<String> {
    let bad = label.is_empty()
        || label.starts_with('.')
        || label.chars().any(|c| c == '/' || c == '\\' || c == '\0');
    if bad {
        return Err(Error::Validation(format!(
            "label '{label}' cannot name a model file"
        )));
    }
    Ok(format!("{label}.asx"))
}

fn load_class_dir(dir: &Path) -> Result<BTreeMap<String, SimplicialModel>> {
    let entries = std::fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "asx"))
        .collect();
    paths.sort();
    let mut out = BTreeMap::new();
    for p in paths {
        let label = p
            .file_stem()
            .expect("filtered on extension")
            .to_string_lossy()
            .into_owned();
        out.insert(label, SimplicialModel::load(&p)?);
    }
    if out.is_empty() {
        return Err(Error::Validation(format!(
            "no .asx models in {}",
            dir.display()
        )));
    }
    Ok(out)
}

/// All class models must agree on how their training data was normalized;
/// returns the shared meta so queries can be mapped the same way.
fn consistent_meta(classes: &BTreeMap<String, SimplicialModel>) -> Result<Map<String, Value>> {
    let mut norms: Vec<Option<&str>> = classes
        .values()
        .map(|m| m.meta().get("norm").and_then(Value::as_str))
        .collect();
    norms.dedup();
    if norms.len() > 1 {
        return Err(Error::Validation(
            "class models disagree on normalization".into(),
        ));
    }
    Ok(classes.values().next().expect("nonempty map").meta().clone())
}

fn parse_camera(s: &str) -> Result<CameraMatrix> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("camera entry '{t}' is not a number")))
        })
        .collect::<Result<_>>()?;
    if vals.len() != 6 {
        return Err(Error::Config(
            "camera needs 6 entries: m11,m12,m13,m21,m22,m23".into(),
        ));
    }
    CameraMatrix::new(Array2::from_shape_vec((2, 3), vals).expect("2x3 from 6 entries"))
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>> {
    match out {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn out_error(out: Option<&Path>, source: std::io::Error) -> Error {
    Error::Io {
        path: out.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source,
    }
}

fn write_table(out: Option<&Path>, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let w = open_out(out)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(header)
        .and_then(|()| rows.iter().try_for_each(|r| csv.write_record(r)))
        .map_err(|e| out_error(out, std::io::Error::other(e)))?;
    csv.flush().map_err(|e| out_error(out, e))
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
