//! `posevad` command-line front end.
//!
//! Exit status: 0 success, 1 usage error, 2 invalid data or configuration,
//! 3 runtime failure.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{DateTime, SecondsFormat, Utc};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use posevad::annotations::{load_cameras, write_frames_file};
use posevad::metrics::Aggregator;
use posevad::model::{CameraDataset, SplitSet};
use posevad::rearrange::{rearrange, verify, RearrangePlan};
use posevad::runner::protocol::rearrange_seed;
use posevad::runner::report::{
    emit_report, render_csv, render_markdown, render_scores_csv, write_results, write_step_scores,
};
use posevad::runner::{
    generate_shift_scenario, generate_synthetic, run_continual, run_standard, AnomalyKind, CameraResult, Manifest,
    Mode, Outcome, ReportFormat, RunConfig, RunResults, SynthSpec,
};
use posevad::scorer::{knn, ScorerSpec};
use posevad::seed::{derive_seed, sha256_hex};
use posevad::stats::{stats_for_frames, write_max_iou_csv, write_stats_csv, DatasetStats};
use posevad::ErrorKind;

#[derive(Parser)]
#[command(name = "posevad", version, about = "Benchmark harness for pose-based video anomaly detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-camera frame, pose, anomaly and occlusion statistics as CSV.
    Stats(StatsArgs),
    /// Turn a standard split into a continual training stream and a balanced test set.
    Rearrange(RearrangeArgs),
    /// Fit on the training split once, evaluate once on the test split.
    RunStandard(RunStandardArgs),
    /// Pretrain on origin data, then train slice by slice, evaluating after each step.
    RunContinual(RunContinualArgs),
    /// Re-render report tables from a results.json file.
    Report(ReportArgs),
    /// Generate a seeded synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run seed; every module seed is derived from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep only this camera.
    #[arg(long)]
    camera: Option<String>,
}

#[derive(Args, Clone)]
struct Inputs {
    /// Training annotations (JSONL).
    #[arg(long)]
    train: Option<PathBuf>,
    /// Test annotations (JSONL).
    #[arg(long)]
    test: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct PlanArgs {
    /// Number of slices in the training stream.
    #[arg(long)]
    k: Option<usize>,
    /// Test anomalies moved into the training stream (automatic when absent).
    #[arg(long)]
    inject_count: Option<usize>,
    /// Test normals kept in the test set (defaults to the remaining anomaly count).
    #[arg(long)]
    test_normal_count: Option<usize>,
    /// Strict upper bound on the stream's anomalous share.
    #[arg(long)]
    target_ratio: Option<f64>,
    /// Largest allowed |normals - anomalies| / |test|.
    #[arg(long)]
    balance_tolerance: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScorerKind {
    Gaussian,
    Knn,
    Constant,
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long, value_enum)]
    scorer: Option<ScorerKind>,
    /// Neighbors averaged by the knn scorer.
    #[arg(long)]
    k_nn: Option<usize>,
    /// Reservoir size of the knn scorer.
    #[arg(long)]
    capacity: Option<usize>,
    /// Score returned by the constant scorer.
    #[arg(long)]
    constant_value: Option<f64>,
    #[arg(long)]
    window_length: Option<usize>,
    #[arg(long)]
    window_stride: Option<usize>,
    /// Longest track gap filled by interpolation.
    #[arg(long)]
    max_gap: Option<u64>,
    /// Centered smoothing window (odd).
    #[arg(long, conflicts_with = "no_smooth")]
    smooth_window: Option<usize>,
    /// Disable smoothing.
    #[arg(long)]
    no_smooth: bool,
    #[arg(long, value_enum)]
    aggregator: Option<AggregatorArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AggregatorArg {
    Max,
    Mean,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    common: Common,
    /// Annotation files; frames of the same camera are pooled.
    files: Vec<PathBuf>,
}

#[derive(Args)]
struct RearrangeArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    plan: PlanArgs,
}

#[derive(Args)]
struct RunStandardArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct RunContinualArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    inputs: Inputs,
    /// Pretraining annotations from another environment (JSONL).
    #[arg(long)]
    origin: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    plan: PlanArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
    Both,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    common: Common,
    /// results.json written by a run.
    results: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    VelocitySpike,
    Frozen,
    LimbCollapse,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    normal_frames: Option<usize>,
    #[arg(long)]
    anomalous_frames: Option<usize>,
    /// Share of normal frames placed in the training split.
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    persons: Option<usize>,
    /// Anomaly kinds, cycled across events.
    #[arg(long, value_enum, value_delimiter = ',')]
    kinds: Vec<KindArg>,
    /// Motion multiplier of velocity-spike actors.
    #[arg(long)]
    intensity: Option<f64>,
    /// Per-person missed-detection probability.
    #[arg(long)]
    dropout: Option<f64>,
    /// Also write origin.jsonl, whose normal motion resembles the anomalies.
    #[arg(long)]
    shift: bool,
    #[arg(long, default_value_t = 2000)]
    origin_frames: usize,
}

enum CliError {
    Usage(String),
    Lib(posevad::Error),
}

impl From<posevad::Error> for CliError {
    fn from(e: posevad::Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Lib(posevad::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            if e.kind() == clap::error::ErrorKind::InvalidSubcommand {
                let names: Vec<String> = Cli::command()
                    .get_subcommands()
                    .filter(|c| c.get_name() != "help")
                    .map(|c| c.get_name().to_string())
                    .collect();
                eprintln!("\nSubcommands: {}", names.join(", "));
            }
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Stats(a) => cmd_stats(a),
        Command::Rearrange(a) => cmd_rearrange(a),
        Command::RunStandard(a) => cmd_run_standard(a),
        Command::RunContinual(a) => cmd_run_continual(a),
        Command::Report(a) => cmd_report(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(1)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            match e.kind() {
                ErrorKind::Data => ExitCode::from(2),
                ErrorKind::Runtime => ExitCode::from(3),
            }
        }
    }
}

/// `SOURCE_DATE_EPOCH` when set, so output trees can be reproduced exactly.
fn started_at() -> String {
    let t = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<i64>().ok())
        .and_then(|s| DateTime::<Utc>::from_timestamp(s, 0))
        .unwrap_or_else(Utc::now);
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn manifest(subcommand: &str, config_json: &str, seed: u64) -> Manifest {
    Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: sha256_hex(config_json.as_bytes()),
        seed,
        started_at: started_at(),
        subcommand: subcommand.to_string(),
    }
}

/// Loads the config file (or defaults) and applies the common flags.
fn base_config(common: &Common) -> CliResult<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.out_dir = Some(o.clone());
    }
    if let Some(c) = &common.camera {
        cfg.camera = Some(c.clone());
    }
    Ok(cfg)
}

fn apply_inputs(cfg: &mut RunConfig, inputs: &Inputs) {
    if let Some(p) = &inputs.train {
        cfg.train = Some(p.clone());
    }
    if let Some(p) = &inputs.test {
        cfg.test = Some(p.clone());
    }
}

fn apply_plan(cfg: &mut RunConfig, args: &PlanArgs) {
    let plan = cfg.rearrange.get_or_insert_with(RearrangePlan::default);
    if let Some(k) = args.k {
        plan.k = k;
    }
    if args.inject_count.is_some() {
        plan.inject_count = args.inject_count;
    }
    if args.test_normal_count.is_some() {
        plan.test_normal_count = args.test_normal_count;
    }
    if let Some(r) = args.target_ratio {
        plan.target_train_anomaly_ratio = r;
    }
    if let Some(t) = args.balance_tolerance {
        plan.balance_tolerance = t;
    }
}

fn apply_model(cfg: &mut RunConfig, m: &ModelArgs) {
    match m.scorer {
        Some(ScorerKind::Gaussian) => cfg.scorer = ScorerSpec::Gaussian,
        Some(ScorerKind::Knn) => {
            cfg.scorer = ScorerSpec::Knn {
                k_nn: m.k_nn.unwrap_or(5),
                capacity: m.capacity.unwrap_or(knn::DEFAULT_CAPACITY),
            }
        }
        Some(ScorerKind::Constant) => {
            cfg.scorer = ScorerSpec::Constant {
                value: m.constant_value.unwrap_or(0.0),
            }
        }
        None => match &mut cfg.scorer {
            ScorerSpec::Knn { k_nn, capacity } => {
                if let Some(v) = m.k_nn {
                    *k_nn = v;
                }
                if let Some(v) = m.capacity {
                    *capacity = v;
                }
            }
            ScorerSpec::Constant { value } => {
                if let Some(v) = m.constant_value {
                    *value = v;
                }
            }
            ScorerSpec::Gaussian => {}
        },
    }
    if let Some(v) = m.window_length {
        cfg.window_length = v;
    }
    if let Some(v) = m.window_stride {
        cfg.window_stride = v;
    }
    if let Some(v) = m.max_gap {
        cfg.max_gap = v;
    }
    if m.no_smooth {
        cfg.smooth_window = None;
    } else if let Some(v) = m.smooth_window {
        cfg.smooth_window = Some(v);
    }
    match m.aggregator {
        Some(AggregatorArg::Max) => cfg.aggregator = Aggregator::Max,
        Some(AggregatorArg::Mean) => cfg.aggregator = Aggregator::Mean,
        None => {}
    }
}

fn required_path(p: &Option<PathBuf>, flag: &str) -> CliResult<PathBuf> {
    p.clone()
        .ok_or_else(|| usage(format!("missing {flag} (give the flag or set it in --config)")))
}

fn out_dir(cfg: &RunConfig) -> CliResult<PathBuf> {
    required_path(&cfg.out_dir, "--out")
}

/// Cameras of `path`, optionally restricted to `camera`.
fn load_filtered(path: &Path, camera: Option<&str>) -> CliResult<BTreeMap<String, CameraDataset>> {
    let mut out: BTreeMap<String, CameraDataset> = load_cameras(path)?
        .into_iter()
        .map(|d| (d.camera_id.clone(), d))
        .collect();
    if let Some(c) = camera {
        out.retain(|id, _| id == c);
        if out.is_empty() {
            return Err(posevad::Error::InvalidInput(format!("camera {c} not found in {}", path.display())).into());
        }
    }
    Ok(out)
}

/// Train/test pairs per camera.
fn load_splits(cfg: &RunConfig, train: &Path, test: &Path) -> CliResult<Vec<SplitSet>> {
    let camera = cfg.camera.as_deref();
    let mut trains = load_filtered(train, camera)?;
    let tests = load_filtered(test, camera)?;
    let mut out = Vec::new();
    for (id, te) in tests {
        let tr = trains.remove(&id).ok_or_else(|| {
            posevad::Error::InvalidInput(format!("camera {id} has test frames but no training frames"))
        })?;
        out.push(SplitSet::new(tr, te)?);
    }
    if let Some(id) = trains.keys().next() {
        return Err(posevad::Error::InvalidInput(format!("camera {id} has training frames but no test frames")).into());
    }
    if out.is_empty() {
        return Err(posevad::Error::InvalidInput("no frames in the test file".into()).into());
    }
    Ok(out)
}

fn single_split(cfg: &RunConfig, train: &Path, test: &Path) -> CliResult<SplitSet> {
    let mut splits = load_splits(cfg, train, test)?;
    if splits.len() != 1 {
        let ids: Vec<String> = splits.iter().map(|s| s.test.camera_id.clone()).collect();
        return Err(posevad::Error::InvalidInput(format!(
            "input holds several cameras ({}); select one with --camera",
            ids.join(", ")
        ))
        .into());
    }
    Ok(splits.remove(0))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn create_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path).map_err(|e| io_err(path, e))
}

fn stdout_write(bytes: &[u8]) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| io_err(Path::new("<stdout>"), e))
}

fn cmd_stats(a: StatsArgs) -> CliResult<()> {
    let cfg = base_config(&a.common)?;
    let mut files = a.files.clone();
    if files.is_empty() {
        files.extend(cfg.train.iter().cloned());
        files.extend(cfg.test.iter().cloned());
    }
    if files.is_empty() {
        return Err(usage("no annotation files given"));
    }
    let mut per_camera: BTreeMap<String, DatasetStats> = BTreeMap::new();
    for f in &files {
        for (id, ds) in load_filtered(f, cfg.camera.as_deref())? {
            if ds.is_empty() {
                continue;
            }
            let s = stats_for_frames(&id, ds.frames())?;
            let merged = match per_camera.remove(&id) {
                Some(prev) => prev.merge(&s),
                None => s,
            };
            per_camera.insert(id, merged);
        }
    }
    if per_camera.is_empty() {
        return Err(posevad::Error::InvalidInput("no frames to summarize".into()).into());
    }
    let stats: Vec<DatasetStats> = per_camera.into_values().collect();
    let mut csv = Vec::new();
    write_stats_csv(&mut csv, &stats)?;
    stdout_write(&csv)?;
    if let Some(dir) = &cfg.out_dir {
        create_dir(dir)?;
        write_file(&dir.join("stats.csv"), &csv)?;
        let mut iou = Vec::new();
        write_max_iou_csv(&mut iou, &stats)?;
        write_file(&dir.join("max_iou.csv"), iou)?;
        let listed: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
        let config = serde_json::json!({ "files": listed, "camera": cfg.camera }).to_string();
        manifest("stats", &config, cfg.seed).write(dir)?;
    }
    Ok(())
}

fn cmd_rearrange(a: RearrangeArgs) -> CliResult<()> {
    let mut cfg = base_config(&a.common)?;
    apply_inputs(&mut cfg, &a.inputs);
    apply_plan(&mut cfg, &a.plan);
    let train = required_path(&cfg.train, "--train")?;
    let test = required_path(&cfg.test, "--test")?;
    let dir = out_dir(&cfg)?;
    let mut plan = cfg.rearrange.clone().expect("plan set above");
    plan.validate()?;
    plan.seed = rearrange_seed(cfg.seed);

    let split = single_split(&cfg, &train, &test)?;
    let cs = rearrange(&split, &plan)?;
    let (train_stats, test_stats) = verify(&cs)?;

    create_dir(&dir)?;
    for (i, slice) in cs.slices().enumerate() {
        write_frames_file(dir.join(format!("slice_{:02}.jsonl", i + 1)), slice)?;
    }
    write_frames_file(dir.join("test.jsonl"), cs.test.frames())?;
    let prov_path = dir.join("provenance.csv");
    let file = std::fs::File::create(&prov_path).map_err(|e| io_err(&prov_path, e))?;
    cs.write_provenance_csv(file)?;
    manifest("rearrange", &cfg.to_json(), cfg.seed).write(&dir)?;

    let mut summary = String::from("split,frames,anomalous,anomaly_percentage\n");
    for (name, s) in [("train", &train_stats), ("test", &test_stats)] {
        summary.push_str(&format!(
            "{name},{},{},{:.2}\n",
            s.frame_count,
            s.anomaly_frame_count,
            s.anomaly_percentage()
        ));
    }
    stdout_write(summary.as_bytes())
}

fn write_run_outputs(dir: &Path, results: &RunResults, subcommand: &str) -> CliResult<()> {
    emit_report(results, dir, &[ReportFormat::Csv, ReportFormat::Markdown])?;
    write_results(results, dir)?;
    let config = results.config.to_json();
    write_file(&dir.join("config.json"), &config)?;
    manifest(subcommand, &config, results.config.seed).write(dir)?;
    Ok(())
}

fn cmd_run_standard(a: RunStandardArgs) -> CliResult<()> {
    let mut cfg = base_config(&a.common)?;
    cfg.mode = Mode::Standard;
    apply_inputs(&mut cfg, &a.inputs);
    apply_model(&mut cfg, &a.model);
    let train = required_path(&cfg.train, "--train")?;
    let test = required_path(&cfg.test, "--test")?;
    let dir = out_dir(&cfg)?;
    cfg.validate()?;

    let splits = load_splits(&cfg, &train, &test)?;
    let mut cameras = Vec::new();
    let scores_dir = dir.join("scores");
    create_dir(&scores_dir)?;
    for split in &splits {
        let out = run_standard(split, &cfg)?;
        let id = split.test.camera_id.clone();
        write_file(&scores_dir.join(format!("{id}.csv")), render_scores_csv(&out.scores)?)?;
        cameras.push(CameraResult {
            camera_id: id,
            outcome: Outcome::Standard { report: out.report },
        });
    }
    let results = RunResults { config: cfg, cameras };
    write_run_outputs(&dir, &results, "run-standard")?;
    stdout_write(render_csv(&results)?.as_bytes())
}

fn cmd_run_continual(a: RunContinualArgs) -> CliResult<()> {
    let mut cfg = base_config(&a.common)?;
    cfg.mode = Mode::Continual;
    apply_inputs(&mut cfg, &a.inputs);
    if let Some(o) = &a.origin {
        cfg.origin = Some(o.clone());
    }
    apply_model(&mut cfg, &a.model);
    apply_plan(&mut cfg, &a.plan);
    let train = required_path(&cfg.train, "--train")?;
    let test = required_path(&cfg.test, "--test")?;
    let origin = required_path(&cfg.origin, "--origin")?;
    let dir = out_dir(&cfg)?;
    cfg.validate()?;

    let split = single_split(&cfg, &train, &test)?;
    let origin_sets = load_cameras(&origin)?;
    create_dir(&dir)?;
    let out = run_continual(&origin_sets, &split, &cfg, Some(&dir.join("checkpoints")))?;
    write_step_scores(&dir, &out.step_scores)?;
    let prov_path = dir.join("provenance.csv");
    let file = std::fs::File::create(&prov_path).map_err(|e| io_err(&prov_path, e))?;
    out.split.write_provenance_csv(file)?;

    let results = RunResults {
        config: cfg,
        cameras: vec![CameraResult {
            camera_id: out.result.camera_id.clone(),
            outcome: Outcome::Continual { result: out.result },
        }],
    };
    write_run_outputs(&dir, &results, "run-continual")?;
    stdout_write(render_csv(&results)?.as_bytes())
}

fn cmd_report(a: ReportArgs) -> CliResult<()> {
    let results = RunResults::load(&a.results)?;
    let formats = match a.format {
        FormatArg::Csv => vec![ReportFormat::Csv],
        FormatArg::Markdown => vec![ReportFormat::Markdown],
        FormatArg::Both => vec![ReportFormat::Csv, ReportFormat::Markdown],
    };
    match &a.common.out {
        Some(dir) => emit_report(&results, dir, &formats)?,
        None => {
            let mut text = String::new();
            for f in formats {
                if !text.is_empty() {
                    text.push('\n');
                }
                match f {
                    ReportFormat::Csv => text.push_str(&render_csv(&results)?),
                    ReportFormat::Markdown => text.push_str(&render_markdown(&results)?),
                }
            }
            stdout_write(text.as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> CliResult<()> {
    let mut spec = match &a.common.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            serde_json::from_str::<SynthSpec>(&text)
                .map_err(|e| posevad::Error::Config(format!("{}: {e}", p.display())))?
        }
        None => SynthSpec::default(),
    };
    let dir = a.common.out.clone().ok_or_else(|| usage("missing --out"))?;
    let run_seed = a.common.seed.unwrap_or(0);
    spec.seed = derive_seed(run_seed, "synth");
    if let Some(c) = &a.common.camera {
        spec.camera_id = c.clone();
    }
    if let Some(v) = a.normal_frames {
        spec.normal_frames = v;
    }
    if let Some(v) = a.anomalous_frames {
        spec.anomalous_frames = v;
    }
    if let Some(v) = a.train_fraction {
        spec.train_fraction = v;
    }
    if let Some(v) = a.persons {
        spec.persons_per_frame = v;
    }
    if !a.kinds.is_empty() {
        spec.anomaly_kinds = a
            .kinds
            .iter()
            .map(|k| match k {
                KindArg::VelocitySpike => AnomalyKind::VelocitySpike,
                KindArg::Frozen => AnomalyKind::Frozen,
                KindArg::LimbCollapse => AnomalyKind::LimbCollapse,
            })
            .collect();
    }
    if let Some(v) = a.intensity {
        spec.intensity = v;
    }
    if let Some(v) = a.dropout {
        spec.dropout = v;
    }

    let (split, origin) = if a.shift {
        let sc = generate_shift_scenario(&spec, a.origin_frames)?;
        (sc.target, Some(sc.origin))
    } else {
        (generate_synthetic(&spec)?, None)
    };
    create_dir(&dir)?;
    write_frames_file(dir.join("train.jsonl"), split.train.frames())?;
    write_frames_file(dir.join("test.jsonl"), split.test.frames())?;
    if let Some(o) = &origin {
        write_frames_file(dir.join("origin.jsonl"), o.frames())?;
    }
    let config = serde_json::to_string_pretty(&spec).expect("spec serializes");
    write_file(&dir.join("synth.json"), &config)?;
    manifest("synth", &config, run_seed).write(&dir)?;
    Ok(())
}
