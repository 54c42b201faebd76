//! `gazewall` command-line front end.

mod render;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gazewall::classifier::{KernelParams, SmoParams};
use gazewall::error::ErrorCategory;
use gazewall::evaluation::{
    build_dataset, evaluate, format_confusion, format_sweep_table, score_model, window_sweep, CvMode, Dataset,
    EvalConfig, SvmLearner,
};
use gazewall::heatmap::session_heatmaps;
use gazewall::io::{read_model, read_session, write_features, write_heatmap, write_model, write_report, write_session};
use gazewall::io::{FeatureRow, SessionRecording};
use gazewall::synth::{make_corpus, CorpusConfig};
use gazewall::{Error, FeatureConfig, HeatmapConfig, Result, Standardization, TrainedModel};

#[derive(Parser)]
#[command(name = "gazewall", version, about = "Cognitive distraction detection from gaze heatmaps")]
struct Cli {
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a study: one neutral and one distracted session per driver.
    Synth(SynthArgs),
    /// Write one 16-bit PGM plus JSON sidecar per sliding window of a session.
    Heatmap(HeatmapCmd),
    /// Colour a heatmap PGM into a PNG.
    Render(RenderArgs),
    /// Export the feature matrix of one or more sessions as CSV.
    Features(FeaturesArgs),
    /// Train the classifier on every window of the given sessions.
    Train(TrainArgs),
    /// Cross-validate, or score a saved model with --model.
    Eval(EvalArgs),
    /// Cross-validate at several window lengths and print the table.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 5)]
    drivers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Session length in seconds.
    #[arg(long, default_value_t = 1320)]
    duration: u32,
    /// JSON corpus configuration (behaviour profiles, perturbation); flags above still apply.
    #[arg(long)]
    profiles: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct WindowArgs {
    /// Window length in seconds.
    #[arg(long, default_value_t = 30)]
    window: u32,
    /// Window stride in seconds.
    #[arg(long, default_value_t = 1)]
    stride: u32,
    /// Foveal disc radius in pixels.
    #[arg(long, default_value_t = 15.0)]
    fov_radius: f64,
    /// Gaussian blur sigma in pixels.
    #[arg(long, default_value_t = 5.0)]
    blur_sigma: f64,
    /// Gaussian kernel width in pixels (odd).
    #[arg(long, default_value_t = 21)]
    blur_kernel: usize,
}

impl WindowArgs {
    fn config(&self) -> Result<HeatmapConfig> {
        let cfg = HeatmapConfig {
            window_s: self.window,
            stride_s: self.stride,
            fov_radius_px: self.fov_radius,
            blur_sigma_px: self.blur_sigma,
            blur_kernel_px: self.blur_kernel,
            ..HeatmapConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Clone)]
struct FeatureArgs {
    /// Zone intensity thresholds, increasing.
    #[arg(long, value_delimiter = ',', value_name = "T1,T2,T3,T4", default_value = "0.2,0.4,0.6,0.8")]
    zone_thresholds: Vec<f64>,
}

impl FeatureArgs {
    fn config(&self) -> Result<FeatureConfig> {
        let t: [f64; 4] = self
            .zone_thresholds
            .as_slice()
            .try_into()
            .map_err(|_| Error::Config("exactly four zone thresholds are required".into()))?;
        let cfg = FeatureConfig { zone_thresholds: t };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StandardizationArg {
    Dataset,
    PerHeatmap,
}

impl From<StandardizationArg> for Standardization {
    fn from(s: StandardizationArg) -> Self {
        match s {
            StandardizationArg::Dataset => Standardization::Dataset,
            StandardizationArg::PerHeatmap => Standardization::PerHeatmap,
        }
    }
}

#[derive(Args, Clone)]
struct LearnerArgs {
    /// Box constraint.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// RBF gamma; default 1 / (n_features * mean feature variance).
    #[arg(long)]
    gamma: Option<f64>,
    /// KKT violation tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
    /// Iteration cap in multiples of the training-set size.
    #[arg(long, default_value_t = 10_000)]
    max_passes: usize,
    /// Kernel row cache size in MiB.
    #[arg(long, default_value_t = 256)]
    cache_mb: usize,
    #[arg(long, value_enum, default_value_t = StandardizationArg::Dataset)]
    standardization: StandardizationArg,
}

impl LearnerArgs {
    fn smo(&self, seed: u64) -> SmoParams {
        SmoParams {
            tolerance: self.tolerance,
            max_passes: self.max_passes,
            seed,
            cache_mb: self.cache_mb,
        }
    }

    fn learner(&self, seed: u64) -> Result<SvmLearner> {
        if let Some(g) = self.gamma {
            KernelParams::new(g, self.c)?;
        } else if !(self.c > 0.0) {
            return Err(Error::Config(format!("C must be positive, got {}", self.c)));
        }
        Ok(SvmLearner {
            gamma: self.gamma,
            c: self.c,
            smo: self.smo(seed),
        })
    }
}

#[derive(Args)]
struct HeatmapCmd {
    /// Session file.
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Colormap {
    Jet,
}

#[derive(Args)]
struct RenderArgs {
    /// Heatmap PGM (8 or 16 bit).
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Colormap::Jet)]
    colormap: Colormap,
    /// Output PNG.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FeaturesArgs {
    /// Session files or directories of .gaze files.
    #[arg(long = "in", required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    features: FeatureArgs,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long = "in", required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    learner: LearnerArgs,
    /// Seeds the SMO scan order.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output model, conventionally `*.model.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Leave one driver out.
    Lodo,
    /// Stratified k-fold with overlapping training windows purged.
    Kfold,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Lodo)]
    mode: ModeArg,
    /// Fold count for kfold.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Seeds fold assignment and the SMO scan order.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl CvArgs {
    fn mode(&self) -> CvMode {
        match self.mode {
            ModeArg::Lodo => CvMode::LeaveOneDriverOut,
            ModeArg::Kfold => CvMode::StratifiedKFold { k: self.folds },
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long = "in", required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    learner: LearnerArgs,
    #[command(flatten)]
    cv: CvArgs,
    /// Score this saved model instead of cross-validating.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Output report, conventionally `*.report.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long = "in", required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Window lengths in seconds.
    #[arg(long, value_delimiter = ',', value_name = "S,...", default_value = "5,10,15,20,25,30,35,40,45,50,55,60")]
    windows: Vec<u32>,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    learner: LearnerArgs,
    #[command(flatten)]
    cv: CvArgs,
    /// Output report with every row.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        log::warn!("could not configure the thread pool: {e}");
    }

    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.category() {
                ErrorCategory::Usage => 2,
                ErrorCategory::Data => 3,
                ErrorCategory::Training => 4,
            })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Heatmap(a) => heatmap(a),
        Command::Render(a) => match a.colormap {
            Colormap::Jet => render::render_file(&a.input, &a.out),
        },
        Command::Features(a) => features(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn synth(a: SynthArgs) -> Result<()> {
    let mut cfg: CorpusConfig = match &a.profiles {
        Some(p) => gazewall::io::read_json(p)?,
        None => CorpusConfig::default(),
    };
    cfg.duration_s = a.duration;
    let corpus = make_corpus(a.drivers, a.seed, &cfg)?;
    for rec in &corpus {
        let path = a.out.join(rec.file_name());
        write_session(&path, rec)?;
        println!("{}\t{}\t{}\t{}", path.display(), rec.header.driver_id, rec.header.label, rec.samples.len());
    }
    Ok(())
}

fn heatmap(a: HeatmapCmd) -> Result<()> {
    let cfg = a.window.config()?;
    let rec = read_session(&a.input)?;
    let h = &rec.header;
    let cfg = HeatmapConfig {
        sample_period_ms: h.sample_period_ms,
        ..cfg
    };
    let maps = session_heatmaps(&rec.samples, &h.wall, &cfg, &h.driver_id, Some(h.label));
    if maps.is_empty() {
        log::warn!("{}: session is shorter than one window; no heatmaps written", a.input.display());
        return Ok(());
    }
    fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    for hm in &maps {
        let stem = format!("{}_{}_{:09}", h.driver_id, h.label, hm.window_start_ms);
        write_heatmap(&a.out, &stem, hm)?;
    }
    log::info!("wrote {} heatmaps to {}", maps.len(), a.out.display());
    Ok(())
}

/// Expands directories to their `.gaze` files (sorted) and reads every session.
fn load_sessions(inputs: &[PathBuf]) -> Result<Vec<SessionRecording>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "gaze"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        return Err(Error::Data("no session files found".into()));
    }
    files.iter().map(|f| read_session(f)).collect()
}

fn dataset(inputs: &[PathBuf], window: &WindowArgs, features: &FeatureArgs) -> Result<Dataset> {
    let cfg = window.config()?;
    let fcfg = features.config()?;
    let sessions = load_sessions(inputs)?;
    let ds = build_dataset(&sessions, &cfg, &fcfg);
    log::info!("{} heatmaps from {} sessions", ds.len(), sessions.len());
    Ok(ds)
}

fn features(a: FeaturesArgs) -> Result<()> {
    let ds = dataset(&a.input, &a.window, &a.features)?;
    let rows: Vec<FeatureRow> = ds
        .rows
        .into_iter()
        .map(|r| FeatureRow {
            features: r.features,
            driver_id: r.driver_id,
            window_start_ms: r.span.start_ms,
            ground_truth: Some(r.label),
        })
        .collect();
    write_features(&a.out, &rows)
}

fn train(a: TrainArgs) -> Result<()> {
    let learner = a.learner.learner(a.seed)?;
    let ds = dataset(&a.input, &a.window, &a.features)?;
    let raw: Vec<Vec<f64>> = ds.rows.iter().map(|r| r.features.clone()).collect();
    let kernel = learner.gamma.map(|g| KernelParams::new(g, learner.c)).transpose()?;
    let model = TrainedModel::fit(&raw, &ds.labels(), a.learner.standardization.into(), kernel, learner.c, &learner.smo)?;
    log::info!("{} support vectors", model.svm.support_vectors.len());
    write_model(&a.out, &model)
}

fn print_summary(report: &gazewall::evaluation::EvalReport) {
    eprintln!(
        "accuracy {:.3} %  f1 {:.3}  ({} folds)",
        report.accuracy,
        report.f1,
        report.folds.len()
    );
    eprint!("{}", format_confusion(&report.confusion));
}

fn eval(a: EvalArgs) -> Result<()> {
    let learner = a.learner.learner(a.cv.seed)?;
    let ds = dataset(&a.input, &a.window, &a.features)?;
    let report = match &a.model {
        Some(path) => score_model(&ds, &read_model(path)?)?,
        None => {
            let cfg = EvalConfig {
                window_s: a.window.window,
                stride_s: a.window.stride,
                mode: a.cv.mode(),
                seed: a.cv.seed,
                standardization: a.learner.standardization.into(),
                learner,
            };
            evaluate(&ds, &cfg)?
        }
    };
    print_summary(&report);
    write_report(&a.out, &report)
}

fn sweep(a: SweepArgs) -> Result<()> {
    let base = a.window.config()?;
    let fcfg = a.features.config()?;
    let sessions = load_sessions(&a.input)?;
    let eval = EvalConfig {
        window_s: base.window_s,
        stride_s: base.stride_s,
        mode: a.cv.mode(),
        seed: a.cv.seed,
        standardization: a.learner.standardization.into(),
        learner: a.learner.learner(a.cv.seed)?,
    };
    let table = window_sweep(&sessions, &a.windows, &base, &fcfg, &eval)?;
    print!("{}", format_sweep_table(&table));
    write_report(&a.out, &table)
}
