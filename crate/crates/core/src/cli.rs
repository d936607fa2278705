//! Command-line front end: argument structs and one function per subcommand.
//! Data goes only to the files named on the command line; progress and
//! summaries go to standard error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{filter_bench, BenchConfig, BenchRow};
use crate::data::{load_dataset, save_dataset, write_file, Dataset, ProbeQuery};
use crate::error::{Error, Result};
use crate::evaluation::{
    baseline_params, evaluate_method, rank_order, run_means, split_by_person, Evaluation, ProtocolOptions, SplitMode,
    TrialOutcome,
};
use crate::inference::{infer_marginals, Backend, Inference, InferenceSettings};
use crate::learning::{evaluate_pipeline, train, TrainConfig, WidthGridSpec, DEFAULT_ALPHA_GRID};
use crate::potentials::{build_crf_problem_on, Params};
use crate::synth::{synth_generate, SyntheticSpec};

#[derive(Debug, Parser)]
#[command(
    name = "reid-crf",
    version,
    about = "Gallery ranking with a fully connected binary CRF"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a clustered synthetic dataset.
    Synth(SynthArgs),
    /// Learn kernel weights and alpha on a seeded person split.
    Train(TrainArgs),
    /// Rank a gallery for one probe.
    Infer(InferArgs),
    /// Run the evaluation protocol and write reports.
    Eval(EvalArgs),
    /// Time the exact and lattice filters at several sizes.
    FilterBench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Filtered,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Filtered => Backend::Filtered,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InferenceArgs {
    #[arg(long, value_enum, default_value = "exact")]
    pub backend: BackendArg,
    /// Weight kept on the previous marginals at each sweep.
    #[arg(long, default_value_t = 0.0)]
    pub damping: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
}

impl InferenceArgs {
    pub fn settings(&self) -> Result<InferenceSettings> {
        let settings = InferenceSettings {
            backend: self.backend.into(),
            max_iterations: self.max_iter,
            convergence_tol: self.tol,
            damping: self.damping,
            ..InferenceSettings::default()
        };
        settings.validate()?;
        Ok(settings)
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Centre of the kernel width grid.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Number of halvings below lambda.
    #[arg(long, default_value_t = 2)]
    pub grid_low: u32,
    /// Number of doublings above lambda.
    #[arg(long, default_value_t = 1)]
    pub grid_high: u32,
    /// Comma-separated candidate values of alpha.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ALPHA_GRID.to_vec())]
    pub alpha_grid: Vec<f64>,
}

impl GridArgs {
    fn width_grid(&self) -> WidthGridSpec {
        WidthGridSpec {
            lambda: self.lambda,
            i_low: self.grid_low,
            j_high: self.grid_high,
        }
    }

    fn train_config(&self, dataset: &Dataset, seed: u64, cv_folds: usize, inference: InferenceSettings) -> TrainConfig {
        TrainConfig {
            grid: self.width_grid(),
            alpha_grid: self.alpha_grid.clone(),
            cv_folds,
            inference,
            ..TrainConfig::for_dataset(dataset, seed)
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Output directory for the manifest and channel files.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// JSON synthetic spec; the built-in benchmark when absent.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub persons: Option<usize>,
    #[arg(long)]
    pub images_per_person: Option<usize>,
    #[arg(long)]
    pub within: Option<f64>,
    #[arg(long)]
    pub between: Option<f64>,
    /// Also write a precomputed-distance channel with this name.
    #[arg(long)]
    pub precomputed: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Where to write the parameter file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Cross-validation folds for choosing alpha.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub inference: InferenceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct InferArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub params: PathBuf,
    /// A dataset image id, or a JSON probe file.
    #[arg(long)]
    pub probe: String,
    /// Where to write the ranking CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub inference: InferenceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Fixed parameters; required unless `--retrain` is given.
    #[arg(long, required_unless_present = "retrain")]
    pub params: Option<PathBuf>,
    /// Output directory for reports, rankings and PR curves.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Number of runs of the protocol.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Use disjoint rotating test folds instead of independent resplits.
    #[arg(long)]
    pub rotating: bool,
    /// Use every image of a test person as a probe.
    #[arg(long)]
    pub all_probes: bool,
    /// Train kernel weights and alpha afresh on each run's training persons.
    #[arg(long)]
    pub retrain: bool,
    /// Cross-validation folds for alpha when retraining.
    #[arg(long, default_value_t = 5)]
    pub cv_folds: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub inference: InferenceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Where to write the timing CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Comma-separated point counts.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1000usize, 2000])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => cmd_synth(&a).map(|_| ()),
        Command::Train(a) => cmd_train(&a).map(|_| ()),
        Command::Infer(a) => cmd_infer(&a).map(|_| ()),
        Command::Eval(a) => cmd_eval(&a),
        Command::FilterBench(a) => cmd_filter_bench(&a).map(|_| ()),
    }
}

pub fn cmd_synth(args: &SynthArgs) -> Result<PathBuf> {
    let mut spec = match &args.spec {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&text).map_err(|source| Error::Json {
                path: path.clone(),
                source,
            })?
        }
        None => SyntheticSpec::benchmark(args.seed),
    };
    spec.seed = args.seed;
    if let Some(p) = args.persons {
        spec.persons = p;
    }
    if let Some(k) = args.images_per_person {
        spec.images_per_person = k;
    }
    if let Some(w) = args.within {
        spec.within_person_spread = w;
        for c in &mut spec.channels {
            c.within_person_spread = None;
        }
    }
    if let Some(b) = args.between {
        spec.between_person_spread = b;
    }
    if args.precomputed.is_some() {
        spec.precomputed = args.precomputed.clone();
    }
    let dataset = synth_generate(&spec)?;
    let manifest = save_dataset(&dataset, &args.out)?;
    eprintln!(
        "wrote {} images of {} persons to {}",
        dataset.len(),
        dataset.persons().len(),
        manifest.display()
    );
    Ok(manifest)
}

pub fn cmd_train(args: &TrainArgs) -> Result<Params> {
    let dataset = load_dataset(&args.manifest)?;
    let inference = args.inference.settings()?;
    let split = split_by_person(&dataset, args.seed)?;
    let config = args.grid.train_config(&dataset, args.seed, args.folds, inference);
    let outcome = train(&dataset, &split.train_persons, &config)?;
    outcome.params.save(&args.out)?;
    eprintln!(
        "trained on {} persons, {} pairs; alpha = {}",
        split.train_persons.len(),
        outcome.pairs,
        outcome.params.alpha
    );
    for (alpha, score) in &outcome.alpha_scores {
        eprintln!("  alpha {alpha:>6}: cv mean max-F {score:.4}");
    }
    Ok(outcome.params)
}

/// One row of a ranking export.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedItem {
    pub gallery_image_id: String,
    pub marginal: f64,
    pub rank: usize,
}

pub fn ranking(gallery_ids: &[String], marginals: &[f64]) -> Vec<RankedItem> {
    rank_order(marginals)
        .into_iter()
        .enumerate()
        .map(|(r, i)| RankedItem {
            gallery_image_id: gallery_ids[i].clone(),
            marginal: marginals[i],
            rank: r + 1,
        })
        .collect()
}

pub fn ranking_csv(probe_id: &str, items: &[RankedItem]) -> String {
    let mut out = String::from("probe_id,gallery_image_id,marginal,rank\n");
    for item in items {
        out.push_str(&format!(
            "{probe_id},{},{},{}\n",
            item.gallery_image_id, item.marginal, item.rank
        ));
    }
    out
}

fn pr_curve_csv(trial: &TrialOutcome) -> String {
    let mut out = String::from("prefix,precision,recall,f\n");
    for p in &trial.curve.points {
        out.push_str(&format!("{},{},{},{}\n", p.rank, p.precision, p.recall, p.f_score()));
    }
    out
}

/// Resolves `--probe`: a dataset image (left out of its own gallery) or a
/// probe file (ranked against the whole dataset).
pub fn resolve_probe(dataset: &Dataset, probe: &str) -> Result<(ProbeQuery, Vec<usize>)> {
    if let Some(index) = dataset.image_index(probe) {
        let gallery = (0..dataset.len()).filter(|&i| i != index).collect();
        return Ok((dataset.probe_from_image(index)?, gallery));
    }
    let path = Path::new(probe);
    if path.is_file() {
        return Ok((ProbeQuery::load(path)?, (0..dataset.len()).collect()));
    }
    Err(Error::UnknownProbe(probe.to_string()))
}

pub fn cmd_infer(args: &InferArgs) -> Result<Inference> {
    let dataset = load_dataset(&args.manifest)?;
    let params = Params::load(&args.params)?;
    let settings = args.inference.settings()?;
    let (probe, gallery) = resolve_probe(&dataset, &args.probe)?;
    let problem = build_crf_problem_on(
        &probe,
        &dataset,
        &gallery,
        &params.unary(),
        &params.pairwise(),
        params.alpha,
    )?;
    let result = infer_marginals(&problem, &settings)?;
    let ids: Vec<String> = gallery.iter().map(|&g| dataset.images()[g].id.clone()).collect();
    let items = ranking(&ids, &result.marginals.q);
    write_file(&args.out, ranking_csv(&probe.probe_id, &items).as_bytes())?;
    eprintln!(
        "probe {}: {} gallery images, {} iterations, converged = {}",
        probe.probe_id,
        ids.len(),
        result.iterations,
        result.converged
    );
    Ok(result)
}

/// Writes `report.json` plus `rankings/` and `curves/` CSVs under `dir`.
pub fn write_evaluation(evaluation: &Evaluation, dir: &Path) -> Result<()> {
    write_file(&dir.join("report.json"), evaluation.report.to_json().as_bytes())?;
    for trial in &evaluation.trials {
        let name = format!("run{}_{}.csv", trial.run, trial.probe_id);
        let items = ranking(&trial.gallery_ids, &trial.marginals);
        write_file(
            &dir.join("rankings").join(&name),
            ranking_csv(&trial.probe_id, &items).as_bytes(),
        )?;
        write_file(&dir.join("curves").join(&name), pr_curve_csv(trial).as_bytes())?;
    }
    Ok(())
}

fn summary(label: &str, evaluation: &Evaluation) {
    let per_run: BTreeMap<usize, f64> = run_means(&evaluation.report);
    let runs: Vec<String> = per_run.values().map(|m| format!("{m:.4}")).collect();
    eprintln!(
        "{label}: mean max-F {:.4} over {} probes (runs: {})",
        evaluation.report.mean_max_f,
        evaluation.report.per_probe.len(),
        runs.join(", ")
    );
}

/// Writes the method into `<out>/method` and the alpha = 0 baseline into
/// `<out>/baseline`.
pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let dataset = load_dataset(&args.manifest)?;
    let settings = args.inference.settings()?;
    let protocol = ProtocolOptions {
        split_mode: if args.rotating {
            SplitMode::Rotating
        } else {
            SplitMode::Resample
        },
        all_probes: args.all_probes,
        ..ProtocolOptions::new(args.folds, args.seed)
    };
    let (method, baseline) = if args.retrain {
        let config = args.grid.train_config(&dataset, args.seed, args.cv_folds, settings);
        let pipeline = evaluate_pipeline(&dataset, &config, &protocol)?;
        (pipeline.trained, pipeline.baseline)
    } else {
        let path = args
            .params
            .as_ref()
            .ok_or_else(|| Error::invalid("--params is required"))?;
        let params = Params::load(path)?;
        let method = evaluate_method(&dataset, &params, &settings, &protocol)?;
        let baseline = evaluate_method(&dataset, &baseline_params(&params), &settings, &protocol)?;
        (method, baseline)
    };
    write_evaluation(&method, &args.out.join("method"))?;
    write_evaluation(&baseline, &args.out.join("baseline"))?;
    summary("crf", &method);
    summary("baseline", &baseline);
    Ok(())
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("N,exact_seconds,lattice_seconds,mean_relative_error\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n, r.exact_seconds, r.lattice_seconds, r.mean_relative_error
        ));
    }
    out
}

pub fn cmd_filter_bench(args: &BenchArgs) -> Result<Vec<BenchRow>> {
    let config = BenchConfig {
        sizes: args.sizes.clone(),
        dim: args.dim,
        sigma: args.sigma,
        repeats: args.repeats,
        seed: args.seed,
        ..BenchConfig::default()
    };
    let rows = filter_bench(&config)?;
    write_file(&args.out, bench_csv(&rows).as_bytes())?;
    for r in &rows {
        eprintln!(
            "N {:>6}: exact {:.4}s, lattice {:.5}s (build {:.4}s, {} vertices), mean rel. error {:.4}",
            r.n, r.exact_seconds, r.lattice_seconds, r.build_seconds, r.vertices, r.mean_relative_error
        );
    }
    Ok(rows)
}
