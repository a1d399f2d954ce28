//! `flowml` — train, evaluate, and benchmark DDoS flow classifiers.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flowml_core::bench::{
    emit_table, load_matrix, run_benchmark, train_single, write_outputs, BenchConfig, DataSource,
    SynthKind,
};
use flowml_core::error::{Error, Result};
use flowml_core::flowdata::{clean, parse_flow_csv, to_matrix};
use flowml_core::metrics::{confusion, report};
use flowml_core::models::{GbtParams, SgdConfig};
use flowml_core::synth::{gen_blobs, gen_iot_mix, SynthConfig};
use flowml_core::ModelArtifact;

use config::FileConfig;

#[derive(Parser)]
#[command(
    name = "flowml",
    version,
    about = "Benchmark four from-scratch classifiers on labeled network-flow data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic flow CSV
    Generate(GenerateArgs),
    /// Train one model and write it to a self-describing artifact file
    Train(TrainArgs),
    /// Score a saved model artifact against a labeled flow CSV
    Evaluate(EvaluateArgs),
    /// Run the full four-model comparison and write the report files
    Bench(BenchArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Labeled flow CSV to load
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Synthetic source: blobs, xor, or iotmix
    #[arg(long, value_name = "KIND")]
    synth: Option<String>,
    /// Rows to synthesize
    #[arg(long, value_name = "N")]
    rows: Option<usize>,
    /// Fraction of synthetic rows labeled ddos, in (0,1)
    #[arg(long, value_name = "F")]
    attack_fraction: Option<f64>,
    /// Noise scale for the synthetic generators
    #[arg(long, value_name = "S")]
    noise_sigma: Option<f64>,
}

#[derive(Args)]
struct ModelArgs {
    /// Boosting rounds
    #[arg(long, value_name = "N")]
    gbt_rounds: Option<usize>,
    /// Maximum tree depth
    #[arg(long, value_name = "D")]
    gbt_depth: Option<usize>,
    /// Boosting learning rate
    #[arg(long, value_name = "LR")]
    gbt_lr: Option<f64>,
    /// L2 penalty on leaf weights
    #[arg(long, value_name = "L")]
    gbt_lambda: Option<f64>,
    /// Flat penalty per split
    #[arg(long, value_name = "G")]
    gbt_gamma: Option<f64>,
    /// Minimum hessian sum per child
    #[arg(long, value_name = "W")]
    gbt_min_child_weight: Option<f64>,
    /// Neighbor count
    #[arg(long, value_name = "K")]
    knn_k: Option<usize>,
    /// SGD learning rate
    #[arg(long, value_name = "LR")]
    sgd_lr: Option<f64>,
    /// SGD epochs
    #[arg(long, value_name = "N")]
    sgd_epochs: Option<usize>,
    /// SGD L2 penalty
    #[arg(long, value_name = "L")]
    sgd_l2: Option<f64>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Generator seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Which model to train: gbt, knn, sgd, or gnb
    #[arg(long, value_name = "MODEL")]
    model: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Feature-selection threshold on |Pearson r|
    #[arg(long, value_name = "T")]
    threshold: Option<f64>,
    #[command(flatten)]
    models: ModelArgs,
    /// Output artifact path
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Trained model artifact (from `flowml train`)
    #[arg(long, value_name = "FILE")]
    artifact: PathBuf,
    /// Labeled flow CSV to score against
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Key-value config file; flags given here override it
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fraction of rows per class assigned to the training split
    #[arg(long, value_name = "F")]
    train_fraction: Option<f64>,
    /// Feature-selection threshold on |Pearson r|
    #[arg(long, value_name = "T")]
    threshold: Option<f64>,
    #[command(flatten)]
    models: ModelArgs,
    /// Output directory for report.txt, heatmap.csv, and report.json
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Train(args) => train(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Bench(args) => bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let msg: String = err
                .to_string()
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ");
            eprintln!("error: {}: {}", err.kind(), msg);
            ExitCode::FAILURE
        }
    }
}

fn generate(args: GenerateArgs) -> Result<()> {
    let kind = match &args.source.synth {
        Some(name) => SynthKind::parse(name)?,
        None => return Err(Error::Config("generate requires --synth".into())),
    };
    if args.source.input.is_some() {
        return Err(Error::Config("generate takes --synth, not --input".into()));
    }
    let cfg = SynthConfig::new(
        args.source.rows.unwrap_or(1000),
        args.source.attack_fraction.unwrap_or(0.5),
        args.seed,
        args.source.noise_sigma.unwrap_or(1.0),
    )?;
    let ds = match kind {
        SynthKind::Blobs => gen_blobs(&cfg)?,
        SynthKind::IotMix => gen_iot_mix(&cfg)?,
        SynthKind::Xor => {
            return Err(Error::Config(
                "xor emits a bare feature matrix with no flow-CSV form; \
                 use it directly via `bench --synth xor`"
                    .into(),
            ))
        }
    };
    ds.write_csv(&args.out)?;
    println!("wrote {} rows to {}", ds.len(), args.out.display());
    Ok(())
}

/// Resolve source + hyperparameter flags (and an optional config file for
/// `bench`) into a full run configuration.
fn resolve_config(
    source: &SourceArgs,
    file: &FileConfig,
    seed: Option<u64>,
    train_fraction: Option<f64>,
    threshold: Option<f64>,
    models: &ModelArgs,
    out: Option<PathBuf>,
) -> Result<BenchConfig> {
    // a source given on the command line hides the file's source entirely
    let (input, synth) = if source.input.is_some() || source.synth.is_some() {
        (source.input.clone(), source.synth.clone())
    } else {
        (file.input.clone(), file.synth.clone())
    };
    let data_source = match (input, synth) {
        (Some(path), None) => DataSource::Input(path),
        (None, Some(name)) => DataSource::Synth {
            kind: SynthKind::parse(&name)?,
            rows: source.rows.or(file.rows).unwrap_or(1000),
            attack_fraction: source
                .attack_fraction
                .or(file.attack_fraction)
                .unwrap_or(0.5),
            noise_sigma: source.noise_sigma.or(file.noise_sigma).unwrap_or(1.0),
        },
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "--input and --synth are mutually exclusive".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Config(
                "a data source is required: --input FILE or --synth KIND".into(),
            ))
        }
    };

    let seed = seed.or(file.seed).unwrap_or(42);
    let defaults_gbt = GbtParams::default();
    let defaults_sgd = SgdConfig::default();
    Ok(BenchConfig {
        source: data_source,
        train_fraction: train_fraction.or(file.train_fraction).unwrap_or(0.8),
        seed,
        threshold: threshold.or(file.threshold).unwrap_or(0.05),
        gbt: GbtParams {
            n_rounds: models.gbt_rounds.or(file.gbt.rounds).unwrap_or(defaults_gbt.n_rounds),
            max_depth: models.gbt_depth.or(file.gbt.depth).unwrap_or(defaults_gbt.max_depth),
            learning_rate: models
                .gbt_lr
                .or(file.gbt.learning_rate)
                .unwrap_or(defaults_gbt.learning_rate),
            lambda: models.gbt_lambda.or(file.gbt.lambda).unwrap_or(defaults_gbt.lambda),
            gamma: models.gbt_gamma.or(file.gbt.gamma).unwrap_or(defaults_gbt.gamma),
            min_child_weight: models
                .gbt_min_child_weight
                .or(file.gbt.min_child_weight)
                .unwrap_or(defaults_gbt.min_child_weight),
        },
        knn_k: models.knn_k.or(file.knn.k).unwrap_or(5),
        sgd: SgdConfig {
            learning_rate: models
                .sgd_lr
                .or(file.sgd.learning_rate)
                .unwrap_or(defaults_sgd.learning_rate),
            epochs: models.sgd_epochs.or(file.sgd.epochs).unwrap_or(defaults_sgd.epochs),
            l2: models.sgd_l2.or(file.sgd.l2).unwrap_or(defaults_sgd.l2),
            seed,
        },
        out_dir: out.or(file.out.clone()).unwrap_or_else(|| PathBuf::from("bench-out")),
    })
}

fn train(args: TrainArgs) -> Result<()> {
    let cfg = resolve_config(
        &args.source,
        &FileConfig::default(),
        Some(args.seed),
        None,
        args.threshold,
        &args.models,
        None,
    )?;
    let artifact = train_single(&cfg, &args.model)?;
    artifact.save(&args.out)?;
    println!(
        "trained {} and wrote {}",
        artifact.model.display_name(),
        args.out.display()
    );
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let artifact = ModelArtifact::load(&args.artifact)?;
    let text = std::fs::read_to_string(&args.input)?;
    let (ds, stats) = clean(&parse_flow_csv(&text)?)?;
    let full = to_matrix(&ds);
    let rows = artifact.prepare(&full)?;
    let truth = full.labels().expect("flow matrices carry labels");
    let pred = artifact.model.predict_labels(&rows)?;
    let cm = confusion(truth, &pred)?;
    let m = report(&cm);

    println!("Model: {} (training seed {})", artifact.model.display_name(), artifact.seed);
    println!(
        "Rows: {} scored ({} dropped by cleaning)",
        stats.rows_out,
        stats.rows_in - stats.rows_out
    );
    println!("Confusion: tp={} tn={} fp={} fn={}", cm.tp, cm.tn, cm.fp, cm.r#fn);
    println!("Accuracy:  {:.2}%", m.accuracy * 100.0);
    println!("Precision: {:.2}%", m.precision * 100.0);
    println!("Recall:    {:.2}%", m.recall * 100.0);
    println!("F1 Score:  {:.2}%", m.f1 * 100.0);
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = resolve_config(
        &args.source,
        &file,
        args.seed,
        args.train_fraction,
        args.threshold,
        &args.models,
        args.out.clone(),
    )?;
    let report = run_benchmark(&cfg)?;
    write_outputs(&report, &cfg.out_dir)?;
    print!("{}", emit_table(&report));
    println!();
    println!(
        "rows: {} total, {} train, {} test; kept features: {}",
        report.rows_total,
        report.rows_train,
        report.rows_test,
        report.kept_features.join(", ")
    );
    println!("config digest: {}", report.config_digest);
    println!("reports written to {}", cfg.out_dir.display());
    Ok(())
}
