//! Benchmark orchestration: load or synthesize a dataset, run the full
//! clean/encode/split/select/scale pipeline, fit all four classifiers, and
//! assemble a comparison report.
//!
//! Report text output is fully determined by the data (timings live only in
//! the structured report), so two runs with the same config produce
//! byte-identical `report.txt` and `heatmap.csv`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::flowdata::{clean, parse_flow_csv, stratified_split, to_matrix, FeatureMatrix};
use crate::metrics::{confusion, report, ConfusionMatrix, MetricReport};
use crate::models::{
    fit_gbt, fit_gnb, fit_knn, fit_sgd, GbtParams, ModelArtifact, SgdConfig, TrainedModel,
};
use crate::preprocess::{fit_minmax, select_features, transform_minmax};
use crate::synth::{gen_blobs, gen_iot_mix, gen_xor, SynthConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    Blobs,
    Xor,
    IotMix,
}

impl SynthKind {
    pub fn parse(name: &str) -> Result<SynthKind> {
        match name {
            "blobs" => Ok(SynthKind::Blobs),
            "xor" => Ok(SynthKind::Xor),
            "iotmix" => Ok(SynthKind::IotMix),
            other => Err(Error::Config(format!(
                "unknown synthetic source `{other}` (expected blobs, xor, or iotmix)"
            ))),
        }
    }
}

/// Where benchmark data comes from: exactly one of a CSV file or a synthetic
/// generator spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Input(PathBuf),
    Synth {
        kind: SynthKind,
        rows: usize,
        attack_fraction: f64,
        noise_sigma: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub source: DataSource,
    pub train_fraction: f64,
    pub seed: u64,
    /// Feature-selection threshold on |Pearson r|.
    pub threshold: f64,
    pub gbt: GbtParams,
    pub knn_k: usize,
    pub sgd: SgdConfig,
    pub out_dir: PathBuf,
}

impl BenchConfig {
    /// Defaults for everything but the data source; the SGD stream reuses
    /// the run seed.
    pub fn new(source: DataSource, seed: u64, out_dir: PathBuf) -> BenchConfig {
        BenchConfig {
            source,
            train_fraction: 0.8,
            seed,
            threshold: 0.05,
            gbt: GbtParams::default(),
            knn_k: 5,
            sgd: SgdConfig {
                seed,
                ..SgdConfig::default()
            },
            out_dir,
        }
    }

    /// SHA-256 over the canonical JSON encoding; changes iff a field changes.
    pub fn digest(&self) -> String {
        let encoded = serde_json::to_string(self).expect("config serialization cannot fail");
        let hash = Sha256::digest(encoded.as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRun {
    pub name: String,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricReport,
    pub fit_seconds: f64,
    pub predict_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    /// Exactly four entries, in fixed order: GBT, KNN, SGD-Linear, GaussianNB.
    pub models: Vec<ModelRun>,
    pub seed: u64,
    pub config_digest: String,
    pub rows_total: usize,
    pub rows_train: usize,
    pub rows_test: usize,
    pub kept_features: Vec<String>,
}

/// Build the full-width labeled matrix for a config's data source.
pub fn load_matrix(cfg: &BenchConfig) -> Result<FeatureMatrix> {
    match &cfg.source {
        DataSource::Input(path) => {
            let text = std::fs::read_to_string(path)?;
            let (ds, _) = clean(&parse_flow_csv(&text)?)?;
            Ok(to_matrix(&ds))
        }
        DataSource::Synth {
            kind,
            rows,
            attack_fraction,
            noise_sigma,
        } => {
            let synth = SynthConfig::new(*rows, *attack_fraction, cfg.seed, *noise_sigma)?;
            match kind {
                SynthKind::Blobs => {
                    let (ds, _) = clean(&gen_blobs(&synth)?)?;
                    Ok(to_matrix(&ds))
                }
                SynthKind::IotMix => {
                    let (ds, _) = clean(&gen_iot_mix(&synth)?)?;
                    Ok(to_matrix(&ds))
                }
                SynthKind::Xor => gen_xor(&synth),
            }
        }
    }
}

fn require_both_classes(m: &FeatureMatrix, part: &str) -> Result<()> {
    let labels = m.labels().expect("split matrices keep labels");
    let ones = labels.iter().filter(|&&l| l == 1).count();
    if ones == 0 || ones == labels.len() {
        return Err(Error::Stratify(format!(
            "single-class {part} split; adjust train_fraction or provide more data"
        )));
    }
    Ok(())
}

struct FittedModel {
    model: TrainedModel,
    fit_seconds: f64,
}

fn fit_all(cfg: &BenchConfig, train: &FeatureMatrix) -> Result<Vec<FittedModel>> {
    let timed = |model: Result<TrainedModel>, start: Instant| -> Result<FittedModel> {
        Ok(FittedModel {
            model: model?,
            fit_seconds: start.elapsed().as_secs_f64(),
        })
    };
    let mut fitted = Vec::with_capacity(4);
    let t = Instant::now();
    fitted.push(timed(fit_gbt(train, &cfg.gbt).map(TrainedModel::Gbt), t)?);
    let t = Instant::now();
    fitted.push(timed(fit_knn(train, cfg.knn_k).map(TrainedModel::Knn), t)?);
    let t = Instant::now();
    fitted.push(timed(
        fit_sgd(train, &cfg.sgd).map(TrainedModel::SgdLinear),
        t,
    )?);
    let t = Instant::now();
    fitted.push(timed(fit_gnb(train).map(TrainedModel::GaussianNb), t)?);
    Ok(fitted)
}

/// Run the whole pipeline: load/generate, clean, encode, split, select,
/// scale, fit the four models on the training split, and score them on the
/// test split. Deterministic per seed except for the timing fields.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    let full = load_matrix(cfg)?;
    let (train_raw, test_raw) = stratified_split(&full, cfg.train_fraction, cfg.seed)?;
    require_both_classes(&train_raw, "train")?;
    require_both_classes(&test_raw, "test")?;

    let mask = select_features(&train_raw, cfg.threshold)?;
    let train_sel = train_raw.select_columns(&mask.kept)?;
    let test_sel = test_raw.select_columns(&mask.kept)?;
    let scaler = fit_minmax(&train_sel)?;
    let train = transform_minmax(&scaler, &train_sel)?;
    let test = transform_minmax(&scaler, &test_sel)?;

    let truth = test.labels().expect("test split keeps labels").to_vec();
    let mut models = Vec::with_capacity(4);
    for fitted in fit_all(cfg, &train)? {
        let start = Instant::now();
        let pred = fitted.model.predict_labels(&test)?;
        let predict_seconds = start.elapsed().as_secs_f64();
        let cm = confusion(&truth, &pred)?;
        models.push(ModelRun {
            name: fitted.model.display_name().to_string(),
            confusion: cm,
            metrics: report(&cm),
            fit_seconds: fitted.fit_seconds,
            predict_seconds,
        });
    }

    Ok(BenchReport {
        models,
        seed: cfg.seed,
        config_digest: cfg.digest(),
        rows_total: full.n_rows(),
        rows_train: train.n_rows(),
        rows_test: test.n_rows(),
        kept_features: mask
            .kept
            .iter()
            .map(|&c| train_raw.column_names()[c].clone())
            .collect(),
    })
}

/// Fit one model on the full (unsplit) pipeline output and package it as an
/// artifact. Used by the CLI `train` subcommand.
pub fn train_single(cfg: &BenchConfig, which: &str) -> Result<ModelArtifact> {
    let full = load_matrix(cfg)?;
    require_both_classes(&full, "training")?;
    let mask = select_features(&full, cfg.threshold)?;
    let selected = full.select_columns(&mask.kept)?;
    let scaler = fit_minmax(&selected)?;
    let train = transform_minmax(&scaler, &selected)?;
    let model = match which {
        "gbt" => TrainedModel::Gbt(fit_gbt(&train, &cfg.gbt)?),
        "knn" => TrainedModel::Knn(fit_knn(&train, cfg.knn_k)?),
        "sgd" => TrainedModel::SgdLinear(fit_sgd(&train, &cfg.sgd)?),
        "gnb" => TrainedModel::GaussianNb(fit_gnb(&train)?),
        other => {
            return Err(Error::Config(format!(
                "unknown model `{other}` (expected gbt, knn, sgd, or gnb)"
            )))
        }
    };
    Ok(ModelArtifact {
        model,
        feature_mask: mask,
        scaler,
        seed: cfg.seed,
    })
}

fn format_percent(v: f64) -> String {
    format!("{:.2}%", v * 100.0)
}

/// Render the comparison table: Model | Accuracy | Precision | Recall |
/// F1 Score, percentages with two decimals, one row per model in report
/// order.
pub fn emit_table(r: &BenchReport) -> String {
    let header = format!("{:<10} | Accuracy | Precision | Recall | F1 Score", "Model");
    let mut out = String::new();
    out.push_str(&header);
    out.push('\n');
    out.push_str(&"-".repeat(header.len()));
    out.push('\n');
    for m in &r.models {
        out.push_str(&format!(
            "{:<10} | {} | {} | {} | {}\n",
            m.name,
            format_percent(m.metrics.accuracy),
            format_percent(m.metrics.precision),
            format_percent(m.metrics.recall),
            format_percent(m.metrics.f1),
        ));
    }
    out
}

/// Render the long-form metric CSV (model,metric,value), fractions with six
/// decimals, for external heatmap tooling.
pub fn emit_heatmap_csv(r: &BenchReport) -> String {
    let mut out = String::from("model,metric,value\n");
    for m in &r.models {
        for (metric, value) in [
            ("accuracy", m.metrics.accuracy),
            ("precision", m.metrics.precision),
            ("recall", m.metrics.recall),
            ("f1", m.metrics.f1),
        ] {
            out.push_str(&format!("{},{},{:.6}\n", m.name, metric, value));
        }
    }
    out
}

/// Write `report.txt`, `heatmap.csv`, and `report.json` into `out_dir`,
/// each atomically.
pub fn write_outputs(r: &BenchReport, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    crate::fs_util::write_atomic(&out_dir.join("report.txt"), emit_table(r).as_bytes())?;
    crate::fs_util::write_atomic(&out_dir.join("heatmap.csv"), emit_heatmap_csv(r).as_bytes())?;
    let mut json = serde_json::to_string_pretty(r)?;
    json.push('\n');
    crate::fs_util::write_atomic(&out_dir.join("report.json"), json.as_bytes())?;
    Ok(())
}
