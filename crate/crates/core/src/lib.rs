//! Building blocks for benchmarking DDoS flow classifiers: dataset
//! ingestion and synthesis, preprocessing, four from-scratch models, binary
//! classification metrics, and a seeded end-to-end benchmark pipeline.
//!
//! Everything downstream of a seed is deterministic; identical configs
//! produce identical predictions, reports, and serialized output.

pub mod bench;
pub mod error;
pub mod flowdata;
pub mod metrics;
pub mod models;
pub mod preprocess;
pub mod synth;

mod fs_util;

pub use bench::{run_benchmark, BenchConfig, BenchReport, DataSource, SynthKind};
pub use error::{Error, Result};
pub use flowdata::{CleanStats, Dataset, FeatureMatrix, FlowRecord, Protocol};
pub use metrics::{ConfusionMatrix, MetricReport};
pub use models::{ModelArtifact, TrainedModel};
pub use preprocess::{FeatureMask, ScalerParams};
pub use synth::SynthConfig;
