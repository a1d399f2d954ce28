//! Flow dataset ingestion: CSV parsing, cleaning, one-hot encoding, and
//! stratified train/test splitting.
//!
//! The on-disk format is a fixed five-column CSV:
//!
//! ```text
//! pkt_size_mean,pkt_rate,duration,protocol,label
//! 512,100.0,2.5,TCP,ddos
//! ```
//!
//! Numeric fields that fail to parse are kept as a missing marker (NaN) so
//! that [`clean`] can account for them; labels must be `benign` or `ddos`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact header required by [`parse_flow_csv`].
pub const CSV_HEADER: &str = "pkt_size_mean,pkt_rate,duration,protocol,label";

/// Transport protocol tag. Anything outside the closed set maps to `Other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Protocol {
    Tcp,
    Udp,
    Icmp,
    Other,
}

impl Protocol {
    pub fn from_tag(tag: &str) -> Protocol {
        match tag {
            "TCP" => Protocol::Tcp,
            "UDP" => Protocol::Udp,
            "ICMP" => Protocol::Icmp,
            _ => Protocol::Other,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Protocol::Tcp => "TCP",
            Protocol::Udp => "UDP",
            Protocol::Icmp => "ICMP",
            Protocol::Other => "OTHER",
        }
    }

    /// One-hot position in the encoded matrix (TCP, UDP, ICMP, OTHER).
    fn one_hot_index(&self) -> usize {
        match self {
            Protocol::Tcp => 0,
            Protocol::Udp => 1,
            Protocol::Icmp => 2,
            Protocol::Other => 3,
        }
    }
}

/// One network flow. Numeric fields may hold NaN as a missing marker until
/// [`clean`] has run; labels are always 0 (benign) or 1 (ddos).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub pkt_size_mean: f64,
    pub pkt_rate: f64,
    pub duration: f64,
    pub protocol: Protocol,
    pub label: u8,
}

impl FlowRecord {
    fn numeric_fields(&self) -> [f64; 3] {
        [self.pkt_size_mean, self.pkt_rate, self.duration]
    }
}

/// An ordered collection of flow records. Order is stable: it preserves file
/// order on parse and generation order on synthesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub records: Vec<FlowRecord>,
    pub source_name: String,
}

impl Dataset {
    pub fn new(records: Vec<FlowRecord>, source_name: impl Into<String>) -> Dataset {
        Dataset {
            records,
            source_name: source_name.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Serialize to the fixed CSV schema at `path`, atomically.
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        crate::fs_util::write_atomic(path, self.to_csv().as_bytes())
    }

    /// Serialize back to the fixed CSV schema. Floats use the shortest
    /// round-trip representation, so parse(to_csv(ds)) == ds for clean data.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let label = if r.label == 1 { "ddos" } else { "benign" };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.pkt_size_mean,
                r.pkt_rate,
                r.duration,
                r.protocol.tag(),
                label
            ));
        }
        out
    }
}

/// Row-major numeric matrix with named columns and optional 0/1 labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    values: Vec<f64>,
    n_cols: usize,
    column_names: Vec<String>,
    labels: Option<Vec<u8>>,
}

impl FeatureMatrix {
    pub fn new(
        values: Vec<f64>,
        column_names: Vec<String>,
        labels: Option<Vec<u8>>,
    ) -> Result<FeatureMatrix> {
        let n_cols = column_names.len();
        if n_cols == 0 {
            return Err(Error::Argument("matrix needs at least one column".into()));
        }
        if values.len() % n_cols != 0 {
            return Err(Error::Shape {
                expected: n_cols,
                actual: values.len() % n_cols,
            });
        }
        for (i, name) in column_names.iter().enumerate() {
            if column_names[..i].contains(name) {
                return Err(Error::Argument(format!("duplicate column name `{name}`")));
            }
        }
        let n_rows = values.len() / n_cols;
        if let Some(ref l) = labels {
            if l.len() != n_rows {
                return Err(Error::Argument(format!(
                    "label length {} does not match row count {n_rows}",
                    l.len()
                )));
            }
        }
        Ok(FeatureMatrix {
            values,
            n_cols,
            column_names,
            labels,
        })
    }

    pub fn n_rows(&self) -> usize {
        if self.n_cols == 0 {
            0
        } else {
            self.values.len() / self.n_cols
        }
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(c).step_by(self.n_cols).copied()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    /// New matrix keeping only the given columns, in the given order.
    pub fn select_columns(&self, kept: &[usize]) -> Result<FeatureMatrix> {
        for &c in kept {
            if c >= self.n_cols {
                return Err(Error::Argument(format!(
                    "column index {c} out of range for {} columns",
                    self.n_cols
                )));
            }
        }
        let mut values = Vec::with_capacity(self.n_rows() * kept.len());
        for row in self.rows() {
            values.extend(kept.iter().map(|&c| row[c]));
        }
        FeatureMatrix::new(
            values,
            kept.iter().map(|&c| self.column_names[c].clone()).collect(),
            self.labels.clone(),
        )
    }

    /// New matrix containing the given rows, in the given order.
    pub fn take_rows(&self, idx: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(idx.len() * self.n_cols);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| idx.iter().map(|&i| l[i]).collect());
        FeatureMatrix {
            values,
            n_cols: self.n_cols,
            column_names: self.column_names.clone(),
            labels,
        }
    }
}

/// Row accounting for one [`clean`] pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanStats {
    pub rows_in: usize,
    pub rows_dropped_missing: usize,
    pub rows_dropped_range: usize,
    pub rows_out: usize,
}

/// Parse the fixed-schema flow CSV. Line 1 must be the exact header; every
/// data row must have exactly five comma-separated fields. Unparseable
/// numeric fields become NaN markers for [`clean`] to drop; an unknown label
/// string is a hard error.
pub fn parse_flow_csv(text: &str) -> Result<Dataset> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{CSV_HEADER}`, got `{header}`"),
        });
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 5 columns, got {}", fields.len()),
            });
        }
        let numeric = |s: &str| s.trim().parse::<f64>().unwrap_or(f64::NAN);
        let label = match fields[4].trim() {
            "benign" => 0,
            "ddos" => 1,
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown label `{other}`"),
                })
            }
        };
        records.push(FlowRecord {
            pkt_size_mean: numeric(fields[0]),
            pkt_rate: numeric(fields[1]),
            duration: numeric(fields[2]),
            protocol: Protocol::from_tag(fields[3].trim()),
            label,
        });
    }
    Ok(Dataset::new(records, "csv"))
}

/// Drop records with missing/non-finite numerics, then records with negative
/// numerics. Every input row lands in exactly one CleanStats bucket.
pub fn clean(ds: &Dataset) -> Result<(Dataset, CleanStats)> {
    let rows_in = ds.len();
    let mut missing = 0usize;
    let mut range = 0usize;
    let mut kept = Vec::with_capacity(rows_in);
    for r in &ds.records {
        let fields = r.numeric_fields();
        if fields.iter().any(|v| !v.is_finite()) {
            missing += 1;
        } else if fields.iter().any(|v| *v < 0.0) {
            range += 1;
        } else {
            kept.push(r.clone());
        }
    }
    let stats = CleanStats {
        rows_in,
        rows_dropped_missing: missing,
        rows_dropped_range: range,
        rows_out: kept.len(),
    };
    if kept.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok((Dataset::new(kept, ds.source_name.clone()), stats))
}

/// Column names produced by [`to_matrix`], in order.
pub const MATRIX_COLUMNS: [&str; 7] = [
    "pkt_size_mean",
    "pkt_rate",
    "duration",
    "proto_TCP",
    "proto_UDP",
    "proto_ICMP",
    "proto_OTHER",
];

/// Encode a cleaned dataset as a 7-column matrix: the three numeric features
/// in declared order followed by the one-hot protocol block. Row i of the
/// matrix corresponds to record i of the dataset.
pub fn to_matrix(ds: &Dataset) -> FeatureMatrix {
    let mut values = Vec::with_capacity(ds.len() * 7);
    let mut labels = Vec::with_capacity(ds.len());
    for r in &ds.records {
        values.extend_from_slice(&[r.pkt_size_mean, r.pkt_rate, r.duration]);
        let mut one_hot = [0.0f64; 4];
        one_hot[r.protocol.one_hot_index()] = 1.0;
        values.extend_from_slice(&one_hot);
        labels.push(r.label);
    }
    FeatureMatrix {
        values,
        n_cols: 7,
        column_names: MATRIX_COLUMNS.iter().map(|s| s.to_string()).collect(),
        labels: Some(labels),
    }
}

/// Seeded stratified split. Each class's row indices are shuffled with a
/// ChaCha8 generator seeded from `seed`, then cut at
/// `round(train_fraction * class_count)`. Deterministic for a fixed seed.
pub fn stratified_split(
    m: &FeatureMatrix,
    train_fraction: f64,
    seed: u64,
) -> Result<(FeatureMatrix, FeatureMatrix)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Stratify(format!(
            "train_fraction must be in (0,1), got {train_fraction}"
        )));
    }
    let labels = m
        .labels()
        .ok_or_else(|| Error::Stratify("matrix has no labels".into()))?;

    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &l) in labels.iter().enumerate() {
        if l > 1 {
            return Err(Error::Stratify(format!("non-binary label {l} at row {i}")));
        }
        by_class[l as usize].push(i);
    }
    for (class, idx) in by_class.iter().enumerate() {
        if idx.len() < 2 {
            return Err(Error::Stratify(format!(
                "class {class} has {} rows; need at least 2",
                idx.len()
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for idx in by_class.iter_mut() {
        idx.shuffle(&mut rng);
        let cut = (train_fraction * idx.len() as f64).round() as usize;
        train_idx.extend_from_slice(&idx[..cut]);
        test_idx.extend_from_slice(&idx[cut..]);
    }
    Ok((m.take_rows(&train_idx), m.take_rows(&test_idx)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(ps: f64, rate: f64, dur: f64, proto: Protocol, label: u8) -> FlowRecord {
        FlowRecord {
            pkt_size_mean: ps,
            pkt_rate: rate,
            duration: dur,
            protocol: proto,
            label,
        }
    }

    #[test]
    fn parse_single_row() {
        let ds = parse_flow_csv("pkt_size_mean,pkt_rate,duration,protocol,label\n512,100.0,2.5,TCP,ddos\n")
            .unwrap();
        assert_eq!(ds.len(), 1);
        let r = &ds.records[0];
        assert_eq!(r.pkt_size_mean, 512.0);
        assert_eq!(r.pkt_rate, 100.0);
        assert_eq!(r.duration, 2.5);
        assert_eq!(r.protocol, Protocol::Tcp);
        assert_eq!(r.label, 1);
    }

    #[test]
    fn parse_header_only() {
        let ds = parse_flow_csv("pkt_size_mean,pkt_rate,duration,protocol,label\n").unwrap();
        assert_eq!(ds.len(), 0);
    }

    #[test]
    fn parse_crlf_line_endings() {
        let ds = parse_flow_csv("pkt_size_mean,pkt_rate,duration,protocol,label\r\n1,2,3,UDP,benign\r\n")
            .unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.records[0].label, 0);
    }

    #[test]
    fn parse_wrong_column_count_cites_line() {
        let err = parse_flow_csv("pkt_size_mean,pkt_rate,duration,protocol,label\n1,2,3,TCP\n")
            .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_bad_header() {
        let err = parse_flow_csv("a,b,c,d,e\n").unwrap_err();
        assert_eq!(err.kind(), "parse");
    }

    #[test]
    fn parse_rejects_unknown_label() {
        let err = parse_flow_csv("pkt_size_mean,pkt_rate,duration,protocol,label\n1,2,3,TCP,attack\n")
            .unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("attack"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_unknown_protocol_maps_to_other() {
        let ds = parse_flow_csv("pkt_size_mean,pkt_rate,duration,protocol,label\n1,2,3,GRE,benign\n")
            .unwrap();
        assert_eq!(ds.records[0].protocol, Protocol::Other);
    }

    #[test]
    fn parse_bad_numeric_becomes_missing_marker() {
        let ds = parse_flow_csv("pkt_size_mean,pkt_rate,duration,protocol,label\n1,abc,3,TCP,benign\n")
            .unwrap();
        assert!(ds.records[0].pkt_rate.is_nan());
    }

    #[test]
    fn clean_keeps_valid_rows() {
        let ds = Dataset::new(
            vec![
                rec(1.0, 2.0, 3.0, Protocol::Tcp, 0),
                rec(4.0, 5.0, 6.0, Protocol::Udp, 1),
                rec(7.0, 8.0, 9.0, Protocol::Icmp, 0),
            ],
            "t",
        );
        let (out, stats) = clean(&ds).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(
            stats,
            CleanStats {
                rows_in: 3,
                rows_dropped_missing: 0,
                rows_dropped_range: 0,
                rows_out: 3
            }
        );
    }

    #[test]
    fn clean_drops_missing() {
        let mut records = vec![
            rec(1.0, 2.0, 3.0, Protocol::Tcp, 0),
            rec(4.0, 5.0, 6.0, Protocol::Udp, 1),
            rec(7.0, 8.0, 9.0, Protocol::Icmp, 0),
            rec(10.0, 11.0, 12.0, Protocol::Tcp, 1),
        ];
        records.push(rec(1.0, 1.0, f64::NAN, Protocol::Tcp, 0));
        let (out, stats) = clean(&Dataset::new(records, "t")).unwrap();
        assert_eq!(out.len(), 4);
        assert_eq!(stats.rows_dropped_missing, 1);
        assert_eq!(stats.rows_dropped_range, 0);
    }

    #[test]
    fn clean_drops_negative_range() {
        let records = vec![
            rec(1.0, -1.0, 3.0, Protocol::Tcp, 0),
            rec(4.0, 5.0, 6.0, Protocol::Udp, 1),
        ];
        let (out, stats) = clean(&Dataset::new(records, "t")).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(stats.rows_dropped_range, 1);
        assert_eq!(stats.rows_out, 1);
    }

    #[test]
    fn clean_empty_result_is_error() {
        let records = vec![rec(-1.0, 1.0, 1.0, Protocol::Tcp, 0)];
        let err = clean(&Dataset::new(records, "t")).unwrap_err();
        assert_eq!(err.kind(), "empty-dataset");
    }

    #[test]
    fn clean_stats_account_for_every_row() {
        let records = vec![
            rec(1.0, 2.0, 3.0, Protocol::Tcp, 0),
            rec(f64::INFINITY, 2.0, 3.0, Protocol::Tcp, 0),
            rec(1.0, 2.0, -3.0, Protocol::Tcp, 1),
        ];
        let (_, stats) = clean(&Dataset::new(records, "t")).unwrap();
        assert_eq!(
            stats.rows_out,
            stats.rows_in - stats.rows_dropped_missing - stats.rows_dropped_range
        );
    }

    #[test]
    fn to_matrix_one_hot_tcp() {
        let ds = Dataset::new(vec![rec(1.0, 2.0, 3.0, Protocol::Tcp, 1)], "t");
        let m = to_matrix(&ds);
        assert_eq!(m.row(0), &[1.0, 2.0, 3.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn to_matrix_one_hot_other() {
        let ds = Dataset::new(vec![rec(1.0, 2.0, 3.0, Protocol::Other, 0)], "t");
        let m = to_matrix(&ds);
        assert_eq!(m.row(0), &[1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn to_matrix_shape_and_labels() {
        let ds = Dataset::new(
            vec![
                rec(1.0, 2.0, 3.0, Protocol::Tcp, 0),
                rec(4.0, 5.0, 6.0, Protocol::Udp, 1),
            ],
            "t",
        );
        let m = to_matrix(&ds);
        assert_eq!(m.n_rows(), 2);
        assert_eq!(m.n_cols(), 7);
        assert_eq!(m.labels(), Some(&[0u8, 1][..]));
        assert_eq!(m.column_names().len(), 7);
    }

    fn labeled_matrix(labels: &[u8]) -> FeatureMatrix {
        // single column holding the row index, so rows stay identifiable
        let values: Vec<f64> = (0..labels.len()).map(|i| i as f64).collect();
        FeatureMatrix::new(values, vec!["row_id".into()], Some(labels.to_vec())).unwrap()
    }

    #[test]
    fn split_counts_follow_round_rule() {
        let labels: Vec<u8> = std::iter::repeat_n(0u8, 50)
            .chain(std::iter::repeat_n(1u8, 50))
            .collect();
        let m = labeled_matrix(&labels);
        let (train, test) = stratified_split(&m, 0.8, 42).unwrap();
        let count = |m: &FeatureMatrix, class: u8| {
            m.labels().unwrap().iter().filter(|&&l| l == class).count()
        };
        assert_eq!(count(&train, 0), 40);
        assert_eq!(count(&train, 1), 40);
        assert_eq!(count(&test, 0), 10);
        assert_eq!(count(&test, 1), 10);
    }

    #[test]
    fn split_is_deterministic() {
        let labels: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        let m = labeled_matrix(&labels);
        let (tr1, te1) = stratified_split(&m, 0.8, 42).unwrap();
        let (tr2, te2) = stratified_split(&m, 0.8, 42).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);
    }

    #[test]
    fn split_smallest_case() {
        let m = labeled_matrix(&[0, 0, 1, 1]);
        let (train, test) = stratified_split(&m, 0.5, 7).unwrap();
        assert_eq!(train.n_rows(), 2);
        assert_eq!(test.n_rows(), 2);
        let sum = |m: &FeatureMatrix| -> u32 {
            m.labels().unwrap().iter().map(|&l| l as u32).sum()
        };
        assert_eq!(sum(&train), 1);
        assert_eq!(sum(&test), 1);
    }

    #[test]
    fn split_rejects_small_class() {
        let m = labeled_matrix(&[0, 0, 0, 1]);
        let err = stratified_split(&m, 0.5, 7).unwrap_err();
        assert_eq!(err.kind(), "stratify");
    }

    proptest! {
        #[test]
        fn clean_is_idempotent(
            fields in proptest::collection::vec(
                (any::<f64>(), any::<f64>(), any::<f64>(), 0u8..2), 1..60
            )
        ) {
            let records: Vec<FlowRecord> = fields
                .into_iter()
                .map(|(a, b, c, l)| rec(a, b, c, Protocol::Tcp, l))
                .collect();
            let ds = Dataset::new(records, "t");
            if let Ok((once, _)) = clean(&ds) {
                let (twice, stats) = clean(&once).unwrap();
                prop_assert_eq!(&once, &twice);
                prop_assert_eq!(stats.rows_dropped_missing, 0);
                prop_assert_eq!(stats.rows_dropped_range, 0);
            }
        }

        #[test]
        fn split_is_a_partition(
            labels in proptest::collection::vec(0u8..2, 4..120),
            frac in 0.05f64..0.95,
            seed in any::<u64>(),
        ) {
            prop_assume!(labels.iter().filter(|&&l| l == 0).count() >= 2);
            prop_assume!(labels.iter().filter(|&&l| l == 1).count() >= 2);
            let m = labeled_matrix(&labels);
            let (train, test) = stratified_split(&m, frac, seed).unwrap();
            let mut seen: Vec<f64> = train
                .column(0)
                .chain(test.column(0))
                .collect();
            seen.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let expected: Vec<f64> = (0..labels.len()).map(|i| i as f64).collect();
            prop_assert_eq!(seen, expected);
        }

        #[test]
        fn to_matrix_preserves_row_order(
            rows in proptest::collection::vec((0.0f64..1e6, 0.0f64..1e6, 0.0f64..1e6, 0u8..2), 1..50)
        ) {
            let records: Vec<FlowRecord> = rows
                .iter()
                .map(|&(a, b, c, l)| rec(a, b, c, Protocol::Udp, l))
                .collect();
            let ds = Dataset::new(records, "t");
            let m = to_matrix(&ds);
            for (i, &(a, b, c, l)) in rows.iter().enumerate() {
                prop_assert_eq!(&m.row(i)[..3], &[a, b, c][..]);
                prop_assert_eq!(m.labels().unwrap()[i], l);
            }
        }
    }
}
