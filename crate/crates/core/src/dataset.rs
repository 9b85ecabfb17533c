//! Dataset representation, CSV I/O, fold planning and feature scaling.

use std::hash::{Hash, Hasher};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::rng::{derive_stream, RngStream};

pub const SAFE: u8 = 0;
pub const UNSAFE: u8 = 1;
pub const CLASS_COLUMN: &str = "class";

/// One labeled record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub features: Vec<f64>,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub instances: Vec<Instance>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, instances: Vec<Instance>) -> Result<Self> {
        let d = feature_names.len();
        for (i, inst) in instances.iter().enumerate() {
            if inst.features.len() != d {
                return Err(Error::data(format!(
                    "instance {i} has {} features, expected {d}",
                    inst.features.len()
                )));
            }
            if inst.label > 1 {
                return Err(Error::data(format!("instance {i} has non-binary label {}", inst.label)));
            }
        }
        Ok(Dataset {
            feature_names,
            instances,
        })
    }

    /// Builds a dataset with generated feature names `x0, x1, ...`.
    pub fn from_rows(rows: &[(Vec<f64>, u8)]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.0.len());
        let names = (0..d).map(|i| format!("x{i}")).collect();
        let instances = rows
            .iter()
            .map(|(f, l)| Instance {
                features: f.clone(),
                label: *l,
            })
            .collect();
        Dataset::new(names, instances)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.instances.iter().map(|i| i.label).collect()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        class_counts(&self.instances)
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
        }
    }

    /// Row-major feature block.
    pub fn flat_features(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len() * self.dim());
        for inst in &self.instances {
            out.extend_from_slice(&inst.features);
        }
        out
    }

    /// Keeps only the listed feature columns, in the given order.
    pub fn project(&self, columns: &[usize]) -> Dataset {
        Dataset {
            feature_names: columns.iter().map(|&c| self.feature_names[c].clone()).collect(),
            instances: self
                .instances
                .iter()
                .map(|inst| Instance {
                    features: columns.iter().map(|&c| inst.features[c]).collect(),
                    label: inst.label,
                })
                .collect(),
        }
    }

    /// 64-bit fingerprint of the exact feature bits and labels.
    pub fn content_hash(&self) -> u64 {
        content_hash(&self.instances)
    }
}

pub fn content_hash(instances: &[Instance]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    instances.len().hash(&mut h);
    for inst in instances {
        for f in &inst.features {
            f.to_bits().hash(&mut h);
        }
        inst.label.hash(&mut h);
    }
    h.finish()
}

pub fn class_counts(instances: &[Instance]) -> [usize; 2] {
    let mut c = [0usize; 2];
    for inst in instances {
        c[inst.label as usize] += 1;
    }
    c
}

/// Majority label and its share. Ties go to label 0.
pub fn majority_class(instances: &[Instance]) -> Result<(u8, f64)> {
    if instances.is_empty() {
        return Err(Error::data("majority of an empty set"));
    }
    let c = class_counts(instances);
    let label = if c[1] > c[0] { UNSAFE } else { SAFE };
    Ok((label, c[label as usize] as f64 / instances.len() as f64))
}

// ---------------------------------------------------------------------------
// CSV

/// One parsed CSV row; `label` is `None` when the file has no class column.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub line: u64,
    pub features: Vec<f64>,
    pub label: Option<u8>,
}

/// Header information of a feature CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvHeader {
    pub feature_names: Vec<String>,
    pub has_class: bool,
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(record: &csv::StringRecord) -> Result<CsvHeader> {
    let cols: Vec<String> = record.iter().map(|s| s.trim().to_string()).collect();
    let has_class = cols.last().is_some_and(|c| c == CLASS_COLUMN);
    let feature_names: Vec<String> = if has_class {
        cols[..cols.len() - 1].to_vec()
    } else {
        cols
    };
    if feature_names.is_empty() {
        return Err(parse_err(1, "header has no feature columns"));
    }
    if feature_names.iter().any(|c| c.is_empty() || c == CLASS_COLUMN) {
        return Err(parse_err(1, "malformed header"));
    }
    Ok(CsvHeader {
        feature_names,
        has_class,
    })
}

fn parse_row(record: &csv::StringRecord, header: &CsvHeader, line: u64) -> Result<CsvRow> {
    let expected = header.feature_names.len() + usize::from(header.has_class);
    if record.len() != expected {
        return Err(parse_err(
            line,
            format!("expected {expected} fields, found {}", record.len()),
        ));
    }
    let d = header.feature_names.len();
    let mut features = Vec::with_capacity(d);
    for (i, field) in record.iter().take(d).enumerate() {
        let v: f64 = field.trim().parse().map_err(|_| {
            parse_err(
                line,
                format!("column {} is not a number: {field:?}", header.feature_names[i]),
            )
        })?;
        if !v.is_finite() {
            return Err(parse_err(
                line,
                format!("column {} is not finite", header.feature_names[i]),
            ));
        }
        features.push(v);
    }
    let label = if header.has_class {
        let raw = record.get(d).unwrap_or("").trim();
        match raw {
            "0" => Some(SAFE),
            "1" => Some(UNSAFE),
            other => return Err(parse_err(line, format!("class must be 0 or 1, found {other:?}"))),
        }
    } else {
        None
    };
    Ok(CsvRow { line, features, label })
}

/// Streaming reader that yields one result per data row, so callers can skip
/// bad rows and keep going.
pub struct CsvRows<R: Read> {
    header: CsvHeader,
    reader: csv::Reader<R>,
    record: csv::StringRecord,
}

impl<R: Read> CsvRows<R> {
    pub fn new(source: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(source);
        let header = match reader.headers() {
            Ok(h) if h.is_empty() => return Err(parse_err(1, "missing header")),
            Ok(h) => parse_header(h)?,
            Err(e) => return Err(parse_err(1, e.to_string())),
        };
        Ok(CsvRows {
            header,
            reader,
            record: csv::StringRecord::new(),
        })
    }

    pub fn header(&self) -> &CsvHeader {
        &self.header
    }
}

impl<R: Read> Iterator for CsvRows<R> {
    type Item = Result<CsvRow>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.reader.read_record(&mut self.record) {
            Ok(false) => None,
            Ok(true) => {
                let line = self.record.position().map_or(0, |p| p.line());
                Some(parse_row(&self.record, &self.header, line))
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                Some(Err(parse_err(line, e.to_string())))
            }
        }
    }
}

/// Reads a labeled dataset; the last header column must be `class`.
pub fn read_csv_from<R: Read>(source: R) -> Result<Dataset> {
    let rows = CsvRows::new(source)?;
    if !rows.header().has_class {
        return Err(parse_err(1, "header lacks a trailing class column"));
    }
    let names = rows.header().feature_names.clone();
    let mut instances = Vec::new();
    for row in rows {
        let row = row?;
        instances.push(Instance {
            features: row.features,
            label: row.label.expect("class column present"),
        });
    }
    Dataset::new(names, instances)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let file = std::fs::File::open(path.as_ref())?;
    read_csv_from(std::io::BufReader::new(file))
}

/// Writes the dataset with shortest round-trip float formatting.
pub fn write_csv_to<W: Write>(dataset: &Dataset, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let mut header: Vec<&str> = dataset.feature_names.iter().map(String::as_str).collect();
    header.push(CLASS_COLUMN);
    w.write_record(&header)?;
    let mut fields: Vec<String> = Vec::with_capacity(header.len());
    for inst in &dataset.instances {
        fields.clear();
        fields.extend(inst.features.iter().map(|v| v.to_string()));
        fields.push(inst.label.to_string());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    write_csv_to(dataset, std::io::BufWriter::new(file))
}

// ---------------------------------------------------------------------------
// Folds

/// Assignment of every instance to one of `k` test folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
    pub stratified: bool,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Round-robin fold assignment over shuffled indices. With `stratified`, the
/// shuffled class-0 indices are followed by the shuffled class-1 indices, so
/// both overall and per-class fold counts differ by at most one.
pub(crate) fn assign_folds(labels: &[u8], k: usize, rng: &mut RngStream, stratified: bool) -> Vec<usize> {
    let mut order: Vec<usize> = Vec::with_capacity(labels.len());
    if stratified {
        for class in [SAFE, UNSAFE] {
            let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            rng.shuffle(&mut idx);
            order.extend(idx);
        }
    } else {
        order.extend(0..labels.len());
        rng.shuffle(&mut order);
    }
    let mut assignments = vec![0; labels.len()];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    assignments
}

/// Seeded (optionally stratified) k-fold partition.
pub fn make_folds(dataset: &Dataset, k: usize, seed: u64, stratified: bool) -> Result<FoldPlan> {
    make_folds_for_labels(&dataset.labels(), k, seed, stratified)
}

pub fn make_folds_for_labels(labels: &[u8], k: usize, seed: u64, stratified: bool) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::data(format!("k must be at least 2, got {k}")));
    }
    if k > labels.len() {
        return Err(Error::data(format!("k = {k} exceeds dataset size {}", labels.len())));
    }
    if stratified {
        let mut counts = [0usize; 2];
        for &l in labels {
            counts[l as usize] += 1;
        }
        for (class, &c) in counts.iter().enumerate() {
            if c > 0 && c < k {
                return Err(Error::data(format!(
                    "class {class} has {c} members, fewer than k = {k}"
                )));
            }
        }
    }
    let mut rng = derive_stream(seed, &[crate::numerics::rng::tags::FOLDS]);
    Ok(FoldPlan {
        k,
        assignments: assign_folds(labels, k, &mut rng, stratified),
        seed,
        stratified,
    })
}

// ---------------------------------------------------------------------------
// Scaling

/// Per-feature min-max map to `[0, 1]`. Constant features map to 0.5 and
/// values outside the training range are not clamped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Scaler {
    #[inline]
    pub fn transform_value(&self, j: usize, v: f64) -> f64 {
        let span = self.max[j] - self.min[j];
        if span > 0.0 {
            (v - self.min[j]) / span
        } else {
            0.5
        }
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| self.transform_value(j, v))
            .collect()
    }

    pub fn transform_into(&self, row: &[f64], out: &mut [f64]) {
        for (j, (&v, o)) in row.iter().zip(out.iter_mut()).enumerate() {
            *o = self.transform_value(j, v);
        }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }
}

pub fn fit_scaler(train: &[Instance]) -> Result<Scaler> {
    let first = train
        .first()
        .ok_or_else(|| Error::data("cannot fit a scaler on an empty slice"))?;
    let mut min = first.features.clone();
    let mut max = first.features.clone();
    for inst in &train[1..] {
        for (j, &v) in inst.features.iter().enumerate() {
            if v < min[j] {
                min[j] = v;
            }
            if v > max[j] {
                max[j] = v;
            }
        }
    }
    Ok(Scaler { min, max })
}

pub fn apply_scaler(scaler: &Scaler, instances: &[Instance]) -> Vec<Instance> {
    instances
        .iter()
        .map(|i| Instance {
            features: scaler.transform(&i.features),
            label: i.label,
        })
        .collect()
}
