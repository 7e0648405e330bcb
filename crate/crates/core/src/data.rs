//! Tabular ingestion: CSV parsing, schema-driven encoding, train/test
//! splitting and sensitive-group partitioning.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use log::warn;
use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Header plus verbatim string cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }
}

pub fn parse_csv(path: impl AsRef<Path>, delimiter: u8) -> Result<RawTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv_reader(file, delimiter)
}

pub fn parse_csv_reader<R: Read>(reader: R, delimiter: u8) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header: Vec<String> = match records.next() {
        Some(rec) => rec?.iter().map(str::to_string).collect(),
        None => return Err(Error::Empty),
    };
    let mut seen = HashSet::new();
    for h in &header {
        if !seen.insert(h.as_str()) {
            return Err(Error::DuplicateColumn(h.clone()));
        }
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec?;
        if rec.len() != header.len() {
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            return Err(Error::RaggedRow(line));
        }
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(RawTable { header, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnRole {
    Feature,
    Sensitive,
    Label,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Categorical,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub role: ColumnRole,
    pub kind: ColumnKind,
}

impl ColumnSpec {
    pub fn new(name: &str, role: ColumnRole, kind: ColumnKind) -> Self {
        ColumnSpec {
            name: name.to_string(),
            role,
            kind,
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_missing() -> Vec<String> {
    vec![String::new(), "?".to_string()]
}

/// Column roles and label/sensitive binarization rules.
///
/// Table columns not listed in `columns` are ignored. When
/// `sensitive_threshold` is set the sensitive column must be numeric and
/// `A = 1` iff the value exceeds the threshold; otherwise `A = 1` iff the
/// cell equals `privileged_value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub columns: Vec<ColumnSpec>,
    pub favorable_label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub privileged_value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitive_threshold: Option<f64>,
    /// Keep the binarized sensitive attribute as a model input column.
    #[serde(default = "default_true")]
    pub sensitive_as_feature: bool,
    /// Cell values (after trimming) treated as missing.
    #[serde(default = "default_missing")]
    pub missing_values: Vec<String>,
}

impl DatasetSchema {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let schema: DatasetSchema = serde_json::from_str(&text)?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for c in &self.columns {
            if !names.insert(c.name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "column {:?} listed twice",
                    c.name
                )));
            }
        }
        let sensitive: Vec<_> = self
            .columns
            .iter()
            .filter(|c| c.role == ColumnRole::Sensitive)
            .collect();
        let labels = self
            .columns
            .iter()
            .filter(|c| c.role == ColumnRole::Label)
            .count();
        if sensitive.len() != 1 {
            return Err(Error::InvalidSchema(format!(
                "expected exactly one sensitive column, found {}",
                sensitive.len()
            )));
        }
        if labels != 1 {
            return Err(Error::InvalidSchema(format!(
                "expected exactly one label column, found {labels}"
            )));
        }
        match (self.sensitive_threshold, &self.privileged_value) {
            (Some(_), _) if sensitive[0].kind != ColumnKind::Numeric => Err(Error::InvalidSchema(
                "sensitive_threshold requires a numeric sensitive column".into(),
            )),
            (None, None) => Err(Error::InvalidSchema(
                "either privileged_value or sensitive_threshold is required".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn sensitive_column(&self) -> &ColumnSpec {
        self.columns
            .iter()
            .find(|c| c.role == ColumnRole::Sensitive)
            .expect("validated schema has a sensitive column")
    }

    pub fn label_column(&self) -> &ColumnSpec {
        self.columns
            .iter()
            .find(|c| c.role == ColumnRole::Label)
            .expect("validated schema has a label column")
    }
}

/// Schema adapters for the three benchmark datasets with shipped adapters.
///
/// * `adult`: UCI `adult.data` column names; sensitive `sex` with
///   privileged `Male`; label `income`, favorable `>50K`.
/// * `compas`: ProPublica `compas-scores-two-years.csv`; sensitive `race`
///   with privileged `Caucasian`; label `two_year_recid`, favorable `0`
///   (no recidivism).
/// * `german`: UCI Statlog german credit with named columns; sensitive
///   `age` with privileged `age > 25`; label `class`, favorable `1`
///   (good credit).
pub fn builtin_schema(name: &str) -> Result<DatasetSchema> {
    use ColumnKind::{Categorical as C, Numeric as N};
    use ColumnRole::{Drop as D, Feature as F, Label as L, Sensitive as S};
    let (cols, favorable, privileged, threshold): (&[(&str, ColumnRole, ColumnKind)], _, _, _) =
        match name {
            "adult" => (
                &[
                    ("age", F, N),
                    ("workclass", F, C),
                    ("fnlwgt", D, N),
                    ("education", F, C),
                    ("education-num", F, N),
                    ("marital-status", F, C),
                    ("occupation", F, C),
                    ("relationship", F, C),
                    ("race", F, C),
                    ("sex", S, C),
                    ("capital-gain", F, N),
                    ("capital-loss", F, N),
                    ("hours-per-week", F, N),
                    ("native-country", F, C),
                    ("income", L, C),
                ],
                ">50K",
                Some("Male"),
                None,
            ),
            "compas" => (
                &[
                    ("sex", F, C),
                    ("age", F, N),
                    ("race", S, C),
                    ("juv_fel_count", F, N),
                    ("juv_misd_count", F, N),
                    ("juv_other_count", F, N),
                    ("priors_count", F, N),
                    ("c_charge_degree", F, C),
                    ("two_year_recid", L, C),
                ],
                "0",
                Some("Caucasian"),
                None,
            ),
            "german" => (
                &[
                    ("checking_status", F, C),
                    ("duration", F, N),
                    ("credit_history", F, C),
                    ("purpose", F, C),
                    ("credit_amount", F, N),
                    ("savings_status", F, C),
                    ("employment", F, C),
                    ("installment_commitment", F, N),
                    ("personal_status", F, C),
                    ("other_parties", F, C),
                    ("residence_since", F, N),
                    ("property_magnitude", F, C),
                    ("age", S, N),
                    ("other_payment_plans", F, C),
                    ("housing", F, C),
                    ("existing_credits", F, N),
                    ("job", F, C),
                    ("num_dependents", F, N),
                    ("own_telephone", F, C),
                    ("foreign_worker", F, C),
                    ("class", L, C),
                ],
                "1",
                None,
                Some(25.0),
            ),
            other => return Err(Error::UnknownDataset(other.to_string())),
        };
    Ok(DatasetSchema {
        columns: cols
            .iter()
            .map(|&(n, r, k)| ColumnSpec::new(n, r, k))
            .collect(),
        favorable_label: favorable.to_string(),
        privileged_value: privileged.map(str::to_string),
        sensitive_threshold: threshold,
        sensitive_as_feature: true,
        missing_values: default_missing(),
    })
}

/// Numeric design matrix with binary label and binary sensitive attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset {
    x: Array2<f64>,
    y: Vec<u8>,
    a: Vec<u8>,
    feature_names: Vec<String>,
    /// Raw column each feature column was derived from.
    feature_sources: Vec<String>,
    /// Feature columns subject to z-scoring.
    numeric_features: Vec<usize>,
}

impl EncodedDataset {
    /// Builds a dataset whose columns are all treated as already-scaled
    /// numeric features named `x0, x1, ...`.
    pub fn from_parts(x: Array2<f64>, y: Vec<u8>, a: Vec<u8>) -> Result<Self> {
        let names: Vec<String> = (0..x.ncols()).map(|j| format!("x{j}")).collect();
        Self::new(x, y, a, names.clone(), names, Vec::new())
    }

    pub fn new(
        x: Array2<f64>,
        y: Vec<u8>,
        a: Vec<u8>,
        feature_names: Vec<String>,
        feature_sources: Vec<String>,
        numeric_features: Vec<usize>,
    ) -> Result<Self> {
        let n = x.nrows();
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
        if a.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.len(),
            });
        }
        if feature_names.len() != x.ncols() || feature_sources.len() != x.ncols() {
            return Err(Error::DimensionMismatch {
                expected: x.ncols(),
                got: feature_names.len(),
            });
        }
        if x.ncols() == 0 {
            return Err(Error::InvalidDataset("no feature columns".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature matrix"));
        }
        if y.iter().chain(a.iter()).any(|&v| v > 1) {
            return Err(Error::InvalidDataset(
                "labels and groups must be 0/1".into(),
            ));
        }
        if numeric_features.iter().any(|&j| j >= x.ncols()) {
            return Err(Error::InvalidDataset(
                "numeric feature index out of range".into(),
            ));
        }
        Ok(EncodedDataset {
            x,
            y,
            a,
            feature_names,
            feature_sources,
            numeric_features,
        })
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    pub fn a(&self) -> &[u8] {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_sources(&self) -> &[String] {
        &self.feature_sources
    }

    pub fn numeric_features(&self) -> &[usize] {
        &self.numeric_features
    }

    pub fn label_f64(&self, i: usize) -> f64 {
        f64::from(self.y[i])
    }

    /// Rows `idx` in the given order.
    pub fn subset(&self, idx: &[usize]) -> EncodedDataset {
        EncodedDataset {
            x: self.x.select(Axis(0), idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            a: idx.iter().map(|&i| self.a[i]).collect(),
            feature_names: self.feature_names.clone(),
            feature_sources: self.feature_sources.clone(),
            numeric_features: self.numeric_features.clone(),
        }
    }

    /// Keeps only the listed feature columns.
    pub fn select_features(&self, cols: &[usize]) -> Result<EncodedDataset> {
        let remap: HashMap<usize, usize> = cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        EncodedDataset::new(
            self.x.select(Axis(1), cols),
            self.y.clone(),
            self.a.clone(),
            cols.iter()
                .map(|&j| self.feature_names[j].clone())
                .collect(),
            cols.iter()
                .map(|&j| self.feature_sources[j].clone())
                .collect(),
            self.numeric_features
                .iter()
                .filter_map(|j| remap.get(j).copied())
                .collect(),
        )
    }

    /// Errors unless both groups and both labels are present and n >= 2.
    pub fn check_trainable(&self) -> Result<()> {
        if self.n() < 2 {
            return Err(Error::InvalidDataset(format!(
                "need n >= 2, got {}",
                self.n()
            )));
        }
        if !(self.a.contains(&0) && self.a.contains(&1)) {
            return Err(Error::SingleGroup);
        }
        if !(self.y.contains(&0) && self.y.contains(&1)) {
            return Err(Error::SingleClass);
        }
        Ok(())
    }

    pub fn to_csv_writer<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.push("__a");
        header.push("__y");
        w.write_record(&header)?;
        for i in 0..self.n() {
            let mut rec: Vec<String> = self.x.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            rec.push(self.a[i].to_string());
            rec.push(self.y[i].to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Per-column mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    columns: Vec<usize>,
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(ds: &EncodedDataset) -> Self {
        let n = ds.n().max(1) as f64;
        let mut means = Vec::new();
        let mut stds = Vec::new();
        for &j in &ds.numeric_features {
            let col = ds.x.column(j);
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            if std == 0.0 {
                warn!(
                    "feature {:?} is constant on the fitting population; left unscaled",
                    ds.feature_names[j]
                );
            }
            means.push(mean);
            stds.push(if std > 0.0 { std } else { 1.0 });
        }
        Standardizer {
            columns: ds.numeric_features.clone(),
            means,
            stds,
        }
    }

    pub fn apply(&self, ds: &EncodedDataset) -> EncodedDataset {
        let mut out = ds.clone();
        for (k, &j) in self.columns.iter().enumerate() {
            let (m, s) = (self.means[k], self.stds[k]);
            out.x.column_mut(j).mapv_inplace(|v| (v - m) / s);
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EncodeReport {
    pub dropped_missing_rows: usize,
    pub dropped_constant_columns: Vec<String>,
}

/// One-hot/z-score encoding over the whole table.
pub fn encode(table: &RawTable, schema: &DatasetSchema) -> Result<EncodedDataset> {
    let (raw, _) = encode_unscaled(table, schema)?;
    Ok(Standardizer::fit(&raw).apply(&raw))
}

/// Encoding without z-scoring, so scaling statistics can be fitted on a
/// training split afterwards.
///
/// Rows with a missing cell in any used column are dropped. Categorical
/// columns expand to indicators in first-appearance order; columns that are
/// constant over the table are dropped with a warning.
pub fn encode_unscaled(
    table: &RawTable,
    schema: &DatasetSchema,
) -> Result<(EncodedDataset, EncodeReport)> {
    schema.validate()?;
    let used: Vec<(usize, &ColumnSpec)> = schema
        .columns
        .iter()
        .filter(|c| c.role != ColumnRole::Drop)
        .map(|c| table.column_index(&c.name).map(|i| (i, c)))
        .collect::<Result<_>>()?;
    for c in schema.columns.iter().filter(|c| c.role == ColumnRole::Drop) {
        table.column_index(&c.name)?;
    }

    let missing: HashSet<&str> = schema.missing_values.iter().map(String::as_str).collect();
    let mut report = EncodeReport::default();
    let rows: Vec<Vec<&str>> = table
        .rows
        .iter()
        .filter_map(|row| {
            let cells: Vec<&str> = row.iter().map(|c| c.trim()).collect();
            if used.iter().any(|(i, _)| missing.contains(cells[*i])) {
                report.dropped_missing_rows += 1;
                None
            } else {
                Some(cells)
            }
        })
        .collect();
    if report.dropped_missing_rows > 0 {
        warn!(
            "dropped {} rows with missing cells",
            report.dropped_missing_rows
        );
    }
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    let n = rows.len();

    let parse_num = |name: &str, cell: &str| -> Result<f64> {
        cell.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::NonNumericCell {
                column: name.to_string(),
                value: cell.to_string(),
            })
    };

    let label = schema.label_column();
    let label_idx = table.column_index(&label.name)?;
    let y: Vec<u8> = rows
        .iter()
        .map(|r| u8::from(r[label_idx] == schema.favorable_label))
        .collect();
    if !y.contains(&1) {
        return Err(Error::InvalidSchema(format!(
            "favorable label {:?} does not occur in column {:?}",
            schema.favorable_label, label.name
        )));
    }

    let sens = schema.sensitive_column();
    let sens_idx = table.column_index(&sens.name)?;
    let a: Vec<u8> = match (schema.sensitive_threshold, &schema.privileged_value) {
        (Some(t), _) => rows
            .iter()
            .map(|r| parse_num(&sens.name, r[sens_idx]).map(|v| u8::from(v > t)))
            .collect::<Result<_>>()?,
        (None, Some(p)) => {
            let a: Vec<u8> = rows.iter().map(|r| u8::from(r[sens_idx] == p)).collect();
            if !a.contains(&1) {
                return Err(Error::InvalidSchema(format!(
                    "privileged value {p:?} does not occur in column {:?}",
                    sens.name
                )));
            }
            a
        }
        (None, None) => unreachable!("validated schema"),
    };

    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut names = Vec::new();
    let mut sources = Vec::new();
    let mut numeric = Vec::new();
    for &(idx, spec) in &used {
        match spec.role {
            ColumnRole::Feature => match spec.kind {
                ColumnKind::Numeric => {
                    let col: Vec<f64> = rows
                        .iter()
                        .map(|r| parse_num(&spec.name, r[idx]))
                        .collect::<Result<_>>()?;
                    if col.iter().all(|&v| v == col[0]) {
                        warn!("dropping constant column {:?}", spec.name);
                        report.dropped_constant_columns.push(spec.name.clone());
                        continue;
                    }
                    numeric.push(columns.len());
                    columns.push(col);
                    names.push(spec.name.clone());
                    sources.push(spec.name.clone());
                }
                ColumnKind::Categorical => {
                    let mut levels: Vec<&str> = Vec::new();
                    let mut level_of: HashMap<&str, usize> = HashMap::new();
                    for r in &rows {
                        level_of.entry(r[idx]).or_insert_with(|| {
                            levels.push(r[idx]);
                            levels.len() - 1
                        });
                    }
                    if levels.len() < 2 {
                        warn!("dropping constant column {:?}", spec.name);
                        report.dropped_constant_columns.push(spec.name.clone());
                        continue;
                    }
                    for (k, level) in levels.iter().enumerate() {
                        columns.push(
                            rows.iter()
                                .map(|r| if level_of[r[idx]] == k { 1.0 } else { 0.0 })
                                .collect(),
                        );
                        names.push(format!("{}={}", spec.name, level));
                        sources.push(spec.name.clone());
                    }
                }
            },
            ColumnRole::Sensitive if schema.sensitive_as_feature => {
                columns.push(a.iter().map(|&v| f64::from(v)).collect());
                names.push(spec.name.clone());
                sources.push(spec.name.clone());
            }
            _ => {}
        }
    }
    let d = columns.len();
    if d == 0 {
        return Err(Error::InvalidDataset(
            "schema yields no feature columns".into(),
        ));
    }
    let x = Array2::from_shape_fn((n, d), |(i, j)| columns[j][i]);
    let ds = EncodedDataset::new(x, y, a, names, sources, numeric)?;
    Ok((ds, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Stratify {
    None,
    Label,
    #[default]
    LabelSensitive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    #[serde(default)]
    pub stratify_on: Stratify,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            test_fraction: 0.3,
            seed: 0,
            stratify_on: Stratify::LabelSensitive,
        }
    }
}

/// Deterministic (train, test) index sets, each ascending.
pub fn split_indices(ds: &EncodedDataset, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test_fraction must lie in (0, 1), got {}",
            spec.test_fraction
        )));
    }
    let mut strata: BTreeMap<(u8, u8), Vec<usize>> = BTreeMap::new();
    for i in 0..ds.n() {
        let key = match spec.stratify_on {
            Stratify::None => (0, 0),
            Stratify::Label => (ds.y[i], 0),
            Stratify::LabelSensitive => (ds.y[i], ds.a[i]),
        };
        strata.entry(key).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::with_capacity(ds.n());
    let mut test = Vec::new();
    for (_, mut idx) in strata {
        idx.shuffle(&mut rng);
        let n_test = (spec.test_fraction * idx.len() as f64).round() as usize;
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    for (side, idx) in [("train", &train), ("test", &test)] {
        let has = |f: &dyn Fn(usize) -> bool| idx.iter().any(|&i| f(i));
        if !(has(&|i| ds.a[i] == 0) && has(&|i| ds.a[i] == 1)) {
            return Err(Error::DegenerateSplit(format!(
                "{side} split lacks a sensitive group"
            )));
        }
        if !(has(&|i| ds.y[i] == 0) && has(&|i| ds.y[i] == 1)) {
            return Err(Error::DegenerateSplit(format!(
                "{side} split lacks a label class"
            )));
        }
    }
    Ok((train, test))
}

pub fn split(ds: &EncodedDataset, spec: &SplitSpec) -> Result<(EncodedDataset, EncodedDataset)> {
    let (train, test) = split_indices(ds, spec)?;
    Ok((ds.subset(&train), ds.subset(&test)))
}

/// Splits an unscaled dataset and z-scores both sides with statistics
/// fitted on the training side only.
pub fn split_and_standardize(
    raw: &EncodedDataset,
    spec: &SplitSpec,
) -> Result<(EncodedDataset, EncodedDataset)> {
    let (train, test) = split(raw, spec)?;
    let scaler = Standardizer::fit(&train);
    Ok((scaler.apply(&train), scaler.apply(&test)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPartition {
    /// Unprivileged (`a = 0`) indices, ascending.
    pub idx_0: Vec<usize>,
    /// Privileged (`a = 1`) indices, ascending.
    pub idx_1: Vec<usize>,
}

impl GroupPartition {
    pub fn n_0(&self) -> usize {
        self.idx_0.len()
    }

    pub fn n_1(&self) -> usize {
        self.idx_1.len()
    }

    pub fn group(&self, a: u8) -> &[usize] {
        if a == 0 {
            &self.idx_0
        } else {
            &self.idx_1
        }
    }
}

pub fn partition_groups(ds: &EncodedDataset) -> Result<GroupPartition> {
    let (idx_1, idx_0): (Vec<usize>, Vec<usize>) = (0..ds.n()).partition(|&i| ds.a[i] == 1);
    if idx_0.is_empty() || idx_1.is_empty() {
        return Err(Error::SingleGroup);
    }
    Ok(GroupPartition { idx_0, idx_1 })
}
