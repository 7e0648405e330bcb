//! Experiment harness: configuration, end-to-end runs with persisted
//! artifacts, λ_f sweeps, and comparison reports.
//!
//! A run directory holds `config.json`, `weights.csv`, `influence.csv`,
//! `metrics_before.json`, `metrics_after.json`, `plan.json` and `run.json`.
//! Every random choice derives from the configuration's root seed, so the
//! same configuration always reproduces the same bytes in `weights.csv`
//! and `tradeoff.csv`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{ipw_s, ipw_sy, suppression};
use crate::data::{
    builtin_schema, encode_unscaled, parse_csv, split_and_standardize, DatasetSchema, EncodeReport,
    EncodedDataset, RawTable, SplitSpec, Stratify,
};
use crate::error::{Error, Result};
use crate::influence::{
    group_influence_all, write_influence_csv, InfluenceRecord, DEFAULT_DAMPING,
};
use crate::metrics::{FairnessMetric, MetricReport, UtilityMetric};
use crate::model::{train, train_weighted, ModelKind, ModelParams, TrainConfig};
use crate::reweight::{
    iffair_pipeline, select_diverse_bias_set, solve_diverse_lp, DiverseConfig, UniformConfig,
    VariantConfig, WeightPlan,
};
use crate::svg;
use crate::synth::{synthetic_schema, synthetic_table, SyntheticSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DatasetSource {
    /// A shipped schema adapter (`adult`, `compas`, `german`) applied to a
    /// local copy of the raw file.
    Builtin {
        name: String,
        path: PathBuf,
        #[serde(default = "default_delimiter")]
        delimiter: char,
    },
    Csv {
        data: PathBuf,
        schema: PathBuf,
        #[serde(default = "default_delimiter")]
        delimiter: char,
    },
    /// Generated on the fly; the generator seed derives from the root seed.
    Synthetic {
        beta: f64,
        n: usize,
        d: usize,
        #[serde(default = "default_separation")]
        separation: f64,
    },
}

fn default_delimiter() -> char {
    ','
}

fn default_separation() -> f64 {
    1.0
}

impl Default for DatasetSource {
    fn default() -> Self {
        DatasetSource::Synthetic {
            beta: 0.3,
            n: 2000,
            d: 5,
            separation: default_separation(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RunVariant {
    Vanilla,
    Uniform,
    #[default]
    Diverse,
    Suppression,
    IpwS,
    IpwSy,
}

impl RunVariant {
    pub fn name(self) -> &'static str {
        match self {
            RunVariant::Vanilla => "vanilla",
            RunVariant::Uniform => "uniform",
            RunVariant::Diverse => "diverse",
            RunVariant::Suppression => "suppression",
            RunVariant::IpwS => "ipw_s",
            RunVariant::IpwSy => "ipw_sy",
        }
    }
}

/// Full description of one experiment.
///
/// `train`, when present, replaces the defaults for `model`; its `seed`
/// field is ignored in favour of the stage seed derived from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub model: ModelKind,
    pub train: Option<TrainConfig>,
    pub variant: RunVariant,
    pub uniform: UniformConfig,
    pub diverse: DiverseConfig,
    pub test_fraction: f64,
    pub stratify_on: Stratify,
    pub damping: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetSource::default(),
            model: ModelKind::Logistic,
            train: None,
            variant: RunVariant::default(),
            uniform: UniformConfig::default(),
            diverse: DiverseConfig::default(),
            test_fraction: 0.3,
            stratify_on: Stratify::default(),
            damping: DEFAULT_DAMPING,
            output_dir: PathBuf::from("runs/default"),
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.train_config().validate()?;
        self.uniform.validate()?;
        self.diverse.validate()?;
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "test_fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if !(self.damping >= 0.0) {
            return Err(Error::InvalidConfig("damping must be nonnegative".into()));
        }
        match &self.dataset {
            DatasetSource::Builtin { name, path, .. } => {
                builtin_schema(name)?;
                require_file(path)
            }
            DatasetSource::Csv { data, schema, .. } => {
                require_file(data)?;
                require_file(schema)
            }
            DatasetSource::Synthetic {
                beta,
                n,
                d,
                separation,
            } => SyntheticSpec {
                beta: *beta,
                n: *n,
                d: *d,
                seed: 0,
                separation: *separation,
            }
            .validate(),
        }
    }

    /// Effective training configuration with the derived training seed.
    pub fn train_config(&self) -> TrainConfig {
        let base = match (&self.train, self.model) {
            (Some(t), _) => t.clone(),
            (None, ModelKind::Logistic) => TrainConfig::default(),
            (None, ModelKind::Mlp) => TrainConfig::mlp(),
        };
        TrainConfig {
            model: self.model,
            seed: stage_seed(self.seed, "train"),
            ..base
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            test_fraction: self.test_fraction,
            seed: stage_seed(self.seed, "split"),
            stratify_on: self.stratify_on,
        }
    }
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "file {} does not exist",
            path.display()
        )))
    }
}

/// Deterministic per-stage seed: SplitMix64 finalizer over the root seed
/// mixed with an FNV-1a hash of the stage name.
pub fn stage_seed(root: u64, stage: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stage.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = root ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Raw table and schema for a dataset source.
pub fn load_source(source: &DatasetSource, root_seed: u64) -> Result<(RawTable, DatasetSchema)> {
    match source {
        DatasetSource::Builtin {
            name,
            path,
            delimiter,
        } => {
            let schema = builtin_schema(name)?;
            let table = with_schema_header(parse_csv(path, delimiter_byte(*delimiter)?)?, &schema);
            Ok((table, schema))
        }
        DatasetSource::Csv {
            data,
            schema,
            delimiter,
        } => {
            let schema = DatasetSchema::from_json_file(schema)?;
            let table = with_schema_header(parse_csv(data, delimiter_byte(*delimiter)?)?, &schema);
            Ok((table, schema))
        }
        DatasetSource::Synthetic {
            beta,
            n,
            d,
            separation,
        } => {
            let spec = SyntheticSpec {
                beta: *beta,
                n: *n,
                d: *d,
                seed: stage_seed(root_seed, "data"),
                separation: *separation,
            };
            Ok((synthetic_table(&spec)?, synthetic_schema(*d)))
        }
    }
}

fn delimiter_byte(c: char) -> Result<u8> {
    u8::try_from(c)
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| Error::InvalidConfig(format!("delimiter {c:?} is not a single ASCII byte")))
}

/// Headerless files (such as the UCI originals) take their column names
/// from the schema when the first row names none of its columns and has
/// exactly one cell per schema column.
fn with_schema_header(mut table: RawTable, schema: &DatasetSchema) -> RawTable {
    let named = schema
        .columns
        .iter()
        .any(|c| table.header.iter().any(|h| h.trim() == c.name));
    if !named && table.header.len() == schema.columns.len() {
        let first = std::mem::replace(
            &mut table.header,
            schema.columns.iter().map(|c| c.name.clone()).collect(),
        );
        table.rows.insert(0, first);
    }
    table
}

/// Train/test splits, z-scored with training statistics.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub schema: DatasetSchema,
    pub train: EncodedDataset,
    pub test: EncodedDataset,
    pub encode_report: EncodeReport,
}

pub fn prepare_data(cfg: &ExperimentConfig) -> Result<PreparedData> {
    let (table, schema) = load_source(&cfg.dataset, cfg.seed)?;
    let (raw, encode_report) = encode_unscaled(&table, &schema)?;
    let (train, test) = split_and_standardize(&raw, &cfg.split_spec())?;
    Ok(PreparedData {
        schema,
        train,
        test,
        encode_report,
    })
}

/// In-memory result of one run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub vanilla: ModelParams,
    pub treated: ModelParams,
    pub records: Vec<InfluenceRecord>,
    pub weights: Vec<f64>,
    pub before: MetricReport,
    pub after: MetricReport,
    pub plan: serde_json::Value,
}

/// Runs the configured variant on prepared data without touching disk.
pub fn execute(cfg: &ExperimentConfig, data: &PreparedData) -> Result<RunOutcome> {
    let tcfg = cfg.train_config();
    let (train_ds, test_ds) = (&data.train, &data.test);
    let influence_of = |m: &ModelParams| -> Result<Vec<InfluenceRecord>> {
        let part = crate::data::partition_groups(train_ds)?;
        group_influence_all(m, train_ds, &part, cfg.damping).map_err(|e| e.in_stage("influence"))
    };
    match cfg.variant {
        RunVariant::Uniform | RunVariant::Diverse => {
            let variant = match cfg.variant {
                RunVariant::Uniform => VariantConfig::Uniform(cfg.uniform.clone()),
                _ => VariantConfig::Diverse(cfg.diverse),
            };
            let o = iffair_pipeline(train_ds, test_ds, &variant, &tcfg, cfg.damping)
                .map_err(|e| e.in_stage("reweight"))?;
            Ok(RunOutcome {
                plan: o.plan.sidecar(),
                weights: o.plan.weights,
                vanilla: o.vanilla,
                treated: o.fair,
                records: o.records,
                before: o.before,
                after: o.after,
            })
        }
        RunVariant::Vanilla | RunVariant::Suppression | RunVariant::IpwS | RunVariant::IpwSy => {
            let vanilla = train(train_ds, &tcfg).map_err(|e| e.in_stage("train"))?;
            let records = influence_of(&vanilla)?;
            let before = MetricReport::evaluate(&vanilla, test_ds)?;
            let (treated, weights, after, plan) = match cfg.variant {
                RunVariant::Vanilla => (
                    vanilla.clone(),
                    vec![1.0; train_ds.n()],
                    before.clone(),
                    serde_json::json!({ "variant": "vanilla" }),
                ),
                RunVariant::Suppression => {
                    let tr = suppression(train_ds, &data.schema)?;
                    let te = suppression(test_ds, &data.schema)?;
                    let m = train(&tr, &tcfg).map_err(|e| e.in_stage("train"))?;
                    let after = MetricReport::evaluate(&m, &te)?;
                    let dropped: Vec<&String> = train_ds
                        .feature_names()
                        .iter()
                        .filter(|n| !tr.feature_names().contains(n))
                        .collect();
                    let plan = serde_json::json!({
                        "variant": "suppression",
                        "dropped_columns": dropped,
                    });
                    (m, vec![1.0; train_ds.n()], after, plan)
                }
                _ => {
                    let plan = if cfg.variant == RunVariant::IpwS {
                        ipw_s(train_ds)?
                    } else {
                        ipw_sy(train_ds)?
                    };
                    let m = train_weighted(train_ds, &plan.weights, &tcfg)
                        .map_err(|e| e.in_stage("train"))?;
                    let after = MetricReport::evaluate(&m, test_ds)?;
                    let sidecar = serde_json::json!({ "variant": cfg.variant.name() });
                    (m, plan.weights, after, sidecar)
                }
            };
            Ok(RunOutcome {
                vanilla,
                treated,
                records,
                weights,
                before,
                after,
                plan,
            })
        }
    }
}

/// Persisted summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub variant: RunVariant,
    pub metrics_before: MetricReport,
    pub metrics_after: MetricReport,
    pub plan: serde_json::Value,
    pub weights_file: String,
    pub wall_clock_seconds: f64,
    pub tool_version: String,
}

pub fn write_weights_csv<W: Write>(weights: &[f64], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "weight"])?;
    for (i, v) in weights.iter().enumerate() {
        w.write_record([i.to_string(), format!("{v:.16e}")])?;
    }
    w.flush().map_err(|e| Error::io("<weights csv>", e))?;
    Ok(())
}

pub fn read_weights_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            rec.get(1)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::InvalidWeights(format!("bad row in {}", path.display())))
        })
        .collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    if !path.is_file() {
        return Err(Error::MissingArtifacts(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn create_fresh_dir(dir: &Path) -> Result<()> {
    if dir.exists() {
        return Err(Error::RunDirExists(dir.to_path_buf()));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_run_dir(
    dir: &Path,
    cfg: &ExperimentConfig,
    out: &RunOutcome,
    seconds: f64,
) -> Result<RunRecord> {
    write_json(&dir.join("config.json"), cfg)?;
    let weights_path = dir.join("weights.csv");
    let f = fs::File::create(&weights_path).map_err(|e| Error::io(&weights_path, e))?;
    write_weights_csv(&out.weights, f)?;
    let infl_path = dir.join("influence.csv");
    let f = fs::File::create(&infl_path).map_err(|e| Error::io(&infl_path, e))?;
    write_influence_csv(&out.records, f)?;
    write_json(&dir.join("metrics_before.json"), &out.before)?;
    write_json(&dir.join("metrics_after.json"), &out.after)?;
    write_json(&dir.join("plan.json"), &out.plan)?;
    let record = RunRecord {
        config: cfg.clone(),
        variant: cfg.variant,
        metrics_before: out.before.clone(),
        metrics_after: out.after.clone(),
        plan: out.plan.clone(),
        weights_file: "weights.csv".into(),
        wall_clock_seconds: seconds,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    write_json(&dir.join("run.json"), &record)?;
    Ok(record)
}

/// Executes one run and writes its directory; refuses to overwrite.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let dir = cfg.output_dir.as_path();
    if dir.exists() {
        return Err(Error::RunDirExists(dir.to_path_buf()));
    }
    let start = Instant::now();
    let data = prepare_data(cfg).map_err(|e| e.in_stage("data"))?;
    let out = execute(cfg, &data)?;
    create_fresh_dir(dir)?;
    let record = write_run_dir(dir, cfg, &out, start.elapsed().as_secs_f64())
        .map_err(|e| e.in_stage("write"))?;
    info!("run written to {}", dir.display());
    Ok(record)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepStatus {
    Ok,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda_f: f64,
    pub lambda_u: f64,
    pub status: SweepStatus,
    /// Absent for infeasible points.
    pub report: Option<MetricReport>,
    /// Largest feasible λ_f at this λ_u, for infeasible points.
    pub max_feasible_lambda_f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub vanilla: MetricReport,
    pub rows: Vec<SweepRow>,
}

pub const TRADEOFF_COLUMNS: [&str; 10] = [
    "lambda_f",
    "lambda_u",
    "status",
    "delta_dp",
    "delta_fpr",
    "delta_eodds",
    "delta_err",
    "acc",
    "f1",
    "auc",
];

impl SweepTable {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(TRADEOFF_COLUMNS)?;
        for row in &self.rows {
            let mut rec = vec![
                row.lambda_f.to_string(),
                row.lambda_u.to_string(),
                match row.status {
                    SweepStatus::Ok => "ok".to_string(),
                    SweepStatus::Infeasible => "infeasible".to_string(),
                },
            ];
            for m in FairnessMetric::ALL {
                rec.push(
                    row.report
                        .as_ref()
                        .map(|r| m.of(r).to_string())
                        .unwrap_or_default(),
                );
            }
            for m in UtilityMetric::ALL {
                rec.push(
                    row.report
                        .as_ref()
                        .map(|r| m.of(r).to_string())
                        .unwrap_or_default(),
                );
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<tradeoff csv>", e))?;
        Ok(())
    }

    pub fn svg(&self) -> String {
        let points: Vec<svg::Point> = self
            .rows
            .iter()
            .filter_map(|r| {
                r.report.as_ref().map(|rep| svg::Point {
                    label: format!("lambda_f={}", r.lambda_f),
                    report: rep.clone(),
                })
            })
            .collect();
        svg::tradeoff_grid(&points, &self.vanilla)
    }
}

/// Diverse-variant sweep over `lambda_f_grid` at fixed `lambda_u`.
///
/// The vanilla model and its influences are shared by all points; each
/// feasible point is retrained and evaluated on the test split. Rows come
/// out in strictly increasing λ_f order (duplicates removed), infeasible
/// points included as status rows.
pub fn sweep(
    cfg: &ExperimentConfig,
    data: &PreparedData,
    lambda_f_grid: &[f64],
    lambda_u: f64,
) -> Result<(SweepTable, Vec<Option<RunOutcome>>)> {
    if cfg.variant != RunVariant::Diverse {
        return Err(Error::InvalidConfig(
            "sweep requires variant = diverse".into(),
        ));
    }
    let mut grid: Vec<f64> = lambda_f_grid.to_vec();
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig(
            "lambda_f grid contains a non-finite value".into(),
        ));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty lambda_f grid".into()));
    }
    let tcfg = cfg.train_config();
    let train_ds = &data.train;
    let vanilla = train(train_ds, &tcfg).map_err(|e| e.in_stage("train"))?;
    let part = crate::data::partition_groups(train_ds)?;
    let records = group_influence_all(&vanilla, train_ds, &part, cfg.damping)
        .map_err(|e| e.in_stage("influence"))?;
    let bias_set = select_diverse_bias_set(&records);
    let before = MetricReport::evaluate(&vanilla, &data.test)?;

    let results: Vec<(SweepRow, Option<RunOutcome>)> = grid
        .par_iter()
        .map(|&lambda_f| -> Result<(SweepRow, Option<RunOutcome>)> {
            let dcfg = DiverseConfig {
                lambda_f,
                lambda_u,
                ..cfg.diverse
            };
            let plan: WeightPlan = match solve_diverse_lp(&records, &bias_set, &dcfg) {
                Ok(p) => p,
                Err(Error::Infeasible {
                    max_feasible_lambda_f,
                    ..
                }) => {
                    return Ok((
                        SweepRow {
                            lambda_f,
                            lambda_u,
                            status: SweepStatus::Infeasible,
                            report: None,
                            max_feasible_lambda_f,
                        },
                        None,
                    ))
                }
                Err(e) => return Err(e.in_stage("reweight")),
            };
            let treated = if plan.is_identity() {
                vanilla.clone()
            } else {
                train_weighted(train_ds, &plan.weights, &tcfg).map_err(|e| e.in_stage("train"))?
            };
            let after = MetricReport::evaluate(&treated, &data.test)?;
            let outcome = RunOutcome {
                vanilla: vanilla.clone(),
                treated,
                records: records.clone(),
                weights: plan.weights.clone(),
                before: before.clone(),
                after: after.clone(),
                plan: plan.sidecar(),
            };
            Ok((
                SweepRow {
                    lambda_f,
                    lambda_u,
                    status: SweepStatus::Ok,
                    report: Some(after),
                    max_feasible_lambda_f: None,
                },
                Some(outcome),
            ))
        })
        .collect::<Result<_>>()?;
    let (rows, outcomes) = results.into_iter().unzip();
    Ok((
        SweepTable {
            vanilla: before,
            rows,
        },
        outcomes,
    ))
}

/// Runs a sweep and writes `tradeoff.csv`, `tradeoff.svg`, `vanilla.json`
/// and one run directory per feasible point under `points/`.
pub fn cmd_sweep(
    cfg: &ExperimentConfig,
    lambda_f_grid: &[f64],
    lambda_u: f64,
) -> Result<SweepTable> {
    cfg.validate()?;
    let dir = cfg.output_dir.as_path();
    if dir.exists() {
        return Err(Error::RunDirExists(dir.to_path_buf()));
    }
    let start = Instant::now();
    let data = prepare_data(cfg).map_err(|e| e.in_stage("data"))?;
    let (table, outcomes) = sweep(cfg, &data, lambda_f_grid, lambda_u)?;
    let seconds = start.elapsed().as_secs_f64();
    create_fresh_dir(dir)?;
    let write = || -> Result<()> {
        write_json(&dir.join("config.json"), cfg)?;
        let path = dir.join("tradeoff.csv");
        let f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        table.write_csv(f)?;
        let path = dir.join("tradeoff.svg");
        fs::write(&path, table.svg()).map_err(|e| Error::io(&path, e))?;
        write_json(&dir.join("vanilla.json"), &table.vanilla)?;
        for (row, out) in table.rows.iter().zip(&outcomes) {
            if let Some(out) = out {
                let point_dir = dir
                    .join("points")
                    .join(format!("lambda_f_{}", row.lambda_f));
                create_fresh_dir(&point_dir)?;
                let point_cfg = ExperimentConfig {
                    diverse: DiverseConfig {
                        lambda_f: row.lambda_f,
                        lambda_u: row.lambda_u,
                        ..cfg.diverse
                    },
                    output_dir: point_dir.clone(),
                    ..cfg.clone()
                };
                write_run_dir(&point_dir, &point_cfg, out, seconds)?;
            }
        }
        Ok(())
    };
    write().map_err(|e| e.in_stage("write"))?;
    info!(
        "sweep of {} points written to {}",
        table.rows.len(),
        dir.display()
    );
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub report: MetricReport,
    /// Some fairness |gap| exceeds the vanilla one.
    pub flagged: bool,
}

pub const REPORT_COLUMNS: [&str; 9] = [
    "method",
    "delta_dp",
    "delta_fpr",
    "delta_eodds",
    "delta_err",
    "acc",
    "f1",
    "auc",
    "flagged",
];

/// Whether any fairness gap of `r` is larger in magnitude than vanilla's.
pub fn exceeds_vanilla(r: &MetricReport, vanilla: &MetricReport) -> bool {
    FairnessMetric::ALL
        .iter()
        .any(|m| m.of(r).abs() > m.of(vanilla).abs())
}

/// Rows from an external CSV with columns `method, delta_dp, delta_fpr,
/// delta_eodds, delta_err, acc, f1, auc` (extra columns ignored).
pub fn read_external_results(path: impl AsRef<Path>) -> Result<Vec<(String, MetricReport)>> {
    let path = path.as_ref();
    let table = parse_csv(path, b',')?;
    let col = |name: &str| table.column_index(name);
    let idx: Vec<usize> = REPORT_COLUMNS[..8]
        .iter()
        .map(|c| col(c))
        .collect::<Result<_>>()?;
    table
        .rows
        .iter()
        .map(|row| {
            let num = |k: usize| -> Result<f64> {
                let cell = row[idx[k]].trim();
                cell.parse().map_err(|_| Error::NonNumericCell {
                    column: REPORT_COLUMNS[k].to_string(),
                    value: cell.to_string(),
                })
            };
            Ok((
                row[idx[0]].trim().to_string(),
                MetricReport {
                    delta_dp: num(1)?,
                    delta_fpr: num(2)?,
                    delta_eodds: num(3)?,
                    delta_err: num(4)?,
                    acc: num(5)?,
                    f1: num(6)?,
                    auc: num(7)?,
                    warnings: Vec::new(),
                },
            ))
        })
        .collect()
}

/// Comparison table over run directories plus optional external rows.
///
/// The vanilla reference is the first `vanilla` run if present, otherwise
/// the pre-treatment metrics of the first run, which then also appear as
/// their own `vanilla` row.
pub fn build_report(
    run_dirs: &[PathBuf],
    external: &[(String, MetricReport)],
) -> Result<Vec<ReportRow>> {
    if run_dirs.is_empty() {
        return Err(Error::InvalidConfig(
            "report needs at least one run directory".into(),
        ));
    }
    let records: Vec<RunRecord> = run_dirs
        .iter()
        .map(|d| read_json(&d.join("run.json")))
        .collect::<Result<_>>()?;
    let reference = records
        .iter()
        .find(|r| r.variant == RunVariant::Vanilla)
        .map(|r| r.metrics_after.clone());
    let mut entries: Vec<(String, MetricReport)> = Vec::new();
    let vanilla = match reference {
        Some(v) => v,
        None => {
            let v = records[0].metrics_before.clone();
            entries.push(("vanilla".into(), v.clone()));
            v
        }
    };
    for r in &records {
        entries.push((r.variant.name().to_string(), r.metrics_after.clone()));
    }
    entries.extend(external.iter().cloned());
    Ok(entries
        .into_iter()
        .map(|(method, report)| ReportRow {
            flagged: exceeds_vanilla(&report, &vanilla),
            method,
            report,
        })
        .collect())
}

pub fn write_report_csv<W: Write>(rows: &[ReportRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(REPORT_COLUMNS)?;
    for row in rows {
        let mut rec = vec![row.method.clone()];
        rec.extend(
            FairnessMetric::ALL
                .iter()
                .map(|m| m.of(&row.report).to_string()),
        );
        rec.extend(
            UtilityMetric::ALL
                .iter()
                .map(|m| m.of(&row.report).to_string()),
        );
        rec.push(row.flagged.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<report csv>", e))?;
    Ok(())
}

pub fn cmd_report(
    run_dirs: &[PathBuf],
    external: Option<&Path>,
    output: &Path,
) -> Result<Vec<ReportRow>> {
    let external = match external {
        Some(p) => read_external_results(p)?,
        None => Vec::new(),
    };
    let rows = build_report(run_dirs, &external)?;
    let f = fs::File::create(output).map_err(|e| Error::io(output, e))?;
    write_report_csv(&rows, f)?;
    Ok(rows)
}

/// Encodes a dataset without splitting and writes the numeric table (label
/// and group last) plus an encoding summary next to it.
pub fn cmd_ingest(source: &DatasetSource, output: &Path) -> Result<EncodeReport> {
    let (table, schema) = load_source(source, 0)?;
    let (raw, report) = encode_unscaled(&table, &schema)?;
    let f = fs::File::create(output).map_err(|e| Error::io(output, e))?;
    raw.to_csv_writer(f)?;
    let summary = serde_json::json!({
        "rows": raw.n(),
        "features": raw.feature_names(),
        "dropped_missing_rows": report.dropped_missing_rows,
        "dropped_constant_columns": report.dropped_constant_columns,
    });
    write_json(&output.with_extension("json"), &summary)?;
    Ok(report)
}
