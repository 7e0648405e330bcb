//! Synthetic biased classification data.
//!
//! Each sample draws a group `a ~ Bernoulli(1/2)` and a true label
//! `y* ~ Bernoulli(1/2)`; its `d` features come from one of two Gaussian
//! clusters centred at `±separation/√d · 1` according to `y*`. The observed
//! label equals `y*` except that positives of the unprivileged group
//! (`a = 0`) are flipped to 0 with probability `beta`. The group is also a
//! model input, so a fitted model learns a group penalty that grows with
//! `beta`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{
    encode, ColumnKind, ColumnRole, ColumnSpec, DatasetSchema, EncodedDataset, RawTable,
};
use crate::error::{Error, Result};

pub const GROUP_COLUMN: &str = "group";
pub const LABEL_COLUMN: &str = "label";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub beta: f64,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    #[serde(default = "default_separation")]
    pub separation: f64,
}

fn default_separation() -> f64 {
    1.0
}

impl SyntheticSpec {
    pub fn new(beta: f64, n: usize, d: usize, seed: u64) -> Self {
        SyntheticSpec {
            beta,
            n,
            d,
            seed,
            separation: default_separation(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 20 {
            return Err(Error::InvalidConfig(format!(
                "synthetic n must be >= 20, got {}",
                self.n
            )));
        }
        if self.d < 2 {
            return Err(Error::InvalidConfig(format!(
                "synthetic d must be >= 2, got {}",
                self.d
            )));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidConfig(format!(
                "beta must lie in [0, 1], got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

pub fn synthetic_table(spec: &SyntheticSpec) -> Result<RawTable> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let offset = spec.separation / (spec.d as f64).sqrt();
    let mut header: Vec<String> = (0..spec.d).map(|j| format!("x{j}")).collect();
    header.push(GROUP_COLUMN.into());
    header.push(LABEL_COLUMN.into());
    let mut rows = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let a: bool = rng.random_bool(0.5);
        let y_true: bool = rng.random_bool(0.5);
        let centre = if y_true { offset } else { -offset };
        let mut row: Vec<String> = (0..spec.d)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                format!("{}", centre + z)
            })
            .collect();
        let flip = rng.random::<f64>() < spec.beta;
        let y = y_true && (a || !flip);
        row.push(u8::from(a).to_string());
        row.push(u8::from(y).to_string());
        rows.push(row);
    }
    Ok(RawTable { header, rows })
}

pub fn synthetic_schema(d: usize) -> DatasetSchema {
    let mut columns: Vec<ColumnSpec> = (0..d)
        .map(|j| ColumnSpec::new(&format!("x{j}"), ColumnRole::Feature, ColumnKind::Numeric))
        .collect();
    columns.push(ColumnSpec::new(
        GROUP_COLUMN,
        ColumnRole::Sensitive,
        ColumnKind::Categorical,
    ));
    columns.push(ColumnSpec::new(
        LABEL_COLUMN,
        ColumnRole::Label,
        ColumnKind::Categorical,
    ));
    DatasetSchema {
        columns,
        favorable_label: "1".into(),
        privileged_value: Some("1".into()),
        sensitive_threshold: None,
        sensitive_as_feature: true,
        missing_values: vec![String::new()],
    }
}

/// Encoded synthetic dataset (features z-scored over the whole sample).
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<EncodedDataset> {
    encode(&synthetic_table(spec)?, &synthetic_schema(spec.d))
}

/// Writes `data.csv` and `schema.json` into `dir`.
pub fn write_synthetic(spec: &SyntheticSpec, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let table = synthetic_table(spec)?;
    let csv_path = dir.join("data.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;
    let schema_path = dir.join("schema.json");
    let text = serde_json::to_string_pretty(&synthetic_schema(spec.d))?;
    std::fs::write(&schema_path, text).map_err(|e| Error::io(&schema_path, e))
}
