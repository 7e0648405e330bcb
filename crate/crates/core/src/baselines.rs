//! Reference pre-processing baselines: Suppression and inverse-probability
//! weighting on the sensitive attribute (IPW-S) or on its joint
//! distribution with the label (IPW-SY).

use serde::{Deserialize, Serialize};

use crate::data::{DatasetSchema, EncodedDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Suppression,
    IpwS,
    IpwSy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselinePlan {
    pub kind: BaselineKind,
    pub weights: Vec<f64>,
    pub dropped_columns: Vec<String>,
}

/// Removes every feature column derived from the sensitive attribute.
/// The dataset keeps `a` for evaluation.
pub fn suppression(ds: &EncodedDataset, schema: &DatasetSchema) -> Result<EncodedDataset> {
    let sensitive = &schema.sensitive_column().name;
    let keep: Vec<usize> = (0..ds.d())
        .filter(|&j| &ds.feature_sources()[j] != sensitive)
        .collect();
    if keep.len() == ds.d() {
        return Ok(ds.clone());
    }
    ds.select_features(&keep)
}

pub fn suppression_plan(ds: &EncodedDataset, schema: &DatasetSchema) -> BaselinePlan {
    let sensitive = &schema.sensitive_column().name;
    BaselinePlan {
        kind: BaselineKind::Suppression,
        weights: vec![1.0; ds.n()],
        dropped_columns: ds
            .feature_names()
            .iter()
            .zip(ds.feature_sources())
            .filter(|(_, src)| *src == sensitive)
            .map(|(name, _)| name.clone())
            .collect(),
    }
}

/// `w_i = 1 / P̂(A = a_i)`.
pub fn ipw_s(ds: &EncodedDataset) -> Result<BaselinePlan> {
    let n = ds.n() as f64;
    let mut count = [0usize; 2];
    for &a in ds.a() {
        count[usize::from(a)] += 1;
    }
    if count.contains(&0) {
        return Err(Error::SingleGroup);
    }
    let weights = ds
        .a()
        .iter()
        .map(|&a| n / count[usize::from(a)] as f64)
        .collect();
    Ok(BaselinePlan {
        kind: BaselineKind::IpwS,
        weights,
        dropped_columns: Vec::new(),
    })
}

/// `w_i = P̂(A = a_i)·P̂(Y = y_i) / P̂(A = a_i, Y = y_i)`.
pub fn ipw_sy(ds: &EncodedDataset) -> Result<BaselinePlan> {
    let n = ds.n() as f64;
    let mut joint = [[0usize; 2]; 2];
    let mut pa = [0usize; 2];
    let mut py = [0usize; 2];
    for (&a, &y) in ds.a().iter().zip(ds.y()) {
        joint[usize::from(a)][usize::from(y)] += 1;
        pa[usize::from(a)] += 1;
        py[usize::from(y)] += 1;
    }
    for a in 0..2u8 {
        for y in 0..2u8 {
            if joint[usize::from(a)][usize::from(y)] == 0 {
                return Err(Error::EmptyCell { a, y });
            }
        }
    }
    let weights = ds
        .a()
        .iter()
        .zip(ds.y())
        .map(|(&a, &y)| {
            let (a, y) = (usize::from(a), usize::from(y));
            (pa[a] as f64 * py[y] as f64) / (n * joint[a][y] as f64)
        })
        .collect();
    Ok(BaselinePlan {
        kind: BaselineKind::IpwSy,
        weights,
        dropped_columns: Vec::new(),
    })
}
