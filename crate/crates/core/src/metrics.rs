//! Group fairness gaps and utility scores.
//!
//! Conditional rates over an empty cell (e.g. a group without negatives)
//! evaluate to 0 and attach a warning instead of failing.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::model::{predict_proba, ModelParams};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
    fn negatives(&self) -> usize {
        self.fp + self.tn
    }
    fn positives(&self) -> usize {
        self.tp + self.fn_
    }
}

/// Confusion tables indexed by sensitive group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionByGroup {
    pub groups: [Confusion; 2],
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub fn confusion_by_group(y_hat: &[u8], y: &[u8], a: &[u8]) -> Result<ConfusionByGroup> {
    check_len(y_hat.len(), y.len())?;
    check_len(y_hat.len(), a.len())?;
    let mut out = ConfusionByGroup::default();
    for ((&p, &t), &g) in y_hat.iter().zip(y).zip(a) {
        let c = &mut out.groups[usize::from(g == 1)];
        match (p == 1, t == 1) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(out)
}

/// A metric value with any degeneracy warnings raised computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Rated {
    pub value: f64,
    pub warnings: Vec<String>,
}

fn rate(num: usize, den: usize, what: &str, warnings: &mut Vec<String>) -> f64 {
    if den == 0 {
        warnings.push(format!("{what} undefined (empty cell); using 0"));
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `P(Ŷ=1 | A=1) − P(Ŷ=1 | A=0)`.
pub fn delta_dp(y_hat: &[u8], a: &[u8]) -> Result<f64> {
    check_len(y_hat.len(), a.len())?;
    let mut pos = [0usize; 2];
    let mut size = [0usize; 2];
    for (&p, &g) in y_hat.iter().zip(a) {
        let g = usize::from(g == 1);
        size[g] += 1;
        pos[g] += usize::from(p == 1);
    }
    if size[0] == 0 || size[1] == 0 {
        return Err(Error::SingleGroup);
    }
    Ok(pos[1] as f64 / size[1] as f64 - pos[0] as f64 / size[0] as f64)
}

fn fpr_tpr(c: &ConfusionByGroup, warnings: &mut Vec<String>) -> ([f64; 2], [f64; 2]) {
    let mut fpr = [0.0; 2];
    let mut tpr = [0.0; 2];
    for g in 0..2 {
        let t = &c.groups[g];
        fpr[g] = rate(t.fp, t.negatives(), &format!("FPR of group {g}"), warnings);
        tpr[g] = rate(t.tp, t.positives(), &format!("TPR of group {g}"), warnings);
    }
    (fpr, tpr)
}

/// `P(Ŷ=1 | A=1, Y=0) − P(Ŷ=1 | A=0, Y=0)`.
pub fn delta_fpr(y_hat: &[u8], y: &[u8], a: &[u8]) -> Result<Rated> {
    let c = confusion_by_group(y_hat, y, a)?;
    let mut warnings = Vec::new();
    let fpr: Vec<f64> = (0..2)
        .map(|g| {
            let t = &c.groups[g];
            rate(
                t.fp,
                t.negatives(),
                &format!("FPR of group {g}"),
                &mut warnings,
            )
        })
        .collect();
    Ok(Rated {
        value: fpr[1] - fpr[0],
        warnings,
    })
}

/// `½(|ΔFPR| + |ΔTPR|)`.
pub fn delta_eodds(y_hat: &[u8], y: &[u8], a: &[u8]) -> Result<Rated> {
    let c = confusion_by_group(y_hat, y, a)?;
    let mut warnings = Vec::new();
    let (fpr, tpr) = fpr_tpr(&c, &mut warnings);
    Ok(Rated {
        value: 0.5 * ((fpr[1] - fpr[0]).abs() + (tpr[1] - tpr[0]).abs()),
        warnings,
    })
}

/// `|P(Ŷ≠Y | A=1) − P(Ŷ≠Y | A=0)|`.
pub fn delta_err(y_hat: &[u8], y: &[u8], a: &[u8]) -> Result<f64> {
    let c = confusion_by_group(y_hat, y, a)?;
    let [g0, g1] = c.groups;
    if g0.total() == 0 || g1.total() == 0 {
        return Err(Error::SingleGroup);
    }
    let err = |t: Confusion| (t.fp + t.fn_) as f64 / t.total() as f64;
    Ok((err(g1) - err(g0)).abs())
}

pub fn accuracy(y_hat: &[u8], y: &[u8]) -> Result<f64> {
    check_len(y_hat.len(), y.len())?;
    if y.is_empty() {
        return Err(Error::Empty);
    }
    let correct = y_hat.iter().zip(y).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / y.len() as f64)
}

/// F1 score; 0 with a warning when precision + recall is 0 or undefined.
pub fn f1(y_hat: &[u8], y: &[u8]) -> Result<Rated> {
    check_len(y_hat.len(), y.len())?;
    if y.is_empty() {
        return Err(Error::Empty);
    }
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &t) in y_hat.iter().zip(y) {
        match (p == 1, t == 1) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    if tp == 0 {
        return Ok(Rated {
            value: 0.0,
            warnings: vec!["F1 undefined (no true positives); using 0".into()],
        });
    }
    // 2PR/(P+R) simplifies to 2TP/(2TP+FP+FN)
    Ok(Rated {
        value: 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64,
        warnings: Vec::new(),
    })
}

/// Trapezoidal area under the threshold-swept ROC curve.
pub fn roc_auc(scores: &[f64], y: &[u8]) -> Result<f64> {
    check_len(scores.len(), y.len())?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("roc scores"));
    }
    let pos = y.iter().filter(|&&t| t == 1).count();
    let neg = y.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].partial_cmp(&scores[i]).unwrap_or(Ordering::Equal));
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut area = 0.0;
    let mut k = 0;
    while k < order.len() {
        let (tp_prev, fp_prev) = (tp, fp);
        let threshold = scores[order[k]];
        while k < order.len() && scores[order[k]] == threshold {
            if y[order[k]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        area += (fp - fp_prev) as f64 * (tp + tp_prev) as f64 / 2.0;
    }
    Ok(area / (pos as f64 * neg as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FairnessMetric {
    Dp,
    Fpr,
    Eodds,
    Err,
}

impl FairnessMetric {
    pub const ALL: [FairnessMetric; 4] = [
        FairnessMetric::Dp,
        FairnessMetric::Fpr,
        FairnessMetric::Eodds,
        FairnessMetric::Err,
    ];

    pub fn of(self, r: &MetricReport) -> f64 {
        match self {
            FairnessMetric::Dp => r.delta_dp,
            FairnessMetric::Fpr => r.delta_fpr,
            FairnessMetric::Eodds => r.delta_eodds,
            FairnessMetric::Err => r.delta_err,
        }
    }

    pub fn column(self) -> &'static str {
        match self {
            FairnessMetric::Dp => "delta_dp",
            FairnessMetric::Fpr => "delta_fpr",
            FairnessMetric::Eodds => "delta_eodds",
            FairnessMetric::Err => "delta_err",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UtilityMetric {
    #[default]
    Acc,
    F1,
    Auc,
}

impl UtilityMetric {
    pub const ALL: [UtilityMetric; 3] = [UtilityMetric::Acc, UtilityMetric::F1, UtilityMetric::Auc];

    pub fn of(self, r: &MetricReport) -> f64 {
        match self {
            UtilityMetric::Acc => r.acc,
            UtilityMetric::F1 => r.f1,
            UtilityMetric::Auc => r.auc,
        }
    }

    pub fn column(self) -> &'static str {
        match self {
            UtilityMetric::Acc => "acc",
            UtilityMetric::F1 => "f1",
            UtilityMetric::Auc => "auc",
        }
    }
}

/// Fairness gaps and utility scores of one model on one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub delta_dp: f64,
    pub delta_fpr: f64,
    pub delta_eodds: f64,
    pub delta_err: f64,
    pub acc: f64,
    pub f1: f64,
    pub auc: f64,
    pub warnings: Vec<String>,
}

impl MetricReport {
    pub fn from_predictions(probs: &[f64], y_hat: &[u8], y: &[u8], a: &[u8]) -> Result<Self> {
        let fpr = delta_fpr(y_hat, y, a)?;
        let eodds = delta_eodds(y_hat, y, a)?;
        let f1 = f1(y_hat, y)?;
        let mut warnings = fpr.warnings;
        for w in eodds.warnings.into_iter().chain(f1.warnings) {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        Ok(MetricReport {
            delta_dp: delta_dp(y_hat, a)?,
            delta_fpr: fpr.value,
            delta_eodds: eodds.value,
            delta_err: delta_err(y_hat, y, a)?,
            acc: accuracy(y_hat, y)?,
            f1: f1.value,
            auc: roc_auc(probs, y)?,
            warnings,
        })
    }

    pub fn evaluate(m: &ModelParams, ds: &EncodedDataset) -> Result<Self> {
        let pred = predict_proba(m, ds.x().view())?;
        Self::from_predictions(&pred.probs, &pred.labels, ds.y(), ds.a())
    }

    pub fn fairness(&self, metric: FairnessMetric) -> f64 {
        metric.of(self)
    }

    pub fn utility(&self, metric: UtilityMetric) -> f64 {
        metric.of(self)
    }
}
