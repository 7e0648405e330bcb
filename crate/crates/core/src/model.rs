//! Weighted-ERM classifiers with a logistic head.
//!
//! Both model kinds end in an affine + sigmoid layer. For the logistic
//! kind that layer is the whole model; for the MLP it sits on top of two
//! rectified fully connected layers. Gradients and Hessians used for
//! influence are always taken with respect to the head parameters
//! `[w, b]` at frozen head inputs.

use std::path::Path;

use log::warn;
use ndarray::{concatenate, s, Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::influence::HessianHandle;
use crate::linalg::{norm2, Cholesky};

const PROB_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Logistic,
    Mlp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    /// Damped Newton with backtracking.
    #[default]
    Newton,
    /// Full-batch gradient descent with a fixed step.
    GradientDescent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchPolicy {
    FullBatch,
    MiniBatch(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub model: ModelKind,
    /// Newton iterations, gradient steps, or SGD epochs depending on the
    /// model and optimizer.
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2_strength: f64,
    pub batch: BatchPolicy,
    pub seed: u64,
    /// Gradient-norm stopping tolerance.
    pub tolerance: f64,
    pub optimizer: Optimizer,
    pub hidden_widths: [usize; 2],
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model: ModelKind::Logistic,
            epochs: 100,
            learning_rate: 0.5,
            l2_strength: 1e-4,
            batch: BatchPolicy::FullBatch,
            seed: 0,
            tolerance: 1e-10,
            optimizer: Optimizer::Newton,
            hidden_widths: [64, 32],
        }
    }
}

impl TrainConfig {
    pub fn mlp() -> Self {
        TrainConfig {
            model: ModelKind::Mlp,
            epochs: 30,
            learning_rate: 0.05,
            batch: BatchPolicy::MiniBatch(64),
            ..TrainConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(
                "learning_rate must be positive".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if !(self.l2_strength >= 0.0) {
            return Err(Error::InvalidConfig(
                "l2_strength must be nonnegative".into(),
            ));
        }
        if matches!(self.batch, BatchPolicy::MiniBatch(0)) {
            return Err(Error::InvalidConfig(
                "minibatch size must be positive".into(),
            ));
        }
        if self.model == ModelKind::Mlp && self.hidden_widths.contains(&0) {
            return Err(Error::InvalidConfig(
                "hidden widths must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Affine + sigmoid output layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticHead {
    pub weights: Array1<f64>,
    pub bias: f64,
}

impl LogisticHead {
    pub fn zeros(dim: usize) -> Self {
        LogisticHead {
            weights: Array1::zeros(dim),
            bias: 0.0,
        }
    }

    /// Head parameters flattened as `[w, b]`.
    pub fn params(&self) -> Array1<f64> {
        let mut theta = Array1::zeros(self.weights.len() + 1);
        theta.slice_mut(s![..-1]).assign(&self.weights);
        theta[self.weights.len()] = self.bias;
        theta
    }

    pub fn from_params(theta: ArrayView1<f64>) -> Self {
        let k = theta.len();
        LogisticHead {
            weights: theta.slice(s![..k - 1]).to_owned(),
            bias: theta[k - 1],
        }
    }

    pub fn logits(&self, features: ArrayView2<f64>) -> Array1<f64> {
        features.dot(&self.weights) + self.bias
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    /// `out × in`.
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl DenseLayer {
    fn forward_relu(&self, input: ArrayView2<f64>) -> Array2<f64> {
        let mut z = input.dot(&self.weights.t()) + &self.bias;
        z.mapv_inplace(|v| v.max(0.0));
        z
    }
}

/// Trained classifier parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    kind: ModelKind,
    input_dim: usize,
    hidden: Vec<DenseLayer>,
    head: LogisticHead,
    l2_strength: f64,
}

impl ModelParams {
    pub fn logistic(weights: Array1<f64>, bias: f64, l2_strength: f64) -> Self {
        ModelParams {
            kind: ModelKind::Logistic,
            input_dim: weights.len(),
            hidden: Vec::new(),
            head: LogisticHead { weights, bias },
            l2_strength,
        }
    }

    pub fn mlp(hidden: Vec<DenseLayer>, head: LogisticHead, l2_strength: f64) -> Result<Self> {
        if hidden.len() != 2 {
            return Err(Error::InvalidConfig(
                "mlp needs exactly two hidden layers".into(),
            ));
        }
        let input_dim = hidden[0].weights.ncols();
        let mut prev = input_dim;
        for layer in &hidden {
            if layer.weights.ncols() != prev || layer.bias.len() != layer.weights.nrows() {
                return Err(Error::DimensionMismatch {
                    expected: prev,
                    got: layer.weights.ncols(),
                });
            }
            prev = layer.weights.nrows();
        }
        if head.weights.len() != prev {
            return Err(Error::DimensionMismatch {
                expected: prev,
                got: head.weights.len(),
            });
        }
        Ok(ModelParams {
            kind: ModelKind::Mlp,
            input_dim,
            hidden,
            head,
            l2_strength,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// Input dimension of the logistic head.
    pub fn head_dim(&self) -> usize {
        self.head.weights.len()
    }

    pub fn head(&self) -> &LogisticHead {
        &self.head
    }

    pub fn hidden(&self) -> &[DenseLayer] {
        &self.hidden
    }

    pub fn l2_strength(&self) -> f64 {
        self.l2_strength
    }

    /// Same feature extractor with a replaced head.
    pub fn with_head(&self, head: LogisticHead) -> Result<Self> {
        if head.weights.len() != self.head_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.head_dim(),
                got: head.weights.len(),
            });
        }
        Ok(ModelParams {
            head,
            ..self.clone()
        })
    }

    fn is_finite(&self) -> bool {
        self.head.weights.iter().all(|v| v.is_finite())
            && self.head.bias.is_finite()
            && self.hidden.iter().all(|l| {
                l.weights.iter().all(|v| v.is_finite()) && l.bias.iter().all(|v| v.is_finite())
            })
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(&ModelFile::from(self))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelFile::from(self))?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str::<ModelFile>(text)?.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    kind: ModelKind,
    dims: Vec<usize>,
    l2_strength: f64,
    hidden: Vec<LayerFile>,
    head_weights: Vec<f64>,
    head_bias: f64,
}

impl From<&ModelParams> for ModelFile {
    fn from(m: &ModelParams) -> Self {
        let mut dims = vec![m.input_dim];
        dims.extend(m.hidden.iter().map(|l| l.weights.nrows()));
        ModelFile {
            kind: m.kind,
            dims,
            l2_strength: m.l2_strength,
            hidden: m
                .hidden
                .iter()
                .map(|l| LayerFile {
                    weights: l.weights.rows().into_iter().map(|r| r.to_vec()).collect(),
                    bias: l.bias.to_vec(),
                })
                .collect(),
            head_weights: m.head.weights.to_vec(),
            head_bias: m.head.bias,
        }
    }
}

impl TryFrom<ModelFile> for ModelParams {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        let head = LogisticHead {
            weights: Array1::from(f.head_weights),
            bias: f.head_bias,
        };
        let m = match f.kind {
            ModelKind::Logistic => ModelParams::logistic(head.weights, head.bias, f.l2_strength),
            ModelKind::Mlp => {
                let hidden = f
                    .hidden
                    .into_iter()
                    .map(|l| {
                        let rows = l.weights.len();
                        let cols = l.weights.first().map_or(0, Vec::len);
                        let flat: Vec<f64> = l.weights.into_iter().flatten().collect();
                        Ok(DenseLayer {
                            weights: Array2::from_shape_vec((rows, cols), flat)
                                .map_err(|_| Error::InvalidConfig("ragged layer weights".into()))?,
                            bias: Array1::from(l.bias),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                ModelParams::mlp(hidden, head, f.l2_strength)?
            }
        };
        if !m.is_finite() {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(m)
    }
}

/// Probabilities and 0.5-thresholded labels (ties go to 1).
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionBatch {
    pub probs: Vec<f64>,
    pub labels: Vec<u8>,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Binary cross-entropy with the probability clamped away from 0 and 1.
pub fn bce(p: f64, y: f64) -> f64 {
    let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

fn check_input(m: &ModelParams, x: ArrayView2<f64>) -> Result<()> {
    if x.ncols() != m.input_dim {
        return Err(Error::DimensionMismatch {
            expected: m.input_dim,
            got: x.ncols(),
        });
    }
    Ok(())
}

/// Head inputs: penultimate activations for the MLP, `x` itself for the
/// logistic model.
pub fn extract_features(m: &ModelParams, x: ArrayView2<f64>) -> Result<Array2<f64>> {
    check_input(m, x)?;
    let mut h = x.to_owned();
    for layer in &m.hidden {
        h = layer.forward_relu(h.view());
    }
    Ok(h)
}

pub fn predict_proba(m: &ModelParams, x: ArrayView2<f64>) -> Result<PredictionBatch> {
    let features = extract_features(m, x)?;
    let probs: Vec<f64> = m
        .head
        .logits(features.view())
        .iter()
        .map(|&z| sigmoid(z))
        .collect();
    let labels = probs.iter().map(|&p| u8::from(p >= 0.5)).collect();
    Ok(PredictionBatch { probs, labels })
}

/// `[features, 1]`, the design matrix of the head.
pub fn head_design(m: &ModelParams, x: ArrayView2<f64>) -> Result<Array2<f64>> {
    let f = extract_features(m, x)?;
    Ok(augment(f.view()))
}

pub(crate) fn augment(f: ArrayView2<f64>) -> Array2<f64> {
    let ones = Array2::ones((f.nrows(), 1));
    concatenate![Axis(1), f, ones]
}

/// Gradient of the sample loss w.r.t. the head parameters: `(p − y)·[x̃, 1]`.
pub fn per_sample_gradient(m: &ModelParams, x: ArrayView1<f64>, y: f64) -> Result<Array1<f64>> {
    let design = head_design(m, x.insert_axis(Axis(0)))?;
    let row = design.row(0);
    let p = sigmoid(row.dot(&m.head.params()));
    Ok(row.mapv(|v| (p - y) * v))
}

/// All per-sample head gradients as an `n × k` matrix.
pub fn per_sample_gradients(m: &ModelParams, ds: &EncodedDataset) -> Result<Array2<f64>> {
    let design = head_design(m, ds.x().view())?;
    let theta = m.head.params();
    let mut grads = design;
    for (i, mut row) in grads.rows_mut().into_iter().enumerate() {
        let r = sigmoid(row.dot(&theta)) - ds.label_f64(i);
        row.mapv_inplace(|v| r * v);
    }
    Ok(grads)
}

/// `(1/Σw) Σ w_i ℓ_i + l2·‖θ‖²` over all model parameters.
pub fn weighted_objective(m: &ModelParams, ds: &EncodedDataset, weights: &[f64]) -> Result<f64> {
    let probs = predict_proba(m, ds.x().view())?.probs;
    let total: f64 = weights.iter().sum();
    let loss: f64 = probs
        .iter()
        .zip(ds.y())
        .zip(weights)
        .map(|((&p, &y), &w)| w * bce(p, f64::from(y)))
        .sum::<f64>()
        / total;
    Ok(loss + m.l2_strength * param_sq_norm(m))
}

/// Per-sample clamped BCE losses.
pub fn sample_losses(m: &ModelParams, ds: &EncodedDataset) -> Result<Vec<f64>> {
    let probs = predict_proba(m, ds.x().view())?.probs;
    Ok(probs
        .iter()
        .zip(ds.y())
        .map(|(&p, &y)| bce(p, f64::from(y)))
        .collect())
}

fn param_sq_norm(m: &ModelParams) -> f64 {
    let head = m.head.weights.dot(&m.head.weights) + m.head.bias * m.head.bias;
    head + m
        .hidden
        .iter()
        .map(|l| l.weights.iter().map(|v| v * v).sum::<f64>() + l.bias.dot(&l.bias))
        .sum::<f64>()
}

/// Hessian of the empirical risk w.r.t. the head parameters, plus
/// `(2·l2 + damping)·I`.
pub fn hessian(m: &ModelParams, ds: &EncodedDataset, damping: f64) -> Result<HessianHandle> {
    if !(damping >= 0.0) {
        return Err(Error::InvalidConfig("damping must be nonnegative".into()));
    }
    let design = head_design(m, ds.x().view())?;
    let n = design.nrows();
    let k = design.ncols();
    let theta = m.head.params();
    let mut h = if n > 0 {
        let curv = design.dot(&theta).mapv(|z| {
            let p = sigmoid(z);
            (p * (1.0 - p)).sqrt()
        });
        let scaled = &design * &curv.insert_axis(Axis(1));
        scaled.t().dot(&scaled) / n as f64
    } else {
        Array2::zeros((k, k))
    };
    let ridge = 2.0 * m.l2_strength + damping;
    for j in 0..k {
        h[[j, j]] += ridge;
    }
    let h = (&h + &h.t()) * 0.5;
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("hessian"));
    }
    Ok(HessianHandle::new(h, damping, n))
}

pub fn train(ds: &EncodedDataset, cfg: &TrainConfig) -> Result<ModelParams> {
    train_weighted(ds, &vec![1.0; ds.n()], cfg)
}

/// Minimizes the weight-normalized training objective.
pub fn train_weighted(
    ds: &EncodedDataset,
    weights: &[f64],
    cfg: &TrainConfig,
) -> Result<ModelParams> {
    cfg.validate()?;
    if weights.len() != ds.n() {
        return Err(Error::DimensionMismatch {
            expected: ds.n(),
            got: weights.len(),
        });
    }
    if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidWeights(
            "weights must be finite and nonnegative".into(),
        ));
    }
    if weights.iter().all(|&w| w == 0.0) {
        return Err(Error::AllZeroWeights);
    }
    let model = match cfg.model {
        ModelKind::Logistic => {
            let design = augment(ds.x().view());
            let theta = fit_head(design.view(), ds.y(), weights, cfg)?;
            let head = LogisticHead::from_params(theta.view());
            ModelParams::logistic(head.weights, head.bias, cfg.l2_strength)
        }
        ModelKind::Mlp => train_mlp(ds, weights, cfg)?,
    };
    if !model.is_finite() {
        return Err(Error::NonFinite("training"));
    }
    Ok(model)
}

/// Weighted L2-regularized logistic regression on a fixed design `[x̃, 1]`.
pub(crate) fn fit_head(
    design: ArrayView2<f64>,
    y: &[u8],
    weights: &[f64],
    cfg: &TrainConfig,
) -> Result<Array1<f64>> {
    let problem = HeadProblem::new(design, y, weights, cfg.l2_strength);
    let mut theta = Array1::<f64>::zeros(design.ncols());
    let mut grad_norm = f64::INFINITY;
    for _ in 0..cfg.epochs {
        let (value, grad, probs) = problem.value_grad(theta.view());
        if !value.is_finite() {
            return Err(Error::NonFinite("loss"));
        }
        grad_norm = norm2(grad.view());
        if grad_norm <= cfg.tolerance {
            return Ok(theta);
        }
        match cfg.optimizer {
            Optimizer::GradientDescent => theta.scaled_add(-cfg.learning_rate, &grad),
            Optimizer::Newton => {
                let hess = problem.hessian(&probs);
                let step = match Cholesky::factor(hess.view()) {
                    Ok(ch) => ch.solve(grad.view()),
                    Err(_) => grad.clone(),
                };
                let slope = grad.dot(&step);
                let mut t = 1.0;
                loop {
                    let trial = &theta - &(&step * t);
                    let trial_value = problem.value(trial.view());
                    let slack = 4.0 * f64::EPSILON * value.abs();
                    if trial_value <= value - 1e-4 * t * slope + slack || t < 1e-12 {
                        theta = trial;
                        break;
                    }
                    t *= 0.5;
                }
            }
        }
    }
    let (_, grad, _) = problem.value_grad(theta.view());
    grad_norm = grad_norm.min(norm2(grad.view()));
    if grad_norm > cfg.tolerance {
        warn!(
            "head fit stopped after {} iterations with gradient norm {grad_norm:e}",
            cfg.epochs
        );
    }
    Ok(theta)
}

struct HeadProblem<'a> {
    design: ArrayView2<'a, f64>,
    y: Array1<f64>,
    weights: Array1<f64>,
    total: f64,
    l2: f64,
}

impl<'a> HeadProblem<'a> {
    fn new(design: ArrayView2<'a, f64>, y: &[u8], weights: &[f64], l2: f64) -> Self {
        HeadProblem {
            design,
            y: y.iter().map(|&v| f64::from(v)).collect(),
            weights: Array1::from(weights.to_vec()),
            total: weights.iter().sum(),
            l2,
        }
    }

    fn value(&self, theta: ArrayView1<f64>) -> f64 {
        let z = self.design.dot(&theta);
        let mut loss = 0.0;
        Zip::from(&z)
            .and(&self.y)
            .and(&self.weights)
            .for_each(|&z, &y, &w| loss += w * bce(sigmoid(z), y));
        loss / self.total + self.l2 * theta.dot(&theta)
    }

    fn value_grad(&self, theta: ArrayView1<f64>) -> (f64, Array1<f64>, Array1<f64>) {
        let probs = self.design.dot(&theta).mapv(sigmoid);
        let mut loss = 0.0;
        let mut resid = Array1::zeros(probs.len());
        Zip::from(&mut resid)
            .and(&probs)
            .and(&self.y)
            .and(&self.weights)
            .for_each(|r, &p, &y, &w| {
                loss += w * bce(p, y);
                *r = w * (p - y);
            });
        let mut grad = self.design.t().dot(&resid) / self.total;
        grad.scaled_add(2.0 * self.l2, &theta);
        (loss / self.total + self.l2 * theta.dot(&theta), grad, probs)
    }

    fn hessian(&self, probs: &Array1<f64>) -> Array2<f64> {
        let curv = Zip::from(probs)
            .and(&self.weights)
            .map_collect(|&p, &w| (w * p * (1.0 - p)).sqrt());
        let scaled = &self.design * &curv.insert_axis(Axis(1));
        let mut h = scaled.t().dot(&scaled) / self.total;
        for j in 0..h.nrows() {
            h[[j, j]] += 2.0 * self.l2;
        }
        h
    }
}

fn train_mlp(ds: &EncodedDataset, weights: &[f64], cfg: &TrainConfig) -> Result<ModelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = ds.d();
    let [h1, h2] = cfg.hidden_widths;
    let mut layers = vec![he_layer(h1, d, &mut rng), he_layer(h2, h1, &mut rng)];
    let head_init = Normal::new(0.0, (1.0 / h2 as f64).sqrt()).expect("valid std");
    let mut head = LogisticHead {
        weights: Array1::from_shape_fn(h2, |_| head_init.sample(&mut rng)),
        bias: 0.0,
    };

    let n = ds.n();
    let total: f64 = weights.iter().sum();
    let batch = match cfg.batch {
        BatchPolicy::FullBatch => n,
        BatchPolicy::MiniBatch(b) => b.min(n),
    };
    let l2 = cfg.l2_strength;
    let lr = cfg.learning_rate;
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            let xb = ds.x().select(Axis(0), chunk);
            let z1 = xb.dot(&layers[0].weights.t()) + &layers[0].bias;
            let a1 = z1.mapv(|v| v.max(0.0));
            let z2 = a1.dot(&layers[1].weights.t()) + &layers[1].bias;
            let a2 = z2.mapv(|v| v.max(0.0));
            let logits = head.logits(a2.view());
            // unbiased minibatch estimate of the weight-normalized gradient
            let scale = n as f64 / (chunk.len() as f64 * total);
            let delta: Array1<f64> = chunk
                .iter()
                .zip(logits.iter())
                .map(|(&i, &z)| scale * weights[i] * (sigmoid(z) - ds.label_f64(i)))
                .collect();

            let g_head_w = a2.t().dot(&delta);
            let g_head_b = delta.sum();
            let mut dz2 = delta
                .view()
                .insert_axis(Axis(1))
                .dot(&head.weights.view().insert_axis(Axis(0)));
            Zip::from(&mut dz2).and(&z2).for_each(|g, &z| {
                if z <= 0.0 {
                    *g = 0.0;
                }
            });
            let g_w2 = dz2.t().dot(&a1);
            let g_b2 = dz2.sum_axis(Axis(0));
            let mut dz1 = dz2.dot(&layers[1].weights);
            Zip::from(&mut dz1).and(&z1).for_each(|g, &z| {
                if z <= 0.0 {
                    *g = 0.0;
                }
            });
            let g_w1 = dz1.t().dot(&xb);
            let g_b1 = dz1.sum_axis(Axis(0));

            sgd_step(&mut head.weights, &g_head_w, lr, l2);
            head.bias -= lr * (g_head_b + 2.0 * l2 * head.bias);
            sgd_step(&mut layers[1].weights, &g_w2, lr, l2);
            sgd_step(&mut layers[1].bias, &g_b2, lr, l2);
            sgd_step(&mut layers[0].weights, &g_w1, lr, l2);
            sgd_step(&mut layers[0].bias, &g_b1, lr, l2);
        }
        if !head.bias.is_finite() {
            return Err(Error::NonFinite("mlp training"));
        }
    }

    // Polish the head to the exact optimum of its convex subproblem so
    // that head-parameter influence is taken at a stationary point.
    let model = ModelParams::mlp(layers, head, l2)?;
    let features = extract_features(&model, ds.x().view())?;
    let design = augment(features.view());
    let theta = fit_head(design.view(), ds.y(), weights, &head_polish_config(cfg))?;
    model.with_head(LogisticHead::from_params(theta.view()))
}

fn head_polish_config(cfg: &TrainConfig) -> TrainConfig {
    TrainConfig {
        optimizer: Optimizer::Newton,
        epochs: cfg.epochs.max(100),
        ..cfg.clone()
    }
}

fn he_layer(out: usize, inp: usize, rng: &mut ChaCha8Rng) -> DenseLayer {
    let dist = Normal::new(0.0, (2.0 / inp as f64).sqrt()).expect("valid std");
    DenseLayer {
        weights: Array2::from_shape_fn((out, inp), |_| dist.sample(rng)),
        bias: Array1::zeros(out),
    }
}

fn sgd_step<D: ndarray::Dimension>(
    param: &mut ndarray::Array<f64, D>,
    grad: &ndarray::Array<f64, D>,
    lr: f64,
    l2: f64,
) {
    Zip::from(param).and(grad).for_each(|p, &g| {
        *p -= lr * (g + 2.0 * l2 * *p);
    });
}

/// Retrains only the head of `m` on frozen features with the given weights,
/// using the same Newton solve that finishes MLP training.
pub fn retrain_head(
    m: &ModelParams,
    ds: &EncodedDataset,
    weights: &[f64],
    cfg: &TrainConfig,
) -> Result<ModelParams> {
    let design = head_design(m, ds.x().view())?;
    let theta = fit_head(design.view(), ds.y(), weights, &head_polish_config(cfg))?;
    m.with_head(LogisticHead::from_params(theta.view()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn one_sample() -> EncodedDataset {
        EncodedDataset::from_parts(array![[1.0]], vec![1], vec![1]).unwrap()
    }

    #[test]
    fn zero_logistic_predicts_half_and_ties_to_one() {
        let m = ModelParams::logistic(Array1::zeros(3), 0.0, 0.0);
        let pred = predict_proba(&m, Array2::ones((4, 3)).view()).unwrap();
        assert!(pred.probs.iter().all(|&p| p == 0.5));
        assert!(pred.labels.iter().all(|&l| l == 1));
    }

    #[test]
    fn sigmoid_saturation_and_closed_form() {
        let m = ModelParams::logistic(array![1.0], 0.0, 0.0);
        let p = predict_proba(&m, array![[20.0], [3f64.ln()]].view())
            .unwrap()
            .probs;
        assert!(p[0] > 0.9999);
        assert!((p[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let m = ModelParams::logistic(Array1::zeros(2), 0.0, 0.0);
        assert!(matches!(
            predict_proba(&m, Array2::zeros((1, 3)).view()),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn gradient_examples() {
        let m = ModelParams::logistic(array![0.0], 0.0, 0.0);
        let g = per_sample_gradient(&m, array![1.0].view(), 1.0).unwrap();
        assert_eq!(g, array![-0.5, -0.5]);
        let g = per_sample_gradient(&m, array![3.0].view(), 0.5).unwrap();
        assert_eq!(g, array![0.0, 0.0]);
    }

    #[test]
    fn hessian_examples() {
        let m = ModelParams::logistic(array![0.0], 0.0, 0.0);
        let h = hessian(&m, &one_sample(), 0.0).unwrap();
        assert_eq!(h.matrix(), &array![[0.25, 0.25], [0.25, 0.25]]);
        let empty = EncodedDataset::from_parts(Array2::zeros((0, 1)), vec![], vec![]).unwrap();
        let h = hessian(&m, &empty, 1.0).unwrap();
        assert_eq!(h.matrix(), &Array2::<f64>::eye(2));
    }

    #[test]
    fn extract_features_identity_and_zero_mlp() {
        let x = array![[1.0, -2.0], [0.5, 3.0]];
        let m = ModelParams::logistic(array![1.0, 1.0], 0.0, 0.0);
        assert_eq!(extract_features(&m, x.view()).unwrap(), x);
        let zero = |o, i| DenseLayer {
            weights: Array2::zeros((o, i)),
            bias: Array1::zeros(o),
        };
        let mlp =
            ModelParams::mlp(vec![zero(4, 2), zero(3, 4)], LogisticHead::zeros(3), 0.0).unwrap();
        assert_eq!(
            extract_features(&mlp, x.view()).unwrap(),
            Array2::<f64>::zeros((2, 3))
        );
    }

    #[test]
    fn rejects_bad_weights() {
        let ds = one_sample();
        let cfg = TrainConfig::default();
        assert!(matches!(
            train_weighted(&ds, &[0.0], &cfg),
            Err(Error::AllZeroWeights)
        ));
        assert!(matches!(
            train_weighted(&ds, &[-1.0], &cfg),
            Err(Error::InvalidWeights(_))
        ));
        assert!(matches!(
            train_weighted(&ds, &[1.0, 1.0], &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn model_json_round_trip() {
        let m = ModelParams::logistic(array![0.1, -0.3], 0.7, 1e-4);
        let back = ModelParams::from_json_str(&m.to_json_string().unwrap()).unwrap();
        assert_eq!(m, back);
    }
}
