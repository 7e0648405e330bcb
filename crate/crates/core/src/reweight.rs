//! Influence-driven sample reweighting.
//!
//! Two variants share the influence records of the vanilla model:
//!
//! * **uniform**: every sample that lowers the unprivileged group's loss
//!   while raising the privileged group's (`I_0 < 0 ∧ I_1 > 0`) receives one
//!   common weight `w′`, chosen on a grid by retraining to minimize the
//!   normalized fairness score under a utility floor;
//! * **diverse**: every sample with negative influence disparity
//!   (`I_0 − I_1 < 0`) gets its own reduction `Δw_i ∈ [0, 1]` from a linear
//!   program that buys a fraction `λ_f` of the achievable disparity
//!   reduction with the least total weight change, while keeping the
//!   first-order total-loss change within `λ_u` of its potential.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{partition_groups, EncodedDataset};
use crate::error::{Error, Result};
use crate::influence::{group_influence_all, InfluenceRecord};
use crate::lp::{solve_bounded_lp, LpOutcome, FEASIBILITY_TOL};
use crate::metrics::{FairnessMetric, MetricReport, UtilityMetric};
use crate::model::{train, train_weighted, ModelParams, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EvalSplit {
    #[default]
    Train,
    Holdout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UniformConfig {
    pub tau: f64,
    pub grid_points: usize,
    pub utility_metric: UtilityMetric,
    pub fairness_metrics: Vec<FairnessMetric>,
    pub epsilon_norm: f64,
    pub eval_split: EvalSplit,
}

impl Default for UniformConfig {
    fn default() -> Self {
        UniformConfig {
            tau: 0.05,
            grid_points: 21,
            utility_metric: UtilityMetric::Acc,
            fairness_metrics: FairnessMetric::ALL.to_vec(),
            epsilon_norm: 1e-8,
            eval_split: EvalSplit::Train,
        }
    }
}

impl UniformConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::InvalidConfig(format!(
                "tau must lie in [0, 1], got {}",
                self.tau
            )));
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidConfig(
                "grid_points must be at least 2".into(),
            ));
        }
        if !(self.epsilon_norm >= 0.0) {
            return Err(Error::InvalidConfig(
                "epsilon_norm must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// `w′` values, ascending, covering 0 and 1.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.grid_points - 1) as f64;
        (0..self.grid_points).map(|k| k as f64 / last).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PotentialScope {
    #[default]
    Diverse,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiverseConfig {
    pub lambda_f: f64,
    pub lambda_u: f64,
    pub potential_scope: PotentialScope,
}

impl Default for DiverseConfig {
    fn default() -> Self {
        DiverseConfig {
            lambda_f: 0.8,
            lambda_u: 0.0,
            potential_scope: PotentialScope::Diverse,
        }
    }
}

impl DiverseConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda_f", self.lambda_f), ("lambda_u", self.lambda_u)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// `Σ_m |fair_m| / (|base_m| + ε)` over the selected metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessScore {
    pub terms: Vec<(FairnessMetric, f64, f64)>,
    pub s_fair: f64,
}

pub fn s_fair_score(
    report: &MetricReport,
    base: &MetricReport,
    cfg: &UniformConfig,
) -> FairnessScore {
    let terms: Vec<(FairnessMetric, f64, f64)> = cfg
        .fairness_metrics
        .iter()
        .map(|&m| (m, m.of(report), m.of(base)))
        .collect();
    let s_fair = terms
        .iter()
        .map(|&(_, fair, base)| fair.abs() / (base.abs() + cfg.epsilon_norm))
        .sum();
    FairnessScore { terms, s_fair }
}

/// `{i : I_0(z_i) < 0 ∧ I_1(z_i) > 0}`.
pub fn select_uniform_bias_set(records: &[InfluenceRecord]) -> Vec<usize> {
    records
        .iter()
        .filter(|r| r.i0 < 0.0 && r.i1 > 0.0)
        .map(|r| r.index)
        .collect()
}

/// `{i : I_0(z_i) − I_1(z_i) < 0}`.
pub fn select_diverse_bias_set(records: &[InfluenceRecord]) -> Vec<usize> {
    records
        .iter()
        .filter(|r| r.delta_if < 0.0)
        .map(|r| r.index)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Uniform,
    Diverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub w: f64,
    pub util: f64,
    pub s_fair: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformDiagnostics {
    pub tau: f64,
    pub w_star: f64,
    pub s_fair: f64,
    pub util: f64,
    pub util_base: f64,
    /// `util(w*) − util_base·(1 − τ)`.
    pub utility_slack: f64,
    pub feasible_grid_points: usize,
    pub grid: Vec<GridPoint>,
}

impl UniformDiagnostics {
    /// Piecewise-linear interpolation of `S_fair` between grid points.
    pub fn interpolate_s_fair(&self, w: f64) -> Option<f64> {
        let pts: Vec<&GridPoint> = self.grid.iter().filter(|p| p.s_fair.is_finite()).collect();
        let hi = pts.iter().position(|p| p.w >= w)?;
        if hi == 0 {
            return (pts[0].w == w).then_some(pts[0].s_fair);
        }
        let (a, b) = (pts[hi - 1], pts[hi]);
        let t = (w - a.w) / (b.w - a.w);
        Some(a.s_fair + t * (b.s_fair - a.s_fair))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiverseDiagnostics {
    pub lambda_f: f64,
    pub lambda_u: f64,
    pub max_fair: f64,
    pub max_util: f64,
    /// Weight reductions in bias-set order.
    pub delta_w: Vec<f64>,
    pub objective: f64,
    /// `λ_f·max_fair − Σ ΔIF·Δw`.
    pub fairness_slack: f64,
    /// `λ_u·max_util − Σ IF·Δw`.
    pub utility_slack: f64,
    pub fractional_count: usize,
    pub lp_status: String,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum PlanDiagnostics {
    Identity,
    Uniform(UniformDiagnostics),
    Diverse(DiverseDiagnostics),
}

/// Optimized per-sample weights; samples outside `bias_set` keep weight 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPlan {
    pub weights: Vec<f64>,
    pub variant: Variant,
    pub bias_set: Vec<usize>,
    pub diagnostics: PlanDiagnostics,
}

impl WeightPlan {
    pub fn identity(n: usize, variant: Variant) -> Self {
        WeightPlan {
            weights: vec![1.0; n],
            variant,
            bias_set: Vec::new(),
            diagnostics: PlanDiagnostics::Identity,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Flat summary: variant, objective, slacks, lambdas or tau, bias-set size.
    pub fn sidecar(&self) -> serde_json::Value {
        use serde_json::json;
        let variant = match self.variant {
            Variant::Uniform => "uniform",
            Variant::Diverse => "diverse",
        };
        match &self.diagnostics {
            PlanDiagnostics::Identity => json!({
                "variant": variant,
                "objective": 0.0,
                "slacks": [],
                "bias_set_size": self.bias_set.len(),
            }),
            PlanDiagnostics::Uniform(d) => json!({
                "variant": variant,
                "objective": d.s_fair,
                "slacks": [d.utility_slack],
                "tau": d.tau,
                "w_star": d.w_star,
                "feasible_grid_points": d.feasible_grid_points,
                "bias_set_size": self.bias_set.len(),
            }),
            PlanDiagnostics::Diverse(d) => json!({
                "variant": variant,
                "objective": d.objective,
                "slacks": [d.fairness_slack, d.utility_slack],
                "lambda_f": d.lambda_f,
                "lambda_u": d.lambda_u,
                "max_fair": d.max_fair,
                "max_util": d.max_util,
                "lp_status": d.lp_status,
                "fractional_count": d.fractional_count,
                "bias_set_size": self.bias_set.len(),
            }),
        }
    }
}

/// Data the uniform search evaluates on.
#[derive(Debug, Clone, Copy)]
pub struct EvalData<'a> {
    pub train: &'a EncodedDataset,
    pub holdout: Option<&'a EncodedDataset>,
}

impl<'a> EvalData<'a> {
    fn pick(&self, split: EvalSplit) -> Result<&'a EncodedDataset> {
        match split {
            EvalSplit::Train => Ok(self.train),
            EvalSplit::Holdout => self.holdout.ok_or_else(|| {
                Error::InvalidConfig("eval_split=holdout without a holdout set".into())
            }),
        }
    }
}

/// Grid search over the common weight `w′` of the uniform bias set.
///
/// Every grid value is evaluated by retraining; the feasible point with the
/// smallest `S_fair` wins, ties going to the larger `w′`.
pub fn optimize_uniform(
    data: EvalData<'_>,
    records: &[InfluenceRecord],
    vanilla: &ModelParams,
    cfg: &UniformConfig,
    tcfg: &TrainConfig,
) -> Result<WeightPlan> {
    cfg.validate()?;
    let train_ds = data.train;
    if records.len() != train_ds.n() {
        return Err(Error::DimensionMismatch {
            expected: train_ds.n(),
            got: records.len(),
        });
    }
    let bias_set = select_uniform_bias_set(records);
    if bias_set.is_empty() {
        return Ok(WeightPlan::identity(train_ds.n(), Variant::Uniform));
    }
    let eval = data.pick(cfg.eval_split)?;
    let base = MetricReport::evaluate(vanilla, eval)?;
    let util_base = cfg.utility_metric.of(&base);
    let floor = util_base * (1.0 - cfg.tau);

    let grid = cfg.grid();
    let points: Vec<GridPoint> = grid
        .par_iter()
        .map(|&w| -> Result<GridPoint> {
            let weights = uniform_weights(train_ds.n(), &bias_set, w);
            let model = match train_weighted(train_ds, &weights, tcfg) {
                Ok(m) => m,
                Err(Error::AllZeroWeights) => {
                    return Ok(GridPoint {
                        w,
                        util: f64::NAN,
                        s_fair: f64::NAN,
                        feasible: false,
                    })
                }
                Err(e) => return Err(e),
            };
            let report = MetricReport::evaluate(&model, eval)?;
            let util = cfg.utility_metric.of(&report);
            Ok(GridPoint {
                w,
                util,
                s_fair: s_fair_score(&report, &base, cfg).s_fair,
                feasible: util >= floor,
            })
        })
        .collect::<Result<_>>()?;

    let best = points
        .iter()
        .filter(|p| p.feasible)
        .fold(None::<&GridPoint>, |best, p| match best {
            Some(b) if p.s_fair > b.s_fair => Some(b),
            // ascending grid: equal scores resolve to the later (larger) w′
            _ => Some(p),
        })
        .ok_or(Error::NoFeasiblePoint)?;

    let diagnostics = UniformDiagnostics {
        tau: cfg.tau,
        w_star: best.w,
        s_fair: best.s_fair,
        util: best.util,
        util_base,
        utility_slack: best.util - floor,
        feasible_grid_points: points.iter().filter(|p| p.feasible).count(),
        grid: points.clone(),
    };
    Ok(WeightPlan {
        weights: uniform_weights(train_ds.n(), &bias_set, diagnostics.w_star),
        variant: Variant::Uniform,
        bias_set,
        diagnostics: PlanDiagnostics::Uniform(diagnostics),
    })
}

pub fn uniform_weights(n: usize, bias_set: &[usize], w: f64) -> Vec<f64> {
    let mut weights = vec![1.0; n];
    for &i in bias_set {
        weights[i] = w;
    }
    weights
}

/// Optimization potentials `(max_fair, max_util)`.
pub fn potentials(
    records: &[InfluenceRecord],
    bias_set: &[usize],
    scope: PotentialScope,
) -> (f64, f64) {
    let pool: Vec<&InfluenceRecord> = match scope {
        PotentialScope::Diverse => bias_set.iter().map(|&i| &records[i]).collect(),
        PotentialScope::All => records.iter().collect(),
    };
    let max_fair = pool.iter().map(|r| r.delta_if).filter(|&v| v < 0.0).sum();
    let max_util = pool.iter().map(|r| r.total_if).filter(|&v| v < 0.0).sum();
    (max_fair, max_util)
}

struct DiverseLp {
    a: Vec<Vec<f64>>,
    max_fair: f64,
    max_util: f64,
}

impl DiverseLp {
    fn new(records: &[InfluenceRecord], bias_set: &[usize], scope: PotentialScope) -> Self {
        let (max_fair, max_util) = potentials(records, bias_set, scope);
        DiverseLp {
            a: vec![
                bias_set.iter().map(|&i| records[i].delta_if).collect(),
                bias_set.iter().map(|&i| records[i].total_if).collect(),
            ],
            max_fair,
            max_util,
        }
    }

    fn solve(&self, lambda_f: f64, lambda_u: f64) -> Result<LpOutcome> {
        let k = self.a[0].len();
        let b = [lambda_f * self.max_fair, lambda_u * self.max_util];
        solve_bounded_lp(&vec![1.0; k], &self.a, &b, &vec![1.0; k])
    }

    fn feasible(&self, lambda_f: f64, lambda_u: f64) -> Result<bool> {
        Ok(matches!(
            self.solve(lambda_f, lambda_u)?,
            LpOutcome::Optimal(_)
        ))
    }

    /// Largest feasible `λ_f ≤ upper` at `λ_u` by bisection; feasibility is
    /// monotone because `max_fair ≤ 0`.
    fn max_feasible_lambda_f(&self, lambda_u: f64, upper: f64) -> Result<Option<f64>> {
        if !self.feasible(0.0, lambda_u)? {
            return Ok(None);
        }
        let (mut lo, mut hi) = (0.0, upper);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.feasible(mid, lambda_u)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Some(lo))
    }
}

/// Solves the diverse reweighting LP over the samples in `bias_set`.
pub fn solve_diverse_lp(
    records: &[InfluenceRecord],
    bias_set: &[usize],
    cfg: &DiverseConfig,
) -> Result<WeightPlan> {
    cfg.validate()?;
    if let Some(&bad) = bias_set.iter().find(|&&i| i >= records.len()) {
        return Err(Error::DimensionMismatch {
            expected: records.len(),
            got: bad,
        });
    }
    let lp = DiverseLp::new(records, bias_set, cfg.potential_scope);
    let solution = match lp.solve(cfg.lambda_f, cfg.lambda_u)? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => {
            return Err(Error::Infeasible {
                lambda_f: cfg.lambda_f,
                lambda_u: cfg.lambda_u,
                max_feasible_lambda_f: lp.max_feasible_lambda_f(cfg.lambda_u, cfg.lambda_f)?,
            })
        }
    };
    let mut weights = vec![1.0; records.len()];
    for (&i, &dw) in bias_set.iter().zip(&solution.x) {
        weights[i] = (1.0 - dw).clamp(0.0, 1.0);
    }
    let fractional_count = solution
        .x
        .iter()
        .filter(|&&v| v > FEASIBILITY_TOL && v < 1.0 - FEASIBILITY_TOL)
        .count();
    let diagnostics = DiverseDiagnostics {
        lambda_f: cfg.lambda_f,
        lambda_u: cfg.lambda_u,
        max_fair: lp.max_fair,
        max_util: lp.max_util,
        objective: solution.objective,
        fairness_slack: solution.slacks[0],
        utility_slack: solution.slacks[1],
        fractional_count,
        lp_status: "optimal".into(),
        iterations: solution.iterations,
        delta_w: solution.x,
    };
    // a basic optimum of a two-row LP has at most two fractional coordinates
    debug_assert!(diagnostics.fractional_count <= 2);
    Ok(WeightPlan {
        weights,
        variant: Variant::Diverse,
        bias_set: bias_set.to_vec(),
        diagnostics: PlanDiagnostics::Diverse(diagnostics),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum VariantConfig {
    Uniform(UniformConfig),
    Diverse(DiverseConfig),
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub vanilla: ModelParams,
    pub fair: ModelParams,
    pub records: Vec<InfluenceRecord>,
    pub plan: WeightPlan,
    pub before: MetricReport,
    pub after: MetricReport,
}

/// Vanilla training, influence, bias selection, weight optimization,
/// weighted retraining, and held-out evaluation of both models.
pub fn iffair_pipeline(
    train_ds: &EncodedDataset,
    test_ds: &EncodedDataset,
    variant: &VariantConfig,
    tcfg: &TrainConfig,
    damping: f64,
) -> Result<PipelineOutcome> {
    train_ds.check_trainable()?;
    let vanilla = train(train_ds, tcfg)?;
    let part = partition_groups(train_ds)?;
    let records = group_influence_all(&vanilla, train_ds, &part, damping)?;
    let plan = match variant {
        VariantConfig::Uniform(cfg) => optimize_uniform(
            EvalData {
                train: train_ds,
                holdout: Some(test_ds),
            },
            &records,
            &vanilla,
            cfg,
            tcfg,
        )?,
        VariantConfig::Diverse(cfg) => {
            solve_diverse_lp(&records, &select_diverse_bias_set(&records), cfg)?
        }
    };
    let fair = if plan.is_identity() {
        vanilla.clone()
    } else {
        train_weighted(train_ds, &plan.weights, tcfg)?
    };
    let before = MetricReport::evaluate(&vanilla, test_ds)?;
    let after = MetricReport::evaluate(&fair, test_ds)?;
    Ok(PipelineOutcome {
        vanilla,
        fair,
        records,
        plan,
        before,
        after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recs(pairs: &[(f64, f64)]) -> Vec<InfluenceRecord> {
        pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| InfluenceRecord::new(i, a, b))
            .collect()
    }

    /// Records with prescribed (ΔIF, IF).
    fn from_delta_total(pairs: &[(f64, f64)]) -> Vec<InfluenceRecord> {
        pairs
            .iter()
            .enumerate()
            .map(|(i, &(d, t))| InfluenceRecord {
                index: i,
                i0: 0.5 * (t + d),
                i1: 0.5 * (t - d),
                delta_if: d,
                total_if: t,
            })
            .collect()
    }

    #[test]
    fn uniform_bias_set() {
        assert_eq!(
            select_uniform_bias_set(&recs(&[(-1.0, 2.0), (-1.0, -1.0), (1.0, 1.0)])),
            vec![0]
        );
        assert!(select_uniform_bias_set(&recs(&[(0.0, 1.0), (2.0, 1.0)])).is_empty());
    }

    #[test]
    fn diverse_bias_set() {
        let r = from_delta_total(&[(-0.5, 0.0), (0.0, 0.0), (0.3, 0.0)]);
        assert_eq!(select_diverse_bias_set(&r), vec![0]);
        assert!(select_diverse_bias_set(&recs(&[(0.2, 0.2), (-1.0, -1.0)])).is_empty());
    }

    #[test]
    fn s_fair_examples() {
        let mk = |dp, fpr, eodds, err| MetricReport {
            delta_dp: dp,
            delta_fpr: fpr,
            delta_eodds: eodds,
            delta_err: err,
            acc: 0.0,
            f1: 0.0,
            auc: 0.0,
            warnings: vec![],
        };
        let base = mk(0.2, -0.1, 0.3, 0.05);
        let cfg = UniformConfig::default();
        assert_eq!(
            s_fair_score(&mk(0.0, 0.0, 0.0, 0.0), &base, &cfg).s_fair,
            0.0
        );
        assert!((s_fair_score(&base, &base, &cfg).s_fair - 4.0).abs() < 1e-6);
        let cfg2 = UniformConfig {
            fairness_metrics: vec![FairnessMetric::Dp, FairnessMetric::Fpr],
            epsilon_norm: 0.0,
            ..UniformConfig::default()
        };
        let s = s_fair_score(&mk(0.1, 0.2, 9.0, 9.0), &mk(0.2, 0.2, 1.0, 1.0), &cfg2);
        assert_eq!(s.s_fair, 1.5);
    }

    #[test]
    fn lp_zero_lambdas_identity() {
        let r = from_delta_total(&[(-1.0, 0.5), (-2.0, -0.3), (0.4, 1.0)]);
        let cfg = DiverseConfig {
            lambda_f: 0.0,
            lambda_u: 0.0,
            ..Default::default()
        };
        let plan = solve_diverse_lp(&r, &select_diverse_bias_set(&r), &cfg).unwrap();
        assert!(plan.is_identity());
    }

    #[test]
    fn lp_single_variable_vertex() {
        let r = from_delta_total(&[(-1.0, -1.0)]);
        let cfg = DiverseConfig {
            lambda_f: 1.0,
            lambda_u: 1.0,
            ..Default::default()
        };
        let plan = solve_diverse_lp(&r, &[0], &cfg).unwrap();
        assert_eq!(plan.weights, vec![0.0]);
        match plan.diagnostics {
            PlanDiagnostics::Diverse(d) => {
                assert_eq!((d.max_fair, d.max_util), (-1.0, -1.0));
                assert_eq!(d.delta_w, vec![1.0]);
            }
            _ => panic!("diverse diagnostics expected"),
        }
    }

    #[test]
    fn lp_infeasible_reports_bisection() {
        let r = from_delta_total(&[(-1.0, 1.0)]);
        let cfg = DiverseConfig {
            lambda_f: 1.0,
            lambda_u: 1.0,
            ..Default::default()
        };
        match solve_diverse_lp(&r, &[0], &cfg) {
            Err(Error::Infeasible {
                max_feasible_lambda_f,
                ..
            }) => {
                // max_util = 0 forces Δw = 0, so only λ_f = 0 is feasible
                assert!(max_feasible_lambda_f.unwrap() < 1e-9);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn interpolation_between_grid_points() {
        let d = UniformDiagnostics {
            tau: 0.1,
            w_star: 0.0,
            s_fair: 0.0,
            util: 0.0,
            util_base: 0.0,
            utility_slack: 0.0,
            feasible_grid_points: 2,
            grid: vec![
                GridPoint {
                    w: 0.0,
                    util: 0.0,
                    s_fair: 1.0,
                    feasible: true,
                },
                GridPoint {
                    w: 1.0,
                    util: 0.0,
                    s_fair: 3.0,
                    feasible: true,
                },
            ],
        };
        assert_eq!(d.interpolate_s_fair(0.25), Some(1.5));
        assert_eq!(d.interpolate_s_fair(0.0), Some(1.0));
    }

    #[test]
    fn config_validation() {
        assert!(DiverseConfig {
            lambda_f: 1.5,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(UniformConfig {
            grid_points: 1,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert_eq!(UniformConfig::default().grid().len(), 21);
    }
}
