//! Group-oriented influence of training samples.
//!
//! For every training sample `z_i` and group `a`,
//! `I_a(z_i) = ∇ℓ(z_i)ᵀ H⁻¹ ∇R_a`, where `∇R_a` is the (unnormalized) sum
//! of head gradients over group `a` and `H` the damped Hessian of the
//! empirical risk. `I_a(z) > 0` means removing `z` increases the total
//! loss of group `a` to first order.

use std::io::Write;

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::data::{EncodedDataset, GroupPartition};
use crate::error::{Error, Result};
use crate::linalg::{conjugate_gradient, norm2, Cholesky};
use crate::model::{self, ModelParams};

/// Largest Hessian dimension solved by direct factorization.
const DIRECT_SOLVE_MAX_DIM: usize = 2000;

pub const DEFAULT_DAMPING: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct HessianHandle {
    h: Array2<f64>,
    damping: f64,
    n: usize,
}

impl HessianHandle {
    pub fn new(h: Array2<f64>, damping: f64, n: usize) -> Self {
        HessianHandle { h, damping, n }
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.h
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }
}

/// Inverse-Hessian-vector products for both groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Ihvp {
    pub v_0: Array1<f64>,
    pub v_1: Array1<f64>,
    pub residual_0: f64,
    pub residual_1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfluenceRecord {
    pub index: usize,
    pub i0: f64,
    pub i1: f64,
    pub delta_if: f64,
    pub total_if: f64,
}

impl InfluenceRecord {
    pub fn new(index: usize, i0: f64, i1: f64) -> Self {
        InfluenceRecord {
            index,
            i0,
            i1,
            delta_if: i0 - i1,
            total_if: i0 + i1,
        }
    }
}

fn residual_tolerance(g: ArrayView1<f64>) -> f64 {
    1e-8 * norm2(g).max(1.0)
}

/// Solves `H v = g`.
///
/// Cholesky with one round of iterative refinement up to dimension 2000,
/// conjugate gradient above. Either way `‖Hv − g‖ ≤ 1e-8·max(1, ‖g‖)` on
/// success.
pub fn solve_ihvp(h: &HessianHandle, g: ArrayView1<f64>) -> Result<Array1<f64>> {
    solve_with_residual(h, g).map(|(v, _)| v)
}

fn solve_with_residual(h: &HessianHandle, g: ArrayView1<f64>) -> Result<(Array1<f64>, f64)> {
    if g.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: g.len(),
        });
    }
    let tol = residual_tolerance(g);
    let a = h.h.view();
    if h.dim() <= DIRECT_SOLVE_MAX_DIM {
        let chol = Cholesky::factor(a)?;
        let mut v = chol.solve(g);
        let mut r = &g - &a.dot(&v);
        let mut res = norm2(r.view());
        if res > tol {
            v += &chol.solve(r.view());
            r = &g - &a.dot(&v);
            res = norm2(r.view());
        }
        if res > tol || !res.is_finite() {
            return Err(Error::NoConvergence(res));
        }
        Ok((v, res))
    } else {
        conjugate_gradient(a, g, tol, 10 * h.dim())
    }
}

/// Per-group sums of head gradients, accumulated in ascending index order.
pub fn group_gradient_sums(
    m: &ModelParams,
    ds: &EncodedDataset,
    part: &GroupPartition,
) -> Result<(Array1<f64>, Array1<f64>)> {
    let grads = model::per_sample_gradients(m, ds)?;
    Ok((sum_rows(&grads, &part.idx_0), sum_rows(&grads, &part.idx_1)))
}

fn sum_rows(grads: &Array2<f64>, idx: &[usize]) -> Array1<f64> {
    let mut acc = Array1::zeros(grads.ncols());
    for &i in idx {
        acc += &grads.row(i);
    }
    acc
}

pub fn compute_ihvp(
    h: &HessianHandle,
    grad_0: ArrayView1<f64>,
    grad_1: ArrayView1<f64>,
) -> Result<Ihvp> {
    let (v_0, residual_0) = solve_with_residual(h, grad_0)?;
    let (v_1, residual_1) = solve_with_residual(h, grad_1)?;
    Ok(Ihvp {
        v_0,
        v_1,
        residual_0,
        residual_1,
    })
}

/// Group influences of every sample of `ds` on both groups, in index order.
pub fn group_influence_all(
    m: &ModelParams,
    ds: &EncodedDataset,
    part: &GroupPartition,
    damping: f64,
) -> Result<Vec<InfluenceRecord>> {
    let grads = model::per_sample_gradients(m, ds)?;
    let grad_0 = sum_rows(&grads, &part.idx_0);
    let grad_1 = sum_rows(&grads, &part.idx_1);
    let h = model::hessian(m, ds, damping)?;
    let ihvp = compute_ihvp(&h, grad_0.view(), grad_1.view())?;
    let i0 = grads.dot(&ihvp.v_0);
    let i1 = grads.dot(&ihvp.v_1);
    let records: Vec<InfluenceRecord> = (0..ds.n())
        .map(|i| InfluenceRecord::new(i, i0[i], i1[i]))
        .collect();
    if records
        .iter()
        .any(|r| !(r.i0.is_finite() && r.i1.is_finite()))
    {
        return Err(Error::NonFinite("influence"));
    }
    Ok(records)
}

/// Loss change of `z_j` when `z` is removed: `∇ℓ(z_j)ᵀ H⁻¹ ∇ℓ(z)`.
pub fn pairwise_influence(
    m: &ModelParams,
    h: &HessianHandle,
    z: (ArrayView1<f64>, f64),
    z_j: (ArrayView1<f64>, f64),
) -> Result<f64> {
    let g = model::per_sample_gradient(m, z.0, z.1)?;
    let g_j = model::per_sample_gradient(m, z_j.0, z_j.1)?;
    Ok(g_j.dot(&solve_ihvp(h, g.view())?))
}

pub fn write_influence_csv<W: Write>(records: &[InfluenceRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "i0", "i1", "delta_if", "total_if"])?;
    for r in records {
        w.write_record([
            r.index.to_string(),
            format!("{:.16e}", r.i0),
            format!("{:.16e}", r.i1),
            format!("{:.16e}", r.delta_if),
            format!("{:.16e}", r.total_if),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<influence csv>", e))?;
    Ok(())
}
