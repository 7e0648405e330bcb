//! Dense bounded-variable primal simplex for small-row LPs:
//!
//! ```text
//! minimize   cᵀx
//! subject to A x ≤ b,   0 ≤ x ≤ u
//! ```
//!
//! Nonbasic variables sit at either bound, so box constraints never enter
//! the basis. Infeasible starts (negative `b`) go through a phase with one
//! artificial per violated row.

use crate::error::{Error, Result};

/// Largest tolerated constraint violation, in the units of `b`.
pub const FEASIBILITY_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-12;
const COST_TOL: f64 = 1e-12;
const BLAND_AFTER_DEGENERATE: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// `b − A x` per row (nonnegative up to tolerance).
    pub slacks: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
}

pub fn solve_bounded_lp(c: &[f64], a: &[Vec<f64>], b: &[f64], upper: &[f64]) -> Result<LpOutcome> {
    let n = c.len();
    let m = a.len();
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: b.len(),
        });
    }
    if upper.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: upper.len(),
        });
    }
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: row.len(),
        });
    }
    if upper.iter().any(|&u| !(u >= 0.0)) {
        return Err(Error::InvalidConfig(
            "upper bounds must be nonnegative".into(),
        ));
    }
    let all_finite = c
        .iter()
        .chain(b)
        .chain(a.iter().flatten())
        .all(|v| v.is_finite());
    if !all_finite {
        return Err(Error::NonFinite("lp data"));
    }

    // Row scaling keeps pivot tolerances meaningful across magnitudes.
    let scale: Vec<f64> = (0..m)
        .map(|i| {
            let s = a[i].iter().fold(b[i].abs(), |acc, v| acc.max(v.abs()));
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let a_s: Vec<Vec<f64>> = (0..m)
        .map(|i| a[i].iter().map(|v| v / scale[i]).collect())
        .collect();
    let b_s: Vec<f64> = (0..m).map(|i| b[i] / scale[i]).collect();

    let mut tab = Tableau::new(&a_s, &b_s, upper);
    let mut iterations = 0;
    if tab.n_art > 0 {
        let mut cost = vec![0.0; tab.cols()];
        for j in tab.art_start..tab.cols() {
            cost[j] = 1.0;
        }
        iterations += tab.optimize(&cost)?;
        let x = tab.structural(n);
        if max_violation(a, b, &x) > FEASIBILITY_TOL {
            return Ok(LpOutcome::Infeasible);
        }
        // artificials may only shrink from here on
        for j in tab.art_start..tab.cols() {
            tab.upper[j] = tab.x[j].max(0.0);
        }
    }
    let mut cost = vec![0.0; tab.cols()];
    cost[..n].copy_from_slice(c);
    iterations += tab.optimize(&cost)?;
    let x = tab.structural(n);
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    let slacks = (0..m)
        .map(|i| b[i] - a[i].iter().zip(&x).map(|(aij, xj)| aij * xj).sum::<f64>())
        .collect();
    Ok(LpOutcome::Optimal(LpSolution {
        x,
        objective,
        slacks,
        iterations,
    }))
}

pub fn max_violation(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(row, bi)| row.iter().zip(x).map(|(aij, xj)| aij * xj).sum::<f64>() - bi)
        .fold(0.0, f64::max)
}

struct Tableau {
    /// Current `B⁻¹A`, `m × cols`.
    t: Vec<Vec<f64>>,
    /// Original constraint columns (after row scaling and sign flips).
    orig: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    x: Vec<f64>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    art_start: usize,
    n_art: usize,
}

impl Tableau {
    fn new(a: &[Vec<f64>], b: &[f64], upper_struct: &[f64]) -> Self {
        let m = a.len();
        let n = upper_struct.len();
        let negative: Vec<usize> = (0..m).filter(|&i| b[i] < 0.0).collect();
        let art_start = n + m;
        let cols = art_start + negative.len();
        let mut t = vec![vec![0.0; cols]; m];
        let mut rhs = vec![0.0; m];
        let mut basis = vec![0; m];
        let mut x = vec![0.0; cols];
        for i in 0..m {
            let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[i][j] = sign * a[i][j];
            }
            t[i][n + i] = sign;
            rhs[i] = sign * b[i];
            if let Some(k) = negative.iter().position(|&r| r == i) {
                t[i][art_start + k] = 1.0;
                basis[i] = art_start + k;
            } else {
                basis[i] = n + i;
            }
            x[basis[i]] = rhs[i];
        }
        let mut upper = upper_struct.to_vec();
        upper.extend(std::iter::repeat_n(f64::INFINITY, cols - n));
        Tableau {
            orig: t.clone(),
            t,
            rhs,
            basis,
            x,
            upper,
            at_upper: vec![false; cols],
            art_start,
            n_art: negative.len(),
        }
    }

    fn cols(&self) -> usize {
        self.x.len()
    }

    fn is_basic(&self, j: usize) -> Option<usize> {
        self.basis.iter().position(|&b| b == j)
    }

    fn optimize(&mut self, cost: &[f64]) -> Result<usize> {
        let m = self.t.len();
        let cols = self.cols();
        let max_iter = 50 * (cols + m) + 1000;
        let mut degenerate_streak = 0;
        for iter in 0..max_iter {
            let mut basic = vec![false; cols];
            for &j in &self.basis {
                basic[j] = true;
            }
            let bland = degenerate_streak >= BLAND_AFTER_DEGENERATE;
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..cols {
                if basic[j] || self.upper[j] == 0.0 {
                    continue;
                }
                let d = cost[j]
                    - (0..m)
                        .map(|i| cost[self.basis[i]] * self.t[i][j])
                        .sum::<f64>();
                let improving = if self.at_upper[j] {
                    d > COST_TOL
                } else {
                    d < -COST_TOL
                };
                if !improving {
                    continue;
                }
                match entering {
                    None => entering = Some((j, d)),
                    Some((_, best)) if !bland && d.abs() > best.abs() => entering = Some((j, d)),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some((j, _)) = entering else {
                self.refresh_basic_values();
                return Ok(iter);
            };
            let sigma = if self.at_upper[j] { -1.0 } else { 1.0 };

            let mut theta = self.upper[j];
            let mut leaving: Option<(usize, bool)> = None;
            for i in 0..m {
                let alpha = self.t[i][j];
                if alpha.abs() < PIVOT_TOL {
                    continue;
                }
                let bvar = self.basis[i];
                let rate = -sigma * alpha;
                let (limit, hits_upper) = if rate < 0.0 {
                    ((self.x[bvar] / -rate).max(0.0), false)
                } else if self.upper[bvar].is_finite() {
                    (((self.upper[bvar] - self.x[bvar]) / rate).max(0.0), true)
                } else {
                    continue;
                };
                let better = match leaving {
                    _ if limit < theta => true,
                    Some((r, _)) if limit == theta => bvar < self.basis[r],
                    _ => false,
                };
                if better {
                    theta = limit;
                    leaving = Some((i, hits_upper));
                }
            }
            if !theta.is_finite() {
                return Err(Error::InvalidConfig("lp is unbounded".into()));
            }
            degenerate_streak = if theta < 1e-14 {
                degenerate_streak + 1
            } else {
                0
            };
            for i in 0..m {
                let bvar = self.basis[i];
                self.x[bvar] -= sigma * theta * self.t[i][j];
            }
            self.x[j] += sigma * theta;
            match leaving {
                None => {
                    self.at_upper[j] = !self.at_upper[j];
                    self.x[j] = if self.at_upper[j] { self.upper[j] } else { 0.0 };
                }
                Some((r, hits_upper)) => {
                    let out = self.basis[r];
                    self.pivot(r, j);
                    self.basis[r] = j;
                    self.at_upper[out] = hits_upper;
                    self.x[out] = if hits_upper { self.upper[out] } else { 0.0 };
                    self.at_upper[j] = false;
                }
            }
        }
        Err(Error::NoConvergence(f64::NAN))
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.t[r][j];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[j] = 0.0;
            }
        }
    }

    /// Re-solves `B x_B = rhs − N x_N` against the original columns.
    fn refresh_basic_values(&mut self) {
        let m = self.basis.len();
        let mut mat: Vec<Vec<f64>> = (0..m)
            .map(|i| self.basis.iter().map(|&bj| self.orig[i][bj]).collect())
            .collect();
        let mut r: Vec<f64> = (0..m)
            .map(|i| {
                let nonbasic: f64 = (0..self.cols())
                    .filter(|&j| self.is_basic(j).is_none())
                    .map(|j| self.orig[i][j] * self.x[j])
                    .sum();
                self.rhs[i] - nonbasic
            })
            .collect();
        if let Some(sol) = gauss_solve(&mut mat, &mut r) {
            for (k, &bj) in self.basis.clone().iter().enumerate() {
                self.x[bj] = sol[k];
            }
        }
    }

    fn structural(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|j| self.x[j].clamp(0.0, self.upper[j]))
            .collect()
    }
}

fn gauss_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let m = b.len();
    for col in 0..m {
        let piv = (col..m).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..m {
            let f = a[row][col] / a[col][col];
            for k in col..m {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let s: f64 = ((row + 1)..m).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
