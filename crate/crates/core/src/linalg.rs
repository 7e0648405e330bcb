//! Dense symmetric positive-definite solves.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Array2<f64>,
}

impl Cholesky {
    pub fn factor(a: ArrayView2<f64>) -> Result<Self> {
        let k = a.nrows();
        if a.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: a.ncols(),
            });
        }
        let mut l = Array2::<f64>::zeros((k, k));
        for j in 0..k {
            let mut diag = a[[j, j]];
            for p in 0..j {
                diag -= l[[j, p]] * l[[j, p]];
            }
            if !(diag > 0.0) || !diag.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            let ljj = diag.sqrt();
            l[[j, j]] = ljj;
            for i in (j + 1)..k {
                let mut s = a[[i, j]];
                for p in 0..j {
                    s -= l[[i, p]] * l[[j, p]];
                }
                l[[i, j]] = s / ljj;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn solve(&self, b: ArrayView1<f64>) -> Array1<f64> {
        let k = self.l.nrows();
        let mut z = b.to_owned();
        for i in 0..k {
            let mut s = z[i];
            for p in 0..i {
                s -= self.l[[i, p]] * z[p];
            }
            z[i] = s / self.l[[i, i]];
        }
        for i in (0..k).rev() {
            let mut s = z[i];
            for p in (i + 1)..k {
                s -= self.l[[p, i]] * z[p];
            }
            z[i] = s / self.l[[i, i]];
        }
        z
    }
}

/// Conjugate gradient on an SPD matrix, from a zero start.
///
/// Returns the iterate and its final residual norm; errors if `tol` is not
/// reached within `max_iter` iterations.
pub fn conjugate_gradient(
    a: ArrayView2<f64>,
    b: ArrayView1<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<(Array1<f64>, f64)> {
    let mut x = Array1::<f64>::zeros(b.len());
    let mut r = b.to_owned();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    for _ in 0..max_iter {
        if rr.sqrt() <= tol {
            return Ok((x, rr.sqrt()));
        }
        let ap = a.dot(&p);
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let alpha = rr / pap;
        x.scaled_add(alpha, &p);
        r.scaled_add(-alpha, &ap);
        let rr_next = r.dot(&r);
        p = &r + &(&p * (rr_next / rr));
        rr = rr_next;
    }
    let res = (&b.to_owned() - &a.dot(&x))
        .dot(&(&b.to_owned() - &a.dot(&x)))
        .sqrt();
    if res <= tol {
        Ok((x, res))
    } else {
        Err(Error::NoConvergence(res))
    }
}

pub fn norm2(v: ArrayView1<f64>) -> f64 {
    v.dot(&v).sqrt()
}
