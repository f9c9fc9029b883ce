//! Jacobi-preconditioned conjugate gradient on the interior unknowns.

use crate::error::{Error, Result};
use crate::grid::LinearOperator;

#[derive(Debug, Clone, Copy)]
pub(crate) struct CgStats {
    #[allow(dead_code)]
    pub iterations: usize,
    #[allow(dead_code)]
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` starting from the incoming `x`. Stops once
/// `||r||_2 <= rtol ||b||_2`. Non-positive curvature is reported as
/// [`Error::Indefinite`].
pub(crate) fn pcg(op: &LinearOperator, b: &[f64], x: &mut [f64], rtol: f64) -> Result<CgStats> {
    let n = op.dim();
    let diag = op.diagonal();
    if let Some(&d) = diag.iter().find(|&&d| d <= 0.0) {
        return Err(Error::Indefinite(d));
    }
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgStats {
            iterations: 0,
            residual: 0.0,
        });
    }
    let target = rtol * bnorm;
    let mut ax = vec![0.0; n];
    op.apply_interior(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let max_iter = 10 * n + 100;
    for it in 0..max_iter {
        let rnorm = dot(&r, &r).sqrt();
        if rnorm <= target {
            return Ok(CgStats {
                iterations: it,
                residual: rnorm,
            });
        }
        op.apply_interior(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Indefinite(pap / dot(&p, &p)));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearSolve {
        iterations: max_iter,
        residual: dot(&r, &r).sqrt(),
    })
}
