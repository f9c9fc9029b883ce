//! Smallest eigenvalue of the interior operator `-lap_h + q` by inverse
//! iteration.

use super::cg::pcg;
use crate::error::{Error, Result};
use crate::grid::{assemble_operator, Field, Grid};

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Stop when consecutive Rayleigh quotients agree to this relative level.
    pub rtol: f64,
    pub max_iterations: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            rtol: 1e-11,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    /// Unit-norm eigenvector on the interior unknowns.
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Smallest eigenvalue of `-lap_h + q` with zero Dirichlet data.
pub fn smallest_eigenvalue(grid: &Grid, q: &Field) -> Result<f64> {
    Ok(smallest_eigenpair(grid, q, EigenOptions::default(), None)?.value)
}

/// Inverse iteration on `A + sigma`, `sigma = max(0, -min q)`, which is
/// positive definite because `-lap_h` is. For `q >= 0` this is plain
/// inverse iteration with shift 0.
pub fn smallest_eigenpair(
    grid: &Grid,
    q: &Field,
    opts: EigenOptions,
    start: Option<&[f64]>,
) -> Result<EigenPair> {
    grid.check(q.shape())?;
    let qmin = grid
        .interior_nodes()
        .iter()
        .map(|&k| q.get(k))
        .fold(f64::INFINITY, f64::min);
    let sigma = (-qmin).max(0.0);
    let op = assemble_operator(grid, q)?.shifted(sigma);
    let n = op.dim();
    let mut x: Vec<f64> = match start {
        Some(s) if s.len() == n => s.to_vec(),
        _ => vec![1.0; n],
    };
    normalize(&mut x);
    let mut ax = vec![0.0; n];
    let mut previous = f64::NAN;
    let mut change = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        let mut y = x.clone();
        pcg(&op, &x, &mut y, 1e-10).map_err(|e| match e {
            Error::Indefinite(v) => Error::Indefinite(v - sigma),
            other => other,
        })?;
        normalize(&mut y);
        x = y;
        op.apply_interior(&x, &mut ax);
        let rq: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        change = ((rq - previous) / rq).abs();
        previous = rq;
        if change <= opts.rtol {
            return Ok(EigenPair {
                value: rq - sigma,
                vector: x,
                iterations: it,
            });
        }
    }
    if change <= 1e-6 {
        return Ok(EigenPair {
            value: previous - sigma,
            vector: x,
            iterations: opts.max_iterations,
        });
    }
    Err(Error::Eigenvalue {
        iterations: opts.max_iterations,
    })
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn discrete_ground(n: usize) -> f64 {
        let h = 1.0 / (n - 1) as f64;
        2.0 * 4.0 / (h * h) * (PI * h / 2.0).sin().powi(2)
    }

    #[test]
    fn matches_discrete_dirichlet_spectrum() {
        let g = Grid::unit_square(33).unwrap();
        let lam = smallest_eigenvalue(&g, &Field::zeros(&g)).unwrap();
        assert!((lam - discrete_ground(33)).abs() < 1e-8 * lam);
        assert!((lam - 2.0 * PI * PI).abs() / (2.0 * PI * PI) < 0.01);
    }

    #[test]
    fn constant_shift_moves_eigenvalue() {
        let g = Grid::unit_square(25).unwrap();
        let base = smallest_eigenvalue(&g, &Field::zeros(&g)).unwrap();
        for c in [3.5, -(2.0 * PI * PI + 1.0)] {
            let lam = smallest_eigenvalue(&g, &Field::constant(&g, c)).unwrap();
            assert!(
                (lam - base - c).abs() < 1e-8,
                "c={c}: {lam} vs {}",
                base + c
            );
        }
        let neg = smallest_eigenvalue(&g, &Field::constant(&g, -(2.0 * PI * PI + 1.0))).unwrap();
        assert!(neg < 0.0);
    }

    #[test]
    fn anisotropic_rectangle() {
        let g = crate::grid::build_rectangle(41, 21, 2.0, 1.0).unwrap();
        let lam = smallest_eigenvalue(&g, &Field::zeros(&g)).unwrap();
        let (hx, hy) = (g.hx(), g.hy());
        let exact = 4.0 / (hx * hx) * (PI * hx / 4.0).sin().powi(2)
            + 4.0 / (hy * hy) * (PI * hy / 2.0).sin().powi(2);
        assert!((lam - exact).abs() < 1e-8 * exact);
    }
}
