//! Amplitude derivatives of `eps -> Lambda_a(eps)` by central differences.

use crate::dnmap::{dn_map, DNTrace};
use crate::elliptic::{solve_semilinear, InitialGuess, NewtonOptions};
use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Field, Grid};
use crate::nonlinearity::{factorial, Nonlinearity};

/// Weights of the `order`-th derivative at 0 on the nodes `offsets`
/// (Fornberg's recursion).
pub fn central_weights(order: usize, offsets: &[f64]) -> Vec<f64> {
    let n = offsets.len();
    // c[j][k]: weight of node j for derivative k
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

#[derive(Debug, Clone)]
pub struct AmplitudeOptions {
    pub newton: NewtonOptions,
}

impl Default for AmplitudeOptions {
    fn default() -> Self {
        AmplitudeOptions {
            newton: NewtonOptions { rtol: 1e-14, atol: 0.0, ..NewtonOptions::default() },
        }
    }
}

/// `(1/k!) d^k/d eps^k Lambda_a(eps)` at `eps = 0`, from the central stencil
/// on `j * step`, `|j| <= (k + 1) / 2` (second order in `step`).
pub fn dn_amplitude_derivative(
    grid: &Grid,
    a: &Nonlinearity,
    k: usize,
    step: f64,
    opts: &AmplitudeOptions,
) -> Result<DNTrace> {
    if k == 0 || k > 6 {
        return Err(Error::InvalidParameter(format!("derivative order must be in 1..=6, got {k}")));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParameter("step must be positive".into()));
    }
    let p = (k as i64 + 1) / 2;
    let offsets: Vec<f64> = (-p..=p).map(|j| j as f64).collect();
    let weights = central_weights(k, &offsets);
    let scale = 1.0 / (step.powi(k as i32) * factorial(k as u32));
    let base = dn_map(grid, &Field::zeros(grid))?;
    let mut acc = vec![0.0; base.len()];
    for (j, w) in (-p..=p).zip(&weights) {
        if w.abs() < 1e-13 {
            continue;
        }
        let eps = j as f64 * step;
        let data = BoundaryData::constant(grid, eps);
        let opts = NewtonOptions { initial: InitialGuess::HarmonicExtension, ..opts.newton.clone() };
        let (u, _) = solve_semilinear(grid, a, &data, &opts)?;
        let t = dn_map(grid, &u)?;
        for (s, v) in acc.iter_mut().zip(t.values()) {
            *s += w * scale * v;
        }
    }
    base.with_values(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_stencils() {
        let w = central_weights(1, &[-1.0, 0.0, 1.0]);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
        let w = central_weights(2, &[-1.0, 0.0, 1.0]);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] + 2.0).abs() < 1e-15);
        let w = central_weights(3, &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let expect = [-0.5, 1.0, 0.0, -1.0, 0.5];
        assert!(w.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-14), "{w:?}");
        let w = central_weights(4, &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let expect = [1.0, -4.0, 6.0, -4.0, 1.0];
        assert!(w.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-13), "{w:?}");
    }

    #[test]
    fn stencils_differentiate_polynomials() {
        let offsets: Vec<f64> = (-3..=3).map(|j| j as f64).collect();
        for k in 1..=6 {
            let w = central_weights(k, &offsets);
            // d^k/dx^k x^k = k!
            let s: f64 = w.iter().zip(&offsets).map(|(w, x)| w * x.powi(k as i32)).sum();
            assert!((s - factorial(k as u32)).abs() < 1e-9 * factorial(k as u32), "k={k}: {s}");
        }
    }

    #[test]
    fn laplace_has_no_higher_derivatives() {
        let g = Grid::unit_square(17).unwrap();
        for k in 1..=3 {
            let t = dn_amplitude_derivative(&g, &Nonlinearity::zero(), k, 0.1, &AmplitudeOptions::default()).unwrap();
            assert!(t.sup_norm() < 1e-9, "k={k}: {}", t.sup_norm());
        }
    }

    #[test]
    fn first_derivative_vanishes_without_linear_term() {
        // only the O(step^2) stencil error remains
        let g = Grid::unit_square(17).unwrap();
        let at = |step| {
            dn_amplitude_derivative(&g, &Nonlinearity::cubic(), 1, step, &AmplitudeOptions::default())
                .unwrap()
                .sup_norm()
        };
        let (e1, e2) = (at(0.05), at(0.025));
        assert!(e1 < 1e-2);
        assert!(((e1 / e2).log2() - 2.0).abs() < 0.05, "{e1} {e2}");
    }
}
