//! Amplitude continuation for an empirical well-posedness radius.

use serde::Serialize;

use super::{smallest_eigenpair, solve_semilinear, EigenOptions, InitialGuess, NewtonOptions};
use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Field, Grid};
use crate::nonlinearity::Nonlinearity;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusStep {
    pub t: f64,
    pub converged: bool,
    pub newton_iterations: usize,
    pub smallest_eigenvalue: Option<f64>,
    pub solution_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusReport {
    /// Largest amplitude reached before failure, or `tmax`.
    pub radius: f64,
    pub tmax: f64,
    pub reached_tmax: bool,
    pub steps: Vec<RadiusStep>,
}

/// Continuation in `t` over `tmax * k / steps`, `k = 1..=steps`, solving with
/// data `t f0` from the previous solution. Stops at the first Newton failure
/// or non-positive linearized eigenvalue.
pub fn estimate_wellposedness_radius(
    grid: &Grid,
    a: &Nonlinearity,
    f0: &BoundaryData,
    tmax: f64,
    steps: usize,
) -> Result<RadiusReport> {
    grid.check(f0.shape())?;
    if !(tmax > 0.0) || steps == 0 {
        return Err(Error::InvalidParameter(
            "tmax must be positive and steps at least 1".into(),
        ));
    }
    if f0.sup_norm() == 0.0 {
        return Err(Error::InvalidParameter("f0 must not vanish".into()));
    }
    let mut previous = Field::zeros(grid);
    let mut eigvec: Option<Vec<f64>> = None;
    let mut radius = 0.0;
    let mut records = Vec::with_capacity(steps);
    for k in 1..=steps {
        let t = tmax * k as f64 / steps as f64;
        let data = f0.scale(t);
        let opts = NewtonOptions {
            monotone_fallback: false,
            initial: InitialGuess::Supplied(previous.clone()),
            ..NewtonOptions::default()
        };
        let (u, report) = match solve_semilinear(grid, a, &data, &opts) {
            Ok(ok) => ok,
            Err(Error::NotConverged(rep)) => {
                records.push(RadiusStep {
                    t,
                    converged: false,
                    newton_iterations: rep.iterations,
                    smallest_eigenvalue: None,
                    solution_sup: f64::NAN,
                });
                break;
            }
            Err(Error::Indefinite(_)) | Err(Error::LinearSolve { .. }) => {
                records.push(RadiusStep {
                    t,
                    converged: false,
                    newton_iterations: 0,
                    smallest_eigenvalue: None,
                    solution_sup: f64::NAN,
                });
                break;
            }
            Err(e) => return Err(e),
        };
        let q = a.apply_d1(grid, &u)?;
        let lam = match smallest_eigenpair(grid, &q, EigenOptions::default(), eigvec.as_deref()) {
            Ok(pair) => {
                eigvec = Some(pair.vector);
                pair.value
            }
            Err(Error::Indefinite(v)) => v,
            Err(e) => return Err(e),
        };
        let ok = lam > 0.0;
        records.push(RadiusStep {
            t,
            converged: ok,
            newton_iterations: report.iterations,
            smallest_eigenvalue: Some(lam),
            solution_sup: u.sup_norm(),
        });
        if !ok {
            break;
        }
        radius = t;
        previous = u;
    }
    Ok(RadiusReport {
        radius,
        tmax,
        reached_tmax: radius == tmax,
        steps: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cubic_reaches_tmax() {
        let g = Grid::unit_square(17).unwrap();
        let f0 = BoundaryData::from_fn(&g, |x, y| 1.0 + 0.5 * (PI * x).sin() * y);
        let r = estimate_wellposedness_radius(&g, &Nonlinearity::cubic(), &f0, 100.0, 10).unwrap();
        assert_eq!(r.radius, 100.0);
        assert!(r.reached_tmax);
    }

    #[test]
    fn zero_nonlinearity_reaches_tmax() {
        let g = Grid::unit_square(9).unwrap();
        let r = estimate_wellposedness_radius(
            &g,
            &Nonlinearity::zero(),
            &BoundaryData::constant(&g, 1.0),
            5.0,
            3,
        )
        .unwrap();
        assert_eq!(r.radius, 5.0);
    }

    #[test]
    fn negative_linear_below_spectrum_reaches_tmax() {
        let g = Grid::unit_square(17).unwrap();
        let c = 2.0 * PI * PI - 0.5;
        let r = estimate_wellposedness_radius(
            &g,
            &Nonlinearity::linear(-c),
            &BoundaryData::constant(&g, 1.0),
            10.0,
            4,
        )
        .unwrap();
        assert!(r.reached_tmax);
        assert!(r.steps.iter().all(|s| s.smallest_eigenvalue.unwrap() > 0.0));
    }

    #[test]
    fn negative_linear_above_spectrum_fails_immediately() {
        let g = Grid::unit_square(17).unwrap();
        let c = 2.0 * PI * PI + 5.0;
        let r = estimate_wellposedness_radius(
            &g,
            &Nonlinearity::linear(-c),
            &BoundaryData::constant(&g, 1.0),
            10.0,
            4,
        )
        .unwrap();
        assert_eq!(r.radius, 0.0);
    }

    #[test]
    fn rejects_zero_data() {
        let g = Grid::unit_square(9).unwrap();
        assert!(estimate_wellposedness_radius(
            &g,
            &Nonlinearity::cubic(),
            &BoundaryData::constant(&g, 0.0),
            1.0,
            2
        )
        .is_err());
    }
}
