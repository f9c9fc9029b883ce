//! Envelope of attainable solution values `u(x; f)` at one interior node.

use rayon::prelude::*;
use serde::Serialize;

use super::trig_boundary_data;
use crate::elliptic::{solve_semilinear, NewtonOptions};
use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Grid, Point};
use crate::nonlinearity::{check_monotone, Domain, Nonlinearity, ValueRange};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeRow {
    /// Sup norm of the boundary data.
    pub amplitude: f64,
    /// `None` for constant data, otherwise the random stream index.
    pub random_index: Option<u64>,
    pub sign: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub node: usize,
    pub x: Point,
    /// Distance from the node to the boundary.
    pub inscribed_radius: f64,
    pub lower: f64,
    pub upper: f64,
    pub constant_lower: f64,
    pub constant_upper: f64,
    pub random_min: f64,
    pub random_max: f64,
    /// Random data stayed within the constant-data envelope.
    pub consistent: bool,
    pub rows: Vec<EnvelopeRow>,
}

/// Running `(min, max)` of `u(x; f)` over constant data `+-lambda` and
/// `random_count` trigonometric data whose amplitudes cycle through `lambdas`.
/// `x` is moved to the nearest interior node.
pub fn estimate_envelope(
    grid: &Grid,
    a: &Nonlinearity,
    x: Point,
    lambdas: &[f64],
    random_count: usize,
    seed: u64,
) -> Result<EnvelopeReport> {
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(Error::InvalidParameter("envelope needs positive finite amplitudes".into()));
    }
    let reach = lambdas.iter().cloned().fold(0.0, f64::max);
    if !check_monotone(a, Domain::of(grid), ValueRange::symmetric(reach), 17).passed {
        return Err(Error::InvalidParameter("envelope needs a nondecreasing in mu".into()));
    }
    if !(x[0] > 0.0 && x[0] < grid.lx() && x[1] > 0.0 && x[1] < grid.ly()) {
        return Err(Error::InvalidParameter(format!("point {x:?} is not inside the domain")));
    }
    let node = grid.nearest_interior(x);
    let p = grid.point(node);
    let inscribed_radius = grid.distance_to_boundary(p);

    let mut jobs: Vec<(f64, Option<u64>, f64)> = Vec::new();
    for &l in lambdas {
        jobs.push((l, None, 1.0));
        jobs.push((l, None, -1.0));
    }
    for r in 0..random_count {
        jobs.push((lambdas[r % lambdas.len()], Some(r as u64), 1.0));
    }
    let rows = jobs
        .par_iter()
        .map(|&(amplitude, random_index, sign)| {
            let data = match random_index {
                None => BoundaryData::constant(grid, sign * amplitude),
                Some(r) => trig_boundary_data(grid, seed, r, amplitude)?,
            };
            let (u, _) = solve_semilinear(grid, a, &data, &NewtonOptions::default())?;
            Ok(EnvelopeRow { amplitude, random_index, sign, value: u.get(node) })
        })
        .collect::<Result<Vec<_>>>()?;

    let fold = |pred: fn(&EnvelopeRow) -> bool| {
        rows.iter()
            .filter(|r| pred(r))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.value), hi.max(r.value)))
    };
    let (constant_lower, constant_upper) = fold(|r| r.random_index.is_none());
    let (random_min, random_max) = fold(|r| r.random_index.is_some());
    let slack = 1e-9 * constant_upper.abs().max(constant_lower.abs()).max(1.0);
    let consistent = random_count == 0 || (random_min >= constant_lower - slack && random_max <= constant_upper + slack);
    Ok(EnvelopeReport {
        node,
        x: p,
        inscribed_radius,
        lower: constant_lower.min(random_min),
        upper: constant_upper.max(random_max),
        constant_lower,
        constant_upper,
        random_min,
        random_max,
        consistent,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplace_envelope_is_the_data_range() {
        let g = Grid::unit_square(17).unwrap();
        let rep = estimate_envelope(&g, &Nonlinearity::zero(), [0.3, 0.6], &[1.0], 4, 1).unwrap();
        assert!((rep.lower + 1.0).abs() < 1e-12 && (rep.upper - 1.0).abs() < 1e-12);
        assert!(rep.consistent);
    }

    #[test]
    fn cubic_envelope_saturates_and_widens() {
        let g = Grid::unit_square(33).unwrap();
        let small = estimate_envelope(&g, &Nonlinearity::cubic(), [0.5, 0.5], &[1.0, 10.0], 6, 3).unwrap();
        let large = estimate_envelope(&g, &Nonlinearity::cubic(), [0.5, 0.5], &[1.0, 10.0, 1e3], 6, 3).unwrap();
        assert!(small.consistent && large.consistent);
        assert!(large.upper >= small.upper && large.lower <= small.lower);
        assert!(large.upper < 10.0);
        assert!((large.upper + large.lower).abs() < 1e-8);
        assert_eq!(large.inscribed_radius, 0.5);
    }

    #[test]
    fn rejects_boundary_points() {
        let g = Grid::unit_square(9).unwrap();
        assert!(estimate_envelope(&g, &Nonlinearity::zero(), [0.0, 0.5], &[1.0], 0, 0).is_err());
    }
}
