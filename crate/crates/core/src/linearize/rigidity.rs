//! Rigidity probe: compare the semilinear solution `v_mu` with the harmonic
//! `w_mu` for data `mu f`. The outward flux of `y = w - v` is exactly
//! `-sum_interior a(x, v_mu) hx hy`.

use rayon::prelude::*;
use serde::Serialize;

use crate::elliptic::{harmonic_extension, solve_semilinear, NewtonOptions};
use crate::error::{Error, Result};
use crate::grid::{discrete_flux, BoundaryData, Grid};
use crate::nonlinearity::{check_monotone, Domain, Nonlinearity, ValueRange};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RigidityRecord {
    pub mu: f64,
    /// `discrete_flux(w_mu - v_mu)`.
    pub flux_y: f64,
    /// `sum_interior a(x, v_mu) hx hy`.
    pub volume_integral: f64,
    /// `flux(v_mu) - flux(w_mu)`, equal to `volume_integral`.
    pub flux_mismatch: f64,
    pub identity_residual: f64,
    /// `||v_mu|| / h^2`, the scale of the identity residual.
    pub identity_scale: f64,
    pub sup_a: f64,
    /// `a(x, v_mu(x))` keeps one sign over the interior.
    pub sign_constant: bool,
    /// `max y - min y` over all nodes.
    pub y_spread: f64,
    pub min_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityReport {
    /// Minimum of the harmonic extension of `f`.
    pub c: f64,
    pub records: Vec<RigidityRecord>,
    /// Largest `mu1` such that every swept `|mu| <= mu1` has vanishing flux
    /// mismatch and `sup |a|` below `tol`.
    pub mu1: f64,
    /// `(-c mu1, c mu1)`, the value range on which `a` is seen to vanish.
    pub recovered_range: (f64, f64),
    pub tol: f64,
}

pub fn rigidity_probe_t1(grid: &Grid, a: &Nonlinearity, f: &BoundaryData, mus: &[f64], tol: f64) -> Result<RigidityReport> {
    grid.check(f.shape())?;
    if !(f.min() > 0.0) {
        return Err(Error::InvalidParameter("rigidity probe needs inf f > 0".into()));
    }
    let reach = mus.iter().fold(0.0f64, |m, x| m.max(x.abs())) * f.sup_norm();
    let domain = Domain::of(grid);
    if !check_monotone(a, domain, ValueRange::symmetric(reach.max(1.0)), 17).passed {
        return Err(Error::InvalidParameter("rigidity probe needs a nondecreasing in mu".into()));
    }
    let a0 = grid.interior_nodes().iter().map(|&k| a.eval(grid.point(k), 0.0).abs()).fold(0.0, f64::max);
    if a0 > 0.0 {
        return Err(Error::InvalidParameter("rigidity probe needs a(x, 0) = 0".into()));
    }
    let c = harmonic_extension(grid, f)?.min();
    let h = grid.h();
    let records = mus
        .par_iter()
        .map(|&mu| {
            let data = f.scale(mu);
            let (v, _) = solve_semilinear(grid, a, &data, &NewtonOptions::default())?;
            let w = harmonic_extension(grid, &data)?;
            let y = w.sub(&v)?;
            let av = a.apply(grid, &v)?;
            let interior: Vec<f64> = grid.interior_nodes().iter().map(|&k| av.get(k)).collect();
            let volume_integral = grid.interior_sum(&interior);
            let flux_y = discrete_flux(grid, &y)?;
            let flux_mismatch = discrete_flux(grid, &v)? - discrete_flux(grid, &w)?;
            let sup_a = interior.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let slack = 1e-12 * sup_a.max(f64::MIN_POSITIVE);
            let sign_constant = interior.iter().all(|&x| x >= -slack) || interior.iter().all(|&x| x <= slack);
            Ok(RigidityRecord {
                mu,
                flux_y,
                volume_integral,
                flux_mismatch,
                identity_residual: (flux_y + volume_integral).abs(),
                identity_scale: v.sup_norm() / (h * h),
                sup_a,
                sign_constant,
                y_spread: y.max() - y.min(),
                min_v: v.min(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<&RigidityRecord> = records.iter().collect();
    order.sort_by(|x, y| x.mu.abs().total_cmp(&y.mu.abs()));
    let mut mu1 = 0.0;
    for r in order {
        if r.flux_mismatch.abs() <= tol && r.sup_a <= tol {
            mu1 = r.mu.abs();
        } else {
            break;
        }
    }
    Ok(RigidityReport { c, records, mu1, recovered_range: (-c * mu1, c * mu1), tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_nonlinearity_recovers_full_sweep() {
        let g = Grid::unit_square(17).unwrap();
        let f = BoundaryData::constant(&g, 1.0);
        let mus = [-2.0, -1.0, 0.5, 1.0, 2.0];
        let rep = rigidity_probe_t1(&g, &Nonlinearity::zero(), &f, &mus, 1e-10).unwrap();
        assert_eq!(rep.mu1, 2.0);
        assert!((rep.c - 1.0).abs() < 1e-12);
        for r in &rep.records {
            assert!(r.flux_mismatch.abs() < 1e-10 && r.sup_a == 0.0 && r.y_spread < 1e-10);
        }
    }

    #[test]
    fn cubic_has_positive_mismatch_and_constant_sign() {
        let g = Grid::unit_square(33).unwrap();
        let f = BoundaryData::constant(&g, 1.0);
        let rep = rigidity_probe_t1(&g, &Nonlinearity::cubic(), &f, &[-1.0, 0.5, 1.0], 1e-10).unwrap();
        let at1 = rep.records.iter().find(|r| r.mu == 1.0).unwrap();
        assert!(at1.flux_mismatch > 0.1);
        assert!(rep.records.iter().all(|r| r.sign_constant));
        for r in &rep.records {
            assert!(r.identity_residual <= 1e-10 * r.identity_scale, "{r:?}");
            assert_eq!(r.flux_mismatch.signum(), r.mu.signum());
        }
        assert_eq!(rep.mu1, 0.0);
    }

    #[test]
    fn rejects_data_touching_zero() {
        let g = Grid::unit_square(9).unwrap();
        let f = BoundaryData::from_fn(&g, |x, _| x);
        assert!(rigidity_probe_t1(&g, &Nonlinearity::cubic(), &f, &[1.0], 1e-10).is_err());
    }
}
