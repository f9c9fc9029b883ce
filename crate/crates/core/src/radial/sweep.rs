//! Center value of the unit-ball solution as the boundary value grows.

use rayon::prelude::*;
use serde::Serialize;

use super::{saturation_constants, solve_radial_bvp, BvpOptions, RadialProfile, SaturationConstants};
use crate::error::{Error, Result};
use crate::nonlinearity::{check_profile_growth, GrowthReport, Profile, ValueRange};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub center: f64,
    pub bound: f64,
    /// `bound - center`.
    pub margin: f64,
    pub energy_violation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SaturationReport {
    pub constants: SaturationConstants,
    pub growth: GrowthReport,
    pub rows: Vec<SweepRow>,
    pub nondecreasing: bool,
    /// Every center value is at most `bound + 1e-6`.
    pub bounded: bool,
    /// `|v(0; lambda_last) - v(0; lambda_prev)|`.
    pub cauchy_gap: f64,
}

/// Largest violation of `0 <= v' <= sqrt(2 G(v))` over the profile samples,
/// relative to `1 + sqrt(2 G(v))`.
pub fn energy_violation(profile: &RadialProfile, f: &Profile) -> f64 {
    profile
        .v
        .iter()
        .zip(&profile.dv)
        .map(|(&v, &dv)| {
            let cap = (2.0 * f.primitive(v).max(0.0)).sqrt();
            ((-dv).max(dv - cap)).max(0.0) / (1.0 + cap)
        })
        .fold(0.0, f64::max)
}

/// Solves the unit-ball problem for each `lambda` and compares the center
/// values against `max(mu0, C0)`.
pub fn saturation_sweep(f: &Profile, delta: f64, epsilon: f64, n: u32, lambdas: &[f64]) -> Result<SaturationReport> {
    if f.is_zero() {
        return Err(Error::InvalidParameter("the zero profile has no saturation".into()));
    }
    if lambdas.is_empty() || lambdas[0] <= 0.0 || lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("lambdas must be positive and increasing".into()));
    }
    let constants = saturation_constants(delta, epsilon, n)?;
    let top = *lambdas.last().expect("non-empty");
    let growth = check_profile_growth(f, delta, epsilon, ValueRange::symmetric(top), 2001)?;
    let bound = constants.bound();
    let rows = lambdas
        .par_iter()
        .map(|&lambda| {
            let b = solve_radial_bvp(f, lambda, n, 1.0, BvpOptions::default())?;
            Ok(SweepRow {
                lambda,
                center: b.center,
                bound,
                margin: bound - b.center,
                energy_violation: energy_violation(&b.profile, f),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let nondecreasing = rows.windows(2).all(|w| w[1].center >= w[0].center);
    let bounded = rows.iter().all(|r| r.center <= bound + 1e-6);
    let cauchy_gap = match rows.len() {
        0 | 1 => f64::NAN,
        k => (rows[k - 1].center - rows[k - 2].center).abs(),
    };
    Ok(SaturationReport { constants, growth, rows, nondecreasing, bounded, cauchy_gap })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_sweep_saturates() {
        let lambdas: Vec<f64> = (0..=6).map(|k| 10f64.powi(k)).collect();
        let rep = saturation_sweep(&Profile::monomial(3), 1.0, 2.0, 2, &lambdas).unwrap();
        assert!(rep.growth.passed);
        assert!(rep.nondecreasing);
        assert!(rep.bounded);
        assert!(rep.cauchy_gap <= 1e-3, "{}", rep.cauchy_gap);
        assert!(rep.rows.iter().all(|r| r.energy_violation <= 1e-6));
    }

    #[test]
    fn linear_sweep_grows_linearly_and_fails_growth() {
        let lambdas = [1.0, 10.0, 100.0];
        let rep = saturation_sweep(&Profile::monomial(1), 1.0, 2.0, 2, &lambdas).unwrap();
        assert!(!rep.growth.passed);
        let ratio = rep.rows[2].center / rep.rows[0].center;
        assert!((ratio - 100.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_zero_profile_and_bad_sweeps() {
        assert!(saturation_sweep(&Profile::default(), 1.0, 2.0, 2, &[1.0]).is_err());
        assert!(saturation_sweep(&Profile::monomial(3), 1.0, 2.0, 2, &[2.0, 1.0]).is_err());
    }
}
