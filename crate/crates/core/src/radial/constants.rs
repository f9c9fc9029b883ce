//! Explicit bounds on the center value of large-data radial solutions.
//!
//! For `F(mu) >= delta mu^(1+eps)` the center value on the unit ball obeys
//! `v(0) <= max(mu0, C0)` independently of the boundary value, with
//! `mu0 = (32 (n-1)^2 / delta)^(1/eps)` and
//! `v(1/2)^(eps/2) <= 2 sqrt((2+eps)/delta) I(eps)`,
//! `I(eps) = int_1^inf ds / sqrt(s^(2+eps) - 1)`.

use serde::Serialize;

use super::check_dimension;
use crate::error::{Error, Result};
use crate::quadrature::integrate_to_infinity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaturationConstants {
    pub delta: f64,
    pub epsilon: f64,
    pub n: u32,
    pub mu0: f64,
    pub tail_integral: f64,
    pub tail_error: f64,
    /// `(2 sqrt((2+eps)/delta) I)^(2/eps)`.
    pub c0: f64,
    /// `(2 sqrt((2+eps)/delta) I)^(1/eps)`, the exponent as usually printed;
    /// kept for comparison only.
    pub c0_printed: f64,
}

impl SaturationConstants {
    /// `max(mu0, C0)`.
    pub fn bound(&self) -> f64 {
        self.mu0.max(self.c0)
    }
}

/// `I(eps)` through `s = 1 + t^2`, which turns the inverse square root at
/// `s = 1` into the bounded integrand `2t / sqrt((1+t^2)^(2+eps) - 1)`.
pub fn tail_integral(epsilon: f64) -> Result<(f64, f64)> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let p = 2.0 + epsilon;
    let g = move |t: f64| {
        if t == 0.0 {
            return 2.0 / p.sqrt();
        }
        2.0 * t / ((p * (t * t).ln_1p()).exp_m1()).sqrt()
    };
    let q = integrate_to_infinity(g, 0.0, 1e-13, 1e-13)?;
    if q.error > 1e-10 * q.value.abs().max(1.0) {
        return Err(Error::Quadrature { estimate: q.value, error: q.error });
    }
    Ok((q.value, q.error))
}

pub fn saturation_constants(delta: f64, epsilon: f64, n: u32) -> Result<SaturationConstants> {
    check_dimension(n)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let (tail, tail_error) = tail_integral(epsilon)?;
    let m = (n - 1) as f64;
    let base = 2.0 * ((2.0 + epsilon) / delta).sqrt() * tail;
    Ok(SaturationConstants {
        delta,
        epsilon,
        n,
        mu0: (32.0 * m * m / delta).powf(1.0 / epsilon),
        tail_integral: tail,
        tail_error,
        c0: base.powf(2.0 / epsilon),
        c0_printed: base.powf(1.0 / epsilon),
    })
}

/// Constants for the ball of radius `R`: `v(R r)` solves the unit-ball
/// problem with `R^2 F`, so `delta` becomes `delta R^2`.
pub fn ball_bound(delta: f64, epsilon: f64, n: u32, radius: f64) -> Result<SaturationConstants> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    saturation_constants(delta * radius * radius, epsilon, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    // I(eps) = B(1/2 - 1/(2+eps), 1/2) / (2+eps)
    const TAIL_2: f64 = 1.311_028_777_146_06;

    #[test]
    fn tail_integral_values() {
        let (i2, _) = tail_integral(2.0).unwrap();
        assert!((i2 - TAIL_2).abs() < 1e-11, "{i2}");
        let (i1, _) = tail_integral(1.0).unwrap();
        assert!((i1 - 2.428_650_647_887_582).abs() < 1e-10, "{i1}");
        let (i3, _) = tail_integral(3.0).unwrap();
        assert!((i3 - 0.910_888_617_592_434).abs() < 1e-10, "{i3}");
    }

    #[test]
    fn planar_quadratic_growth() {
        let c = saturation_constants(1.0, 2.0, 2).unwrap();
        assert!((c.mu0 - 32f64.sqrt()).abs() < 1e-12);
        assert!((c.c0 - 4.0 * TAIL_2).abs() < 1e-10);
        assert!((c.c0_printed - (4.0 * TAIL_2).sqrt()).abs() < 1e-10);
        assert_eq!(c.bound(), c.mu0);
    }

    #[test]
    fn delta_scaling() {
        for eps in [0.5, 1.0, 2.0] {
            let a = saturation_constants(1.0, eps, 3).unwrap();
            let b = saturation_constants(4.0, eps, 3).unwrap();
            assert!((b.mu0 - a.mu0 / 4f64.powf(1.0 / eps)).abs() < 1e-12 * a.mu0);
        }
    }

    #[test]
    fn ball_radius_rescales_delta() {
        let a = ball_bound(1.0, 2.0, 2, 0.5).unwrap();
        let b = saturation_constants(0.25, 2.0, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(saturation_constants(0.0, 2.0, 2).is_err());
        assert!(saturation_constants(1.0, 0.0, 2).is_err());
        assert!(saturation_constants(1.0, 2.0, 1).is_err());
    }
}
