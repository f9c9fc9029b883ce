//! Dirichlet problem on the ball by bisection on the center value.

use serde::Serialize;

use super::{check_dimension, series_start, start_radius, Adaptive, Outcome, RadialProfile};
use crate::error::{Error, Result};
use crate::nonlinearity::Profile;

#[derive(Debug, Clone, Copy)]
pub struct BvpOptions {
    /// Uniform output nodes.
    pub nodes: usize,
    /// Per-step relative tolerance of the adaptive integrator.
    pub tol: f64,
    pub max_bisections: usize,
}

impl Default for BvpOptions {
    fn default() -> Self {
        BvpOptions { nodes: 1001, tol: 1e-13, max_bisections: 200 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialBvp {
    pub lambda: f64,
    /// Largest center value whose shot stays below `lambda` on `[0, R)`.
    pub center: f64,
    /// Width of the final bisection bracket.
    pub bracket: f64,
    pub bisections: usize,
    pub profile: RadialProfile,
}

impl RadialBvp {
    /// `|v(R) - lambda| / max(1, lambda)`.
    pub fn boundary_mismatch(&self) -> f64 {
        let vr = self.profile.v.last().copied().unwrap_or(f64::NAN);
        (vr - self.lambda).abs() / self.lambda.abs().max(1.0)
    }
}

/// `true` when the shot from `c` stays below `lambda` up to `R`.
fn stays_below(f: &Profile, n: u32, c: f64, lambda: f64, radius: f64, tol: f64) -> bool {
    let r0 = start_radius(f, c, radius);
    let y0 = series_start(f, n, c, r0);
    if y0[0] >= lambda && c < lambda {
        return false;
    }
    let mut ad = Adaptive { f, n, tol, stop_level: Some(lambda), h: r0 };
    match ad.run(r0, y0, radius) {
        Outcome::Reached(y) => y[0] < lambda,
        Outcome::Crossed(_) | Outcome::Escaped(_) => false,
    }
}

/// Values and derivatives of the shot from `c` at the increasing radii `rs`.
pub fn evaluate_radial(f: &Profile, n: u32, c: f64, rs: &[f64], tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dimension(n)?;
    let rmax = rs.last().copied().unwrap_or(0.0);
    let r0 = start_radius(f, c, rmax.max(f64::MIN_POSITIVE));
    let mut ad = Adaptive { f, n, tol, stop_level: None, h: r0 };
    let (mut v, mut dv) = (Vec::with_capacity(rs.len()), Vec::with_capacity(rs.len()));
    let mut r = r0;
    let mut y = series_start(f, n, c, r0);
    for &target in rs {
        if target < r {
            let s = series_start(f, n, c, target);
            v.push(if target == 0.0 { c } else { s[0] });
            dv.push(if target == 0.0 { 0.0 } else { s[1] });
            continue;
        }
        match ad.run(r, y, target) {
            Outcome::Reached(ynew) => {
                y = ynew;
                r = target;
                v.push(y[0]);
                dv.push(y[1]);
            }
            Outcome::Crossed(at) | Outcome::Escaped(at) => {
                return Err(Error::InvalidParameter(format!("shot from {c} escapes at r = {at}")));
            }
        }
    }
    Ok((v, dv))
}

/// Solves `v'' + (n-1)/r v' = F(v)`, `v(R) = lambda`, for monotone `F` with
/// `F(0) >= 0`, bisecting on `c` in `[0, lambda]`.
pub fn solve_radial_bvp(f: &Profile, lambda: f64, n: u32, radius: f64, opts: BvpOptions) -> Result<RadialBvp> {
    check_dimension(n)?;
    if !(lambda >= 0.0 && lambda.is_finite()) || !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("need lambda >= 0 and R > 0, got {lambda}, {radius}")));
    }
    if opts.nodes < 2 {
        return Err(Error::InvalidParameter("at least two output nodes".into()));
    }
    let (mut lo, mut hi) = (0.0f64, lambda);
    let low_ok = lambda == 0.0 && f.value(0.0) == 0.0 || stays_below(f, n, lo, lambda, radius, opts.tol);
    if !low_ok {
        return Err(Error::Bracket(format!("v(R; 0) already exceeds lambda = {lambda}")));
    }
    if lambda > 0.0 && stays_below(f, n, hi, lambda, radius, opts.tol) {
        return Err(Error::Bracket(format!("v(R; lambda) stays below lambda = {lambda}; F is not monotone here")));
    }
    let mut bisections = 0;
    while bisections < opts.max_bisections {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if stays_below(f, n, mid, lambda, radius, opts.tol) {
            lo = mid;
        } else {
            hi = mid;
        }
        bisections += 1;
    }
    let nodes = opts.nodes;
    let rs: Vec<f64> = (0..nodes).map(|i| radius * i as f64 / (nodes - 1) as f64).collect();
    let (v, dv) = evaluate_radial(f, n, lo, &rs, opts.tol)?;
    Ok(RadialBvp {
        lambda,
        center: lo,
        bracket: hi - lo,
        bisections,
        profile: RadialProfile { n, radius, r: rs, v, dv, escape_radius: None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_gives_zero() {
        let b = solve_radial_bvp(&Profile::monomial(3), 0.0, 2, 1.0, BvpOptions::default()).unwrap();
        assert_eq!(b.center, 0.0);
        assert!(b.profile.v.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_three_dimensional_center() {
        let lambda = 2.0;
        let b = solve_radial_bvp(&Profile::monomial(1), lambda, 3, 1.0, BvpOptions::default()).unwrap();
        let exact = lambda / 1f64.sinh();
        assert!((b.center - exact).abs() < 1e-8 * exact, "{} {}", b.center, exact);
        assert!(b.boundary_mismatch() < 1e-10);
        for (&r, &v) in b.profile.r.iter().zip(&b.profile.v).skip(1) {
            assert!((v - exact * r.sinh() / r).abs() < 1e-9);
        }
    }

    #[test]
    fn cubic_center_is_saturated() {
        let b = solve_radial_bvp(&Profile::monomial(3), 1e6, 2, 1.0, BvpOptions::default()).unwrap();
        assert!(b.center > 0.0 && b.center < 32f64.sqrt());
        assert!(b.profile.v.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn bracket_failure_for_decreasing_source() {
        let f = Profile::new([(1, -30.0)]);
        assert!(matches!(
            solve_radial_bvp(&f, 1.0, 2, 1.0, BvpOptions::default()),
            Err(Error::Bracket(_))
        ));
    }
}
