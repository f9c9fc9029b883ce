//! Radial solutions of `v'' + (n-1)/r v' = F(v)` on a ball with `v'(0) = 0`.
//!
//! The ODE is singular at `r = 0`, so every integration starts from the
//! series `v = c + F(c) r^2/(2n) + F'(c) F(c) r^4/(8n(n+2)) + O(r^6)`.

mod bvp;
mod constants;
mod fd;
mod sweep;

use serde::Serialize;

pub use bvp::{evaluate_radial, solve_radial_bvp, BvpOptions, RadialBvp};
pub use constants::{ball_bound, saturation_constants, tail_integral, SaturationConstants};
pub use fd::{solve_radial_fd, FdOptions, FdProfile};
pub use sweep::{energy_violation, saturation_sweep, SaturationReport, SweepRow};

use crate::error::{Error, Result};
use crate::nonlinearity::Profile;

/// Shots whose `|v|` exceeds this are treated as having escaped to infinity.
pub const BLOWUP: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub n: u32,
    pub radius: f64,
    /// Uniform nodes `r_i = i R / (nodes - 1)`; truncated at an escape.
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    /// Radius at which `|v|` passed [`BLOWUP`], if it did before `R`.
    pub escape_radius: Option<f64>,
}

impl RadialProfile {
    pub fn center(&self) -> f64 {
        self.v[0]
    }

    pub fn escaped(&self) -> bool {
        self.escape_radius.is_some()
    }

    /// Value at `R`, if the integration got there.
    pub fn boundary_value(&self) -> Option<f64> {
        if self.escaped() {
            None
        } else {
            self.v.last().copied()
        }
    }
}

pub(crate) fn check_dimension(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
    }
    Ok(())
}

type State = [f64; 2];

fn rhs(f: &Profile, n: u32, r: f64, y: State) -> State {
    [y[1], f.value(y[0]) - (n - 1) as f64 / r * y[1]]
}

fn rk4(f: &Profile, n: u32, r: f64, y: State, h: f64) -> State {
    let k1 = rhs(f, n, r, y);
    let k2 = rhs(f, n, r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = rhs(f, n, r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = rhs(f, n, r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Series values `(v(r), v'(r))` near the origin.
pub(crate) fn series_start(f: &Profile, n: u32, c: f64, r: f64) -> State {
    let (fc, dfc) = (f.value(c), f.d1(c));
    let n = n as f64;
    let second = dfc * fc / (8.0 * n * (n + 2.0));
    [
        c + fc * r * r / (2.0 * n) + second * r.powi(4),
        fc * r / n + 4.0 * second * r.powi(3),
    ]
}

fn escaped(y: State) -> bool {
    !(y[0].abs() <= BLOWUP && y[1].is_finite())
}

/// Classical RK4 on uniform nodes, with the series supplying the first step.
pub fn shoot(f: &Profile, c: f64, n: u32, radius: f64, nodes: usize) -> Result<RadialProfile> {
    check_dimension(n)?;
    if nodes < 100 {
        return Err(Error::InvalidParameter(format!("shooting needs at least 100 nodes, got {nodes}")));
    }
    if !c.is_finite() || !(radius > 0.0) {
        return Err(Error::InvalidParameter("center value must be finite and radius positive".into()));
    }
    let h = radius / (nodes - 1) as f64;
    let mut out = RadialProfile {
        n,
        radius,
        r: Vec::with_capacity(nodes),
        v: Vec::with_capacity(nodes),
        dv: Vec::with_capacity(nodes),
        escape_radius: None,
    };
    out.r.push(0.0);
    out.v.push(c);
    out.dv.push(0.0);
    let mut y = series_start(f, n, c, h);
    for i in 1..nodes {
        let r = i as f64 * h;
        if i > 1 {
            y = rk4(f, n, r - h, y, h);
        }
        if escaped(y) {
            out.escape_radius = Some(r);
            break;
        }
        out.r.push(r);
        out.v.push(y[0]);
        out.dv.push(y[1]);
    }
    Ok(out)
}

/// How an adaptive integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Outcome {
    Reached(State),
    /// `v` reached the stop level at this radius.
    Crossed(f64),
    Escaped(f64),
}

/// RK4 with step doubling and local extrapolation from `r0` to `r1`.
/// Relative tolerance `tol` is per step.
pub(crate) struct Adaptive<'a> {
    pub f: &'a Profile,
    pub n: u32,
    pub tol: f64,
    pub stop_level: Option<f64>,
    /// Step carried between calls.
    pub h: f64,
}

impl Adaptive<'_> {
    pub fn run(&mut self, mut r: f64, mut y: State, r1: f64) -> Outcome {
        let (f, n) = (self.f, self.n);
        let mut guard = 0usize;
        while r < r1 {
            guard += 1;
            if guard > 10_000_000 {
                return Outcome::Escaped(r);
            }
            let last = self.h >= r1 - r;
            let h = if last { r1 - r } else { self.h };
            let full = rk4(f, n, r, y, h);
            let half = rk4(f, n, r, y, 0.5 * h);
            let two = rk4(f, n, r + 0.5 * h, half, 0.5 * h);
            let err = ((two[0] - full[0]).abs() / (1.0 + two[0].abs()))
                .max((two[1] - full[1]).abs() / (1.0 + two[1].abs()))
                / 15.0;
            if !err.is_finite() || err > self.tol {
                let shrink = if err.is_finite() { (0.9 * (self.tol / err).powf(0.2)).max(0.1) } else { 0.1 };
                self.h = h * shrink;
                if self.h < 1e-15 * (1.0 + r) {
                    return Outcome::Escaped(r);
                }
                continue;
            }
            let ynew = [two[0] + (two[0] - full[0]) / 15.0, two[1] + (two[1] - full[1]) / 15.0];
            r = if last { r1 } else { r + h };
            y = ynew;
            if escaped(y) {
                return Outcome::Escaped(r);
            }
            if let Some(level) = self.stop_level {
                if y[0] >= level && r < r1 {
                    return Outcome::Crossed(r);
                }
            }
            let grow = if err > 0.0 { (0.9 * (self.tol / err).powf(0.2)).min(4.0) } else { 4.0 };
            if !last {
                self.h = h * grow;
            }
        }
        Outcome::Reached(y)
    }
}

/// Radius at which the series start is used: small against both `R` and the
/// local length scale `1/sqrt(F'(c))`.
pub(crate) fn start_radius(f: &Profile, c: f64, radius: f64) -> f64 {
    let scale = 1.0 / f.d1(c).abs().max(f.value(c).abs() / c.abs().max(1.0)).max(1.0).sqrt();
    1e-3 * radius.min(scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_source_is_constant() {
        let p = shoot(&Profile::default(), 2.0, 2, 1.0, 101).unwrap();
        assert!(p.v.iter().all(|&v| v == 2.0));
        assert!(p.dv.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn linear_three_dimensional_matches_sinh() {
        let f = Profile::monomial(1);
        let err = |nodes| {
            let p = shoot(&f, 1.0, 3, 1.0, nodes).unwrap();
            p.r.iter()
                .zip(&p.v)
                .skip(1)
                .map(|(&r, &v)| (v - r.sinh() / r).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(101), err(201));
        assert!(e1 < 1e-9, "{e1}");
        assert!((e1 / e2).log2() >= 3.8, "{e1} {e2}");
    }

    #[test]
    fn cubic_profile_is_nondecreasing() {
        let p = shoot(&Profile::monomial(3), 1.5, 2, 1.0, 201).unwrap();
        assert!(!p.escaped());
        assert!(p.v.windows(2).all(|w| w[1] >= w[0]));
        assert!(p.dv.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn large_center_escapes() {
        let p = shoot(&Profile::monomial(3), 100.0, 2, 1.0, 1001).unwrap();
        let r = p.escape_radius.unwrap();
        assert!(r > 0.0 && r < 1.0);
        assert!(p.boundary_value().is_none());
    }

    #[test]
    fn rejects_bad_input() {
        let f = Profile::monomial(1);
        assert!(shoot(&f, 1.0, 1, 1.0, 101).is_err());
        assert!(shoot(&f, 1.0, 2, 1.0, 50).is_err());
        assert!(shoot(&f, f64::NAN, 2, 1.0, 101).is_err());
    }

    #[test]
    fn adaptive_matches_closed_form() {
        let f = Profile::monomial(1);
        let r0 = start_radius(&f, 1.0, 1.0);
        let mut ad = Adaptive { f: &f, n: 3, tol: 1e-13, stop_level: None, h: r0 };
        match ad.run(r0, series_start(&f, 3, 1.0, r0), 1.0) {
            Outcome::Reached(y) => {
                assert!((y[0] - 1f64.sinh()).abs() < 1e-11);
                assert!((y[1] - (1f64.cosh() - 1f64.sinh())).abs() < 1e-11);
            }
            other => panic!("{other:?}"),
        }
    }
}
