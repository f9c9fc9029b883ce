//! Finite-difference solver for the radial Dirichlet problem, used as an
//! independent check on shooting.
//!
//! The radius is mapped from `s in [0, 1]` by `R - r = R d0 (e^(beta(1-s)) - 1)`
//! with `beta = ln(1 + 1/d0)`, which packs nodes into the boundary layer of
//! width `~ 1/sqrt(F'(lambda))`. Central differences in `s` are solved by
//! Newton with a tridiagonal elimination, and two resolutions are combined by
//! Richardson extrapolation.

use serde::Serialize;

use super::check_dimension;
use crate::error::{Error, Result};
use crate::nonlinearity::Profile;

#[derive(Debug, Clone, Copy)]
pub struct FdOptions {
    /// Intervals of the coarse mesh; the fine mesh has twice as many.
    pub intervals: usize,
    pub max_newton: usize,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions { intervals: 4000, max_newton: 200 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FdProfile {
    /// Coarse mesh radii, increasing from 0 to `R`.
    pub r: Vec<f64>,
    /// Extrapolated values at `r`.
    pub v: Vec<f64>,
    /// `|v_fine - v_coarse|` at `r`, a bound on the unextrapolated error.
    pub correction: f64,
}

struct Mesh {
    r: Vec<f64>,
    rs: Vec<f64>,
    rss: Vec<f64>,
    ds: f64,
}

fn mesh(radius: f64, d0: f64, intervals: usize) -> Mesh {
    let beta = (1.0 / d0).ln_1p();
    let ds = 1.0 / intervals as f64;
    let mut m = Mesh { r: Vec::new(), rs: Vec::new(), rss: Vec::new(), ds };
    for i in 0..=intervals {
        let s = i as f64 * ds;
        let e = (beta * (1.0 - s)).exp();
        m.r.push(if i == 0 { 0.0 } else if i == intervals { radius } else { radius * (1.0 - d0 * (e - 1.0)) });
        m.rs.push(radius * d0 * beta * e);
        m.rss.push(-radius * d0 * beta * beta * e);
    }
    m
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = diag[0];
    c[0] = sup[0] / d;
    rhs[0] /= d;
    for i in 1..n {
        d = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / d;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / d;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

fn solve_on(f: &Profile, lambda: f64, n: u32, m: &Mesh, max_newton: usize) -> Result<Vec<f64>> {
    let big_n = m.r.len() - 1;
    let nn = n as f64;
    let ds = m.ds;
    // unknowns v_0..v_{N-1}; v_N = lambda
    let mut v = vec![lambda; big_n + 1];
    let (mut sub, mut diag, mut sup, mut res) =
        (vec![0.0; big_n], vec![0.0; big_n], vec![0.0; big_n], vec![0.0; big_n]);
    let mut polish = false;
    for _ in 0..max_newton {
        let r1 = m.r[1];
        diag[0] = 2.0 * nn / (r1 * r1) + f.d1(v[0]);
        sup[0] = -2.0 * nn / (r1 * r1);
        res[0] = -2.0 * nn * (v[1] - v[0]) / (r1 * r1) + f.value(v[0]);
        for i in 1..big_n {
            let (rs, rss, r) = (m.rs[i], m.rss[i], m.r[i]);
            let a = 1.0 / (rs * rs * ds * ds);
            let b = (-rss / (rs * rs * rs) + (nn - 1.0) / (r * rs)) / (2.0 * ds);
            sub[i] = -(a - b);
            diag[i] = 2.0 * a + f.d1(v[i]);
            sup[i] = -(a + b);
            res[i] = -(a + b) * v[i + 1] + 2.0 * a * v[i] - (a - b) * v[i - 1] + f.value(v[i]);
        }
        let mut delta: Vec<f64> = res.iter().map(|x| -x).collect();
        thomas(&sub, &diag, &sup, &mut delta);
        let step = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        for i in 0..big_n {
            v[i] += delta[i];
        }
        if !step.is_finite() {
            break;
        }
        if polish {
            return Ok(v);
        }
        // one extra step once converged, to land at rounding level
        polish = step <= 1e-10 * lambda.abs().max(1.0);
    }
    Err(Error::InvalidParameter(format!("radial finite differences did not converge for lambda = {lambda}")))
}

/// Solves the radial Dirichlet problem `v(R) = lambda` on two meshes and
/// extrapolates. `F` must be nondecreasing with `F(0) = 0`.
pub fn solve_radial_fd(f: &Profile, lambda: f64, n: u32, radius: f64, opts: FdOptions) -> Result<FdProfile> {
    check_dimension(n)?;
    if opts.intervals < 8 || !(radius > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter("need at least 8 intervals, R > 0 and finite lambda".into()));
    }
    let layer = 1.0 / f.d1(lambda).abs().max(1.0).sqrt();
    let d0 = (layer / radius).min(1.0);
    let coarse_mesh = mesh(radius, d0, opts.intervals);
    let fine_mesh = mesh(radius, d0, 2 * opts.intervals);
    let coarse = solve_on(f, lambda, n, &coarse_mesh, opts.max_newton)?;
    let fine = solve_on(f, lambda, n, &fine_mesh, opts.max_newton)?;
    let mut correction: f64 = 0.0;
    let v = coarse
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let vf = fine[2 * i];
            correction = correction.max((vf - c).abs());
            (4.0 * vf - c) / 3.0
        })
        .collect();
    Ok(FdProfile { r: coarse_mesh.r, v, correction })
}
