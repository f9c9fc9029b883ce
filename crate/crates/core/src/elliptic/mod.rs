//! Linear and semilinear Dirichlet solvers on a [`Grid`].
//!
//! The semilinear solver is a damped Newton iteration on
//! `R(u) = -lap_h u + a(x, u)` with the exact Jacobian
//! `-lap_h + d_mu a(x, u)`. When Newton fails and `a` is monotone on the
//! data bracket, a monotone (sub/supersolution) iteration takes over.

mod cg;
mod eigen;
mod wellposed;

use serde::Serialize;

pub use eigen::{smallest_eigenpair, smallest_eigenvalue, EigenOptions, EigenPair};
pub use wellposed::{estimate_wellposedness_radius, RadiusReport, RadiusStep};

pub(crate) use cg::pcg;

use crate::audit;
use crate::error::{Error, Result};
use crate::grid::{assemble_operator, BoundaryData, Field, Grid};
use crate::nonlinearity::{check_monotone, Domain, Nonlinearity, ValueRange};

/// Relative residual target for the conjugate gradient inner solves.
pub const CG_RTOL: f64 = 1e-12;

/// Solves `-lap_h v + q v = rhs` in the interior with `v = f` on the boundary.
///
/// For `q` with negative values the smallest eigenvalue is probed first and
/// a non-positive value is reported as [`Error::Indefinite`].
pub fn solve_linear(grid: &Grid, q: &Field, f: &BoundaryData, rhs: &Field) -> Result<Field> {
    grid.check(q.shape())?;
    grid.check(f.shape())?;
    grid.check(rhs.shape())?;
    let qmin = grid
        .interior_nodes()
        .iter()
        .map(|&k| q.get(k))
        .fold(f64::INFINITY, f64::min);
    if qmin < 0.0 {
        let lam = smallest_eigenvalue(grid, q)?;
        if lam <= 1e-10 * (1.0 + qmin.abs()) {
            return Err(Error::Indefinite(lam));
        }
    }
    let op = assemble_operator(grid, q)?;
    let mut b = rhs.interior_values(grid);
    op.lift_boundary(f, &mut b)?;
    let mut x = vec![0.0; op.dim()];
    pcg(&op, &b, &mut x, CG_RTOL)?;
    let u = Field::assemble(grid, &x, f)?;
    audit::observe(grid, &u);
    Ok(u)
}

/// Discrete harmonic extension of `f`.
pub fn harmonic_extension(grid: &Grid, f: &BoundaryData) -> Result<Field> {
    let zero = Field::zeros(grid);
    solve_linear(grid, &zero, f, &zero)
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    HarmonicExtension,
    Zero,
    /// Interior values are taken from the field; boundary values are replaced
    /// by the Dirichlet data.
    Supplied(Field),
}

#[derive(Debug, Clone)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    /// Relative to the initial residual (sup norm).
    pub rtol: f64,
    /// Absolute floor on the residual target.
    pub atol: f64,
    pub max_halvings: usize,
    pub initial: InitialGuess,
    pub monotone_fallback: bool,
    pub max_monotone_iterations: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iterations: 50,
            rtol: 1e-10,
            atol: 1e-12,
            max_halvings: 30,
            initial: InitialGuess::HarmonicExtension,
            monotone_fallback: true,
            max_monotone_iterations: 2000,
        }
    }
}

impl NewtonOptions {
    pub fn with_initial(mut self, initial: InitialGuess) -> Self {
        self.initial = initial;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Newton,
    MonotoneBracket,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// Sup-norm residual after each accepted iterate, starting with the guess.
    pub residual_history: Vec<f64>,
    pub method: SolveMethod,
    pub smallest_eigenvalue: Option<f64>,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }
}

struct Residual<'a> {
    grid: &'a Grid,
    a: &'a Nonlinearity,
    points: Vec<[f64; 2]>,
}

impl<'a> Residual<'a> {
    fn new(grid: &'a Grid, a: &'a Nonlinearity) -> Self {
        let points = grid
            .interior_nodes()
            .iter()
            .map(|&k| grid.point(k))
            .collect();
        Residual { grid, a, points }
    }

    /// `-lap_h u + a(x, u)` on the interior.
    fn eval(&self, u: &Field) -> Vec<f64> {
        let lap = self.grid.laplacian(u).expect("same grid");
        self.grid
            .interior_nodes()
            .iter()
            .zip(&self.points)
            .zip(lap)
            .map(|((&k, &x), l)| -l + self.a.eval(x, u.get(k)))
            .collect()
    }

    /// Rounding level of the residual at `u`.
    fn floor(&self, u: &Field) -> f64 {
        let (hx, hy) = (self.grid.hx(), self.grid.hy());
        let amax = self
            .grid
            .interior_nodes()
            .iter()
            .zip(&self.points)
            .map(|(&k, &x)| self.a.eval(x, u.get(k)).abs())
            .fold(0.0, f64::max);
        64.0 * f64::EPSILON * (u.sup_norm() * (4.0 / (hx * hx) + 4.0 / (hy * hy)) + amax)
    }

    fn jacobian_shift(&self, u: &Field) -> Field {
        self.a.apply_d1(self.grid, u).expect("same grid")
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `-lap_h u + a(x, u) = 0` with `u = f` on the boundary.
pub fn solve_semilinear(
    grid: &Grid,
    a: &Nonlinearity,
    f: &BoundaryData,
    opts: &NewtonOptions,
) -> Result<(Field, SolveReport)> {
    semilinear(grid, a, f, opts).inspect(|(u, _)| audit::observe(grid, u))
}

fn semilinear(
    grid: &Grid,
    a: &Nonlinearity,
    f: &BoundaryData,
    opts: &NewtonOptions,
) -> Result<(Field, SolveReport)> {
    grid.check(f.shape())?;
    if !f.is_finite() {
        return Err(Error::InvalidParameter(
            "boundary data must be finite".into(),
        ));
    }
    let mut u = match &opts.initial {
        InitialGuess::HarmonicExtension => harmonic_extension(grid, f)?,
        InitialGuess::Zero => {
            let mut z = Field::zeros(grid);
            z.set_boundary(grid, f)?;
            z
        }
        InitialGuess::Supplied(g) => {
            let mut z = g.clone();
            z.set_boundary(grid, f)?;
            z
        }
    };
    let res = Residual::new(grid, a);
    let (newton, report) = newton(&res, &mut u, opts);
    if newton {
        return Ok((u, report));
    }
    if opts.monotone_fallback {
        let bracket = ValueRange::symmetric(f.sup_norm());
        if check_monotone(a, Domain::of(grid), bracket, 21).passed {
            return monotone_iteration(&res, f, opts, report.residual_history[0]);
        }
    }
    Err(Error::NotConverged(Box::new(report)))
}

fn newton(res: &Residual, u: &mut Field, opts: &NewtonOptions) -> (bool, SolveReport) {
    let grid = res.grid;
    let mut r = res.eval(u);
    let mut rnorm = sup(&r);
    let mut history = vec![rnorm];
    let target = (opts.rtol * rnorm).max(opts.atol);
    let report = |converged, iterations, history| SolveReport {
        converged,
        iterations,
        residual_history: history,
        method: SolveMethod::Newton,
        smallest_eigenvalue: None,
    };
    if !rnorm.is_finite() {
        return (false, report(false, 0, history));
    }
    for it in 0..opts.max_iterations {
        let floor = res.floor(u);
        if rnorm <= target.max(floor) {
            return (true, report(true, it, history));
        }
        let jac = match assemble_operator(grid, &res.jacobian_shift(u)) {
            Ok(j) => j,
            Err(_) => return (false, report(false, it, history)),
        };
        let b: Vec<f64> = r.iter().map(|v| -v).collect();
        let mut delta = vec![0.0; jac.dim()];
        if pcg(&jac, &b, &mut delta, CG_RTOL).is_err() {
            return (false, report(false, it, history));
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let mut trial = u.clone();
            for (k, &node) in grid.interior_nodes().iter().enumerate() {
                trial.values_mut()[node] += step * delta[k];
            }
            let rt = res.eval(&trial);
            let rtn = sup(&rt);
            if rtn.is_finite() && rtn <= (1.0 - 1e-4 * step) * rnorm {
                accepted = Some((trial, rt, rtn));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, rt, rtn)) => {
                *u = trial;
                r = rt;
                rnorm = rtn;
                history.push(rnorm);
            }
            None => {
                // no decrease possible: accept if already at rounding level
                let ok = rnorm <= 1e3 * floor.max(target);
                return (ok, report(ok, it, history));
            }
        }
    }
    let ok = rnorm <= target.max(res.floor(u));
    (ok, report(ok, opts.max_iterations, history))
}

/// `u_{k+1} = (-lap_h + M)^{-1} (M u_k - a(x, u_k))` from the constant
/// supersolution `||f||_inf`, with `M` 10% above the sampled maximum of
/// `d_mu a` over the data bracket.
fn monotone_iteration(
    res: &Residual,
    f: &BoundaryData,
    opts: &NewtonOptions,
    initial_residual: f64,
) -> Result<(Field, SolveReport)> {
    let grid = res.grid;
    let bound = f.sup_norm();
    let mus: Vec<f64> = (0..41)
        .map(|k| -bound + 2.0 * bound * k as f64 / 40.0)
        .collect();
    let dmax = res
        .points
        .iter()
        .flat_map(|&x| mus.iter().map(move |&mu| res.a.d1(x, mu)))
        .fold(0.0, f64::max);
    let m = (1.1 * dmax).max(f64::MIN_POSITIVE);
    let op = assemble_operator(grid, &Field::constant(grid, m))?;
    let mut u = Field::constant(grid, bound);
    u.set_boundary(grid, f)?;
    let mut history = vec![sup(&res.eval(&u))];
    let target = (opts.rtol * initial_residual).max(opts.atol);
    let mut x = u.interior_values(grid);
    for it in 0..opts.max_monotone_iterations {
        if history.last().copied().unwrap_or(f64::INFINITY) <= target.max(res.floor(&u)) {
            return Ok((
                u,
                SolveReport {
                    converged: true,
                    iterations: it,
                    residual_history: history,
                    method: SolveMethod::MonotoneBracket,
                    smallest_eigenvalue: None,
                },
            ));
        }
        let mut b: Vec<f64> = grid
            .interior_nodes()
            .iter()
            .zip(&res.points)
            .map(|(&k, &p)| m * u.get(k) - res.a.eval(p, u.get(k)))
            .collect();
        op.lift_boundary(f, &mut b)?;
        pcg(&op, &b, &mut x, CG_RTOL)?;
        u = Field::assemble(grid, &x, f)?;
        history.push(sup(&res.eval(&u)));
    }
    Err(Error::NotConverged(Box::new(SolveReport {
        converged: false,
        iterations: opts.max_monotone_iterations,
        residual_history: history,
        method: SolveMethod::MonotoneBracket,
        smallest_eigenvalue: None,
    })))
}

/// Monotone iteration only, bypassing Newton. Used to cross-check Newton.
pub fn solve_semilinear_monotone(
    grid: &Grid,
    a: &Nonlinearity,
    f: &BoundaryData,
    opts: &NewtonOptions,
) -> Result<(Field, SolveReport)> {
    grid.check(f.shape())?;
    let res = Residual::new(grid, a);
    let mut u = Field::constant(grid, f.sup_norm());
    u.set_boundary(grid, f)?;
    let r0 = sup(&res.eval(&u));
    monotone_iteration(&res, f, opts, r0).inspect(|(u, _)| audit::observe(grid, u))
}
