//! Closed-form nonlinearities `a(x, mu)` with exact first and second
//! `mu`-derivatives, hypothesis checkers, and the truncation surgery that
//! produces pairs with identical Dirichlet-to-Neumann maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Point};

/// Spatial coefficient `b(x)` used inside a nonlinearity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpatialExpression {
    Constant {
        value: f64,
    },
    /// `amplitude * exp(-|x - center|^2 / (2 width^2))`
    GaussianBump {
        amplitude: f64,
        center: Point,
        width: f64,
    },
    /// `amplitude * cos(kx pi x / lx) * cos(ky pi y / ly)`; mean zero on the
    /// rectangle whenever `kx` or `ky` is nonzero.
    TrigProduct {
        amplitude: f64,
        kx: u32,
        ky: u32,
        #[serde(default = "one")]
        lx: f64,
        #[serde(default = "one")]
        ly: f64,
    },
    /// Smooth plateau: 1 on `[lower + ramp, upper - ramp]`, 0 outside
    /// `[lower, upper]`, quintic smoothstep transitions.
    BoxCutoff {
        lower: Point,
        upper: Point,
        ramp: f64,
    },
    /// Node samples on a rectangle, bilinearly interpolated between nodes.
    Sampled(SampledField),
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledField {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub values: Vec<f64>,
}

impl SampledField {
    pub fn from_field(grid: &Grid, f: &Field) -> Result<SampledField> {
        grid.check(f.shape())?;
        Ok(SampledField {
            nx: grid.nx(),
            ny: grid.ny(),
            lx: grid.lx(),
            ly: grid.ly(),
            values: f.values().to_vec(),
        })
    }

    fn eval(&self, p: Point) -> f64 {
        let hx = self.lx / (self.nx - 1) as f64;
        let hy = self.ly / (self.ny - 1) as f64;
        let sx = (p[0] / hx).clamp(0.0, (self.nx - 1) as f64);
        let sy = (p[1] / hy).clamp(0.0, (self.ny - 1) as f64);
        let i = (sx.floor() as usize).min(self.nx - 2);
        let j = (sy.floor() as usize).min(self.ny - 2);
        let (tx, ty) = (sx - i as f64, sy - j as f64);
        let at = |i: usize, j: usize| self.values[j * self.nx + i];
        (1.0 - tx) * (1.0 - ty) * at(i, j)
            + tx * (1.0 - ty) * at(i + 1, j)
            + (1.0 - tx) * ty * at(i, j + 1)
            + tx * ty * at(i + 1, j + 1)
    }
}

/// Quintic smoothstep clamped to `[0, 1]`: C2 with vanishing first and
/// second derivatives at both ends.
pub fn smoothstep(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else if z >= 1.0 {
        1.0
    } else {
        z * z * z * (z * (6.0 * z - 15.0) + 10.0)
    }
}

fn smoothstep_d1(z: f64) -> f64 {
    if z <= 0.0 || z >= 1.0 {
        0.0
    } else {
        30.0 * z * z * (z - 1.0) * (z - 1.0)
    }
}

fn smoothstep_d2(z: f64) -> f64 {
    if z <= 0.0 || z >= 1.0 {
        0.0
    } else {
        60.0 * z * (2.0 * z - 1.0) * (z - 1.0)
    }
}

impl SpatialExpression {
    pub fn constant(value: f64) -> Self {
        SpatialExpression::Constant { value }
    }

    pub fn eval(&self, p: Point) -> f64 {
        use std::f64::consts::PI;
        match self {
            SpatialExpression::Constant { value } => *value,
            SpatialExpression::GaussianBump {
                amplitude,
                center,
                width,
            } => {
                let d2 = (p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2);
                amplitude * (-d2 / (2.0 * width * width)).exp()
            }
            SpatialExpression::TrigProduct {
                amplitude,
                kx,
                ky,
                lx,
                ly,
            } => {
                amplitude
                    * (*kx as f64 * PI * p[0] / lx).cos()
                    * (*ky as f64 * PI * p[1] / ly).cos()
            }
            SpatialExpression::BoxCutoff { lower, upper, ramp } => {
                let axis = |t: f64, lo: f64, hi: f64| {
                    smoothstep((t - lo) / ramp) * smoothstep((hi - t) / ramp)
                };
                axis(p[0], lower[0], upper[0]) * axis(p[1], lower[1], upper[1])
            }
            SpatialExpression::Sampled(s) => s.eval(p),
        }
    }

    /// Samples the expression at every node of `grid`.
    pub fn sample(&self, grid: &Grid) -> Field {
        Field::from_fn(grid, |x, y| self.eval([x, y]))
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        match self {
            SpatialExpression::GaussianBump { width, .. } if !(*width > 0.0) => {
                bad("gaussian width must be positive")
            }
            SpatialExpression::TrigProduct { lx, ly, .. } if !(*lx > 0.0 && *ly > 0.0) => {
                bad("trig-product lengths must be positive")
            }
            SpatialExpression::BoxCutoff { lower, upper, ramp } => {
                if !(*ramp > 0.0)
                    || upper[0] - lower[0] < 2.0 * ramp
                    || upper[1] - lower[1] < 2.0 * ramp
                {
                    bad("box cutoff needs ramp > 0 and room for both ramps")
                } else {
                    Ok(())
                }
            }
            SpatialExpression::Sampled(s) => {
                if s.nx < 2 || s.ny < 2 || s.values.len() != s.nx * s.ny {
                    bad("sampled field dimensions do not match its values")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// One-variable polynomial profile `F(mu) = sum c_k mu^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub terms: Vec<Monomial>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub power: u32,
    pub coefficient: f64,
}

fn powi(mu: f64, k: u32) -> f64 {
    mu.powi(k as i32)
}

impl Profile {
    pub fn new(terms: impl IntoIterator<Item = (u32, f64)>) -> Profile {
        Profile {
            terms: terms
                .into_iter()
                .map(|(power, coefficient)| Monomial { power, coefficient })
                .collect(),
        }
    }

    /// `F(mu) = mu^k`.
    pub fn monomial(k: u32) -> Profile {
        Profile::new([(k, 1.0)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coefficient == 0.0)
    }

    pub fn value(&self, mu: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * powi(mu, t.power))
            .sum()
    }

    pub fn d1(&self, mu: f64) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.power >= 1)
            .map(|t| t.coefficient * t.power as f64 * powi(mu, t.power - 1))
            .sum()
    }

    pub fn d2(&self, mu: f64) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.power >= 2)
            .map(|t| t.coefficient * (t.power * (t.power - 1)) as f64 * powi(mu, t.power - 2))
            .sum()
    }

    /// Closed-form antiderivative `G(mu) = int_0^mu F`.
    pub fn primitive(&self, mu: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * powi(mu, t.power + 1) / (t.power + 1) as f64)
            .sum()
    }

    /// `F^(k)(0) = k! c_k`.
    pub fn derivative_at_zero(&self, k: u32) -> f64 {
        let c: f64 = self
            .terms
            .iter()
            .filter(|t| t.power == k)
            .map(|t| t.coefficient)
            .sum();
        c * factorial(k)
    }

    pub fn max_power(&self) -> u32 {
        self.terms
            .iter()
            .filter(|t| t.coefficient != 0.0)
            .map(|t| t.power)
            .max()
            .unwrap_or(0)
    }
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Odd C2 ramp: 0 on `[-threshold, threshold]`, `±amplitude` beyond
/// `threshold + width`, quintic smoothstep in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ramp {
    pub threshold: f64,
    pub amplitude: f64,
    pub width: f64,
}

impl Ramp {
    pub fn value(&self, mu: f64) -> f64 {
        let z = (mu.abs() - self.threshold) / self.width;
        mu.signum() * self.amplitude * smoothstep(z)
    }

    pub fn d1(&self, mu: f64) -> f64 {
        let z = (mu.abs() - self.threshold) / self.width;
        self.amplitude / self.width * smoothstep_d1(z)
    }

    pub fn d2(&self, mu: f64) -> f64 {
        let z = (mu.abs() - self.threshold) / self.width;
        mu.signum() * self.amplitude / (self.width * self.width) * smoothstep_d2(z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialTerm {
    pub power: u32,
    pub coefficient: SpatialExpression,
}

/// The catalogue of nonlinearities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Nonlinearity {
    /// `sum_k b_k(x) mu^k`, `k >= 1`.
    Polynomial { terms: Vec<PolynomialTerm> },
    /// `q(x) mu`.
    Linear { q: SpatialExpression },
    /// `q(x) F(mu)`.
    SeparatedAnalytic {
        q: SpatialExpression,
        profile: Profile,
    },
    /// `base(x, mu) + c(x) g(mu)` with `g` an odd C2 ramp.
    BumpModified {
        base: Box<Nonlinearity>,
        support: SpatialExpression,
        ramp: Ramp,
    },
}

impl Nonlinearity {
    /// `a = 0`.
    pub fn zero() -> Nonlinearity {
        Nonlinearity::Linear {
            q: SpatialExpression::constant(0.0),
        }
    }

    pub fn linear(q: f64) -> Nonlinearity {
        Nonlinearity::Linear {
            q: SpatialExpression::constant(q),
        }
    }

    /// `sum c_k mu^k` with constant coefficients.
    pub fn polynomial(terms: impl IntoIterator<Item = (u32, f64)>) -> Result<Nonlinearity> {
        let terms: Vec<_> = terms
            .into_iter()
            .map(|(power, c)| PolynomialTerm {
                power,
                coefficient: SpatialExpression::constant(c),
            })
            .collect();
        let n = Nonlinearity::Polynomial { terms };
        n.validate()?;
        Ok(n)
    }

    /// `mu^3`.
    pub fn cubic() -> Nonlinearity {
        Nonlinearity::polynomial([(3, 1.0)]).expect("valid")
    }

    /// Checks structural constraints (powers `>= 1`, well-formed coefficients).
    pub fn validate(&self) -> Result<()> {
        match self {
            Nonlinearity::Polynomial { terms } => {
                for t in terms {
                    if t.power == 0 {
                        return Err(Error::InvalidParameter(
                            "polynomial powers must be >= 1 so that a(x, 0) = 0".into(),
                        ));
                    }
                    t.coefficient.validate()?;
                }
                Ok(())
            }
            Nonlinearity::Linear { q } => q.validate(),
            Nonlinearity::SeparatedAnalytic { q, profile } => {
                if profile
                    .terms
                    .iter()
                    .any(|t| t.power == 0 && t.coefficient != 0.0)
                {
                    return Err(Error::InvalidParameter(
                        "profile must satisfy F(0) = 0".into(),
                    ));
                }
                q.validate()
            }
            Nonlinearity::BumpModified {
                base,
                support,
                ramp,
            } => {
                if !(ramp.threshold > 0.0 && ramp.amplitude > 0.0 && ramp.width > 0.0) {
                    return Err(Error::InvalidParameter(
                        "ramp threshold, amplitude and width must be positive".into(),
                    ));
                }
                support.validate()?;
                base.validate()
            }
        }
    }

    pub fn eval(&self, x: Point, mu: f64) -> f64 {
        match self {
            Nonlinearity::Polynomial { terms } => terms
                .iter()
                .map(|t| t.coefficient.eval(x) * powi(mu, t.power))
                .sum(),
            Nonlinearity::Linear { q } => q.eval(x) * mu,
            Nonlinearity::SeparatedAnalytic { q, profile } => q.eval(x) * profile.value(mu),
            Nonlinearity::BumpModified {
                base,
                support,
                ramp,
            } => base.eval(x, mu) + support.eval(x) * ramp.value(mu),
        }
    }

    /// `d a / d mu`.
    pub fn d1(&self, x: Point, mu: f64) -> f64 {
        match self {
            Nonlinearity::Polynomial { terms } => terms
                .iter()
                .map(|t| t.coefficient.eval(x) * t.power as f64 * powi(mu, t.power - 1))
                .sum(),
            Nonlinearity::Linear { q } => q.eval(x),
            Nonlinearity::SeparatedAnalytic { q, profile } => q.eval(x) * profile.d1(mu),
            Nonlinearity::BumpModified {
                base,
                support,
                ramp,
            } => base.d1(x, mu) + support.eval(x) * ramp.d1(mu),
        }
    }

    /// `d^2 a / d mu^2`.
    pub fn d2(&self, x: Point, mu: f64) -> f64 {
        match self {
            Nonlinearity::Polynomial { terms } => terms
                .iter()
                .filter(|t| t.power >= 2)
                .map(|t| {
                    t.coefficient.eval(x) * (t.power * (t.power - 1)) as f64 * powi(mu, t.power - 2)
                })
                .sum(),
            Nonlinearity::Linear { .. } => 0.0,
            Nonlinearity::SeparatedAnalytic { q, profile } => q.eval(x) * profile.d2(mu),
            Nonlinearity::BumpModified {
                base,
                support,
                ramp,
            } => base.d2(x, mu) + support.eval(x) * ramp.d2(mu),
        }
    }

    /// `a(x, u(x))` at every node.
    pub fn apply(&self, grid: &Grid, u: &Field) -> Result<Field> {
        self.apply_with(grid, u, |x, mu| self.eval(x, mu))
    }

    /// `d_mu a(x, u(x))` at every node.
    pub fn apply_d1(&self, grid: &Grid, u: &Field) -> Result<Field> {
        self.apply_with(grid, u, |x, mu| self.d1(x, mu))
    }

    /// `d_mu^2 a(x, u(x))` at every node.
    pub fn apply_d2(&self, grid: &Grid, u: &Field) -> Result<Field> {
        self.apply_with(grid, u, |x, mu| self.d2(x, mu))
    }

    fn apply_with(&self, grid: &Grid, u: &Field, f: impl Fn(Point, f64) -> f64) -> Result<Field> {
        grid.check(u.shape())?;
        let values = u
            .values()
            .iter()
            .enumerate()
            .map(|(k, &mu)| f(grid.point(k), mu))
            .collect();
        Field::from_values(grid, values)
    }

    /// True when `d2` vanishes identically by construction.
    pub fn is_linear(&self) -> bool {
        match self {
            Nonlinearity::Linear { .. } => true,
            Nonlinearity::Polynomial { terms } => terms.iter().all(|t| t.power == 1),
            Nonlinearity::SeparatedAnalytic { profile, .. } => profile.max_power() <= 1,
            Nonlinearity::BumpModified { .. } => false,
        }
    }
}

/// Closed interval of `mu` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueRange {
    pub lo: f64,
    pub hi: f64,
}

impl ValueRange {
    pub fn new(lo: f64, hi: f64) -> ValueRange {
        ValueRange { lo, hi }
    }
    pub fn symmetric(r: f64) -> ValueRange {
        ValueRange { lo: -r, hi: r }
    }
    fn lattice(&self, samples: usize) -> impl Iterator<Item = f64> + '_ {
        let n = samples.max(2);
        (0..n).map(move |k| self.lo + (self.hi - self.lo) * k as f64 / (n - 1) as f64)
    }
}

/// Rectangle `[0, lx] x [0, ly]` over which pointwise conditions are sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lx: f64,
    pub ly: f64,
}

impl Domain {
    pub fn unit() -> Domain {
        Domain { lx: 1.0, ly: 1.0 }
    }
    pub fn of(grid: &Grid) -> Domain {
        Domain {
            lx: grid.lx(),
            ly: grid.ly(),
        }
    }
    fn lattice(&self, samples: usize) -> Vec<Point> {
        let n = samples.max(2);
        let mut pts = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                pts.push([
                    self.lx * i as f64 / (n - 1) as f64,
                    self.ly * j as f64 / (n - 1) as f64,
                ]);
            }
        }
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub min_d1: f64,
    pub at: Point,
    pub mu: f64,
    pub passed: bool,
}

/// Samples `d_mu a` on a `samples^3` lattice of domain x range; passes when
/// the minimum is at least `-1e-12`.
pub fn check_monotone(
    n: &Nonlinearity,
    domain: Domain,
    range: ValueRange,
    samples: usize,
) -> MonotoneReport {
    let mut report = MonotoneReport {
        min_d1: f64::INFINITY,
        at: [0.0, 0.0],
        mu: 0.0,
        passed: false,
    };
    let mus: Vec<f64> = range.lattice(samples).collect();
    for x in domain.lattice(samples) {
        for &mu in &mus {
            let d = n.d1(x, mu);
            if d < report.min_d1 {
                report = MonotoneReport {
                    min_d1: d,
                    at: x,
                    mu,
                    passed: false,
                };
            }
        }
    }
    report.passed = report.min_d1 >= -1e-12;
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthReport {
    /// Smallest of `a - delta mu^(1+eps)` (mu >= 0) and `-delta |mu|^(1+eps) - a` (mu <= 0).
    pub worst_margin: f64,
    pub at: Point,
    pub mu: f64,
    pub passed: bool,
}

fn growth_margin(value: f64, mu: f64, delta: f64, epsilon: f64) -> (f64, f64) {
    let bound = delta * mu.abs().powf(1.0 + epsilon);
    let margin = if mu >= 0.0 {
        value - bound
    } else {
        -bound - value
    };
    (margin, bound)
}

/// Checks `a(x, mu) >= delta mu^(1+eps)` for sampled `mu >= 0` and
/// `a(x, mu) <= -delta |mu|^(1+eps)` for sampled `mu <= 0`.
pub fn check_growth_bounds(
    n: &Nonlinearity,
    domain: Domain,
    delta: f64,
    epsilon: f64,
    range: ValueRange,
    samples: usize,
) -> Result<GrowthReport> {
    if !(delta > 0.0 && epsilon > 0.0) {
        return Err(Error::InvalidParameter(
            "delta and epsilon must be positive".into(),
        ));
    }
    let mut report = GrowthReport {
        worst_margin: f64::INFINITY,
        at: [0.0, 0.0],
        mu: 0.0,
        passed: true,
    };
    let mus: Vec<f64> = range.lattice(samples).collect();
    for x in domain.lattice(samples.min(17)) {
        for &mu in &mus {
            let (margin, bound) = growth_margin(n.eval(x, mu), mu, delta, epsilon);
            if margin < -1e-12 * bound.max(1.0) {
                report.passed = false;
            }
            if margin < report.worst_margin {
                report.worst_margin = margin;
                report.at = x;
                report.mu = mu;
            }
        }
    }
    Ok(report)
}

/// Same check for a one-variable profile `F`.
pub fn check_profile_growth(
    f: &Profile,
    delta: f64,
    epsilon: f64,
    range: ValueRange,
    samples: usize,
) -> Result<GrowthReport> {
    if !(delta > 0.0 && epsilon > 0.0) {
        return Err(Error::InvalidParameter(
            "delta and epsilon must be positive".into(),
        ));
    }
    let mut report = GrowthReport {
        worst_margin: f64::INFINITY,
        at: [0.0, 0.0],
        mu: 0.0,
        passed: true,
    };
    for mu in range.lattice(samples) {
        let (margin, bound) = growth_margin(f.value(mu), mu, delta, epsilon);
        if margin < -1e-12 * bound.max(1.0) {
            report.passed = false;
        }
        if margin < report.worst_margin {
            report.worst_margin = margin;
            report.mu = mu;
        }
    }
    Ok(report)
}

/// `(base, base + g)` with `g` the ramp of the given threshold, amplitude and
/// width applied uniformly in space.
pub fn make_truncated_pair(
    base: &Nonlinearity,
    threshold: f64,
    amplitude: f64,
    width: f64,
) -> Result<(Nonlinearity, Nonlinearity)> {
    make_truncated_pair_localized(
        base,
        SpatialExpression::constant(1.0),
        threshold,
        amplitude,
        width,
    )
}

/// `(base, base + c(x) g)`; with `c` supported away from the boundary this is
/// the pair whose DN maps coincide once `threshold` exceeds the interior
/// saturation bound on the support of `c`.
pub fn make_truncated_pair_localized(
    base: &Nonlinearity,
    support: SpatialExpression,
    threshold: f64,
    amplitude: f64,
    width: f64,
) -> Result<(Nonlinearity, Nonlinearity)> {
    if !(threshold > 0.0 && amplitude > 0.0 && width > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation needs positive threshold/amplitude/width, got {threshold}/{amplitude}/{width}"
        )));
    }
    let modified = Nonlinearity::BumpModified {
        base: Box::new(base.clone()),
        support,
        ramp: Ramp {
            threshold,
            amplitude,
            width,
        },
    };
    modified.validate()?;
    Ok((base.clone(), modified))
}

/// `sup |a1 - a2|` over a lattice of domain x range.
pub fn sup_difference(
    a1: &Nonlinearity,
    a2: &Nonlinearity,
    domain: Domain,
    range: ValueRange,
    samples: usize,
) -> f64 {
    let mus: Vec<f64> = range.lattice(samples).collect();
    let mut m: f64 = 0.0;
    for x in domain.lattice(samples) {
        for &mu in &mus {
            m = m.max((a1.eval(x, mu) - a2.eval(x, mu)).abs());
        }
    }
    m
}
