//! Scenario configuration documents (JSON).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dnlab_core::nonlinearity::{Nonlinearity, Profile, SpatialExpression};
use dnlab_core::{build_rectangle, BoundaryData, Grid};
use serde::{Deserialize, Serialize};

use super::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    Saturation,
    Counterexample,
    #[serde(rename = "rigidity-t1")]
    RigidityT1,
    Cascade,
    SecondLinearization,
    Wellposedness,
    Envelope,
    Convergence,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 8] = [
        ScenarioName::Saturation,
        ScenarioName::Counterexample,
        ScenarioName::RigidityT1,
        ScenarioName::Cascade,
        ScenarioName::SecondLinearization,
        ScenarioName::Wellposedness,
        ScenarioName::Envelope,
        ScenarioName::Convergence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Saturation => "saturation",
            ScenarioName::Counterexample => "counterexample",
            ScenarioName::RigidityT1 => "rigidity-t1",
            ScenarioName::Cascade => "cascade",
            ScenarioName::SecondLinearization => "second-linearization",
            ScenarioName::Wellposedness => "wellposedness",
            ScenarioName::Envelope => "envelope",
            ScenarioName::Convergence => "convergence",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| LabError::Config(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Nodes per axis on the finest grid used by the scenario.
    #[serde(default = "default_nodes")]
    pub n: usize,
    #[serde(default = "unit")]
    pub lx: f64,
    #[serde(default = "unit")]
    pub ly: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: default_nodes(), lx: 1.0, ly: 1.0 }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid, LabError> {
        Ok(build_rectangle(self.n, self.n, self.lx, self.ly)?)
    }

    /// The grid with `2^levels` times the spacing.
    pub fn coarsened(&self, levels: u32) -> Result<Grid, LabError> {
        let k = 1usize << levels;
        if !(self.n - 1).is_multiple_of(k) {
            return Err(LabError::Config(format!("grid n = {} cannot be coarsened {levels} times", self.n)));
        }
        Ok(build_rectangle((self.n - 1) / k + 1, (self.n - 1) / k + 1, self.lx, self.ly)?)
    }
}

fn default_nodes() -> usize {
    129
}

fn unit() -> f64 {
    1.0
}

/// Boundary data recipes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataSpec {
    Constant { value: f64 },
    /// Seeded random trigonometric polynomial; the seed comes from the config.
    Trig { index: u64, amplitude: f64 },
    /// `amplitude (x(lx - x)/lx^2 + y(ly - y)/ly^2)`, zero at the corners.
    CornerFree { amplitude: f64 },
}

impl DataSpec {
    pub fn build(&self, grid: &Grid, seed: u64) -> Result<BoundaryData, LabError> {
        let (lx, ly) = (grid.lx(), grid.ly());
        Ok(match *self {
            DataSpec::Constant { value } => BoundaryData::constant(grid, value),
            DataSpec::Trig { index, amplitude } => {
                dnlab_core::linearize::trig_boundary_data(grid, seed, index, amplitude)?
            }
            DataSpec::CornerFree { amplitude } => BoundaryData::from_fn(grid, |x, y| {
                amplitude * (x * (lx - x) / (lx * lx) + y * (ly - y) / (ly * ly))
            }),
        })
    }
}

/// Overrides for assertion tolerances. Unset entries use the defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub divergence: Option<f64>,
    pub order: Option<f64>,
    pub cauchy: Option<f64>,
    pub bound_slack: Option<f64>,
    pub radial_agreement: Option<f64>,
    pub eigen_relative: Option<f64>,
    pub eigen_shift: Option<f64>,
    pub distance_factor: Option<f64>,
    pub difference_floor: Option<f64>,
    pub vanish: Option<f64>,
    pub flux_relative: Option<f64>,
    pub linear_response: Option<f64>,
    pub ratio_spread: Option<f64>,
    pub constant_growth: Option<f64>,
}

/// Effective tolerances after applying overrides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolved {
    pub divergence: f64,
    pub order: f64,
    pub cauchy: f64,
    pub bound_slack: f64,
    pub radial_agreement: f64,
    pub eigen_relative: f64,
    pub eigen_shift: f64,
    pub distance_factor: f64,
    pub difference_floor: f64,
    pub vanish: f64,
    pub flux_relative: f64,
    pub linear_response: f64,
    pub ratio_spread: f64,
    /// Allowed growth of the fitted `C` in `C h^2` between levels.
    pub constant_growth: f64,
}

impl Tolerances {
    pub fn resolve(&self) -> Resolved {
        Resolved {
            divergence: self.divergence.unwrap_or(1e-10),
            order: self.order.unwrap_or(1.9),
            cauchy: self.cauchy.unwrap_or(1e-3),
            bound_slack: self.bound_slack.unwrap_or(1e-6),
            radial_agreement: self.radial_agreement.unwrap_or(1e-6),
            eigen_relative: self.eigen_relative.unwrap_or(0.01),
            eigen_shift: self.eigen_shift.unwrap_or(1e-8),
            distance_factor: self.distance_factor.unwrap_or(10.0),
            difference_floor: self.difference_floor.unwrap_or(0.99),
            vanish: self.vanish.unwrap_or(1e-10),
            flux_relative: self.flux_relative.unwrap_or(1e-8),
            linear_response: self.linear_response.unwrap_or(1e-10),
            ratio_spread: self.ratio_spread.unwrap_or(0.1),
            constant_growth: self.constant_growth.unwrap_or(1.1),
        }
    }
}

/// A scenario run request. `params` is checked against the scenario's own
/// schema by [`ScenarioConfig::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioName,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationParams {
    #[serde(default = "cubic_profile")]
    pub profile: Profile,
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default = "two")]
    pub epsilon: f64,
    #[serde(default = "dimension")]
    pub dimension: u32,
    #[serde(default = "decades")]
    pub lambdas: Vec<f64>,
    /// Profiles for the shooting vs finite-difference cross-check.
    #[serde(default = "cross_profiles")]
    pub cross_profiles: Vec<Profile>,
    #[serde(default = "cross_lambdas")]
    pub cross_lambdas: Vec<f64>,
    #[serde(default = "cross_dimensions")]
    pub cross_dimensions: Vec<u32>,
    /// Constant boundary values for the rectangle comparison.
    #[serde(default = "rectangle_lambdas")]
    pub rectangle_lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleParams {
    #[serde(default = "Nonlinearity::cubic")]
    pub base: Nonlinearity,
    #[serde(default = "depth")]
    pub depth: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Width in `mu` of the ramp switching the modification on.
    #[serde(default = "one")]
    pub width: f64,
    /// Spatial ramp of the cutoff inside the depth box.
    #[serde(default = "box_ramp")]
    pub box_ramp: f64,
    #[serde(default = "twenty")]
    pub random_count: usize,
    #[serde(default = "amplitudes")]
    pub amplitudes: Vec<f64>,
    /// Growth constants of `base` for the saturation bound.
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default = "two")]
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidityParams {
    #[serde(default = "Nonlinearity::cubic")]
    pub nonlinearity: Nonlinearity,
    #[serde(default = "unit_data")]
    pub data: DataSpec,
    #[serde(default = "mus")]
    pub mus: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeParams {
    #[serde(default = "bump")]
    pub q: SpatialExpression,
    #[serde(default = "cubic_profile")]
    pub profile: Profile,
    /// Amplitude step on the coarse grid; halved with the grid.
    #[serde(default = "step")]
    pub step: f64,
    /// A mean-zero coefficient for the vanishing-integral check.
    #[serde(default = "mean_zero")]
    pub mean_zero_q: SpatialExpression,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecondParams {
    #[serde(default = "quartic_even")]
    pub nonlinearity: Nonlinearity,
    #[serde(default = "tenth")]
    pub t: f64,
    #[serde(default = "corner_free")]
    pub h1: DataSpec,
    #[serde(default = "corner_free")]
    pub h2: DataSpec,
    #[serde(default)]
    pub h3: Option<DataSpec>,
    /// Linear control case; its second response must vanish.
    #[serde(default = "linear_two")]
    pub linear: Nonlinearity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellposednessParams {
    #[serde(default = "Nonlinearity::cubic")]
    pub nonlinearity: Nonlinearity,
    #[serde(default = "trig_unit")]
    pub data: DataSpec,
    #[serde(default = "small_ts")]
    pub ts: Vec<f64>,
    #[serde(default = "hundred")]
    pub tmax: f64,
    #[serde(default = "twenty")]
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeParams {
    #[serde(default = "Nonlinearity::cubic")]
    pub nonlinearity: Nonlinearity,
    #[serde(default = "center")]
    pub point: [f64; 2],
    #[serde(default = "envelope_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "eight")]
    pub random_count: usize,
    /// Growth constants of the nonlinearity for the ball bound.
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default = "two")]
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceParams {
    /// Zero-order coefficient `q` of the manufactured problem.
    #[serde(default = "one")]
    pub q: f64,
    /// Constant shifts applied to the eigenvalue probe.
    #[serde(default = "shifts")]
    pub shifts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioParams {
    Saturation(SaturationParams),
    Counterexample(CounterexampleParams),
    RigidityT1(RigidityParams),
    Cascade(CascadeParams),
    SecondLinearization(SecondParams),
    Wellposedness(WellposednessParams),
    Envelope(EnvelopeParams),
    Convergence(ConvergenceParams),
}

/// A config whose parameters have been parsed and checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidConfig {
    pub config: ScenarioConfig,
    pub params: ScenarioParams,
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<ScenarioConfig, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        ScenarioConfig::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<ScenarioConfig, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<ValidConfig, LabError> {
        let g = &self.grid;
        if g.n < 9 || g.n.is_multiple_of(2) || !(g.lx > 0.0 && g.ly > 0.0) {
            return Err(LabError::Config(format!(
                "grid needs odd n >= 9 and positive lengths, got n = {} on {} x {}",
                g.n, g.lx, g.ly
            )));
        }
        let params = self.params.clone();
        let params = match self.scenario {
            ScenarioName::Saturation => ScenarioParams::Saturation(parse(params)?),
            ScenarioName::Counterexample => ScenarioParams::Counterexample(parse(params)?),
            ScenarioName::RigidityT1 => ScenarioParams::RigidityT1(parse(params)?),
            ScenarioName::Cascade => ScenarioParams::Cascade(parse(params)?),
            ScenarioName::SecondLinearization => ScenarioParams::SecondLinearization(parse(params)?),
            ScenarioName::Wellposedness => ScenarioParams::Wellposedness(parse(params)?),
            ScenarioName::Envelope => ScenarioParams::Envelope(parse(params)?),
            ScenarioName::Convergence => ScenarioParams::Convergence(parse(params)?),
        };
        check_params(self, &params)?;
        Ok(ValidConfig { config: self.clone(), params })
    }
}

fn parse<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T, LabError> {
    let v = if v.is_null() { serde_json::Value::Object(Default::default()) } else { v };
    serde_json::from_value(v).map_err(|e| LabError::Config(format!("params: {e}")))
}

fn require(ok: bool, msg: &str) -> Result<(), LabError> {
    if ok {
        Ok(())
    } else {
        Err(LabError::Config(msg.to_string()))
    }
}

fn positive_increasing(xs: &[f64]) -> bool {
    !xs.is_empty() && xs[0] > 0.0 && xs.windows(2).all(|w| w[1] > w[0]) && xs.iter().all(|x| x.is_finite())
}

fn check_params(cfg: &ScenarioConfig, params: &ScenarioParams) -> Result<(), LabError> {
    let n = cfg.grid.n;
    let halvable = |levels: u32| (n - 1).is_multiple_of(1 << levels) && (n - 1) >> levels >= 8;
    match params {
        ScenarioParams::Saturation(p) => {
            require(positive_increasing(&p.lambdas), "lambdas must be positive and increasing")?;
            require(p.lambdas.len() >= 2, "saturation needs at least two lambdas")?;
            require(p.delta > 0.0 && p.epsilon > 0.0, "delta and epsilon must be positive")?;
            require(p.cross_lambdas.iter().all(|l| *l > 0.0), "cross-check lambdas must be positive")?;
            require(p.rectangle_lambdas.iter().all(|l| *l > 0.0), "rectangle lambdas must be positive")?;
        }
        ScenarioParams::Counterexample(p) => {
            require(halvable(1), "counterexample needs a grid that halves to >= 9 nodes")?;
            require(p.depth > 0.0 && 2.0 * p.depth < cfg.grid.lx.min(cfg.grid.ly), "depth must fit in the domain")?;
            require(p.amplitude > 0.0 && p.width > 0.0 && p.box_ramp > 0.0, "amplitude, width and ramp must be positive")?;
            require(positive_increasing(&p.amplitudes), "amplitudes must be positive and increasing")?;
            require(p.random_count > 0, "counterexample needs random data")?;
            require(p.delta > 0.0 && p.epsilon > 0.0, "delta and epsilon must be positive")?;
        }
        ScenarioParams::RigidityT1(p) => {
            require(!p.mus.is_empty(), "rigidity needs a mu sweep")?;
        }
        ScenarioParams::Cascade(p) => {
            require(halvable(1), "cascade needs a grid that halves to >= 9 nodes")?;
            require(p.step > 0.0, "step must be positive")?;
            require(
                p.profile.derivative_at_zero(0) == 0.0 && p.profile.derivative_at_zero(1) == 0.0,
                "cascade profile needs F(0) = F'(0) = 0",
            )?;
            require(
                leading_order(&p.profile).is_some_and(|m| m <= 6),
                "cascade profile needs a nonzero term of order 2..=6",
            )?;
        }
        ScenarioParams::SecondLinearization(p) => {
            require(halvable(2), "second-linearization needs a grid that quarters to >= 9 nodes")?;
            require(p.linear.is_linear(), "the control nonlinearity must be linear")?;
            require(p.t.is_finite(), "t must be finite")?;
        }
        ScenarioParams::Wellposedness(p) => {
            require(positive_increasing(&p.ts), "ts must be positive and increasing")?;
            require(p.tmax > 0.0 && p.steps > 0, "tmax and steps must be positive")?;
        }
        ScenarioParams::Envelope(p) => {
            require(positive_increasing(&p.lambdas), "lambdas must be positive and increasing")?;
            let [x, y] = p.point;
            require(x > 0.0 && x < cfg.grid.lx && y > 0.0 && y < cfg.grid.ly, "point must be inside the domain")?;
        }
        ScenarioParams::Convergence(p) => {
            require(halvable(1), "convergence needs a grid that halves to >= 9 nodes")?;
            require(p.q >= 0.0, "q must be nonnegative")?;
        }
    }
    Ok(())
}

/// First `k >= 2` with `F^(k)(0) != 0`.
pub(crate) fn leading_order(f: &Profile) -> Option<u32> {
    (2..=f.max_power()).find(|&k| f.derivative_at_zero(k) != 0.0)
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn tenth() -> f64 {
    0.1
}
fn hundred() -> f64 {
    100.0
}
fn depth() -> f64 {
    0.25
}
fn box_ramp() -> f64 {
    0.1
}
fn step() -> f64 {
    0.05
}
fn dimension() -> u32 {
    2
}
fn twenty() -> usize {
    20
}
fn eight() -> usize {
    8
}
fn center() -> [f64; 2] {
    [0.5, 0.5]
}
fn cubic_profile() -> Profile {
    Profile::monomial(3)
}
fn decades() -> Vec<f64> {
    (0..=6).map(|k| 10f64.powi(k)).collect()
}
fn cross_profiles() -> Vec<Profile> {
    vec![Profile::monomial(1), Profile::monomial(3)]
}
fn cross_lambdas() -> Vec<f64> {
    vec![1.0, 1e3]
}
fn cross_dimensions() -> Vec<u32> {
    vec![2, 3]
}
fn rectangle_lambdas() -> Vec<f64> {
    vec![1.0, 1e2, 1e4]
}
fn amplitudes() -> Vec<f64> {
    vec![1.0, 10.0, 100.0, 1000.0]
}
fn mus() -> Vec<f64> {
    vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0]
}
fn unit_data() -> DataSpec {
    DataSpec::Constant { value: 1.0 }
}
fn trig_unit() -> DataSpec {
    DataSpec::Trig { index: 0, amplitude: 1.0 }
}
fn corner_free() -> DataSpec {
    DataSpec::CornerFree { amplitude: 1.0 }
}
fn bump() -> SpatialExpression {
    SpatialExpression::GaussianBump { amplitude: 2.0, center: [0.4, 0.6], width: 0.15 }
}
fn mean_zero() -> SpatialExpression {
    SpatialExpression::TrigProduct { amplitude: 1.0, kx: 2, ky: 1, lx: 1.0, ly: 1.0 }
}
fn quartic_even() -> Nonlinearity {
    Nonlinearity::polynomial([(2, 1.0), (4, 1.0)]).expect("valid")
}
fn linear_two() -> Nonlinearity {
    Nonlinearity::linear(2.0)
}
fn small_ts() -> Vec<f64> {
    vec![1e-3, 1e-2, 1e-1]
}
fn envelope_lambdas() -> Vec<f64> {
    vec![1.0, 1e2, 1e4]
}
fn shifts() -> Vec<f64> {
    vec![1.0, 10.0]
}
