//! Finite-difference experiments for semilinear elliptic equations
//! `-lap u + a(x, u) = 0` and their Dirichlet-to-Neumann maps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod dnmap;
pub mod elliptic;
pub mod error;
pub mod grid;
pub mod linearize;
pub mod nonlinearity;
pub mod quadrature;
pub mod radial;

pub use dnmap::{dn_distance, dn_map, DNTrace, TraceNorm};
pub use elliptic::{solve_linear, solve_semilinear, NewtonOptions, SolveReport};
pub use error::{Error, Result};
pub use grid::{build_rectangle, discrete_flux, BoundaryData, Field, Grid, Point, Shape};
pub use nonlinearity::{Nonlinearity, Profile, SpatialExpression};
pub use radial::RadialProfile;
