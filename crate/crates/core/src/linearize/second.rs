//! Second linearization around the constant-data solution `v_{t,0}`.
//!
//! With `q = d_mu a(x, v_{t,0})`, the first linearizations solve
//! `-lap_h v_j + q v_j = 0`, `v_j = h_j` on the boundary, and the second
//! solves `-lap_h v2 + q v2 = -d2_mu a(x, v_{t,0}) v_1 v_2` with zero data.
//! Pairing with a third solution `v_3` (data `h_3`) gives
//! `sum_interior d2 a v_1 v_2 v_3 hx hy = face_pairing(v2, v3)` exactly.

use serde::Serialize;

use crate::dnmap::dn_map;
use crate::elliptic::{solve_linear, solve_semilinear, NewtonOptions};
use crate::error::Result;
use crate::grid::{face_pairing, BoundaryData, Field, Grid};
use crate::nonlinearity::Nonlinearity;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondOrderReport {
    pub t: f64,
    /// Interior-node quadrature of `d2 a v_1 v_2 v_3`.
    pub volume_integral: f64,
    /// Trapezoid quadrature of the same integrand.
    pub volume_trapezoid: f64,
    /// Face pairing of `v2` against `v3`; equals `volume_integral` exactly.
    pub face_pairing: f64,
    /// `sum dn_map(v2) v3 face`, a second-order boundary quadrature.
    pub dn_pairing: f64,
    pub exact_residual: f64,
    /// `|volume_trapezoid - dn_pairing|`.
    pub quadrature_gap: f64,
    pub response_sup: f64,
}

/// Returns `v2` and the pairing report. `h3` defaults to constant 1.
pub fn second_linearization(
    grid: &Grid,
    a: &Nonlinearity,
    h1: &BoundaryData,
    h2: &BoundaryData,
    h3: Option<&BoundaryData>,
    t: f64,
) -> Result<(Field, SecondOrderReport)> {
    let one = BoundaryData::constant(grid, 1.0);
    let h3 = h3.unwrap_or(&one);
    let opts = NewtonOptions { rtol: 1e-13, ..NewtonOptions::default() };
    let (v0, _) = solve_semilinear(grid, a, &BoundaryData::constant(grid, t), &opts)?;
    let q = a.apply_d1(grid, &v0)?;
    let d2 = a.apply_d2(grid, &v0)?;
    let zero = Field::zeros(grid);
    let v1 = solve_linear(grid, &q, h1, &zero)?;
    let v1b = solve_linear(grid, &q, h2, &zero)?;
    let v3 = solve_linear(grid, &q, h3, &zero)?;
    let source: Vec<f64> = (0..grid.node_count()).map(|k| d2.get(k) * v1.get(k) * v1b.get(k)).collect();
    let rhs = Field::from_values(grid, source.iter().map(|s| -s).collect())?;
    let v2 = solve_linear(grid, &q, &BoundaryData::constant(grid, 0.0), &rhs)?;
    let integrand = Field::from_values(grid, source.iter().zip(v3.values()).map(|(s, w)| s * w).collect())?;
    let volume_integral = grid.integrate_interior(&integrand)?;
    let volume_trapezoid = grid.integrate_trapezoid(&integrand)?;
    let fp = face_pairing(grid, &v2, &v3)?;
    let trace = dn_map(grid, &v2)?;
    let dn_pairing = trace
        .slots()
        .iter()
        .zip(trace.values())
        .zip(trace.weights())
        .map(|((&slot, dn), w)| dn * h3.values()[slot] * w)
        .sum();
    let report = SecondOrderReport {
        t,
        volume_integral,
        volume_trapezoid,
        face_pairing: fp,
        dn_pairing,
        exact_residual: (volume_integral - fp).abs(),
        quadrature_gap: (volume_trapezoid - dn_pairing).abs(),
        response_sup: v2.sup_norm(),
    };
    Ok((v2, report))
}
