//! Cascade problems for data `f = eps`: every term of
//! `u_eps = eps + sum eps^k v_k + eps^K w + ...` solves a Poisson problem with
//! zero boundary values, `-lap_h v = -s(x)`.

use serde::Serialize;

use crate::elliptic::solve_linear;
use crate::error::{Error, Result};
use crate::grid::{discrete_flux, BoundaryData, Field, Grid};
use crate::nonlinearity::factorial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// `a = q(x) F(mu)` with `F^(m)(0)` the first nonzero derivative.
    Odd,
    /// `a = sum a_2k(x) mu^(2k)`, `a_2m` the first nonzero coefficient.
    Even,
}

#[derive(Debug, Clone)]
pub struct CascadeSolution {
    pub parity: Parity,
    /// Leading order `m` (odd case) or `2m` (even case).
    pub order: usize,
    /// `(k, v_k)` over the cascade range.
    pub fields: Vec<(usize, Field)>,
    /// Sources `s_k` with `-lap_h v_k + s_k = 0`, matching `fields`.
    pub sources: Vec<Field>,
    /// Order of `w` in the expansion.
    pub w_order: usize,
    pub w: Field,
    pub w_source: Field,
    /// `q` in the odd case, `a_2m` in the even case.
    pub leading: Field,
}

impl CascadeSolution {
    pub fn field(&self, k: usize) -> Option<&Field> {
        self.fields.iter().find(|(j, _)| *j == k).map(|(_, f)| f)
    }

    pub fn leading_field(&self) -> &Field {
        &self.fields[0].1
    }
}

fn poisson_zero_data(grid: &Grid, source: &Field) -> Result<Field> {
    // -lap v + s = 0  <=>  -lap v = -s
    solve_linear(grid, &Field::zeros(grid), &BoundaryData::constant(grid, 0.0), &source.scale(-1.0))
}

/// Odd (general analytic) cascade for `a = q(x) F(mu)`. `f_derivs[k]` is
/// `F^(k)(0)`; missing entries count as zero. `m` must be the first `k >= 2`
/// with `F^(k)(0) != 0`.
pub fn cascade_solve(grid: &Grid, q: &Field, f_derivs: &[f64], m: usize) -> Result<CascadeSolution> {
    grid.check(q.shape())?;
    let d = |k: usize| f_derivs.get(k).copied().unwrap_or(0.0);
    if m < 2 || d(m) == 0.0 {
        return Err(Error::InvalidParameter(format!("cascade needs m >= 2 with F^(m)(0) != 0, got m = {m}")));
    }
    let mut fields = Vec::new();
    let mut sources = Vec::new();
    for k in m..=(2 * m - 2) {
        let s = q.scale(d(k) / factorial(k as u32));
        fields.push((k, poisson_zero_data(grid, &s)?));
        sources.push(s);
    }
    let vm = &fields[0].1;
    let c1 = d(2 * m - 1) / factorial(2 * m as u32 - 1);
    let c2 = d(m) / factorial(m as u32 - 1);
    let w_source = Field::from_values(
        grid,
        q.values().iter().zip(vm.values()).map(|(qi, vi)| c1 * qi + c2 * qi * vi).collect(),
    )?;
    let w = poisson_zero_data(grid, &w_source)?;
    Ok(CascadeSolution {
        parity: Parity::Odd,
        order: m,
        fields,
        sources,
        w_order: 2 * m - 1,
        w,
        w_source,
        leading: q.clone(),
    })
}

/// Even cascade for `a = sum_k a_k(x) mu^k` with only even `k`.
/// `coeffs[k]` is `a_k`; `2m` is the lowest nonzero order.
pub fn cascade_solve_even(grid: &Grid, coeffs: &[Field], m: usize) -> Result<CascadeSolution> {
    if m < 1 || coeffs.len() <= 2 * m {
        return Err(Error::InvalidParameter(format!("even cascade needs m >= 1 and a_(2m) given, got m = {m}")));
    }
    for c in coeffs {
        grid.check(c.shape())?;
    }
    let zero = Field::zeros(grid);
    let a = |k: usize| coeffs.get(k).unwrap_or(&zero);
    let mut fields = Vec::new();
    let mut sources = Vec::new();
    for k in (2 * m..=(4 * m - 2)).step_by(2) {
        fields.push((k, poisson_zero_data(grid, a(k))?));
        sources.push(a(k).clone());
    }
    let lead = a(2 * m).clone();
    let v2m = &fields[0].1;
    let w_source = Field::from_values(
        grid,
        lead.values().iter().zip(v2m.values()).map(|(ai, vi)| 2.0 * m as f64 * ai * vi).collect(),
    )?;
    let w = poisson_zero_data(grid, &w_source)?;
    Ok(CascadeSolution {
        parity: Parity::Even,
        order: 2 * m,
        fields,
        sources,
        w_order: 4 * m - 1,
        w,
        w_source,
        leading: lead,
    })
}

/// Flux of one cascade field against the volume integral of its source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxCheck {
    pub order: usize,
    pub flux: f64,
    /// `sum_interior s hx hy`; the outward flux of `v` with `-lap_h v + s = 0`.
    pub source_integral: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub parity: Parity,
    /// `int q` (odd) or, in the even case, `int a_2m`.
    pub leading_integral: f64,
    pub leading_integral_trapezoid: f64,
    /// `int q v_m` (odd) or `int a_2m v_2m` (even).
    pub leading_moment: f64,
    /// Discrete Dirichlet energy of the leading cascade field.
    pub gradient_energy: f64,
    pub fluxes: Vec<FluxCheck>,
    pub w_flux: FluxCheck,
    pub max_flux_residual: f64,
}

pub fn check_integral_identities(grid: &Grid, sol: &CascadeSolution) -> Result<IdentityReport> {
    let check = |order: usize, v: &Field, s: &Field| -> Result<FluxCheck> {
        let flux = discrete_flux(grid, v)?;
        let source_integral = grid.integrate_interior(s)?;
        Ok(FluxCheck { order, flux, source_integral, residual: (flux - source_integral).abs() })
    };
    let fluxes = sol
        .fields
        .iter()
        .zip(&sol.sources)
        .map(|((k, v), s)| check(*k, v, s))
        .collect::<Result<Vec<_>>>()?;
    let w_flux = check(sol.w_order, &sol.w, &sol.w_source)?;
    let max_flux_residual = fluxes.iter().chain([&w_flux]).map(|c| c.residual).fold(0.0, f64::max);
    let lead_v = sol.leading_field();
    let moment = Field::from_values(
        grid,
        sol.leading.values().iter().zip(lead_v.values()).map(|(a, b)| a * b).collect(),
    )?;
    Ok(IdentityReport {
        parity: sol.parity,
        leading_integral: grid.integrate_interior(&sol.leading)?,
        leading_integral_trapezoid: grid.integrate_trapezoid(&sol.leading)?,
        leading_moment: grid.integrate_interior(&moment)?,
        gradient_energy: grid.dirichlet_energy(lead_v)?,
        fluxes,
        w_flux,
        max_flux_residual,
    })
}

/// Bound on `max |s|` for `-lap_h v + s = 0`, `v = 0` on the boundary, in
/// terms of the discrete Dirichlet energy `E` of `v`:
/// `|v| <= sqrt(min(lx/hy, ly/hx) E)` along grid lines, and
/// `|lap_h v| <= (4/hx^2 + 4/hy^2) max|v|`.
pub fn source_bound_from_energy(grid: &Grid, energy: f64) -> f64 {
    let (hx, hy) = (grid.hx(), grid.hy());
    let vmax = ((grid.lx() / hy).min(grid.ly() / hx) * energy.max(0.0)).sqrt();
    (4.0 / (hx * hx) + 4.0 / (hy * hy)) * vmax
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::SpatialExpression;

    #[test]
    fn zero_q_gives_zero_fields() {
        let g = Grid::unit_square(17).unwrap();
        let sol = cascade_solve(&g, &Field::zeros(&g), &[0.0, 0.0, 0.0, 6.0], 3).unwrap();
        assert!(sol.fields.iter().all(|(_, v)| v.sup_norm() == 0.0));
        assert_eq!(sol.w.sup_norm(), 0.0);
        let rep = check_integral_identities(&g, &sol).unwrap();
        assert_eq!(rep.leading_integral, 0.0);
        assert_eq!(rep.gradient_energy, 0.0);
        assert_eq!(rep.max_flux_residual, 0.0);
    }

    #[test]
    fn sign_flip_is_exact() {
        let g = Grid::unit_square(17).unwrap();
        let q = Field::from_fn(&g, |x, y| (-(x - 0.3).powi(2) - y * y).exp());
        let a = cascade_solve(&g, &q, &[0.0, 0.0, 1.0, 6.0], 2).unwrap();
        let b = cascade_solve(&g, &q.scale(-1.0), &[0.0, 0.0, 1.0, 6.0], 2).unwrap();
        for ((_, va), (_, vb)) in a.fields.iter().zip(&b.fields) {
            assert!(va.values().iter().zip(vb.values()).all(|(x, y)| *x == -*y));
        }
    }

    #[test]
    fn torsion_center_value() {
        // -lap v = -1 with zero data: center value of the torsion function with sign flipped
        const TORSION_CENTER: f64 = 0.073_671_353_3;
        let g = Grid::unit_square(129).unwrap();
        let sol = cascade_solve(&g, &Field::constant(&g, 1.0), &[0.0, 0.0, 0.0, 6.0], 3).unwrap();
        let v3 = sol.field(3).unwrap();
        let c = v3.get(g.index(64, 64));
        assert!((c + TORSION_CENTER).abs() < 5e-5, "{c}");
    }

    #[test]
    fn flux_identities_are_exact() {
        let g = Grid::unit_square(33).unwrap();
        let bump = SpatialExpression::GaussianBump { amplitude: 2.0, center: [0.4, 0.6], width: 0.15 };
        let q = bump.sample(&g);
        let sol = cascade_solve(&g, &q, &[0.0, 0.0, 0.0, 6.0, 0.0, 120.0], 3).unwrap();
        let rep = check_integral_identities(&g, &sol).unwrap();
        assert!(rep.leading_integral > 0.1);
        assert!(rep.max_flux_residual < 1e-10 * rep.leading_integral);
        assert!((rep.fluxes[0].flux - rep.leading_integral).abs() < 1e-10);
        // mean-zero q gives a tiny integral
        let trig = SpatialExpression::TrigProduct { amplitude: 1.0, kx: 2, ky: 0, lx: 1.0, ly: 1.0 }.sample(&g);
        let sol = cascade_solve(&g, &trig, &[0.0, 0.0, 0.0, 6.0], 3).unwrap();
        let rep = check_integral_identities(&g, &sol).unwrap();
        assert!(rep.leading_integral_trapezoid.abs() < 1e-12);
    }

    #[test]
    fn even_cascade() {
        let g = Grid::unit_square(17).unwrap();
        let a2 = Field::constant(&g, 1.0);
        let sol = cascade_solve_even(&g, &[Field::zeros(&g), Field::zeros(&g), a2], 1).unwrap();
        assert_eq!(sol.order, 2);
        assert_eq!(sol.w_order, 3);
        let rep = check_integral_identities(&g, &sol).unwrap();
        assert!(rep.leading_moment < 0.0);
        assert!(rep.max_flux_residual < 1e-12);
    }

    #[test]
    fn rejects_vanishing_leading_derivative() {
        let g = Grid::unit_square(9).unwrap();
        assert!(cascade_solve(&g, &Field::zeros(&g), &[0.0, 0.0, 0.0], 2).is_err());
        assert!(cascade_solve(&g, &Field::zeros(&g), &[0.0, 1.0], 1).is_err());
    }
}
