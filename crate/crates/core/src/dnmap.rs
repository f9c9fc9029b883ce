//! Discrete Dirichlet-to-Neumann traces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Field, Grid, Shape};

/// Outward normal derivative at every non-corner boundary node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DNTrace {
    shape: Shape,
    /// Boundary slots of the non-corner nodes, in boundary order.
    slots: Vec<usize>,
    values: Vec<f64>,
    /// Face length of each node, used as the l2 weight.
    weights: Vec<f64>,
    data: BoundaryData,
    first_order: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceNorm {
    Sup,
    L2,
}

/// One CSV row of a trace: node position, Dirichlet value and normal derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub x: f64,
    pub y: f64,
    pub data: f64,
    pub dn: f64,
}

impl DNTrace {
    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn data(&self) -> &BoundaryData {
        &self.data
    }

    /// True when the grid was too small for the three-point formula.
    pub fn used_first_order(&self) -> bool {
        self.first_order
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sum of trace values times face lengths.
    pub fn integral(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// A trace on the same nodes with replaced values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<DNTrace> {
        if values.len() != self.values.len() {
            return Err(Error::GridMismatch);
        }
        Ok(DNTrace { values, ..self.clone() })
    }

    /// `self - other`, keeping the data of `self`.
    pub fn difference(&self, other: &DNTrace) -> Result<DNTrace> {
        self.compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        self.with_values(values)
    }

    pub fn rows(&self, grid: &Grid) -> Result<Vec<TraceRow>> {
        grid.check(self.shape)?;
        Ok(self
            .slots
            .iter()
            .zip(&self.values)
            .map(|(&slot, &dn)| {
                let b = &grid.boundary_nodes()[slot];
                let [x, y] = grid.point(b.node);
                TraceRow { x, y, data: self.data.values()[slot], dn }
            })
            .collect())
    }

    /// Samples a trace computed on `fine` at the boundary nodes of the nested
    /// grid `coarse` (same rectangle, spacings an integer multiple).
    pub fn restrict(&self, fine: &Grid, coarse: &Grid) -> Result<DNTrace> {
        fine.check(self.shape)?;
        let (cx, cy) = (coarse.nx() - 1, coarse.ny() - 1);
        let (fx, fy) = (fine.nx() - 1, fine.ny() - 1);
        if fx % cx != 0 || fy % cy != 0 || fx / cx != fy / cy || fine.lx() != coarse.lx() || fine.ly() != coarse.ly() {
            return Err(Error::GridMismatch);
        }
        let r = fx / cx;
        let mut by_node = vec![None; fine.node_count()];
        for (&slot, &v) in self.slots.iter().zip(&self.values) {
            by_node[fine.boundary_nodes()[slot].node] = Some(v);
        }
        let mut slots = Vec::new();
        let mut values = Vec::new();
        let mut weights = Vec::new();
        let mut data = Vec::with_capacity(coarse.boundary_count());
        for (slot, b) in coarse.boundary_nodes().iter().enumerate() {
            let node = fine.index(b.i * r, b.j * r);
            let fslot = fine.boundary_slot(node).ok_or(Error::GridMismatch)?;
            data.push(self.data.values()[fslot]);
            if b.is_corner() {
                continue;
            }
            slots.push(slot);
            values.push(by_node[node].ok_or(Error::GridMismatch)?);
            weights.push(coarse.face_measure(b));
        }
        Ok(DNTrace {
            shape: coarse.shape(),
            slots,
            values,
            weights,
            data: BoundaryData::from_values(coarse, data)?,
            first_order: self.first_order,
        })
    }

    fn compatible(&self, other: &DNTrace) -> Result<()> {
        if self.shape != other.shape || self.slots != other.slots {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// Normal derivative of `u` at the non-corner boundary nodes by the one-sided
/// formula `(3 u_b - 4 u_1 + u_2) / (2h)`. Falls back to `(u_b - u_1)/h` when
/// a direction has fewer than four nodes.
pub fn dn_map(grid: &Grid, u: &Field) -> Result<DNTrace> {
    grid.check(u.shape())?;
    let first_order = grid.nx() < 4 || grid.ny() < 4;
    let v = u.values();
    let mut slots = Vec::new();
    let mut values = Vec::new();
    let mut weights = Vec::new();
    for (slot, b) in grid.boundary_nodes().iter().enumerate() {
        if b.is_corner() {
            continue;
        }
        let (n1, h) = grid.inward(b, 1);
        let dn = if first_order {
            (v[b.node] - v[n1]) / h
        } else {
            let (n2, _) = grid.inward(b, 2);
            (3.0 * v[b.node] - 4.0 * v[n1] + v[n2]) / (2.0 * h)
        };
        slots.push(slot);
        values.push(dn);
        weights.push(grid.face_measure(b));
    }
    Ok(DNTrace { shape: grid.shape(), slots, values, weights, data: BoundaryData::trace(grid, u)?, first_order })
}

pub fn dn_distance(t1: &DNTrace, t2: &DNTrace, norm: TraceNorm) -> Result<f64> {
    t1.compatible(t2)?;
    let diffs = t1.values.iter().zip(&t2.values).map(|(a, b)| a - b);
    Ok(match norm {
        TraceNorm::Sup => diffs.fold(0.0, |m, d| m.max(d.abs())),
        TraceNorm::L2 => diffs.zip(&t1.weights).map(|(d, w)| d * d * w).sum::<f64>().sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::harmonic_extension;
    use crate::grid::{discrete_flux, Side};
    use std::f64::consts::PI;

    #[test]
    fn restriction_matches_coarse_samples() {
        let (c, f) = (Grid::unit_square(9).unwrap(), Grid::unit_square(33).unwrap());
        let exact = |g: &Grid| Field::from_fn(g, |x, y| x * x - y * y + 3.0 * x * y);
        let tc = dn_map(&c, &exact(&c)).unwrap();
        let tf = dn_map(&f, &exact(&f)).unwrap().restrict(&f, &c).unwrap();
        assert!(dn_distance(&tc, &tf, TraceNorm::Sup).unwrap() < 1e-12);
        assert_eq!(tc.data(), tf.data());
        assert!(dn_map(&c, &exact(&c)).unwrap().restrict(&c, &f).is_err());
    }

    #[test]
    fn constant_has_zero_trace() {
        let g = Grid::unit_square(9).unwrap();
        let t = dn_map(&g, &Field::constant(&g, 2.5)).unwrap();
        assert_eq!(t.len(), 4 * 7);
        assert!(t.values().iter().all(|&v| v == 0.0));
        assert!(!t.used_first_order());
    }

    #[test]
    fn linear_and_quadratic_fields_are_exact() {
        let g = Grid::unit_square(11).unwrap();
        let t = dn_map(&g, &Field::from_fn(&g, |x, _| x)).unwrap();
        for (&slot, &v) in t.slots().iter().zip(t.values()) {
            let expect = match g.boundary_nodes()[slot].side().unwrap() {
                Side::Right => 1.0,
                Side::Left => -1.0,
                _ => 0.0,
            };
            assert!((v - expect).abs() < 1e-12);
        }
        let t = dn_map(&g, &Field::from_fn(&g, |x, y| x * x + 3.0 * y * y)).unwrap();
        for (&slot, &v) in t.slots().iter().zip(t.values()) {
            let b = g.boundary_nodes()[slot];
            let [x, y] = g.point(b.node);
            let expect = match b.side().unwrap() {
                Side::Right => 2.0 * x,
                Side::Left => -2.0 * x,
                Side::Top => 6.0 * y,
                Side::Bottom => -6.0 * y,
            };
            assert!((v - expect).abs() < 1e-11);
        }
    }

    #[test]
    fn small_grids_fall_back_to_first_order() {
        let g = Grid::unit_square(3).unwrap();
        let t = dn_map(&g, &Field::from_fn(&g, |x, _| x)).unwrap();
        assert!(t.used_first_order());
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn harmonic_trace_converges_at_second_order() {
        let err = |n: usize| {
            let g = Grid::unit_square(n).unwrap();
            let f = BoundaryData::from_fn(&g, |x, y| (PI * x).sin() * (PI * y).sinh() / PI.sinh());
            let u = harmonic_extension(&g, &f).unwrap();
            let t = dn_map(&g, &u).unwrap();
            let mut e: f64 = 0.0;
            for (&slot, &v) in t.slots().iter().zip(t.values()) {
                let b = g.boundary_nodes()[slot];
                if b.side() == Some(Side::Top) {
                    let [x, _] = g.point(b.node);
                    e = e.max((v - PI * (PI * x).sin() * PI.cosh() / PI.sinh()).abs());
                }
            }
            e
        };
        let (e1, e2) = (err(17), err(33));
        assert!(e1 < 0.05, "{e1}");
        assert!((e1 / e2).log2() > 1.8, "{e1} {e2}");
    }

    #[test]
    fn trace_integral_tracks_discrete_flux() {
        // the face quotient is a first-order normal derivative, so the gap closes at O(h)
        let diff = |n: usize| {
            let g = Grid::unit_square(n).unwrap();
            let u = Field::from_fn(&g, |x, y| (PI * x).sin() * (PI * y).sinh());
            let t = dn_map(&g, &u).unwrap();
            (t.integral() - discrete_flux(&g, &u).unwrap()).abs()
        };
        let (d1, d2) = (diff(65), diff(129));
        assert!((d1 / d2).log2() > 0.85, "{d1} {d2}");
    }

    #[test]
    fn distances() {
        let g = Grid::unit_square(9).unwrap();
        let t1 = dn_map(&g, &Field::from_fn(&g, |x, y| x * y)).unwrap();
        assert_eq!(dn_distance(&t1, &t1, TraceNorm::Sup).unwrap(), 0.0);
        let shifted = t1.with_values(t1.values().iter().map(|v| v + 0.7).collect()).unwrap();
        assert!((dn_distance(&t1, &shifted, TraceNorm::Sup).unwrap() - 0.7).abs() < 1e-14);
        let l2 = dn_distance(&t1, &shifted, TraceNorm::L2).unwrap();
        let total: f64 = t1.weights().iter().sum();
        assert!((l2 - 0.7 * total.sqrt()).abs() < 1e-13);
        let other = dn_map(&Grid::unit_square(7).unwrap(), &Field::zeros(&Grid::unit_square(7).unwrap())).unwrap();
        assert!(matches!(dn_distance(&t1, &other, TraceNorm::Sup), Err(Error::GridMismatch)));
    }
}
