//! Uniform rectangular grids, sampled fields and the 5-point operator.
//!
//! Nodes are numbered row-major: node `(i, j)` has index `j * nx + i` and
//! sits at `(i * hx, j * hy)`. Interior unknowns are extracted through an
//! index map so that linear solvers work on a compact vector.
//!
//! Fluxes are face based. Every non-corner boundary node owns one face of
//! length `hy` (left/right edges) or `hx` (bottom/top edges); corners carry
//! Dirichlet data but no face. With this convention the discrete divergence
//! theorem `flux(u) = sum_interior(lap_h u) * hx * hy` is an exact telescoping
//! identity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Edge of the rectangle a boundary node lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    /// Outward unit normal.
    pub fn normal(self) -> [f64; 2] {
        match self {
            Side::Left => [-1.0, 0.0],
            Side::Right => [1.0, 0.0],
            Side::Bottom => [0.0, -1.0],
            Side::Top => [0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub node: usize,
    pub i: usize,
    pub j: usize,
    /// One side for edge nodes, two for corners.
    pub sides: [Option<Side>; 2],
}

impl BoundaryNode {
    pub fn is_corner(&self) -> bool {
        self.sides[1].is_some()
    }

    /// The single side of a non-corner node.
    pub fn side(&self) -> Option<Side> {
        if self.is_corner() {
            None
        } else {
            self.sides[0]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum NodeKind {
    Interior(usize),
    Boundary(usize),
}

/// Identity of a grid, carried by fields and traces to catch mismatches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

#[derive(Debug, Clone)]
pub struct Grid {
    shape: Shape,
    hx: f64,
    hy: f64,
    kinds: Vec<NodeKind>,
    interior: Vec<usize>,
    boundary: Vec<BoundaryNode>,
}

/// Builds the uniform grid on `[0, lx] x [0, ly]` with `nx * ny` nodes.
pub fn build_rectangle(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Grid> {
    if nx < 3 || ny < 3 {
        return Err(Error::GridTooSmall { nx, ny });
    }
    if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "side lengths must be positive, got {lx} x {ly}"
        )));
    }
    let mut kinds = Vec::with_capacity(nx * ny);
    let mut interior = Vec::with_capacity((nx - 2) * (ny - 2));
    let mut boundary = Vec::with_capacity(2 * nx + 2 * ny - 4);
    for j in 0..ny {
        for i in 0..nx {
            let node = j * nx + i;
            let mut sides = [None, None];
            let mut push = |s: Side| {
                if sides[0].is_none() {
                    sides[0] = Some(s);
                } else {
                    sides[1] = Some(s);
                }
            };
            if i == 0 {
                push(Side::Left);
            }
            if i == nx - 1 {
                push(Side::Right);
            }
            if j == 0 {
                push(Side::Bottom);
            }
            if j == ny - 1 {
                push(Side::Top);
            }
            if sides[0].is_some() {
                kinds.push(NodeKind::Boundary(boundary.len()));
                boundary.push(BoundaryNode { node, i, j, sides });
            } else {
                kinds.push(NodeKind::Interior(interior.len()));
                interior.push(node);
            }
        }
    }
    Ok(Grid {
        shape: Shape { nx, ny, lx, ly },
        hx: lx / (nx - 1) as f64,
        hy: ly / (ny - 1) as f64,
        kinds,
        interior,
        boundary,
    })
}

impl Grid {
    /// Square grid on the unit square with `n` nodes per side.
    pub fn unit_square(n: usize) -> Result<Grid> {
        build_rectangle(n, n, 1.0, 1.0)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }
    pub fn nx(&self) -> usize {
        self.shape.nx
    }
    pub fn ny(&self) -> usize {
        self.shape.ny
    }
    pub fn lx(&self) -> f64 {
        self.shape.lx
    }
    pub fn ly(&self) -> f64 {
        self.shape.ly
    }
    pub fn hx(&self) -> f64 {
        self.hx
    }
    pub fn hy(&self) -> f64 {
        self.hy
    }
    /// Smallest spacing.
    pub fn h(&self) -> f64 {
        self.hx.min(self.hy)
    }
    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }
    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }
    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }
    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }
    /// Interior node indices in row-major order.
    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }
    /// Boundary nodes in row-major order.
    pub fn boundary_nodes(&self) -> &[BoundaryNode] {
        &self.boundary
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.shape.nx + i
    }
    pub fn ij(&self, node: usize) -> (usize, usize) {
        (node % self.shape.nx, node / self.shape.nx)
    }
    pub fn point(&self, node: usize) -> Point {
        let (i, j) = self.ij(node);
        [i as f64 * self.hx, j as f64 * self.hy]
    }

    /// Position of `node` among the interior unknowns.
    pub fn interior_slot(&self, node: usize) -> Option<usize> {
        match self.kinds[node] {
            NodeKind::Interior(k) => Some(k),
            NodeKind::Boundary(_) => None,
        }
    }
    /// Position of `node` in the boundary ordering.
    pub fn boundary_slot(&self, node: usize) -> Option<usize> {
        match self.kinds[node] {
            NodeKind::Boundary(k) => Some(k),
            NodeKind::Interior(_) => None,
        }
    }

    /// Interior node closest to `p`.
    pub fn nearest_interior(&self, p: Point) -> usize {
        let i = ((p[0] / self.hx).round() as isize).clamp(1, self.shape.nx as isize - 2) as usize;
        let j = ((p[1] / self.hy).round() as isize).clamp(1, self.shape.ny as isize - 2) as usize;
        self.index(i, j)
    }

    /// Distance from `p` to the rectangle's boundary.
    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        p[0].min(self.shape.lx - p[0])
            .min(p[1])
            .min(self.shape.ly - p[1])
    }

    /// The neighbour one step inward from a non-corner boundary node, and the
    /// spacing along the normal.
    pub(crate) fn inward(&self, b: &BoundaryNode, steps: usize) -> (usize, f64) {
        match b.side().expect("corner has no inward normal") {
            Side::Left => (self.index(b.i + steps, b.j), self.hx),
            Side::Right => (self.index(b.i - steps, b.j), self.hx),
            Side::Bottom => (self.index(b.i, b.j + steps), self.hy),
            Side::Top => (self.index(b.i, b.j - steps), self.hy),
        }
    }

    /// Face length owned by a non-corner boundary node.
    pub fn face_measure(&self, b: &BoundaryNode) -> f64 {
        match b.side() {
            Some(Side::Left | Side::Right) => self.hy,
            Some(Side::Bottom | Side::Top) => self.hx,
            None => 0.0,
        }
    }

    pub fn check(&self, shape: Shape) -> Result<()> {
        if shape == self.shape {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Discrete Laplacian at every interior node, in interior order.
    pub fn laplacian(&self, u: &Field) -> Result<Vec<f64>> {
        self.check(u.shape)?;
        let (nx, ax, ay) = (
            self.shape.nx,
            1.0 / (self.hx * self.hx),
            1.0 / (self.hy * self.hy),
        );
        let v = &u.values;
        Ok(self
            .interior
            .iter()
            .map(|&k| {
                ax * (v[k + 1] - 2.0 * v[k] + v[k - 1]) + ay * (v[k + nx] - 2.0 * v[k] + v[k - nx])
            })
            .collect())
    }

    /// `sum_interior g * hx * hy` for interior-ordered samples.
    pub fn interior_sum(&self, g: &[f64]) -> f64 {
        debug_assert_eq!(g.len(), self.interior.len());
        g.iter().sum::<f64>() * self.cell_area()
    }

    /// Interior-node quadrature of a field; this is the quadrature under which
    /// the discrete divergence theorem is exact.
    pub fn integrate_interior(&self, u: &Field) -> Result<f64> {
        self.check(u.shape)?;
        Ok(self.interior.iter().map(|&k| u.values[k]).sum::<f64>() * self.cell_area())
    }

    /// Composite trapezoid rule over all nodes.
    pub fn integrate_trapezoid(&self, u: &Field) -> Result<f64> {
        self.check(u.shape)?;
        let (nx, ny) = (self.shape.nx, self.shape.ny);
        let mut s = 0.0;
        for j in 0..ny {
            let wy = if j == 0 || j == ny - 1 { 0.5 } else { 1.0 };
            for i in 0..nx {
                let wx = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
                s += wx * wy * u.values[j * nx + i];
            }
        }
        Ok(s * self.cell_area())
    }

    /// Discrete Dirichlet energy `sum |grad_h u|^2 hx hy` over the edges of
    /// interior grid lines. Satisfies the summation-by-parts identity
    /// `energy(u) = sum_interior u (-lap_h u) hx hy + sum_faces u_b (u_b - u_adj)/h * face`.
    pub fn dirichlet_energy(&self, u: &Field) -> Result<f64> {
        self.check(u.shape)?;
        let (nx, ny) = (self.shape.nx, self.shape.ny);
        let v = &u.values;
        let mut s = 0.0;
        for j in 1..ny - 1 {
            for i in 0..nx - 1 {
                let d = (v[j * nx + i + 1] - v[j * nx + i]) / self.hx;
                s += d * d;
            }
        }
        for j in 0..ny - 1 {
            for i in 1..nx - 1 {
                let d = (v[(j + 1) * nx + i] - v[j * nx + i]) / self.hy;
                s += d * d;
            }
        }
        Ok(s * self.cell_area())
    }
}

/// One real value per grid node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Field {
    shape: Shape,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Field {
        Field::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid, c: f64) -> Field {
        Field {
            shape: grid.shape,
            values: vec![c; grid.node_count()],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Field {
        let values = (0..grid.node_count())
            .map(|k| {
                let p = grid.point(k);
                f(p[0], p[1])
            })
            .collect();
        Field {
            shape: grid.shape,
            values,
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch);
        }
        Ok(Field {
            shape: grid.shape,
            values,
        })
    }

    /// Field with the given interior values (interior order) and boundary data.
    pub fn assemble(grid: &Grid, interior: &[f64], boundary: &BoundaryData) -> Result<Field> {
        grid.check(boundary.shape)?;
        if interior.len() != grid.interior_count() {
            return Err(Error::GridMismatch);
        }
        let mut values = vec![0.0; grid.node_count()];
        for (k, &node) in grid.interior.iter().enumerate() {
            values[node] = interior[k];
        }
        for (b, &v) in grid.boundary.iter().zip(&boundary.values) {
            values[b.node] = v;
        }
        Ok(Field {
            shape: grid.shape,
            values,
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn get(&self, node: usize) -> f64 {
        self.values[node]
    }

    pub fn interior_values(&self, grid: &Grid) -> Vec<f64> {
        grid.interior.iter().map(|&k| self.values[k]).collect()
    }

    pub fn set_boundary(&mut self, grid: &Grid, data: &BoundaryData) -> Result<()> {
        grid.check(self.shape)?;
        grid.check(data.shape)?;
        for (b, &v) in grid.boundary.iter().zip(&data.values) {
            self.values[b.node] = v;
        }
        Ok(())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            shape: self.shape,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self - other`, node by node.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        if self.shape != other.shape {
            return Err(Error::GridMismatch);
        }
        Ok(Field {
            shape: self.shape,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Field {
        self.map(|v| s * v)
    }

    /// Sup-norm distance between two fields on the same grid.
    pub fn distance(&self, other: &Field) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }
}

/// Dirichlet data: one value per boundary node, in boundary order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryData {
    shape: Shape,
    values: Vec<f64>,
}

impl BoundaryData {
    pub fn constant(grid: &Grid, c: f64) -> BoundaryData {
        BoundaryData {
            shape: grid.shape,
            values: vec![c; grid.boundary_count()],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> BoundaryData {
        let values = grid
            .boundary
            .iter()
            .map(|b| {
                let p = grid.point(b.node);
                f(p[0], p[1])
            })
            .collect();
        BoundaryData {
            shape: grid.shape,
            values,
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<BoundaryData> {
        if values.len() != grid.boundary_count() {
            return Err(Error::GridMismatch);
        }
        Ok(BoundaryData {
            shape: grid.shape,
            values,
        })
    }

    /// Boundary restriction of a field.
    pub fn trace(grid: &Grid, u: &Field) -> Result<BoundaryData> {
        grid.check(u.shape)?;
        Ok(BoundaryData {
            shape: grid.shape,
            values: grid.boundary.iter().map(|b| u.values[b.node]).collect(),
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
    pub fn scale(&self, s: f64) -> BoundaryData {
        BoundaryData {
            shape: self.shape,
            values: self.values.iter().map(|v| s * v).collect(),
        }
    }
    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Sparse rows of `-lap_h + q` on the interior unknowns, plus the columns
/// that couple interior rows to boundary nodes.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    shape: Shape,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
    /// (interior row, boundary slot, coefficient)
    coupling: Vec<(usize, usize, f64)>,
}

/// Assembles `-lap_h + q` with the 5-point stencil.
pub fn assemble_operator(grid: &Grid, q: &Field) -> Result<LinearOperator> {
    grid.check(q.shape)?;
    let n = grid.interior_count();
    let (ax, ay) = (1.0 / (grid.hx * grid.hx), 1.0 / (grid.hy * grid.hy));
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(5 * n);
    let mut vals = Vec::with_capacity(5 * n);
    let mut diag = Vec::with_capacity(n);
    let mut coupling = Vec::new();
    row_ptr.push(0);
    let nx = grid.shape.nx;
    for (row, &node) in grid.interior.iter().enumerate() {
        let neighbours = [
            (node - nx, ay),
            (node - 1, ax),
            (node + 1, ax),
            (node + nx, ay),
        ];
        let d = 2.0 * ax + 2.0 * ay + q.values[node];
        // column order: south, west, centre, east, north
        for (pos, &(nb, c)) in neighbours.iter().enumerate() {
            if pos == 2 {
                cols.push(row);
                vals.push(d);
            }
            match grid.kinds[nb] {
                NodeKind::Interior(col) => {
                    cols.push(col);
                    vals.push(-c);
                }
                NodeKind::Boundary(slot) => coupling.push((row, slot, -c)),
            }
        }
        diag.push(d);
        row_ptr.push(cols.len());
    }
    Ok(LinearOperator {
        shape: grid.shape,
        row_ptr,
        cols,
        vals,
        diag,
        coupling,
    })
}

impl LinearOperator {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Number of stored entries in an interior row.
    pub fn row_nnz(&self, row: usize) -> usize {
        self.row_ptr[row + 1] - self.row_ptr[row]
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        (self.row_ptr[row]..self.row_ptr[row + 1])
            .find(|&k| self.cols[k] == col)
            .map_or(0.0, |k| self.vals[k])
    }

    /// `y = A x` on interior unknowns.
    pub fn apply_interior(&self, x: &[f64], y: &mut [f64]) {
        for (row, out) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            *out = s;
        }
    }

    /// Evaluates `-lap_h u + q u` at every interior node (interior order).
    pub fn apply(&self, grid: &Grid, u: &Field) -> Result<Vec<f64>> {
        grid.check(self.shape)?;
        grid.check(u.shape)?;
        let x = u.interior_values(grid);
        let mut y = vec![0.0; self.dim()];
        self.apply_interior(&x, &mut y);
        for &(row, slot, c) in &self.coupling {
            y[row] += c * u.values[grid.boundary[slot].node];
        }
        Ok(y)
    }

    /// Subtracts the boundary columns times `data` from `rhs`, so that the
    /// interior system reads `A x = rhs - B f`.
    pub fn lift_boundary(&self, data: &BoundaryData, rhs: &mut [f64]) -> Result<()> {
        if data.shape != self.shape {
            return Err(Error::GridMismatch);
        }
        for &(row, slot, c) in &self.coupling {
            rhs[row] -= c * data.values[slot];
        }
        Ok(())
    }

    /// Same operator with `shift` added to the diagonal.
    pub fn shifted(&self, shift: f64) -> LinearOperator {
        let mut out = self.clone();
        for row in 0..out.dim() {
            for k in out.row_ptr[row]..out.row_ptr[row + 1] {
                if out.cols[k] == row {
                    out.vals[k] += shift;
                }
            }
            out.diag[row] += shift;
        }
        out
    }
}

/// Outward face flux: sum over non-corner boundary nodes of
/// `(u_b - u_adjacent) / h * face`.
pub fn discrete_flux(grid: &Grid, u: &Field) -> Result<f64> {
    grid.check(u.shape)?;
    Ok(grid
        .boundary
        .iter()
        .filter(|b| !b.is_corner())
        .map(|b| {
            let (adj, h) = grid.inward(b, 1);
            (u.values[b.node] - u.values[adj]) / h * grid.face_measure(b)
        })
        .sum())
}

/// Face pairing `sum_faces w_b (u_b - u_adj)/h * face`, the boundary term of
/// the discrete Green identities.
pub fn face_pairing(grid: &Grid, u: &Field, w: &Field) -> Result<f64> {
    grid.check(u.shape)?;
    grid.check(w.shape)?;
    Ok(grid
        .boundary
        .iter()
        .filter(|b| !b.is_corner())
        .map(|b| {
            let (adj, h) = grid.inward(b, 1);
            w.values[b.node] * (u.values[b.node] - u.values[adj]) / h * grid.face_measure(b)
        })
        .sum())
}

/// Residual of the discrete divergence theorem, `|flux(u) - sum lap_h u hx hy|`,
/// together with the natural scale `||u||_inf / h^2`.
pub fn divergence_defect(grid: &Grid, u: &Field) -> Result<(f64, f64)> {
    let flux = discrete_flux(grid, u)?;
    let volume = grid.interior_sum(&grid.laplacian(u)?);
    let h = grid.h();
    Ok(((flux - volume).abs(), u.sup_norm() / (h * h)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> Grid {
        Grid::unit_square(n).unwrap()
    }

    #[test]
    fn counts_and_spacing() {
        let g = unit(3);
        assert_eq!(
            (g.node_count(), g.boundary_count(), g.interior_count()),
            (9, 8, 1)
        );
        let g = unit(101);
        assert!((g.hx() - 0.01).abs() < 1e-15 && (g.hy() - 0.01).abs() < 1e-15);
        let g = build_rectangle(4, 3, 1.0, 1.0).unwrap();
        assert_eq!(g.boundary_count(), 10);
        assert_eq!(g.interior_count(), 2);
    }

    #[test]
    fn rejects_small_or_degenerate() {
        assert!(matches!(
            build_rectangle(2, 5, 1.0, 1.0),
            Err(Error::GridTooSmall { .. })
        ));
        assert!(build_rectangle(5, 5, 0.0, 1.0).is_err());
    }

    #[test]
    fn corners_have_two_sides() {
        let g = build_rectangle(5, 4, 2.0, 1.0).unwrap();
        let corners = g.boundary_nodes().iter().filter(|b| b.is_corner()).count();
        assert_eq!(corners, 4);
        let first = g.boundary_nodes()[0];
        assert_eq!(first.sides, [Some(Side::Left), Some(Side::Bottom)]);
    }

    #[test]
    fn stencil_has_four_neighbours_and_row_pattern() {
        let g = build_rectangle(6, 5, 1.0, 0.7).unwrap();
        let op = assemble_operator(&g, &Field::zeros(&g)).unwrap();
        for row in 0..op.dim() {
            assert!(op.row_nnz(row) <= 5);
        }
        let n = op.dim();
        for r in 0..n {
            for c in 0..n {
                assert_eq!(op.entry(r, c), op.entry(c, r));
            }
        }
    }

    #[test]
    fn exact_on_quadratics_anisotropic() {
        let g = build_rectangle(7, 11, 1.3, 0.6).unwrap();
        let op = assemble_operator(&g, &Field::zeros(&g)).unwrap();
        let ones = op.apply(&g, &Field::constant(&g, 1.0)).unwrap();
        assert!(ones.iter().all(|v| v.abs() < 1e-9));
        let lin = op.apply(&g, &Field::from_fn(&g, |x, _| x)).unwrap();
        assert!(lin.iter().all(|v| v.abs() < 1e-9));
        let quad = op
            .apply(&g, &Field::from_fn(&g, |x, y| x * x + y * y))
            .unwrap();
        assert!(quad.iter().all(|v| (v + 4.0).abs() < 1e-9));
        let mixed = op
            .apply(&g, &Field::from_fn(&g, |x, y| 3.0 * x * y - y * y))
            .unwrap();
        assert!(mixed.iter().all(|v| (v - 2.0).abs() < 1e-9));
    }

    #[test]
    fn q_enters_the_diagonal() {
        let g = unit(6);
        let q = Field::from_fn(&g, |x, y| 1.0 + x + y);
        let op = assemble_operator(&g, &q).unwrap();
        let u = Field::constant(&g, 2.0);
        let out = op.apply(&g, &u).unwrap();
        for (k, &node) in g.interior_nodes().iter().enumerate() {
            assert!((out[k] - 2.0 * q.get(node)).abs() < 1e-10);
        }
    }

    #[test]
    fn flux_examples() {
        let g = unit(9);
        assert_eq!(discrete_flux(&g, &Field::constant(&g, 3.0)).unwrap(), 0.0);
        assert!(
            discrete_flux(&g, &Field::from_fn(&g, |x, _| x))
                .unwrap()
                .abs()
                < 1e-13
        );
    }

    #[test]
    fn flux_equals_volume_sum_of_laplacian() {
        let g = build_rectangle(9, 13, 2.0, 1.5).unwrap();
        let u = Field::from_fn(&g, |x, y| (3.0 * x).sin() * y.exp() + x * x * y);
        let (defect, scale) = divergence_defect(&g, &u).unwrap();
        assert!(defect <= 1e-12 * scale, "{defect} vs {scale}");
    }

    #[test]
    fn green_first_identity_is_exact() {
        let g = build_rectangle(8, 10, 1.0, 1.2).unwrap();
        let u = Field::from_fn(&g, |x, y| (x - 0.3).powi(3) + (2.0 * y).cos());
        let lap = g.laplacian(&u).unwrap();
        let inner: f64 = g
            .interior_nodes()
            .iter()
            .zip(&lap)
            .map(|(&k, l)| -u.get(k) * l)
            .sum::<f64>()
            * g.cell_area();
        let lhs = g.dirichlet_energy(&u).unwrap();
        let rhs = inner + face_pairing(&g, &u, &u).unwrap();
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn mismatched_fields_rejected() {
        let g = unit(5);
        let other = unit(6);
        let u = Field::zeros(&other);
        assert!(matches!(discrete_flux(&g, &u), Err(Error::GridMismatch)));
        assert!(assemble_operator(&g, &u).is_err());
    }

    #[test]
    fn quadratures_agree_on_vanishing_boundary() {
        let g = unit(33);
        let u = Field::from_fn(&g, |x, y| {
            (std::f64::consts::PI * x).sin() * (std::f64::consts::PI * y).sin()
        });
        let a = g.integrate_interior(&u).unwrap();
        let b = g.integrate_trapezoid(&u).unwrap();
        assert!((a - b).abs() < 1e-14);
        let exact = 4.0 / std::f64::consts::PI.powi(2);
        assert!((a - exact).abs() < 2e-3);
    }
}
