//! Linearization of the DN map in the amplitude of the boundary data:
//! cascade problems, their integral identities, finite differences in the
//! amplitude, the second linearization, and probes built on them.

mod amplitude;
mod cascade;
mod envelope;
mod rigidity;
mod second;

pub use amplitude::{central_weights, dn_amplitude_derivative, AmplitudeOptions};
pub use cascade::{
    cascade_solve, cascade_solve_even, check_integral_identities, source_bound_from_energy, CascadeSolution, FluxCheck,
    IdentityReport, Parity,
};
pub use envelope::{estimate_envelope, EnvelopeReport, EnvelopeRow};
pub use rigidity::{rigidity_probe_t1, RigidityRecord, RigidityReport};
pub use second::{second_linearization, SecondOrderReport};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Grid};

/// Highest frequency in [`trig_boundary_data`].
pub const TRIG_DEGREE: u32 = 4;

/// Reference lattice, per side, on which [`trig_boundary_data`] is normalized.
const TRIG_NORM_SAMPLES: usize = 4096;

/// Restriction to the boundary of a random trigonometric polynomial
/// `sum_{j,k <= 4} (a_jk cos + b_jk sin)(pi (j x / lx + k y / ly))`, scaled so its
/// sup over the rectangle boundary equals `amplitude`. The scaling is taken on
/// a fixed reference lattice, so the same `(seed, index)` gives the same
/// function on every grid.
pub fn trig_boundary_data(grid: &Grid, seed: u64, index: u64, amplitude: f64) -> Result<BoundaryData> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let d = TRIG_DEGREE as usize + 1;
    let coeffs: Vec<(f64, f64)> = (0..d * d).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let (lx, ly) = (grid.lx(), grid.ly());
    let poly = |x: f64, y: f64| {
        let mut s = 0.0;
        for j in 0..d {
            for k in 0..d {
                let phase = std::f64::consts::PI * (j as f64 * x / lx + k as f64 * y / ly);
                let (a, b) = coeffs[j * d + k];
                s += a * phase.cos() + b * phase.sin();
            }
        }
        s
    };
    let mut norm: f64 = 0.0;
    for k in 0..=TRIG_NORM_SAMPLES {
        let t = k as f64 / TRIG_NORM_SAMPLES as f64;
        for v in [poly(t * lx, 0.0), poly(t * lx, ly), poly(0.0, t * ly), poly(lx, t * ly)] {
            norm = norm.max(v.abs());
        }
    }
    if !(norm > 0.0) {
        return Err(Error::InvalidParameter("degenerate random boundary data".into()));
    }
    let s = amplitude / norm;
    Ok(BoundaryData::from_fn(grid, |x, y| s * poly(x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_data_is_reproducible_and_normalized() {
        let g = Grid::unit_square(17).unwrap();
        let a = trig_boundary_data(&g, 7, 3, 10.0).unwrap();
        let b = trig_boundary_data(&g, 7, 3, 10.0).unwrap();
        let c = trig_boundary_data(&g, 7, 4, 10.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.sup_norm() <= 10.0 && a.sup_norm() > 9.0);
        let fine = Grid::unit_square(65).unwrap();
        let f = trig_boundary_data(&fine, 7, 3, 10.0).unwrap();
        // node (i, j) of the coarse grid is node (4i, 4j) of the fine one
        let b = &g.boundary_nodes()[5];
        let slot = fine.boundary_slot(fine.index(4 * b.i, 4 * b.j)).unwrap();
        assert_eq!(a.values()[5], f.values()[slot]);
    }
}
