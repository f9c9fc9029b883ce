//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let x = h * XGK[k];
        let pair = f(c - x) + f(c + x);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    }
}

/// Integrates `f` over `[a, b]` until the summed error estimate drops below
/// `max(abs_tol, rel_tol * |I|)`, bisecting the worst interval each round.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    const MAX_INTERVALS: usize = 4000;
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b);
    let (mut value, mut error) = (first.value, first.error);
    heap.push(first);
    while error > abs_tol.max(rel_tol * value.abs()) {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature {
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature {
                estimate: value,
                error,
            });
        }
        let (l, r) = (gk15(&f, worst.a, mid), gk15(&f, mid, worst.b));
        value += l.value + r.value - worst.value;
        error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
    }
    // re-sum to shed the running-update rounding
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult {
        value,
        error,
        intervals: heap.len(),
    })
}

/// Integrates over `[a, inf)` through the map `x = a + t / (1 - t)`.
pub fn integrate_to_infinity(
    f: impl Fn(f64) -> f64,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        let v = f(a + t / s) / (s * s);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, abs_tol, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x.powi(7) - 3.0 * x * x + 1.0, -1.0, 2.0, 1e-14, 1e-14).unwrap();
        let exact = (256.0 - 1.0) / 8.0 - (8.0 + 1.0) + 3.0;
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 x^(-1/2) = 2
        let r = integrate(
            |x| if x > 0.0 { 1.0 / x.sqrt() } else { 0.0 },
            0.0,
            1.0,
            1e-10,
            1e-10,
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn semi_infinite() {
        let r = integrate_to_infinity(|x| (-x).exp(), 0.0, 1e-12, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
        let r = integrate_to_infinity(|x| 1.0 / (1.0 + x * x), 0.0, 1e-12, 1e-12).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn reports_failure() {
        let r = integrate(|x| (1.0 / x).sin() / x, 1e-12, 1.0, 1e-15, 1e-15);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
