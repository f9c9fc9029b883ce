use dnlab_core::elliptic::harmonic_extension;
use dnlab_core::linearize::trig_boundary_data;
use dnlab_core::{dn_distance, dn_map, DNTrace, Grid, TraceNorm};
use proptest::prelude::*;

fn trace(g: &Grid, seed: u64, amp: f64) -> DNTrace {
    let f = trig_boundary_data(g, seed, 0, amp).unwrap();
    dn_map(g, &harmonic_extension(g, &f).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dn_distance_is_a_metric(s1 in 0u64..500, s2 in 0u64..500, s3 in 0u64..500, amp in 0.5f64..5.0, l2 in any::<bool>()) {
        let g = Grid::unit_square(17).unwrap();
        let norm = if l2 { TraceNorm::L2 } else { TraceNorm::Sup };
        let (a, b, c) = (trace(&g, s1, amp), trace(&g, s2, amp), trace(&g, s3, 1.0));
        let d = |x: &DNTrace, y: &DNTrace| dn_distance(x, y, norm).unwrap();
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert!(d(&a, &b) >= 0.0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
    }
}

#[test]
fn mismatched_grids_are_rejected() {
    let (g1, g2) = (Grid::unit_square(9).unwrap(), Grid::unit_square(17).unwrap());
    assert!(dn_distance(&trace(&g1, 1, 1.0), &trace(&g2, 1, 1.0), TraceNorm::Sup).is_err());
}
