use dnlab_core::elliptic::{solve_semilinear, NewtonOptions};
use dnlab_core::linearize::trig_boundary_data;
use dnlab_core::nonlinearity::{make_truncated_pair_localized, sup_difference, Domain, Nonlinearity, SpatialExpression, ValueRange};
use dnlab_core::radial::ball_bound;
use dnlab_core::{dn_distance, dn_map, BoundaryData, Grid, TraceNorm};

fn pair() -> (Nonlinearity, Nonlinearity, f64) {
    let threshold = 2.0 * ball_bound(1.0, 2.0, 2, 0.25).unwrap().bound();
    let support = SpatialExpression::BoxCutoff { lower: [0.25, 0.25], upper: [0.75, 0.75], ramp: 0.1 };
    let (a1, a2) = make_truncated_pair_localized(&Nonlinearity::cubic(), support, threshold, 1.0, 1.0).unwrap();
    (a1, a2, threshold)
}

#[test]
fn truncated_pair_has_matching_dn_maps() {
    let (a1, a2, threshold) = pair();
    assert!((threshold - 2.0 * 512f64.sqrt()).abs() < 1e-9);
    let diff = sup_difference(&a1, &a2, Domain::unit(), ValueRange::symmetric(threshold + 2.0), 101);
    assert!(diff >= 0.99, "{diff}");
    let g = Grid::unit_square(33).unwrap();
    let opts = NewtonOptions::default();
    for (i, amp) in [1.0, 10.0, 100.0, 1000.0].into_iter().enumerate() {
        let f = if i == 0 { BoundaryData::constant(&g, 1e3) } else { trig_boundary_data(&g, 17, i as u64, amp).unwrap() };
        let (u1, _) = solve_semilinear(&g, &a1, &f, &opts).unwrap();
        let (u2, _) = solve_semilinear(&g, &a2, &f, &opts).unwrap();
        let d = dn_distance(&dn_map(&g, &u1).unwrap(), &dn_map(&g, &u2).unwrap(), TraceNorm::Sup).unwrap();
        assert!(d <= 1e-8 * (1.0 + amp), "amp {amp}: {d}");
    }
}
