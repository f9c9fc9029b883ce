//! The eight experiments.

use std::f64::consts::PI;

use dnlab_core::elliptic::{estimate_wellposedness_radius, smallest_eigenvalue};
use dnlab_core::linearize::{
    cascade_solve, check_integral_identities, dn_amplitude_derivative, estimate_envelope, rigidity_probe_t1,
    second_linearization, source_bound_from_energy, trig_boundary_data, AmplitudeOptions,
};
use dnlab_core::nonlinearity::{
    check_monotone, make_truncated_pair_localized, sup_difference, Domain, Nonlinearity, Profile, SpatialExpression,
    ValueRange,
};
use dnlab_core::radial::{
    ball_bound, evaluate_radial, saturation_sweep, solve_radial_bvp, solve_radial_fd, BvpOptions, FdOptions,
};
use dnlab_core::{
    dn_distance, dn_map, solve_linear, solve_semilinear, BoundaryData, Field, Grid, NewtonOptions, TraceNorm,
};
use serde::Serialize;

use super::config::leading_order;
use super::{
    Assertion, CascadeParams, ConvergenceParams, CounterexampleParams, EnvelopeParams, LabError, Outcome,
    Provenance, Resolved, RigidityParams, SaturationParams, ScenarioConfig, ScenarioParams, SecondParams, Table,
    WellposednessParams,
};

pub(crate) fn run(cfg: &ScenarioConfig, params: &ScenarioParams, tol: &Resolved) -> Result<Outcome, LabError> {
    match params {
        ScenarioParams::Saturation(p) => saturation(cfg, p, tol),
        ScenarioParams::Counterexample(p) => counterexample(cfg, p, tol),
        ScenarioParams::RigidityT1(p) => rigidity(cfg, p, tol),
        ScenarioParams::Cascade(p) => cascade(cfg, p, tol),
        ScenarioParams::SecondLinearization(p) => second(cfg, p, tol),
        ScenarioParams::Wellposedness(p) => wellposedness(cfg, p, tol),
        ScenarioParams::Envelope(p) => envelope(cfg, p, tol),
        ScenarioParams::Convergence(p) => convergence(cfg, p, tol),
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::INFINITY, f64::min)
}

fn describe(f: &Profile) -> String {
    let terms: Vec<String> = f.terms.iter().map(|t| format!("{}*v^{}", t.coefficient, t.power)).collect();
    terms.join("+")
}

fn with_profile(f: &Profile) -> Nonlinearity {
    Nonlinearity::SeparatedAnalytic { q: SpatialExpression::constant(1.0), profile: f.clone() }
}

#[derive(Serialize)]
struct CrossRow {
    profile: String,
    lambda: f64,
    dimension: u32,
    center: f64,
    max_error: f64,
    extrapolation_correction: f64,
}

#[derive(Serialize)]
struct RectangleRow {
    lambda: f64,
    center_value: f64,
    inscribed_radius: f64,
    ball_bound: f64,
}

fn saturation(cfg: &ScenarioConfig, p: &SaturationParams, tol: &Resolved) -> Result<Outcome, LabError> {
    let mut out = Outcome::default();
    let rep = saturation_sweep(&p.profile, p.delta, p.epsilon, p.dimension, &p.lambdas)?;
    let bound = rep.constants.bound();
    out.assertions.push(Assertion::holds("center-nondecreasing", rep.nondecreasing, Provenance::Property));
    out.assertions.push(Assertion::at_most("center-cauchy-gap", rep.cauchy_gap, tol.cauchy, Provenance::Oracle));
    out.assertions.push(Assertion::at_most(
        "center-below-bound",
        max_of(rep.rows.iter().map(|r| r.center)),
        bound + tol.bound_slack,
        Provenance::Oracle,
    ));
    out.assertions.push(Assertion::holds("growth-hypothesis", rep.growth.passed, Provenance::Property));
    out.assertions.push(Assertion::at_most(
        "energy-inequality",
        max_of(rep.rows.iter().map(|r| r.energy_violation)),
        1e-6,
        Provenance::Property,
    ));
    out.metric("constants", rep.constants);
    out.metric("bound", bound);
    out.tables.push(Table::from_rows("sweep", &rep.rows)?);

    let mut cross = Vec::new();
    for f in &p.cross_profiles {
        for &lambda in &p.cross_lambdas {
            for &n in &p.cross_dimensions {
                let b = solve_radial_bvp(f, lambda, n, 1.0, BvpOptions::default())?;
                let fd = solve_radial_fd(f, lambda, n, 1.0, FdOptions::default())?;
                let (v, _) = evaluate_radial(f, n, b.center, &fd.r, 1e-13)?;
                let max_error = max_of(v.iter().zip(&fd.v).map(|(a, b)| (a - b).abs()));
                cross.push(CrossRow {
                    profile: describe(f),
                    lambda,
                    dimension: n,
                    center: b.center,
                    max_error,
                    extrapolation_correction: fd.correction,
                });
            }
        }
    }
    if !cross.is_empty() {
        out.assertions.push(Assertion::at_most(
            "radial-cross-check",
            max_of(cross.iter().map(|r| r.max_error)),
            tol.radial_agreement,
            Provenance::Oracle,
        ));
    }
    out.tables.push(Table::from_rows("radial_cross_check", &cross)?);

    // the rectangle solution under constant data against the inscribed-ball bound
    let grid = cfg.grid.build()?;
    let center = grid.nearest_interior([grid.lx() / 2.0, grid.ly() / 2.0]);
    let radius = grid.distance_to_boundary(grid.point(center));
    let ball = ball_bound(p.delta, p.epsilon, 2, radius)?.bound();
    let a = with_profile(&p.profile);
    let mut rect = Vec::new();
    for &lambda in &p.rectangle_lambdas {
        let (u, _) = solve_semilinear(&grid, &a, &BoundaryData::constant(&grid, lambda), &NewtonOptions::default())?;
        rect.push(RectangleRow { lambda, center_value: u.get(center), inscribed_radius: radius, ball_bound: ball });
    }
    if !rect.is_empty() {
        out.assertions.push(Assertion::at_most(
            "rectangle-below-ball-bound",
            max_of(rect.iter().map(|r| r.center_value)),
            ball + tol.bound_slack,
            Provenance::Oracle,
        ));
    }
    out.tables.push(Table::from_rows("rectangle", &rect)?);
    Ok(out)
}

#[derive(Serialize)]
struct CounterRow {
    kind: &'static str,
    index: u64,
    amplitude: f64,
    dn_distance: f64,
    two_grid_estimate: f64,
    support_max: f64,
}

fn counterexample(cfg: &ScenarioConfig, p: &CounterexampleParams, tol: &Resolved) -> Result<Outcome, LabError> {
    let mut out = Outcome::default();
    let fine = cfg.grid.build()?;
    let coarse = cfg.grid.coarsened(1)?;
    let threshold = 2.0 * ball_bound(p.delta, p.epsilon, 2, p.depth)?.bound();
    let support = SpatialExpression::BoxCutoff {
        lower: [p.depth, p.depth],
        upper: [fine.lx() - p.depth, fine.ly() - p.depth],
        ramp: p.box_ramp,
    };
    let (a1, a2) = make_truncated_pair_localized(&p.base, support.clone(), threshold, p.amplitude, p.width)?;
    let box_range = ValueRange::symmetric(threshold + p.width + 1.0);
    let difference = sup_difference(&a1, &a2, Domain::of(&fine), box_range, 101);
    let cutoff = support.sample(&fine);
    let support_nodes: Vec<usize> = fine.interior_nodes().iter().copied().filter(|&k| cutoff.get(k) > 0.0).collect();

    let mut data: Vec<(&'static str, u64, f64)> = Vec::new();
    for &amp in &p.amplitudes {
        data.push(("constant", 0, amp));
        data.push(("constant", 1, -amp));
    }
    for r in 0..p.random_count {
        data.push(("trig", r as u64, p.amplitudes[r % p.amplitudes.len()]));
    }
    let opts = NewtonOptions::default();
    let mut rows = Vec::new();
    for &(kind, index, amplitude) in &data {
        let make = |g: &Grid| -> Result<BoundaryData, LabError> {
            Ok(match kind {
                "constant" => BoundaryData::constant(g, amplitude),
                _ => trig_boundary_data(g, cfg.seed, index, amplitude)?,
            })
        };
        let f = make(&fine)?;
        let (u1, _) = solve_semilinear(&fine, &a1, &f, &opts)?;
        let (u2, _) = solve_semilinear(&fine, &a2, &f, &opts)?;
        let t1 = dn_map(&fine, &u1)?;
        let d = dn_distance(&t1, &dn_map(&fine, &u2)?, TraceNorm::Sup)?;
        let (c1, _) = solve_semilinear(&coarse, &a1, &make(&coarse)?, &opts)?;
        let est = dn_distance(&dn_map(&coarse, &c1)?, &t1.restrict(&fine, &coarse)?, TraceNorm::Sup)?;
        let support_max = max_of(support_nodes.iter().map(|&k| u1.get(k).abs().max(u2.get(k).abs())));
        rows.push(CounterRow {
            kind,
            index,
            amplitude: amplitude.abs(),
            dn_distance: d,
            two_grid_estimate: est,
            support_max,
        });
    }
    let max_distance = max_of(rows.iter().map(|r| r.dn_distance));
    let min_estimate = min_of(rows.iter().map(|r| r.two_grid_estimate));
    out.assertions.push(Assertion::at_most(
        "dn-distance-within-discretization",
        max_distance,
        tol.distance_factor * min_estimate,
        Provenance::TwoGrid,
    ));
    out.assertions.push(Assertion::at_least(
        "nonlinearities-differ",
        difference,
        tol.difference_floor * p.amplitude,
        Provenance::ClosedForm,
    ));
    out.assertions.push(Assertion::at_most(
        "support-values-below-threshold",
        max_of(rows.iter().map(|r| r.support_max)),
        threshold,
        Provenance::Property,
    ));
    out.metric("threshold", threshold);
    out.metric("max_dn_distance", max_distance);
    out.metric("min_two_grid_estimate", min_estimate);
    out.metric("sup_difference", difference);
    out.metric("value_box", box_range.hi);
    out.tables.push(Table::from_rows("counterexample", &rows)?);
    Ok(out)
}

#[derive(Serialize)]
struct RigidityRow {
    case: &'static str,
    mu: f64,
    flux_y: f64,
    volume_integral: f64,
    flux_mismatch: f64,
    identity_residual: f64,
    sup_a: f64,
    sign_constant: bool,
    y_spread: f64,
    min_v: f64,
}

fn rigidity(cfg: &ScenarioConfig, p: &RigidityParams, tol: &Resolved) -> Result<Outcome, LabError> {
    let mut out = Outcome::default();
    let grid = cfg.grid.build()?;
    let f = p.data.build(&grid, cfg.seed)?;
    let linear = rigidity_probe_t1(&grid, &Nonlinearity::zero(), &f, &p.mus, tol.vanish)?;
    let nonlinear = rigidity_probe_t1(&grid, &p.nonlinearity, &f, &p.mus, tol.vanish)?;
    let reach = max_of(p.mus.iter().map(|m| m.abs()));
    out.assertions.push(Assertion::at_most(
        "linear-flux-mismatch-vanishes",
        max_of(linear.records.iter().map(|r| r.flux_mismatch.abs())),
        tol.vanish,
        Provenance::ClosedForm,
    ));
    out.assertions.push(Assertion::at_most(
        "linear-a-vanishes",
        max_of(linear.records.iter().map(|r| r.sup_a)),
        tol.vanish,
        Provenance::ClosedForm,
    ));
    out.assertions.push(Assertion::at_most(
        "linear-offset-constant",
        max_of(linear.records.iter().map(|r| r.y_spread)),
        tol.vanish,
        Provenance::ClosedForm,
    ));
    out.assertions.push(Assertion::holds("linear-recovers-sweep", linear.mu1 == reach, Provenance::ClosedForm));
    let probe = nonlinear
        .records
        .iter()
        .filter(|r| r.mu > 0.0)
        .min_by(|a, b| (a.mu - 1.0).abs().total_cmp(&(b.mu - 1.0).abs()));
    if let Some(r) = probe {
        out.assertions.push(Assertion::at_least(
            format!("nonlinear-flux-positive-at-{}", r.mu),
            r.flux_mismatch,
            f64::MIN_POSITIVE,
            Provenance::Property,
        ));
    }
    out.assertions.push(Assertion::holds(
        "sign-constancy",
        nonlinear.records.iter().all(|r| r.sign_constant),
        Provenance::Property,
    ));
    out.assertions.push(Assertion::at_most(
        "flux-identity",
        max_of(
            linear.records.iter().chain(&nonlinear.records).map(|r| r.identity_residual / r.identity_scale.max(1.0)),
        ),
        tol.divergence,
        Provenance::ExactIdentity,
    ));
    out.metric("c", nonlinear.c);
    out.metric("linear_recovered_range", linear.recovered_range);
    out.metric("recovered_range", nonlinear.recovered_range);
    let rows: Vec<RigidityRow> = [("linear", &linear), ("nonlinear", &nonlinear)]
        .iter()
        .flat_map(|(case, rep)| {
            rep.records.iter().map(move |r| RigidityRow {
                case,
                mu: r.mu,
                flux_y: r.flux_y,
                volume_integral: r.volume_integral,
                flux_mismatch: r.flux_mismatch,
                identity_residual: r.identity_residual,
                sup_a: r.sup_a,
                sign_constant: r.sign_constant,
                y_spread: r.y_spread,
                min_v: r.min_v,
            })
        })
        .collect();
    out.tables.push(Table::from_rows("rigidity", &rows)?);
    Ok(out)
}

#[derive(Serialize)]
struct CascadeLevel {
    n: usize,
    h: f64,
    step: f64,
    trace_error: f64,
    leading_flux: f64,
    source_integral: f64,
    relative_flux_residual: f64,
    gradient_energy: f64,
    max_source: f64,
    source_bound: f64,
}

#[derive(Serialize)]
struct CascadeTraceRow {
    x: f64,
    y: f64,
    cascade: f64,
    amplitude_derivative: f64,
}

fn cascade(cfg: &ScenarioConfig, p: &CascadeParams, tol: &Resolved) -> Result<Outcome, LabError> {
    let mut out = Outcome::default();
    let m = leading_order(&p.profile).ok_or_else(|| LabError::Config("profile has no leading order".into()))?;
    let derivs: Vec<f64> = (0..=2 * m - 1).map(|k| p.profile.derivative_at_zero(k)).collect();
    let a = Nonlinearity::SeparatedAnalytic { q: p.q.clone(), profile: p.profile.clone() };
    let mut levels = Vec::new();
    let mut trace_rows = Vec::new();
    let mut worst_flux: f64 = 0.0;
    for (grid, step) in [(cfg.grid.coarsened(1)?, p.step), (cfg.grid.build()?, p.step / 2.0)] {
        let q = p.q.sample(&grid);
        let sol = cascade_solve(&grid, &q, &derivs, m as usize)?;
        let rep = check_integral_identities(&grid, &sol)?;
        let ct = dn_map(&grid, sol.leading_field())?;
        let fd = dn_amplitude_derivative(&grid, &a, m as usize, step, &AmplitudeOptions::default())?;
        let lead = &rep.fluxes[0];
        let scale = lead.source_integral.abs().max(f64::MIN_POSITIVE);
        for c in rep.fluxes.iter().chain([&rep.w_flux]) {
            worst_flux = worst_flux.max(c.residual / c.source_integral.abs().max(scale));
        }
        let max_source = max_of(grid.interior_nodes().iter().map(|&k| sol.sources[0].get(k).abs()));
        levels.push(CascadeLevel {
            n: grid.nx(),
            h: grid.h(),
            step,
            trace_error: dn_distance(&ct, &fd, TraceNorm::Sup)?,
            leading_flux: lead.flux,
            source_integral: lead.source_integral,
            relative_flux_residual: lead.residual / scale,
            gradient_energy: rep.gradient_energy,
            max_source,
            source_bound: source_bound_from_energy(&grid, rep.gradient_energy),
        });
        trace_rows = ct
            .rows(&grid)?
            .into_iter()
            .zip(fd.values())
            .map(|(r, &d)| CascadeTraceRow { x: r.x, y: r.y, cascade: r.dn, amplitude_derivative: d })
            .collect();
    }
    let (c, f) = (&levels[0], &levels[1]);
    let fitted = c.trace_error / (c.step * c.step + c.h * c.h);
    out.assertions.push(Assertion::at_most(
        "amplitude-derivative-matches-cascade",
        f.trace_error,
        tol.constant_growth * fitted * (f.step * f.step + f.h * f.h),
        Provenance::TwoGrid,
    ));
    out.assertions.push(Assertion::at_most(
        "leading-flux-identity",
        max_of(levels.iter().map(|l| l.relative_flux_residual)),
        tol.flux_relative,
        Provenance::ExactIdentity,
    ));
    out.assertions.push(Assertion::at_most("cascade-flux-identities", worst_flux, tol.flux_relative, Provenance::ExactIdentity));
    out.assertions.push(Assertion::holds(
        "source-bounded-by-gradient-energy",
        levels.iter().all(|l| l.max_source <= l.source_bound * (1.0 + 1e-12)),
        Provenance::Property,
    ));

    // a mean-zero coefficient: vanishing integral and a correspondingly small flux
    let grid = cfg.grid.build()?;
    let qz = p.mean_zero_q.sample(&grid);
    let solz = cascade_solve(&grid, &qz, &derivs, m as usize)?;
    let repz = check_integral_identities(&grid, &solz)?;
    let qmax = qz.sup_norm() * grid.lx() * grid.ly();
    out.assertions.push(Assertion::at_most(
        "mean-zero-integral",
        repz.leading_integral_trapezoid.abs(),
        1e-12 * qmax.max(1.0),
        Provenance::ClosedForm,
    ));
    out.assertions.push(Assertion::at_most(
        "mean-zero-flux",
        repz.fluxes[0].flux.abs(),
        1e-10 * qmax.max(1.0),
        Provenance::ClosedForm,
    ));
    out.metric("order", m);
    out.metric("fitted_constant", fitted);
    out.metric("bump_integral", f.source_integral);
    out.metric("mean_zero_leading_moment", repz.leading_moment);
    out.tables.push(Table::from_rows("cascade_levels", &levels)?);
    out.tables.push(Table::from_rows("cascade_trace", &trace_rows)?);
    Ok(out)
}

#[derive(Serialize)]
struct SecondRow {
    data: &'static str,
    n: usize,
    h: f64,
    volume_interior: f64,
    volume_trapezoid: f64,
    face_pairing: f64,
    dn_pairing: f64,
    quadrature_gap: f64,
    gap_over_h2: f64,
    gap_over_h2_log: f64,
}

fn second(cfg: &ScenarioConfig, p: &SecondParams, tol: &Resolved) -> Result<Outcome, LabError> {
    let mut out = Outcome::default();
    let grids = [cfg.grid.coarsened(2)?, cfg.grid.coarsened(1)?, cfg.grid.build()?];
    let mut rows = Vec::new();
    let mut exact: f64 = 0.0;
    for (label, constant) in [("configured", false), ("constant", true)] {
        for g in &grids {
            let (h1, h2, h3) = if constant {
                let one = BoundaryData::constant(g, 1.0);
                (one.clone(), one, None)
            } else {
                (
                    p.h1.build(g, cfg.seed)?,
                    p.h2.build(g, cfg.seed)?,
                    p.h3.as_ref().map(|d| d.build(g, cfg.seed)).transpose()?,
                )
            };
            let (_, rep) = second_linearization(g, &p.nonlinearity, &h1, &h2, h3.as_ref(), p.t)?;
            exact = exact.max(rep.exact_residual / rep.volume_integral.abs().max(f64::MIN_POSITIVE));
            let h = g.h();
            rows.push(SecondRow {
                data: label,
                n: g.nx(),
                h,
                volume_interior: rep.volume_integral,
                volume_trapezoid: rep.volume_trapezoid,
                face_pairing: rep.face_pairing,
                dn_pairing: rep.dn_pairing,
                quadrature_gap: rep.quadrature_gap,
                gap_over_h2: rep.quadrature_gap / (h * h),
                gap_over_h2_log: rep.quadrature_gap / (h * h * (1.0 / h).ln()),
            });
        }
    }
    let configured: Vec<&SecondRow> = rows.iter().filter(|r| r.data == "configured").collect();
    let growth = max_of(configured.windows(2).map(|w| w[1].gap_over_h2 / w[0].gap_over_h2));
    out.assertions.push(Assertion::at_most("pairing-within-c-h2", growth, tol.constant_growth, Provenance::TwoGrid));
    out.assertions.push(Assertion::at_most("exact-discrete-pairing", exact, tol.divergence, Provenance::ExactIdentity));
    let fine = &grids[2];
    let (h1, h2) = (p.h1.build(fine, cfg.seed)?, p.h2.build(fine, cfg.seed)?);
    let (_, lin) = second_linearization(fine, &p.linear, &h1, &h2, None, p.t)?;
    out.assertions.push(Assertion::at_most(
        "linear-second-response-vanishes",
        lin.response_sup,
        tol.linear_response,
        Provenance::ClosedForm,
    ));
    out.metric("fitted_constant", configured.last().map(|r| r.gap_over_h2));
    out.metric("constant_growth", growth);
    out.tables.push(Table::from_rows("second_linearization", &rows)?);
    Ok(out)
}

#[derive(Serialize)]
struct RatioRow {
    t: f64,
    data_sup: f64,
    solution_sup: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct RadiusRow {
    t: f64,
    converged: bool,
    newton_iterations: usize,
    smallest_eigenvalue: Option<f64>,
    solution_sup: f64,
}

fn wellposedness(cfg: &ScenarioConfig, p: &WellposednessParams, tol: &Resolved) -> Result<Outcome, LabError> {
    let mut out = Outcome::default();
    let grid = cfg.grid.build()?;
    let f0 = p.data.build(&grid, cfg.seed)?;
    let mut ratios = Vec::new();
    for &t in &p.ts {
        let f = f0.scale(t);
        let (u, _) = solve_semilinear(&grid, &p.nonlinearity, &f, &NewtonOptions::default())?;
        ratios.push(RatioRow { t, data_sup: f.sup_norm(), solution_sup: u.sup_norm(), ratio: u.sup_norm() / f.sup_norm() });
    }
    let (lo, hi) = (min_of(ratios.iter().map(|r| r.ratio)), max_of(ratios.iter().map(|r| r.ratio)));
    out.assertions.push(Assertion::at_most("lipschitz-ratio-spread", hi / lo - 1.0, tol.ratio_spread, Provenance::Property));
    let rep = estimate_wellposedness_radius(&grid, &p.nonlinearity, &f0, p.tmax, p.steps)?;
    let monotone = check_monotone(
        &p.nonlinearity,
        Domain::of(&grid),
        ValueRange::symmetric(p.tmax * f0.sup_norm()),
        21,
    )
    .passed;
    if monotone {
        out.assertions.push(Assertion::holds("monotone-reaches-tmax", rep.reached_tmax, Provenance::Property));
    }
    out.metric("radius", rep.radius);
    out.metric("reached_tmax", rep.reached_tmax);
    out.metric("monotone", monotone);
    out.tables.push(Table::from_rows("lipschitz_ratios", &ratios)?);
    let steps: Vec<RadiusRow> = rep
        .steps
        .iter()
        .map(|s| RadiusRow {
            t: s.t,
            converged: s.converged,
            newton_iterations: s.newton_iterations,
            smallest_eigenvalue: s.smallest_eigenvalue,
            solution_sup: s.solution_sup,
        })
        .collect();
    out.tables.push(Table::from_rows("radius", &steps)?);
    Ok(out)
}

fn envelope(cfg: &ScenarioConfig, p: &EnvelopeParams, _tol: &Resolved) -> Result<Outcome, LabError> {
    let mut out = Outcome::default();
    let grid = cfg.grid.build()?;
    let rep = estimate_envelope(&grid, &p.nonlinearity, p.point, &p.lambdas, p.random_count, cfg.seed)?;
    out.assertions.push(Assertion::holds("random-within-constant-envelope", rep.consistent, Provenance::Property));
    if p.lambdas.len() > 1 {
        let k = p.lambdas.len() - 1;
        let prefix = estimate_envelope(&grid, &p.nonlinearity, p.point, &p.lambdas[..k], p.random_count, cfg.seed)?;
        out.assertions.push(Assertion::holds(
            "envelope-widens-with-sweep",
            rep.upper >= prefix.upper && rep.lower <= prefix.lower,
            Provenance::Property,
        ));
    }
    let bound = ball_bound(p.delta, p.epsilon, 2, rep.inscribed_radius)?.bound();
    out.assertions.push(Assertion::at_most(
        "envelope-within-ball-bound",
        rep.upper.abs().max(rep.lower.abs()),
        bound,
        Provenance::Oracle,
    ));
    out.metric("lower", rep.lower);
    out.metric("upper", rep.upper);
    out.metric("node", rep.x);
    out.metric("inscribed_radius", rep.inscribed_radius);
    out.metric("ball_bound", bound);
    out.tables.push(Table::from_rows("envelope", &rep.rows)?);
    Ok(out)
}

#[derive(Serialize)]
struct ConvergenceRow {
    n: usize,
    h: f64,
    sup_error: f64,
}

#[derive(Serialize)]
struct EigenRow {
    shift: f64,
    eigenvalue: f64,
    expected: f64,
}

fn convergence(cfg: &ScenarioConfig, p: &ConvergenceParams, tol: &Resolved) -> Result<Outcome, LabError> {
    let mut out = Outcome::default();
    let mut levels = Vec::new();
    for grid in [cfg.grid.coarsened(1)?, cfg.grid.build()?] {
        let (kx, ky) = (PI / grid.lx(), PI / grid.ly());
        let exact = Field::from_fn(&grid, |x, y| (kx * x).sin() * (ky * y).sin());
        let rhs = exact.scale(kx * kx + ky * ky + p.q);
        let u = solve_linear(&grid, &Field::constant(&grid, p.q), &BoundaryData::constant(&grid, 0.0), &rhs)?;
        levels.push(ConvergenceRow { n: grid.nx(), h: grid.h(), sup_error: u.distance(&exact)? });
    }
    let order = (levels[0].sup_error / levels[1].sup_error).log2();
    out.assertions.push(Assertion::at_least("manufactured-order", order, tol.order, Provenance::ClosedForm));

    let grid = cfg.grid.build()?;
    let exact = PI * PI * (1.0 / (grid.lx() * grid.lx()) + 1.0 / (grid.ly() * grid.ly()));
    let base = smallest_eigenvalue(&grid, &Field::zeros(&grid))?;
    let mut eig = vec![EigenRow { shift: 0.0, eigenvalue: base, expected: exact }];
    for &c in &p.shifts {
        let lam = smallest_eigenvalue(&grid, &Field::constant(&grid, c))?;
        eig.push(EigenRow { shift: c, eigenvalue: lam, expected: base + c });
    }
    out.assertions.push(Assertion::at_most(
        "eigenvalue-relative-error",
        (base - exact).abs() / exact,
        tol.eigen_relative,
        Provenance::ClosedForm,
    ));
    if eig.len() > 1 {
        out.assertions.push(Assertion::at_most(
            "eigenvalue-shift",
            max_of(eig[1..].iter().map(|r| (r.eigenvalue - r.expected).abs())),
            tol.eigen_shift,
            Provenance::ExactIdentity,
        ));
    }
    out.metric("order", order);
    out.metric("eigenvalue", base);
    out.tables.push(Table::from_rows("convergence", &levels)?);
    out.tables.push(Table::from_rows("eigenvalues", &eig)?);
    Ok(out)
}
