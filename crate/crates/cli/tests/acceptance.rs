//! Acceptance suite: every criterion at its stated tolerance, one line each.

use std::process::ExitCode;
use std::time::Instant;

use dnlab::lab::{run_scenario, ScenarioConfig, Summary};
use serde_json::json;

const GRID: usize = 129;

struct Criterion {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn run(config: serde_json::Value) -> Summary {
    let cfg: ScenarioConfig = serde_json::from_value(config).expect("config parses");
    let valid = cfg.validate().expect("config validates");
    run_scenario(&valid).expect("scenario runs").summary
}

/// Checks the named assertions of a summary.
fn criterion(id: u32, title: &'static str, s: &Summary, names: &[&str]) -> Criterion {
    let mut passed = true;
    let mut parts = Vec::new();
    for &n in names {
        match s.assertion(n) {
            Some(a) => {
                passed &= a.passed;
                parts.push(format!("{n} {:.3e} vs {:.3e}", a.measured, a.bound));
            }
            None => {
                passed = false;
                parts.push(format!("{n} missing"));
            }
        }
    }
    Criterion { id, title, passed, detail: parts.join("; ") }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let grid = json!({ "n": GRID });
    let mut results = Vec::new();
    let mut audits = Vec::new();

    let conv = run(json!({
        "scenario": "convergence", "grid": grid,
        "params": { "q": 1.0, "shifts": [1.0, 10.0] },
        "tolerances": { "order": 1.9, "eigen_relative": 0.01, "eigen_shift": 1e-8 }
    }));
    results.push(criterion(1, "manufactured solution order >= 1.9 (h = 1/64 -> 1/128)", &conv, &["manufactured-order"]));
    results.push(criterion(
        5,
        "eigenvalue within 1% of 2 pi^2, constant shift exact to 1e-8",
        &conv,
        &["eigenvalue-relative-error", "eigenvalue-shift"],
    ));
    audits.push(conv);

    let sat = run(json!({
        "scenario": "saturation", "grid": grid,
        "params": {
            "profile": { "terms": [{ "power": 3, "coefficient": 1.0 }] },
            "delta": 1.0, "epsilon": 2.0, "dimension": 2,
            "lambdas": [1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6],
            "cross_profiles": [
                { "terms": [{ "power": 1, "coefficient": 1.0 }] },
                { "terms": [{ "power": 3, "coefficient": 1.0 }] }
            ],
            "cross_lambdas": [1.0, 1e3],
            "cross_dimensions": [2]
        },
        "tolerances": { "cauchy": 1e-3, "bound_slack": 1e-6, "radial_agreement": 1e-6 }
    }));
    let mut c3 = criterion(
        3,
        "saturation: v(0) nondecreasing, |v(0;1e5) - v(0;1e6)| <= 1e-3, v(0) <= max(mu0, C0) + 1e-6",
        &sat,
        &["center-nondecreasing", "center-cauchy-gap", "center-below-bound"],
    );
    let constants = &sat.metrics["constants"];
    let mu0 = constants["mu0"].as_f64().unwrap_or(f64::NAN);
    let tail = constants["tail_integral"].as_f64().unwrap_or(f64::NAN);
    // I(2) = B(1/4, 1/2) / 4
    const TAIL_2: f64 = 1.311_028_777_146_06;
    let constants_ok = (mu0 - 32f64.sqrt()).abs() < 1e-12 && (tail - TAIL_2).abs() < 1e-12;
    c3.passed &= constants_ok;
    c3.detail.push_str(&format!("; mu0 {mu0:.12}, I(2) {tail:.14}"));
    results.push(c3);
    results.push(criterion(
        4,
        "shooting vs radial finite differences within 1e-6 (F = v, v^3; lambda = 1, 1e3)",
        &sat,
        &["radial-cross-check"],
    ));
    audits.push(sat);

    let ce = run(json!({
        "scenario": "counterexample", "grid": grid, "seed": 2024,
        "params": { "depth": 0.25, "amplitude": 1.0, "random_count": 20, "amplitudes": [1.0, 10.0, 100.0, 1000.0] },
        "tolerances": { "distance_factor": 10.0, "difference_floor": 0.99 }
    }));
    results.push(criterion(
        6,
        "counterexample: DN distance <= 10 x two-grid estimate over 20 seeded data, sup|a1 - a2| >= 0.99",
        &ce,
        &["dn-distance-within-discretization", "nonlinearities-differ"],
    ));
    audits.push(ce);

    let rig = run(json!({
        "scenario": "rigidity-t1", "grid": grid,
        "params": { "data": { "kind": "constant", "value": 1.0 }, "mus": [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] },
        "tolerances": { "vanish": 1e-10 }
    }));
    results.push(criterion(
        7,
        "rigidity: a = 0 mismatch and sup|a| vanish to 1e-10; cubic flux > 0 at mu = 1 with constant sign",
        &rig,
        &["linear-flux-mismatch-vanishes", "linear-a-vanishes", "nonlinear-flux-positive-at-1", "sign-constancy"],
    ));
    audits.push(rig);

    let cas = run(json!({
        "scenario": "cascade", "grid": grid,
        "params": { "step": 0.05 },
        "tolerances": { "flux_relative": 1e-8, "constant_growth": 1.1 }
    }));
    results.push(criterion(
        8,
        "cascade: amplitude derivative within C1 step^2 + C2 h^2 under halving, flux of v3 exact to 1e-8",
        &cas,
        &["amplitude-derivative-matches-cascade", "leading-flux-identity"],
    ));
    audits.push(cas);

    let sec = run(json!({
        "scenario": "second-linearization", "grid": grid,
        "params": { "t": 0.1 },
        "tolerances": { "constant_growth": 1.1, "linear_response": 1e-10 }
    }));
    results.push(criterion(
        9,
        "second linearization: volume vs boundary pairing within C h^2, linear response below 1e-10",
        &sec,
        &["pairing-within-c-h2", "linear-second-response-vanishes"],
    ));
    audits.push(sec);

    let wp = run(json!({
        "scenario": "wellposedness", "grid": grid, "seed": 5,
        "params": { "ts": [1e-3, 1e-2, 1e-1], "tmax": 100.0, "steps": 20 },
        "tolerances": { "ratio_spread": 0.1 }
    }));
    results.push(criterion(
        10,
        "well-posedness: ratio spread <= 10% for t in 1e-3..1e-1, monotone cubic reaches tmax",
        &wp,
        &["lipschitz-ratio-spread", "monotone-reaches-tmax"],
    ));
    audits.push(wp);

    audits.push(run(json!({ "scenario": "envelope", "grid": grid, "seed": 9 })));

    let worst = audits.iter().map(|s| s.divergence_audit.worst_ratio).fold(0.0, f64::max);
    let fields: u64 = audits.iter().map(|s| s.divergence_audit.fields).sum();
    results.push(Criterion {
        id: 2,
        title: "discrete divergence identity on every solved field, to 1e-10 x ||u||/h^2",
        passed: fields > 0 && worst <= 1e-10 && audits.iter().all(|s| s.divergence_audit.worst_ratio <= 1e-10),
        detail: format!("{fields} fields, worst ratio {worst:.3e}"),
    });

    results.sort_by_key(|c| c.id);
    let mut failed = 0;
    for c in &results {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {:>2}: {}", c.id, c.title);
        println!("       {}", c.detail);
        failed += usize::from(!c.passed);
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
