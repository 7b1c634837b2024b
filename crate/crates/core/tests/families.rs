use line_darp::adversary::{generate, lure, Expectation, FamilyError, FamilyKind, FamilyOptions, FinalStart, GeneratedFamily};
use line_darp::algorithms::AlgorithmSpec;
use line_darp::bounds::{f1, f2, rho_star};
use line_darp::model::{instance_from_json, instance_to_json, validate, verify_trajectory, Capacity, Instance, Variant};
use line_darp::offline::SolverConfig;
use line_darp::sim::{check_trace, run, SimResult, StartKind};

const TOL: f64 = 1e-9;

fn grid() -> Vec<(FamilyKind, f64, f64)> {
    vec![
        (FamilyKind::Waiting, 2.2, 0.01),
        (FamilyKind::Waiting, 2.5, 0.02),
        (FamilyKind::NoWait, 2.05, 0.005),
        (FamilyKind::NoWait, 2.0, 0.01),
        (FamilyKind::G1, 2.0, 0.005),
        (FamilyKind::G1, 1.2, 0.009),
        (FamilyKind::G2, 2.4, 0.03),
        (FamilyKind::G3, 2.6, 0.01),
        (FamilyKind::G4, 3.0, 0.01),
        (FamilyKind::G4, 6.0, 0.001),
        (FamilyKind::Closed, 2.0, 0.0),
        (FamilyKind::Closed, 2.9, 0.02),
        (FamilyKind::Closed, 5.0, 0.1),
        (FamilyKind::Ignore, f64::NAN, 0.5),
        (FamilyKind::Ignore, f64::NAN, 2.5),
    ]
}

fn simulate(fam: &GeneratedFamily) -> SimResult {
    run(&fam.instance, &fam.target(), &SolverConfig::default()).unwrap()
}

#[test]
fn simulated_costs_match_closed_forms_for_every_capacity() {
    for (kind, theta, eps) in grid() {
        for capacity in [Capacity::Finite(1), Capacity::Finite(2), Capacity::Unbounded] {
            let opts = FamilyOptions { capacity, ..FamilyOptions::default() };
            let fam = generate(kind, theta, eps, &opts).unwrap();
            assert!(validate(&fam.instance).is_empty());
            let res = simulate(&fam);
            let tag = format!("{kind} Θ={theta} ε={eps} c={capacity}");
            assert!((res.cost - fam.expected_alg()).abs() < TOL, "{tag}: alg {} vs {}", res.cost, fam.expected_alg());
            assert!((res.opt_cost - fam.expected_opt()).abs() < TOL, "{tag}: opt {} vs {}", res.opt_cost, fam.expected_opt());
            assert!((res.ratio - fam.expected_ratio()).abs() < TOL, "{tag}");
            assert_eq!(verify_trajectory(&fam.instance, &res.trajectory, TOL), Ok(()), "{tag}");
        }
    }
}

#[test]
fn final_start_matches_schedule_records() {
    for (kind, theta, eps) in grid() {
        let fam = generate(kind, theta, eps, &FamilyOptions::default()).unwrap();
        let res = simulate(&fam);
        let last = res.last_schedule().unwrap();
        let waited = last.start_time - last.idle_since;
        match fam.expectation.final_start {
            FinalStart::Waits => assert!(last.waited() && waited > 0.0, "{kind} Θ={theta}: {last:?}"),
            FinalStart::Immediate => {
                assert_eq!(last.start_kind, StartKind::Immediate, "{kind} Θ={theta}");
                assert_eq!(waited, 0.0);
            }
        }
    }
}

#[test]
fn smartstart_families_satisfy_the_trace_lemmas() {
    for (kind, theta, eps) in grid() {
        if kind == FamilyKind::Ignore {
            continue;
        }
        let fam = generate(kind, theta, eps, &FamilyOptions::default()).unwrap();
        let res = simulate(&fam);
        assert_eq!(check_trace(&res, &fam.instance, theta, &SolverConfig::default()).unwrap(), vec![], "{kind} Θ={theta}");
    }
}

#[test]
fn reference_points() {
    let opts = FamilyOptions::default();
    let w = generate(FamilyKind::Waiting, 2.2, 0.01, &opts).unwrap();
    assert!((simulate(&w).ratio - (f1(2.2).unwrap() - 0.01)).abs() < TOL);

    let n = generate(FamilyKind::NoWait, 2.05, 0.005, &opts).unwrap();
    assert!((simulate(&n).ratio - (f2(2.05).unwrap() - 0.005)).abs() < TOL);

    let g1 = generate(FamilyKind::G1, 2.0, 0.005, &opts).unwrap();
    let want = 12.0 / (4.0 + 2.0 - 2.0 + 2.5 * 0.005 * 2.0);
    assert!((simulate(&g1).ratio - want).abs() < TOL);

    let g3 = generate(FamilyKind::G3, 2.6, 0.01, &opts).unwrap();
    let t = 2.6;
    let want = ((3.0 * t - 1.0) / (t - 1.0) + 1.0 + 1.0 / t) / (1.0 + 2.0 / t + 0.02);
    assert!((simulate(&g3).ratio - want).abs() < TOL);

    let g4 = generate(FamilyKind::G4, 3.0, 0.01, &opts).unwrap();
    assert!((simulate(&g4).ratio - 3.0 / 1.02).abs() < TOL);

    for kind in [FamilyKind::G1, FamilyKind::G2, FamilyKind::G3, FamilyKind::G4] {
        let theta = match kind {
            FamilyKind::G1 => 1.7,
            FamilyKind::G2 => 2.35,
            FamilyKind::G3 => 2.7,
            _ => 4.0,
        };
        assert!(generate(kind, theta, 0.001, &opts).unwrap().expected_ratio() > rho_star());
    }
}

#[test]
fn waiting_ratio_approaches_f1_as_eps_shrinks() {
    let ratios: Vec<f64> = [0.1, 0.01, 0.001]
        .iter()
        .map(|&eps| simulate(&generate(FamilyKind::Waiting, 2.5, eps, &FamilyOptions::default()).unwrap()).ratio)
        .collect();
    assert!(ratios.windows(2).all(|w| w[0] < w[1]));
    assert!(ratios[2] < f1(2.5).unwrap());
}

#[test]
fn ignore_second_schedule_ends_at_origin() {
    let fam = generate(FamilyKind::Ignore, f64::NAN, 0.5, &FamilyOptions::default()).unwrap();
    let res = simulate(&fam);
    assert_eq!(res.schedules.len(), 3);
    assert_eq!(res.schedules[1].end_pos, 0.0);
    assert!((res.cost - 3.5).abs() < TOL);
}

#[test]
fn lure_prefix_alone() {
    let l = lure(1.0, 0.1, 2.0, 1000).unwrap();
    let inst = Instance::new(Capacity::Finite(1), Variant::Open, l.requests.iter().copied());
    let res = run(&inst, &AlgorithmSpec::Smartstart { theta: 2.0 }, &SolverConfig::default()).unwrap();
    assert_eq!(res.schedules.len(), l.n + 1);
    assert!(res.schedules.iter().all(|s| s.served.len() == 1));
    assert!((res.cost - 1.1).abs() < TOL);
    assert!((res.schedules[l.n].start_time - l.last_start).abs() < TOL);
    assert_eq!(res.trajectory.end(), Some((l.arrival_time, 1.0)));
}

#[test]
fn canonical_json_is_byte_stable() {
    for (kind, theta, eps) in grid() {
        let fam = generate(kind, theta, eps, &FamilyOptions::default()).unwrap();
        let text = instance_to_json(&fam.instance);
        let back = instance_from_json(&text).unwrap();
        assert_eq!(back, fam.instance);
        assert_eq!(instance_to_json(&back), text);
        assert_eq!(text, instance_to_json(&generate(kind, theta, eps, &FamilyOptions::default()).unwrap().instance));
    }
}

#[test]
fn expectation_sidecar_round_trips() {
    let fam = generate(FamilyKind::G2, 2.35, 0.01, &FamilyOptions::default()).unwrap();
    let json = serde_json::to_string(&fam.expectation).unwrap();
    let back: Expectation = serde_json::from_str(&json).unwrap();
    assert_eq!(back, fam.expectation);
}

#[test]
fn lure_limit_is_reported() {
    let opts = FamilyOptions { max_lure: 64, ..FamilyOptions::default() };
    let err = generate(FamilyKind::Waiting, 2.1, 1e-3, &opts).unwrap_err();
    assert!(matches!(err, FamilyError::LureTooLong { limit: 64, .. }));
}
