//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured numbers (run with `-- --nocapture` to see
//! them). Tolerances are pinned in the assertions.

use std::collections::HashMap;
use uav_reliability::fault_tree::{
    evaluate_top, evaluate_top_with, ComponentProbability, GateKind, MttfOptions,
};
use uav_reliability::markov::{
    mttf_from_state, simulate_paths, solve_markov_renewal, transient_distribution, MarkovModel,
    SimulationOptions, SojournDistribution, StateDistribution, TimeGrid,
};
use uav_reliability::models::{
    arrhenius_acceleration, build_battery_model, build_propulsion_model,
    processor_failure_probability, processor_mttf, BatteryParams, MotorConfiguration,
    ProcessorParams, PropulsionParams, TemperatureSegment,
};
use uav_reliability::runtime::{parse_telemetry_csv, MissionConfig, Recommendation, Verdict};
use uav_reliability::{generate_scenario, parse_fault_tree, replay, ScenarioSpec};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_FAULT_FREE: &str = include_str!("../assets/golden_fault_free.csv");
const GOLDEN_FAULTY: &str = include_str!("../assets/golden_faulty.csv");
const GENERIC_TREE: &str = include_str!("../assets/uav_generic.ft");

fn two_state_rates(rate: f64) -> MarkovModel {
    MarkovModel::from_rates(&["Op", "Fail"], &[("Op", "Fail", rate)], &["Fail"]).unwrap()
}

#[test]
fn acceptance_1_arrhenius_anchor() {
    let params = ProcessorParams::default();
    let at_reference = arrhenius_acceleration(29.0, &params).unwrap();
    assert_eq!(at_reference, 1.0);
    assert_eq!(processor_mttf(&params, 29.0).unwrap(), 1000.0);

    // Independently evaluated scalar: exp((0.3/8.617e-5)(1/302.15 - 1/312.15)).
    let reference = 1.4464754872680814_f64;
    let hotter = arrhenius_acceleration(39.0, &params).unwrap();
    let relative = (hotter - reference).abs() / reference;
    assert!(relative < 1e-6, "AF(39C)={hotter}, oracle {reference}");
    println!("PASS acceptance 1: AF(Tr)=1 exactly, MTTF(Tr)=1000 h exactly, AF(39C)={hotter:.10} within {relative:.2e} of the oracle");
}

#[test]
fn acceptance_2_mttf_anchor() {
    let model = two_state_rates(0.001);
    let direct = mttf_from_state(&model, 0).unwrap();
    let relative = (direct - 1000.0).abs() / 1000.0;
    assert!(relative <= 1e-9, "fundamental-matrix MTTF {direct}");

    let tree = parse_fault_tree("event only rate=0.001\ntop only\n").unwrap();
    let integrated = uav_reliability::fault_tree::system_mttf(
        &tree,
        |_, t| Ok(1.0 - (-0.001f64 * t).exp()),
        &MttfOptions::default(),
    )
    .unwrap();
    assert!(!integrated.capped);
    let curve_error = (integrated.hours - 1000.0).abs() / 1000.0;
    assert!(
        curve_error <= 0.01,
        "curve-integrated MTTF {}",
        integrated.hours
    );

    let agreement = (integrated.hours - direct).abs() / direct;
    assert!(agreement <= 0.01);
    println!("PASS acceptance 2: linear-solve MTTF {direct} h (rel err {relative:.1e}), curve integral {:.3} h (rel err {curve_error:.1e}), agreement {agreement:.1e}", integrated.hours);
}

#[test]
fn acceptance_3_oracle_equivalence() {
    let query_times = [50.0, 100.0, 200.0];
    let cases: [(&str, MarkovModel); 2] = [
        ("battery", build_battery_model(&BatteryParams::default())),
        (
            "propulsion PNPNPN",
            build_propulsion_model(
                &PropulsionParams::new(MotorConfiguration::Pnpnpn, 0.001).unwrap(),
            ),
        ),
    ];
    for (label, model) in cases {
        let p0 = StateDistribution::point(model.state_count(), 0);
        let options = SimulationOptions::new(100_000, 42).with_occupancy_times(&query_times);
        let outcome = simulate_paths(&model, &p0, &options).unwrap();
        assert_eq!(outcome.censored, 0);

        let mut worst = 0.0f64;
        for estimate in &outcome.occupancy {
            let exact = transient_distribution(&model, &p0, estimate.time).unwrap();
            for state in 0..model.state_count() {
                let gap = (estimate.probs[state] - exact.probability(state)).abs();
                worst = worst.max(gap);
                assert!(
                    gap <= 0.005,
                    "{label} state {state} at t={}: monte carlo {} vs transient {}",
                    estimate.time,
                    estimate.probs[state],
                    exact.probability(state)
                );
            }
        }

        let mc_mean = outcome.absorption_mean().unwrap();
        let se = outcome.absorption_std_error().unwrap();
        let exact_mttf = mttf_from_state(&model, 0).unwrap();
        let sigmas = (mc_mean - exact_mttf).abs() / se;
        assert!(
            sigmas <= 2.0,
            "{label}: monte carlo mean {mc_mean} vs MTTF {exact_mttf} ({sigmas:.2} SE)"
        );
        println!("PASS acceptance 3 ({label}): occupancy gap <= {worst:.4}, MTTF gap {sigmas:.2} standard errors");
    }
}

#[test]
fn acceptance_4_renewal_solver_anchor() {
    // Exponential sojourn against the closed form.
    let exponential = MarkovModel::from_kernel(
        &["Op", "Fail"],
        &[(
            "Op",
            "Fail",
            1.0,
            SojournDistribution::Exponential { rate: 0.001 },
        )],
        &["Fail"],
    )
    .unwrap();
    let p0 = StateDistribution::point(2, 0);
    let grid = TimeGrid::from_span(0.5, 2000.0).unwrap();
    let solution = solve_markov_renewal(&exponential, &p0, &grid).unwrap();
    let mut worst = 0.0f64;
    for d in &solution.distributions {
        let expected = 1.0 - (-0.001 * d.time()).exp();
        worst = worst.max((d.probability(1) - expected).abs());
    }
    assert!(worst <= 1e-3, "max abs error {worst}");

    // Deterministic sojourn: the absorption step lands within one cell of
    // the delay.
    let deterministic = MarkovModel::from_kernel(
        &["Op", "Fail"],
        &[(
            "Op",
            "Fail",
            1.0,
            SojournDistribution::Deterministic { delay: 10.0 },
        )],
        &["Fail"],
    )
    .unwrap();
    let grid = TimeGrid::from_span(0.5, 20.0).unwrap();
    let solution = solve_markov_renewal(&deterministic, &p0, &grid).unwrap();
    for d in &solution.distributions {
        if d.time() <= 10.0 - 0.5 {
            assert!(d.probability(1) < 1e-12);
        }
        if d.time() >= 10.0 + 0.5 {
            assert!((d.probability(1) - 1.0).abs() < 1e-12);
        }
    }
    println!("PASS acceptance 4: exponential-sojourn max abs error {worst:.2e} at step 0.5 h; deterministic absorption steps within one cell of the delay");
}

/// Independent boolean oracle over the public tree API: expectation of the
/// top event over every leaf-state combination.
fn enumeration_oracle(tree: &uav_reliability::FaultTree, probs: &HashMap<String, f64>) -> f64 {
    fn holds(tree: &uav_reliability::FaultTree, id: &str, failed: &HashMap<&str, bool>) -> bool {
        match tree.gate_kind(id) {
            None => failed[id],
            Some(kind) => {
                let children = tree.gate_children(id).unwrap();
                match kind {
                    GateKind::And => children.iter().all(|c| holds(tree, c, failed)),
                    GateKind::Or => children.iter().any(|c| holds(tree, c, failed)),
                }
            }
        }
    }

    let ids: Vec<&str> = tree.leaves().map(|(id, _)| id).collect();
    let mut expectation = 0.0;
    for mask in 0u32..(1 << ids.len()) {
        let mut weight = 1.0;
        let mut failed = HashMap::new();
        for (bit, id) in ids.iter().enumerate() {
            let is_failed = mask & (1 << bit) != 0;
            weight *= if is_failed {
                probs[*id]
            } else {
                1.0 - probs[*id]
            };
            failed.insert(*id, is_failed);
        }
        if holds(tree, tree.root_id(), &failed) {
            expectation += weight;
        }
    }
    expectation
}

fn random_tree_document(rng: &mut ChaCha8Rng) -> (String, HashMap<String, f64>) {
    let leaf_count = rng.random_range(1..=10usize);
    let mut document = String::new();
    let mut probs = HashMap::new();
    let mut roots: Vec<String> = Vec::new();
    for i in 0..leaf_count {
        let id = format!("l{i}");
        document.push_str(&format!("event {id} rate=0.001\n"));
        probs.insert(id.clone(), rng.random::<f64>());
        roots.push(id);
    }
    let mut gate_counter = 0;
    while roots.len() > 1 {
        let take = rng.random_range(2..=roots.len().min(4));
        // Draw children from random positions.
        let mut children = Vec::new();
        for _ in 0..take {
            let pick = rng.random_range(0..roots.len());
            children.push(roots.swap_remove(pick));
        }
        let id = format!("g{gate_counter}");
        gate_counter += 1;
        let kind = if rng.random::<bool>() { "AND" } else { "OR" };
        document.push_str(&format!(
            "gate {id} {kind} children={}\n",
            children.join(",")
        ));
        roots.push(id);
    }
    document.push_str(&format!("top {}\n", roots[0]));
    (document, probs)
}

#[test]
fn acceptance_5_fault_tree_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(271828);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (document, probs) = random_tree_document(&mut rng);
        let tree = parse_fault_tree(&document).unwrap_or_else(|e| panic!("{e}\n{document}"));
        let direct = evaluate_top_with(&tree, |id| probs.get(id).copied()).unwrap();
        let oracle = enumeration_oracle(&tree, &probs);
        let gap = (direct - oracle).abs();
        worst = worst.max(gap);
        assert!(gap < 1e-12, "gap {gap}\n{document}");
    }

    let or_pair = parse_fault_tree(
        "event a rate=0.001\nevent b rate=0.001\ngate sys OR children=a,b\ntop sys\n",
    )
    .unwrap();
    let value = evaluate_top(
        &or_pair,
        &[
            ComponentProbability {
                leaf_id: "a".into(),
                probability: 0.1,
                mttf_h: 1000.0,
            },
            ComponentProbability {
                leaf_id: "b".into(),
                probability: 0.2,
                mttf_h: 500.0,
            },
        ],
    )
    .unwrap();
    assert_eq!(value, 0.28);

    let generic = parse_fault_tree(GENERIC_TREE).unwrap();
    assert_eq!(generic.leaf_count(), 28);
    let categories = generic.gate_children(generic.root_id()).unwrap();
    assert_eq!(categories.len(), 9);
    assert_eq!(generic.gate_kind(generic.root_id()), Some(GateKind::Or));
    for category in &categories {
        assert!(generic.gate_kind(category).is_some());
    }
    println!("PASS acceptance 5: 100 random trees match enumeration (worst gap {worst:.1e}), OR(0.1,0.2)=0.28 exactly, generic document has 28 leaves under 9 category gates");
}

#[test]
fn acceptance_6_fault_free_replay() {
    let samples = parse_telemetry_csv(GOLDEN_FAULT_FREE).unwrap();
    assert_eq!(samples.len(), 750);
    // The committed stream is the seed-42 output of the generator.
    let regenerated = generate_scenario(&ScenarioSpec::fault_free(750), 42).unwrap();
    assert_eq!(samples, regenerated);

    let config = MissionConfig::default();
    let outcome = replay(&samples, &config).unwrap();
    assert_eq!(outcome.verdict, Verdict::Completed);
    for result in &outcome.results {
        assert!(
            result.system_probability <= config.threshold,
            "system probability {} above threshold at t={}",
            result.system_probability,
            result.t_s
        );
    }

    // Discrete battery jump at the first tick below 75%.
    let crossing = samples
        .iter()
        .position(|s| s.battery_pct < 75.0)
        .expect("fault-free profile dips below 75%");
    let before = outcome.results[crossing - 1].battery.unwrap().probability;
    let after = outcome.results[crossing].battery.unwrap().probability;
    assert!(
        after - before > 0.05,
        "expected a band jump at t={crossing}: {before} -> {after}"
    );
    let max_system = outcome
        .results
        .iter()
        .map(|r| r.system_probability)
        .fold(0.0f64, f64::max);
    println!("PASS acceptance 6: fault-free verdict COMPLETED, max system probability {max_system:.4} <= 0.9, battery band jump {before:.4} -> {after:.4} at t={}s", samples[crossing].t_s);
}

#[test]
fn acceptance_7_faulty_replay() {
    let faulty = parse_telemetry_csv(GOLDEN_FAULTY).unwrap();
    let regenerated = generate_scenario(&ScenarioSpec::faulty(750, 250, 400), 42).unwrap();
    assert_eq!(faulty, regenerated);

    let config = MissionConfig::default();
    let outcome = replay(&faulty, &config).unwrap();
    let Verdict::Aborted { t_s } = outcome.verdict else {
        panic!("faulty mission must abort");
    };
    assert!(
        t_s > 400.0 && t_s <= 750.0,
        "abort at {t_s}s outside (400, 750]"
    );
    // The verdict coincides with the first emergency recommendation.
    let first_emergency = outcome
        .results
        .iter()
        .find(|r| r.recommendation == Recommendation::EmergencyLanding)
        .unwrap();
    assert_eq!(first_emergency.t_s, t_s);

    // From the battery fault onward the faulty mission is uniformly riskier
    // than the fault-free one.
    let fault_free = replay(&parse_telemetry_csv(GOLDEN_FAULT_FREE).unwrap(), &config).unwrap();
    for (faulty_r, free_r) in outcome.results.iter().zip(&fault_free.results) {
        if faulty_r.t_s >= 250.0 {
            assert!(
                faulty_r.system_probability >= free_r.system_probability,
                "dominance violated at t={}",
                faulty_r.t_s
            );
        }
    }
    println!("PASS acceptance 7: faulty verdict ABORTED_AT {t_s}s within (400, 750], single latch, dominates fault-free from t=250s on");
}

fn random_absorbing_model(rng: &mut ChaCha8Rng) -> MarkovModel {
    let n = rng.random_range(3..=6usize);
    let labels: Vec<String> = (0..n - 1)
        .map(|i| format!("S{i}"))
        .chain(std::iter::once("Fail".to_string()))
        .collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let mut transitions: Vec<(&str, &str, f64)> = Vec::new();
    // A forward chain keeps the absorbing state reachable from everywhere;
    // extra random forward edges vary the topology.
    for i in 0..n - 1 {
        transitions.push((refs[i], refs[i + 1], rng.random_range(0.001..0.05)));
    }
    for from in 0..n - 1 {
        for to in from + 2..n {
            if rng.random::<f64>() < 0.35 {
                transitions.push((refs[from], refs[to], rng.random_range(0.0005..0.02)));
            }
        }
    }
    MarkovModel::from_rates(&refs, &transitions, &["Fail"]).unwrap()
}

#[test]
fn acceptance_8_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(314159);

    // Probability conservation and absorption monotonicity on random
    // models over random time ladders.
    for _ in 0..20 {
        let model = random_absorbing_model(&mut rng);
        let p0 = StateDistribution::point(model.state_count(), 0);
        let mut absorbed_so_far = 0.0;
        let mut t = 0.0;
        for _ in 0..8 {
            t += rng.random_range(1.0..400.0);
            let dist = transient_distribution(&model, &p0, t).unwrap();
            let sum: f64 = dist.probabilities().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-9, "sum {sum} at t={t}");
            for &p in dist.probabilities() {
                assert!((0.0..=1.0 + 1e-12).contains(&p));
            }
            let absorbed = model.absorbing_mass(dist.probabilities());
            // Each call truncates its own Poisson tail (bound 1e-10), so
            // independently computed points are monotone within 1e-9.
            assert!(
                absorbed + 1e-9 >= absorbed_so_far,
                "absorption shrank: {absorbed_so_far} -> {absorbed}"
            );
            absorbed_so_far = absorbed;
        }
    }

    // Chapman-Kolmogorov composition on ten random models.
    for _ in 0..10 {
        let model = random_absorbing_model(&mut rng);
        let p0 = StateDistribution::point(model.state_count(), 0);
        let (s, t) = (rng.random_range(1.0..300.0), rng.random_range(1.0..300.0));
        let direct = transient_distribution(&model, &p0, s + t).unwrap();
        let midpoint = transient_distribution(&model, &p0, s).unwrap();
        let composed = transient_distribution(&model, &midpoint, t).unwrap();
        for i in 0..model.state_count() {
            assert!(
                (direct.probability(i) - composed.probability(i)).abs() <= 1e-8,
                "composition gap at state {i}"
            );
        }
    }

    // Propulsion MTTF ordering, analytically and by simulation.
    let lambda = 0.001;
    let mttf_of = |c: MotorConfiguration| {
        let model = build_propulsion_model(&PropulsionParams::new(c, lambda).unwrap());
        mttf_from_state(&model, 0).unwrap()
    };
    let quad = mttf_of(MotorConfiguration::Pnpn);
    let mixed = mttf_of(MotorConfiguration::Ppnnpn);
    let hex = mttf_of(MotorConfiguration::Pnpnpn);
    assert!(quad < mixed && mixed < hex, "{quad} {mixed} {hex}");
    let simulated_mean = |c: MotorConfiguration| {
        let model = build_propulsion_model(&PropulsionParams::new(c, lambda).unwrap());
        let p0 = StateDistribution::point(model.state_count(), 0);
        simulate_paths(&model, &p0, &SimulationOptions::new(20_000, 7))
            .unwrap()
            .absorption_mean()
            .unwrap()
    };
    let sim_quad = simulated_mean(MotorConfiguration::Pnpn);
    let sim_mixed = simulated_mean(MotorConfiguration::Ppnnpn);
    let sim_hex = simulated_mean(MotorConfiguration::Pnpnpn);
    assert!(
        sim_quad < sim_mixed && sim_mixed < sim_hex,
        "{sim_quad} {sim_mixed} {sim_hex}"
    );

    // Arrhenius strict monotonicity over random temperature pairs.
    let params = ProcessorParams::default();
    for _ in 0..200 {
        let a = rng.random_range(-20.0..110.0);
        let b = a + rng.random_range(0.01..30.0);
        let af_a = arrhenius_acceleration(a, &params).unwrap();
        let af_b = arrhenius_acceleration(b, &params).unwrap();
        assert!(af_a < af_b);
        assert!(processor_mttf(&params, a).unwrap() > processor_mttf(&params, b).unwrap());
    }

    // Hazard additivity: splitting any segment in half changes nothing.
    for _ in 0..100 {
        let history: Vec<TemperatureSegment> = (0..rng.random_range(1..5usize))
            .map(|_| TemperatureSegment {
                duration_h: rng.random_range(0.0..500.0),
                temperature_c: rng.random_range(0.0..90.0),
            })
            .collect();
        let split: Vec<TemperatureSegment> = history
            .iter()
            .flat_map(|segment| {
                let half = TemperatureSegment {
                    duration_h: segment.duration_h / 2.0,
                    temperature_c: segment.temperature_c,
                };
                [half, half]
            })
            .collect();
        let whole = processor_failure_probability(&history, &params).unwrap();
        let halves = processor_failure_probability(&split, &params).unwrap();
        assert!((whole - halves).abs() <= 1e-12);
    }

    println!("PASS acceptance 8: conservation, absorption monotonicity, composition, propulsion ordering ({quad:.1} < {mixed:.1} < {hex:.1} h, simulated {sim_quad:.1} < {sim_mixed:.1} < {sim_hex:.1} h), Arrhenius monotonicity, hazard additivity");
}

// Supporting invariants beyond the numbered criteria.

#[test]
fn mttf_matches_reliability_integral() {
    let model = build_battery_model(&BatteryParams::default());
    let p0 = StateDistribution::point(model.state_count(), 0);
    let mttf = mttf_from_state(&model, 0).unwrap();
    let step = 1.0;
    let mut integral = 0.0;
    let mut previous = 1.0;
    let mut t = 0.0;
    loop {
        t += step;
        let dist = transient_distribution(&model, &p0, t).unwrap();
        let operational = 1.0 - model.absorbing_mass(dist.probabilities());
        integral += step * (previous + operational) / 2.0;
        previous = operational;
        if operational < 1e-6 {
            break;
        }
    }
    let relative = (integral - mttf).abs() / mttf;
    assert!(relative <= 0.01, "integral {integral} vs MTTF {mttf}");
}

#[test]
fn two_state_routes_agree() {
    let rate = 0.001;
    let rates_model = two_state_rates(rate);
    let kernel_model = MarkovModel::from_kernel(
        &["Op", "Fail"],
        &[("Op", "Fail", 1.0, SojournDistribution::Exponential { rate })],
        &["Fail"],
    )
    .unwrap();
    let p0 = StateDistribution::point(2, 0);
    let grid = TimeGrid::from_span(0.5, 2000.0).unwrap();
    let renewal = solve_markov_renewal(&kernel_model, &p0, &grid).unwrap();
    let simulated = simulate_paths(
        &rates_model,
        &p0,
        &SimulationOptions::new(100_000, 99).with_occupancy_times(&[1000.0]),
    )
    .unwrap();

    let analytic = 1.0 - (-rate * 1000.0f64).exp();
    let uniformized = transient_distribution(&rates_model, &p0, 1000.0)
        .unwrap()
        .probability(1);
    let renewal_value = renewal.distributions[2000].probability(1);
    let monte_carlo = simulated.occupancy[0].probs[1];
    assert!((uniformized - analytic).abs() <= 1e-9);
    assert!((renewal_value - analytic).abs() <= 1e-3);
    assert!((monte_carlo - analytic).abs() <= 0.005);
}

#[test]
fn sicker_states_are_never_safer() {
    let horizon = 100.0;
    let battery = build_battery_model(&BatteryParams::default());
    let mut previous = -1.0;
    for band in 0..battery.state_count() {
        let p0 = StateDistribution::point(battery.state_count(), band);
        let p = battery.absorbing_mass(
            transient_distribution(&battery, &p0, horizon)
                .unwrap()
                .probabilities(),
        );
        assert!(
            p >= previous,
            "band {band} healthier than band {}",
            band - 1
        );
        previous = p;
    }

    let propulsion =
        build_propulsion_model(&PropulsionParams::new(MotorConfiguration::Pnpnpn, 0.001).unwrap());
    let mut previous = -1.0;
    for state in 0..propulsion.state_count() {
        let p0 = StateDistribution::point(propulsion.state_count(), state);
        let p = propulsion.absorbing_mass(
            transient_distribution(&propulsion, &p0, horizon)
                .unwrap()
                .probabilities(),
        );
        assert!(p >= previous);
        previous = p;
    }
}
