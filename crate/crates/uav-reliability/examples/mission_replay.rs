//! Full mission replays: fault-free and faulty.
//!
//! Generates both telemetry scenarios in memory, replays them with the
//! default mission configuration, and prints the verdicts plus a few
//! salient ticks of the faulty run.
//!
//! ```bash
//! cargo run --example mission_replay
//! ```

use uav_reliability::runtime::MissionConfig;
use uav_reliability::scenario::{generate_scenario, ScenarioSpec};
use uav_reliability::{replay, Verdict};

fn main() {
    let config = MissionConfig::default();
    println!(
        "threshold {} on the system failure probability, horizon {} h",
        config.threshold, config.evaluation_horizon_h
    );

    let fault_free = generate_scenario(&ScenarioSpec::fault_free(750), 42).expect("valid spec");
    let outcome = replay(&fault_free, &config).expect("replay runs");
    let max = outcome
        .results
        .iter()
        .map(|r| r.system_probability)
        .fold(0.0f64, f64::max);
    println!(
        "\nfault-free mission: {} (max system probability {max:.4})",
        outcome.verdict
    );

    let faulty_spec = ScenarioSpec::faulty(750, 250, 400);
    let faulty = generate_scenario(&faulty_spec, 42).expect("valid spec");
    let outcome = replay(&faulty, &config).expect("replay runs");
    println!("faulty mission:     {}", outcome.verdict);

    println!("\nfaulty run, selected ticks:");
    println!(
        "{:>6}  {:>9}  {:>9}  {:>9}  {:>9}  recommendation",
        "t (s)", "battery", "propulsion", "processor", "system"
    );
    for index in [0, 249, 250, 400, 500, 625, 626, 749] {
        let r = &outcome.results[index];
        println!(
            "{:>6}  {:>9.4}  {:>9.4}  {:>9.4}  {:>9.4}  {}",
            r.t_s,
            r.battery.map_or(f64::NAN, |c| c.probability),
            r.propulsion.map_or(f64::NAN, |c| c.probability),
            r.processor.map_or(f64::NAN, |c| c.probability),
            r.system_probability,
            r.recommendation
        );
    }

    if let Verdict::Aborted { t_s } = outcome.verdict {
        println!("\nthe engine called for an emergency landing at {t_s} s;");
        println!("probabilities keep being computed for the rest of the stream.");
    }
}
