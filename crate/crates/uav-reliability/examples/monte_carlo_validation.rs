//! Monte Carlo cross-check of the analytic solvers.
//!
//! Simulates 100 000 seeded trajectories of the battery chain and compares
//! occupancy estimates and the mean absorption time against
//! `transient_distribution` and `mttf_from_state`.
//!
//! ```bash
//! cargo run --release --example monte_carlo_validation
//! ```

use uav_reliability::markov::{
    mttf_from_state, simulate_paths, transient_distribution, SimulationOptions, StateDistribution,
};
use uav_reliability::models::{build_battery_model, BatteryParams};

fn main() {
    let model = build_battery_model(&BatteryParams::default());
    let p0 = StateDistribution::point(model.state_count(), 0);
    let options = SimulationOptions::new(100_000, 42).with_occupancy_times(&[50.0, 100.0, 200.0]);

    println!(
        "simulating {} battery trajectories (seed {})",
        options.n_paths, options.seed
    );
    let outcome = simulate_paths(&model, &p0, &options).expect("simulation runs");

    for estimate in &outcome.occupancy {
        let exact = transient_distribution(&model, &p0, estimate.time).expect("solver runs");
        println!("\nt = {} h (state: simulated vs analytic)", estimate.time);
        for (i, label) in model.states().iter().enumerate() {
            println!(
                "  {label:>8}: {:.4} vs {:.4}",
                estimate.probs[i],
                exact.probability(i)
            );
        }
    }

    let mean = outcome.absorption_mean().expect("all paths absorb");
    let se = outcome.absorption_std_error().expect("sample spread");
    let exact = mttf_from_state(&model, 0).expect("absorbing chain");
    println!("\nmean absorption time: {mean:.2} h (standard error {se:.2})");
    println!("analytic MTTF:        {exact:.2} h");
    println!(
        "difference:           {:.2} standard errors",
        (mean - exact).abs() / se
    );
}
