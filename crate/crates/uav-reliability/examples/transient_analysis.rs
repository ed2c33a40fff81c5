//! Transient distributions of a continuous-time Markov model.
//!
//! Builds the five-band battery chain and prints how probability mass
//! drains from the full band into the failed state over mission time.
//!
//! ```bash
//! cargo run --example transient_analysis
//! ```

use uav_reliability::markov::{mttf_from_state, transient_distribution, StateDistribution};
use uav_reliability::models::{build_battery_model, BatteryParams};

fn main() {
    let model = build_battery_model(&BatteryParams::default());
    let start = StateDistribution::point(model.state_count(), 0);

    println!("battery chain: {}", model.states().join(" -> "));
    println!();
    println!("{:>8}  state probabilities", "t (h)");
    for t in [0.0, 25.0, 50.0, 100.0, 200.0, 400.0, 800.0] {
        let dist = transient_distribution(&model, &start, t).expect("exponential model");
        let cells: Vec<String> = dist
            .probabilities()
            .iter()
            .map(|p| format!("{p:.4}"))
            .collect();
        println!("{t:>8}  [{}]", cells.join(", "));
    }

    println!();
    for band in 0..4 {
        let mttf = mttf_from_state(&model, band).expect("absorbing chain");
        println!(
            "expected hours to failure from {:>7}: {mttf:8.2}",
            model.state_label(band)
        );
    }
}
