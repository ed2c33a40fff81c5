//! Battery level bands and their reliability figures.
//!
//! Maps measured battery levels onto the degradation chain's bands and
//! prints failure probability over the default horizon plus the MTTF for
//! each band, in both active and inactive modes.
//!
//! ```bash
//! cargo run --example battery_bands
//! ```

use uav_reliability::markov::{mttf_from_state, transient_distribution, StateDistribution};
use uav_reliability::models::{
    battery_state_from_level, build_battery_model_for, Activity, BatteryParams,
};

fn main() {
    let params = BatteryParams::default();
    let horizon = 100.0;

    println!("level -> band mapping (boundaries inclusive from below):");
    for level in [100.0, 75.0, 74.9, 50.0, 40.0, 25.0, 10.0, 0.0] {
        let band = battery_state_from_level(level).expect("in range");
        println!("  {level:>5}% -> band {band}");
    }

    for activity in [Activity::Active, Activity::Inactive] {
        let model = build_battery_model_for(&params, activity);
        println!(
            "\n{activity:?} (band rate {:.4}/h):",
            params.band_transition_rate(activity)
        );
        println!(
            "  {:>8}  {:>22}  {:>10}",
            "band",
            format!("P(fail within {horizon} h)"),
            "MTTF (h)"
        );
        for band in 0..model.state_count() {
            let p0 = StateDistribution::point(model.state_count(), band);
            let at = transient_distribution(&model, &p0, horizon).expect("solver runs");
            let probability = model.absorbing_mass(at.probabilities());
            let mttf = mttf_from_state(&model, band).expect("absorbing chain");
            println!(
                "  {:>8}  {probability:>22.4}  {mttf:>10.2}",
                model.state_label(band)
            );
        }
    }
}
