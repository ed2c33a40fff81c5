//! Temperature-driven processor reliability.
//!
//! Sweeps the actual temperature, printing the acceleration factor and the
//! derated MTTF, then accumulates hazard over a temperature history.
//!
//! ```bash
//! cargo run --example thermal_derating
//! ```

use uav_reliability::models::{
    arrhenius_acceleration, processor_failure_probability, processor_mttf, ProcessorParams,
    TemperatureSegment,
};

fn main() {
    let params = ProcessorParams::default();
    println!(
        "reference: {} h at {} C (Ea {} eV, k {} eV/K)",
        params.mttf_ref, params.ref_temperature, params.activation_energy, params.boltzmann
    );
    println!(
        "\n{:>7}  {:>14}  {:>10}",
        "T (C)", "accel. factor", "MTTF (h)"
    );
    for t in (9..=119).step_by(10) {
        let t = f64::from(t);
        let factor = arrhenius_acceleration(t, &params).expect("physical temperature");
        let mttf = processor_mttf(&params, t).expect("physical temperature");
        println!("{t:>7}  {factor:>14.4}  {mttf:>10.2}");
    }

    let history = [
        TemperatureSegment {
            duration_h: 300.0,
            temperature_c: 29.0,
        },
        TemperatureSegment {
            duration_h: 200.0,
            temperature_c: 49.0,
        },
        TemperatureSegment {
            duration_h: 100.0,
            temperature_c: 69.0,
        },
    ];
    let probability = processor_failure_probability(&history, &params).expect("valid history");
    println!(
        "\nfailure probability after 300 h @ 29 C, 200 h @ 49 C, 100 h @ 69 C: {probability:.4}"
    );
}
