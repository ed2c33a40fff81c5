//! Renewal-equation solver for semi-Markov processes.
//!
//! Solves a two-state process under three sojourn laws and compares the
//! numerical failure curve with the closed forms that exist for each.
//!
//! ```bash
//! cargo run --example semi_markov_solver
//! ```

use uav_reliability::markov::{
    solve_markov_renewal, MarkovModel, SojournDistribution, StateDistribution, TimeGrid,
};

type ClosedForm = fn(f64) -> f64;

fn two_state(sojourn: SojournDistribution) -> MarkovModel {
    MarkovModel::from_kernel(&["Op", "Fail"], &[("Op", "Fail", 1.0, sojourn)], &["Fail"])
        .expect("valid kernel")
}

fn main() {
    let cases: [(&str, SojournDistribution, ClosedForm); 3] = [
        (
            "exponential rate 0.01/h",
            SojournDistribution::Exponential { rate: 0.01 },
            |t| 1.0 - (-0.01 * t).exp(),
        ),
        (
            "deterministic delay 40 h",
            SojournDistribution::Deterministic { delay: 40.0 },
            |t| if t >= 40.0 { 1.0 } else { 0.0 },
        ),
        (
            "Weibull shape 2, scale 100 h",
            SojournDistribution::Weibull {
                shape: 2.0,
                scale: 100.0,
            },
            |t| 1.0 - (-(t / 100.0f64).powi(2)).exp(),
        ),
    ];

    let grid = TimeGrid::from_span(0.5, 200.0).expect("valid grid");
    for (label, sojourn, closed_form) in cases {
        let model = two_state(sojourn);
        let p0 = StateDistribution::point(2, 0);
        let solution = solve_markov_renewal(&model, &p0, &grid).expect("solver runs");
        if let Some(warning) = &solution.grid_warning {
            println!("note: {warning}");
        }
        let mut worst = 0.0f64;
        for d in &solution.distributions {
            worst = worst.max((d.probability(1) - closed_form(d.time())).abs());
        }
        println!("{label:>28}: max |numeric - closed form| = {worst:.2e}");
        for t_index in [100, 200, 399] {
            let d = &solution.distributions[t_index];
            println!(
                "{:>28}  P(failed by {:>5.1} h) = {:.5}",
                "",
                d.time(),
                d.probability(1)
            );
        }
    }
}
