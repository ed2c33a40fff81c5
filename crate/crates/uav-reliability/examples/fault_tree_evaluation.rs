//! Parsing and quantifying fault-tree documents.
//!
//! Loads the two shipped tree documents, evaluates the generic tree's top
//! event from its constant leaf rates, and integrates a system MTTF.
//!
//! ```bash
//! cargo run --example fault_tree_evaluation
//! ```

use std::collections::HashMap;
use uav_reliability::fault_tree::{evaluate_top_with, system_mttf, LeafModel, MttfOptions};
use uav_reliability::parse_fault_tree;
use uav_reliability::runtime::DEFAULT_TREE_DOCUMENT;

const GENERIC_TREE: &str = include_str!("../assets/uav_generic.ft");

fn main() {
    let small = parse_fault_tree(DEFAULT_TREE_DOCUMENT).expect("default document parses");
    println!(
        "default tree: {} leaves under `{}`",
        small.leaf_count(),
        small.root_id()
    );

    let generic = parse_fault_tree(GENERIC_TREE).expect("generic document parses");
    println!(
        "generic tree: {} leaves, {} gates, root `{}`",
        generic.leaf_count(),
        generic.gate_count(),
        generic.root_id()
    );

    // Constant-rate leaves: probability of failing within a mission window.
    let mut rates: HashMap<String, f64> = HashMap::new();
    for (id, leaf) in generic.leaves() {
        if let LeafModel::BasicEvent { failure_rate } = leaf {
            rates.insert(id.to_string(), *failure_rate);
        }
    }
    for window_h in [1.0, 10.0, 100.0, 800.0] {
        let top = evaluate_top_with(&generic, |id| {
            rates.get(id).map(|rate| 1.0 - (-rate * window_h).exp())
        })
        .expect("all leaves have rates");
        println!("P(top event within {window_h:>5} h) = {top:.5}");
    }

    let mttf = system_mttf(
        &generic,
        |id, t| Ok(1.0 - (-rates[id] * t).exp()),
        &MttfOptions::default(),
    )
    .expect("integration converges");
    println!(
        "system MTTF from leaf rates: {:.1} h{}",
        mttf.hours,
        if mttf.capped {
            " (capped lower bound)"
        } else {
            ""
        }
    );
}
