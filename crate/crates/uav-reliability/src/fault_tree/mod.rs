//! Fault trees with AND/OR gates, constant-rate basic events and
//! model-backed complex basic events.
//!
//! Trees are parsed from a line-oriented text document (see
//! [`parse_fault_tree`] and `docs/tree-format.md` in the repository) and are
//! immutable afterwards. Quantification assumes leaf independence:
//! OR-gates combine as `1 - Π(1 - p)`, AND-gates as `Π p`.

mod parser;

pub use parser::{parse_fault_tree, TreeError};

use crate::markov::MarkovModel;
use crate::models::{BatteryParams, MotorConfiguration, ProcessorParams, PropulsionParams};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    And,
    Or,
}

/// Parameter overrides a propulsion leaf may carry; unset fields fall back
/// to the mission configuration.
#[derive(Debug, Clone, Default)]
pub struct PropulsionLeaf {
    pub configuration: Option<MotorConfiguration>,
    pub motor_failure_rate: Option<f64>,
}

impl PropulsionLeaf {
    pub fn resolve(&self, defaults: &PropulsionParams) -> PropulsionParams {
        PropulsionParams {
            configuration: self.configuration.unwrap_or(defaults.configuration),
            motor_failure_rate: self
                .motor_failure_rate
                .unwrap_or(defaults.motor_failure_rate),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BatteryLeaf {
    pub failure_rate: Option<f64>,
    pub degradation_rate: Option<f64>,
    pub usage_rate: Option<f64>,
    pub inactivity_rate: Option<f64>,
}

impl BatteryLeaf {
    pub fn resolve(&self, defaults: &BatteryParams) -> BatteryParams {
        BatteryParams {
            failure_rate: self.failure_rate.unwrap_or(defaults.failure_rate),
            degradation_rate: self.degradation_rate.unwrap_or(defaults.degradation_rate),
            usage_rate: self.usage_rate.unwrap_or(defaults.usage_rate),
            inactivity_rate: self.inactivity_rate.unwrap_or(defaults.inactivity_rate),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProcessorLeaf {
    pub mttf_ref: Option<f64>,
    pub activation_energy: Option<f64>,
    pub boltzmann: Option<f64>,
    pub ref_temperature: Option<f64>,
    pub utilization: Option<f64>,
}

impl ProcessorLeaf {
    pub fn resolve(&self, defaults: &ProcessorParams) -> ProcessorParams {
        ProcessorParams {
            mttf_ref: self.mttf_ref.unwrap_or(defaults.mttf_ref),
            activation_energy: self.activation_energy.unwrap_or(defaults.activation_energy),
            boltzmann: self.boltzmann.unwrap_or(defaults.boltzmann),
            ref_temperature: self.ref_temperature.unwrap_or(defaults.ref_temperature),
            utilization: self.utilization.unwrap_or(defaults.utilization),
        }
    }
}

/// Maps observed motor patterns (`O`/`F` strings) onto states of a custom
/// chain; unmapped patterns fall back to `fallback`.
#[derive(Debug, Clone)]
pub struct MotorSymptomMap {
    pub configuration: MotorConfiguration,
    pub entries: Vec<(String, usize)>,
    pub fallback: usize,
}

impl MotorSymptomMap {
    pub fn state_for(&self, pattern: &str) -> usize {
        self.entries
            .iter()
            .find(|(p, _)| p == pattern)
            .map(|&(_, s)| s)
            .unwrap_or(self.fallback)
    }
}

/// A user-defined chain bound to a leaf, optionally driven by the motor
/// symptom.
#[derive(Debug, Clone)]
pub struct CustomLeaf {
    pub chain: MarkovModel,
    pub initial_state: usize,
    pub symptom: Option<MotorSymptomMap>,
}

/// What backs a fault-tree leaf.
#[derive(Debug, Clone)]
pub enum LeafModel {
    /// Constant failure rate in 1/hour; zero means the leaf never fails.
    BasicEvent {
        failure_rate: f64,
    },
    Propulsion(PropulsionLeaf),
    Battery(BatteryLeaf),
    Processor(ProcessorLeaf),
    Custom(CustomLeaf),
}

#[derive(Debug, Clone)]
pub(crate) enum NodeKind {
    Gate {
        kind: GateKind,
        children: Vec<usize>,
    },
    Leaf(LeafModel),
}

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub id: String,
    pub kind: NodeKind,
}

/// Immutable fault tree with a single root.
#[derive(Debug, Clone)]
pub struct FaultTree {
    pub(crate) nodes: Vec<Node>,
    pub(crate) root: usize,
    pub(crate) index: HashMap<String, usize>,
}

impl FaultTree {
    pub fn root_id(&self) -> &str {
        &self.nodes[self.root].id
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Leaves in declaration order.
    pub fn leaves(&self) -> impl Iterator<Item = (&str, &LeafModel)> {
        self.nodes.iter().filter_map(|node| match &node.kind {
            NodeKind::Leaf(model) => Some((node.id.as_str(), model)),
            NodeKind::Gate { .. } => None,
        })
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    pub fn gate_count(&self) -> usize {
        self.nodes.len() - self.leaf_count()
    }

    /// Gate kind of a node, or `None` for leaves and unknown ids.
    pub fn gate_kind(&self, id: &str) -> Option<GateKind> {
        match &self.nodes[*self.index.get(id)?].kind {
            NodeKind::Gate { kind, .. } => Some(*kind),
            NodeKind::Leaf(_) => None,
        }
    }

    /// Child ids of a gate, or `None` for leaves and unknown ids.
    pub fn gate_children(&self, id: &str) -> Option<Vec<&str>> {
        let node = &self.nodes[*self.index.get(id)?];
        match &node.kind {
            NodeKind::Gate { children, .. } => Some(
                children
                    .iter()
                    .map(|&c| self.nodes[c].id.as_str())
                    .collect(),
            ),
            NodeKind::Leaf(_) => None,
        }
    }
}

/// Failure probability and MTTF of one leaf at one instant. `mttf_h` is
/// `f64::INFINITY` for leaves that cannot fail (zero-rate basic events).
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentProbability {
    pub leaf_id: String,
    pub probability: f64,
    pub mttf_h: f64,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no probability supplied for leaf `{id}`")]
    MissingLeafProbability { id: String },
    #[error("probability {value} for leaf `{id}` outside [0, 1]")]
    ProbabilityOutOfRange { id: String, value: f64 },
    #[error("evaluating leaf `{id}` failed: {detail}")]
    LeafEvaluation { id: String, detail: String },
    #[error("invalid integration options: {0}")]
    InvalidOptions(String),
}

/// Top-event probability from per-leaf probabilities.
pub fn evaluate_top(
    tree: &FaultTree,
    leaf_probs: &[ComponentProbability],
) -> Result<f64, EvalError> {
    let by_id: HashMap<&str, f64> = leaf_probs
        .iter()
        .map(|c| (c.leaf_id.as_str(), c.probability))
        .collect();
    evaluate_top_with(tree, |id| by_id.get(id).copied())
}

/// Top-event probability with leaf probabilities supplied by a closure.
pub fn evaluate_top_with<F>(tree: &FaultTree, mut leaf_prob: F) -> Result<f64, EvalError>
where
    F: FnMut(&str) -> Option<f64>,
{
    // Post-order over the tree; children always carry larger indices than
    // computed values demand, so an explicit stack avoids recursion depth
    // limits on deep documents.
    let mut values: Vec<Option<f64>> = vec![None; tree.nodes.len()];
    let mut stack = vec![(tree.root, false)];
    while let Some((node, expanded)) = stack.pop() {
        if values[node].is_some() {
            continue;
        }
        match &tree.nodes[node].kind {
            NodeKind::Leaf(_) => {
                let id = &tree.nodes[node].id;
                let p = leaf_prob(id)
                    .ok_or_else(|| EvalError::MissingLeafProbability { id: id.clone() })?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(EvalError::ProbabilityOutOfRange {
                        id: id.clone(),
                        value: p,
                    });
                }
                values[node] = Some(p);
            }
            NodeKind::Gate { kind, children } => {
                if expanded {
                    let combined = match kind {
                        GateKind::And => children
                            .iter()
                            .map(|&c| values[c].expect("child evaluated"))
                            .product(),
                        GateKind::Or => children
                            .iter()
                            .map(|&c| values[c].expect("child evaluated"))
                            .fold(0.0, |acc, p| acc + p * (1.0 - acc)),
                    };
                    values[node] = Some(combined);
                } else {
                    stack.push((node, true));
                    for &c in children {
                        stack.push((c, false));
                    }
                }
            }
        }
    }
    Ok(values[tree.root].expect("root evaluated"))
}

/// Controls the reliability-curve integration behind [`system_mttf`].
#[derive(Debug, Clone)]
pub struct MttfOptions {
    /// Minimum span to integrate over, hours.
    pub initial_horizon_h: f64,
    /// Trapezoid step, hours.
    pub step_h: f64,
    /// Keep extending past the initial horizon until the system reliability
    /// drops below `residual_target`.
    pub auto_extend: bool,
    pub residual_target: f64,
    /// Extension stops here; the result is then a flagged lower bound.
    pub hard_cap_h: f64,
}

impl Default for MttfOptions {
    fn default() -> Self {
        MttfOptions {
            initial_horizon_h: 1024.0,
            step_h: 0.25,
            auto_extend: true,
            residual_target: 1e-6,
            hard_cap_h: 1e6,
        }
    }
}

/// System MTTF estimate; `capped` marks a lower bound cut off at the hard
/// cap (or at a fixed horizon with extension disabled) before the
/// reliability residual was reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemMttf {
    pub hours: f64,
    pub capped: bool,
}

/// Integrates the system reliability curve `R(t) = 1 - top(p_leaf(t))`.
///
/// `leaf_failure_probability(id, t)` must return each leaf's failure
/// probability by time `t` (hours from now).
pub fn system_mttf<F>(
    tree: &FaultTree,
    mut leaf_failure_probability: F,
    options: &MttfOptions,
) -> Result<SystemMttf, EvalError>
where
    F: FnMut(&str, f64) -> Result<f64, EvalError>,
{
    if options.step_h.is_nan() || options.step_h <= 0.0 {
        return Err(EvalError::InvalidOptions(format!(
            "step {} must be > 0",
            options.step_h
        )));
    }
    if options.initial_horizon_h < options.step_h {
        return Err(EvalError::InvalidOptions(
            "initial horizon smaller than one step".into(),
        ));
    }
    if options.hard_cap_h < options.initial_horizon_h {
        return Err(EvalError::InvalidOptions(
            "hard cap below the initial horizon".into(),
        ));
    }

    let mut reliability_at = |t: f64| -> Result<f64, EvalError> {
        let mut cache: HashMap<&str, f64> = HashMap::new();
        for (id, _) in tree.leaves() {
            let p = leaf_failure_probability(id, t)?;
            cache.insert(id, p);
        }
        let top = evaluate_top_with(tree, |id| cache.get(id).copied())?;
        Ok(1.0 - top)
    };

    let mut integral = 0.0f64;
    let mut previous = reliability_at(0.0)?;
    let mut k = 0usize;
    let capped = loop {
        k += 1;
        let t = k as f64 * options.step_h;
        if t > options.hard_cap_h {
            break true;
        }
        let current = reliability_at(t)?;
        integral += options.step_h * (previous + current) / 2.0;
        previous = current;
        if t >= options.initial_horizon_h {
            if current < options.residual_target {
                break false;
            }
            if !options.auto_extend {
                break true;
            }
        }
    };

    Ok(SystemMttf {
        hours: integral,
        capped,
    })
}
