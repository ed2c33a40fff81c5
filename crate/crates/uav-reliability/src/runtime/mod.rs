//! The runtime evaluation loop.
//!
//! A [`ReliabilityEngine`] owns one mission: it ingests telemetry samples in
//! timestamp order, maps each sample's symptoms onto component-model states,
//! recomputes per-component and system failure probability and MTTF, and
//! attaches a recommendation from the threshold check. [`replay`] drives a
//! whole recorded stream through an engine and reports the mission verdict.
//!
//! Evaluation policy:
//!
//! - Chain-backed leaves (battery, propulsion, custom) report the
//!   probability of absorption within the configured evaluation horizon,
//!   starting from the state selected by the current symptoms.
//! - The processor leaf reports `1 - exp(-(accumulated hazard + horizon /
//!   MTTF(T)))`: the hazard integral of the piecewise-constant temperature
//!   history so far plus a forward window at the current temperature.
//! - Once a symptom lands a leaf in an absorbing state (a failed motor on a
//!   quadcopter, battery at 0%), that leaf's probability pins at 1 for the
//!   rest of the mission.
//! - System MTTF integrates the forward system reliability from the current
//!   states; the processor term uses its conditional forward survival, so
//!   already-spent hazard does not discount the expectation.
//!
//! Replays are deterministic: evaluation involves no randomness and
//! iterates leaves and grid points in a fixed order, so identical streams
//! and configurations produce bit-identical result sequences. Engines are
//! single-producer; run one engine per vehicle and feed it samples
//! sequentially.

mod config;
mod result;
mod telemetry;

pub use config::{
    BatterySettings, MissionConfig, ProcessorSettings, PropulsionSettings, DEFAULT_TREE_DOCUMENT,
};
pub use result::{
    format_results_csv, format_results_json_lines, ComponentEval, EvaluationResult, LeafEval,
    Recommendation, ReplayOutcome, Verdict, RESULTS_CSV_HEADER,
};
pub use telemetry::{
    format_telemetry_csv, parse_telemetry_csv, read_telemetry_csv, write_telemetry_csv,
    TelemetrySample, TELEMETRY_CSV_HEADER,
};

use crate::fault_tree::{
    evaluate_top, ComponentProbability, EvalError, FaultTree, GateKind, LeafModel, MotorSymptomMap,
    NodeKind, TreeError,
};
use crate::markov::{
    mttf_from_state, transient_distribution, MarkovModel, MttfError, StateDistribution,
    TransientError,
};
use crate::models::{
    arrhenius_acceleration, battery_state_from_level, build_battery_model_for,
    build_propulsion_model, processor_mttf, propulsion_state_from_symptom, Activity, BatteryParams,
    ModelsError, MotorConfiguration, ProcessorParams, PropulsionParams,
};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RuntimeError {
    #[error("telemetry stream is empty")]
    EmptyStream,
    #[error("sample at {current}s does not advance past the previous sample at {previous}s")]
    OutOfOrderSample { previous: f64, current: f64 },
    #[error("telemetry line {line}: {message}")]
    Telemetry { line: usize, message: String },
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("invalid mission config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Models(#[from] ModelsError),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<TransientError> for RuntimeError {
    fn from(e: TransientError) -> Self {
        RuntimeError::Evaluation(e.to_string())
    }
}

impl From<MttfError> for RuntimeError {
    fn from(e: MttfError) -> Self {
        RuntimeError::Evaluation(e.to_string())
    }
}

impl From<EvalError> for RuntimeError {
    fn from(e: EvalError) -> Self {
        RuntimeError::Evaluation(e.to_string())
    }
}

/// Threshold rule: emergency landing if and only if the probability
/// strictly exceeds the configured threshold.
pub fn decide(probability: f64, config: &MissionConfig) -> Recommendation {
    debug_assert!((0.0..=1.0).contains(&probability));
    if probability > config.threshold {
        Recommendation::EmergencyLanding
    } else {
        Recommendation::Continue
    }
}

/// Grid step of the system-MTTF integration, hours.
const INTEGRATION_STEP_H: f64 = 1.0;
/// Minimum span integrated before the residual check may stop the loop.
const INTEGRATION_MIN_SPAN_H: f64 = 256.0;
/// Residual system reliability at which the integral is considered
/// converged.
const INTEGRATION_RESIDUAL: f64 = 1e-6;
/// Extension cap; past this the integral is reported as a capped lower
/// bound.
const INTEGRATION_CAP_H: f64 = 32768.0;

/// Lazily extended reliability curve of one chain state on the shared
/// integration grid.
struct Curve {
    values: Vec<f64>,
    last: StateDistribution,
}

/// A chain model plus the current symptom-selected state and caches keyed
/// by state.
struct ChainState {
    model: MarkovModel,
    state: usize,
    probs: HashMap<usize, f64>,
    mttfs: HashMap<usize, f64>,
    curves: HashMap<usize, Curve>,
}

impl ChainState {
    fn new(model: MarkovModel, state: usize) -> Self {
        ChainState {
            model,
            state,
            probs: HashMap::new(),
            mttfs: HashMap::new(),
            curves: HashMap::new(),
        }
    }

    fn in_absorbing_state(&self) -> bool {
        self.model.is_absorbing(self.state)
    }

    /// P(absorbed within `horizon` | current state).
    fn probability(&mut self, horizon: f64) -> Result<f64, RuntimeError> {
        if let Some(&p) = self.probs.get(&self.state) {
            return Ok(p);
        }
        let p0 = StateDistribution::point(self.model.state_count(), self.state);
        let at_horizon = transient_distribution(&self.model, &p0, horizon)?;
        let p = self.model.absorbing_mass(at_horizon.probabilities());
        self.probs.insert(self.state, p);
        Ok(p)
    }

    fn mttf(&mut self) -> Result<f64, RuntimeError> {
        if let Some(&m) = self.mttfs.get(&self.state) {
            return Ok(m);
        }
        let m = mttf_from_state(&self.model, self.state)?;
        self.mttfs.insert(self.state, m);
        Ok(m)
    }

    /// Operational probability at grid index `k` from the current state.
    fn reliability_at(&mut self, k: usize) -> Result<f64, RuntimeError> {
        let ChainState {
            model,
            curves,
            state,
            ..
        } = self;
        let curve = curves.entry(*state).or_insert_with(|| Curve {
            values: vec![if model.is_absorbing(*state) { 0.0 } else { 1.0 }],
            last: StateDistribution::point(model.state_count(), *state),
        });
        while curve.values.len() <= k {
            curve.last = transient_distribution(model, &curve.last, INTEGRATION_STEP_H)?;
            curve
                .values
                .push(1.0 - model.absorbing_mass(curve.last.probabilities()));
        }
        Ok(curve.values[k])
    }
}

enum LeafRuntime {
    Constant {
        rate: f64,
    },
    Propulsion {
        lambda: f64,
        current: MotorConfiguration,
        chains: HashMap<MotorConfiguration, ChainState>,
        pinned: bool,
    },
    Battery {
        active: Box<ChainState>,
        inactive: Box<ChainState>,
        activity: Activity,
        pinned: bool,
    },
    Processor {
        params: ProcessorParams,
        hazard: f64,
        last: Option<(f64, f64)>,
        acceleration: f64,
    },
    Custom {
        chain: Box<ChainState>,
        symptom: Option<MotorSymptomMap>,
        pinned: bool,
    },
}

struct LeafSlot {
    id: String,
    runtime: LeafRuntime,
}

impl LeafSlot {
    fn observe(&mut self, sample: &TelemetrySample) -> Result<(), RuntimeError> {
        match &mut self.runtime {
            LeafRuntime::Constant { .. } => {}
            LeafRuntime::Propulsion {
                lambda,
                current,
                chains,
                pinned,
            } => {
                let state =
                    propulsion_state_from_symptom(sample.configuration, &sample.motor_status)?;
                *current = sample.configuration;
                let chain = chains.entry(sample.configuration).or_insert_with(|| {
                    let params = PropulsionParams {
                        configuration: sample.configuration,
                        motor_failure_rate: *lambda,
                    };
                    ChainState::new(build_propulsion_model(&params), 0)
                });
                chain.state = state;
                if chain.in_absorbing_state() {
                    *pinned = true;
                }
            }
            LeafRuntime::Battery {
                active,
                inactive,
                activity,
                pinned,
            } => {
                let band = battery_state_from_level(sample.battery_pct)?;
                *activity = sample.activity;
                active.state = band;
                inactive.state = band;
                if active.in_absorbing_state() {
                    *pinned = true;
                }
            }
            LeafRuntime::Processor {
                params,
                hazard,
                last,
                acceleration,
            } => {
                if let Some((prev_t, prev_temp)) = *last {
                    let duration_h = (sample.t_s - prev_t) / 3600.0;
                    *hazard += duration_h / processor_mttf(params, prev_temp)?;
                }
                *last = Some((sample.t_s, sample.temp_c));
                *acceleration = arrhenius_acceleration(sample.temp_c, params)?;
            }
            LeafRuntime::Custom {
                chain,
                symptom,
                pinned,
            } => {
                if let Some(map) = symptom {
                    // The map only applies while the vehicle flies the
                    // configuration it was written for.
                    if map.configuration == sample.configuration {
                        chain.state = map.state_for(&sample.motor_pattern());
                        if chain.in_absorbing_state() {
                            *pinned = true;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn evaluate(&mut self, horizon: f64) -> Result<LeafEval, RuntimeError> {
        let (probability, mttf_h) = match &mut self.runtime {
            LeafRuntime::Constant { rate } => {
                if *rate > 0.0 {
                    (1.0 - (-*rate * horizon).exp(), 1.0 / *rate)
                } else {
                    (0.0, f64::INFINITY)
                }
            }
            LeafRuntime::Propulsion {
                current,
                chains,
                pinned,
                ..
            } => {
                if *pinned {
                    (1.0, 0.0)
                } else {
                    let chain = chains.get_mut(current).expect("observed configuration");
                    (chain.probability(horizon)?, chain.mttf()?)
                }
            }
            LeafRuntime::Battery {
                active,
                inactive,
                activity,
                pinned,
            } => {
                if *pinned {
                    (1.0, 0.0)
                } else {
                    let chain = match activity {
                        Activity::Active => active,
                        Activity::Inactive => inactive,
                    };
                    (chain.probability(horizon)?, chain.mttf()?)
                }
            }
            LeafRuntime::Processor {
                params,
                hazard,
                acceleration,
                ..
            } => {
                let mttf = params.mttf_ref / *acceleration;
                (1.0 - (-(*hazard + horizon / mttf)).exp(), mttf)
            }
            LeafRuntime::Custom { chain, pinned, .. } => {
                if *pinned {
                    (1.0, 0.0)
                } else {
                    (chain.probability(horizon)?, chain.mttf()?)
                }
            }
        };
        Ok(LeafEval {
            id: self.id.clone(),
            probability,
            mttf_h,
        })
    }

    /// Forward reliability at integration grid index `k` from the current
    /// state (conditional on having survived to now).
    fn reliability_at(&mut self, k: usize) -> Result<f64, RuntimeError> {
        let t = k as f64 * INTEGRATION_STEP_H;
        Ok(match &mut self.runtime {
            LeafRuntime::Constant { rate } => (-*rate * t).exp(),
            LeafRuntime::Propulsion {
                current,
                chains,
                pinned,
                ..
            } => {
                if *pinned {
                    0.0
                } else {
                    chains
                        .get_mut(current)
                        .expect("observed configuration")
                        .reliability_at(k)?
                }
            }
            LeafRuntime::Battery {
                active,
                inactive,
                activity,
                pinned,
            } => {
                if *pinned {
                    0.0
                } else {
                    match activity {
                        Activity::Active => active.reliability_at(k)?,
                        Activity::Inactive => inactive.reliability_at(k)?,
                    }
                }
            }
            LeafRuntime::Processor {
                params,
                acceleration,
                ..
            } => (-t * *acceleration / params.mttf_ref).exp(),
            LeafRuntime::Custom { chain, pinned, .. } => {
                if *pinned {
                    0.0
                } else {
                    chain.reliability_at(k)?
                }
            }
        })
    }

    fn kind_tag(&self) -> Option<ComponentKind> {
        match self.runtime {
            LeafRuntime::Battery { .. } => Some(ComponentKind::Battery),
            LeafRuntime::Propulsion { .. } => Some(ComponentKind::Propulsion),
            LeafRuntime::Processor { .. } => Some(ComponentKind::Processor),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ComponentKind {
    Battery,
    Propulsion,
    Processor,
}

/// Postorder program for the system-reliability integrand; kept consistent
/// with `fault_tree::evaluate_top` (see the `compiled_matches_evaluate_top`
/// test).
enum Op {
    Leaf(usize),
    Gate { kind: GateKind, arity: usize },
}

fn compile_tree(tree: &FaultTree, slot_index: &HashMap<String, usize>) -> Vec<Op> {
    let mut ops = Vec::new();
    let mut stack = vec![(tree.root, false)];
    while let Some((node, expanded)) = stack.pop() {
        match &tree.nodes[node].kind {
            NodeKind::Leaf(_) => ops.push(Op::Leaf(slot_index[&tree.nodes[node].id])),
            NodeKind::Gate { kind, children } => {
                if expanded {
                    ops.push(Op::Gate {
                        kind: *kind,
                        arity: children.len(),
                    });
                } else {
                    stack.push((node, true));
                    for &child in children.iter().rev() {
                        stack.push((child, false));
                    }
                }
            }
        }
    }
    ops
}

fn eval_compiled(ops: &[Op], leaf_failure_probs: &[f64]) -> f64 {
    let mut stack: Vec<f64> = Vec::with_capacity(8);
    for op in ops {
        match op {
            Op::Leaf(slot) => stack.push(leaf_failure_probs[*slot]),
            Op::Gate { kind, arity } => {
                let base = stack.len() - arity;
                let combined = match kind {
                    GateKind::And => stack[base..].iter().product(),
                    GateKind::Or => stack[base..]
                        .iter()
                        .fold(0.0, |acc, &p| acc + p * (1.0 - acc)),
                };
                stack.truncate(base);
                stack.push(combined);
            }
        }
    }
    debug_assert_eq!(stack.len(), 1);
    stack[0]
}

/// One mission's evaluation engine; feed it samples in timestamp order.
pub struct ReliabilityEngine {
    config: MissionConfig,
    tree: FaultTree,
    slots: Vec<LeafSlot>,
    ops: Vec<Op>,
    last_t_s: Option<f64>,
}

impl ReliabilityEngine {
    /// Builds an engine from the configuration, loading the configured tree
    /// document (or the built-in default).
    pub fn new(config: MissionConfig) -> Result<Self, RuntimeError> {
        let tree = config.load_tree()?;
        Self::with_tree(config, tree)
    }

    /// Builds an engine around an already-parsed tree.
    pub fn with_tree(config: MissionConfig, tree: FaultTree) -> Result<Self, RuntimeError> {
        config.validate()?;
        let propulsion_defaults = config.propulsion_params()?;
        let battery_defaults = config.battery_params()?;
        let processor_defaults = config.processor_params()?;

        let mut slots = Vec::new();
        for (id, model) in tree.leaves() {
            let runtime = match model {
                LeafModel::BasicEvent { failure_rate } => LeafRuntime::Constant {
                    rate: *failure_rate,
                },
                LeafModel::Propulsion(leaf) => {
                    let params = leaf.resolve(&propulsion_defaults);
                    let params =
                        PropulsionParams::new(params.configuration, params.motor_failure_rate)?;
                    let mut chains = HashMap::new();
                    chains.insert(
                        params.configuration,
                        ChainState::new(build_propulsion_model(&params), 0),
                    );
                    LeafRuntime::Propulsion {
                        lambda: params.motor_failure_rate,
                        current: params.configuration,
                        chains,
                        pinned: false,
                    }
                }
                LeafModel::Battery(leaf) => {
                    let params = leaf.resolve(&battery_defaults);
                    let params = BatteryParams::new(
                        params.failure_rate,
                        params.degradation_rate,
                        params.usage_rate,
                        params.inactivity_rate,
                    )?;
                    LeafRuntime::Battery {
                        active: Box::new(ChainState::new(
                            build_battery_model_for(&params, Activity::Active),
                            0,
                        )),
                        inactive: Box::new(ChainState::new(
                            build_battery_model_for(&params, Activity::Inactive),
                            0,
                        )),
                        activity: Activity::Active,
                        pinned: false,
                    }
                }
                LeafModel::Processor(leaf) => {
                    let params = leaf.resolve(&processor_defaults);
                    let params = ProcessorParams::new(
                        params.mttf_ref,
                        params.activation_energy,
                        params.boltzmann,
                        params.ref_temperature,
                        params.utilization,
                    )?;
                    LeafRuntime::Processor {
                        params,
                        hazard: 0.0,
                        last: None,
                        acceleration: 1.0,
                    }
                }
                LeafModel::Custom(leaf) => LeafRuntime::Custom {
                    chain: Box::new(ChainState::new(leaf.chain.clone(), leaf.initial_state)),
                    symptom: leaf.symptom.clone(),
                    pinned: false,
                },
            };
            slots.push(LeafSlot {
                id: id.to_string(),
                runtime,
            });
        }

        let slot_index: HashMap<String, usize> = slots
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.clone(), i))
            .collect();
        let ops = compile_tree(&tree, &slot_index);

        Ok(ReliabilityEngine {
            config,
            tree,
            slots,
            ops,
            last_t_s: None,
        })
    }

    pub fn config(&self) -> &MissionConfig {
        &self.config
    }

    pub fn tree(&self) -> &FaultTree {
        &self.tree
    }

    /// Evaluates one sample; timestamps must strictly increase.
    pub fn evaluate_sample(
        &mut self,
        sample: &TelemetrySample,
    ) -> Result<EvaluationResult, RuntimeError> {
        sample.validate()?;
        if let Some(previous) = self.last_t_s {
            if sample.t_s <= previous {
                return Err(RuntimeError::OutOfOrderSample {
                    previous,
                    current: sample.t_s,
                });
            }
        }

        for slot in &mut self.slots {
            slot.observe(sample)?;
        }

        let horizon = self.config.evaluation_horizon_h;
        let mut leaves = Vec::with_capacity(self.slots.len());
        for slot in &mut self.slots {
            leaves.push(slot.evaluate(horizon)?);
        }

        let component_probs: Vec<ComponentProbability> = leaves
            .iter()
            .map(|l| ComponentProbability {
                leaf_id: l.id.clone(),
                probability: l.probability,
                mttf_h: l.mttf_h,
            })
            .collect();
        let system_probability = evaluate_top(&self.tree, &component_probs)?;
        let recommendation = decide(system_probability, &self.config);
        let (system_mttf_h, system_mttf_capped) = self.integrate_system_mttf()?;

        let component = |kind: ComponentKind| -> Option<ComponentEval> {
            self.slots
                .iter()
                .zip(&leaves)
                .find(|(slot, _)| slot.kind_tag() == Some(kind))
                .map(|(_, eval)| ComponentEval {
                    probability: eval.probability,
                    mttf_h: eval.mttf_h,
                })
        };

        let result = EvaluationResult {
            t_s: sample.t_s,
            battery: component(ComponentKind::Battery),
            propulsion: component(ComponentKind::Propulsion),
            processor: component(ComponentKind::Processor),
            leaves,
            system_probability,
            system_mttf_h,
            system_mttf_capped,
            recommendation,
        };
        self.last_t_s = Some(sample.t_s);
        Ok(result)
    }

    /// Trapezoidal integral of the forward system reliability from the
    /// current states.
    fn integrate_system_mttf(&mut self) -> Result<(f64, bool), RuntimeError> {
        let mut failure_probs = vec![0.0; self.slots.len()];
        let at = |k: usize,
                  probs: &mut Vec<f64>,
                  slots: &mut Vec<LeafSlot>|
         -> Result<f64, RuntimeError> {
            for (i, slot) in slots.iter_mut().enumerate() {
                probs[i] = 1.0 - slot.reliability_at(k)?;
            }
            Ok(1.0 - eval_compiled(&self.ops, probs))
        };

        let mut integral = 0.0f64;
        let mut previous = at(0, &mut failure_probs, &mut self.slots)?;
        let mut k = 0usize;
        let capped = loop {
            k += 1;
            let t = k as f64 * INTEGRATION_STEP_H;
            if t > INTEGRATION_CAP_H {
                break true;
            }
            let current = at(k, &mut failure_probs, &mut self.slots)?;
            integral += INTEGRATION_STEP_H * (previous + current) / 2.0;
            previous = current;
            if t >= INTEGRATION_MIN_SPAN_H && current < INTEGRATION_RESIDUAL {
                break false;
            }
        };
        Ok((integral, capped))
    }
}

/// Replays a recorded stream and reports the verdict: `COMPLETED`, or
/// `ABORTED_AT t` at the first threshold crossing. Evaluation continues
/// past an abort (the result series covers every sample) but the verdict
/// latches on the first crossing.
pub fn replay(
    samples: &[TelemetrySample],
    config: &MissionConfig,
) -> Result<ReplayOutcome, RuntimeError> {
    let engine = ReliabilityEngine::new(config.clone())?;
    replay_with_engine(samples, engine)
}

/// [`replay`] with a caller-built engine (custom tree, shared config).
pub fn replay_with_engine(
    samples: &[TelemetrySample],
    mut engine: ReliabilityEngine,
) -> Result<ReplayOutcome, RuntimeError> {
    if samples.is_empty() {
        return Err(RuntimeError::EmptyStream);
    }
    let mut results = Vec::with_capacity(samples.len());
    let mut verdict = Verdict::Completed;
    for sample in samples {
        let result = engine.evaluate_sample(sample)?;
        if matches!(verdict, Verdict::Completed)
            && result.recommendation == Recommendation::EmergencyLanding
        {
            verdict = Verdict::Aborted { t_s: result.t_s };
        }
        results.push(result);
    }
    Ok(ReplayOutcome { results, verdict })
}
