//! Continuous-time Markov and semi-Markov machinery.
//!
//! A [`MarkovModel`] is a labeled-state stochastic process with a designated
//! set of absorbing (failure) states. Two kinds are supported:
//!
//! - **exponential rates**: the process is a CTMC described by a generator
//!   matrix of transition rates (1/hour); transient distributions come from
//!   [`transient_distribution`] (uniformization).
//! - **general sojourn**: the process is a semi-Markov process described by a
//!   kernel of embedded jump probabilities and per-transition sojourn
//!   distributions; transient distributions come from
//!   [`solve_markov_renewal`] (time-domain convolution quadrature).
//!
//! Both kinds share [`mttf_from_state`] (fundamental-matrix mean time to
//! absorption) and [`simulate_paths`] (a seed-deterministic Monte Carlo
//! oracle used for validation).
//!
//! Models are immutable after construction and every operation is a pure
//! function of its inputs, so everything here is safe to call concurrently.

mod canonical;
mod mttf;
mod renewal;
mod simulate;
mod transient;

pub use canonical::{canonical_form, CanonicalDecomposition, CanonicalError};
pub use mttf::{mttf_from_state, MttfError};
pub use renewal::{
    solve_markov_renewal, solve_markov_renewal_strict, GridCoarseness, RenewalError,
    RenewalSolution, TimeGrid,
};
pub use simulate::{
    simulate_paths, OccupancyEstimate, SimulationError, SimulationOptions, SimulationOutcome,
};
pub use transient::{
    transient_distribution, transient_distribution_with_tolerance, TransientError,
    DEFAULT_UNIFORMIZATION_TOL,
};

use nalgebra::DMatrix;
use std::collections::BTreeSet;
use thiserror::Error;

/// Generator rows must sum to zero within this tolerance.
pub const GENERATOR_ROW_SUM_TOL: f64 = 1e-12;
/// Embedded jump probabilities out of a non-absorbing state must sum to one
/// within this tolerance.
pub const JUMP_ROW_SUM_TOL: f64 = 1e-12;
/// Probability vectors must sum to one within this tolerance.
pub const DISTRIBUTION_SUM_TOL: f64 = 1e-9;

/// Errors raised while building or querying a [`MarkovModel`].
#[derive(Debug, Error)]
pub enum MarkovError {
    #[error("model needs at least 2 states, got {0}")]
    TooFewStates(usize),
    #[error("duplicate state label `{0}`")]
    DuplicateState(String),
    #[error("transition references undeclared state `{0}`")]
    UnknownState(String),
    #[error("duplicate transition {from} -> {to}")]
    DuplicateTransition { from: String, to: String },
    #[error("self-loop transition on `{0}` is not allowed")]
    SelfLoop(String),
    #[error("transition {from} -> {to} has non-positive rate {rate}")]
    NegativeRate { from: String, to: String, rate: f64 },
    #[error("jump probability {probability} on {from} -> {to} is outside (0, 1]")]
    InvalidJumpProbability {
        from: String,
        to: String,
        probability: f64,
    },
    #[error("jump probabilities out of `{state}` sum to {sum}, expected 1")]
    JumpProbabilitySum { state: String, sum: f64 },
    #[error("invalid sojourn distribution on {from} -> {to}: {detail}")]
    InvalidSojourn {
        from: String,
        to: String,
        detail: String,
    },
    #[error("absorbing state `{0}` has outgoing transitions")]
    AbsorbingOutflow(String),
    #[error("model declares no absorbing state")]
    NoAbsorbingState,
    #[error("no absorbing state is reachable from operational state `{0}`")]
    UnreachableAbsorbing(String),
    #[error("probability vector has {got} entries, model has {expected} states")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("probability vector sums to {0}, expected 1 within 1e-9")]
    NotNormalized(f64),
    #[error("probability entry {value} at index {index} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
}

/// Which mathematical description backs a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// CTMC with a generator matrix of exponential rates.
    ExponentialRates,
    /// Semi-Markov process with a sojourn-distribution kernel.
    GeneralSojourn,
}

/// Sojourn-time distribution attached to one kernel transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SojournDistribution {
    Exponential { rate: f64 },
    Deterministic { delay: f64 },
    Weibull { shape: f64, scale: f64 },
}

impl SojournDistribution {
    /// P(sojourn <= t).
    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match *self {
            SojournDistribution::Exponential { rate } => 1.0 - (-rate * t).exp(),
            SojournDistribution::Deterministic { delay } => {
                if t >= delay {
                    1.0
                } else {
                    0.0
                }
            }
            SojournDistribution::Weibull { shape, scale } => 1.0 - (-(t / scale).powf(shape)).exp(),
        }
    }

    /// Mean sojourn time.
    pub fn mean(&self) -> f64 {
        match *self {
            SojournDistribution::Exponential { rate } => 1.0 / rate,
            SojournDistribution::Deterministic { delay } => delay,
            SojournDistribution::Weibull { shape, scale } => {
                scale * libm::tgamma(1.0 + 1.0 / shape)
            }
        }
    }

    /// Time scale used by the grid-coarseness check.
    pub fn characteristic_time(&self) -> f64 {
        match *self {
            SojournDistribution::Exponential { rate } => 1.0 / rate,
            SojournDistribution::Deterministic { delay } => delay,
            SojournDistribution::Weibull { scale, .. } => scale,
        }
    }

    /// Inverse-transform sample; `u` must lie in [0, 1).
    pub(crate) fn sample(&self, u: f64) -> f64 {
        match *self {
            SojournDistribution::Exponential { rate } => -(1.0 - u).ln() / rate,
            SojournDistribution::Deterministic { delay } => delay,
            SojournDistribution::Weibull { shape, scale } => {
                scale * (-(1.0 - u).ln()).powf(1.0 / shape)
            }
        }
    }

    fn validate(&self) -> Result<(), String> {
        let ok = match *self {
            SojournDistribution::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            SojournDistribution::Deterministic { delay } => delay > 0.0 && delay.is_finite(),
            SojournDistribution::Weibull { shape, scale } => {
                shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(format!("parameters must be positive and finite: {self:?}"))
        }
    }
}

/// One kernel transition: embedded jump probability plus sojourn law.
#[derive(Debug, Clone)]
pub struct KernelEntry {
    pub probability: f64,
    pub sojourn: SojournDistribution,
}

/// Labeled-state stochastic process with designated absorbing states.
#[derive(Debug, Clone)]
pub struct MarkovModel {
    states: Vec<String>,
    kind: ModelKind,
    generator: Option<DMatrix<f64>>,
    kernel: Option<Vec<Vec<Option<KernelEntry>>>>,
    absorbing: BTreeSet<usize>,
}

impl MarkovModel {
    /// Builds an exponential-rates model from named transitions.
    ///
    /// `transitions` entries are `(from, to, rate)` with rates in 1/hour.
    /// The generator diagonal is derived so rows sum to zero.
    pub fn from_rates(
        states: &[&str],
        transitions: &[(&str, &str, f64)],
        absorbing: &[&str],
    ) -> Result<Self, MarkovError> {
        let (labels, index) = Self::check_states(states)?;
        let n = labels.len();
        let absorbing = Self::resolve_set(absorbing, &index)?;
        let mut generator = DMatrix::<f64>::zeros(n, n);
        let mut seen = BTreeSet::new();
        for &(from, to, rate) in transitions {
            let (i, j) = Self::resolve_edge(from, to, &index)?;
            if !seen.insert((i, j)) {
                return Err(MarkovError::DuplicateTransition {
                    from: from.into(),
                    to: to.into(),
                });
            }
            if !rate.is_finite() || rate <= 0.0 {
                return Err(MarkovError::NegativeRate {
                    from: from.into(),
                    to: to.into(),
                    rate,
                });
            }
            if absorbing.contains(&i) {
                return Err(MarkovError::AbsorbingOutflow(from.into()));
            }
            generator[(i, j)] = rate;
        }
        for i in 0..n {
            let row_sum: f64 = (0..n).filter(|&j| j != i).map(|j| generator[(i, j)]).sum();
            generator[(i, i)] = -row_sum;
        }
        let model = MarkovModel {
            states: labels,
            kind: ModelKind::ExponentialRates,
            generator: Some(generator),
            kernel: None,
            absorbing,
        };
        model.check_reachability()?;
        Ok(model)
    }

    /// Builds a general-sojourn model from kernel transitions.
    ///
    /// `transitions` entries are `(from, to, jump probability, sojourn)`.
    /// Jump probabilities out of each non-absorbing state must sum to one.
    pub fn from_kernel(
        states: &[&str],
        transitions: &[(&str, &str, f64, SojournDistribution)],
        absorbing: &[&str],
    ) -> Result<Self, MarkovError> {
        let (labels, index) = Self::check_states(states)?;
        let n = labels.len();
        let absorbing = Self::resolve_set(absorbing, &index)?;
        let mut kernel: Vec<Vec<Option<KernelEntry>>> = vec![vec![None; n]; n];
        for (from, to, probability, sojourn) in transitions {
            let (i, j) = Self::resolve_edge(from, to, &index)?;
            if kernel[i][j].is_some() {
                return Err(MarkovError::DuplicateTransition {
                    from: (*from).into(),
                    to: (*to).into(),
                });
            }
            if probability.is_nan() || *probability <= 0.0 || *probability > 1.0 {
                return Err(MarkovError::InvalidJumpProbability {
                    from: (*from).into(),
                    to: (*to).into(),
                    probability: *probability,
                });
            }
            sojourn
                .validate()
                .map_err(|detail| MarkovError::InvalidSojourn {
                    from: (*from).into(),
                    to: (*to).into(),
                    detail,
                })?;
            if absorbing.contains(&i) {
                return Err(MarkovError::AbsorbingOutflow((*from).into()));
            }
            kernel[i][j] = Some(KernelEntry {
                probability: *probability,
                sojourn: *sojourn,
            });
        }
        for i in 0..n {
            if absorbing.contains(&i) {
                continue;
            }
            let sum: f64 = kernel[i]
                .iter()
                .flatten()
                .map(|entry| entry.probability)
                .sum();
            if (sum - 1.0).abs() > JUMP_ROW_SUM_TOL {
                return Err(MarkovError::JumpProbabilitySum {
                    state: labels[i].clone(),
                    sum,
                });
            }
        }
        let model = MarkovModel {
            states: labels,
            kind: ModelKind::GeneralSojourn,
            generator: None,
            kernel: Some(kernel),
            absorbing,
        };
        model.check_reachability()?;
        Ok(model)
    }

    fn check_states(
        states: &[&str],
    ) -> Result<(Vec<String>, std::collections::HashMap<String, usize>), MarkovError> {
        if states.len() < 2 {
            return Err(MarkovError::TooFewStates(states.len()));
        }
        let mut index = std::collections::HashMap::new();
        let mut labels = Vec::with_capacity(states.len());
        for (i, &s) in states.iter().enumerate() {
            if index.insert(s.to_string(), i).is_some() {
                return Err(MarkovError::DuplicateState(s.into()));
            }
            labels.push(s.to_string());
        }
        Ok((labels, index))
    }

    fn resolve_set(
        names: &[&str],
        index: &std::collections::HashMap<String, usize>,
    ) -> Result<BTreeSet<usize>, MarkovError> {
        let mut set = BTreeSet::new();
        for &name in names {
            let i = *index
                .get(name)
                .ok_or_else(|| MarkovError::UnknownState(name.into()))?;
            set.insert(i);
        }
        if set.is_empty() {
            return Err(MarkovError::NoAbsorbingState);
        }
        Ok(set)
    }

    fn resolve_edge(
        from: &str,
        to: &str,
        index: &std::collections::HashMap<String, usize>,
    ) -> Result<(usize, usize), MarkovError> {
        let i = *index
            .get(from)
            .ok_or_else(|| MarkovError::UnknownState(from.into()))?;
        let j = *index
            .get(to)
            .ok_or_else(|| MarkovError::UnknownState(to.into()))?;
        if i == j {
            return Err(MarkovError::SelfLoop(from.into()));
        }
        Ok((i, j))
    }

    /// Every operational state must reach some absorbing state.
    fn check_reachability(&self) -> Result<(), MarkovError> {
        let n = self.states.len();
        for start in 0..n {
            if self.absorbing.contains(&start) {
                continue;
            }
            let mut stack = vec![start];
            let mut visited = vec![false; n];
            visited[start] = true;
            let mut reached = false;
            while let Some(i) = stack.pop() {
                if self.absorbing.contains(&i) {
                    reached = true;
                    break;
                }
                for (j, seen) in visited.iter_mut().enumerate() {
                    if !*seen && self.has_edge(i, j) {
                        *seen = true;
                        stack.push(j);
                    }
                }
            }
            if !reached {
                return Err(MarkovError::UnreachableAbsorbing(
                    self.states[start].clone(),
                ));
            }
        }
        Ok(())
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        match self.kind {
            ModelKind::ExponentialRates => self.generator.as_ref().unwrap()[(i, j)] > 0.0,
            ModelKind::GeneralSojourn => self.kernel.as_ref().unwrap()[i][j].is_some(),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    pub fn state_label(&self, index: usize) -> &str {
        &self.states[index]
    }

    pub fn is_absorbing(&self, index: usize) -> bool {
        self.absorbing.contains(&index)
    }

    /// Indices of absorbing (failure) states, ascending.
    pub fn absorbing_states(&self) -> &BTreeSet<usize> {
        &self.absorbing
    }

    /// Indices of operational states, ascending.
    pub fn operational_states(&self) -> Vec<usize> {
        (0..self.states.len())
            .filter(|i| !self.absorbing.contains(i))
            .collect()
    }

    /// Generator matrix; `None` for general-sojourn models.
    pub fn generator(&self) -> Option<&DMatrix<f64>> {
        self.generator.as_ref()
    }

    pub fn kernel_entry(&self, from: usize, to: usize) -> Option<&KernelEntry> {
        self.kernel.as_ref()?[from][to].as_ref()
    }

    /// Total exit rate out of a state (exponential kind only).
    pub fn exit_rate(&self, state: usize) -> Option<f64> {
        self.generator.as_ref().map(|g| -g[(state, state)])
    }

    /// One-step transition matrix of the embedded jump chain. Absorbing
    /// states get unit self-loops so the matrix is stochastic.
    pub fn embedded_jump_matrix(&self) -> DMatrix<f64> {
        let n = self.states.len();
        let mut p = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            if self.absorbing.contains(&i) {
                p[(i, i)] = 1.0;
                continue;
            }
            match self.kind {
                ModelKind::ExponentialRates => {
                    let g = self.generator.as_ref().unwrap();
                    let exit = -g[(i, i)];
                    for j in 0..n {
                        if j != i && g[(i, j)] > 0.0 {
                            p[(i, j)] = g[(i, j)] / exit;
                        }
                    }
                }
                ModelKind::GeneralSojourn => {
                    let kernel = self.kernel.as_ref().unwrap();
                    for (j, entry) in kernel[i].iter().enumerate() {
                        if let Some(entry) = entry {
                            p[(i, j)] = entry.probability;
                        }
                    }
                }
            }
        }
        p
    }

    /// Mean sojourn time in a state; infinite for absorbing states.
    pub fn mean_sojourn(&self, state: usize) -> f64 {
        if self.absorbing.contains(&state) {
            return f64::INFINITY;
        }
        match self.kind {
            ModelKind::ExponentialRates => 1.0 / self.exit_rate(state).unwrap(),
            ModelKind::GeneralSojourn => self.kernel.as_ref().unwrap()[state]
                .iter()
                .flatten()
                .map(|entry| entry.probability * entry.sojourn.mean())
                .sum(),
        }
    }

    /// Total probability mass on absorbing states in `probs`.
    pub fn absorbing_mass(&self, probs: &[f64]) -> f64 {
        self.absorbing.iter().map(|&i| probs[i]).sum()
    }
}

/// Probability vector over model states at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution {
    time: f64,
    probs: Vec<f64>,
}

impl StateDistribution {
    /// Validates entries in [0, 1] and normalization within 1e-9.
    pub fn new(time: f64, probs: Vec<f64>) -> Result<Self, MarkovError> {
        if time < 0.0 || !time.is_finite() {
            return Err(MarkovError::NegativeTime(time));
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(MarkovError::ProbabilityOutOfRange { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > DISTRIBUTION_SUM_TOL {
            return Err(MarkovError::NotNormalized(sum));
        }
        Ok(StateDistribution { time, probs })
    }

    /// Unit mass on one state at time zero.
    pub fn point(state_count: usize, state: usize) -> Self {
        let mut probs = vec![0.0; state_count];
        probs[state] = 1.0;
        StateDistribution { time: 0.0, probs }
    }

    /// Constructor for solver output: clamps roundoff-negative entries.
    pub(crate) fn from_computed(time: f64, mut probs: Vec<f64>) -> Self {
        for p in &mut probs {
            if *p < 0.0 {
                debug_assert!(*p > -1e-9, "solver produced {p}");
                *p = 0.0;
            }
        }
        StateDistribution { time, probs }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, state: usize) -> f64 {
        self.probs[state]
    }
}
