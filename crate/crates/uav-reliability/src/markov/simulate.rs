//! Monte Carlo path sampler used as a validation oracle.
//!
//! Paths are simulated independently with per-path RNGs derived from the
//! master seed, so results are bit-identical for a fixed seed regardless of
//! how the work is scheduled across threads.

use super::{MarkovError, MarkovModel, ModelKind, StateDistribution};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct SimulationOptions {
    /// Per-path simulation cutoff in hours; paths still operational at the
    /// horizon are counted as censored. Defaults to infinity (simulate to
    /// absorption).
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Times at which state occupancy is estimated; must not exceed the
    /// horizon.
    pub occupancy_times: Vec<f64>,
}

impl SimulationOptions {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        SimulationOptions {
            horizon: f64::INFINITY,
            n_paths,
            seed,
            occupancy_times: Vec::new(),
        }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_occupancy_times(mut self, times: &[f64]) -> Self {
        self.occupancy_times = times.to_vec();
        self
    }
}

/// Fraction of paths occupying each state at one query time.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyEstimate {
    pub time: f64,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutcome {
    /// Absorption times of absorbed paths, in path order.
    pub absorption_times: Vec<f64>,
    /// Paths still operational at the horizon.
    pub censored: usize,
    pub occupancy: Vec<OccupancyEstimate>,
    pub n_paths: usize,
}

impl SimulationOutcome {
    pub fn absorption_mean(&self) -> Option<f64> {
        if self.absorption_times.is_empty() {
            return None;
        }
        Some(self.absorption_times.iter().sum::<f64>() / self.absorption_times.len() as f64)
    }

    /// Standard error of the absorption-time mean.
    pub fn absorption_std_error(&self) -> Option<f64> {
        let mean = self.absorption_mean()?;
        let n = self.absorption_times.len();
        if n < 2 {
            return None;
        }
        let var = self
            .absorption_times
            .iter()
            .map(|t| (t - mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64;
        Some((var / n as f64).sqrt())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimulationError {
    #[error("n_paths must be at least 1")]
    ZeroPaths,
    #[error("occupancy time {0} exceeds the simulation horizon")]
    OccupancyBeyondHorizon(f64),
    #[error("horizon must be positive")]
    InvalidHorizon,
    #[error(transparent)]
    Model(#[from] MarkovError),
}

/// Simulates `options.n_paths` trajectories starting from `p0`.
pub fn simulate_paths(
    model: &MarkovModel,
    p0: &StateDistribution,
    options: &SimulationOptions,
) -> Result<SimulationOutcome, SimulationError> {
    if options.n_paths == 0 {
        return Err(SimulationError::ZeroPaths);
    }
    if options.horizon.is_nan() || options.horizon <= 0.0 {
        return Err(SimulationError::InvalidHorizon);
    }
    let n = model.state_count();
    if p0.probabilities().len() != n {
        return Err(SimulationError::Model(MarkovError::DimensionMismatch {
            expected: n,
            got: p0.probabilities().len(),
        }));
    }
    let mut query_times = options.occupancy_times.clone();
    query_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if let Some(&worst) = query_times.last() {
        if worst > options.horizon {
            return Err(SimulationError::OccupancyBeyondHorizon(worst));
        }
    }

    // One record per path: absorption time (if absorbed) and the state
    // occupied at each query time. Collected in path order to keep the
    // outcome independent of thread scheduling.
    let records: Vec<(Option<f64>, Vec<usize>)> = (0..options.n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(options.seed, path as u64));
            walk_path(model, p0, options.horizon, &query_times, &mut rng)
        })
        .collect();

    let mut absorption_times = Vec::new();
    let mut censored = 0usize;
    let mut counts = vec![vec![0u64; n]; query_times.len()];
    for (absorbed_at, states) in &records {
        match absorbed_at {
            Some(t) => absorption_times.push(*t),
            None => censored += 1,
        }
        for (qi, &state) in states.iter().enumerate() {
            counts[qi][state] += 1;
        }
    }
    let occupancy = query_times
        .iter()
        .zip(counts)
        .map(|(&time, count)| OccupancyEstimate {
            time,
            probs: count
                .iter()
                .map(|&c| c as f64 / options.n_paths as f64)
                .collect(),
        })
        .collect();

    Ok(SimulationOutcome {
        absorption_times,
        censored,
        occupancy,
        n_paths: options.n_paths,
    })
}

/// SplitMix64 mix of the master seed and path index.
fn derive_seed(master: u64, path: u64) -> u64 {
    let mut z = master ^ (path.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn walk_path(
    model: &MarkovModel,
    p0: &StateDistribution,
    horizon: f64,
    query_times: &[f64],
    rng: &mut ChaCha8Rng,
) -> (Option<f64>, Vec<usize>) {
    let n = model.state_count();
    let mut state = sample_index(p0.probabilities(), rng.random::<f64>());
    let mut clock = 0.0f64;
    let mut states_at = Vec::with_capacity(query_times.len());
    let mut next_query = 0usize;
    let absorbed_at = loop {
        if model.is_absorbing(state) {
            break Some(clock);
        }
        let (sojourn, destination) = match model.kind() {
            ModelKind::ExponentialRates => {
                let generator = model.generator().unwrap();
                let exit = -generator[(state, state)];
                let sojourn = -(1.0 - rng.random::<f64>()).ln() / exit;
                let mut pick = rng.random::<f64>() * exit;
                let mut destination = state;
                for j in 0..n {
                    if j == state {
                        continue;
                    }
                    let rate = generator[(state, j)];
                    if rate <= 0.0 {
                        continue;
                    }
                    if pick < rate {
                        destination = j;
                        break;
                    }
                    pick -= rate;
                    destination = j; // fall back to the last edge on roundoff
                }
                (sojourn, destination)
            }
            ModelKind::GeneralSojourn => {
                let mut pick = rng.random::<f64>();
                let mut destination = state;
                for j in 0..n {
                    if let Some(entry) = model.kernel_entry(state, j) {
                        if pick < entry.probability {
                            destination = j;
                            break;
                        }
                        pick -= entry.probability;
                        destination = j;
                    }
                }
                let entry = model.kernel_entry(state, destination).unwrap();
                (entry.sojourn.sample(rng.random::<f64>()), destination)
            }
        };
        let jump_at = clock + sojourn;
        while next_query < query_times.len() && query_times[next_query] < jump_at {
            states_at.push(state);
            next_query += 1;
        }
        if jump_at > horizon {
            break None;
        }
        clock = jump_at;
        state = destination;
    };
    // Remaining query times see the terminal state (absorbing or censored).
    while next_query < query_times.len() {
        states_at.push(state);
        next_query += 1;
    }
    (absorbed_at, states_at)
}

fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut pick = u;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        if pick < p {
            return i;
        }
        pick -= p;
        last = i;
    }
    last
}
