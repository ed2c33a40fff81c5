//! Time-domain solver for the Markov renewal equation of a semi-Markov
//! process.
//!
//! The conditional transition probabilities satisfy the Volterra system
//!
//! ```text
//! P_ij(t) = d_ij (1 - G_i(t)) + sum_k  ∫_0^t  P_kj(t - x) dQ_ik(x)
//! ```
//!
//! where `Q_ik(t)` is the kernel (jump probability times sojourn CDF) and
//! `G_i` its row sum. The Stieltjes convolution is discretized on a uniform
//! grid with trapezoidal weights and marched forward in time; the implicit
//! first-cell term is absorbed into a constant matrix factored once. Kernel
//! increments are exact CDF differences, so a deterministic sojourn
//! contributes its whole jump to the grid cell containing its delay.

use super::{MarkovError, MarkovModel, ModelKind, StateDistribution};
use nalgebra::DMatrix;

/// Uniform time grid `0, step, 2*step, ...` with `points` entries.
#[derive(Debug, Clone)]
pub struct TimeGrid {
    step: f64,
    points: usize,
}

impl TimeGrid {
    pub fn new(step: f64, points: usize) -> Result<Self, RenewalError> {
        if !step.is_finite() || step <= 0.0 {
            return Err(RenewalError::InvalidGrid(format!(
                "step {step} must be > 0"
            )));
        }
        if points < 2 {
            return Err(RenewalError::InvalidGrid(format!(
                "grid needs at least 2 points, got {points}"
            )));
        }
        Ok(TimeGrid { step, points })
    }

    /// Grid covering `[0, span]` with the given step (last point >= span).
    pub fn from_span(step: f64, span: f64) -> Result<Self, RenewalError> {
        if !span.is_finite() || span <= 0.0 {
            return Err(RenewalError::InvalidGrid(format!(
                "span {span} must be > 0"
            )));
        }
        let points = (span / step).ceil() as usize + 1;
        TimeGrid::new(step, points)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|k| self.time(k))
    }
}

/// Warning attached when the grid step exceeds a tenth of the smallest
/// characteristic sojourn time.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCoarseness {
    pub step: f64,
    pub limit: f64,
}

impl std::fmt::Display for GridCoarseness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "grid step {} exceeds {} (smallest characteristic time / 10); results may be inaccurate",
            self.step, self.limit
        )
    }
}

/// Grid solution of the renewal system for one initial distribution.
#[derive(Debug, Clone)]
pub struct RenewalSolution {
    pub distributions: Vec<StateDistribution>,
    pub grid_warning: Option<GridCoarseness>,
}

#[derive(Debug, thiserror::Error)]
pub enum RenewalError {
    /// The model is exponential-rates; use `transient_distribution`.
    #[error("model is exponential-rates; use transient_distribution")]
    WrongKind,
    #[error("{0}")]
    InvalidGrid(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(GridCoarseness),
    #[error(transparent)]
    Model(#[from] MarkovError),
}

/// Solves the renewal system on `grid`, starting from `p0`. A too-coarse
/// grid is reported as a warning on the returned solution.
pub fn solve_markov_renewal(
    model: &MarkovModel,
    p0: &StateDistribution,
    grid: &TimeGrid,
) -> Result<RenewalSolution, RenewalError> {
    solve(model, p0, grid, false)
}

/// Like [`solve_markov_renewal`] but a too-coarse grid is an error.
pub fn solve_markov_renewal_strict(
    model: &MarkovModel,
    p0: &StateDistribution,
    grid: &TimeGrid,
) -> Result<RenewalSolution, RenewalError> {
    solve(model, p0, grid, true)
}

fn solve(
    model: &MarkovModel,
    p0: &StateDistribution,
    grid: &TimeGrid,
    strict: bool,
) -> Result<RenewalSolution, RenewalError> {
    if model.kind() != ModelKind::GeneralSojourn {
        return Err(RenewalError::WrongKind);
    }
    let n = model.state_count();
    if p0.probabilities().len() != n {
        return Err(RenewalError::Model(MarkovError::DimensionMismatch {
            expected: n,
            got: p0.probabilities().len(),
        }));
    }

    let grid_warning = coarseness(model, grid);
    if strict {
        if let Some(w) = grid_warning {
            return Err(RenewalError::GridTooCoarse(w));
        }
    }

    let m = grid.len();
    let h = grid.step();

    // Kernel transition pairs and their CDF increments per grid cell.
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for k in 0..n {
            if model.kernel_entry(i, k).is_some() {
                pairs.push((i, k));
            }
        }
    }
    // increments[p][l] = Q_ik((l+1)h) - Q_ik(lh) for pair p.
    let mut increments: Vec<Vec<f64>> = vec![vec![0.0; m.saturating_sub(1)]; pairs.len()];
    for (p, &(i, k)) in pairs.iter().enumerate() {
        let entry = model.kernel_entry(i, k).unwrap();
        let mut prev = 0.0;
        for (l, slot) in increments[p].iter_mut().enumerate() {
            let next = entry.probability * entry.sojourn.cdf((l + 1) as f64 * h);
            *slot = next - prev;
            prev = next;
        }
    }

    // Survivor diagonal d_i(t) = 1 - G_i(t).
    let survivor = |i: usize, t: f64| -> f64 {
        let mut g = 0.0;
        for k in 0..n {
            if let Some(entry) = model.kernel_entry(i, k) {
                g += entry.probability * entry.sojourn.cdf(t);
            }
        }
        1.0 - g
    };

    // Implicit factor I - (1/2) dQ[0], constant over the march.
    let mut implicit = DMatrix::<f64>::identity(n, n);
    for (p, &(i, k)) in pairs.iter().enumerate() {
        implicit[(i, k)] -= 0.5 * increments[p][0];
    }
    let implicit_lu = implicit.lu();

    let mut solution: Vec<DMatrix<f64>> = Vec::with_capacity(m);
    solution.push(DMatrix::identity(n, n));

    for step in 1..m {
        let mut rhs = DMatrix::<f64>::zeros(n, n);
        let t = grid.time(step);
        for i in 0..n {
            rhs[(i, i)] = survivor(i, t);
        }
        // Explicit half of the first cell plus all interior cells.
        for (p, &(i, k)) in pairs.iter().enumerate() {
            {
                let c = 0.5 * increments[p][0];
                for j in 0..n {
                    rhs[(i, j)] += c * solution[step - 1][(k, j)];
                }
            }
            for l in 1..step {
                let c = 0.5 * increments[p][l];
                if c == 0.0 {
                    continue;
                }
                for j in 0..n {
                    rhs[(i, j)] +=
                        c * (solution[step - l][(k, j)] + solution[step - l - 1][(k, j)]);
                }
            }
        }
        let solved = implicit_lu
            .solve(&rhs)
            .expect("implicit renewal factor is diagonally dominant");
        solution.push(solved);
    }

    let initial = p0.probabilities();
    let base_time = p0.time();
    let distributions = solution
        .iter()
        .enumerate()
        .map(|(k, pk)| {
            let probs: Vec<f64> = (0..n)
                .map(|j| (0..n).map(|i| initial[i] * pk[(i, j)]).sum())
                .collect();
            StateDistribution::from_computed(base_time + grid.time(k), probs)
        })
        .collect();

    Ok(RenewalSolution {
        distributions,
        grid_warning,
    })
}

fn coarseness(model: &MarkovModel, grid: &TimeGrid) -> Option<GridCoarseness> {
    let n = model.state_count();
    let mut smallest = f64::INFINITY;
    for i in 0..n {
        for k in 0..n {
            if let Some(entry) = model.kernel_entry(i, k) {
                smallest = smallest.min(entry.sojourn.characteristic_time());
            }
        }
    }
    let limit = smallest / 10.0;
    if grid.step() > limit {
        Some(GridCoarseness {
            step: grid.step(),
            limit,
        })
    } else {
        None
    }
}
