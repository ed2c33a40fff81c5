//! Transient distributions of exponential-rates models by uniformization.

use super::{MarkovError, MarkovModel, ModelKind, StateDistribution};
use nalgebra::{DMatrix, RowDVector};

/// Default bound on the Poisson truncation error of one call.
///
/// The series is cut once the accumulated Poisson weights reach
/// `1 - tolerance`, so the L1 error of the returned vector is at most the
/// tolerance (split evenly across internal time steps for large `rate * t`).
pub const DEFAULT_UNIFORMIZATION_TOL: f64 = 1e-10;

/// Largest `rate * dt` handled in a single uniformization pass. Longer
/// spans are split into steps so `exp(-rate * dt)` stays representable.
const MAX_RATE_STEP: f64 = 64.0;

/// State probabilities of an exponential-rates model at time `t` (hours),
/// starting from `p0`. The returned distribution is stamped `p0.time() + t`.
pub fn transient_distribution(
    model: &MarkovModel,
    p0: &StateDistribution,
    t: f64,
) -> Result<StateDistribution, TransientError> {
    transient_distribution_with_tolerance(model, p0, t, DEFAULT_UNIFORMIZATION_TOL)
}

/// [`transient_distribution`] with an explicit truncation tolerance.
pub fn transient_distribution_with_tolerance(
    model: &MarkovModel,
    p0: &StateDistribution,
    t: f64,
    tolerance: f64,
) -> Result<StateDistribution, TransientError> {
    if model.kind() != ModelKind::ExponentialRates {
        return Err(TransientError::WrongKind);
    }
    let n = model.state_count();
    if p0.probabilities().len() != n {
        return Err(TransientError::Model(MarkovError::DimensionMismatch {
            expected: n,
            got: p0.probabilities().len(),
        }));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(TransientError::Model(MarkovError::NegativeTime(t)));
    }
    let generator = model.generator().expect("exponential model has generator");
    let rate = (0..n).map(|i| -generator[(i, i)]).fold(0.0f64, f64::max);
    if t == 0.0 || rate == 0.0 {
        return Ok(StateDistribution::from_computed(
            p0.time() + t,
            p0.probabilities().to_vec(),
        ));
    }

    // Row-stochastic uniformized chain P = I + A / rate.
    let mut uniformized = generator / rate;
    for i in 0..n {
        uniformized[(i, i)] += 1.0;
    }

    let steps = (rate * t / MAX_RATE_STEP).ceil().max(1.0) as usize;
    let step_tol = tolerance / steps as f64;
    let dt = t / steps as f64;
    let mu = rate * dt;

    let mut current = RowDVector::from_row_slice(p0.probabilities());
    for _ in 0..steps {
        current = uniformization_step(&current, &uniformized, mu, step_tol);
    }

    Ok(StateDistribution::from_computed(
        p0.time() + t,
        current.iter().copied().collect(),
    ))
}

fn uniformization_step(
    v: &RowDVector<f64>,
    p: &DMatrix<f64>,
    mu: f64,
    tol: f64,
) -> RowDVector<f64> {
    let mut weight = (-mu).exp();
    let mut cumulative = weight;
    let mut term = v.clone();
    let mut acc = &term * weight;
    let mut k = 0usize;
    while cumulative < 1.0 - tol {
        k += 1;
        term *= p;
        weight *= mu / k as f64;
        acc += &term * weight;
        cumulative += weight;
        if k > 1_000_000 {
            debug_assert!(false, "uniformization failed to converge");
            break;
        }
    }
    acc
}

#[derive(Debug, thiserror::Error)]
pub enum TransientError {
    /// The model is general-sojourn; use the renewal solver instead.
    #[error("model has general sojourn distributions; use solve_markov_renewal")]
    WrongKind,
    #[error(transparent)]
    Model(#[from] MarkovError),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(rate: f64) -> MarkovModel {
        MarkovModel::from_rates(&["Op", "Fail"], &[("Op", "Fail", rate)], &["Fail"]).unwrap()
    }

    #[test]
    fn zero_time_returns_initial() {
        let m = two_state(0.001);
        let p0 = StateDistribution::new(0.0, vec![0.7, 0.3]).unwrap();
        let p = transient_distribution(&m, &p0, 0.0).unwrap();
        assert_eq!(p.probabilities(), p0.probabilities());
    }

    #[test]
    fn matches_closed_form_exponential_decay() {
        let m = two_state(0.001);
        let p0 = StateDistribution::point(2, 0);
        let p = transient_distribution(&m, &p0, 1000.0).unwrap();
        let expected = (-1.0f64).exp();
        assert!((p.probability(0) - expected).abs() < 1e-9);
        assert!((p.probability(1) - (1.0 - expected)).abs() < 1e-9);
    }

    #[test]
    fn conserves_probability_mass() {
        let m = MarkovModel::from_rates(
            &["A", "B", "C", "D"],
            &[
                ("A", "B", 0.02),
                ("B", "C", 0.015),
                ("A", "D", 0.001),
                ("B", "D", 0.002),
                ("C", "D", 0.03),
            ],
            &["D"],
        )
        .unwrap();
        let p0 = StateDistribution::point(4, 0);
        for &t in &[1.0, 10.0, 100.0, 1000.0, 20000.0] {
            let p = transient_distribution(&m, &p0, t).unwrap();
            let sum: f64 = p.probabilities().iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "sum at t={t}: {sum}");
        }
    }

    #[test]
    fn long_horizon_is_stable() {
        // rate * t = 2000 forces internal stepping.
        let m = two_state(1.0);
        let p0 = StateDistribution::point(2, 0);
        let p = transient_distribution(&m, &p0, 2000.0).unwrap();
        assert!(p.probability(0) >= 0.0 && p.probability(0) < 1e-300);
        assert!((p.probability(1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_general_sojourn_models() {
        let m = MarkovModel::from_kernel(
            &["Op", "Fail"],
            &[(
                "Op",
                "Fail",
                1.0,
                super::super::SojournDistribution::Deterministic { delay: 5.0 },
            )],
            &["Fail"],
        )
        .unwrap();
        let p0 = StateDistribution::point(2, 0);
        assert!(matches!(
            transient_distribution(&m, &p0, 1.0),
            Err(TransientError::WrongKind)
        ));
    }

    #[test]
    fn chapman_kolmogorov_composition() {
        let m = MarkovModel::from_rates(
            &["A", "B", "C"],
            &[
                ("A", "B", 0.05),
                ("B", "A", 0.02),
                ("A", "C", 0.01),
                ("B", "C", 0.03),
            ],
            &["C"],
        )
        .unwrap();
        let p0 = StateDistribution::point(3, 0);
        let direct = transient_distribution(&m, &p0, 150.0).unwrap();
        let half = transient_distribution(&m, &p0, 60.0).unwrap();
        let composed = transient_distribution(&m, &half, 90.0).unwrap();
        for i in 0..3 {
            assert!((direct.probability(i) - composed.probability(i)).abs() < 1e-8);
        }
    }
}
