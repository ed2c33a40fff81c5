//! Mean time to failure of absorbing models.

use super::canonical::canonical_form;
use super::{MarkovModel, ModelKind};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, thiserror::Error)]
pub enum MttfError {
    #[error("state index {index} out of range for {size} states")]
    StateOutOfRange { index: usize, size: usize },
    #[error("linear system is singular; absorption is not certain from `{0}`")]
    SingularSystem(String),
}

/// Expected time (hours) until absorption, starting from `start_state`.
///
/// Starting on an absorbing state returns `0.0` by convention.
///
/// For exponential-rates models the linear system is solved on the rate
/// matrix directly: with `A_tt` the operational-by-operational generator
/// block, the vector of expected absorption times satisfies
/// `A_tt * m = -1`. For general-sojourn models the expected step counts of
/// the embedded jump chain (fundamental matrix) are weighted by the mean
/// sojourn time of each visited state.
pub fn mttf_from_state(model: &MarkovModel, start_state: usize) -> Result<f64, MttfError> {
    let n = model.state_count();
    if start_state >= n {
        return Err(MttfError::StateOutOfRange {
            index: start_state,
            size: n,
        });
    }
    if model.is_absorbing(start_state) {
        return Ok(0.0);
    }
    let operational = model.operational_states();
    let position = operational
        .iter()
        .position(|&s| s == start_state)
        .expect("start state is operational");

    let hours =
        match model.kind() {
            ModelKind::ExponentialRates => {
                let generator = model.generator().expect("rates model has generator");
                let t = operational.len();
                let mut block = DMatrix::<f64>::zeros(t, t);
                for (a, &i) in operational.iter().enumerate() {
                    for (b, &j) in operational.iter().enumerate() {
                        block[(a, b)] = generator[(i, j)];
                    }
                }
                let rhs = DVector::from_element(t, -1.0);
                let solution = block.lu().solve(&rhs).ok_or_else(|| {
                    MttfError::SingularSystem(model.state_label(start_state).into())
                })?;
                solution[position]
            }
            ModelKind::GeneralSojourn => {
                let embedded = model.embedded_jump_matrix();
                let decomposition = canonical_form(&embedded, model.absorbing_states())
                    .expect("validated absorbing model decomposes");
                let t = decomposition.transient_count();
                // (I - Q) * mttf = mean sojourn per transient state; the
                // canonical permutation lists transient states first in their
                // original relative order, matching `operational`.
                let system = DMatrix::<f64>::identity(t, t) - decomposition.q();
                let sojourns =
                    DVector::from_iterator(t, operational.iter().map(|&s| model.mean_sojourn(s)));
                let solution = system.lu().solve(&sojourns).ok_or_else(|| {
                    MttfError::SingularSystem(model.state_label(start_state).into())
                })?;
                solution[position]
            }
        };

    if !hours.is_finite() || hours <= 0.0 {
        return Err(MttfError::SingularSystem(
            model.state_label(start_state).into(),
        ));
    }
    Ok(hours)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::SojournDistribution;

    #[test]
    fn single_exponential_transition() {
        let m =
            MarkovModel::from_rates(&["Op", "Fail"], &[("Op", "Fail", 0.001)], &["Fail"]).unwrap();
        let mttf = mttf_from_state(&m, 0).unwrap();
        assert!((mttf - 1000.0).abs() / 1000.0 <= 1e-9);
    }

    #[test]
    fn absorbing_start_is_zero() {
        let m =
            MarkovModel::from_rates(&["Op", "Fail"], &[("Op", "Fail", 0.001)], &["Fail"]).unwrap();
        assert_eq!(mttf_from_state(&m, 1).unwrap(), 0.0);
    }

    #[test]
    fn chain_mttf_adds_stage_means() {
        let m = MarkovModel::from_rates(
            &["A", "B", "Fail"],
            &[("A", "B", 0.006), ("B", "Fail", 0.005)],
            &["Fail"],
        )
        .unwrap();
        let mttf = mttf_from_state(&m, 0).unwrap();
        let expected = 1.0 / 0.006 + 1.0 / 0.005;
        assert!((mttf - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn embedded_chain_with_unit_sojourns() {
        // Jump back to itself is disallowed, so model the geometric retry as
        // two states trading visits: Try -> Retry -> Try ... -> Done.
        let m = MarkovModel::from_kernel(
            &["Try", "Retry", "Done"],
            &[
                (
                    "Try",
                    "Retry",
                    0.5,
                    SojournDistribution::Deterministic { delay: 1.0 },
                ),
                (
                    "Try",
                    "Done",
                    0.5,
                    SojournDistribution::Deterministic { delay: 1.0 },
                ),
                (
                    "Retry",
                    "Try",
                    1.0,
                    SojournDistribution::Deterministic { delay: 1.0 },
                ),
            ],
            &["Done"],
        )
        .unwrap();
        // Expected steps from Try: E = 1 + 0.5 * (1 + E) -> E = 3 jumps of
        // unit sojourn, i.e. 3 hours. From Retry: 1 + E = 4.
        assert!((mttf_from_state(&m, 0).unwrap() - 3.0).abs() < 1e-12);
        assert!((mttf_from_state(&m, 1).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn general_and_exponential_routes_agree() {
        let rates = MarkovModel::from_rates(
            &["A", "B", "Fail"],
            &[("A", "B", 0.02), ("A", "Fail", 0.005), ("B", "Fail", 0.01)],
            &["Fail"],
        )
        .unwrap();
        let kernel = MarkovModel::from_kernel(
            &["A", "B", "Fail"],
            &[
                (
                    "A",
                    "B",
                    0.8,
                    SojournDistribution::Exponential { rate: 0.025 },
                ),
                (
                    "A",
                    "Fail",
                    0.2,
                    SojournDistribution::Exponential { rate: 0.025 },
                ),
                (
                    "B",
                    "Fail",
                    1.0,
                    SojournDistribution::Exponential { rate: 0.01 },
                ),
            ],
            &["Fail"],
        )
        .unwrap();
        let a = mttf_from_state(&rates, 0).unwrap();
        let b = mttf_from_state(&kernel, 0).unwrap();
        assert!((a - b).abs() / a < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn out_of_range_state_rejected() {
        let m =
            MarkovModel::from_rates(&["Op", "Fail"], &[("Op", "Fail", 0.001)], &["Fail"]).unwrap();
        assert!(matches!(
            mttf_from_state(&m, 5),
            Err(MttfError::StateOutOfRange { .. })
        ));
    }
}
