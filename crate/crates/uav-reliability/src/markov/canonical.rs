//! Canonical block decomposition of an absorbing stochastic matrix.
//!
//! Transient states are permuted to the front so the matrix takes the form
//!
//! ```text
//! | Q  R |
//! | 0  I |
//! ```
//!
//! with `Q` the transient-to-transient block and `R` the
//! transient-to-absorbing block. The fundamental matrix `N = (I - Q)^-1`
//! gives expected visit counts and, via `N * 1`, expected steps to
//! absorption.

use nalgebra::{DMatrix, DVector};
use std::collections::BTreeSet;

#[derive(Debug, thiserror::Error)]
pub enum CanonicalError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("absorbing index {index} out of range for {size} states")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("every state is absorbing; no transient block exists")]
    AllAbsorbing,
    #[error("no state is absorbing")]
    NoneAbsorbing,
    #[error("absorbing state {0} is not a unit self-loop row")]
    NonCanonicalRow(usize),
    #[error("I - Q is singular; absorption is not certain from some state")]
    Singular,
}

/// Permutation plus the `Q` and `R` blocks of the canonical form.
#[derive(Debug, Clone)]
pub struct CanonicalDecomposition {
    permutation: Vec<usize>,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

/// Decomposes a stochastic matrix whose absorbing rows are unit self-loops.
///
/// `permutation[new] = old`; transient states keep their relative order and
/// come first, absorbing states follow.
pub fn canonical_form(
    matrix: &DMatrix<f64>,
    absorbing: &BTreeSet<usize>,
) -> Result<CanonicalDecomposition, CanonicalError> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(CanonicalError::NotSquare {
            rows: n,
            cols: matrix.ncols(),
        });
    }
    if let Some(&index) = absorbing.iter().find(|&&i| i >= n) {
        return Err(CanonicalError::IndexOutOfRange { index, size: n });
    }
    if absorbing.is_empty() {
        return Err(CanonicalError::NoneAbsorbing);
    }
    if absorbing.len() == n {
        return Err(CanonicalError::AllAbsorbing);
    }
    for &i in absorbing {
        for j in 0..n {
            let expected = if i == j { 1.0 } else { 0.0 };
            if matrix[(i, j)] != expected {
                return Err(CanonicalError::NonCanonicalRow(i));
            }
        }
    }

    let transient: Vec<usize> = (0..n).filter(|i| !absorbing.contains(i)).collect();
    let absorbed: Vec<usize> = absorbing.iter().copied().collect();
    let t = transient.len();
    let r_count = absorbed.len();

    let mut q = DMatrix::<f64>::zeros(t, t);
    let mut r = DMatrix::<f64>::zeros(t, r_count);
    for (a, &i) in transient.iter().enumerate() {
        for (b, &j) in transient.iter().enumerate() {
            q[(a, b)] = matrix[(i, j)];
        }
        for (b, &j) in absorbed.iter().enumerate() {
            r[(a, b)] = matrix[(i, j)];
        }
    }

    let mut permutation = transient;
    permutation.extend(absorbed);
    Ok(CanonicalDecomposition { permutation, q, r })
}

impl CanonicalDecomposition {
    /// Maps new (canonical) index to original index.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn transient_count(&self) -> usize {
        self.q.nrows()
    }

    pub fn absorbing_count(&self) -> usize {
        self.r.ncols()
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// Rebuilds the original matrix from the blocks and the permutation.
    pub fn reassemble(&self) -> DMatrix<f64> {
        let t = self.transient_count();
        let n = t + self.absorbing_count();
        let mut canonical = DMatrix::<f64>::zeros(n, n);
        canonical.view_mut((0, 0), (t, t)).copy_from(&self.q);
        canonical.view_mut((0, t), (t, n - t)).copy_from(&self.r);
        for a in t..n {
            canonical[(a, a)] = 1.0;
        }
        let mut original = DMatrix::<f64>::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                original[(self.permutation[a], self.permutation[b])] = canonical[(a, b)];
            }
        }
        original
    }

    /// Fundamental matrix `N = (I - Q)^-1`.
    pub fn fundamental_matrix(&self) -> Result<DMatrix<f64>, CanonicalError> {
        let t = self.transient_count();
        let system = DMatrix::<f64>::identity(t, t) - &self.q;
        system.lu().try_inverse().ok_or(CanonicalError::Singular)
    }

    /// Expected steps to absorption from each transient state (`N * 1`),
    /// indexed in canonical (permuted) order.
    pub fn expected_steps(&self) -> Result<DVector<f64>, CanonicalError> {
        let n = self.fundamental_matrix()?;
        let ones = DVector::from_element(self.transient_count(), 1.0);
        Ok(n * ones)
    }
}
