//! First- and second-order statistics of equiprobable point sets.
//!
//! For a set of n points in R^D with uniform probabilities, computes the
//! mean vector, the population covariance matrix K = E{(X-mu)^T (X-mu)},
//! and the two trace functionals trace(K) and trace(K^2) that drive the
//! wideband Taylor coefficients. Everything is closed arithmetic; no
//! sampling is involved.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MomentsError {
    #[error("cannot compute moments of an empty point set")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Summary statistics of a point set under equiprobable selection.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary {
    /// Mean vector E{X}.
    pub mean: Vec<f64>,
    /// Squared norm of the mean, ||E{X}||^2.
    pub mean_sq_norm: f64,
    /// trace(K) = E{||X||^2} - ||E{X}||^2.
    pub trace_cov: f64,
    /// trace(K^2), computed as the squared Frobenius norm of the symmetric K.
    pub trace_cov_sq: f64,
}

/// Computes [`MomentSummary`] for equiprobable `points`.
///
/// The covariance uses the population (1/n) convention. trace(K^2) is
/// evaluated as sum of squared entries of K, which equals trace(K*K) for
/// symmetric K and costs O(n D^2).
pub fn moments<P: AsRef<[f64]>>(points: &[P]) -> Result<MomentSummary, MomentsError> {
    let n = points.len();
    if n == 0 {
        return Err(MomentsError::EmptyInput);
    }
    let dim = points[0].as_ref().len();
    for p in points {
        if p.as_ref().len() != dim {
            return Err(MomentsError::DimensionMismatch {
                expected: dim,
                got: p.as_ref().len(),
            });
        }
    }

    let inv_n = 1.0 / n as f64;
    let mut mean = vec![0.0; dim];
    for p in points {
        for (m, &x) in mean.iter_mut().zip(p.as_ref()) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m *= inv_n;
    }
    let mean_sq_norm: f64 = mean.iter().map(|m| m * m).sum();

    // K row-major; only needed transiently for the traces.
    let mut cov = vec![0.0; dim * dim];
    for p in points {
        let p = p.as_ref();
        for r in 0..dim {
            let dr = p[r] - mean[r];
            for c in 0..dim {
                cov[r * dim + c] += dr * (p[c] - mean[c]);
            }
        }
    }
    for k in &mut cov {
        *k *= inv_n;
    }

    let trace_cov: f64 = (0..dim).map(|r| cov[r * dim + r]).sum();
    let trace_cov_sq: f64 = cov.iter().map(|k| k * k).sum();

    Ok(MomentSummary {
        mean,
        mean_sq_norm,
        trace_cov,
        trace_cov_sq,
    })
}

/// Moments of the sub-constellation selected by `indices`.
pub fn moments_of_indices<P: AsRef<[f64]>>(
    points: &[P],
    indices: &[usize],
) -> Result<MomentSummary, MomentsError> {
    let selected: Vec<&[f64]> = indices.iter().map(|&i| points[i].as_ref()).collect();
    moments(&selected)
}
