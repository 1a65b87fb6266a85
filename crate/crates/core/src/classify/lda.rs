//! Two-class linear discriminant analysis, closed form.
//!
//! The discriminant direction is w = S⁻¹(μ_fake − μ_real) with S the pooled
//! within-class covariance (divide by n − 2). S is regularized by adding
//! ε·(trace/d) to the diagonal, ε = 1e−6, so collinear β features (common
//! when a region has near-constant spectra) keep the solve well posed. The
//! score is the logistic of the signed distance to the midpoint threshold
//! along w.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{DatasetRow, TrainError};
use crate::label::Label;

/// Diagonal loading factor relative to the mean eigenvalue (trace/d).
const RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LdaModel {
    weights: Vec<f64>,
    threshold: f64,
}

pub(super) fn train(rows: &[DatasetRow]) -> Result<LdaModel, TrainError> {
    let dim = rows[0].features.len();
    let n = rows.len();

    let mut mean_real = vec![0.0f64; dim];
    let mut mean_fake = vec![0.0f64; dim];
    let mut n_real = 0usize;
    let mut n_fake = 0usize;
    for row in rows {
        let (mean, count) = match row.label {
            Label::Real => (&mut mean_real, &mut n_real),
            Label::Fake => (&mut mean_fake, &mut n_fake),
        };
        for (m, x) in mean.iter_mut().zip(row.features.iter()) {
            *m += x;
        }
        *count += 1;
    }
    for m in mean_real.iter_mut() {
        *m /= n_real as f64;
    }
    for m in mean_fake.iter_mut() {
        *m /= n_fake as f64;
    }

    // Pooled within-class scatter, normalized by n − 2 (two estimated means).
    let mut cov = vec![vec![0.0f64; dim]; dim];
    for row in rows {
        let mean = match row.label {
            Label::Real => &mean_real,
            Label::Fake => &mean_fake,
        };
        for i in 0..dim {
            let di = row.features[i] - mean[i];
            for j in i..dim {
                cov[i][j] += di * (row.features[j] - mean[j]);
            }
        }
    }
    let denom = (n - 2).max(1) as f64;
    for i in 0..dim {
        for j in i..dim {
            cov[i][j] /= denom;
            cov[j][i] = cov[i][j];
        }
    }
    let trace: f64 = (0..dim).map(|i| cov[i][i]).sum();
    let load = if trace > 0.0 {
        RIDGE * trace / dim as f64
    } else {
        RIDGE
    };
    for (i, row) in cov.iter_mut().enumerate() {
        row[i] += load;
    }

    let diff: Vec<f64> = mean_fake
        .iter()
        .zip(mean_real.iter())
        .map(|(f, r)| f - r)
        .collect();
    let weights = solve(cov, diff).ok_or_else(|| {
        TrainError::InvalidHyperparameter(String::from(
            "covariance solve failed despite regularization",
        ))
    })?;

    let midpoint: Vec<f64> = mean_fake
        .iter()
        .zip(mean_real.iter())
        .map(|(f, r)| 0.5 * (f + r))
        .collect();
    let threshold = dot(&weights, &midpoint);
    Ok(LdaModel { weights, threshold })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; None when the pivot
/// underflows (singular system).
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                let upper = a[col][k];
                a[row][k] -= factor * upper;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

impl LdaModel {
    pub fn feature_dim(&self) -> usize {
        self.weights.len()
    }

    /// The discriminant direction (not normalized).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Logistic of the signed margin; > 0.5 on the fake side of the
    /// boundary.
    pub fn score(&self, query: &[f64]) -> f64 {
        let margin = dot(&self.weights, query) - self.threshold;
        1.0 / (1.0 + libm::exp(-margin))
    }
}
