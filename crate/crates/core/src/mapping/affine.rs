//! Single-valued affine building blocks `x ↦ Ax + b` with a certified
//! operator norm for the ambient norm.

use crate::error::{HyperError, Result};
use crate::space::{Norm, Point};

const POWER_ITERATIONS: usize = 1000;
const L2_SAFETY: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    matrix: Vec<Vec<f64>>,
    offset: Point,
    lip: f64,
}

impl AffineMap {
    pub fn new(matrix: Vec<Vec<f64>>, offset: Point, norm: Norm) -> Result<Self> {
        let d = offset.dim();
        if d == 0 || d > crate::space::MAX_DIM {
            return Err(HyperError::UnsupportedDimension(d));
        }
        if matrix.len() != d {
            return Err(HyperError::DimensionMismatch {
                expected: d,
                found: matrix.len(),
            });
        }
        for row in &matrix {
            if row.len() != d {
                return Err(HyperError::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            if row.iter().any(|c| !c.is_finite()) {
                return Err(HyperError::NonFinite("affine matrix"));
            }
        }
        if !offset.is_finite() {
            return Err(HyperError::NonFinite("affine offset"));
        }
        let lip = operator_norm(&matrix, norm);
        Ok(AffineMap { matrix, offset, lip })
    }

    /// `x ↦ s·x + b`.
    pub fn scaling(s: f64, offset: Point, norm: Norm) -> Result<Self> {
        let d = offset.dim();
        let matrix = (0..d)
            .map(|i| (0..d).map(|j| if i == j { s } else { 0.0 }).collect())
            .collect();
        Self::new(matrix, offset, norm)
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn offset(&self) -> &Point {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.offset.dim()
    }

    /// Certified upper bound on the operator norm.
    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn apply(&self, x: &Point) -> Point {
        Point(
            self.matrix
                .iter()
                .zip(&self.offset.0)
                .map(|(row, b)| row.iter().zip(&x.0).map(|(a, c)| a * c).sum::<f64>() + b)
                .collect(),
        )
    }
}

fn max_row_sum(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .map(|row| row.iter().map(|c| c.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn max_col_sum(a: &[Vec<f64>]) -> f64 {
    let d = a.len();
    (0..d)
        .map(|j| a.iter().map(|row| row[j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Upper bound on `sup_{‖x‖ ≤ 1} ‖Ax‖` in the given norm. Exact for ℓ1 and
/// ℓ∞; for ℓ2 the power-iteration estimate is inflated by a relative safety
/// factor and confirmed with a Cholesky test, then capped by
/// `sqrt(‖A‖₁‖A‖∞)` and the Frobenius norm, both of which are always sound.
pub fn operator_norm(a: &[Vec<f64>], norm: Norm) -> f64 {
    match norm {
        Norm::Linf => max_row_sum(a),
        Norm::L1 => max_col_sum(a),
        Norm::L2 => {
            let holder = (max_row_sum(a) * max_col_sum(a)).sqrt();
            let frob = a.iter().flatten().map(|c| c * c).sum::<f64>().sqrt();
            let cap = holder.min(frob);
            if cap == 0.0 {
                return 0.0;
            }
            let ata = gram(a);
            let est = power_estimate(&ata);
            let candidate = est.sqrt() * (1.0 + L2_SAFETY);
            if candidate < cap && dominates(&ata, candidate * candidate) {
                candidate
            } else {
                cap
            }
        }
    }
}

fn gram(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = a.len();
    let mut g = vec![vec![0.0; d]; d];
    for (i, gi) in g.iter_mut().enumerate() {
        for (j, gij) in gi.iter_mut().enumerate() {
            *gij = (0..d).map(|k| a[k][i] * a[k][j]).sum();
        }
    }
    g
}

/// Largest Rayleigh quotient reached by power iteration from every basis
/// vector and the all-ones vector.
fn power_estimate(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    let mut starts: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    starts.push(vec![1.0; d]);
    let mut best = 0.0_f64;
    for mut v in starts {
        let mut quotient = 0.0;
        for _ in 0..POWER_ITERATIONS {
            let w: Vec<f64> = m
                .iter()
                .map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum())
                .collect();
            let vv: f64 = v.iter().map(|c| c * c).sum();
            if vv == 0.0 {
                break;
            }
            quotient = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / vv;
            let len = w.iter().map(|c| c * c).sum::<f64>().sqrt();
            if len == 0.0 {
                break;
            }
            v = w.iter().map(|c| c / len).collect();
        }
        best = best.max(quotient);
    }
    best
}

/// Whether `c·I − M` is positive definite (Cholesky succeeds).
fn dominates(m: &[Vec<f64>], c: f64) -> bool {
    let d = m.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let shifted = if i == j { c - m[i][j] } else { -m[i][j] };
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let diag = shifted - s;
                if diag <= 0.0 || !diag.is_finite() {
                    return false;
                }
                l[i][i] = diag.sqrt();
            } else {
                l[i][j] = (shifted - s) / l[j][j];
            }
        }
    }
    true
}
