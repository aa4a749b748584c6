//! Banded Cholesky factorization for symmetric positive definite matrices.
//!
//! Grid stiffness matrices numbered node by node have a half-bandwidth of
//! about `2m`, so the band holds the whole Cholesky fill.

use super::sparse::CsrMatrix;

/// Pivots below this fraction of the original diagonal entry are treated as
/// a singular direction.
const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub index: usize,
    pub ratio: f64,
}

/// Lower-triangular Cholesky factor `L` with `A = L·Lᵀ`, stored by rows:
/// row `i` keeps columns `i−b ..= i`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bandwidth: usize,
    band: Vec<f64>,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in 4 * chunks..a.len() {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

impl BandedCholesky {
    /// Factors the lower band of a symmetric CSR matrix.
    pub fn factor(a: &CsrMatrix) -> Result<Self, SingularPivot> {
        let n = a.nrows();
        let b = a.lower_bandwidth();
        let w = b + 1;
        let mut band = vec![0.0; n * w];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j <= i {
                    band[i * w + (j + b - i)] = v;
                }
            }
        }
        for i in 0..n {
            let k0 = i.saturating_sub(b);
            let row_i = i * w;
            for j in k0..=i {
                // L[i][k] for k in k0..j, and L[j][k] for the same k
                let len = j - k0;
                let a_off = row_i + (k0 + b - i);
                let b_off = j * w + (k0 + b - j);
                let s = {
                    let (head, tail) = band.split_at(row_i);
                    let ri = &tail[a_off - row_i..a_off - row_i + len];
                    let rj = if j == i {
                        ri
                    } else {
                        &head[b_off..b_off + len]
                    };
                    dot(ri, rj)
                };
                let entry = row_i + (j + b - i);
                let value = band[entry] - s;
                if j == i {
                    let original = band[entry];
                    if !(value > PIVOT_TOLERANCE * original.abs()) || !value.is_finite() {
                        return Err(SingularPivot {
                            index: i,
                            ratio: if original != 0.0 { value / original } else { value },
                        });
                    }
                    band[entry] = value.sqrt();
                } else {
                    band[entry] = value / band[j * w + b];
                }
            }
        }
        Ok(Self {
            n,
            bandwidth: b,
            band,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Solves `L·Lᵀ·x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.n);
        let b = self.bandwidth;
        let w = b + 1;
        let mut y = rhs.to_vec();
        for i in 0..self.n {
            let k0 = i.saturating_sub(b);
            let row = &self.band[i * w..(i + 1) * w];
            let s = dot(&row[k0 + b - i..b], &y[k0..i]);
            y[i] = (y[i] - s) / row[b];
        }
        for i in (0..self.n).rev() {
            let row = &self.band[i * w..(i + 1) * w];
            let xi = y[i] / row[b];
            y[i] = xi;
            let k0 = i.saturating_sub(b);
            for (yk, &l) in y[k0..i].iter_mut().zip(&row[k0 + b - i..b]) {
                *yk -= l * xi;
            }
        }
        y
    }
}
