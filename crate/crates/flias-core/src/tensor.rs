//! Dense rank-3 and rank-4 coefficient arrays indexed by basis triples.
//!
//! Dimensions in this crate never exceed ~20, so dense storage is fine.

use serde::{Deserialize, Serialize};

/// Rank-3 array `t[i][j][k]`, stored row-major with the `k` index contiguous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    /// Build from sparse `(i, j, k, value)` entries (0-based).
    pub fn from_triples(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Self {
        let mut t = Self::zeros(dim);
        for &(i, j, k, v) in entries {
            *t.get_mut(i, j, k) = v;
        }
        t
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize, k: usize) -> &mut f64 {
        &mut self.data[(i * self.dim + j) * self.dim + k]
    }

    /// The coefficient vector of the pair `(e_i, e_j)` as a slice of length `dim`.
    #[inline]
    pub fn pair(&self, i: usize, j: usize) -> &[f64] {
        let base = (i * self.dim + j) * self.dim;
        &self.data[base..base + self.dim]
    }

    pub fn pair_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let base = (i * self.dim + j) * self.dim;
        &mut self.data[base..base + self.dim]
    }

    /// Bilinear contraction: `out_k = sum_{i,j} x_i y_j t[i][j][k]`.
    pub fn contract(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        let mut out = vec![0.0; self.dim];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0.0 {
                    continue;
                }
                let c = xi * yj;
                for (k, o) in out.iter_mut().enumerate() {
                    *o += c * self.get(i, j, k);
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sparse `(i, j, k, value)` view of the nonzero entries.
    pub fn triples(&self) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let v = self.get(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }
}

/// Rank-4 array `t[i][j][k][l]`, used for curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim * dim],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[((i * self.dim + j) * self.dim + k) * self.dim + l]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize, k: usize, l: usize) -> &mut f64 {
        &mut self.data[((i * self.dim + j) * self.dim + k) * self.dim + l]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
