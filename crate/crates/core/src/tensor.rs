//! Small dense containers for 3- and 4-index component arrays.
//!
//! The dimensions here are tiny (n ≤ 3 for the base, 2n for the bundle), so
//! flat `Vec<f64>` storage with explicit index tuples is both fast enough
//! and easy to audit against the index conventions documented at each use
//! site.

use std::ops::{Index, IndexMut};

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.data.iter()
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.data[(i * self.n + j) * self.n + k]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        &mut self.data[(i * self.n + j) * self.n + k]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn from_flat(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n * n * n);
        Self { n, data }
    }
}

impl Index<(usize, usize, usize, usize)> for Tensor4 {
    type Output = f64;
    fn index(&self, (i, j, k, l): (usize, usize, usize, usize)) -> &f64 {
        &self.data[((i * self.n + j) * self.n + k) * self.n + l]
    }
}

impl IndexMut<(usize, usize, usize, usize)> for Tensor4 {
    fn index_mut(&mut self, (i, j, k, l): (usize, usize, usize, usize)) -> &mut f64 {
        &mut self.data[((i * self.n + j) * self.n + k) * self.n + l]
    }
}

/// Max absolute difference between two equally-shaped slices.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
