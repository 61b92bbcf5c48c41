use alloc::vec::Vec;

use crate::{Error, Result};

/// Borrowed mini-batch: `features` is row-major `(len, dim)`.
#[derive(Debug, Clone, Copy)]
pub struct Batch<'a> {
    features: &'a [f64],
    labels: &'a [u8],
    dim: usize,
}

impl<'a> Batch<'a> {
    pub fn new(features: &'a [f64], labels: &'a [u8], dim: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Empty("batch"));
        }
        if features.len() != labels.len() * dim {
            return Err(Error::Shape {
                what: "batch features",
                expected: labels.len() * dim,
                found: features.len(),
            });
        }
        Ok(Self {
            features,
            labels,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn features(&self) -> &'a [f64] {
        self.features
    }

    pub fn labels(&self) -> &'a [u8] {
        self.labels
    }

    pub fn sample(&self, i: usize) -> &'a [f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    /// Sub-batch of rows `start..end`.
    pub fn rows(&self, start: usize, end: usize) -> Batch<'a> {
        Batch {
            features: &self.features[start * self.dim..end * self.dim],
            labels: &self.labels[start..end],
            dim: self.dim,
        }
    }
}

/// Owned, contiguous mini-batch gathered from a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchBuf {
    pub features: Vec<f64>,
    pub labels: Vec<u8>,
    pub dim: usize,
}

impl BatchBuf {
    pub fn with_capacity(dim: usize, samples: usize) -> Self {
        Self {
            features: Vec::with_capacity(dim * samples),
            labels: Vec::with_capacity(samples),
            dim,
        }
    }

    pub fn clear(&mut self) {
        self.features.clear();
        self.labels.clear();
    }

    pub fn push(&mut self, features: &[f64], label: u8) {
        debug_assert_eq!(features.len(), self.dim);
        self.features.extend_from_slice(features);
        self.labels.push(label);
    }

    pub fn as_batch(&self) -> Result<Batch<'_>> {
        Batch::new(&self.features, &self.labels, self.dim)
    }
}
