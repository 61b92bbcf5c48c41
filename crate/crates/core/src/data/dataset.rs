use alloc::vec;
use alloc::vec::Vec;

use crate::nn::{Batch, BatchBuf};
use crate::seed::{stream, Purpose};
use crate::{ceil_count, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
}

/// Labelled samples with features normalized to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<u8>,
    dim: usize,
    num_classes: usize,
    split: Split,
}

impl Dataset {
    pub fn new(
        features: Vec<f64>,
        labels: Vec<u8>,
        dim: usize,
        num_classes: usize,
        split: Split,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        if dim == 0 || features.len() != labels.len() * dim {
            return Err(Error::Shape {
                what: "dataset features",
                expected: labels.len() * dim,
                found: features.len(),
            });
        }
        if let Some(&label) = labels.iter().find(|&&l| l as usize >= num_classes) {
            return Err(Error::LabelOutOfRange {
                label: label as usize,
                classes: num_classes,
            });
        }
        if !features.iter().all(|v| (0.0..=1.0).contains(v)) {
            return Err(Error::Config("dataset features must lie in [0, 1]".into()));
        }
        Ok(Self {
            features,
            labels,
            dim,
            num_classes,
            split,
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

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn as_batch(&self) -> Batch<'_> {
        Batch::new(&self.features, &self.labels, self.dim).expect("dataset invariants hold")
    }

    /// Copies the given samples, in order, into `buf`.
    pub fn gather_into(&self, indices: &[usize], buf: &mut BatchBuf) {
        buf.clear();
        buf.dim = self.dim;
        for &i in indices {
            buf.push(self.sample(i), self.labels[i]);
        }
    }

    pub fn gather(&self, indices: &[usize]) -> BatchBuf {
        let mut buf = BatchBuf::with_capacity(self.dim, indices.len());
        self.gather_into(indices, &mut buf);
        buf
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let buf = self.gather(indices);
        Self::new(
            buf.features,
            buf.labels,
            self.dim,
            self.num_classes,
            self.split,
        )
    }

    /// Seeded uniform draw of `ceil(fraction * len)` samples without
    /// replacement, kept in their original order.
    pub fn subsample(&self, fraction: f64, seed: u64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Config(alloc::format!(
                "subsample fraction must be in (0, 1], got {fraction}"
            )));
        }
        let count = ceil_count(fraction, self.len());
        let mut rng = stream(seed, Purpose::Subsample, 0, 0);
        let mut picked = rand::seq::index::sample(&mut rng, self.len(), count).into_vec();
        picked.sort_unstable();
        self.subset(&picked)
    }

    /// Splits off the first `n` samples as training data and the rest as
    /// test data.
    pub fn split_at(&self, n: usize) -> Result<(Self, Self)> {
        let head: Vec<usize> = (0..n.min(self.len())).collect();
        let tail: Vec<usize> = (n.min(self.len())..self.len()).collect();
        let mut train = self.subset(&head)?;
        let mut test = self.subset(&tail)?;
        train.split = Split::Train;
        test.split = Split::Test;
        Ok((train, test))
    }

    pub fn histogram(&self, indices: &[usize]) -> Vec<usize> {
        let mut hist = vec![0; self.num_classes];
        for &i in indices {
            hist[self.labels[i] as usize] += 1;
        }
        hist
    }

    /// Sample indices per class, each list ascending.
    pub fn indices_by_class(&self) -> Vec<Vec<usize>> {
        let mut by_class = vec![Vec::new(); self.num_classes];
        for (i, &l) in self.labels.iter().enumerate() {
            by_class[l as usize].push(i);
        }
        by_class
    }
}
