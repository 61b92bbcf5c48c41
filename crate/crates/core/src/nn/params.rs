use alloc::vec::Vec;

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// One dense layer. `weights` is row-major `(outputs, inputs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Layer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: alloc::vec![0.0; inputs * outputs],
            bias: alloc::vec![0.0; outputs],
        }
    }

    pub fn from_parts(
        inputs: usize,
        outputs: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self> {
        if weights.len() != inputs * outputs {
            return Err(Error::Shape {
                what: "layer weights",
                expected: inputs * outputs,
                found: weights.len(),
            });
        }
        if bias.len() != outputs {
            return Err(Error::Shape {
                what: "layer bias",
                expected: outputs,
                found: bias.len(),
            });
        }
        Ok(Self {
            inputs,
            outputs,
            weights,
            bias,
        })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    pub fn num_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Weights and biases of an MLP, layer by layer.
///
/// The same type carries gradients and pseudo-gradients, which always share
/// the model's shape. The flattened order is layer 0 weights, layer 0 bias,
/// layer 1 weights, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    layers: Vec<Layer>,
}

/// A gradient or accumulated update with the model's shape.
pub type Gradient = ModelParams;

impl ModelParams {
    /// Glorot-uniform weights (`a = sqrt(6 / (fan_in + fan_out))`), zero biases.
    ///
    /// `dims` lists layer widths including the input, e.g. `[784, 128, 10]`.
    pub fn init(dims: &[usize], seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::init_with_rng(dims, &mut rng)
    }

    pub fn init_with_rng<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        let mut params = Self::zeros(dims)?;
        for layer in &mut params.layers {
            let limit = libm::sqrt(6.0 / (layer.inputs + layer.outputs) as f64);
            let dist = Uniform::new(-limit, limit);
            for w in &mut layer.weights {
                *w = dist.sample(rng);
            }
        }
        Ok(params)
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Config(
                "an MLP needs at least an input and an output width".into(),
            ));
        }
        if dims.contains(&0) {
            return Err(Error::Config("layer widths must be positive".into()));
        }
        let layers = dims.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect();
        Ok(Self { layers })
    }

    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Empty("layer list"));
        }
        for pair in layers.windows(2) {
            if pair[0].outputs != pair[1].inputs {
                return Err(Error::Shape {
                    what: "layer chaining",
                    expected: pair[0].outputs,
                    found: pair[1].inputs,
                });
            }
        }
        Ok(Self { layers })
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| Layer::zeros(l.inputs, l.outputs))
                .collect(),
        }
    }

    /// Layer widths including the input width.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.layers.len() + 1);
        dims.push(self.layers[0].inputs);
        dims.extend(self.layers.iter().map(|l| l.outputs));
        dims
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(Layer::num_params).sum()
    }

    /// Entries in flattened order.
    pub fn values(&self) -> impl Iterator<Item = &f64> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()))
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> + '_ {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for layer in &self.layers {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.bias);
        }
        out
    }

    pub fn from_flat(dims: &[usize], flat: &[f64]) -> Result<Self> {
        let mut params = Self::zeros(dims)?;
        if flat.len() != params.num_params() {
            return Err(Error::Shape {
                what: "flattened parameters",
                expected: params.num_params(),
                found: flat.len(),
            });
        }
        let mut rest = flat;
        for layer in &mut params.layers {
            let (w, tail) = rest.split_at(layer.weights.len());
            let (b, tail) = tail.split_at(layer.bias.len());
            layer.weights.copy_from_slice(w);
            layer.bias.copy_from_slice(b);
            rest = tail;
        }
        Ok(params)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| a.inputs == b.inputs && a.outputs == b.outputs)
    }

    pub(crate) fn check_shape(&self, other: &Self, what: &'static str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Shape {
                what,
                expected: self.num_params(),
                found: other.num_params(),
            })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values().all(|v| v.is_finite())
    }

    /// `self += alpha * other`, elementwise.
    pub fn add_scaled(&mut self, alpha: f64, other: &Self) -> Result<()> {
        self.check_shape(other, "add_scaled")?;
        for (dst, src) in self.values_mut().zip(other.values()) {
            *dst += alpha * src;
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in self.values_mut() {
            *v *= alpha;
        }
    }

    pub fn count_nonzero(&self) -> usize {
        self.values().filter(|v| **v != 0.0).count()
    }
}
