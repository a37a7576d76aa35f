// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Fully connected network over a flat parameter vector, with hand-written
//! reverse-mode gradients.
//!
//! Layer `l` stores its weight matrix (`out × in`, row-major) followed by its
//! bias. Hidden layers apply the activation; the output layer is linear.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    Linear,
}

impl Activation {
    fn apply(self, z: &mut Array2<f64>) {
        if self == Activation::Tanh {
            z.mapv_inplace(f64::tanh);
        }
    }

    /// Derivative expressed through the activation's output.
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Linear => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layer_sizes: Vec<usize>,
    activation: Activation,
    params: Vec<f64>,
}

/// Activations of every layer for a batch, input first.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    activations: Vec<Array2<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &Array2<f64> {
        self.activations.last().expect("cache holds at least the input")
    }
}

fn param_count(layer_sizes: &[usize]) -> usize {
    layer_sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl Mlp {
    pub fn zeros(layer_sizes: &[usize], activation: Activation) -> Result<Self> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
            return Err(Error::Contract(format!(
                "network needs at least two non-empty layers, got {layer_sizes:?}"
            )));
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            activation,
            params: vec![0.0; param_count(layer_sizes)],
        })
    }

    /// Uniform `±1/√fan_in` weights and zero biases; the output layer's
    /// weights are further multiplied by `output_scale`.
    pub fn new<R: Rng + ?Sized>(
        layer_sizes: &[usize],
        activation: Activation,
        output_scale: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let mut net = Self::zeros(layer_sizes, activation)?;
        let layers = net.layers();
        let mut offset = 0;
        for l in 0..layers {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let scale = if l + 1 == layers { output_scale } else { 1.0 };
            for w in &mut net.params[offset..offset + fan_in * fan_out] {
                *w = rng.random_range(-bound..bound) * scale;
            }
            offset += fan_in * fan_out + fan_out;
        }
        Ok(net)
    }

    pub fn from_params(layer_sizes: &[usize], activation: Activation, params: Vec<f64>) -> Result<Self> {
        let mut net = Self::zeros(layer_sizes, activation)?;
        if params.len() != net.params.len() {
            return Err(Error::Contract(format!(
                "expected {} parameters for {layer_sizes:?}, got {}",
                net.params.len(),
                params.len()
            )));
        }
        net.params = params;
        Ok(net)
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn input_len(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_len(&self) -> usize {
        *self.layer_sizes.last().expect("validated")
    }

    fn layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    /// (weights, bias) of layer `l`, plus the offset of the weights.
    fn layer(&self, l: usize) -> (ArrayView2<'_, f64>, ArrayView1<'_, f64>, usize) {
        let offset: usize = self.layer_sizes[..=l]
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum();
        let (fan_in, fan_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
        let w = ArrayView2::from_shape((fan_out, fan_in), &self.params[offset..offset + fan_in * fan_out])
            .expect("layout matches sizes");
        let b = ArrayView1::from(&self.params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out]);
        (w, b, offset)
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        let batch = ArrayView2::from_shape((1, input.len()), input)
            .map_err(|e| Error::Contract(e.to_string()))?;
        let cache = self.forward_batch(batch)?;
        Ok(cache.output().row(0).to_vec())
    }

    /// Forward pass over a `batch × input` matrix.
    pub fn forward_batch(&self, inputs: ArrayView2<'_, f64>) -> Result<ForwardCache> {
        if inputs.ncols() != self.input_len() {
            return Err(Error::Contract(format!(
                "input width {} does not match network input {}",
                inputs.ncols(),
                self.input_len()
            )));
        }
        let layers = self.layers();
        let mut activations = Vec::with_capacity(layers + 1);
        activations.push(inputs.to_owned());
        for l in 0..layers {
            let (w, b, _) = self.layer(l);
            let mut z = activations[l].dot(&w.t());
            z += &b;
            if l + 1 < layers {
                self.activation.apply(&mut z);
            }
            activations.push(z);
        }
        Ok(ForwardCache { activations })
    }

    /// Gradient of `Σ_batch upstream · output` with respect to every
    /// parameter, in the flat parameter layout.
    pub fn backward(&self, cache: &ForwardCache, upstream: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let out = cache.output();
        if upstream.dim() != out.dim() {
            return Err(Error::Contract(format!(
                "upstream shape {:?} does not match output {:?}",
                upstream.dim(),
                out.dim()
            )));
        }
        let mut grads = vec![0.0; self.params.len()];
        let mut delta = upstream.to_owned();
        for l in (0..self.layers()).rev() {
            let (w, _, offset) = self.layer(l);
            let (fan_in, fan_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            let input = &cache.activations[l];
            let gw = delta.t().dot(input);
            // iter() walks in logical row-major order whatever the memory layout
            for (dst, &v) in grads[offset..offset + fan_in * fan_out].iter_mut().zip(gw.iter()) {
                *dst = v;
            }
            let gb = delta.sum_axis(Axis(0));
            for (dst, &v) in grads[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out]
                .iter_mut()
                .zip(gb.iter())
            {
                *dst = v;
            }
            if l > 0 {
                let mut next = delta.dot(&w);
                let act = self.activation;
                next.zip_mut_with(input, |d, &a| *d *= act.derivative_from_output(a));
                delta = next;
            }
        }
        Ok(grads)
    }
}

/// Parameter gradient of `upstream · f(input)` for a single input.
pub fn gradients(net: &Mlp, input: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
    let x = ArrayView2::from_shape((1, input.len()), input).map_err(|e| Error::Contract(e.to_string()))?;
    let g = ArrayView2::from_shape((1, upstream.len()), upstream).map_err(|e| Error::Contract(e.to_string()))?;
    if input.iter().chain(upstream).any(|v| !v.is_finite()) {
        return Err(Error::Contract("non-finite input or upstream gradient".into()));
    }
    let cache = net.forward_batch(x)?;
    net.backward(&cache, g)
}
