//! Feed-forward sigmoid network trained by back-propagation.
//!
//! Notation follows the usual layered formulation. For a unit `j` fed by the
//! units `i` of the previous layer:
//!
//! * total input `x_j = Σ_i y_i W_ij`, where the sum includes a bias unit with
//!   constant activity 1.0 (a threshold `T` is the bias weight negated);
//! * activity `y_j = 1 / (1 + e^(-x_j))`;
//! * error `E = ½ Σ_j (y_j - d_j)²` over output units.
//!
//! Back-propagation computes, layer by layer from the output:
//!
//! * `EA_j = ∂E/∂y_j` (output: `y_j - d_j`; hidden: `Σ_k EI_k W_jk`);
//! * `EI_j = ∂E/∂x_j = EA_j y_j (1 - y_j)`;
//! * `EW_ij = ∂E/∂W_ij = EI_j y_i`.
//!
//! Input units pass raw features through without a sigmoid.

mod gradcheck;
mod model_io;
mod train;

pub use gradcheck::{
    numeric_weight_gradients, relative_error, run_gradcheck, GradcheckReport, GRADCHECK_STEP,
    GRADCHECK_TOLERANCE,
};
pub use model_io::{decode_model, encode_model, load_model, save_model, MODEL_MAGIC};
pub use train::{train, TrainingExample, DEFAULT_LEARNING_RATE};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// McCulloch-Pitts threshold unit: fires iff `Σ x_i w_i > threshold`.
pub fn mcp_fire(inputs: &[f64], weights: &[f64], threshold: f64) -> Result<bool> {
    if inputs.len() != weights.len() {
        return Err(Error::contract(format!(
            "{} inputs but {} weights",
            inputs.len(),
            weights.len()
        )));
    }
    let sum: f64 = inputs.iter().zip(weights).map(|(x, w)| x * w).sum();
    Ok(sum > threshold)
}

/// Squared error `½ Σ (y_j - d_j)²`.
pub fn error(output: &[f64], desired: &[f64]) -> Result<f64> {
    if output.len() != desired.len() {
        return Err(Error::contract(format!(
            "output has {} values, desired has {}",
            output.len(),
            desired.len()
        )));
    }
    Ok(0.5
        * output
            .iter()
            .zip(desired)
            .map(|(y, d)| (y - d).powi(2))
            .sum::<f64>())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layer_sizes: Vec<usize>,
    // weights[l] is (layer_sizes[l] + 1) x layer_sizes[l + 1]; last row is the bias
    weights: Vec<Array2<f64>>,
}

fn check_sizes(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 {
        return Err(Error::contract(
            "a network needs at least an input and an output layer",
        ));
    }
    if layer_sizes.contains(&0) {
        return Err(Error::contract("every layer needs at least one unit"));
    }
    Ok(())
}

impl Network {
    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        check_sizes(layer_sizes)?;
        let weights = layer_sizes
            .windows(2)
            .map(|w| Array2::zeros((w[0] + 1, w[1])))
            .collect();
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
        })
    }

    pub fn from_weights(layer_sizes: &[usize], weights: Vec<Array2<f64>>) -> Result<Self> {
        check_sizes(layer_sizes)?;
        if weights.len() != layer_sizes.len() - 1 {
            return Err(Error::contract(format!(
                "{} layers need {} weight matrices, got {}",
                layer_sizes.len(),
                layer_sizes.len() - 1,
                weights.len()
            )));
        }
        for (l, (w, pair)) in weights.iter().zip(layer_sizes.windows(2)).enumerate() {
            let expected = (pair[0] + 1, pair[1]);
            if w.dim() != expected {
                return Err(Error::contract(format!(
                    "weight matrix {l} has shape {:?}, expected {expected:?}",
                    w.dim()
                )));
            }
            if !w.iter().all(|v| v.is_finite()) {
                return Err(Error::contract(format!(
                    "weight matrix {l} has a non-finite entry"
                )));
            }
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().expect("at least two layers")
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    /// Entry `W_ij` of matrix `layer`; the bias row is `row == layer_sizes[layer]`.
    pub fn weight_mut(&mut self, layer: usize, row: usize, col: usize) -> Option<&mut f64> {
        self.weights.get_mut(layer)?.get_mut([row, col])
    }

    pub fn forward(&self, input: &[f64]) -> Result<Activations> {
        if input.len() != self.input_size() {
            return Err(Error::contract(format!(
                "input has {} features, network expects {}",
                input.len(),
                self.input_size()
            )));
        }
        let mut layers = Vec::with_capacity(self.layer_sizes.len());
        layers.push(input.to_vec());
        for w in &self.weights {
            let prev = layers.last().expect("input layer pushed");
            let bias = prev.len();
            let next = (0..w.ncols())
                .map(|j| {
                    let x: f64 = prev
                        .iter()
                        .enumerate()
                        .map(|(i, y)| y * w[[i, j]])
                        .sum::<f64>()
                        + w[[bias, j]];
                    sigmoid(x)
                })
                .collect();
            layers.push(next);
        }
        Ok(Activations { layers })
    }

    /// Output activity for `input`.
    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(input)?.layers.pop().expect("output layer"))
    }

    pub fn backprop(&self, acts: &Activations, desired: &[f64]) -> Result<Gradients> {
        let n_layers = self.layer_sizes.len();
        let shapes_ok = acts.layers.len() == n_layers
            && acts
                .layers
                .iter()
                .zip(&self.layer_sizes)
                .all(|(a, &n)| a.len() == n);
        if !shapes_ok {
            return Err(Error::contract(
                "activations do not match the network shape",
            ));
        }
        if desired.len() != self.output_size() {
            return Err(Error::contract(format!(
                "desired has {} values, network outputs {}",
                desired.len(),
                self.output_size()
            )));
        }

        let mut ea: Vec<Vec<f64>> = self.layer_sizes.iter().map(|&n| vec![0.0; n]).collect();
        let mut ei: Vec<Vec<f64>> = vec![Vec::new(); n_layers];
        let mut ew: Vec<Array2<f64>> = self
            .weights
            .iter()
            .map(|w| Array2::zeros(w.dim()))
            .collect();

        // step 1
        ea[n_layers - 1] = acts.layers[n_layers - 1]
            .iter()
            .zip(desired)
            .map(|(y, d)| y - d)
            .collect();

        for l in (1..n_layers).rev() {
            // step 2
            ei[l] = ea[l]
                .iter()
                .zip(&acts.layers[l])
                .map(|(a, y)| a * y * (1.0 - y))
                .collect();

            let src = &acts.layers[l - 1];
            let w = &self.weights[l - 1];
            let bias = src.len();
            // step 3
            for (j, &ei_j) in ei[l].iter().enumerate() {
                for (i, &y_i) in src.iter().enumerate() {
                    ew[l - 1][[i, j]] = ei_j * y_i;
                }
                ew[l - 1][[bias, j]] = ei_j;
            }
            // step 4
            for (i, ea_i) in ea[l - 1].iter_mut().enumerate() {
                *ea_i = ei[l].iter().enumerate().map(|(j, e)| e * w[[i, j]]).sum();
            }
        }

        Ok(Gradients { ea, ei, ew })
    }

    /// Plain gradient descent: `W_ij -= learning_rate * EW_ij`.
    pub fn apply_gradients(&mut self, grads: &Gradients, learning_rate: f64) -> Result<()> {
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            return Err(Error::contract(format!(
                "learning rate must be positive and finite, got {learning_rate}"
            )));
        }
        if grads.ew.len() != self.weights.len()
            || grads
                .ew
                .iter()
                .zip(&self.weights)
                .any(|(g, w)| g.dim() != w.dim())
        {
            return Err(Error::contract("gradient shapes do not match the network"));
        }
        for (w, g) in self.weights.iter_mut().zip(&grads.ew) {
            w.scaled_add(-learning_rate, g);
        }
        Ok(())
    }

    /// Squared error of the network on one example.
    pub fn example_error(&self, input: &[f64], desired: &[f64]) -> Result<f64> {
        error(&self.predict(input)?, desired)
    }
}

/// Unit activities for every layer, input layer first. Bias units are not
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Activations {
    layers: Vec<Vec<f64>>,
}

impl Activations {
    pub fn layers(&self) -> &[Vec<f64>] {
        &self.layers
    }

    pub fn output(&self) -> &[f64] {
        self.layers.last().expect("at least two layers")
    }
}

/// Error derivatives from one back-propagation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    /// `EA` for every layer, including the input layer.
    pub ea: Vec<Vec<f64>>,
    /// `EI` per layer; empty for the input layer.
    pub ei: Vec<Vec<f64>>,
    /// `EW`, shaped like the network's weight matrices.
    pub ew: Vec<Array2<f64>>,
}

/// ChaCha stream used for weight initialization; training shuffles use
/// [`SHUFFLE_STREAM`], so one seed drives both without sharing a sequence.
pub const INIT_STREAM: u64 = 0;
pub const SHUFFLE_STREAM: u64 = 1;

/// Weights drawn uniformly from `[-0.5, 0.5]` using ChaCha12 seeded with
/// `seed` on [`INIT_STREAM`], filled matrix by matrix in row-major order.
pub fn init_weights(layer_sizes: &[usize], seed: u64) -> Result<Network> {
    let mut net = Network::zeros(layer_sizes)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(INIT_STREAM);
    for w in &mut net.weights {
        w.iter_mut().for_each(|v| *v = rng.gen_range(-0.5..=0.5));
    }
    Ok(net)
}
