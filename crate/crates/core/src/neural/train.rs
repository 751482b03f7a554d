use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::{error, Network, SHUFFLE_STREAM};
use crate::error::{Error, Result};

pub const DEFAULT_LEARNING_RATE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingExample {
    pub features: Vec<f64>,
    pub desired: Vec<f64>,
}

impl TrainingExample {
    pub fn new(features: Vec<f64>, desired: Vec<f64>) -> Self {
        Self { features, desired }
    }
}

/// Online gradient descent: each epoch visits every example once, in an order
/// shuffled by ChaCha12 seeded with `seed` on [`SHUFFLE_STREAM`], applying
/// forward / back-propagation / update per example.
///
/// Returns the mean error of each epoch, where each example's error is taken
/// just before its own update.
pub fn train(
    net: &mut Network,
    data: &[TrainingExample],
    epochs: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if epochs == 0 {
        return Ok(Vec::new());
    }
    if data.is_empty() {
        return Err(Error::contract("cannot train on an empty data set"));
    }
    if !(learning_rate > 0.0 && learning_rate.is_finite()) {
        return Err(Error::contract(format!(
            "learning rate must be positive and finite, got {learning_rate}"
        )));
    }
    for (i, ex) in data.iter().enumerate() {
        if ex.features.len() != net.input_size() || ex.desired.len() != net.output_size() {
            return Err(Error::contract(format!(
                "example {i} has shape {}->{}, network is {}->{}",
                ex.features.len(),
                ex.desired.len(),
                net.input_size(),
                net.output_size()
            )));
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(SHUFFLE_STREAM);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut trace = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for &k in &order {
            let ex = &data[k];
            let acts = net.forward(&ex.features)?;
            total += error(acts.output(), &ex.desired)?;
            let grads = net.backprop(&acts, &ex.desired)?;
            net.apply_gradients(&grads, learning_rate)?;
        }
        trace.push(total / data.len() as f64);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::init_weights;

    fn xor() -> Vec<TrainingExample> {
        [
            ([0.0, 0.0], 0.0),
            ([0.0, 1.0], 1.0),
            ([1.0, 0.0], 1.0),
            ([1.0, 1.0], 0.0),
        ]
        .into_iter()
        .map(|(x, d)| TrainingExample::new(x.to_vec(), vec![d]))
        .collect()
    }

    #[test]
    fn zero_epochs_is_identity() {
        let mut net = init_weights(&[2, 2, 1], 3).unwrap();
        let before = net.clone();
        assert!(train(&mut net, &[], 0, 0.5, 1).unwrap().is_empty());
        assert_eq!(net, before);
    }

    #[test]
    fn empty_data_rejected() {
        let mut net = init_weights(&[2, 2, 1], 3).unwrap();
        assert!(train(&mut net, &[], 1, 0.5, 1).is_err());
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut net = init_weights(&[3, 2, 1], 3).unwrap();
        assert!(train(&mut net, &xor(), 1, 0.5, 1).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let run = |seed| {
            let mut net = init_weights(&[2, 2, 1], 42).unwrap();
            let trace = train(&mut net, &xor(), 200, 0.5, seed).unwrap();
            (net, trace)
        };
        let (a, ta) = run(9);
        let (b, tb) = run(9);
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        assert_eq!(ta.len(), 200);
        let (c, _) = run(10);
        assert_ne!(a, c);
    }

    #[test]
    fn trace_decreases_on_xor() {
        let mut net = init_weights(&[2, 2, 1], 42).unwrap();
        let trace = train(&mut net, &xor(), 20_000, DEFAULT_LEARNING_RATE, 42).unwrap();
        assert!(trace.last().unwrap() < &trace[0]);
    }
}
