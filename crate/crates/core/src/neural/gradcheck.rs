//! Central finite-difference verification of back-propagated weight gradients.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::Network;
use crate::error::Result;

/// Step used by [`run_gradcheck`].
pub const GRADCHECK_STEP: f64 = 1e-4;
/// Largest acceptable relative error.
pub const GRADCHECK_TOLERANCE: f64 = 1e-5;

/// `(E(W_ij + h) - E(W_ij - h)) / 2h` for every weight, computed from forward
/// passes only.
pub fn numeric_weight_gradients(
    net: &Network,
    input: &[f64],
    desired: &[f64],
    step: f64,
) -> Result<Vec<Array2<f64>>> {
    let mut probe = net.clone();
    let mut out = Vec::with_capacity(net.weights().len());
    for (l, w) in net.weights().iter().enumerate() {
        let mut grad = Array2::zeros(w.dim());
        for ((r, c), &orig) in w.indexed_iter() {
            *probe.weight_mut(l, r, c).expect("index from same shape") = orig + step;
            let plus = probe.example_error(input, desired)?;
            *probe.weight_mut(l, r, c).expect("index from same shape") = orig - step;
            let minus = probe.example_error(input, desired)?;
            *probe.weight_mut(l, r, c).expect("index from same shape") = orig;
            grad[[r, c]] = (plus - minus) / (2.0 * step);
        }
        out.push(grad);
    }
    Ok(out)
}

/// `|a - n| / max(|a|, |n|, 1e-8)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradcheckReport {
    pub networks: usize,
    pub weights_checked: usize,
    pub max_relative_error: f64,
}

impl GradcheckReport {
    pub fn passed(&self) -> bool {
        self.max_relative_error <= GRADCHECK_TOLERANCE
    }
}

/// Checks back-propagation against finite differences on `networks` random
/// networks with 2 or 3 layers of 1 to 5 units, weights in `[-1, 1]`, inputs
/// in `[-1, 1]` and targets in `[0, 1]`.
///
/// With `corrupt` set, one analytic gradient per network is perturbed before
/// comparison; the check is then expected to fail.
pub fn run_gradcheck(seed: u64, networks: usize, corrupt: bool) -> Result<GradcheckReport> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut report = GradcheckReport {
        networks,
        weights_checked: 0,
        max_relative_error: 0.0,
    };
    for _ in 0..networks {
        let depth = rng.gen_range(2..=3);
        let sizes: Vec<usize> = (0..depth).map(|_| rng.gen_range(1..=5)).collect();
        let mut net = Network::zeros(&sizes)?;
        for l in 0..sizes.len() - 1 {
            for r in 0..=sizes[l] {
                for c in 0..sizes[l + 1] {
                    *net.weight_mut(l, r, c).expect("in range") = rng.gen_range(-1.0..=1.0);
                }
            }
        }
        let input: Vec<f64> = (0..sizes[0]).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let desired: Vec<f64> = (0..*sizes.last().unwrap())
            .map(|_| rng.gen_range(0.0..=1.0))
            .collect();

        let mut grads = net.backprop(&net.forward(&input)?, &desired)?;
        if corrupt {
            grads.ew[0][[0, 0]] += 1e-2;
        }
        let numeric = numeric_weight_gradients(&net, &input, &desired, GRADCHECK_STEP)?;
        for (a, n) in grads.ew.iter().zip(&numeric) {
            for (&a, &n) in a.iter().zip(n) {
                report.weights_checked += 1;
                report.max_relative_error = report.max_relative_error.max(relative_error(a, n));
            }
        }
    }
    Ok(report)
}
