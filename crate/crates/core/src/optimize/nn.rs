//! Single-input, single-output feed-forward networks with one sigmoid
//! hidden layer, and the chromosome that stacks four of them.

use serde::{Deserialize, Serialize};

use super::Objective;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub hidden: usize,
}

impl Default for Architecture {
    fn default() -> Self {
        Architecture { hidden: 10 }
    }
}

impl Architecture {
    /// Parameters per network: input weights, output weights, hidden biases
    /// and the output bias.
    pub fn block_len(&self) -> usize {
        3 * self.hidden + 1
    }
}

/// Names of the four fitted curves, in chromosome order.
pub const BLOCK_NAMES: [&str; 4] = ["LV", "AV", "LA", "AA"];

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Evaluate one network at input `t`. Block layout:
/// `[phi_1..phi_h, eta_1..eta_h, b_1..b_h, b_out]`.
pub fn nn_forward(block: &[f64], arch: Architecture, t: f64) -> Result<f64> {
    if block.len() != arch.block_len() {
        return Err(Error::Shape {
            expected: arch.block_len(),
            got: block.len(),
        });
    }
    Ok(forward_unchecked(block, arch.hidden, t))
}

fn forward_unchecked(block: &[f64], h: usize, t: f64) -> f64 {
    let (phi, rest) = block.split_at(h);
    let (eta, rest) = rest.split_at(h);
    let (bias, out) = rest.split_at(h);
    let mut y = out[0];
    for k in 0..h {
        y += eta[k] * sigmoid(phi[k] * t + bias[k]);
    }
    y
}

/// Decision vector of the four curve networks `[W_LV, W_AV, W_LA, W_AA]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub arch: Architecture,
    pub genes: Vec<f64>,
}

impl Chromosome {
    pub fn zeros(arch: Architecture) -> Self {
        Chromosome {
            arch,
            genes: vec![0.0; 4 * arch.block_len()],
        }
    }

    pub fn from_blocks(arch: Architecture, blocks: &[Vec<f64>; 4]) -> Result<Self> {
        let mut genes = Vec::with_capacity(4 * arch.block_len());
        for b in blocks {
            if b.len() != arch.block_len() {
                return Err(Error::Shape {
                    expected: arch.block_len(),
                    got: b.len(),
                });
            }
            genes.extend_from_slice(b);
        }
        Ok(Chromosome { arch, genes })
    }

    pub fn block(&self, i: usize) -> &[f64] {
        let n = self.arch.block_len();
        &self.genes[i * n..(i + 1) * n]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut [f64] {
        let n = self.arch.block_len();
        &mut self.genes[i * n..(i + 1) * n]
    }

    /// Evaluate all four networks at `t`.
    pub fn forward(&self, t: f64) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| forward_unchecked(self.block(i), self.arch.hidden, t))
    }
}

/// Mean squared error of one network against a sampled curve, with an
/// analytic gradient.
pub struct CurveFit {
    pub arch: Architecture,
    pub t: Vec<f64>,
    pub y: Vec<f64>,
}

impl CurveFit {
    pub fn new(arch: Architecture, t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::Shape {
                expected: t.len(),
                got: y.len(),
            });
        }
        if t.is_empty() {
            return Err(Error::Domain("curve has no samples".into()));
        }
        Ok(CurveFit { arch, t, y })
    }
}

impl Objective for CurveFit {
    fn dim(&self) -> usize {
        self.arch.block_len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let h = self.arch.hidden;
        let sum: f64 = self
            .t
            .iter()
            .zip(&self.y)
            .map(|(&t, &y)| {
                let r = forward_unchecked(x, h, t) - y;
                r * r
            })
            .sum();
        sum / self.t.len() as f64
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.value_and_gradient(x, grad);
    }

    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let h = self.arch.hidden;
        let (phi, rest) = x.split_at(h);
        let (eta, rest) = rest.split_at(h);
        let (bias, out) = rest.split_at(h);
        grad.fill(0.0);
        let mut act = vec![0.0; h];
        let mut sum = 0.0;
        for (&t, &y) in self.t.iter().zip(&self.y) {
            let mut yhat = out[0];
            for k in 0..h {
                act[k] = sigmoid(phi[k] * t + bias[k]);
                yhat += eta[k] * act[k];
            }
            let r = yhat - y;
            sum += r * r;
            for k in 0..h {
                let s = act[k];
                let back = r * eta[k] * s * (1.0 - s);
                grad[k] += back * t;
                grad[h + k] += r * s;
                grad[2 * h + k] += back;
            }
            grad[3 * h] += r;
        }
        let n = self.t.len() as f64;
        for g in grad.iter_mut() {
            *g *= 2.0 / n;
        }
        sum / n
    }

    fn gradient_cost(&self) -> usize {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_network_outputs_zero() {
        let arch = Architecture::default();
        let w = vec![0.0; arch.block_len()];
        assert_eq!(nn_forward(&w, arch, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn single_neuron_at_origin() {
        let arch = Architecture { hidden: 1 };
        // phi = 0, eta = 2, b = 0, out = 0
        assert_eq!(nn_forward(&[0.0, 2.0, 0.0, 0.0], arch, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn shape_mismatch() {
        let arch = Architecture { hidden: 2 };
        assert!(matches!(
            nn_forward(&[0.0; 5], arch, 0.0),
            Err(Error::Shape { expected: 7, got: 5 })
        ));
    }

    #[test]
    fn forward_is_deterministic() {
        let arch = Architecture::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w: Vec<f64> = (0..arch.block_len()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let a = nn_forward(&w, arch, 0.41).unwrap();
        let b = nn_forward(&w, arch, 0.41).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn analytic_gradient_matches_differences() {
        let arch = Architecture { hidden: 4 };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t: Vec<f64> = (0..25).map(|i| i as f64 / 24.0).collect();
        let y: Vec<f64> = t.iter().map(|x| (3.0 * x).sin()).collect();
        let fit = CurveFit::new(arch, t, y).unwrap();
        for _ in 0..5 {
            let w: Vec<f64> = (0..arch.block_len()).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mut g = vec![0.0; w.len()];
            fit.gradient(&w, &mut g);
            let mut fd = vec![0.0; w.len()];
            crate::optimize::central_difference(|p| fit.value(p), &w, &mut fd);
            for (a, b) in g.iter().zip(&fd) {
                assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-3), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn chromosome_blocks() {
        let arch = Architecture { hidden: 1 };
        let blocks = [vec![1.0; 4], vec![2.0; 4], vec![3.0; 4], vec![4.0; 4]];
        let c = Chromosome::from_blocks(arch, &blocks).unwrap();
        assert_eq!(c.genes.len(), 16);
        assert_eq!(c.block(2), &[3.0; 4]);
        assert!(Chromosome::from_blocks(arch, &[vec![1.0; 3], vec![], vec![], vec![]]).is_err());
    }
}
