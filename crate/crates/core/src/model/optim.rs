//! Adam with L2 weight decay folded into the gradient before the moment
//! updates (`g += wd * p`), bias-corrected first/second moments, and the
//! usual defaults beta1 = 0.9, beta2 = 0.999, eps = 1e-8.

use crate::error::{Error, Result};

use super::network::{EvidenceNetwork, NetworkGradients};

#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl Adam {
    /// Optimizer for one network; moment buffers mirror its tensors.
    pub fn for_network(net: &EvidenceNetwork, learning_rate: f64, weight_decay: f64) -> Self {
        let shapes: Vec<usize> = net
            .layers()
            .iter()
            .flat_map(|l| [l.weights.len(), l.biases.len()])
            .collect();
        Adam {
            learning_rate,
            weight_decay,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            first: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            second: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One update over all of the network's tensors.
    pub fn step(&mut self, net: &mut EvidenceNetwork, grads: &NetworkGradients) -> Result<()> {
        let tensors = net.param_tensors_mut();
        let grad_tensors: Vec<&[f64]> = grads
            .weights
            .iter()
            .zip(&grads.biases)
            .flat_map(|(w, b)| [w.as_slice(), b.as_slice()])
            .collect();
        if tensors.len() != self.first.len() || grad_tensors.len() != self.first.len() {
            return Err(Error::Shape("optimizer state does not match the network".into()));
        }
        self.step += 1;
        let bias1 = 1.0 - self.beta1.powi(self.step as i32);
        let bias2 = 1.0 - self.beta2.powi(self.step as i32);
        for ((params, grad), (m, v)) in tensors
            .into_iter()
            .zip(grad_tensors)
            .zip(self.first.iter_mut().zip(self.second.iter_mut()))
        {
            if params.len() != grad.len() {
                return Err(Error::Shape("gradient tensor shape mismatch".into()));
            }
            for i in 0..params.len() {
                let g = grad[i] + self.weight_decay * params[i];
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g;
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g * g;
                let m_hat = m[i] / bias1;
                let v_hat = v[i] / bias2;
                params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }
}
