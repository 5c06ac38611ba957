//! Per-view evidence network: a stack of dense layers with ReLU after
//! every affine, including the output head, so the emitted evidence is
//! always non-negative. Reverse-mode gradients are hand-rolled; the ReLU
//! subgradient at exactly zero is zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Rng;
use crate::opinion::EvidenceVector;

/// One affine layer, weights row-major `[out_dim x in_dim]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl DenseLayer {
    /// Glorot-uniform init `U(-s, s)`, `s = sqrt(6 / (in + out))`, weights
    /// drawn row-major, biases zero.
    fn glorot(in_dim: usize, out_dim: usize, rng: &mut Rng) -> Result<Self> {
        let s = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let mut weights = Vec::with_capacity(in_dim * out_dim);
        for _ in 0..in_dim * out_dim {
            weights.push(rng.sample_uniform(-s, s)?);
        }
        Ok(DenseLayer { in_dim, out_dim, weights, biases: vec![0.0; out_dim] })
    }

    fn affine(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for o in 0..self.out_dim {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let dot: f64 = row.iter().zip(input).map(|(w, x)| w * x).sum();
            out.push(dot + self.biases[o]);
        }
    }
}

/// Activations recorded by [`EvidenceNetwork::forward_cached`] for the
/// backward pass: the input and each layer's pre- and post-ReLU values.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    input: Vec<f64>,
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn evidence(&self) -> Result<EvidenceVector> {
        EvidenceVector::new(self.post.last().expect("network has layers").clone())
    }
}

/// Parameter gradients, shaped like the network's layers.
#[derive(Debug, Clone)]
pub struct NetworkGradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl NetworkGradients {
    pub fn zeros_like(net: &EvidenceNetwork) -> Self {
        NetworkGradients {
            weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            biases: net.layers.iter().map(|l| vec![0.0; l.biases.len()]).collect(),
        }
    }

    pub fn accumulate(&mut self, other: &NetworkGradients) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            for x in t.iter_mut() {
                *x *= factor;
            }
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }
}

/// Fully connected evidence network for one view.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceNetwork {
    layers: Vec<DenseLayer>,
}

impl EvidenceNetwork {
    pub fn new(
        input_dim: usize,
        hidden_dims: &[usize],
        num_classes: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidArgument("input width must be positive".into()));
        }
        if num_classes < 2 {
            return Err(Error::InvalidArgument(format!(
                "evidence head needs at least 2 classes, got {num_classes}"
            )));
        }
        if hidden_dims.iter().any(|&h| h == 0) {
            return Err(Error::InvalidArgument("hidden widths must be positive".into()));
        }
        let mut layers = Vec::with_capacity(hidden_dims.len() + 1);
        let mut prev = input_dim;
        for &h in hidden_dims {
            layers.push(DenseLayer::glorot(prev, h, rng)?);
            prev = h;
        }
        layers.push(DenseLayer::glorot(prev, num_classes, rng)?);
        Ok(EvidenceNetwork { layers })
    }

    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArgument("network needs at least one layer".into()));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::Shape(format!(
                    "layer {i} outputs {} but layer {} expects {}",
                    pair[0].out_dim,
                    i + 1,
                    pair[1].in_dim
                )));
            }
        }
        for (i, l) in layers.iter().enumerate() {
            if l.weights.len() != l.in_dim * l.out_dim || l.biases.len() != l.out_dim {
                return Err(Error::Shape(format!("layer {i} has inconsistent buffers")));
            }
        }
        Ok(EvidenceNetwork { layers })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn num_classes(&self) -> usize {
        self.layers.last().expect("network has layers").out_dim
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    pub fn forward(&self, x: &[f64]) -> Result<EvidenceVector> {
        self.forward_cached(x)?.evidence()
    }

    pub fn forward_cached(&self, x: &[f64]) -> Result<ForwardCache> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input width {} does not match network width {}",
                x.len(),
                self.input_dim()
            )));
        }
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post = Vec::with_capacity(self.layers.len());
        let mut current = x.to_vec();
        for layer in &self.layers {
            let mut z = Vec::with_capacity(layer.out_dim);
            layer.affine(&current, &mut z);
            current = z.iter().map(|v| v.max(0.0)).collect();
            pre.push(z);
            post.push(current.clone());
        }
        Ok(ForwardCache { input: x.to_vec(), pre, post })
    }

    /// Reverse-mode pass from `d(loss)/d(evidence)` to parameter gradients.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        upstream: &[f64],
    ) -> Result<NetworkGradients> {
        if upstream.len() != self.num_classes() {
            return Err(Error::Shape(format!(
                "upstream gradient has length {}, expected {}",
                upstream.len(),
                self.num_classes()
            )));
        }
        if cache.pre.len() != self.layers.len() || cache.input.len() != self.input_dim() {
            return Err(Error::Shape("forward cache does not match this network".into()));
        }
        let mut grads = NetworkGradients::zeros_like(self);
        let mut grad_post = upstream.to_vec();
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let grad_pre: Vec<f64> = grad_post
                .iter()
                .zip(&cache.pre[l])
                .map(|(g, z)| if *z > 0.0 { *g } else { 0.0 })
                .collect();
            let below: &[f64] = if l == 0 { &cache.input } else { &cache.post[l - 1] };
            for o in 0..layer.out_dim {
                let g = grad_pre[o];
                if g != 0.0 {
                    let row = &mut grads.weights[l][o * layer.in_dim..(o + 1) * layer.in_dim];
                    for (w, x) in row.iter_mut().zip(below) {
                        *w += g * x;
                    }
                }
                grads.biases[l][o] += g;
            }
            if l > 0 {
                let mut next = vec![0.0; layer.in_dim];
                for o in 0..layer.out_dim {
                    let g = grad_pre[o];
                    if g != 0.0 {
                        let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                        for (n, w) in next.iter_mut().zip(row) {
                            *n += g * w;
                        }
                    }
                }
                grad_post = next;
            }
        }
        Ok(grads)
    }

    /// Flatten all parameters (per layer: weights then biases).
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.biases);
        }
        out
    }

    /// Overwrite all parameters from a flat vector laid out like [`params`].
    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(Error::Shape(format!(
                "parameter vector has length {}, expected {}",
                flat.len(),
                self.num_params()
            )));
        }
        let mut offset = 0;
        for l in &mut self.layers {
            l.weights.copy_from_slice(&flat[offset..offset + l.weights.len()]);
            offset += l.weights.len();
            l.biases.copy_from_slice(&flat[offset..offset + l.biases.len()]);
            offset += l.biases.len();
        }
        Ok(())
    }

    /// Mutable views of every parameter tensor (per layer: weights, biases),
    /// parallel to the tensors in [`NetworkGradients`].
    pub fn param_tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(self.layers.len() * 2);
        for l in &mut self.layers {
            out.push(l.weights.as_mut_slice());
            out.push(l.biases.as_mut_slice());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tiny_net(rng: &mut Rng) -> EvidenceNetwork {
        EvidenceNetwork::new(2, &[3], 3, rng).unwrap()
    }

    #[test]
    fn zero_network_emits_zero_evidence() {
        let mut rng = Rng::new(1);
        let mut net = tiny_net(&mut rng);
        net.set_params(&vec![0.0; net.num_params()]).unwrap();
        let e = net.forward(&[1.0, -2.0]).unwrap();
        assert_eq!(e.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn identity_like_single_layer_passes_positive_input_through() {
        let layer = DenseLayer {
            in_dim: 2,
            out_dim: 2,
            weights: vec![1.0, 0.0, 0.0, 1.0],
            biases: vec![0.0, 0.0],
        };
        let net = EvidenceNetwork::from_layers(vec![layer]).unwrap();
        let e = net.forward(&[3.0, 0.5]).unwrap();
        assert_eq!(e.as_slice(), &[3.0, 0.5]);
        // negative inputs are clipped by the evidence head
        let e = net.forward(&[-3.0, 0.5]).unwrap();
        assert_eq!(e.as_slice(), &[0.0, 0.5]);
    }

    #[test]
    fn forward_matches_straight_line_reimplementation() {
        let mut rng = Rng::new(2);
        let net = EvidenceNetwork::new(4, &[5, 3], 2, &mut rng).unwrap();
        let x: Vec<f64> = (0..4).map(|_| rng.sample_normal(0.0, 1.0).unwrap()).collect();
        let got = net.forward(&x).unwrap();

        // independent evaluation with explicit index arithmetic
        let mut a = x.clone();
        for layer in net.layers() {
            let mut next = vec![0.0; layer.out_dim];
            for (o, n) in next.iter_mut().enumerate() {
                let mut acc = layer.biases[o];
                for (i, v) in a.iter().enumerate() {
                    acc += layer.weights[o * layer.in_dim + i] * v;
                }
                *n = acc.max(0.0);
            }
            a = next;
        }
        for (g, e) in got.as_slice().iter().zip(&a) {
            assert_abs_diff_eq!(g, e, epsilon = 1e-10);
        }
    }

    #[test]
    fn forward_rejects_width_mismatch() {
        let mut rng = Rng::new(3);
        let net = tiny_net(&mut rng);
        assert!(net.forward(&[1.0]).is_err());
        assert!(net.forward(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn backward_zero_upstream_gives_zero_grads() {
        let mut rng = Rng::new(4);
        let net = tiny_net(&mut rng);
        let cache = net.forward_cached(&[0.5, -0.3]).unwrap();
        let g = net.backward(&cache, &[0.0, 0.0, 0.0]).unwrap();
        assert!(g.flatten().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn backward_scalar_chain_matches_hand_derivative() {
        // single 1 -> 1 layer: e = relu(w x + b)
        let layer = DenseLayer { in_dim: 1, out_dim: 1, weights: vec![2.0], biases: vec![1.0] };
        let net = EvidenceNetwork {
            layers: vec![layer],
        };
        let cache = net.forward_cached(&[3.0]).unwrap();
        // e = 7, upstream u: de/dw = u * x, de/db = u
        let g = net.backward(&cache, &[0.25]).unwrap();
        assert_abs_diff_eq!(g.weights[0][0], 0.75, epsilon = 1e-10);
        assert_abs_diff_eq!(g.biases[0][0], 0.25, epsilon = 1e-10);
        // dead unit: w x + b < 0 blocks the gradient
        let cache = net.forward_cached(&[-3.0]).unwrap();
        let g = net.backward(&cache, &[0.25]).unwrap();
        assert_eq!(g.weights[0][0], 0.0);
        assert_eq!(g.biases[0][0], 0.0);
    }

    #[test]
    fn backward_matches_finite_differences_over_parameters() {
        use crate::numerics::finite_diff_gradient;
        let mut rng = Rng::new(5);
        let net = tiny_net(&mut rng);
        // keep pre-activations away from the ReLU kinks
        let x = [0.9, -0.7];
        let upstream = [0.3, -0.8, 0.5];
        let cache = net.forward_cached(&x).unwrap();
        let analytic = net.backward(&cache, &upstream).unwrap().flatten();

        let base = net.params();
        let fd = finite_diff_gradient(
            |p| {
                let mut probe = net.clone();
                probe.set_params(p)?;
                let e = probe.forward(&x)?;
                Ok(e.as_slice().iter().zip(&upstream).map(|(v, u)| v * u).sum())
            },
            &base,
            1e-6,
        )
        .unwrap();
        for (a, f) in analytic.iter().zip(&fd) {
            assert_abs_diff_eq!(a, f, epsilon = 1e-6);
        }
    }

    #[test]
    fn params_roundtrip() {
        let mut rng = Rng::new(6);
        let mut net = tiny_net(&mut rng);
        let saved = net.params();
        let mut shifted = saved.clone();
        for v in &mut shifted {
            *v += 0.5;
        }
        net.set_params(&shifted).unwrap();
        assert_eq!(net.params(), shifted);
        assert!(net.set_params(&[0.0]).is_err());
    }

    #[test]
    fn construction_validates_shapes() {
        let mut rng = Rng::new(7);
        assert!(EvidenceNetwork::new(0, &[4], 3, &mut rng).is_err());
        assert!(EvidenceNetwork::new(4, &[0], 3, &mut rng).is_err());
        assert!(EvidenceNetwork::new(4, &[4], 1, &mut rng).is_err());
        let bad = vec![
            DenseLayer { in_dim: 2, out_dim: 3, weights: vec![0.0; 6], biases: vec![0.0; 3] },
            DenseLayer { in_dim: 4, out_dim: 2, weights: vec![0.0; 8], biases: vec![0.0; 2] },
        ];
        assert!(EvidenceNetwork::from_layers(bad).is_err());
    }
}
