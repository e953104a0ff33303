//! Standard bias-corrected Adam.

use crate::net::Gradients;
use crate::tensor::Tensor;
use crate::{NnError, Result};

/// Optimizer hyperparameters. The defaults are the settings used for
/// curve-prediction training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 0.005,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Optimizer state: step counter plus first/second moment buffers, one
/// pair per trainable parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub step: u64,
    pub first: Vec<Tensor>,
    pub second: Vec<Tensor>,
}

impl AdamState {
    pub fn new(config: AdamConfig, param_shapes: &[&[usize]]) -> Self {
        Self {
            config,
            step: 0,
            first: param_shapes.iter().map(|s| Tensor::zeros(s)).collect(),
            second: param_shapes.iter().map(|s| Tensor::zeros(s)).collect(),
        }
    }

    /// One update: `p -= lr * m_hat / (sqrt(v_hat) + eps)` with the usual
    /// bias corrections. A zero gradient leaves its parameter unchanged
    /// only while the moments are zero; moments persist across steps.
    pub fn apply(&mut self, params: &mut [&mut Tensor], grads: &Gradients) -> Result<()> {
        if params.len() != self.first.len() || grads.tensors.len() != self.first.len() {
            return Err(NnError::ShapeMismatch(format!(
                "adam tracks {} tensors, got {} params and {} grads",
                self.first.len(),
                params.len(),
                grads.tensors.len()
            )));
        }
        self.step += 1;
        let t = self.step as i32;
        let c = self.config;
        let bias1 = 1.0 - c.beta1.powi(t);
        let bias2 = 1.0 - c.beta2.powi(t);
        for ((param, grad), (m, v)) in params
            .iter_mut()
            .zip(&grads.tensors)
            .zip(self.first.iter_mut().zip(self.second.iter_mut()))
        {
            if param.shape() != grad.shape() {
                return Err(NnError::ShapeMismatch(format!(
                    "parameter {:?} updated with gradient {:?}",
                    param.shape(),
                    grad.shape()
                )));
            }
            let pd = param.data_mut();
            let gd = grad.data();
            let md = m.data_mut();
            let vd = v.data_mut();
            for i in 0..pd.len() {
                let g = gd[i];
                md[i] = c.beta1 * md[i] + (1.0 - c.beta1) * g;
                vd[i] = c.beta2 * vd[i] + (1.0 - c.beta2) * g * g;
                let m_hat = md[i] / bias1;
                let v_hat = vd[i] / bias2;
                pd[i] -= c.lr * m_hat / (v_hat.sqrt() + c.eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grads_of(tensors: Vec<Tensor>) -> Gradients {
        Gradients { tensors }
    }

    #[test]
    fn first_step_moves_by_lr_times_sign() {
        let config = AdamConfig::default();
        let mut p = Tensor::from_vec(&[3], vec![1.0, -2.0, 0.5]).unwrap();
        let g = Tensor::from_vec(&[3], vec![0.4, -0.03, 0.9]).unwrap();
        let mut adam = AdamState::new(config, &[&[3]]);
        adam.apply(&mut [&mut p], &grads_of(vec![g.clone()])).unwrap();
        // with zero moments, m_hat = g and v_hat = g^2, so the update is
        // -lr * g / (|g| + eps) ~ -lr * sign(g) for |g| >> eps
        for i in 0..3 {
            let expected = [1.0, -2.0, 0.5][i] - config.lr * g.data()[i].signum();
            assert!(
                (p.data()[i] - expected).abs() < 1e-6,
                "param {i}: {} vs {expected}",
                p.data()[i]
            );
        }
    }

    #[test]
    fn zero_gradient_changes_nothing_from_fresh_state() {
        let mut p = Tensor::from_vec(&[2], vec![0.25, -0.75]).unwrap();
        let before = p.clone();
        let g = Tensor::zeros(&[2]);
        let mut adam = AdamState::new(AdamConfig::default(), &[&[2]]);
        adam.apply(&mut [&mut p], &grads_of(vec![g])).unwrap();
        assert_eq!(p, before);
    }

    #[test]
    fn two_engines_stay_bit_identical() {
        let run = || {
            let mut p = Tensor::from_vec(&[4], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
            let mut adam = AdamState::new(AdamConfig::default(), &[&[4]]);
            for step in 0..10 {
                let g = Tensor::from_vec(
                    &[4],
                    (0..4).map(|i| ((step * 4 + i) as f64).sin()).collect(),
                )
                .unwrap();
                adam.apply(&mut [&mut p], &grads_of(vec![g])).unwrap();
            }
            p
        };
        assert_eq!(run().data(), run().data());
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        let mut p = Tensor::zeros(&[2]);
        let mut adam = AdamState::new(AdamConfig::default(), &[&[2]]);
        let bad = grads_of(vec![Tensor::zeros(&[3])]);
        assert!(adam.apply(&mut [&mut p], &bad).is_err());
    }
}
