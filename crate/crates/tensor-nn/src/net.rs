//! Layer stacks: shape inference, cached forward passes, and reverse-mode
//! gradients.

use crate::layer::{self, Layer};
use crate::loss::{self, LossKind};
use crate::tensor::Tensor;
use crate::{NnError, Result};

/// An ordered stack of layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub layers: Vec<Layer>,
}

/// Gradients for every trainable parameter tensor, in [`Network::params`]
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub tensors: Vec<Tensor>,
}

/// Everything the backward pass needs from a forward pass.
#[derive(Debug)]
pub struct ForwardTrace {
    /// Input to each layer, in layer order.
    inputs: Vec<Tensor>,
    /// Argmax maps for pool layers, `None` elsewhere.
    argmax: Vec<Option<Vec<u32>>>,
    pub output: Tensor,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Self {
        Self { layers }
    }

    /// Shape-inference pre-pass: the output shape of every layer for the
    /// given input shape. Fails on any inconsistency, so a config is
    /// fully validated before training touches data.
    pub fn infer_shapes(&self, input_shape: &[usize]) -> Result<Vec<Vec<usize>>> {
        let mut shapes = Vec::with_capacity(self.layers.len());
        let mut current = input_shape.to_vec();
        for (idx, layer) in self.layers.iter().enumerate() {
            current = layer.infer_shape(&current).map_err(|e| {
                NnError::InvalidConfig(format!("layer {idx} ({}): {e}", layer.kind_name()))
            })?;
            shapes.push(current.clone());
        }
        Ok(shapes)
    }

    /// Trainable parameter tensors in a fixed order (conv kernels, conv
    /// bias, dense weight, dense bias, by layer). The embedding is frozen
    /// and never appears here.
    pub fn params(&self) -> Vec<&Tensor> {
        let mut out = Vec::new();
        for layer in &self.layers {
            match layer {
                Layer::Conv(c) => {
                    out.push(&c.kernels);
                    out.push(&c.bias);
                }
                Layer::Dense(d) => {
                    out.push(&d.weight);
                    out.push(&d.bias);
                }
                _ => {}
            }
        }
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = Vec::new();
        for layer in &mut self.layers {
            match layer {
                Layer::Conv(c) => {
                    out.push(&mut c.kernels);
                    out.push(&mut c.bias);
                }
                Layer::Dense(d) => {
                    out.push(&mut d.weight);
                    out.push(&mut d.bias);
                }
                _ => {}
            }
        }
        out
    }

    pub fn param_count(&self) -> usize {
        self.params().iter().map(|t| t.len()).sum()
    }

    fn forward_one(&self, idx: usize, x: &Tensor) -> Result<(Tensor, Option<Vec<u32>>)> {
        match &self.layers[idx] {
            Layer::Embed(e) => Ok((layer::embed_forward(x, e)?, None)),
            Layer::Conv(c) => Ok((layer::conv2d_forward(x, c)?, None)),
            Layer::Relu => Ok((layer::relu_forward(x), None)),
            Layer::Pool(p) => {
                let (y, argmax) = layer::maxpool_forward(x, *p)?;
                Ok((y, Some(argmax)))
            }
            Layer::Flatten => {
                let len = x.len();
                Ok((x.clone().reshaped(&[len])?, None))
            }
            Layer::Dense(d) => Ok((layer::dense_forward(x, d)?, None)),
        }
    }

    /// Plain forward pass.
    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        let mut current = input.clone();
        for idx in 0..self.layers.len() {
            current = self.forward_one(idx, &current)?.0;
        }
        Ok(current)
    }

    /// Forward pass that caches per-layer inputs for a later backward.
    pub fn forward_trace(&self, input: &Tensor) -> Result<ForwardTrace> {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut argmax = Vec::with_capacity(self.layers.len());
        let mut current = input.clone();
        for idx in 0..self.layers.len() {
            let (next, am) = self.forward_one(idx, &current)?;
            inputs.push(current);
            argmax.push(am);
            current = next;
        }
        Ok(ForwardTrace {
            inputs,
            argmax,
            output: current,
        })
    }

    /// Reverse-mode pass: gradient of a scalar loss with respect to every
    /// trainable parameter, given the loss gradient at the output.
    ///
    /// Input gradients are only propagated as deep as the first trainable
    /// layer; the frozen embedding below it receives nothing. Non-finite
    /// gradients are detected and reported with their layer index.
    pub fn backward(&self, trace: &ForwardTrace, output_grad: &Tensor) -> Result<Gradients> {
        // layer i needs to emit an input gradient iff some trainable
        // layer sits below it
        let mut needs_input_grad = vec![false; self.layers.len()];
        let mut seen_trainable = false;
        for (idx, layer) in self.layers.iter().enumerate() {
            needs_input_grad[idx] = seen_trainable;
            if matches!(layer, Layer::Conv(_) | Layer::Dense(_)) {
                seen_trainable = true;
            }
        }

        let mut param_grads_rev: Vec<Tensor> = Vec::new();
        let mut grad = output_grad.clone();
        for idx in (0..self.layers.len()).rev() {
            let x = &trace.inputs[idx];
            let needs = needs_input_grad[idx];
            let next_grad = match &self.layers[idx] {
                Layer::Embed(_) => None, // frozen, nothing below it
                Layer::Conv(c) => {
                    let (dx, dk, db) = layer::conv2d_backward(x, c, &grad, needs)?;
                    param_grads_rev.push(db);
                    param_grads_rev.push(dk);
                    dx
                }
                Layer::Relu => Some(layer::relu_backward(x, &grad)?),
                Layer::Pool(_) => {
                    let argmax = trace.argmax[idx]
                        .as_ref()
                        .expect("pool layer recorded its argmax");
                    Some(layer::maxpool_backward(x.shape(), argmax, &grad)?)
                }
                Layer::Flatten => Some(grad.clone().reshaped(x.shape())?),
                Layer::Dense(d) => {
                    let (dx, dw, db) = layer::dense_backward(x, d, &grad, needs)?;
                    param_grads_rev.push(db);
                    param_grads_rev.push(dw);
                    dx
                }
            };
            match next_grad {
                Some(g) => grad = g,
                None => break,
            }
        }
        param_grads_rev.reverse();
        for (slot, g) in param_grads_rev.iter().enumerate() {
            if !g.all_finite() {
                // map the parameter slot back to its layer for diagnostics
                let mut remaining = slot;
                let mut at = 0;
                for (idx, layer) in self.layers.iter().enumerate() {
                    let slots = match layer {
                        Layer::Conv(_) | Layer::Dense(_) => 2,
                        _ => 0,
                    };
                    if remaining < slots {
                        at = idx;
                        break;
                    }
                    remaining -= slots;
                }
                return Err(NnError::NonFiniteGradient { layer: at });
            }
        }
        Ok(Gradients {
            tensors: param_grads_rev,
        })
    }

    /// Convenience: forward, loss, and backward in one call. Returns the
    /// loss and the parameter gradients.
    pub fn loss_gradients(
        &self,
        input: &Tensor,
        truth: &[f64],
        kind: LossKind,
    ) -> Result<(f64, Gradients)> {
        let trace = self.forward_trace(input)?;
        let (loss_value, grad) = loss::curve_loss_grad(kind, trace.output.data(), truth)?;
        if !loss_value.is_finite() {
            return Err(NnError::NonFiniteLoss(format!("loss = {loss_value}")));
        }
        let output_grad = Tensor::from_vec(trace.output.shape(), grad)?;
        Ok((loss_value, self.backward(&trace, &output_grad)?))
    }
}
