//! The six layer kinds and their forward/backward passes.
//!
//! Spatial tensors are `[channels, height, width]`. Convolution uses
//! stride 1 with zero same-padding, so only pooling changes spatial
//! size. Pooling uses stride 2 in ceil mode: output size `ceil(H/2)`,
//! window cells outside the input ignored. Tie rules are fixed: the ReLU
//! derivative at exactly 0 is 0, and max-pool gradients route to the
//! first maximum in row-major order.

use rayon::prelude::*;

use crate::kernels::{axpy, corr_acc, dot, rowconv_add, sum};
use crate::tensor::Tensor;
use crate::{NnError, Result};

/// Frozen random embedding: the input matrix is multiplied by a fixed
/// square matrix to densify it before the convolutional stack. Never
/// receives parameter updates.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub matrix: Tensor, // [n, n]
}

/// Same-padding stride-1 convolution with odd kernel dims.
#[derive(Debug, Clone, PartialEq)]
pub struct Conv2d {
    pub kernels: Tensor, // [out_ch, in_ch, kh, kw]
    pub bias: Tensor,    // [out_ch]
}

/// Stride-2 ceil-mode max pooling with a square window of 2 or 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxPool {
    pub window: usize,
}

/// Affine map `W x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Tensor, // [out, in]
    pub bias: Tensor,   // [out]
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Embed(Embedding),
    Conv(Conv2d),
    Relu,
    Pool(MaxPool),
    Flatten,
    Dense(Dense),
}

impl Layer {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Layer::Embed(_) => "embed",
            Layer::Conv(_) => "conv",
            Layer::Relu => "relu",
            Layer::Pool(_) => "pool",
            Layer::Flatten => "flatten",
            Layer::Dense(_) => "dense",
        }
    }

    /// Output shape for a given input shape, validating the layer's
    /// preconditions. This is the shape-inference pre-pass; it runs
    /// before any training touches data.
    pub fn infer_shape(&self, input: &[usize]) -> Result<Vec<usize>> {
        let bad = |msg: String| Err(NnError::InvalidConfig(msg));
        match self {
            Layer::Embed(e) => {
                let &[n, n2] = e.matrix.shape() else {
                    return bad("embedding matrix must be rank 2".into());
                };
                if n != n2 {
                    return bad(format!("embedding matrix must be square, got {n}x{n2}"));
                }
                if input != [n, n] {
                    return bad(format!("embed expects input [{n}, {n}], got {input:?}"));
                }
                Ok(vec![1, n, n])
            }
            Layer::Conv(c) => {
                let &[co, ci, kh, kw] = c.kernels.shape() else {
                    return bad("conv kernels must be rank 4".into());
                };
                if kh % 2 == 0 || kw % 2 == 0 {
                    return bad(format!("conv kernel dims must be odd, got {kh}x{kw}"));
                }
                if c.bias.shape() != [co] {
                    return bad(format!(
                        "conv bias shape {:?} does not match {co} output channels",
                        c.bias.shape()
                    ));
                }
                let &[ci_in, h, w] = input else {
                    return bad(format!("conv expects [ch, h, w] input, got {input:?}"));
                };
                if ci_in != ci {
                    return bad(format!("conv expects {ci} input channels, got {ci_in}"));
                }
                Ok(vec![co, h, w])
            }
            Layer::Relu => Ok(input.to_vec()),
            Layer::Pool(p) => {
                if p.window != 2 && p.window != 3 {
                    return bad(format!("pool window must be 2 or 3, got {}", p.window));
                }
                let &[c, h, w] = input else {
                    return bad(format!("pool expects [ch, h, w] input, got {input:?}"));
                };
                Ok(vec![c, h.div_ceil(2), w.div_ceil(2)])
            }
            Layer::Flatten => Ok(vec![input.iter().product()]),
            Layer::Dense(d) => {
                let &[out, inp] = d.weight.shape() else {
                    return bad("dense weight must be rank 2".into());
                };
                if d.bias.shape() != [out] {
                    return bad(format!(
                        "dense bias shape {:?} does not match {out} outputs",
                        d.bias.shape()
                    ));
                }
                if input != [inp] {
                    return bad(format!("dense expects input [{inp}], got {input:?}"));
                }
                Ok(vec![out])
            }
        }
    }
}

/// Densify via the frozen embedding: `[n, n] -> [1, n, n]`.
pub fn embed_forward(x: &Tensor, e: &Embedding) -> Result<Tensor> {
    let n = e.matrix.shape()[0];
    let product = x.matmul(&e.matrix)?;
    product.reshaped(&[1, n, n])
}

/// Copy `[c, h, w]` planes into zero-padded `[c, h+2ph, w+2pw]` planes.
/// The stencil loops below then never branch on borders.
fn pad_planes(src: &[f64], c: usize, h: usize, w: usize, ph: usize, pw: usize) -> Vec<f64> {
    let (hp, wp) = (h + 2 * ph, w + 2 * pw);
    let mut out = vec![0.0; c * hp * wp];
    for ch in 0..c {
        for y in 0..h {
            let row = &src[ch * h * w + y * w..ch * h * w + y * w + w];
            let offset = ch * hp * wp + (y + ph) * wp + pw;
            out[offset..offset + w].copy_from_slice(row);
        }
    }
    out
}

/// Cross-correlation with zero same-padding, one bias per output channel.
pub fn conv2d_forward(x: &Tensor, conv: &Conv2d) -> Result<Tensor> {
    let &[ci, h, w] = x.shape() else {
        return Err(NnError::ShapeMismatch(format!(
            "conv input must be [ch, h, w], got {:?}",
            x.shape()
        )));
    };
    let &[co, ci_k, kh, kw] = conv.kernels.shape() else {
        return Err(NnError::ShapeMismatch("conv kernels must be rank 4".into()));
    };
    if ci != ci_k {
        return Err(NnError::ShapeMismatch(format!(
            "conv expects {ci_k} input channels, got {ci}"
        )));
    }
    let (ph, pw) = (kh / 2, kw / 2);
    let padded = pad_planes(x.data(), ci, h, w, ph, pw);
    let (hp, wp) = (h + 2 * ph, w + 2 * pw);
    let mut out = Tensor::zeros(&[co, h, w]);
    let kd = conv.kernels.data();
    let bd = conv.bias.data();
    out.data_mut()
        .par_chunks_mut(h * w)
        .enumerate()
        .for_each(|(oc, plane)| {
            plane.fill(bd[oc]);
            for ic in 0..ci {
                let pin_plane = &padded[ic * hp * wp..(ic + 1) * hp * wp];
                for ky in 0..kh {
                    let taps = &kd[((oc * ci + ic) * kh + ky) * kw..][..kw];
                    for oy in 0..h {
                        // padded row oy+ky holds input row oy+ky-ph
                        let pin_row = &pin_plane[(oy + ky) * wp..(oy + ky) * wp + wp];
                        rowconv_add(&mut plane[oy * w..oy * w + w], pin_row, taps);
                    }
                }
            }
        });
    Ok(out)
}

/// Gradients of a convolution: `(d_input, d_kernels, d_bias)`.
/// `d_input` is skipped when `need_input_grad` is false (first trainable
/// layer), saving the most expensive third of the pass.
pub fn conv2d_backward(
    x: &Tensor,
    conv: &Conv2d,
    grad_out: &Tensor,
    need_input_grad: bool,
) -> Result<(Option<Tensor>, Tensor, Tensor)> {
    let &[ci, h, w] = x.shape() else {
        return Err(NnError::ShapeMismatch("conv input must be [ch, h, w]".into()));
    };
    let &[co, _, kh, kw] = conv.kernels.shape() else {
        return Err(NnError::ShapeMismatch("conv kernels must be rank 4".into()));
    };
    if grad_out.shape() != [co, h, w] {
        return Err(NnError::ShapeMismatch(format!(
            "conv grad shape {:?} does not match output [{co}, {h}, {w}]",
            grad_out.shape()
        )));
    }
    let (ph, pw) = (kh / 2, kw / 2);
    let (hp, wp) = (h + 2 * ph, w + 2 * pw);
    let gd = grad_out.data();
    let kd = conv.kernels.data();
    let padded_in = pad_planes(x.data(), ci, h, w, ph, pw);

    let mut d_bias = Tensor::zeros(&[co]);
    d_bias
        .data_mut()
        .par_iter_mut()
        .enumerate()
        .for_each(|(oc, out)| {
            *out = sum(&gd[oc * h * w..(oc + 1) * h * w]);
        });

    let mut d_kernels = Tensor::zeros(&[co, ci, kh, kw]);
    d_kernels
        .data_mut()
        .par_chunks_mut(ci * kh * kw)
        .enumerate()
        .for_each(|(oc, dk)| {
            let g_plane = &gd[oc * h * w..(oc + 1) * h * w];
            for ic in 0..ci {
                let pin_plane = &padded_in[ic * hp * wp..(ic + 1) * hp * wp];
                for ky in 0..kh {
                    let taps = &mut dk[(ic * kh + ky) * kw..(ic * kh + ky) * kw + kw];
                    for oy in 0..h {
                        let g_row = &g_plane[oy * w..oy * w + w];
                        let pin_row = &pin_plane[(oy + ky) * wp..(oy + ky) * wp + wp];
                        corr_acc(g_row, pin_row, taps);
                    }
                }
            }
        });

    let d_input = if need_input_grad {
        // d_input is the correlation of the zero-padded upstream gradient
        // with the kernel flipped in both spatial dims
        let padded_g = pad_planes(gd, co, h, w, ph, pw);
        let mut d_input = Tensor::zeros(&[ci, h, w]);
        d_input
            .data_mut()
            .par_chunks_mut(h * w)
            .enumerate()
            .for_each(|(ic, din_plane)| {
                let mut flipped = vec![0.0; kw];
                for oc in 0..co {
                    let pg_plane = &padded_g[oc * hp * wp..(oc + 1) * hp * wp];
                    for kyf in 0..kh {
                        let src = &kd[((oc * ci + ic) * kh + (kh - 1 - kyf)) * kw..][..kw];
                        for (j, f) in flipped.iter_mut().enumerate() {
                            *f = src[kw - 1 - j];
                        }
                        for iy in 0..h {
                            let pg_row = &pg_plane[(iy + kyf) * wp..(iy + kyf) * wp + wp];
                            rowconv_add(&mut din_plane[iy * w..iy * w + w], pg_row, &flipped);
                        }
                    }
                }
            });
        Some(d_input)
    } else {
        None
    };
    Ok((d_input, d_kernels, d_bias))
}

/// Elementwise `max(0, x)`. Non-finite inputs flow through so that the
/// loss-level divergence detectors see them.
pub fn relu_forward(x: &Tensor) -> Tensor {
    let data = x.data().iter().map(|&v| v.max(0.0)).collect();
    Tensor::from_vec_unchecked(x.shape(), data)
}

/// ReLU gradient: pass-through where `x > 0`, zero elsewhere (including
/// at exactly 0).
pub fn relu_backward(x: &Tensor, grad_out: &Tensor) -> Result<Tensor> {
    if x.shape() != grad_out.shape() {
        return Err(NnError::ShapeMismatch("relu grad shape mismatch".into()));
    }
    let data = x
        .data()
        .iter()
        .zip(grad_out.data())
        .map(|(&v, &g)| if v > 0.0 { g } else { 0.0 })
        .collect();
    Ok(Tensor::from_vec_unchecked(x.shape(), data))
}

/// Ceil-mode stride-2 max pooling. Returns the pooled tensor plus the
/// flat per-plane argmax of every window (first maximum in row-major
/// order), which the backward pass routes gradients through.
pub fn maxpool_forward(x: &Tensor, pool: MaxPool) -> Result<(Tensor, Vec<u32>)> {
    let &[c, h, w] = x.shape() else {
        return Err(NnError::ShapeMismatch(format!(
            "pool input must be [ch, h, w], got {:?}",
            x.shape()
        )));
    };
    let (ho, wo) = (h.div_ceil(2), w.div_ceil(2));
    let k = pool.window;
    let mut out = Tensor::zeros(&[c, ho, wo]);
    let mut argmax = vec![0u32; c * ho * wo];
    let xd = x.data();
    out.data_mut()
        .par_chunks_mut(ho * wo)
        .zip(argmax.par_chunks_mut(ho * wo))
        .enumerate()
        .for_each(|(ch, (plane, args))| {
            let x_plane = &xd[ch * h * w..(ch + 1) * h * w];
            for oy in 0..ho {
                for ox in 0..wo {
                    let mut best = f64::NEG_INFINITY;
                    let mut best_at = 0u32;
                    for dy in 0..k.min(h - oy * 2) {
                        let iy = oy * 2 + dy;
                        for dx in 0..k.min(w - ox * 2) {
                            let ix = ox * 2 + dx;
                            let v = x_plane[iy * w + ix];
                            if v > best {
                                best = v;
                                best_at = (iy * w + ix) as u32;
                            }
                        }
                    }
                    plane[oy * wo + ox] = best;
                    args[oy * wo + ox] = best_at;
                }
            }
        });
    Ok((out, argmax))
}

/// Max-pool gradient: each output cell's gradient goes to its recorded
/// argmax. Overlapping windows accumulate.
pub fn maxpool_backward(
    input_shape: &[usize],
    argmax: &[u32],
    grad_out: &Tensor,
) -> Result<Tensor> {
    let &[c, h, w] = input_shape else {
        return Err(NnError::ShapeMismatch("pool input must be [ch, h, w]".into()));
    };
    let plane_out = grad_out.len() / c;
    let mut d_input = Tensor::zeros(&[c, h, w]);
    let gd = grad_out.data();
    d_input
        .data_mut()
        .par_chunks_mut(h * w)
        .enumerate()
        .for_each(|(ch, din_plane)| {
            let g_plane = &gd[ch * plane_out..(ch + 1) * plane_out];
            let a_plane = &argmax[ch * plane_out..(ch + 1) * plane_out];
            for (&g, &at) in g_plane.iter().zip(a_plane) {
                din_plane[at as usize] += g;
            }
        });
    Ok(d_input)
}

/// `W x + b`.
pub fn dense_forward(x: &Tensor, dense: &Dense) -> Result<Tensor> {
    let &[out, inp] = dense.weight.shape() else {
        return Err(NnError::ShapeMismatch("dense weight must be rank 2".into()));
    };
    if x.shape() != [inp] {
        return Err(NnError::ShapeMismatch(format!(
            "dense expects input [{inp}], got {:?}",
            x.shape()
        )));
    }
    let xd = x.data();
    let wd = dense.weight.data();
    let bd = dense.bias.data();
    let mut y = Tensor::zeros(&[out]);
    y.data_mut()
        .par_chunks_mut(32)
        .enumerate()
        .for_each(|(chunk, ys)| {
            for (j, yv) in ys.iter_mut().enumerate() {
                let o = chunk * 32 + j;
                *yv = bd[o] + dot(&wd[o * inp..(o + 1) * inp], xd);
            }
        });
    Ok(y)
}

/// Gradients of a dense layer: `(d_input, d_weight, d_bias)`.
pub fn dense_backward(
    x: &Tensor,
    dense: &Dense,
    grad_out: &Tensor,
    need_input_grad: bool,
) -> Result<(Option<Tensor>, Tensor, Tensor)> {
    let &[out, inp] = dense.weight.shape() else {
        return Err(NnError::ShapeMismatch("dense weight must be rank 2".into()));
    };
    if grad_out.shape() != [out] {
        return Err(NnError::ShapeMismatch(format!(
            "dense grad shape {:?} does not match [{out}]",
            grad_out.shape()
        )));
    }
    let xd = x.data();
    let gd = grad_out.data();
    let wd = dense.weight.data();

    let mut d_weight = Tensor::zeros(&[out, inp]);
    d_weight
        .data_mut()
        .par_chunks_mut(inp)
        .enumerate()
        .for_each(|(o, row)| {
            axpy(gd[o], xd, row);
        });
    let d_bias = Tensor::from_vec_unchecked(&[out], gd.to_vec());

    let d_input = if need_input_grad {
        let mut dx = Tensor::zeros(&[inp]);
        let dxd = dx.data_mut();
        for o in 0..out {
            if gd[o] != 0.0 {
                axpy(gd[o], &wd[o * inp..(o + 1) * inp], dxd);
            }
        }
        Some(dx)
    } else {
        None
    };
    Ok((d_input, d_weight, d_bias))
}
