//! Forward and backward kernels for the layer set.
//!
//! Inputs are `[C, H, W]` images, convolution kernels are
//! `[C_out, C_in, k, k]` (cross-correlation), and transpose kernels are
//! `[C_in, C_out, k, k]` so that `conv2d_transpose` with a given kernel
//! tensor is exactly the Jacobian-transpose action of `conv2d` with the
//! same tensor. All kernels are written against flat slices; the public
//! functions validate shapes and return fresh [`Tensor`]s.

use crate::{Tensor, TensorError};

/// Fixed point of `selu(x) = SELU_LAMBDA * (x if x > 0 else SELU_ALPHA*(e^x - 1))`.
pub const SELU_ALPHA: f64 = 1.673_263_242_354_377_2;
pub const SELU_LAMBDA: f64 = 1.050_700_987_355_480_5;

/// Output side length of a convolution: `floor((side + 2p - k)/s) + 1`.
pub fn conv2d_output_side(side: usize, kernel: usize, stride: usize, padding: usize) -> usize {
    (side + 2 * padding - kernel) / stride + 1
}

/// Output side length of a transposed convolution: `(side - 1)*s + k - 2p`.
pub fn conv2d_transpose_output_side(
    side: usize,
    kernel: usize,
    stride: usize,
    padding: usize,
) -> usize {
    (side - 1) * stride + kernel - 2 * padding
}

/// Validated geometry shared by conv2d and its transpose.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ConvGeom {
    pub c_in: usize,
    pub h: usize,
    pub w: usize,
    pub c_out: usize,
    pub k: usize,
    pub stride: usize,
    pub padding: usize,
    pub h_out: usize,
    pub w_out: usize,
}

impl ConvGeom {
    pub fn conv(input: &Tensor, kernels: &Tensor, bias: &Tensor, stride: usize, padding: usize)
        -> Result<Self, TensorError> {
        let (c_in, h, w) = image_dims("conv2d", input)?;
        let (kc_out, kc_in, k) = kernel_dims("conv2d", kernels)?;
        if kc_in != c_in {
            return Err(TensorError::dim(
                "conv2d",
                format!("kernel expects {kc_in} input channels, image has {c_in}"),
            ));
        }
        if stride == 0 {
            return Err(TensorError::dim("conv2d", "stride must be >= 1"));
        }
        if k > h + 2 * padding || k > w + 2 * padding {
            return Err(TensorError::dim(
                "conv2d",
                format!("kernel {k} exceeds padded image {}x{}", h + 2 * padding, w + 2 * padding),
            ));
        }
        if bias.shape() != [kc_out] {
            return Err(TensorError::dim(
                "conv2d",
                format!("bias shape {:?} does not match {kc_out} output channels", bias.shape()),
            ));
        }
        Ok(Self {
            c_in,
            h,
            w,
            c_out: kc_out,
            k,
            stride,
            padding,
            h_out: conv2d_output_side(h, k, stride, padding),
            w_out: conv2d_output_side(w, k, stride, padding),
        })
    }

    /// Transpose geometry: input channels must match the kernel's first
    /// axis; output spatial size is the conv2d-inverse size.
    pub fn transpose(input: &Tensor, kernels: &Tensor, bias: &Tensor, stride: usize, padding: usize)
        -> Result<Self, TensorError> {
        let (c_in, h, w) = image_dims("conv2d_transpose", input)?;
        let (kc_in, kc_out, k) = kernel_dims("conv2d_transpose", kernels)?;
        if kc_in != c_in {
            return Err(TensorError::dim(
                "conv2d_transpose",
                format!("kernel expects {kc_in} input channels, image has {c_in}"),
            ));
        }
        if stride == 0 {
            return Err(TensorError::dim("conv2d_transpose", "stride must be >= 1"));
        }
        if k + (h - 1) * stride <= 2 * padding || k + (w - 1) * stride <= 2 * padding {
            return Err(TensorError::dim(
                "conv2d_transpose",
                "padding consumes the whole output".to_string(),
            ));
        }
        if bias.shape() != [kc_out] {
            return Err(TensorError::dim(
                "conv2d_transpose",
                format!("bias shape {:?} does not match {kc_out} output channels", bias.shape()),
            ));
        }
        Ok(Self {
            c_in,
            h,
            w,
            c_out: kc_out,
            k,
            stride,
            padding,
            h_out: conv2d_transpose_output_side(h, k, stride, padding),
            w_out: conv2d_transpose_output_side(w, k, stride, padding),
        })
    }
}

fn image_dims(op: &'static str, t: &Tensor) -> Result<(usize, usize, usize), TensorError> {
    match *t.shape() {
        [c, h, w] => Ok((c, h, w)),
        _ => Err(TensorError::dim(op, format!("expected [C, H, W] image, got {:?}", t.shape()))),
    }
}

fn kernel_dims(op: &'static str, t: &Tensor) -> Result<(usize, usize, usize), TensorError> {
    match *t.shape() {
        [a, b, k1, k2] if k1 == k2 => Ok((a, b, k1)),
        _ => Err(TensorError::dim(
            op,
            format!("expected [A, B, k, k] kernels, got {:?}", t.shape()),
        )),
    }
}

/// First output index o with `o*stride + kx >= padding`.
#[inline]
fn out_lo(padding: usize, kx: usize, stride: usize) -> usize {
    if kx >= padding {
        0
    } else {
        (padding - kx).div_ceil(stride)
    }
}

/// One past the last output index o with `o*stride + kx - padding <= limit-1`.
#[inline]
fn out_hi(limit: usize, out_limit: usize, padding: usize, kx: usize, stride: usize) -> usize {
    if limit + padding <= kx {
        return 0;
    }
    out_limit.min((limit - 1 + padding - kx) / stride + 1)
}

pub(crate) fn conv2d_raw(g: &ConvGeom, input: &[f64], kernels: &[f64], bias: &[f64]) -> Vec<f64> {
    let ConvGeom { c_in, h, w, c_out, k, stride, padding, h_out, w_out } = *g;
    let mut out = vec![0.0; c_out * h_out * w_out];
    for co in 0..c_out {
        out[co * h_out * w_out..(co + 1) * h_out * w_out].fill(bias[co]);
    }
    for co in 0..c_out {
        for ci in 0..c_in {
            for kh in 0..k {
                let oh_range = out_lo(padding, kh, stride)..out_hi(h, h_out, padding, kh, stride);
                for kw in 0..k {
                    let wgt = kernels[((co * c_in + ci) * k + kh) * k + kw];
                    let ow_lo = out_lo(padding, kw, stride);
                    let ow_hi = out_hi(w, w_out, padding, kw, stride);
                    for oh in oh_range.clone() {
                        let ih = oh * stride + kh - padding;
                        let in_row = &input[(ci * h + ih) * w..(ci * h + ih + 1) * w];
                        let out_row =
                            &mut out[(co * h_out + oh) * w_out..(co * h_out + oh + 1) * w_out];
                        let mut iw = ow_lo * stride + kw - padding;
                        for ow in ow_lo..ow_hi {
                            out_row[ow] += wgt * in_row[iw];
                            iw += stride;
                        }
                    }
                }
            }
        }
    }
    out
}

pub(crate) fn conv2d_backward_raw(
    g: &ConvGeom,
    input: &[f64],
    kernels: &[f64],
    grad_out: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let ConvGeom { c_in, h, w, c_out, k, stride, padding, h_out, w_out } = *g;
    let mut grad_in = vec![0.0; c_in * h * w];
    let mut grad_k = vec![0.0; c_out * c_in * k * k];
    let mut grad_b = vec![0.0; c_out];

    for co in 0..c_out {
        grad_b[co] = grad_out[co * h_out * w_out..(co + 1) * h_out * w_out].iter().sum();
    }

    for co in 0..c_out {
        for ci in 0..c_in {
            for kh in 0..k {
                let oh_range = out_lo(padding, kh, stride)..out_hi(h, h_out, padding, kh, stride);
                for kw in 0..k {
                    let wgt = kernels[((co * c_in + ci) * k + kh) * k + kw];
                    let ow_lo = out_lo(padding, kw, stride);
                    let ow_hi = out_hi(w, w_out, padding, kw, stride);
                    let mut k_acc = 0.0;
                    for oh in oh_range.clone() {
                        let ih = oh * stride + kh - padding;
                        let in_row = &input[(ci * h + ih) * w..(ci * h + ih + 1) * w];
                        let gin_row =
                            &mut grad_in[(ci * h + ih) * w..(ci * h + ih + 1) * w];
                        let g_row =
                            &grad_out[(co * h_out + oh) * w_out..(co * h_out + oh + 1) * w_out];
                        let mut iw = ow_lo * stride + kw - padding;
                        for ow in ow_lo..ow_hi {
                            let go = g_row[ow];
                            k_acc += go * in_row[iw];
                            gin_row[iw] += wgt * go;
                            iw += stride;
                        }
                    }
                    grad_k[((co * c_in + ci) * k + kh) * k + kw] += k_acc;
                }
            }
        }
    }
    (grad_in, grad_k, grad_b)
}

pub(crate) fn conv2d_transpose_raw(
    g: &ConvGeom,
    input: &[f64],
    kernels: &[f64],
    bias: &[f64],
) -> Vec<f64> {
    let ConvGeom { c_in, h, w, c_out, k, stride, padding, h_out, w_out } = *g;
    let mut out = vec![0.0; c_out * h_out * w_out];
    for b in 0..c_out {
        out[b * h_out * w_out..(b + 1) * h_out * w_out].fill(bias[b]);
    }
    for a in 0..c_in {
        for b in 0..c_out {
            for kh in 0..k {
                // rows oh whose scattered index oh*s + kh - p lands inside the output
                let oh_range = out_lo(padding, kh, stride)..out_hi(h_out, h, padding, kh, stride);
                for kw in 0..k {
                    let wgt = kernels[((a * c_out + b) * k + kh) * k + kw];
                    let ow_lo = out_lo(padding, kw, stride);
                    let ow_hi = out_hi(w_out, w, padding, kw, stride);
                    for oh in oh_range.clone() {
                        let i = oh * stride + kh - padding;
                        let in_row = &input[(a * h + oh) * w..(a * h + oh + 1) * w];
                        let out_row =
                            &mut out[(b * h_out + i) * w_out..(b * h_out + i + 1) * w_out];
                        let mut j = ow_lo * stride + kw - padding;
                        for ow in ow_lo..ow_hi {
                            out_row[j] += wgt * in_row[ow];
                            j += stride;
                        }
                    }
                }
            }
        }
    }
    out
}

pub(crate) fn conv2d_transpose_backward_raw(
    g: &ConvGeom,
    input: &[f64],
    kernels: &[f64],
    grad_out: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let ConvGeom { c_in, h, w, c_out, k, stride, padding, h_out, w_out } = *g;
    let mut grad_in = vec![0.0; c_in * h * w];
    let mut grad_k = vec![0.0; c_in * c_out * k * k];
    let mut grad_b = vec![0.0; c_out];

    for b in 0..c_out {
        grad_b[b] = grad_out[b * h_out * w_out..(b + 1) * h_out * w_out].iter().sum();
    }

    for a in 0..c_in {
        for b in 0..c_out {
            for kh in 0..k {
                let oh_range = out_lo(padding, kh, stride)..out_hi(h_out, h, padding, kh, stride);
                for kw in 0..k {
                    let wgt = kernels[((a * c_out + b) * k + kh) * k + kw];
                    let ow_lo = out_lo(padding, kw, stride);
                    let ow_hi = out_hi(w_out, w, padding, kw, stride);
                    let mut k_acc = 0.0;
                    for oh in oh_range.clone() {
                        let i = oh * stride + kh - padding;
                        let in_row = &input[(a * h + oh) * w..(a * h + oh + 1) * w];
                        let gin_row = &mut grad_in[(a * h + oh) * w..(a * h + oh + 1) * w];
                        let g_row =
                            &grad_out[(b * h_out + i) * w_out..(b * h_out + i + 1) * w_out];
                        let mut j = ow_lo * stride + kw - padding;
                        for ow in ow_lo..ow_hi {
                            let go = g_row[j];
                            k_acc += go * in_row[ow];
                            gin_row[ow] += wgt * go;
                            j += stride;
                        }
                    }
                    grad_k[((a * c_out + b) * k + kh) * k + kw] += k_acc;
                }
            }
        }
    }
    (grad_in, grad_k, grad_b)
}

pub(crate) struct PoolResult {
    pub values: Vec<f64>,
    /// Flat source index of each output element's maximum (first
    /// occurrence in row-major order on ties).
    pub argmax: Vec<usize>,
    pub c: usize,
    pub h_out: usize,
    pub w_out: usize,
}

pub(crate) fn max_pool2d_raw(
    input: &Tensor,
    window: usize,
) -> Result<PoolResult, TensorError> {
    let (c, h, w) = image_dims("max_pool2d", input)?;
    if window == 0 || h % window != 0 || w % window != 0 {
        return Err(TensorError::dim(
            "max_pool2d",
            format!("window {window} does not divide spatial size {h}x{w}"),
        ));
    }
    let (h_out, w_out) = (h / window, w / window);
    let data = input.data();
    let mut values = vec![0.0; c * h_out * w_out];
    let mut argmax = vec![0usize; c * h_out * w_out];
    for ci in 0..c {
        for oh in 0..h_out {
            for ow in 0..w_out {
                let mut best = f64::NEG_INFINITY;
                let mut best_idx = 0usize;
                for dh in 0..window {
                    let ih = oh * window + dh;
                    let row = (ci * h + ih) * w;
                    for dw in 0..window {
                        let idx = row + ow * window + dw;
                        let v = data[idx];
                        if v > best {
                            best = v;
                            best_idx = idx;
                        }
                    }
                }
                let o = (ci * h_out + oh) * w_out + ow;
                values[o] = best;
                argmax[o] = best_idx;
            }
        }
    }
    Ok(PoolResult { values, argmax, c, h_out, w_out })
}

pub(crate) fn selu_scalar(x: f64) -> f64 {
    if x > 0.0 {
        SELU_LAMBDA * x
    } else {
        SELU_LAMBDA * SELU_ALPHA * (x.exp() - 1.0)
    }
}

pub(crate) fn selu_derivative(x: f64) -> f64 {
    if x > 0.0 {
        SELU_LAMBDA
    } else {
        SELU_LAMBDA * SELU_ALPHA * x.exp()
    }
}

pub(crate) fn leaky_relu_scalar(x: f64, slope: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        slope * x
    }
}

pub(crate) fn leaky_relu_derivative(x: f64, slope: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        slope
    }
}

pub(crate) fn dense_check(
    input: &Tensor,
    weights: &Tensor,
    bias: &Tensor,
) -> Result<(usize, usize), TensorError> {
    let n = match *input.shape() {
        [n] => n,
        _ => {
            return Err(TensorError::dim(
                "dense",
                format!("expected a vector input, got {:?}", input.shape()),
            ))
        }
    };
    let (m, wn) = match *weights.shape() {
        [m, wn] => (m, wn),
        _ => {
            return Err(TensorError::dim(
                "dense",
                format!("expected [m, n] weights, got {:?}", weights.shape()),
            ))
        }
    };
    if wn != n {
        return Err(TensorError::dim(
            "dense",
            format!("weights expect input length {wn}, got {n}"),
        ));
    }
    if bias.shape() != [m] {
        return Err(TensorError::dim(
            "dense",
            format!("bias shape {:?} does not match {m} outputs", bias.shape()),
        ));
    }
    Ok((m, n))
}

pub(crate) fn dense_raw(m: usize, n: usize, input: &[f64], weights: &[f64], bias: &[f64]) -> Vec<f64> {
    let mut out = bias.to_vec();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &weights[i * n..(i + 1) * n];
        *o += row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>();
    }
    debug_assert_eq!(out.len(), m);
    out
}

// --- public eager ops ---------------------------------------------------

/// 2-D cross-correlation over a `[C_in, H, W]` image with
/// `[C_out, C_in, k, k]` kernels and zero padding.
pub fn conv2d(
    input: &Tensor,
    kernels: &Tensor,
    bias: &Tensor,
    stride: usize,
    padding: usize,
) -> Result<Tensor, TensorError> {
    let g = ConvGeom::conv(input, kernels, bias, stride, padding)?;
    let out = conv2d_raw(&g, input.data(), kernels.data(), bias.data());
    Ok(Tensor::from_parts(vec![g.c_out, g.h_out, g.w_out], out))
}

/// Transposed convolution: the Jacobian-transpose action of [`conv2d`]
/// with the same kernel tensor, plus a per-channel bias. Kernels are
/// `[C_in, C_out, k, k]` relative to this op's own input/output.
pub fn conv2d_transpose(
    input: &Tensor,
    kernels: &Tensor,
    bias: &Tensor,
    stride: usize,
    padding: usize,
) -> Result<Tensor, TensorError> {
    let g = ConvGeom::transpose(input, kernels, bias, stride, padding)?;
    let out = conv2d_transpose_raw(&g, input.data(), kernels.data(), bias.data());
    Ok(Tensor::from_parts(vec![g.c_out, g.h_out, g.w_out], out))
}

/// Per-window maximum over non-overlapping `window x window` blocks.
pub fn max_pool2d(input: &Tensor, window: usize) -> Result<Tensor, TensorError> {
    let r = max_pool2d_raw(input, window)?;
    Ok(Tensor::from_parts(vec![r.c, r.h_out, r.w_out], r.values))
}

/// Affine map `weights * input + bias` for a vector input.
pub fn dense(input: &Tensor, weights: &Tensor, bias: &Tensor) -> Result<Tensor, TensorError> {
    let (m, n) = dense_check(input, weights, bias)?;
    Ok(Tensor::from_parts(vec![m], dense_raw(m, n, input.data(), weights.data(), bias.data())))
}

/// Scaled exponential linear unit.
pub fn selu(input: &Tensor) -> Tensor {
    let data = input.data().iter().map(|&x| selu_scalar(x)).collect();
    Tensor::from_parts(input.shape().to_vec(), data)
}

/// Leaky rectified linear unit: identity for `x >= 0`, `slope * x` below.
pub fn leaky_relu(input: &Tensor, slope: f64) -> Tensor {
    let data = input.data().iter().map(|&x| leaky_relu_scalar(x, slope)).collect();
    Tensor::from_parts(input.shape().to_vec(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn t(shape: Vec<usize>, data: Vec<f64>) -> Tensor {
        Tensor::from_vec(shape, data).unwrap()
    }

    #[test]
    fn conv2d_zero_input_gives_zero_output() {
        let input = Tensor::zeros(vec![1, 3, 3]);
        let kernels = t(vec![2, 1, 2, 2], vec![1.0, -2.0, 3.0, 4.0, 0.5, 0.5, 0.5, 0.5]);
        let bias = Tensor::zeros(vec![2]);
        let out = conv2d(&input, &kernels, &bias, 1, 0).unwrap();
        assert_eq!(out.shape(), &[2, 2, 2]);
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn conv2d_identity_kernel_is_exact_identity() {
        let input = t(vec![1, 3, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let kernels = t(vec![1, 1, 1, 1], vec![1.0]);
        let bias = Tensor::zeros(vec![1]);
        let out = conv2d(&input, &kernels, &bias, 1, 0).unwrap();
        assert_eq!(out.data(), input.data());
    }

    #[test]
    fn conv2d_window_sums() {
        // hand summation of each 2x2 window of [[1,2,3],[4,5,6],[7,8,9]]
        let input = t(vec![1, 3, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let kernels = t(vec![1, 1, 2, 2], vec![1.0; 4]);
        let bias = Tensor::zeros(vec![1]);
        let out = conv2d(&input, &kernels, &bias, 1, 0).unwrap();
        assert_eq!(out.shape(), &[1, 2, 2]);
        assert_eq!(out.data(), &[12.0, 16.0, 24.0, 28.0]);
    }

    #[test]
    fn conv2d_rejects_channel_mismatch() {
        let input = Tensor::zeros(vec![2, 3, 3]);
        let kernels = Tensor::zeros(vec![1, 3, 2, 2]);
        let bias = Tensor::zeros(vec![1]);
        assert!(conv2d(&input, &kernels, &bias, 1, 0).is_err());
    }

    #[test]
    fn conv2d_padding_and_stride_shapes() {
        let input = Tensor::zeros(vec![1, 8, 8]);
        let kernels = Tensor::zeros(vec![3, 1, 3, 3]);
        let bias = Tensor::zeros(vec![3]);
        let same = conv2d(&input, &kernels, &bias, 1, 1).unwrap();
        assert_eq!(same.shape(), &[3, 8, 8]);
        let strided = conv2d(&input, &kernels, &bias, 2, 1).unwrap();
        assert_eq!(strided.shape(), &[3, 4, 4]);
    }

    #[test]
    fn conv2d_transpose_trivial_cases() {
        let zero = Tensor::zeros(vec![1, 2, 2]);
        let kernels = t(vec![1, 1, 2, 2], vec![1.0, 2.0, 3.0, 4.0]);
        let bias = Tensor::zeros(vec![1]);
        let out = conv2d_transpose(&zero, &kernels, &bias, 1, 0).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));

        // 1x1 input v, 1x1 kernel w, stride 1 -> single output v*w
        let v = t(vec![1, 1, 1], vec![2.5]);
        let k1 = t(vec![1, 1, 1, 1], vec![-3.0]);
        let out = conv2d_transpose(&v, &k1, &bias, 1, 0).unwrap();
        assert_eq!(out.shape(), &[1, 1, 1]);
        assert_eq!(out.data(), &[-7.5]);
    }

    #[test]
    fn conv2d_transpose_doubles_after_stride2_conv() {
        let input = t(vec![1, 4, 4], (0..16).map(|i| i as f64 * 0.3 - 1.0).collect());
        let kernels = t(vec![2, 1, 4, 4], (0..32).map(|i| (i as f64).sin()).collect());
        let bias = Tensor::zeros(vec![2]);
        let down = conv2d(&input, &kernels, &bias, 2, 1).unwrap();
        assert_eq!(down.shape(), &[2, 2, 2]);
        let bias_up = Tensor::zeros(vec![1]);
        let up = conv2d_transpose(&down, &kernels, &bias_up, 2, 1).unwrap();
        assert_eq!(up.shape(), &[1, 4, 4]);
    }

    /// Materialize conv2d as an explicit matrix and check that
    /// conv2d_transpose applies the transposed matrix.
    #[test]
    fn conv2d_transpose_is_jacobian_transpose() {
        let (c_in, side, k, stride, padding) = (1usize, 4usize, 3usize, 1usize, 0usize);
        let c_out = 2usize;
        let kernels = t(
            vec![c_out, c_in, k, k],
            (0..c_out * c_in * k * k).map(|i| ((i * 7 % 11) as f64) - 5.0).collect(),
        );
        let zero_bias_out = Tensor::zeros(vec![c_out]);
        let n_in = c_in * side * side;
        let out_side = conv2d_output_side(side, k, stride, padding);
        let n_out = c_out * out_side * out_side;

        // column j of the conv matrix = conv of the j-th basis vector
        let mut matrix = vec![0.0; n_out * n_in];
        for j in 0..n_in {
            let mut e = vec![0.0; n_in];
            e[j] = 1.0;
            let col = conv2d(
                &t(vec![c_in, side, side], e),
                &kernels,
                &zero_bias_out,
                stride,
                padding,
            )
            .unwrap();
            for i in 0..n_out {
                matrix[i * n_in + j] = col.data()[i];
            }
        }

        let y: Vec<f64> = (0..n_out).map(|i| (i as f64 * 0.37).cos()).collect();
        let zero_bias_in = Tensor::zeros(vec![c_in]);
        let back = conv2d_transpose(
            &t(vec![c_out, out_side, out_side], y.clone()),
            &kernels,
            &zero_bias_in,
            stride,
            padding,
        )
        .unwrap();

        for j in 0..n_in {
            let mut expect = 0.0;
            for i in 0..n_out {
                expect += matrix[i * n_in + j] * y[i];
            }
            assert_abs_diff_eq!(back.data()[j], expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn max_pool_constant_and_window() {
        let c = Tensor::filled(vec![1, 4, 4], 3.25);
        let out = max_pool2d(&c, 2).unwrap();
        assert_eq!(out.shape(), &[1, 2, 2]);
        assert!(out.data().iter().all(|&v| v == 3.25));

        let q = t(vec![1, 2, 2], vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(max_pool2d(&q, 2).unwrap().data(), &[4.0]);

        assert!(max_pool2d(&t(vec![1, 3, 3], vec![0.0; 9]), 2).is_err());
    }

    #[test]
    fn dense_cases() {
        let x = t(vec![2], vec![1.0, 1.0]);
        let w = t(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]);
        let b = Tensor::zeros(vec![2]);
        assert_eq!(dense(&x, &w, &b).unwrap().data(), &[3.0, 7.0]);

        // identity weights, zero bias -> input
        let eye = t(vec![2, 2], vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(dense(&x, &eye, &b).unwrap().data(), x.data());

        // zero weights, bias b -> b
        let zw = Tensor::zeros(vec![2, 2]);
        let bb = t(vec![2], vec![-0.5, 9.0]);
        assert_eq!(dense(&x, &zw, &bb).unwrap().data(), bb.data());

        let w3 = Tensor::zeros(vec![2, 3]);
        assert!(dense(&x, &w3, &b).is_err());
    }

    #[test]
    fn activation_values() {
        assert_eq!(selu(&Tensor::scalar(0.0)).data(), &[0.0]);
        // selu(-1) = lambda * alpha * (e^-1 - 1)
        let expect = SELU_LAMBDA * SELU_ALPHA * ((-1.0f64).exp() - 1.0);
        assert_abs_diff_eq!(selu(&Tensor::scalar(-1.0)).data()[0], expect, epsilon = 1e-12);
        assert_abs_diff_eq!(selu(&Tensor::scalar(-1.0)).data()[0], -1.1113, epsilon = 1e-4);

        assert_eq!(leaky_relu(&Tensor::scalar(-1.0), 0.3).data(), &[-0.3]);
        assert_eq!(leaky_relu(&Tensor::scalar(2.0), 0.3).data(), &[2.0]);
    }

    #[test]
    fn forward_passes_stay_finite() {
        let input = t(vec![2, 4, 4], (0..32).map(|i| (i as f64 - 16.0) * 100.0).collect());
        let kernels = t(vec![3, 2, 3, 3], (0..54).map(|i| (i as f64).sin() * 10.0).collect());
        let bias = t(vec![3], vec![1e6, -1e6, 0.0]);
        let out = conv2d(&input, &kernels, &bias, 1, 1).unwrap();
        assert!(out.all_finite());
        assert!(selu(&out).all_finite());
        assert!(leaky_relu(&out, 0.3).all_finite());
        assert!(max_pool2d(&out, 2).unwrap().all_finite());
    }
}
