use crate::layers::{
    self, dense_check, dense_raw, leaky_relu_derivative, leaky_relu_scalar, max_pool2d_raw,
    selu_derivative, selu_scalar, ConvGeom,
};
use crate::{Tensor, TensorError};

/// Handle to a node recorded on a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

#[derive(Debug)]
enum Op {
    Leaf { param: bool },
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Scale(NodeId, f64),
    AddConst(NodeId),
    Exp(NodeId),
    Selu(NodeId),
    LeakyRelu(NodeId, f64),
    Sum(NodeId),
    Reshape(NodeId),
    Dense { input: NodeId, weights: NodeId, bias: NodeId },
    Conv2d { input: NodeId, kernels: NodeId, bias: NodeId, geom: ConvGeom },
    ConvT2d { input: NodeId, kernels: NodeId, bias: NodeId, geom: ConvGeom },
    MaxPool2d { input: NodeId, argmax: Vec<usize> },
}

struct Node {
    op: Op,
    value: Tensor,
}

/// Define-by-run computation tape.
///
/// Ops evaluate eagerly as they are recorded; node order is therefore a
/// valid topological order (every node's parents precede it), which is
/// what [`Graph::backward`] walks in reverse. A graph is single-owner:
/// build it, run backward, drop it.
pub struct Graph {
    nodes: Vec<Node>,
}

impl Default for Graph {
    fn default() -> Self {
        Self::new()
    }
}

impl Graph {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Forward value of a node.
    pub fn value(&self, id: NodeId) -> &Tensor {
        &self.nodes[id.0].value
    }

    fn push(&mut self, op: Op, value: Tensor) -> NodeId {
        self.nodes.push(Node { op, value });
        NodeId(self.nodes.len() - 1)
    }

    /// Record a constant leaf (inputs, noise draws).
    pub fn leaf(&mut self, value: Tensor) -> NodeId {
        self.push(Op::Leaf { param: false }, value)
    }

    /// Record a trainable parameter leaf.
    pub fn param(&mut self, value: Tensor) -> NodeId {
        self.push(Op::Leaf { param: true }, value)
    }

    pub fn is_param(&self, id: NodeId) -> bool {
        matches!(self.nodes[id.0].op, Op::Leaf { param: true })
    }

    fn binary_check(&self, op: &'static str, a: NodeId, b: NodeId) -> Result<(), TensorError> {
        let (sa, sb) = (self.value(a).shape(), self.value(b).shape());
        if sa != sb {
            return Err(TensorError::dim(op, format!("shapes {sa:?} and {sb:?} differ")));
        }
        Ok(())
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, TensorError> {
        self.binary_check("add", a, b)?;
        let data =
            self.value(a).data().iter().zip(self.value(b).data()).map(|(x, y)| x + y).collect();
        let value = Tensor::from_parts(self.value(a).shape().to_vec(), data);
        Ok(self.push(Op::Add(a, b), value))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, TensorError> {
        self.binary_check("sub", a, b)?;
        let data =
            self.value(a).data().iter().zip(self.value(b).data()).map(|(x, y)| x - y).collect();
        let value = Tensor::from_parts(self.value(a).shape().to_vec(), data);
        Ok(self.push(Op::Sub(a, b), value))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, TensorError> {
        self.binary_check("mul", a, b)?;
        let data =
            self.value(a).data().iter().zip(self.value(b).data()).map(|(x, y)| x * y).collect();
        let value = Tensor::from_parts(self.value(a).shape().to_vec(), data);
        Ok(self.push(Op::Mul(a, b), value))
    }

    /// Multiply every element by a fixed constant.
    pub fn scale(&mut self, a: NodeId, c: f64) -> NodeId {
        let data = self.value(a).data().iter().map(|x| x * c).collect();
        let value = Tensor::from_parts(self.value(a).shape().to_vec(), data);
        self.push(Op::Scale(a, c), value)
    }

    /// Add a fixed constant to every element.
    pub fn add_const(&mut self, a: NodeId, c: f64) -> NodeId {
        let data = self.value(a).data().iter().map(|x| x + c).collect();
        let value = Tensor::from_parts(self.value(a).shape().to_vec(), data);
        self.push(Op::AddConst(a), value)
    }

    /// Elementwise exponential.
    pub fn exp(&mut self, a: NodeId) -> NodeId {
        let data = self.value(a).data().iter().map(|x| x.exp()).collect();
        let value = Tensor::from_parts(self.value(a).shape().to_vec(), data);
        self.push(Op::Exp(a), value)
    }

    pub fn selu(&mut self, a: NodeId) -> NodeId {
        let data = self.value(a).data().iter().map(|&x| selu_scalar(x)).collect();
        let value = Tensor::from_parts(self.value(a).shape().to_vec(), data);
        self.push(Op::Selu(a), value)
    }

    pub fn leaky_relu(&mut self, a: NodeId, slope: f64) -> NodeId {
        let data = self.value(a).data().iter().map(|&x| leaky_relu_scalar(x, slope)).collect();
        let value = Tensor::from_parts(self.value(a).shape().to_vec(), data);
        self.push(Op::LeakyRelu(a, slope), value)
    }

    /// Sum all elements into a `[1]` scalar.
    pub fn sum(&mut self, a: NodeId) -> NodeId {
        let total: f64 = self.value(a).data().iter().sum();
        self.push(Op::Sum(a), Tensor::scalar(total))
    }

    pub fn reshape(&mut self, a: NodeId, shape: Vec<usize>) -> Result<NodeId, TensorError> {
        let value = self.value(a).reshape(shape)?;
        Ok(self.push(Op::Reshape(a), value))
    }

    pub fn dense(
        &mut self,
        input: NodeId,
        weights: NodeId,
        bias: NodeId,
    ) -> Result<NodeId, TensorError> {
        let (m, n) = dense_check(self.value(input), self.value(weights), self.value(bias))?;
        let out = dense_raw(
            m,
            n,
            self.value(input).data(),
            self.value(weights).data(),
            self.value(bias).data(),
        );
        let value = Tensor::from_parts(vec![m], out);
        Ok(self.push(Op::Dense { input, weights, bias }, value))
    }

    pub fn conv2d(
        &mut self,
        input: NodeId,
        kernels: NodeId,
        bias: NodeId,
        stride: usize,
        padding: usize,
    ) -> Result<NodeId, TensorError> {
        let geom =
            ConvGeom::conv(self.value(input), self.value(kernels), self.value(bias), stride, padding)?;
        let out = layers::conv2d_raw(
            &geom,
            self.value(input).data(),
            self.value(kernels).data(),
            self.value(bias).data(),
        );
        let value = Tensor::from_parts(vec![geom.c_out, geom.h_out, geom.w_out], out);
        Ok(self.push(Op::Conv2d { input, kernels, bias, geom }, value))
    }

    pub fn conv2d_transpose(
        &mut self,
        input: NodeId,
        kernels: NodeId,
        bias: NodeId,
        stride: usize,
        padding: usize,
    ) -> Result<NodeId, TensorError> {
        let geom = ConvGeom::transpose(
            self.value(input),
            self.value(kernels),
            self.value(bias),
            stride,
            padding,
        )?;
        let out = layers::conv2d_transpose_raw(
            &geom,
            self.value(input).data(),
            self.value(kernels).data(),
            self.value(bias).data(),
        );
        let value = Tensor::from_parts(vec![geom.c_out, geom.h_out, geom.w_out], out);
        Ok(self.push(Op::ConvT2d { input, kernels, bias, geom }, value))
    }

    pub fn max_pool2d(&mut self, input: NodeId, window: usize) -> Result<NodeId, TensorError> {
        let r = max_pool2d_raw(self.value(input), window)?;
        let value = Tensor::from_parts(vec![r.c, r.h_out, r.w_out], r.values);
        Ok(self.push(Op::MaxPool2d { input, argmax: r.argmax }, value))
    }

    /// Reverse-mode pass from a scalar loss.
    ///
    /// Walks the tape backwards accumulating exact adjoints; afterwards
    /// every node reachable from the loss (parameters included) has a
    /// gradient of the same shape as its value.
    pub fn backward(&self, loss: NodeId) -> Result<Gradients, TensorError> {
        if !self.value(loss).is_scalar() {
            return Err(TensorError::NonScalarLoss { len: self.value(loss).len() });
        }
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; self.nodes.len()];
        grads[loss.0] = Some(vec![1.0]);

        for idx in (0..=loss.0).rev() {
            // take the adjoint to appease the borrow checker, restore below
            let Some(g) = grads[idx].take() else { continue };
            match &self.nodes[idx].op {
                Op::Leaf { .. } => {}
                Op::Add(a, b) => {
                    accumulate(&mut grads, *a, self.nodes[a.0].value.len(), |buf| {
                        add_assign(buf, &g)
                    });
                    accumulate(&mut grads, *b, self.nodes[b.0].value.len(), |buf| {
                        add_assign(buf, &g)
                    });
                }
                Op::Sub(a, b) => {
                    accumulate(&mut grads, *a, self.nodes[a.0].value.len(), |buf| {
                        add_assign(buf, &g)
                    });
                    accumulate(&mut grads, *b, self.nodes[b.0].value.len(), |buf| {
                        sub_assign(buf, &g)
                    });
                }
                Op::Mul(a, b) => {
                    let (va, vb) = (self.nodes[a.0].value.data(), self.nodes[b.0].value.data());
                    accumulate(&mut grads, *a, va.len(), |buf| {
                        for ((o, gi), y) in buf.iter_mut().zip(&g).zip(vb) {
                            *o += gi * y;
                        }
                    });
                    accumulate(&mut grads, *b, vb.len(), |buf| {
                        for ((o, gi), x) in buf.iter_mut().zip(&g).zip(va) {
                            *o += gi * x;
                        }
                    });
                }
                Op::Scale(a, c) => {
                    accumulate(&mut grads, *a, g.len(), |buf| {
                        for (o, gi) in buf.iter_mut().zip(&g) {
                            *o += gi * c;
                        }
                    });
                }
                Op::AddConst(a) => {
                    accumulate(&mut grads, *a, g.len(), |buf| add_assign(buf, &g));
                }
                Op::Exp(a) => {
                    // reuse the stored forward value: d exp = exp
                    let out = self.nodes[idx].value.data();
                    accumulate(&mut grads, *a, g.len(), |buf| {
                        for ((o, gi), e) in buf.iter_mut().zip(&g).zip(out) {
                            *o += gi * e;
                        }
                    });
                }
                Op::Selu(a) => {
                    let x = self.nodes[a.0].value.data();
                    accumulate(&mut grads, *a, g.len(), |buf| {
                        for ((o, gi), xi) in buf.iter_mut().zip(&g).zip(x) {
                            *o += gi * selu_derivative(*xi);
                        }
                    });
                }
                Op::LeakyRelu(a, slope) => {
                    let x = self.nodes[a.0].value.data();
                    let s = *slope;
                    accumulate(&mut grads, *a, g.len(), |buf| {
                        for ((o, gi), xi) in buf.iter_mut().zip(&g).zip(x) {
                            *o += gi * leaky_relu_derivative(*xi, s);
                        }
                    });
                }
                Op::Sum(a) => {
                    let gs = g[0];
                    let len = self.nodes[a.0].value.len();
                    accumulate(&mut grads, *a, len, |buf| {
                        for o in buf.iter_mut() {
                            *o += gs;
                        }
                    });
                }
                Op::Reshape(a) => {
                    accumulate(&mut grads, *a, g.len(), |buf| add_assign(buf, &g));
                }
                Op::Dense { input, weights, bias } => {
                    let x = self.nodes[input.0].value.data();
                    let w = self.nodes[weights.0].value.data();
                    let n = x.len();
                    accumulate(&mut grads, *input, n, |buf| {
                        for (i, gi) in g.iter().enumerate() {
                            let row = &w[i * n..(i + 1) * n];
                            for (o, wj) in buf.iter_mut().zip(row) {
                                *o += gi * wj;
                            }
                        }
                    });
                    accumulate(&mut grads, *weights, w.len(), |buf| {
                        for (i, gi) in g.iter().enumerate() {
                            let row = &mut buf[i * n..(i + 1) * n];
                            for (o, xj) in row.iter_mut().zip(x) {
                                *o += gi * xj;
                            }
                        }
                    });
                    accumulate(&mut grads, *bias, g.len(), |buf| add_assign(buf, &g));
                }
                Op::Conv2d { input, kernels, bias, geom } => {
                    let (gi, gk, gb) = layers::conv2d_backward_raw(
                        geom,
                        self.nodes[input.0].value.data(),
                        self.nodes[kernels.0].value.data(),
                        &g,
                    );
                    accumulate(&mut grads, *input, gi.len(), |buf| add_assign(buf, &gi));
                    accumulate(&mut grads, *kernels, gk.len(), |buf| add_assign(buf, &gk));
                    accumulate(&mut grads, *bias, gb.len(), |buf| add_assign(buf, &gb));
                }
                Op::ConvT2d { input, kernels, bias, geom } => {
                    let (gi, gk, gb) = layers::conv2d_transpose_backward_raw(
                        geom,
                        self.nodes[input.0].value.data(),
                        self.nodes[kernels.0].value.data(),
                        &g,
                    );
                    accumulate(&mut grads, *input, gi.len(), |buf| add_assign(buf, &gi));
                    accumulate(&mut grads, *kernels, gk.len(), |buf| add_assign(buf, &gk));
                    accumulate(&mut grads, *bias, gb.len(), |buf| add_assign(buf, &gb));
                }
                Op::MaxPool2d { input, argmax } => {
                    let len = self.nodes[input.0].value.len();
                    accumulate(&mut grads, *input, len, |buf| {
                        for (o, &src) in g.iter().zip(argmax) {
                            buf[src] += o;
                        }
                    });
                }
            }
            grads[idx] = Some(g);
        }

        let tensors = grads
            .into_iter()
            .enumerate()
            .map(|(i, g)| g.map(|data| Tensor::from_parts(self.nodes[i].value.shape().to_vec(), data)))
            .collect();
        Ok(Gradients { grads: tensors })
    }
}

fn accumulate<F: FnOnce(&mut [f64])>(
    grads: &mut [Option<Vec<f64>>],
    target: NodeId,
    len: usize,
    f: F,
) {
    let slot = grads[target.0].get_or_insert_with(|| vec![0.0; len]);
    f(slot);
}

fn add_assign(buf: &mut [f64], g: &[f64]) {
    for (o, gi) in buf.iter_mut().zip(g) {
        *o += gi;
    }
}

fn sub_assign(buf: &mut [f64], g: &[f64]) {
    for (o, gi) in buf.iter_mut().zip(g) {
        *o -= gi;
    }
}

/// Per-node gradients produced by [`Graph::backward`].
#[derive(Debug)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    /// Gradient of the loss with respect to a node's value, if the node
    /// was reachable from the loss.
    pub fn get(&self, id: NodeId) -> Option<&Tensor> {
        self.grads.get(id.0)?.as_ref()
    }
}
