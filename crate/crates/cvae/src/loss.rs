//! Builds the network forward passes and the training objective on a
//! [`Graph`], so inference and gradients share one code path.

use rayon::prelude::*;
use tensor_autodiff::{Graph, NodeId, Tensor};

use crate::latent::standard_normal;
use crate::{derive_seed, CvaeArch, CvaeError, CvaeModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Node ids of every registered parameter, in storage order.
pub(crate) struct ParamIds {
    ids: Vec<NodeId>,
    n_enc: usize,
}

impl ParamIds {
    pub fn enc(&self, stage: usize) -> (NodeId, NodeId) {
        (self.ids[2 * stage], self.ids[2 * stage + 1])
    }

    fn base(&self) -> usize {
        2 * self.n_enc
    }

    pub fn head_mean(&self) -> (NodeId, NodeId) {
        (self.ids[self.base()], self.ids[self.base() + 1])
    }

    pub fn head_log_var(&self) -> (NodeId, NodeId) {
        (self.ids[self.base() + 2], self.ids[self.base() + 3])
    }

    pub fn dec_dense(&self) -> (NodeId, NodeId) {
        (self.ids[self.base() + 4], self.ids[self.base() + 5])
    }

    pub fn dec(&self, stage: usize) -> (NodeId, NodeId) {
        (self.ids[self.base() + 6 + 2 * stage], self.ids[self.base() + 7 + 2 * stage])
    }

    pub fn all(&self) -> &[NodeId] {
        &self.ids
    }
}

pub(crate) fn register_params(g: &mut Graph, arch: &CvaeArch, params: &[Tensor]) -> ParamIds {
    ParamIds {
        ids: params.iter().map(|t| g.param(t.clone())).collect(),
        n_enc: arch.enc_channels.len(),
    }
}

/// Encoder: conv/selu/pool stages, flatten, leaky-relu trunk, two linear
/// dense heads. Returns the (mean, log-variance) nodes.
pub(crate) fn encoder_forward(
    g: &mut Graph,
    arch: &CvaeArch,
    ids: &ParamIds,
    input: NodeId,
) -> Result<(NodeId, NodeId), CvaeError> {
    let mut x = input;
    for stage in 0..arch.enc_channels.len() {
        let (k, b) = ids.enc(stage);
        x = g.conv2d(x, k, b, 1, arch.enc_padding)?;
        x = g.selu(x);
        x = g.max_pool2d(x, arch.pool_window)?;
    }
    let flat = g.reshape(x, vec![arch.flat_len()])?;
    let trunk = g.leaky_relu(flat, arch.leaky_slope);
    let (mw, mb) = ids.head_mean();
    let mean = g.dense(trunk, mw, mb)?;
    let (lw, lb) = ids.head_log_var();
    let log_var = g.dense(trunk, lw, lb)?;
    Ok((mean, log_var))
}

/// Decoder: dense entry, reshape to the bottleneck volume, doubling
/// transposed convolutions with selu everywhere but the last stage.
pub(crate) fn decoder_forward(
    g: &mut Graph,
    arch: &CvaeArch,
    ids: &ParamIds,
    latent: NodeId,
) -> Result<NodeId, CvaeError> {
    let (dw, db) = ids.dec_dense();
    let mut x = g.dense(latent, dw, db)?;
    let side = arch.bottleneck_side();
    x = g.reshape(x, vec![arch.dec_initial_channels, side, side])?;
    let stages = arch.dec_channels.len();
    for stage in 0..stages {
        let (k, b) = ids.dec(stage);
        x = g.conv2d_transpose(x, k, b, arch.dec_stride, arch.dec_padding)?;
        if stage + 1 < stages {
            x = g.selu(x);
        }
    }
    Ok(x)
}

/// Closed-form KL node:
/// `-1/2 * [sum(log_var) + r - sum(exp(log_var)) - sum(mean^2)]`.
pub(crate) fn kl_node(g: &mut Graph, mean: NodeId, log_var: NodeId, r: usize) -> Result<NodeId, CvaeError> {
    let s_lv = g.sum(log_var);
    let var = g.exp(log_var);
    let s_var = g.sum(var);
    let mean_sq = g.mul(mean, mean)?;
    let s_mean = g.sum(mean_sq);
    let t = g.sub(s_lv, s_var)?;
    let t = g.sub(t, s_mean)?;
    let t = g.add_const(t, r as f64);
    Ok(g.scale(t, -0.5))
}

/// One image's contribution to the objective, with the noise draws
/// supplied explicitly: `(1/L) * sum_l ||b - d(u_l)||^2 + lambda * KL`.
pub(crate) fn item_loss_node(
    g: &mut Graph,
    arch: &CvaeArch,
    ids: &ParamIds,
    image: &Tensor,
    eps_draws: &[Tensor],
    lambda: f64,
) -> Result<NodeId, CvaeError> {
    let k_cells = arch.input_side * arch.input_side;
    let input = g.leaf(image.clone());
    let (mean, log_var) = encoder_forward(g, arch, ids, input)?;
    let kl = kl_node(g, mean, log_var, arch.r)?;

    let input_flat = g.reshape(input, vec![k_cells])?;
    let mut recon_acc: Option<NodeId> = None;
    for eps in eps_draws {
        let eps_id = g.leaf(eps.clone());
        let half_lv = g.scale(log_var, 0.5);
        let std = g.exp(half_lv);
        let noise = g.mul(std, eps_id)?;
        let u = g.add(mean, noise)?;
        let decoded = decoder_forward(g, arch, ids, u)?;
        let dec_flat = g.reshape(decoded, vec![k_cells])?;
        let diff = g.sub(input_flat, dec_flat)?;
        let sq = g.mul(diff, diff)?;
        let term = g.sum(sq);
        recon_acc = Some(match recon_acc {
            None => term,
            Some(acc) => g.add(acc, term)?,
        });
    }
    let recon_sum = recon_acc
        .ok_or_else(|| CvaeError::InvalidConfig("need at least one Monte Carlo draw".into()))?;
    let recon = g.scale(recon_sum, 1.0 / eps_draws.len() as f64);
    let kl_scaled = g.scale(kl, lambda);
    Ok(g.add(recon, kl_scaled)?)
}

fn item_loss_value(
    model: &CvaeModel,
    image: &Tensor,
    eps: &[Tensor],
    lambda: f64,
) -> Result<f64, CvaeError> {
    let mut g = Graph::new();
    let ids = register_params(&mut g, model.arch(), model.params());
    let loss = item_loss_node(&mut g, model.arch(), &ids, image, eps, lambda)?;
    Ok(g.value(loss).item()?)
}

fn item_loss_and_grads(
    model: &CvaeModel,
    image: &Tensor,
    eps: &[Tensor],
    lambda: f64,
) -> Result<(f64, Vec<Tensor>), CvaeError> {
    let mut g = Graph::new();
    let ids = register_params(&mut g, model.arch(), model.params());
    let loss = item_loss_node(&mut g, model.arch(), &ids, image, eps, lambda)?;
    let value = g.value(loss).item()?;
    let grads = g.backward(loss)?;
    let per_param = ids
        .all()
        .iter()
        .enumerate()
        .map(|(i, &id)| match grads.get(id) {
            Some(t) => t.clone(),
            None => Tensor::zeros(model.params()[i].shape().to_vec()),
        })
        .collect();
    Ok((value, per_param))
}

/// Objective over a batch with seeded noise: the sum over images of the
/// per-image Monte Carlo reconstruction error plus `lambda` times the KL
/// term. Draw `l` for image `i` comes from a stream derived from
/// `(seed, i, l)`, so the value is reproducible and independent of batch
/// composition.
pub fn loss(
    model: &CvaeModel,
    batch: &[Tensor],
    l_samples: usize,
    lambda: f64,
    seed: u64,
) -> Result<f64, CvaeError> {
    if batch.is_empty() {
        return Err(CvaeError::InvalidConfig("empty batch".into()));
    }
    let eps: Vec<Vec<Tensor>> = (0..batch.len())
        .map(|i| frozen_noise(model.arch().r, l_samples, seed, i as u64))
        .collect();
    loss_frozen(model, batch, &eps, lambda)
}

/// Deterministic noise draws for image `item`: `l_samples` standard
/// normal vectors of length `r`.
pub(crate) fn frozen_noise(r: usize, l_samples: usize, seed: u64, item: u64) -> Vec<Tensor> {
    (0..l_samples)
        .map(|l| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, item, l as u64]));
            let data: Vec<f64> = (0..r).map(|_| standard_normal(&mut rng)).collect();
            Tensor::from_vec(vec![r], data).expect("noise shape")
        })
        .collect()
}

/// Objective with explicitly supplied noise (one vector of draws per
/// image). This is the function differentiated by training and audited
/// against finite differences.
pub fn loss_frozen(
    model: &CvaeModel,
    batch: &[Tensor],
    eps: &[Vec<Tensor>],
    lambda: f64,
) -> Result<f64, CvaeError> {
    check_batch(model, batch, eps)?;
    let mut total = 0.0;
    for (image, e) in batch.iter().zip(eps) {
        total += item_loss_value(model, image, e, lambda)?;
    }
    Ok(total)
}

/// [`loss_frozen`] together with the gradient of the batch objective with
/// respect to every parameter, in storage order. Per-image passes run in
/// parallel; the reduction is in batch order, so results are bit-stable.
pub fn loss_frozen_with_grads(
    model: &CvaeModel,
    batch: &[Tensor],
    eps: &[Vec<Tensor>],
    lambda: f64,
) -> Result<(f64, Vec<Tensor>), CvaeError> {
    check_batch(model, batch, eps)?;
    let per_item: Vec<Result<(f64, Vec<Tensor>), CvaeError>> = batch
        .par_iter()
        .zip(eps.par_iter())
        .map(|(image, e)| item_loss_and_grads(model, image, e, lambda))
        .collect();

    let mut total = 0.0;
    let mut grads: Option<Vec<Vec<f64>>> = None;
    for item in per_item {
        let (value, item_grads) = item?;
        total += value;
        match &mut grads {
            None => grads = Some(item_grads.iter().map(|t| t.data().to_vec()).collect()),
            Some(acc) => {
                for (a, t) in acc.iter_mut().zip(&item_grads) {
                    for (x, y) in a.iter_mut().zip(t.data()) {
                        *x += y;
                    }
                }
            }
        }
    }
    let grads = grads
        .ok_or_else(|| CvaeError::InvalidConfig("empty batch".into()))?
        .into_iter()
        .zip(model.params())
        .map(|(data, p)| Tensor::from_vec(p.shape().to_vec(), data).expect("gradient shape"))
        .collect();
    Ok((total, grads))
}

/// Mean per-cell squared reconstruction error of the deterministic
/// mean-code round trip, averaged over the images. This is the model
/// selection criterion across training restarts.
pub fn reconstruction_mse(model: &CvaeModel, images: &[Tensor]) -> Result<f64, CvaeError> {
    if images.is_empty() {
        return Err(CvaeError::InvalidConfig("no images".into()));
    }
    let per: Vec<Result<f64, CvaeError>> = images
        .par_iter()
        .map(|image| {
            let code = model.encode_image(image)?;
            let recon = model.decode(&code.mean)?;
            let k = image.len() as f64;
            let sq: f64 = image
                .data()
                .iter()
                .zip(recon.data())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            Ok(sq / k)
        })
        .collect();
    let mut total = 0.0;
    for v in per {
        total += v?;
    }
    Ok(total / images.len() as f64)
}

fn check_batch(model: &CvaeModel, batch: &[Tensor], eps: &[Vec<Tensor>]) -> Result<(), CvaeError> {
    if batch.len() != eps.len() {
        return Err(CvaeError::Shape(format!(
            "{} images but {} noise vectors",
            batch.len(),
            eps.len()
        )));
    }
    let side = model.arch().input_side;
    for (i, img) in batch.iter().enumerate() {
        if img.shape() != [1, side, side] {
            return Err(CvaeError::Shape(format!(
                "image {i} has shape {:?}, expected [1, {side}, {side}]",
                img.shape()
            )));
        }
    }
    for (i, e) in eps.iter().enumerate() {
        for t in e {
            if t.shape() != [model.arch().r] {
                return Err(CvaeError::Shape(format!(
                    "noise for image {i} has shape {:?}, expected [{}]",
                    t.shape(),
                    model.arch().r
                )));
            }
        }
    }
    Ok(())
}
