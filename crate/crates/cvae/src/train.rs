use plume_core::PlumeSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tensor_autodiff::{AdamState, Tensor};

use crate::loss::{frozen_noise, loss_frozen_with_grads, reconstruction_mse};
use crate::model::plume_to_image;
use crate::{derive_seed, CvaeArch, CvaeError, CvaeModel};

/// Training hyperparameters. Defaults follow the production recipe:
/// 500 epochs, 10 independent restarts, one Monte Carlo draw per image,
/// KL weight 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub restarts: usize,
    pub batch_size: usize,
    pub l_samples: usize,
    pub lambda: f64,
    pub seed: u64,
    pub learning_rate: f64,
    /// Record validation reconstruction MSE every this many epochs
    /// (monitoring only; selection uses training MSE).
    pub validation_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            restarts: 10,
            batch_size: 64,
            l_samples: 1,
            lambda: 1e-9,
            seed: 0,
            learning_rate: 1e-3,
            validation_every: 10,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), CvaeError> {
        if self.restarts == 0
            || self.batch_size == 0
            || self.l_samples == 0
            || self.validation_every == 0
        {
            return Err(CvaeError::InvalidConfig(
                "restarts, batch size, draw count, and validation cadence must be positive".into(),
            ));
        }
        if !(self.lambda > 0.0) || !(self.learning_rate > 0.0) {
            return Err(CvaeError::InvalidConfig(
                "lambda and learning rate must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// What happened during one restart.
#[derive(Debug, Clone)]
pub struct RestartHistory {
    pub restart: usize,
    /// Summed objective over the whole training set, one entry per epoch.
    pub epoch_losses: Vec<f64>,
    /// `(epoch, mse)` monitoring points on the validation set.
    pub validation_mse: Vec<(usize, f64)>,
    /// Deterministic mean-code reconstruction MSE after the last epoch;
    /// `None` when the restart aborted.
    pub final_train_mse: Option<f64>,
    pub aborted: bool,
}

#[derive(Debug, Clone)]
pub struct TrainHistory {
    pub restarts: Vec<RestartHistory>,
    /// Index of the restart whose model was returned.
    pub chosen: usize,
}

/// Disjoint, exhaustive, seeded split of a plume set.
pub fn split_train_validation(
    dataset: &PlumeSet,
    fraction: f64,
    seed: u64,
) -> Result<(PlumeSet, PlumeSet), CvaeError> {
    if !(0.0 < fraction && fraction < 1.0) {
        return Err(CvaeError::InvalidConfig(format!("split fraction {fraction} outside (0, 1)")));
    }
    let n = dataset.len();
    let n_train = (n as f64 * fraction).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(CvaeError::DatasetTooSmall(format!(
            "{n} plumes cannot give both parts at least one plume at fraction {fraction}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut train = PlumeSet::new(*dataset.grid());
    let mut validation = PlumeSet::new(*dataset.grid());
    for (pos, &idx) in order.iter().enumerate() {
        let plume = dataset.plumes()[idx].clone();
        if pos < n_train {
            train.push(plume)?;
        } else {
            validation.push(plume)?;
        }
    }
    Ok((train, validation))
}

/// Train the autoencoder: `restarts` independent seeded trainings over
/// `epochs` epochs of shuffled without-replacement batches, each batch
/// taking one Adam step on the summed objective. The model with the
/// lowest final deterministic training reconstruction MSE wins. A restart
/// that produces a non-finite loss is abandoned and logged, not fatal.
pub fn train(
    dataset: &PlumeSet,
    arch: &CvaeArch,
    cfg: &TrainConfig,
    validation: Option<&PlumeSet>,
) -> Result<(CvaeModel, TrainHistory), CvaeError> {
    cfg.validate()?;
    arch.validate()?;
    if dataset.is_empty() {
        return Err(CvaeError::DatasetTooSmall("empty training set".into()));
    }
    let images: Vec<Tensor> = dataset
        .iter()
        .map(|p| plume_to_image(p, arch.input_side))
        .collect::<Result<_, _>>()?;
    let val_images: Option<Vec<Tensor>> = validation
        .map(|set| set.iter().map(|p| plume_to_image(p, arch.input_side)).collect())
        .transpose()?;

    let results: Vec<(RestartHistory, Option<CvaeModel>)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| run_restart(&images, val_images.as_deref(), arch, cfg, restart))
        .collect();

    let mut histories = Vec::with_capacity(results.len());
    let mut best: Option<(usize, f64, CvaeModel)> = None;
    for (history, model) in results {
        if let (Some(mse), Some(model)) = (history.final_train_mse, model) {
            let better = best.as_ref().is_none_or(|(_, b, _)| mse < *b);
            if better {
                best = Some((history.restart, mse, model));
            }
        }
        histories.push(history);
    }
    let (chosen, _, model) = best.ok_or(CvaeError::AllRestartsFailed)?;
    Ok((model, TrainHistory { restarts: histories, chosen }))
}

fn run_restart(
    images: &[Tensor],
    val_images: Option<&[Tensor]>,
    arch: &CvaeArch,
    cfg: &TrainConfig,
    restart: usize,
) -> (RestartHistory, Option<CvaeModel>) {
    let mut history = RestartHistory {
        restart,
        epoch_losses: Vec::with_capacity(cfg.epochs),
        validation_mse: Vec::new(),
        final_train_mse: None,
        aborted: false,
    };

    let weight_seed = derive_seed(&[cfg.seed, 0xC0, restart as u64]);
    let mut model = match CvaeModel::init(arch.clone(), cfg.lambda, weight_seed) {
        Ok(m) => m,
        Err(e) => {
            log::warn!("restart {restart}: initialization failed: {e}");
            history.aborted = true;
            return (history, None);
        }
    };
    let mut adam = AdamState::new(model.params(), cfg.learning_rate);

    for epoch in 0..cfg.epochs {
        let mut order: Vec<usize> = (0..images.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(&[
            cfg.seed,
            0xD0,
            restart as u64,
            epoch as u64,
        ])));

        let mut epoch_loss = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<Tensor> = chunk.iter().map(|&i| images[i].clone()).collect();
            // noise streams keyed by (restart, epoch, dataset index): the
            // draw for an image does not depend on batch composition
            let eps: Vec<Vec<Tensor>> = chunk
                .iter()
                .map(|&i| {
                    frozen_noise(
                        arch.r,
                        cfg.l_samples,
                        derive_seed(&[cfg.seed, 0xE0, restart as u64, epoch as u64]),
                        i as u64,
                    )
                })
                .collect();

            let step = loss_frozen_with_grads(&model, &batch, &eps, cfg.lambda)
                .and_then(|(value, grads)| {
                    if !value.is_finite() {
                        return Err(CvaeError::InvalidConfig(format!(
                            "non-finite loss {value}"
                        )));
                    }
                    let params = adam.step(model.params(), &grads)?;
                    model = model.with_params(params)?;
                    Ok(value)
                });
            match step {
                Ok(value) => epoch_loss += value,
                Err(e) => {
                    log::warn!("restart {restart} aborted at epoch {epoch}: {e}");
                    history.aborted = true;
                    return (history, None);
                }
            }
        }
        history.epoch_losses.push(epoch_loss);

        if let Some(val) = val_images {
            if (epoch + 1) % cfg.validation_every == 0 || epoch + 1 == cfg.epochs {
                if let Ok(mse) = reconstruction_mse(&model, val) {
                    history.validation_mse.push((epoch + 1, mse));
                }
            }
        }
    }

    match reconstruction_mse(&model, images) {
        Ok(mse) if mse.is_finite() => {
            history.final_train_mse = Some(mse);
            (history, Some(model))
        }
        _ => {
            log::warn!("restart {restart}: non-finite final reconstruction error");
            history.aborted = true;
            (history, None)
        }
    }
}
