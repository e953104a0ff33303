//! The training loop: shuffled single-sample steps, per-epoch validation,
//! best-on-validation checkpoint selection.

use ctrlrob_core::dataset::{DatasetReader, Sample, Split};
use ctrlrob_core::rng;
use rand::seq::SliceRandom;
use rayon::prelude::*;

use ctrlrob_tensor_nn::loss::curve_loss;
use ctrlrob_tensor_nn::{Gradients, Network, Tensor};

use crate::model::{ModelState, TrainLogEntry};
use crate::{CnnError, Result};

fn to_example(sample: &Sample, n: usize) -> Result<(Tensor, Vec<f64>)> {
    let image = Tensor::from_vec(&[n, n], sample.image.values().to_vec())?;
    Ok((image, sample.curve.clone()))
}

fn mean_validation_loss(
    network: &Network,
    examples: &[(Tensor, Vec<f64>)],
    loss: ctrlrob_tensor_nn::LossKind,
) -> Result<f64> {
    // parallel forward passes, fixed-order summation
    let losses: Vec<Result<f64>> = examples
        .par_iter()
        .map(|(image, truth)| {
            let out = network.forward(image)?;
            Ok(curve_loss(loss, out.data(), truth)?)
        })
        .collect();
    let mut total = 0.0;
    for l in losses {
        total += l?;
    }
    Ok(total / examples.len() as f64)
}

/// Train in place for the configured number of epochs.
///
/// Each epoch walks the full training split in a shuffled order (one
/// Adam step per sample), then measures the validation loss; the network
/// kept at the end is the epoch checkpoint with the lowest validation
/// loss. The optimizer state remains the final-epoch state, so training
/// can be resumed from the file. The per-epoch log lands in `model.log`.
///
/// Identical seeds (model seed, dataset, `shuffle_seed`) reproduce the
/// result bit for bit.
pub fn train(model: &mut ModelState, dataset: &DatasetReader, shuffle_seed: u64) -> Result<()> {
    let n = model.config.n;
    if dataset.manifest.n != n {
        return Err(CnnError::SizeMismatch {
            model_n: n,
            data_n: dataset.manifest.n,
        });
    }
    let train_samples = dataset.load_split(Split::Train)?;
    if train_samples.is_empty() {
        return Err(CnnError::EmptySplit { split: "train" });
    }
    let validation_samples = dataset.load_split(Split::Validation)?;

    let train_set: Vec<(Tensor, Vec<f64>)> = train_samples
        .iter()
        .map(|s| to_example(s, n))
        .collect::<Result<_>>()?;
    let validation_set: Vec<(Tensor, Vec<f64>)> = validation_samples
        .iter()
        .map(|s| to_example(s, n))
        .collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut best: Option<(f64, Network)> = None;
    model.log.clear();

    let batch = model.config.batch_size.max(1);
    for epoch in 1..=model.config.epochs {
        let mut epoch_rng = rng::stream(shuffle_seed, epoch as u64);
        order.shuffle(&mut epoch_rng);

        let mut epoch_loss = 0.0;
        for chunk in order.chunks(batch) {
            let mut accumulated: Option<Gradients> = None;
            for &idx in chunk {
                let (image, truth) = &train_set[idx];
                let (loss, grads) = model
                    .network
                    .loss_gradients(image, truth, model.config.loss)
                    .map_err(|e| CnnError::TrainAbort {
                        epoch,
                        sample: idx,
                        detail: e.to_string(),
                    })?;
                epoch_loss += loss;
                accumulated = Some(match accumulated {
                    None => grads,
                    Some(mut sum) => {
                        for (acc, g) in sum.tensors.iter_mut().zip(&grads.tensors) {
                            for (a, &v) in acc.data_mut().iter_mut().zip(g.data()) {
                                *a += v;
                            }
                        }
                        sum
                    }
                });
            }
            let mut grads = accumulated.expect("chunks are never empty");
            if chunk.len() > 1 {
                let scale = 1.0 / chunk.len() as f64;
                for tensor in &mut grads.tensors {
                    for v in tensor.data_mut() {
                        *v *= scale;
                    }
                }
            }
            let mut params = model.network.params_mut();
            model.adam.apply(&mut params, &grads)?;
        }
        let train_loss = epoch_loss / train_set.len() as f64;

        let val_loss = if validation_set.is_empty() {
            train_loss
        } else {
            mean_validation_loss(&model.network, &validation_set, model.config.loss)?
        };
        if !val_loss.is_finite() {
            return Err(CnnError::TrainAbort {
                epoch,
                sample: usize::MAX,
                detail: format!("validation loss {val_loss}"),
            });
        }
        model.log.push(TrainLogEntry {
            epoch,
            train_loss,
            val_loss,
        });
        // strict improvement keeps the earliest best epoch on ties
        if best.as_ref().is_none_or(|(b, _)| val_loss < *b) {
            best = Some((val_loss, model.network.clone()));
        }
    }

    if let Some((_, network)) = best {
        model.network = network;
    }
    Ok(())
}
