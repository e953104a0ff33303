//! Model assembly, inference, and the model file.

use std::path::Path;

use ctrlrob_core::graph::AdjacencyMatrix;
use ctrlrob_core::rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use ctrlrob_tensor_nn::checkpoint;
use ctrlrob_tensor_nn::{AdamState, Conv2d, Dense, Embedding, Layer, Network, Tensor};

use crate::config::CnnConfig;
use crate::{CnnError, Result};

/// One line of the training log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainLogEntry {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

/// A model: its config, the network (with the frozen embedding inside),
/// the optimizer state, and the per-epoch training log.
#[derive(Debug)]
pub struct ModelState {
    pub config: CnnConfig,
    pub network: Network,
    pub adam: AdamState,
    pub log: Vec<TrainLogEntry>,
}

fn normal_tensor(shape: &[usize], std: f64, rng: &mut ChaCha8Rng) -> Tensor {
    let len: usize = shape.iter().product();
    let data = (0..len)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            z * std
        })
        .collect();
    Tensor::from_vec(shape, data).expect("finite init values")
}

/// The frozen embedding: standard-normal entries with every column
/// scaled to unit Euclidean length, sampled once from the model seed.
fn embedding_matrix(n: usize, rng: &mut ChaCha8Rng) -> Tensor {
    let mut matrix = normal_tensor(&[n, n], 1.0, rng);
    let data = matrix.data_mut();
    for col in 0..n {
        let mut norm_sq = 0.0;
        for row in 0..n {
            let v = data[row * n + col];
            norm_sq += v * v;
        }
        let norm = norm_sq.sqrt();
        if norm > 0.0 {
            for row in 0..n {
                data[row * n + col] /= norm;
            }
        }
    }
    matrix
}

/// Assemble a freshly initialized model.
///
/// Layer stack: embed, then per group conv + ReLU + pool, then flatten,
/// a hidden dense layer of width `fc2` with ReLU, and a linear output of
/// width `N - 1`. Convolution kernels use scaled-normal (He) init from
/// per-layer seed streams; biases start at zero; the embedding stream is
/// separate so the same seed always produces the same frozen matrix.
pub fn build_model(config: &CnnConfig) -> Result<ModelState> {
    let plan = config.shape_plan()?;
    let n = config.n;

    let mut layers = Vec::with_capacity(3 * config.groups.len() + 4);
    let mut embed_rng = rng::stream(config.seed, 0);
    layers.push(Layer::Embed(Embedding {
        matrix: embedding_matrix(n, &mut embed_rng),
    }));

    let mut in_channels = 1;
    for (idx, group) in config.groups.iter().enumerate() {
        let mut group_rng = rng::stream(config.seed, 1 + idx as u64);
        let fan_in = (in_channels * group.kernel * group.kernel) as f64;
        layers.push(Layer::Conv(Conv2d {
            kernels: normal_tensor(
                &[group.channels, in_channels, group.kernel, group.kernel],
                (2.0 / fan_in).sqrt(),
                &mut group_rng,
            ),
            bias: Tensor::zeros(&[group.channels]),
        }));
        layers.push(Layer::Relu);
        layers.push(Layer::Pool(ctrlrob_tensor_nn::MaxPool { window: group.pool }));
        in_channels = group.channels;
    }

    layers.push(Layer::Flatten);
    let mut hidden_rng = rng::stream(config.seed, 100);
    layers.push(Layer::Dense(Dense {
        weight: normal_tensor(
            &[config.fc2, plan.n_fc1],
            (2.0 / plan.n_fc1 as f64).sqrt(),
            &mut hidden_rng,
        ),
        bias: Tensor::zeros(&[config.fc2]),
    }));
    layers.push(Layer::Relu);
    let mut out_rng = rng::stream(config.seed, 101);
    layers.push(Layer::Dense(Dense {
        weight: normal_tensor(
            &[plan.output, config.fc2],
            (1.0 / config.fc2 as f64).sqrt(),
            &mut out_rng,
        ),
        bias: Tensor::zeros(&[plan.output]),
    }));

    let network = Network::new(layers);
    // end-to-end shape validation before any training
    let shapes = network.infer_shapes(&[n, n])?;
    debug_assert_eq!(shapes.last().unwrap(), &vec![plan.output]);

    let param_shapes: Vec<Vec<usize>> =
        network.params().iter().map(|t| t.shape().to_vec()).collect();
    let shape_refs: Vec<&[usize]> = param_shapes.iter().map(|s| s.as_slice()).collect();
    let adam = AdamState::new(config.adam, &shape_refs);

    Ok(ModelState {
        config: config.clone(),
        network,
        adam,
        log: Vec::new(),
    })
}

/// Predict a controllability curve from an adjacency image. The raw
/// network output is clamped into `[1/N, 1]`; training always sees raw
/// outputs, clamping is inference-only.
pub fn predict(model: &ModelState, image: &AdjacencyMatrix) -> Result<Vec<f64>> {
    let n = model.config.n;
    if image.n() != n {
        return Err(CnnError::SizeMismatch {
            model_n: n,
            data_n: image.n(),
        });
    }
    let input = Tensor::from_vec(&[n, n], image.values().to_vec())?;
    let output = model.network.forward(&input)?;
    let floor = 1.0 / n as f64;
    Ok(output.data().iter().map(|&v| v.clamp(floor, 1.0)).collect())
}

fn log_to_text(log: &[TrainLogEntry]) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    for entry in log {
        let _ = writeln!(
            out,
            "epoch {} train {} val {}",
            entry.epoch, entry.train_loss, entry.val_loss
        );
    }
    out
}

fn log_from_text(text: &str) -> Result<Vec<TrainLogEntry>> {
    let mut log = Vec::new();
    for line in text.lines() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 || fields[0] != "epoch" || fields[2] != "train" || fields[4] != "val" {
            return Err(CnnError::InvalidConfig(format!("bad log line `{line}`")));
        }
        log.push(TrainLogEntry {
            epoch: fields[1]
                .parse()
                .map_err(|e| CnnError::InvalidConfig(format!("bad epoch: {e}")))?,
            train_loss: fields[3]
                .parse()
                .map_err(|e| CnnError::InvalidConfig(format!("bad train loss: {e}")))?,
            val_loss: fields[5]
                .parse()
                .map_err(|e| CnnError::InvalidConfig(format!("bad val loss: {e}")))?,
        });
    }
    Ok(log)
}

/// Write the model file: the tensor checkpoint plus the canonical config
/// and training log in the caller section.
pub fn save_model(path: &Path, model: &ModelState) -> Result<()> {
    let mut extra = model.config.canonical_text();
    extra.push_str("---log---\n");
    extra.push_str(&log_to_text(&model.log));
    checkpoint::write_checkpoint(
        path,
        model.config.config_hash(),
        &model.network,
        Some(&model.adam),
        extra.as_bytes(),
    )?;
    Ok(())
}

/// Read a model file back, verifying checksum, version, and that the
/// stored config hashes to the stored hash.
pub fn load_model(path: &Path) -> Result<ModelState> {
    let ckpt = checkpoint::read_checkpoint(path)?;
    let extra = String::from_utf8(ckpt.extra)
        .map_err(|_| CnnError::InvalidConfig("model file config section is not UTF-8".into()))?;
    let (config_text, log_text) = extra
        .split_once("---log---\n")
        .ok_or_else(|| CnnError::InvalidConfig("model file misses its log section".into()))?;
    let config = CnnConfig::parse_canonical(config_text)?;
    if config.config_hash() != ckpt.config_hash {
        return Err(CnnError::InvalidConfig(
            "stored config does not match its recorded hash".into(),
        ));
    }
    let adam = ckpt.adam.ok_or_else(|| {
        CnnError::InvalidConfig("model file carries no optimizer state".into())
    })?;
    // reject a file whose tensors do not fit the declared architecture
    ckpt.network.infer_shapes(&[config.n, config.n])?;
    Ok(ModelState {
        config,
        network: ckpt.network,
        adam,
        log: log_from_text(log_text)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FULL_GROUPS;

    fn small_config() -> CnnConfig {
        CnnConfig {
            groups: FULL_GROUPS[..3].to_vec(),
            ..CnnConfig::for_input_size(16, 9)
        }
    }

    #[test]
    fn build_produces_expected_output_width() {
        let model = build_model(&small_config()).unwrap();
        let image = AdjacencyMatrix::zero(16);
        let curve = predict(&model, &image).unwrap();
        assert_eq!(curve.len(), 15);
    }

    #[test]
    fn predictions_are_clamped() {
        let model = build_model(&small_config()).unwrap();
        let image = AdjacencyMatrix::zero(16);
        let curve = predict(&model, &image).unwrap();
        for &v in &curve {
            assert!(v >= 1.0 / 16.0 && v <= 1.0);
        }
    }

    #[test]
    fn predict_checks_sizes() {
        let model = build_model(&small_config()).unwrap();
        let image = AdjacencyMatrix::zero(17);
        match predict(&model, &image).unwrap_err() {
            CnnError::SizeMismatch { model_n, data_n } => {
                assert_eq!((model_n, data_n), (16, 17));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn embedding_columns_are_unit_length() {
        let model = build_model(&small_config()).unwrap();
        let Layer::Embed(e) = &model.network.layers[0] else {
            panic!("first layer must be the embedding");
        };
        let n = 16;
        for col in 0..n {
            let norm_sq: f64 = (0..n)
                .map(|row| e.matrix.data()[row * n + col].powi(2))
                .sum();
            assert!((norm_sq - 1.0).abs() < 1e-12, "column {col}: {norm_sq}");
        }
    }

    #[test]
    fn same_seed_same_model() {
        let a = build_model(&small_config()).unwrap();
        let b = build_model(&small_config()).unwrap();
        assert_eq!(a.network, b.network);
        let c = build_model(&CnnConfig {
            seed: 10,
            ..small_config()
        })
        .unwrap();
        assert_ne!(c.network, a.network);
    }

    #[test]
    fn model_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let mut model = build_model(&small_config()).unwrap();
        model.log.push(TrainLogEntry {
            epoch: 1,
            train_loss: 0.5,
            val_loss: 0.25,
        });
        save_model(&path, &model).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded.config, model.config);
        assert_eq!(loaded.network, model.network);
        assert_eq!(loaded.adam, model.adam);
        assert_eq!(loaded.log, model.log);
    }

    #[test]
    fn saves_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let model = build_model(&small_config()).unwrap();
        let a = dir.path().join("a.ckpt");
        let b = dir.path().join("b.ckpt");
        save_model(&a, &model).unwrap();
        save_model(&b, &model).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }
}
