//! Architecture hyperparameters and the shape plan they imply.

use ctrlrob_tensor_nn::{AdamConfig, LossKind};

use crate::{CnnError, Result};

/// One convolution group: kernel size, output channels, pool window.
/// Convolution stride is always 1 and pooling stride always 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvGroup {
    pub kernel: usize,
    pub channels: usize,
    pub pool: usize,
}

/// The full-scale seven-group stack. Scaled-down configurations use a
/// prefix of this list.
pub const FULL_GROUPS: [ConvGroup; 7] = [
    ConvGroup { kernel: 7, channels: 64, pool: 2 },
    ConvGroup { kernel: 5, channels: 64, pool: 2 },
    ConvGroup { kernel: 3, channels: 128, pool: 3 },
    ConvGroup { kernel: 3, channels: 128, pool: 3 },
    ConvGroup { kernel: 3, channels: 256, pool: 3 },
    ConvGroup { kernel: 3, channels: 256, pool: 3 },
    ConvGroup { kernel: 3, channels: 512, pool: 2 },
];

/// Complete description of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct CnnConfig {
    /// Input (and network) size `N`; the output layer has `N - 1` units.
    pub n: usize,
    pub groups: Vec<ConvGroup>,
    /// Width of the hidden dense layer between the flattened feature map
    /// and the output.
    pub fc2: usize,
    pub epochs: usize,
    pub loss: LossKind,
    pub adam: AdamConfig,
    /// Samples per optimizer step (gradients averaged); 1 by default.
    pub batch_size: usize,
    /// Seeds the frozen embedding and all parameter initialization.
    pub seed: u64,
}

/// Spatial bookkeeping of a config: the feature-map size after each
/// group and the flattened width feeding the dense layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapePlan {
    pub spatial: Vec<usize>,
    pub n_fc1: usize,
    pub output: usize,
}

/// Default group count for an input of size `n`:
/// `clamp(floor(log2 n) - 3, 3, 7)`. Larger inputs get deeper stacks.
pub fn default_group_count(n: usize) -> usize {
    let log2 = usize::BITS as usize - 1 - n.leading_zeros() as usize;
    log2.saturating_sub(3).clamp(3, 7)
}

/// Default hidden width: modest at desk scale, the full 4096 only for
/// inputs near the full-scale regime.
pub fn default_fc2(n: usize) -> usize {
    if n <= 128 {
        256
    } else if n <= 512 {
        1024
    } else {
        4096
    }
}

impl CnnConfig {
    /// Defaults for an input of size `n`.
    pub fn for_input_size(n: usize, seed: u64) -> Self {
        Self {
            n,
            groups: FULL_GROUPS[..default_group_count(n)].to_vec(),
            fc2: default_fc2(n),
            epochs: 10,
            loss: LossKind::L1,
            adam: AdamConfig::default(),
            batch_size: 1,
            seed,
        }
    }

    /// Spatial sizes through the stack: each group's pooling maps size
    /// `H` to `ceil(H / 2)`. Rejects configurations whose feature map
    /// collapses or whose widths are zero.
    pub fn shape_plan(&self) -> Result<ShapePlan> {
        if self.n < 2 {
            return Err(CnnError::InvalidConfig(format!(
                "input size must be at least 2, got {}",
                self.n
            )));
        }
        if self.groups.is_empty() {
            return Err(CnnError::InvalidConfig("no convolution groups".into()));
        }
        if self.fc2 == 0 {
            return Err(CnnError::InvalidConfig("fc2 must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(CnnError::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(CnnError::InvalidConfig("batch size must be at least 1".into()));
        }
        let mut spatial = Vec::with_capacity(self.groups.len());
        let mut size = self.n;
        for (idx, group) in self.groups.iter().enumerate() {
            if group.kernel % 2 == 0 || group.kernel == 0 {
                return Err(CnnError::InvalidConfig(format!(
                    "group {idx}: kernel size must be odd, got {}",
                    group.kernel
                )));
            }
            if group.pool != 2 && group.pool != 3 {
                return Err(CnnError::InvalidConfig(format!(
                    "group {idx}: pool window must be 2 or 3, got {}",
                    group.pool
                )));
            }
            if group.channels == 0 {
                return Err(CnnError::InvalidConfig(format!("group {idx}: zero channels")));
            }
            size = size.div_ceil(2);
            if size == 0 {
                return Err(CnnError::InvalidConfig(format!(
                    "feature map vanishes at group {idx}"
                )));
            }
            spatial.push(size);
        }
        let last_channels = self.groups.last().unwrap().channels;
        Ok(ShapePlan {
            n_fc1: size * size * last_channels,
            spatial,
            output: self.n - 1,
        })
    }

    /// Canonical flat text rendering; the config hash and the checkpoint
    /// payload both derive from it.
    pub fn canonical_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "n = {}", self.n);
        let groups: Vec<String> = self
            .groups
            .iter()
            .map(|g| format!("{}x{}:{}", g.kernel, g.channels, g.pool))
            .collect();
        let _ = writeln!(out, "groups = {}", groups.join(","));
        let _ = writeln!(out, "fc2 = {}", self.fc2);
        let _ = writeln!(out, "epochs = {}", self.epochs);
        let _ = writeln!(out, "loss = {}", self.loss);
        let _ = writeln!(out, "batch = {}", self.batch_size);
        let _ = writeln!(out, "lr = {}", self.adam.lr);
        let _ = writeln!(out, "beta1 = {}", self.adam.beta1);
        let _ = writeln!(out, "beta2 = {}", self.adam.beta2);
        let _ = writeln!(out, "eps = {}", self.adam.eps);
        let _ = writeln!(out, "seed = {}", self.seed);
        out
    }

    /// FNV-1a hash of the canonical text.
    pub fn config_hash(&self) -> u64 {
        fnv64(self.canonical_text().as_bytes())
    }

    /// Parse the canonical text back into a config.
    pub fn parse_canonical(text: &str) -> Result<Self> {
        let mut n = None;
        let mut groups = None;
        let mut fc2 = None;
        let mut epochs = None;
        let mut loss = None;
        let mut adam = AdamConfig::default();
        let mut batch_size = 1usize;
        let mut seed = None;
        let bad = |msg: String| CnnError::InvalidConfig(msg);
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| bad(format!("expected `key = value`, got `{line}`")))?;
            match key {
                "n" => n = Some(value.parse().map_err(|e| bad(format!("bad n: {e}")))?),
                "groups" => {
                    let mut parsed = Vec::new();
                    for part in value.split(',') {
                        let (kernel, rest) = part
                            .split_once('x')
                            .ok_or_else(|| bad(format!("bad group `{part}`")))?;
                        let (channels, pool) = rest
                            .split_once(':')
                            .ok_or_else(|| bad(format!("bad group `{part}`")))?;
                        parsed.push(ConvGroup {
                            kernel: kernel.parse().map_err(|e| bad(format!("bad kernel: {e}")))?,
                            channels: channels
                                .parse()
                                .map_err(|e| bad(format!("bad channels: {e}")))?,
                            pool: pool.parse().map_err(|e| bad(format!("bad pool: {e}")))?,
                        });
                    }
                    groups = Some(parsed);
                }
                "fc2" => fc2 = Some(value.parse().map_err(|e| bad(format!("bad fc2: {e}")))?),
                "epochs" => {
                    epochs = Some(value.parse().map_err(|e| bad(format!("bad epochs: {e}")))?)
                }
                "loss" => loss = Some(value.parse().map_err(bad)?),
                "batch" => {
                    batch_size = value.parse().map_err(|e| bad(format!("bad batch: {e}")))?
                }
                "lr" => adam.lr = value.parse().map_err(|e| bad(format!("bad lr: {e}")))?,
                "beta1" => adam.beta1 = value.parse().map_err(|e| bad(format!("bad beta1: {e}")))?,
                "beta2" => adam.beta2 = value.parse().map_err(|e| bad(format!("bad beta2: {e}")))?,
                "eps" => adam.eps = value.parse().map_err(|e| bad(format!("bad eps: {e}")))?,
                "seed" => seed = Some(value.parse().map_err(|e| bad(format!("bad seed: {e}")))?),
                other => return Err(bad(format!("unknown config key `{other}`"))),
            }
        }
        Ok(Self {
            n: n.ok_or_else(|| bad("missing n".into()))?,
            groups: groups.ok_or_else(|| bad("missing groups".into()))?,
            fc2: fc2.ok_or_else(|| bad("missing fc2".into()))?,
            epochs: epochs.ok_or_else(|| bad("missing epochs".into()))?,
            loss: loss.ok_or_else(|| bad("missing loss".into()))?,
            adam,
            batch_size,
            seed: seed.ok_or_else(|| bad("missing seed".into()))?,
        })
    }
}

pub(crate) fn fnv64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
