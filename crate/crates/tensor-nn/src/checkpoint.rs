//! Versioned, checksummed binary checkpoints.
//!
//! Layout (all little-endian): magic, format version, config hash, the
//! layer list with parameter blobs (the frozen embedding travels with its
//! layer), optional Adam state, an opaque caller section, and a trailing
//! CRC32 over everything before it. Writing the same state twice yields
//! identical bytes.

use std::path::Path;

use crate::adam::{AdamConfig, AdamState};
use crate::layer::{Conv2d, Dense, Embedding, Layer, MaxPool};
use crate::net::Network;
use crate::tensor::Tensor;
use crate::{NnError, Result};

const MAGIC: [u8; 4] = *b"CTNN";
const VERSION: u16 = 1;

const TAG_EMBED: u8 = 0;
const TAG_CONV: u8 = 1;
const TAG_RELU: u8 = 2;
const TAG_POOL: u8 = 3;
const TAG_FLATTEN: u8 = 4;
const TAG_DENSE: u8 = 5;

/// A fully decoded checkpoint.
#[derive(Debug)]
pub struct Checkpoint {
    pub config_hash: u64,
    pub network: Network,
    pub adam: Option<AdamState>,
    /// Caller-owned payload (e.g. a serialized model config and training
    /// log); this module does not interpret it.
    pub extra: Vec<u8>,
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn tensor(&mut self, t: &Tensor) {
        self.u32(t.shape().len() as u32);
        for &d in t.shape() {
            self.u32(d as u32);
        }
        for &v in t.data() {
            self.f64(v);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(NnError::Checkpoint("unexpected end of file".into()));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn tensor(&mut self) -> Result<Tensor> {
        let rank = self.u32()? as usize;
        if rank > 8 {
            return Err(NnError::Checkpoint(format!("implausible tensor rank {rank}")));
        }
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(self.u32()? as usize);
        }
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(self.f64()?);
        }
        Tensor::from_vec(&shape, data)
            .map_err(|e| NnError::Checkpoint(format!("bad tensor payload: {e}")))
    }
}

fn encode(
    config_hash: u64,
    network: &Network,
    adam: Option<&AdamState>,
    extra: &[u8],
) -> Vec<u8> {
    let mut w = Writer { buf: Vec::new() };
    w.buf.extend_from_slice(&MAGIC);
    w.u16(VERSION);
    w.u64(config_hash);
    w.u32(network.layers.len() as u32);
    for layer in &network.layers {
        match layer {
            Layer::Embed(e) => {
                w.u8(TAG_EMBED);
                w.tensor(&e.matrix);
            }
            Layer::Conv(c) => {
                w.u8(TAG_CONV);
                w.tensor(&c.kernels);
                w.tensor(&c.bias);
            }
            Layer::Relu => w.u8(TAG_RELU),
            Layer::Pool(p) => {
                w.u8(TAG_POOL);
                w.u32(p.window as u32);
            }
            Layer::Flatten => w.u8(TAG_FLATTEN),
            Layer::Dense(d) => {
                w.u8(TAG_DENSE);
                w.tensor(&d.weight);
                w.tensor(&d.bias);
            }
        }
    }
    match adam {
        Some(state) => {
            w.u8(1);
            w.f64(state.config.lr);
            w.f64(state.config.beta1);
            w.f64(state.config.beta2);
            w.f64(state.config.eps);
            w.u64(state.step);
            w.u32(state.first.len() as u32);
            for t in state.first.iter().chain(state.second.iter()) {
                w.tensor(t);
            }
        }
        None => w.u8(0),
    }
    w.u32(extra.len() as u32);
    w.buf.extend_from_slice(extra);
    let crc = crc32fast::hash(&w.buf);
    w.u32(crc);
    w.buf
}

fn decode(bytes: &[u8]) -> Result<Checkpoint> {
    if bytes.len() < 4 {
        return Err(NnError::Checkpoint("file too short".into()));
    }
    let (payload, crc_bytes) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(crc_bytes.try_into().unwrap());
    let actual = crc32fast::hash(payload);
    if stored != actual {
        return Err(NnError::Checkpoint(format!(
            "checksum mismatch: stored {stored:08x}, computed {actual:08x}"
        )));
    }
    let mut r = Reader {
        buf: payload,
        pos: 0,
    };
    if r.take(4)? != MAGIC {
        return Err(NnError::Checkpoint("bad magic".into()));
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(NnError::Checkpoint(format!(
            "unsupported version {version} (this build reads {VERSION})"
        )));
    }
    let config_hash = r.u64()?;
    let layer_count = r.u32()? as usize;
    let mut layers = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let layer = match r.u8()? {
            TAG_EMBED => Layer::Embed(Embedding { matrix: r.tensor()? }),
            TAG_CONV => Layer::Conv(Conv2d {
                kernels: r.tensor()?,
                bias: r.tensor()?,
            }),
            TAG_RELU => Layer::Relu,
            TAG_POOL => Layer::Pool(MaxPool {
                window: r.u32()? as usize,
            }),
            TAG_FLATTEN => Layer::Flatten,
            TAG_DENSE => Layer::Dense(Dense {
                weight: r.tensor()?,
                bias: r.tensor()?,
            }),
            other => return Err(NnError::Checkpoint(format!("unknown layer tag {other}"))),
        };
        layers.push(layer);
    }
    let adam = if r.u8()? == 1 {
        let config = AdamConfig {
            lr: r.f64()?,
            beta1: r.f64()?,
            beta2: r.f64()?,
            eps: r.f64()?,
        };
        let step = r.u64()?;
        let count = r.u32()? as usize;
        let mut first = Vec::with_capacity(count);
        for _ in 0..count {
            first.push(r.tensor()?);
        }
        let mut second = Vec::with_capacity(count);
        for _ in 0..count {
            second.push(r.tensor()?);
        }
        Some(AdamState {
            config,
            step,
            first,
            second,
        })
    } else {
        None
    };
    let extra_len = r.u32()? as usize;
    let extra = r.take(extra_len)?.to_vec();
    if r.pos != payload.len() {
        return Err(NnError::Checkpoint("trailing bytes after payload".into()));
    }
    Ok(Checkpoint {
        config_hash,
        network: Network::new(layers),
        adam,
        extra,
    })
}

pub fn write_checkpoint(
    path: &Path,
    config_hash: u64,
    network: &Network,
    adam: Option<&AdamState>,
    extra: &[u8],
) -> Result<()> {
    std::fs::write(path, encode(config_hash, network, adam, extra))?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = std::fs::read(path)?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_network() -> Network {
        Network::new(vec![
            Layer::Embed(Embedding {
                matrix: Tensor::from_vec(&[2, 2], vec![0.1, 0.2, 0.3, 0.4]).unwrap(),
            }),
            Layer::Conv(Conv2d {
                kernels: Tensor::from_vec(&[1, 1, 1, 1], vec![0.5]).unwrap(),
                bias: Tensor::from_vec(&[1], vec![-0.25]).unwrap(),
            }),
            Layer::Relu,
            Layer::Pool(MaxPool { window: 2 }),
            Layer::Flatten,
            Layer::Dense(Dense {
                weight: Tensor::from_vec(&[2, 1], vec![1.0, -1.0]).unwrap(),
                bias: Tensor::from_vec(&[2], vec![0.0, 0.5]).unwrap(),
            }),
        ])
    }

    #[test]
    fn roundtrip_preserves_everything() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let net = sample_network();
        let shapes: Vec<&[usize]> = net.params().iter().map(|t| t.shape()).collect();
        let adam = AdamState::new(AdamConfig::default(), &shapes);
        write_checkpoint(&path, 0xfeed, &net, Some(&adam), b"hello").unwrap();

        let loaded = read_checkpoint(&path).unwrap();
        assert_eq!(loaded.config_hash, 0xfeed);
        assert_eq!(loaded.network, net);
        assert_eq!(loaded.adam.unwrap(), adam);
        assert_eq!(loaded.extra, b"hello");
    }

    #[test]
    fn writes_are_byte_identical() {
        let net = sample_network();
        let a = encode(1, &net, None, b"x");
        let b = encode(1, &net, None, b"x");
        assert_eq!(a, b);
    }

    #[test]
    fn corruption_is_detected() {
        let net = sample_network();
        let mut bytes = encode(7, &net, None, &[]);
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x01;
        assert!(matches!(decode(&bytes), Err(NnError::Checkpoint(_))));
    }

    #[test]
    fn version_gate() {
        let net = sample_network();
        let mut bytes = encode(7, &net, None, &[]);
        bytes[4] = 99; // version field
        // fix the crc so the version check itself fires
        let len = bytes.len();
        let crc = crc32fast::hash(&bytes[..len - 4]);
        bytes[len - 4..].copy_from_slice(&crc.to_le_bytes());
        let err = decode(&bytes).unwrap_err();
        assert!(err.to_string().contains("version"));
    }
}
