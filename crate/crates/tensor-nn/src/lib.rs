//! Minimal deep-learning engine for curve regression.
//!
//! Exactly the six layer kinds the predictor needs (a frozen embedding,
//! same-padding convolution, ReLU, ceil-mode max pooling, flatten, and
//! dense), reverse-mode gradients for all of them, the curve loss, and a
//! standard bias-corrected Adam optimizer. Everything computes in 64-bit
//! floats.
//!
//! Determinism contract: a forward or backward pass is a pure function of
//! its inputs. Inner loops are parallelized only across independent
//! output slices (channels, rows), and every floating-point reduction has
//! a fixed combination order, so results do not depend on thread count.

pub mod adam;
pub mod checkpoint;
pub mod error;
mod kernels;
pub mod layer;
pub mod loss;
pub mod net;
pub mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use error::NnError;
pub use layer::{Conv2d, Dense, Embedding, Layer, MaxPool};
pub use loss::LossKind;
pub use net::{Gradients, Network};
pub use tensor::Tensor;

pub type Result<T> = std::result::Result<T, NnError>;
