//! The curve-prediction CNN: architecture assembly, training, inference,
//! and evaluation.
//!
//! The network reads an `N x N` adjacency image, densifies it through a
//! frozen random embedding, runs it through convolution groups (each a
//! same-padding convolution, a ReLU, and a stride-2 ceil-mode max pool),
//! flattens, and regresses the `N-1` curve values through two dense
//! layers. Spatial size halves (ceiling) at every group, so the group
//! count scales with `log2 N`.

pub mod config;
pub mod error;
pub mod eval;
pub mod model;
pub mod train;

pub use config::{CnnConfig, ConvGroup, ShapePlan};
pub use error::CnnError;
pub use eval::{evaluate, EvalCell, EvalReport};
pub use model::{build_model, load_model, predict, save_model, ModelState, TrainLogEntry};
pub use train::train;

pub type Result<T> = std::result::Result<T, CnnError>;
