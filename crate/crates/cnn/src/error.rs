use thiserror::Error;

#[derive(Debug, Error)]
pub enum CnnError {
    #[error(transparent)]
    Core(#[from] ctrlrob_core::CoreError),

    #[error(transparent)]
    Nn(#[from] ctrlrob_tensor_nn::NnError),

    #[error("model expects n = {model_n} but the data has n = {data_n}")]
    SizeMismatch { model_n: usize, data_n: usize },

    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),

    #[error("the {split} split is empty")]
    EmptySplit { split: &'static str },

    #[error("training aborted at epoch {epoch}, sample {sample}: {detail}")]
    TrainAbort {
        epoch: usize,
        sample: usize,
        detail: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
