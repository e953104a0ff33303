//! Exit-code policy: 0 success, 2 usage, 3 I/O, 4 validation,
//! 5 numerical failure.

use ctrlrob_cnn::CnnError;
use ctrlrob_core::CoreError;
use ctrlrob_tensor_nn::NnError;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: err.to_string(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let code = match &err {
            CoreError::Io(_) => EXIT_IO,
            CoreError::NonFiniteEntry { .. } | CoreError::DensityUnreachable { .. } => {
                EXIT_NUMERICAL
            }
            _ => EXIT_VALIDATION,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

impl From<NnError> for CliError {
    fn from(err: NnError) -> Self {
        let code = match &err {
            NnError::Io(_) => EXIT_IO,
            NnError::NonFinite(_) | NnError::NonFiniteLoss(_) | NnError::NonFiniteGradient { .. } => {
                EXIT_NUMERICAL
            }
            _ => EXIT_VALIDATION,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

impl From<CnnError> for CliError {
    fn from(err: CnnError) -> Self {
        match err {
            CnnError::Core(e) => e.into(),
            CnnError::Nn(e) => e.into(),
            CnnError::Io(e) => e.into(),
            CnnError::TrainAbort { .. } => Self {
                code: EXIT_NUMERICAL,
                message: err.to_string(),
            },
            other => Self {
                code: EXIT_VALIDATION,
                message: other.to_string(),
            },
        }
    }
}
