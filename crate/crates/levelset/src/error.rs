use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] levelset_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
    #[error("{0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl ToString) -> Error {
        Error::Format {
            path: path.into(),
            msg: msg.to_string(),
        }
    }

    /// Process exit code: 2 for bad input or configuration, 3 for failures
    /// while running.
    pub fn exit_code(&self) -> u8 {
        use levelset_core::Error as E;
        match self {
            Error::Config(_) | Error::Format { .. } => 2,
            Error::Io { .. } => 3,
            Error::Core(e) => match e {
                E::DimensionMismatch { .. }
                | E::BrokenLayerChain { .. }
                | E::InvalidWindow(_)
                | E::InvalidArgument(_)
                | E::DecomposeUndefined { .. }
                | E::WidthExceeded { .. }
                | E::NonUniformWidth
                | E::NotSeparable { .. }
                | E::BceRequiresSigmoid => 2,
                _ => 3,
            },
        }
    }
}
