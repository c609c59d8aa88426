use thiserror::Error;

use crate::container::Channel;

/// Errors produced by the codec, container, decoders, and benchmark harness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input is not an L3 file (bad or missing magic bytes).
    #[error("unrecognized format: {0}")]
    UnrecognizedFormat(String),

    /// The header parsed but violates a structural invariant.
    #[error("corrupt header: {0}")]
    CorruptHeader(String),

    /// The bitstream contains a field value that no encoder can produce.
    #[error("corrupt stream: {0}")]
    CorruptStream(String),

    /// The bitstream ended before the declared content.
    #[error("truncated stream: {0}")]
    TruncatedStream(String),

    /// A patch failed to decode; identifies the channel and patch index.
    #[error("channel {channel} patch {index}: {source}")]
    PatchDecode {
        channel: Channel,
        index: usize,
        source: Box<Error>,
    },

    /// The input file or image is not in a supported form.
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    /// The requested capability was not compiled in.
    #[error("feature disabled: {0}")]
    FeatureDisabled(String),

    /// An I/O failure, with the offending path.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io(format!("{}: {err}", path.display()))
    }
}
