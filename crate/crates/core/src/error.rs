use thiserror::Error;

use crate::aae::AaeError;
use crate::codec::CodecError;
use crate::gp::GpError;
use crate::optics::OpticsError;
use crate::pipeline::PipelineError;
use crate::spectra::SpectrumError;

/// Crate-level error wrapping the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Aae(#[from] AaeError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for failures of the numerics (divergence, conditioning) as
    /// opposed to bad inputs or files.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Aae(AaeError::NonFinite { .. }) | Error::Gp(GpError::Conditioning { .. })
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
