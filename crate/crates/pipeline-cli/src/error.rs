use std::fmt;

/// Pipeline failures, split by exit code: configuration problems exit 2,
/// numeric failures exit 3, I/O and everything else exit 1.
#[derive(Debug)]
pub enum PipelineError {
    /// Bad flags, config files, or input file contents.
    Config(String),
    /// A numeric stage failed (factorization, fit, non-finite values).
    Numeric(String),
    Io(std::io::Error),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Numeric(_) => 3,
            PipelineError::Io(_) => 1,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        PipelineError::Config(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        PipelineError::Numeric(msg.into())
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Config(m) => write!(f, "configuration error: {m}"),
            PipelineError::Numeric(m) => write!(f, "numeric failure: {m}"),
            PipelineError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for PipelineError {}

impl From<std::io::Error> for PipelineError {
    fn from(e: std::io::Error) -> Self {
        PipelineError::Io(e)
    }
}

impl From<plume_core::PlumeError> for PipelineError {
    fn from(e: plume_core::PlumeError) -> Self {
        match e {
            plume_core::PlumeError::Io(io) => PipelineError::Io(io),
            plume_core::PlumeError::Format(m) => PipelineError::Config(format!("dataset: {m}")),
            other => PipelineError::Numeric(other.to_string()),
        }
    }
}

impl From<preprocess::PreprocessError> for PipelineError {
    fn from(e: preprocess::PreprocessError) -> Self {
        match &e {
            preprocess::PreprocessError::InvalidParameter(_)
            | preprocess::PreprocessError::NonPositiveCellVolume(_)
            | preprocess::PreprocessError::UnitsMismatch { .. }
            | preprocess::PreprocessError::EmptyInput => PipelineError::Config(e.to_string()),
            _ => PipelineError::Numeric(e.to_string()),
        }
    }
}

impl From<eof::EofError> for PipelineError {
    fn from(e: eof::EofError) -> Self {
        match &e {
            eof::EofError::Io(_) | eof::EofError::Format(_) => {
                PipelineError::Config(e.to_string())
            }
            _ => PipelineError::Numeric(e.to_string()),
        }
    }
}

impl From<cvae::CvaeError> for PipelineError {
    fn from(e: cvae::CvaeError) -> Self {
        match &e {
            cvae::CvaeError::InvalidArchitecture(_)
            | cvae::CvaeError::InvalidConfig(_)
            | cvae::CvaeError::Format(_) => PipelineError::Config(e.to_string()),
            cvae::CvaeError::Io(io) => PipelineError::Config(format!("checkpoint i/o: {io}")),
            _ => PipelineError::Numeric(e.to_string()),
        }
    }
}

impl From<gp::GpError> for PipelineError {
    fn from(e: gp::GpError) -> Self {
        PipelineError::Numeric(e.to_string())
    }
}

impl From<synth::SynthError> for PipelineError {
    fn from(e: synth::SynthError) -> Self {
        PipelineError::Config(e.to_string())
    }
}
