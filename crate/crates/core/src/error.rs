use thiserror::Error;

/// Pipeline stage that produced a numerical failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Synthesis,
    Dac,
    Lowpass,
    Mixer,
    Hpa,
    PhaseShifter,
    Channel,
    Rectenna,
    Power,
    Optimizer,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Synthesis => "synthesis",
            Stage::Dac => "dac",
            Stage::Lowpass => "lowpass",
            Stage::Mixer => "mixer",
            Stage::Hpa => "hpa",
            Stage::PhaseShifter => "phase-shifter",
            Stage::Channel => "channel",
            Stage::Rectenna => "rectenna",
            Stage::Power => "power",
            Stage::Optimizer => "optimizer",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure in {stage}: {message}")]
    Numerical { stage: Stage, message: String },
    #[error("grid of {points} points exceeds the limit of {limit}")]
    GridTooLarge { points: u128, limit: u128 },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn numerical(stage: Stage, message: impl Into<String>) -> Self {
        Error::Numerical {
            stage,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
