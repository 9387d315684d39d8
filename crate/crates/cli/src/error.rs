use std::fmt;
use std::path::PathBuf;

use ris_vitals::{DspError, RisError, SceneError, StcError};
use thiserror::Error;

/// Pipeline stage an error is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Load,
    Validate,
    Synthesis,
    Dsp,
    Export,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Load => "load",
            Stage::Validate => "validate",
            Stage::Synthesis => "synthesis",
            Stage::Dsp => "dsp",
            Stage::Export => "export",
        })
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("[load] {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("[load] {origin}:{line}:{column}: {message}")]
    Syntax {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("[load] {origin}: field `{field}`: {message}")]
    Field {
        origin: String,
        field: String,
        message: String,
    },
    #[error("[validate] {invariant}")]
    Invalid { invariant: String },
    #[error("[{stage}] {source}")]
    Scene { stage: Stage, source: SceneError },
    #[error("[{stage}] {source}")]
    Ris { stage: Stage, source: RisError },
    #[error("[{stage}] {source}")]
    Stc { stage: Stage, source: StcError },
    #[error("[dsp] {label}: {source}")]
    Dsp { label: String, source: DspError },
    #[error("[export] {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn stage(&self) -> Stage {
        match self {
            HarnessError::Read { .. }
            | HarnessError::Syntax { .. }
            | HarnessError::Field { .. } => Stage::Load,
            HarnessError::Invalid { .. } => Stage::Validate,
            HarnessError::Scene { stage, .. }
            | HarnessError::Ris { stage, .. }
            | HarnessError::Stc { stage, .. } => *stage,
            HarnessError::Dsp { .. } => Stage::Dsp,
            HarnessError::Write { .. } => Stage::Export,
        }
    }

    pub(crate) fn invalid(invariant: impl Into<String>) -> Self {
        HarnessError::Invalid {
            invariant: invariant.into(),
        }
    }
}
