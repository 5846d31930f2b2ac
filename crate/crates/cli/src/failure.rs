use std::fmt;

use ontosub::corpus::CorpusError;
use ontosub::eval::EvalError;
use ontosub::io::IoError;
use ontosub::sampling::SamplingError;
use ontosub::scorer::ScorerError;
use ontosub::templates::TemplateError;
use ontosub::verbalizer::VerbalizeError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Input,
    Internal,
}

/// Terminal error of a command, printed as one JSON line on stderr.
#[derive(Debug, Serialize)]
pub struct Failure {
    pub class: Class,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn input(kind: &'static str, message: impl fmt::Display) -> Self {
        Self { class: Class::Input, kind, message: message.to_string() }
    }

    pub fn internal(kind: &'static str, message: impl fmt::Display) -> Self {
        Self { class: Class::Internal, kind, message: message.to_string() }
    }

    pub fn exit_code(&self) -> u8 {
        match self.class {
            Class::Input => 1,
            Class::Internal => 2,
        }
    }

    pub fn to_line(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            error: &'a Failure,
            exit_code: u8,
        }
        serde_json::to_string(&Record { error: self, exit_code: self.exit_code() })
            .unwrap_or_else(|_| format!("{{\"error\":{{\"message\":{:?}}}}}", self.message))
    }
}

impl From<IoError> for Failure {
    fn from(err: IoError) -> Self {
        let kind = match err {
            IoError::MalformedTriple { .. } => "malformed_triple",
            IoError::SchemaViolation { .. } => "schema_violation",
            IoError::Io(_) => "io",
        };
        Failure::input(kind, err)
    }
}

impl From<SamplingError> for Failure {
    fn from(err: SamplingError) -> Self {
        let kind = match err {
            SamplingError::EmptyNegativePool(_) => "empty_negative_pool",
            SamplingError::UnknownClass(_) => "unknown_class",
            SamplingError::InvalidSplit(_) => "invalid_split",
            SamplingError::KindMismatch(_) => "kind_mismatch",
            SamplingError::Format { .. } => "format",
        };
        Failure::input(kind, err)
    }
}

impl From<CorpusError> for Failure {
    fn from(err: CorpusError) -> Self {
        match err {
            CorpusError::Sampling(e) => e.into(),
            other => Failure::input("invalid_config", other),
        }
    }
}

impl From<ScorerError> for Failure {
    fn from(err: ScorerError) -> Self {
        match err {
            ScorerError::ScorerUnavailable { .. } => Failure::input("scorer_unavailable", err),
            ScorerError::ProtocolError(_) => Failure::internal("protocol_error", err),
        }
    }
}

impl From<VerbalizeError> for Failure {
    fn from(err: VerbalizeError) -> Self {
        Failure::input("no_label", err)
    }
}

impl From<TemplateError> for Failure {
    fn from(err: TemplateError) -> Self {
        match err {
            TemplateError::NoLabel(_) => Failure::input("no_label", err),
            TemplateError::Hierarchy(_) => Failure::input("unknown_class", err),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(err: EvalError) -> Self {
        match err {
            EvalError::Scorer(e) => e.into(),
            EvalError::Template { source, case } => {
                let mut f = Failure::from(source);
                f.message = format!("case {case}: {}", f.message);
                f
            }
            EvalError::NoPairs { .. } => Failure::input("no_pairs", err),
        }
    }
}
