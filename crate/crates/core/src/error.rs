use thiserror::Error;

use crate::selection::SelectionSchema;

/// Errors raised by the model, the operators and the closed-form evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EdaError {
    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A construction parameter (problem size, population size, ...) is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operator produced a distribution whose mass drifted away from 1.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    /// No drift formula exists for this schema.
    #[error("unsupported selection schema for this operation: {0:?}")]
    UnsupportedSchema(SelectionSchema),
}

pub type Result<T> = std::result::Result<T, EdaError>;
