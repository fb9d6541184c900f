//! The `.dal` surface language: lexing, parsing, desugaring, and resolution.

pub mod ast;
pub mod desugar;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod resolve;
pub mod typed;

pub use error::{ModelError, ResolveError, SyntaxError};

/// Parses, desugars, and resolves a model in one go.
pub fn load(src: &str) -> Result<typed::TypedModel, ModelError> {
    let parsed = parser::parse_model(src)?;
    resolve::resolve(&desugar::desugar(&parsed)).map_err(ModelError::Resolve)
}
