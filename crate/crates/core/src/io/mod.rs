//! Text format, random generation and Graphviz output.

mod dot;
mod format;
mod generate;

pub use dot::microstructure_dot;
pub(crate) use dot::quote;
pub use format::{emit, emit_constraint, parse, ParseError};
pub use generate::{generate, ModelError, RandomModel};
