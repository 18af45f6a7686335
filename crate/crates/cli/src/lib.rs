//! Interchange format, diagram emission and batch checks for the
//! `openbook-kit` command line tool.

pub mod check;
pub mod format;
pub mod render;

pub use format::{emit, parse, Document, FormatError};
