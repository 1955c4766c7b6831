// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! The cohort query language.
//!
//! ```text
//! SELECT item (, item)* FROM table
//!   [BIRTH FROM action = "e" [AND pred]]
//!   [AGE ACTIVITIES IN pred]
//! COHORT BY attr (, attr)*
//! ```
//!
//! The birth clause is required; the two clauses may come in either order.
//! Keywords are case-insensitive, identifiers are not.

mod ast;
mod lexer;
mod parser;
mod validate;

use thiserror::Error;

pub use ast::{ClauseOrder, Expr, Literal, QuerySpec, SelectItem, Term};
pub use parser::parse;
pub use validate::{validate, BoundQuery, OutputColumn, OutputKind, ValidationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at position {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the query text.
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError {
            position,
            message: message.into(),
        }
    }
}
