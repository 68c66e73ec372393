//! A small real-expression language: polynomials, quotients, integer powers,
//! the cubic smoothstep and square roots, with exact symbolic derivatives and
//! a compiled stack evaluator.

mod ast;
mod parse;
mod tape;

pub use ast::{smoothstep_derivative, Expr};
pub use parse::{parse, ParseError};
pub use tape::{Derivatives, EvalError, Tape};

/// Names `prefix1 … prefixK`.
pub fn var_names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}
