//! Symbolic expressions over phase-space symbols with exact rational
//! coefficients.

mod calculus;
mod display;
mod eval;
mod node;
mod parse;
mod rational;
mod symbol;

use thiserror::Error;

pub use calculus::{differentiate, simplify, substitute, total_time_derivative, Calculus, Substitution};
pub use eval::{evaluate, Bindings, Tape};
pub use node::{Expr, Func, Kind};
pub use parse::{parse_expr, ParseError};
pub use rational::Rational;
pub use symbol::{Coordinates, Symbol, SymbolKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("domain-error: `{subtree}` is undefined at this point")]
    Domain { subtree: Expr },
    #[error("non-finite input value")]
    NonFiniteInput,
    #[error("order-overflow: time derivative of an expression containing acceleration `{0}`")]
    OrderOverflow(String),
    #[error("expression mentions `{0}` and is not a function of coordinates and velocities")]
    NotVelocitySpace(String),
}
