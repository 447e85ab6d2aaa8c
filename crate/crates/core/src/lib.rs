//! Lagrangian gauge structure tensors from first-class Hamiltonian
//! constraints, with a numeric verifier for the identity tower they satisfy.

mod error;
pub mod cli;
pub mod corpus;
pub mod expr;
pub mod hamilton;
pub mod lagrange;
pub mod legendre;
pub mod linalg;
pub mod model;
pub mod structure;
pub mod system;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
