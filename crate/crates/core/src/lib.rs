//! Toric ideals, factorization tests and maximum likelihood estimation for
//! discrete log-linear and undirected graphical models, in exact arithmetic.

pub mod error;
pub mod exact_arith;
pub mod factorization;
pub mod graph_analysis;
pub mod markov_ci;
pub mod mle;
pub mod model_core;
pub mod poly_engine;
pub mod toric;

pub use error::{Error, Result};
