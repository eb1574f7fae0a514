//! Exact computations for deformations of order-`p` automorphisms of `k[[T]]`.

pub mod arith;
pub mod artin_schreier;
pub mod automorphisms;
pub mod chebyshev;
pub mod cli;
pub mod cohomology;
pub mod deformations;
pub mod error;
pub mod linalg;
pub mod rings;
pub mod series;
pub mod suite;

pub use error::{Error, Result};
