//! Exact symbolic computation for graded quotient rings: Groebner bases,
//! Hilbert data, syzygies and stable-category invariants of maximal
//! Cohen-Macaulay modules, matrix factorizations, and linkage.
//!
//! Everything is computed over exact coefficients (arbitrary-precision
//! rationals or a prime field); there is no floating point and no
//! randomized correctness — randomness only steers searches whose results
//! are certified afterwards.

pub mod approx;
pub mod error;
pub mod experiments;
pub mod linkage;
pub mod etriangle;
pub mod mf;
pub mod trunc;
pub mod field;
pub mod monomial;
pub mod ring;
pub mod poly;
pub mod parse;
pub mod linalg;
pub mod vecelem;
pub mod witness;
pub mod groebner;
pub mod functors;
pub mod hilbert;
pub mod qring;
pub mod module;
pub mod resolution;

pub use error::{Error, Result};
