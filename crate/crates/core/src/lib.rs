//! Exact computation of gradient Łojasiewicz exponents of weighted
//! (semi-)quasihomogeneous isolated singularities.

pub mod curves;
pub mod error;
pub mod exponent;
pub mod interval;
pub mod linalg;
pub mod localring;
pub mod poly;
pub mod reduce;
pub mod report;
pub mod saito5;
pub mod rational;
pub mod weights;

pub use error::{Error, Result};
pub use poly::{Exponent, Poly, UniPoly, WeightVector};
pub use rational::Q;
