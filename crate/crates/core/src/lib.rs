//! Characteristic polynomials and Whitney numbers of matroids and
//! c-arrangements, intrinsic volumes and Wills polynomials of zonotopes and
//! discotopes, arrangement extensions, and concentration experiments.

pub mod arrangement;
pub mod concentration;
pub mod convexbody;
pub mod error;
pub mod exactnum;
pub mod extensions;
pub mod limits;
pub mod linalg;
pub mod matroid;
pub mod rng;

pub use error::{Error, Result};
pub use exactnum::{Poly, Rational};

#[cfg(test)]
mod properties;
