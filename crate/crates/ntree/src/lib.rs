//! Newton trees for polynomials `f(x1, ..., xd, z)` over the rationals.

pub mod polyring;
mod univariate;
mod zpoly;

pub use polyring::{ExpVec, MonomialMap, PolyError, Rat, SparsePoly};
pub mod diagram;
pub mod error;
pub mod process;

pub use error::{Error, Result};
pub mod analysis;
pub mod pgood;
pub mod sections;
pub mod tree;
