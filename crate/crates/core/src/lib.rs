//! Exact computations with Lagrangian subspaces of the third exterior power of a
//! six-dimensional space, their EPW stratifications, and the Gushel-Mukai
//! varieties attached to them.

pub mod correspondences;
pub mod epw;
pub mod error;
pub mod exterior;
pub mod fibers;
pub mod field;
pub mod fixtures;
pub mod format;
pub mod gm;
pub mod ideal;
pub mod lagrangian;
pub mod linalg;
pub mod poly;
pub mod projective;
pub mod properties;
pub mod verify;

pub use error::{Error, Result};
