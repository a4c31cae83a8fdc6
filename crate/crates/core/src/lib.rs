//! Finite, computable models of torsor classification.
//!
//! The crate works entirely with finite data: groups by multiplication table,
//! lattices with integer matrix actions, cocycles enumerated on finite Galois
//! groups, inverse systems described by finite recipes, and abelian number
//! fields described by a conductor and a subgroup of units.

pub mod checks;
pub mod cohomology;
pub mod corpus;
pub mod error;
pub mod gamma;
pub mod group;
pub mod gset;
pub mod invsys;
pub mod lattice;
pub mod matrix;
pub mod numtheory;
pub mod poly;
pub mod scalar;
pub mod serre;
pub mod snf;
pub mod torsor;

pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupHom, GroupRef};
pub use scalar::IntScalar;

/// Unbounded integers, the default scalar.
pub type Int = num_bigint::BigInt;
pub type IntMatrix = matrix::Matrix<Int>;
pub type SmallMatrix = matrix::Matrix<i64>;
