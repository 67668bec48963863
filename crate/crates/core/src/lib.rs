//! Coherent and su(1,1) generalized coherent operators on truncated Fock spaces.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coherent;
pub mod error;
pub mod fock;
pub mod quadrature;
pub mod schwinger;
pub mod special;
pub mod su11;

pub use error::{Error, Result};
pub use fock::{ComplexMatrix, SafeSector, SpaceKind, SpinWeight, TruncatedSpace, UnitaryResult};
