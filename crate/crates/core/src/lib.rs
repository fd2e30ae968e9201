//! Exact computations for depth-zero Bernstein blocks of reductive p-adic groups.

#![allow(clippy::needless_range_loop)]

pub mod affine_weyl;
pub mod cyclotomic;
pub mod error;
pub mod extensions;
pub mod finite_field;
pub mod finite_oracle;
pub mod graded;
pub mod hecke;
pub mod intmat;
pub mod qz;
pub mod rootdata;
pub mod stabilizers;
pub mod twisted_group_alg;

pub use error::{Error, Result};
