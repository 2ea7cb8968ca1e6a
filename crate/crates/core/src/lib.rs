//! Numerical renormalization of critical circle maps.
//!
//! The crate covers the arithmetic of rotation numbers ([`arith`]), the Arnold
//! and Blaschke families and their tuning ([`maps`]), critical commuting pairs
//! ([`pairs`]), dynamical partitions and real bounds ([`partitions`]),
//! asymptotically holomorphic extensions ([`complexext`]), first-order
//! quasiconformal solutions ([`qc`]) and experiment drivers ([`experiments`]).

pub mod arith;
pub mod complexext;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod maps;
pub mod pairs;
pub mod partitions;
pub mod qc;

pub use error::{Error, Result};
