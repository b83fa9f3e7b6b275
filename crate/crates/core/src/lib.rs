//! Structural and dynamical analysis of small mass-action reaction networks.
//!
//! The crate is `no_std` and only needs `alloc`. Exact structural work is done
//! over arbitrary-precision rationals; dynamics run in `f64`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
pub mod dense;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod hopf;
pub mod jacobian;
pub mod linalg;
pub mod network;
pub mod poly;
pub mod stoich;

pub use error::{Error, Result};
pub use network::{parse_network, parse_system, Complex, MassActionSystem, Rate, ReactionNetwork};

/// Exact rational scalar used for structural computations.
pub type Q = num_rational::BigRational;
