//! Numerical laboratory for fractal self-similarity and its coherent-state
//! description: Koch and logarithmic-spiral geometry, q-deformed coherent
//! states on truncated Fock spaces, the doubled damped/amplified oscillator
//! and its two-mode SU(1,1) quantum evolution, and the induced
//! noncommutative plane.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dissipative;
pub mod error;
pub mod fock;
pub mod geometry;
pub mod golden;
pub mod linalg;
pub mod ncplane;
pub mod quadrature;
pub mod selfsim;
pub mod spiral;
pub mod verify;

pub use error::{Error, Result};
