//! Constructive recognition and constructive membership for the small Ree
//! groups Ree(q), q = 3^(2m+1), acting in their natural 7-dimensional
//! representation, together with the exact algebra they need: arithmetic in
//! F_q, dense linear algebra, straight-line programs, and random element
//! generation.
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion CLI
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod conjugacy;
pub mod error;
pub mod f3;
pub mod field;
pub mod linalg;
pub mod membership;
pub(crate) mod poly;
pub mod psl2;
pub mod randgen;
pub mod slp;
pub mod stabilizer;
pub mod standard;

pub use error::{Error, Result};
