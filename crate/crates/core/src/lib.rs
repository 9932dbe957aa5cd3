//! Exact Haar sampling on `GL_N` over `Z/mZ`, finite fields and finite local
//! rings, with exact corner-law counting and finite-`N` convergence diagnostics.

pub mod counting;
pub mod error;
pub mod io;
pub mod matrices;
pub mod rings;
pub mod rng;
pub mod sampling;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
