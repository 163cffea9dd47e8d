//! Simulator and diagnostics for the compressible Euler system with linear
//! damping and nonlocal matrix-kernel velocity alignment on a periodic torus.
//!
//! The crate evolves either the primitive variables `(rho, u)` or the
//! sound-speed variables `(sigma, u)`, builds the successive-approximation
//! (Picard) sequence of frozen-coefficient linear systems, and evaluates the
//! energy functionals of the small-data theory along computed trajectories.

pub mod diagnostics;
pub mod dynamics;
pub mod eos;
pub mod error;
pub(crate) mod fft;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod picard;

pub mod cli;

pub use error::{Error, Result};
