//! Upper bound on the click probability of a local detector as a function of
//! its dark-count probability, for a square-prism detector illuminated by a
//! normally incident single-mode coherent state.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`params`] reduces detector and beam parameters to a [`DimensionlessConfig`].
//! 2. [`bump`] tabulates the Fourier transforms of the smooth detector window.
//! 3. [`wightman`] integrates the boosted two-point function W₂(η) over momenta
//!    and caches it as a [`WightmanCurve`].
//! 4. [`errfun`] turns the curve into the approximation error E(ζ), and
//!    [`bound`] minimizes `[E(ζ) + exp(π²/2ζ) √P_dark]²` over ζ.

pub mod bump;
pub mod cli;
pub mod bound;
pub mod error;
pub mod errfun;
pub mod interp;
pub mod params;
pub mod quad;
pub mod selftest;
pub mod wightman;

pub use error::{Error, Result};
pub use params::{DimensionlessConfig, PhysicalSetup};
