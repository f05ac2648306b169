//! Spectra of periodic quantum graphs on Archimedean tilings.
//!
//! Every edge carries the same even potential q on [0, a]. The band structure
//! then reduces to the interval quantities C, S, C', S' at x = a, and each
//! tiling's dispersion relation is a polynomial in S' with trigonometric
//! coefficients in the quasi-momentum.

pub mod characteristic;
pub mod dispersion;
pub mod eigenfunction;
pub mod error;
pub mod interval;
pub mod oracles;
pub mod periodic;
pub mod potential;
pub mod roots;
pub mod spectrum;
pub mod tiling;

pub use error::{Error, Result};
