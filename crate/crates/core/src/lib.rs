//! Eckart and deformed Hulthén potentials: closed-form spectra and
//! wavefunctions, the supersymmetric hierarchy, rationally extended
//! partners, and an independent numerical oracle to check them against.

pub mod cli;
pub mod coth;
pub mod eckart;
pub mod error;
pub mod extensions;
pub mod hulthen;
pub mod oracle;
pub mod output;
pub mod specfun;
pub mod susy;
pub mod verify;

pub use error::{Error, Result};
