//! Stability analysis and reconstruction for linearized near-field
//! (Fresnel) holography.
//!
//! All coordinates are dimensionless with the object support of diameter 1.
//! `f` denotes the Fresnel number and `fbar = f / 2π` its reduced form.

pub mod bounds;
pub mod ctf;
pub mod error;
pub mod field;
pub mod fresnel;
pub mod io;
pub mod phantom;
pub mod random;
pub mod recon;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
