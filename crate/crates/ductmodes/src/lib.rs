//! Acoustic modes of a circular waveguide with locally reacting impedance
//! walls: transverse eigenvalues, Cremer-optimum impedances as exceptional
//! points, modal nonorthogonality metrics, and multimode sound power through
//! a rigid-to-lined junction.
//!
//! All lengths are in duct radii, frequencies are the dimensionless
//! `K = omega R / c0`, and the wall enters through the admittance
//! `beta0 = 1/Z0` via `Y = -j K beta0` (time convention `exp(+j omega t)`).

pub mod eigen;
pub mod ep;
pub mod junction;
pub mod nonortho;
pub mod power;
pub mod error;
pub mod special;
pub mod sweep;

pub use error::{Error, Result};
