//! Reaction-coordinate thermodynamics of open quantum systems.
//!
//! The crate maps a structured bath onto a reaction coordinate plus a
//! residual bath, builds secular and non-secular Markovian generators for
//! the enlarged system, and evaluates steady-state currents, power,
//! efficiency and entropy production. Two applications are provided: a
//! three-level maser and a single-electron transistor with a vibrational mode.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.

pub mod dword;
pub mod equilibrium;
pub mod error;
pub mod generators;
pub mod maser;
pub mod quad;
pub mod quantum_ops;
pub mod scalar;
pub mod set_vibrations;
pub mod spectral;
pub mod thermo;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type SpectralDensity64 = spectral::SpectralDensity<f64>;
pub type RcParameters64 = spectral::RcParameters<f64>;
pub type OperatorMatrix64 = quantum_ops::OperatorMatrix<f64>;
pub type GeneratorBundle64 = generators::GeneratorBundle<f64>;
pub type SteadyState64 = generators::SteadyState<f64>;
pub type Observables64 = thermo::Observables<f64>;
pub type MaserParams64 = maser::MaserParams<f64>;
pub type SetParams64 = set_vibrations::SetParams<f64>;
