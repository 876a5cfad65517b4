//! Thermal relaxation of Markovian open quantum systems.
//!
//! Builds detailed-balance Lindbladians for a system coupled to one bosonic
//! bath, spectrally decomposes them into biorthonormal eigenmode pairs, and
//! quantifies the irreversibility of heating and cooling protocols: exact and
//! mode-expanded entropy production rates, dynamical activity, the
//! TUR/KUR/TKUR bound chain, and quantum-jump Monte Carlo heat statistics.
//!
//! All numerics are generic over the real scalar through [`scalar::Real`];
//! `f64` aliases are exported at the crate root and are what the CLI and the
//! test suites use.

pub mod cmat;
pub mod dynamics;
pub mod eig;
pub mod error;
pub mod hilbert;
pub mod liouvillian;
pub mod qubit_oracle;
pub mod scalar;
pub mod spectral;
pub mod thermo;
pub mod trajectories;

pub use error::{Error, Result};
pub use scalar::Real;

/// Complex scalar over `f64`, the default working precision.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix over `f64`.
pub type Mat64 = cmat::CMat<f64>;

pub use hilbert::{BathSpec, DensityMatrix, HermitianOperator, InverseTemperature};
pub use liouvillian::{JumpOperatorSpec, SuperOperator, System, ThermalScenario};
pub use spectral::{ModeClass, ModeDecomposition, SpectralData};
