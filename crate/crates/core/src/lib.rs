//! Spectral analysis of PT-symmetric vector-model Hamiltonians.
//!
//! Two models are covered:
//!
//! - the E3 particle on a unit sphere, `h = L² + i g cos θ`, discretized for a
//!   fixed azimuthal index `m` in a normalized associated-Legendre basis
//!   ([`legendre`], [`e3`]);
//! - a finite-dimensional SO(3) model `H = L² + V_z` on two adjacent multiplets
//!   `ℓ` and `ℓ+1`, whose perturbation is fixed by a non-Hermitian form of the
//!   Wigner–Eckart theorem ([`wigner_eckart`], [`so3`]).
//!
//! Complex spectra come from a dense Schur solver in [`eigen`]; parity and
//! antilinear time reversal live in [`symmetry`]; [`sweep`] holds the
//! serializable sweep records used by the command-line front end.

pub mod e3;
pub mod eigen;
mod error;
pub mod legendre;
pub mod so3;
pub mod sweep;
pub mod symmetry;
pub mod wigner_eckart;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Dense complex matrix used for every Hamiltonian and operator in the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;

pub use e3::{E3Hamiltonian, TransitionPoint};
pub use eigen::{Classification, Spectrum};
pub use legendre::{EtaMatrix, LegendreBasis};
pub use so3::{AnalyticPair, BlockModel, CouplingMode};
pub use sweep::SweepResult;
pub use symmetry::{Parity, TimeReversal};
pub use wigner_eckart::{MultipletSpace, ReducedElements, StateLabel};
