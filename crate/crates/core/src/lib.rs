//! Classical statevector simulation of ADAPT-VQE and its reduced-density-matrix
//! variants (exact-RDM residuals, Valdemoro-reconstructed residuals, and the
//! screened/refined hybrid), with an exact-diagonalization reference and
//! variational quantum deflation for excited states.
//!
//! Spin orbitals are interleaved: spatial orbital `i` maps to `2i` (alpha) and
//! `2i + 1` (beta). Qubit `q` is bit `q` of a basis-state index.

pub mod adapt;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod integrals;
pub mod operators;
pub mod optimizer;
pub mod rdm;
pub mod spectra;
pub mod statevector;

pub use error::{Error, Result};
pub use num_complex::Complex64;


pub use integrals::{MolecularIntegrals, SpinHamiltonian};
pub use operators::{FermionOperator, OperatorPool, PauliSum, PoolKind};
pub use adapt::{AdaptConfig, AnsatzTrace, Convergence, Variant};
pub use rdm::Rdm;
pub use spectra::{EigenSolution, VqdConfig};
pub use statevector::State;



