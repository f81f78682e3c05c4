//! Particle-hole variational quantum eigensolver laboratory.
//!
//! The pipeline runs entirely on a classical statevector:
//!
//! 1. [`integrals`] reads FCIDUMP files and expands them to spin orbitals.
//! 2. [`fermion`] builds the second-quantized Hamiltonian and its
//!    normal-ordered particle-hole form around the Hartree-Fock determinant.
//! 3. [`qubit`] maps fermionic operators to Pauli sums (Jordan-Wigner).
//! 4. [`uccsd`] and [`heuristic`] build parametrized trial-state circuits that
//!    [`sim`] executes.
//! 5. [`vqe`] minimizes the energy with BFGS; [`oracle`] supplies exact
//!    diagonalization and dense-exponential UCCSD references.
//!
//! Conventions used throughout: spin orbital `2k` is spatial orbital `k` with
//! spin alpha and `2k + 1` is the beta partner; mode `j` is qubit `j`; bit `j`
//! of a basis-state index is the occupation of qubit `j`.

pub mod error;
pub mod fermion;
pub mod heuristic;
pub mod integrals;
pub mod oracle;
pub mod qubit;
pub mod sim;
pub mod uccsd;
pub mod vqe;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Chemical accuracy in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 5e-3;
