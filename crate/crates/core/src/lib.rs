//! K-ADAPT-VQE: adaptive variational ground-state search that grows the
//! ansatz by chunks of `k` excitation operators per step, on an exact
//! statevector simulator with exact-diagonalization references.
//!
//! Pipeline: [`integrals`] parses FCIDUMP files and builds the fermionic
//! Hamiltonian, [`mapping`] encodes it on qubits, [`pool`] builds the screened
//! double-excitation pool, [`adapt`] drives the chunked growth using
//! [`statevector`] and [`optimizer`], and [`fci`] supplies exact references.

pub mod adapt;
pub mod cli;
pub mod error;
pub mod fci;
pub mod fermion;
pub mod integrals;
pub mod mapping;
pub mod optimizer;
pub mod pauli;
pub mod pool;
pub mod problem;
pub mod statevector;

pub use error::{Error, Result};
