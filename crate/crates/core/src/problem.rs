//! Loading an FCIDUMP (plus its JSON sidecar) into a ready-to-run problem.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fci::{exact_ground_energy, SpectrumRequest};
use crate::integrals::{build_fermionic_hamiltonian, MolecularIntegrals};
use crate::mapping::jordan_wigner;
use crate::pauli::PauliSum;
use crate::pool::{build_pool, OperatorPool};
use crate::statevector::{hartree_fock_state, Statevector};

/// Geometry and reference energies stored next to each fixture as `<stem>.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureMetadata {
    pub molecule: String,
    pub bond_length_angstrom: f64,
    #[serde(default)]
    pub basis: Option<String>,
    #[serde(default)]
    pub n_spatial_orbitals: Option<usize>,
    #[serde(default)]
    pub n_electrons: Option<usize>,
    #[serde(default)]
    pub nuclear_repulsion: Option<f64>,
    pub hf_energy: f64,
    #[serde(default)]
    pub fci_energy: Option<f64>,
}

pub fn sidecar_path(fcidump: &Path) -> PathBuf {
    fcidump.with_extension("json")
}

/// The sidecar for `fcidump`, or `None` when there is none.
pub fn load_metadata(fcidump: &Path) -> Result<Option<FixtureMetadata>> {
    let path = sidecar_path(fcidump);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(Some(serde_json::from_str(&text)?))
}

/// JW image of the full molecular Hamiltonian.
pub fn qubit_hamiltonian(integrals: &MolecularIntegrals) -> Result<PauliSum> {
    let fermionic = build_fermionic_hamiltonian(integrals);
    jordan_wigner(&fermionic, integrals.n_spin_orbitals())
}

pub struct Problem {
    pub integrals: MolecularIntegrals,
    pub hamiltonian: PauliSum,
    pub pool: OperatorPool,
    pub hf_state: Statevector,
    pub metadata: Option<FixtureMetadata>,
}

impl Problem {
    /// Hamiltonian, pool with precomputed commutators and HF state.
    pub fn from_integrals(integrals: MolecularIntegrals, metadata: Option<FixtureMetadata>) -> Result<Self> {
        let hamiltonian = qubit_hamiltonian(&integrals)?;
        let mut pool = build_pool(integrals.n_electrons(), integrals.n_spin_orbitals())?;
        pool.precompute_commutators(&hamiltonian)?;
        let hf_state = hartree_fock_state(integrals.n_spin_orbitals(), integrals.n_electrons())?;
        Ok(Problem {
            integrals,
            hamiltonian,
            pool,
            hf_state,
            metadata,
        })
    }

    pub fn load(fcidump: impl AsRef<Path>) -> Result<Self> {
        let path = fcidump.as_ref();
        let integrals = MolecularIntegrals::from_path(path)?;
        let metadata = load_metadata(path)?;
        Self::from_integrals(integrals, metadata)
    }

    pub fn n_qubits(&self) -> usize {
        self.integrals.n_spin_orbitals()
    }

    pub fn hf_energy(&self) -> Result<f64> {
        self.hf_state.energy(&self.hamiltonian.grouped())
    }

    /// Exact energy in the reference's electron-number and spin sector.
    pub fn fci_energy(&self) -> Result<f64> {
        exact_ground_energy(
            &SpectrumRequest::new(&self.hamiltonian)
                .in_sector(self.integrals.n_electrons(), self.integrals.ms2()),
        )
    }
}
