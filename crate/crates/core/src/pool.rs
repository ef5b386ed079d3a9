//! Spin-conserving double-excitation pool built on the Hartree–Fock filling.
//!
//! Occupied spin-orbitals are `0..n_electrons`; everything above is virtual.
//! Singles and occupied→occupied or virtual→virtual hops are never generated.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermion::FermionOperator;
use crate::integrals::{spin_of, Spin};
use crate::mapping::{excitation_rotation_factors, jordan_wigner, RotationFactor};
use crate::pauli::{GroupedPauliSum, Pauli, PauliSum, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinCategory {
    /// One ↑ and one ↓ electron move.
    MixedSpin,
    /// Both electrons share a spin.
    SameSpin,
}

/// `G = a†_s a†_r a_q a_p − h.c.` for occupied `p < q` and virtual `r < s`.
#[derive(Clone, Debug)]
pub struct ExcitationOperator {
    occ: (usize, usize),
    virt: (usize, usize),
    label: String,
    generator: FermionOperator,
    qubit_image: PauliSum,
    rotation_factors: Vec<RotationFactor>,
    commutator_with_h: Option<PauliSum>,
    grouped_commutator: Option<GroupedPauliSum>,
}

impl ExcitationOperator {
    pub fn new(n_qubits: usize, occ: (usize, usize), virt: (usize, usize)) -> Result<Self> {
        let (p, q) = occ;
        let (r, s) = virt;
        if !(p < q && r < s) {
            return Err(Error::NotDoubleExcitation(format!(
                "indices must satisfy p<q, r<s, got ({p},{q})->({r},{s})"
            )));
        }
        if p == r || p == s || q == r || q == s {
            return Err(Error::NotDoubleExcitation(format!(
                "occupied and virtual indices overlap in ({p},{q})->({r},{s})"
            )));
        }
        let one = Complex64::new(1.0, 0.0);
        let mut excite = FermionOperator::zero(n_qubits);
        excite.push(one, vec![(s, true), (r, true), (q, false), (p, false)])?;
        let generator = excite.sub(&excite.adjoint())?;
        let qubit_image = jordan_wigner(&generator, n_qubits)?;
        let rotation_factors = excitation_rotation_factors(&qubit_image)?;
        Ok(ExcitationOperator {
            occ,
            virt,
            label: format!("D[{p},{q}->{r},{s}]"),
            generator,
            qubit_image,
            rotation_factors,
            commutator_with_h: None,
            grouped_commutator: None,
        })
    }

    pub fn occ(&self) -> (usize, usize) {
        self.occ
    }

    pub fn virt(&self) -> (usize, usize) {
        self.virt
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `(p, q, r, s)`; the pool's canonical ordering compares these tuples.
    pub fn indices(&self) -> (usize, usize, usize, usize) {
        (self.occ.0, self.occ.1, self.virt.0, self.virt.1)
    }

    pub fn generator(&self) -> &FermionOperator {
        &self.generator
    }

    pub fn qubit_image(&self) -> &PauliSum {
        &self.qubit_image
    }

    pub fn rotation_factors(&self) -> &[RotationFactor] {
        &self.rotation_factors
    }

    pub fn commutator_with_h(&self) -> Option<&PauliSum> {
        self.commutator_with_h.as_ref()
    }

    pub(crate) fn grouped_commutator(&self) -> Result<&GroupedPauliSum> {
        self.grouped_commutator
            .as_ref()
            .ok_or_else(|| Error::MissingCommutator(self.label.clone()))
    }

    pub fn category(&self) -> SpinCategory {
        if spin_of(self.occ.0) == spin_of(self.occ.1) {
            SpinCategory::SameSpin
        } else {
            SpinCategory::MixedSpin
        }
    }

    /// The four qubits carrying X or Y, ascending.
    pub fn support_qubits(&self) -> Vec<usize> {
        let mut v = vec![self.occ.0, self.occ.1, self.virt.0, self.virt.1];
        v.sort_unstable();
        v
    }

    /// Qubits carrying a parity Z in the factor strings, ascending.
    pub fn z_string_qubits(&self) -> Vec<usize> {
        let Some(first) = self.rotation_factors.first() else {
            return Vec::new();
        };
        (0..first.string.n_qubits())
            .filter(|&k| first.string.pauli_at(k) == Pauli::Z)
            .collect()
    }

    fn set_commutator(&mut self, h: &PauliSum) -> Result<()> {
        let comm = self.qubit_image.commutator(h)?;
        self.grouped_commutator = Some(comm.grouped());
        self.commutator_with_h = Some(comm);
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct OperatorPool {
    operators: Vec<ExcitationOperator>,
    n_qubits: usize,
    n_electrons: usize,
}

fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Closed-form pool size `o↑o↓v↑v↓ + C(o↑,2)C(v↑,2) + C(o↓,2)C(v↓,2)`.
pub fn expected_pool_size(n_electrons: usize, n_spin_orbitals: usize) -> usize {
    let occ_up = (n_electrons + 1) / 2;
    let occ_down = n_electrons / 2;
    let virt_up = (n_spin_orbitals + 1) / 2 - occ_up;
    let virt_down = n_spin_orbitals / 2 - occ_down;
    occ_up * occ_down * virt_up * virt_down
        + choose2(occ_up) * choose2(virt_up)
        + choose2(occ_down) * choose2(virt_down)
}

pub fn build_pool(n_electrons: usize, n_spin_orbitals: usize) -> Result<OperatorPool> {
    if n_electrons % 2 == 1 {
        return Err(Error::UnsupportedConfiguration(format!(
            "{n_electrons} electrons: restricted reference needs an even count"
        )));
    }
    if n_electrons >= n_spin_orbitals {
        return Err(Error::UnsupportedConfiguration(format!(
            "{n_electrons} electrons leave no virtual orbitals among {n_spin_orbitals}"
        )));
    }
    if n_spin_orbitals > MAX_QUBITS {
        return Err(Error::TooManyQubits(n_spin_orbitals));
    }
    let mut labels = Vec::new();
    for p in 0..n_electrons {
        for q in p + 1..n_electrons {
            for r in n_electrons..n_spin_orbitals {
                for s in r + 1..n_spin_orbitals {
                    let mut occ_spins = [spin_of(p), spin_of(q)];
                    let mut virt_spins = [spin_of(r), spin_of(s)];
                    occ_spins.sort_by_key(|s| matches!(s, Spin::Down));
                    virt_spins.sort_by_key(|s| matches!(s, Spin::Down));
                    if occ_spins == virt_spins {
                        labels.push(((p, q), (r, s)));
                    }
                }
            }
        }
    }
    let operators = labels
        .into_par_iter()
        .map(|(occ, virt)| ExcitationOperator::new(n_spin_orbitals, occ, virt))
        .collect::<Result<Vec<_>>>()?;
    Ok(OperatorPool {
        operators,
        n_qubits: n_spin_orbitals,
        n_electrons,
    })
}

impl OperatorPool {
    pub fn operators(&self) -> &[ExcitationOperator] {
        &self.operators
    }

    pub fn get(&self, index: usize) -> Option<&ExcitationOperator> {
        self.operators.get(index)
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn count(&self, category: SpinCategory) -> usize {
        self.operators.iter().filter(|o| o.category() == category).count()
    }

    /// Stores `[G_j, H]` on every operator. Re-running with the same `h` is a no-op in effect.
    pub fn precompute_commutators(&mut self, h: &PauliSum) -> Result<()> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: h.n_qubits(),
            });
        }
        self.operators
            .par_iter_mut()
            .try_for_each(|op| op.set_commutator(h))
    }

    pub fn has_commutators(&self) -> bool {
        self.operators.iter().all(|o| o.grouped_commutator.is_some())
    }

    pub fn summary(&self) -> PoolSummary {
        PoolSummary {
            n_qubits: self.n_qubits,
            n_electrons: self.n_electrons,
            size: self.len(),
            mixed_spin: self.count(SpinCategory::MixedSpin),
            same_spin: self.count(SpinCategory::SameSpin),
            operators: self
                .operators
                .iter()
                .map(|o| OperatorSummary {
                    label: o.label.clone(),
                    occ: o.occ,
                    virt: o.virt,
                    category: o.category(),
                    n_strings: o.qubit_image.len(),
                    support: o.support_qubits(),
                    z_string: o.z_string_qubits(),
                    commutator_strings: o.commutator_with_h.as_ref().map(PauliSum::len),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorSummary {
    pub label: String,
    pub occ: (usize, usize),
    pub virt: (usize, usize),
    pub category: SpinCategory,
    pub n_strings: usize,
    pub support: Vec<usize>,
    pub z_string: Vec<usize>,
    pub commutator_strings: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoolSummary {
    pub n_qubits: usize,
    pub n_electrons: usize,
    pub size: usize,
    pub mixed_spin: usize,
    pub same_spin: usize,
    pub operators: Vec<OperatorSummary>,
}
