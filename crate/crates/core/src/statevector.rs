//! Dense double-precision statevector. Basis index bit `k` is qubit `k`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pauli::{i_pow, GroupedPauliSum, PauliSum, PauliTerm, XGroup};
use crate::pool::ExcitationOperator;

/// Largest register the simulator will allocate.
pub const MAX_SIMULATED_QUBITS: usize = 26;

const UNIT_TOL: f64 = 1e-12;
const REAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// The computational basis state `|index⟩`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_SIMULATED_QUBITS {
            return Err(Error::DimensionTooLarge {
                n_qubits,
                limit: MAX_SIMULATED_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, limit: dim });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Statevector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_qubits > MAX_SIMULATED_QUBITS {
            return Err(Error::DimensionTooLarge {
                n_qubits,
                limit: MAX_SIMULATED_QUBITS,
            });
        }
        if amplitudes.len() != 1usize << n_qubits {
            return Err(Error::InvalidConfig(format!(
                "{} amplitudes for {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        Ok(Statevector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        self.check_qubits(other.n_qubits)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_qubits(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: n,
            });
        }
        Ok(())
    }

    /// `s ↦ exp(i·angle·P)·s = cos(angle)·s + i·sin(angle)·P·s`.
    pub fn apply_pauli_rotation(&mut self, p: &PauliTerm, angle: f64) -> Result<()> {
        self.check_qubits(p.n_qubits())?;
        let c = p.coefficient();
        if (c.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitCoefficient(c));
        }
        // Fold a unit phase c into the string: P' = c·P. For a Hermitian string
        // c = ±1; other phases give a non-unitary rotation, so only the real sign
        // is accepted here.
        if c.im.abs() > UNIT_TOL {
            return Err(Error::NonUnitCoefficient(c));
        }
        let angle = angle * c.re.signum();
        self.rotate(p.x_mask(), p.z_mask(), p.y_count(), angle);
        Ok(())
    }

    fn rotate(&mut self, x: u64, z: u64, y_count: u32, angle: f64) {
        let (sin, cos) = angle.sin_cos();
        // P|b⟩ = i^{#Y} (-1)^{|z&b|} |b⊕x⟩; the rotation mixes b with b⊕x.
        let phase = i_pow(y_count) * Complex64::new(0.0, sin);
        let amps = &mut self.amplitudes;
        let x = x as usize;
        let z = z as usize;
        let sign = |b: usize| if (z & b).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        if x == 0 {
            // diagonal: exp(i·angle·λ) with λ = i^{#Y}·(±1) real here since #Y = 0
            for (b, a) in amps.iter_mut().enumerate() {
                *a *= Complex64::new(cos, 0.0) + phase * sign(b);
            }
            return;
        }
        let pivot = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for b in 0..amps.len() {
            if b & pivot != 0 {
                continue;
            }
            let c = b ^ x;
            let ab = amps[b];
            let ac = amps[c];
            // new[c] = cos·ψ[c] + phase·sign(b)·ψ[b], new[b] = cos·ψ[b] + phase·sign(c)·ψ[c]
            amps[c] = ac * cos + phase * sign(b) * ab;
            amps[b] = ab * cos + phase * sign(c) * ac;
        }
    }

    /// `s ↦ exp(θ·G)·s` via the eight commuting string rotations of `G`.
    pub fn apply_excitation(&mut self, e: &ExcitationOperator, theta: f64) -> Result<()> {
        self.check_qubits(e.qubit_image().n_qubits())?;
        for factor in e.rotation_factors() {
            self.rotate(
                factor.string.x_mask(),
                factor.string.z_mask(),
                factor.string.y_count(),
                factor.angle(theta),
            );
        }
        Ok(())
    }

    /// `Σ_t c_t ⟨s|P_t|s⟩` without building any matrix.
    pub fn expectation(&self, h: &PauliSum) -> Result<Complex64> {
        self.expectation_grouped(&h.grouped())
    }

    pub fn expectation_grouped(&self, h: &GroupedPauliSum) -> Result<Complex64> {
        self.check_qubits(h.n_qubits())?;
        // per-group partial sums collected in order, then reduced sequentially
        let partials: Vec<Complex64> = h
            .groups()
            .par_iter()
            .map(|g| group_expectation(&self.amplitudes, g))
            .collect();
        Ok(partials.into_iter().sum())
    }

    /// Expectation of a Hermitian operator; fails if the imaginary residue exceeds 1e-10.
    pub fn energy(&self, h: &GroupedPauliSum) -> Result<f64> {
        let e = self.expectation_grouped(h)?;
        if e.im.abs() > REAL_TOL * e.re.abs().max(1.0) {
            return Err(Error::NonHermitian(e.im.abs()));
        }
        Ok(e.re)
    }

    /// `P·s` for a whole sum.
    pub fn apply_sum(&self, h: &GroupedPauliSum) -> Result<Statevector> {
        self.check_qubits(h.n_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for g in h.groups() {
            let x = g.x_mask as usize;
            for (b, &a) in self.amplitudes.iter().enumerate() {
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let w = signed_sum(g, b);
                out[b ^ x] += w * a;
            }
        }
        Ok(Statevector {
            n_qubits: self.n_qubits,
            amplitudes: out,
        })
    }
}

#[inline]
fn signed_sum(g: &XGroup, b: usize) -> Complex64 {
    let mut w = Complex64::new(0.0, 0.0);
    for &(z, c) in &g.z_terms {
        if (z as usize & b).count_ones() & 1 == 1 {
            w -= c;
        } else {
            w += c;
        }
    }
    w
}

fn group_expectation(amps: &[Complex64], g: &XGroup) -> Complex64 {
    let x = g.x_mask as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    if x == 0 {
        for (b, a) in amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p != 0.0 {
                acc += signed_sum(g, b) * p;
            }
        }
        return acc;
    }
    for (b, a) in amps.iter().enumerate() {
        if *a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let bra = amps[b ^ x];
        if bra == Complex64::new(0.0, 0.0) {
            continue;
        }
        acc += bra.conj() * a * signed_sum(g, b);
    }
    acc
}

/// Basis state with spin-orbitals `0..n_electrons` occupied.
///
/// Under interleaved ordering this doubly occupies the lowest
/// `n_electrons / 2` spatial orbitals.
pub fn hartree_fock_state(n_qubits: usize, n_electrons: usize) -> Result<Statevector> {
    if n_electrons > n_qubits {
        return Err(Error::UnsupportedConfiguration(format!(
            "{n_electrons} electrons on {n_qubits} qubits"
        )));
    }
    Statevector::basis_state(n_qubits, (1usize << n_electrons) - 1)
}
