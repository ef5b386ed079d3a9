//! Dense-matrix oracles shared by the integration tests.
//!
//! Basis index `b` has qubit `k` in state `(b >> k) & 1`; `|1⟩` means occupied.
#![allow(dead_code)]

use std::path::PathBuf;

use kadapt::fermion::FermionOperator;
use kadapt::integrals::MolecularIntegrals;
use kadapt::pauli::{Pauli, PauliSum, PauliTerm};
use kadapt::pool::OperatorPool;
use kadapt::statevector::Statevector;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type C = Complex64;
pub type Mat = DMatrix<C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixtures_matching(prefix: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(fixture(""))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            p.extension().is_some_and(|e| e == "fcidump")
                && p.file_name().unwrap().to_string_lossy().starts_with(prefix)
        })
        .collect();
    v.sort();
    v
}

fn single_qubit(p: Pauli) -> Mat {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match p {
        Pauli::I => Mat::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => Mat::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => Mat::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => Mat::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `P_{n-1} ⊗ … ⊗ P_0` times the coefficient.
pub fn term_matrix(t: &PauliTerm) -> Mat {
    let mut m = Mat::from_element(1, 1, c(1.0, 0.0));
    for k in (0..t.n_qubits()).rev() {
        m = m.kronecker(&single_qubit(t.pauli_at(k)));
    }
    m * t.coefficient()
}

pub fn sum_matrix(s: &PauliSum) -> Mat {
    let d = 1usize << s.n_qubits();
    s.iter().fold(Mat::zeros(d, d), |acc, t| acc + term_matrix(t))
}

/// `a_j` on the Fock basis: clears bit `j` with sign `(−1)^{#occupied below j}`.
pub fn annihilation(n: usize, j: usize) -> Mat {
    let d = 1usize << n;
    let mut m = Mat::zeros(d, d);
    for b in 0..d {
        if b >> j & 1 == 1 {
            let sign = if (b & ((1 << j) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(b ^ (1 << j), b)] = c(sign, 0.0);
        }
    }
    m
}

pub fn creation(n: usize, j: usize) -> Mat {
    annihilation(n, j).adjoint()
}

pub fn fermion_matrix(f: &FermionOperator) -> Mat {
    let n = f.n_modes();
    let d = 1usize << n;
    let mut total = Mat::zeros(d, d);
    for term in f.terms() {
        let mut m = Mat::identity(d, d) * term.coefficient;
        for &(mode, dagger) in &term.ops {
            m *= if dagger { creation(n, mode) } else { annihilation(n, mode) };
        }
        total += m;
    }
    total
}

/// `a†_s a†_r a_q a_p − h.c.` straight from Fock matrices.
pub fn double_excitation_matrix(n: usize, p: usize, q: usize, r: usize, s: usize) -> Mat {
    let t = creation(n, s) * creation(n, r) * annihilation(n, q) * annihilation(n, p);
    &t - t.adjoint()
}

/// Molecular Hamiltonian assembled from integrals with the textbook formula
/// `E0 + Σ h_pq a†_pσ a_qσ + ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ`, spin-orbital `2p + σ`.
pub fn molecular_hamiltonian_matrix(m: &MolecularIntegrals) -> Mat {
    let n = m.n_spin_orbitals();
    let d = 1usize << n;
    let no = m.n_orbitals();
    let ann: Vec<Mat> = (0..n).map(|j| annihilation(n, j)).collect();
    let cre: Vec<Mat> = ann.iter().map(|a| a.adjoint()).collect();
    let mut h = Mat::identity(d, d) * c(m.core_energy(), 0.0);
    for p in 0..no {
        for q in 0..no {
            for sigma in 0..2 {
                h += &cre[2 * p + sigma] * &ann[2 * q + sigma] * c(m.one_body(p, q), 0.0);
            }
        }
    }
    for p in 0..no {
        for q in 0..no {
            for r in 0..no {
                for s in 0..no {
                    let v = m.two_body(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let prod = &cre[2 * p + sigma] * &cre[2 * r + tau] * &ann[2 * s + tau] * &ann[2 * q + sigma];
                            h += prod * c(0.5 * v, 0.0);
                        }
                    }
                }
            }
        }
    }
    h
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn dense(s: &Statevector) -> DVector<C> {
    DVector::from_column_slice(s.amplitudes())
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Statevector {
    let amps: Vec<C> = (0..1usize << n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut s = Statevector::from_amplitudes(n, amps).unwrap();
    s.normalize();
    s
}

/// Random pool operators at random angles applied to `initial`.
pub fn random_ansatz_state<R: Rng>(
    initial: &Statevector,
    pool: &OperatorPool,
    n_ops: usize,
    rng: &mut R,
) -> (Vec<usize>, Vec<f64>, Statevector) {
    let ops: Vec<usize> = (0..n_ops).map(|_| rng.gen_range(0..pool.len())).collect();
    let params: Vec<f64> = (0..n_ops).map(|_| rng.gen_range(-0.4..0.4)).collect();
    let state = kadapt::adapt::prepare_state(initial, pool, &ops, &params).unwrap();
    (ops, params, state)
}

/// `⟨ψ|M|ψ⟩`.
pub fn dense_expectation(m: &Mat, psi: &DVector<C>) -> C {
    (psi.adjoint() * m * psi)[(0, 0)]
}

/// Lowest energy over determinants an even number of electrons away from
/// Hartree–Fock. Occupied→virtual double excitations applied to HF never leave
/// that subspace, so no such ansatz can go below this value.
pub fn even_excitation_floor(p: &kadapt::problem::Problem) -> f64 {
    use kadapt::fci::{sector_basis, Sector};
    let n = p.n_qubits();
    let n_e = p.integrals.n_electrons();
    let sector = Sector {
        n_electrons: n_e,
        two_sz: p.integrals.ms2(),
    };
    let basis: Vec<usize> = sector_basis(n, Some(sector))
        .into_iter()
        .filter(|b| (b >> n_e).count_ones() % 2 == 0)
        .collect();
    let h = p.hamiltonian.grouped();
    let d = basis.len();
    let mut m = DMatrix::<f64>::zeros(d, d);
    for (j, &b) in basis.iter().enumerate() {
        let column = Statevector::basis_state(n, b).unwrap().apply_sum(&h).unwrap();
        for (i, &a) in basis.iter().enumerate() {
            m[(i, j)] = column.amplitudes()[a].re;
        }
    }
    nalgebra::SymmetricEigen::new(m).eigenvalues.min()
}
