//! Exact ground-state energies of qubit Hamiltonians.
//!
//! The Hamiltonian is restricted to a set of basis states (a particle-number
//! and spin sector, or the full register). Small spaces are diagonalized
//! densely; larger ones use Lanczos with full reorthogonalization on a
//! matrix-free application of the Pauli sum.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{GroupedPauliSum, PauliSum};

/// Largest register the oracle accepts.
pub const MAX_ORACLE_QUBITS: usize = 24;
/// Sector dimension up to which a dense eigensolve is used.
pub const DENSE_LIMIT: usize = 2048;

const HERMITIAN_TOL: f64 = 1e-10;
const LANCZOS_TOL: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sector {
    pub n_electrons: usize,
    /// Twice the spin projection, `n↑ − n↓`.
    pub two_sz: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Debug)]
pub struct SpectrumRequest<'a> {
    pub hamiltonian: &'a PauliSum,
    pub sector: Option<Sector>,
    pub n_eigenvalues: usize,
    pub solver: Solver,
}

impl<'a> SpectrumRequest<'a> {
    pub fn new(hamiltonian: &'a PauliSum) -> Self {
        SpectrumRequest {
            hamiltonian,
            sector: None,
            n_eigenvalues: 1,
            solver: Solver::Auto,
        }
    }

    pub fn in_sector(mut self, n_electrons: usize, two_sz: i32) -> Self {
        self.sector = Some(Sector { n_electrons, two_sz });
        self
    }

    pub fn with_solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }
}

/// Basis states with `n_electrons` set bits and `n↑ − n↓ = two_sz`, where even
/// bits are spin up (interleaved spin-orbital ordering).
pub fn sector_basis(n_qubits: usize, sector: Option<Sector>) -> Vec<usize> {
    let dim = 1usize << n_qubits;
    let even: usize = (0..n_qubits).step_by(2).map(|k| 1usize << k).sum();
    (0..dim)
        .filter(|&b| match sector {
            None => true,
            Some(s) => {
                let up = (b & even).count_ones() as i32;
                let down = (b & !even).count_ones() as i32;
                (up + down) as usize == s.n_electrons && up - down == s.two_sz
            }
        })
        .collect()
}

struct Restricted<'a> {
    h: &'a GroupedPauliSum,
    basis: Vec<usize>,
    position: Option<HashMap<usize, usize>>,
}

impl Restricted<'_> {
    fn new(h: &GroupedPauliSum, basis: Vec<usize>, full: bool) -> Restricted<'_> {
        let position = if full {
            None
        } else {
            Some(basis.iter().enumerate().map(|(i, &b)| (b, i)).collect())
        };
        Restricted { h, basis, position }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn locate(&self, b: usize) -> Option<usize> {
        match &self.position {
            None => Some(b),
            Some(map) => map.get(&b).copied(),
        }
    }

    /// Calls `f(row, column, value)` for every nonzero `⟨row|H|column⟩` in the sector.
    fn for_each_element(&self, mut f: impl FnMut(usize, usize, Complex64)) {
        for (col, &b) in self.basis.iter().enumerate() {
            for g in self.h.groups() {
                let target = b ^ g.x_mask as usize;
                let Some(row) = self.locate(target) else {
                    continue;
                };
                let mut w = Complex64::new(0.0, 0.0);
                for &(z, c) in &g.z_terms {
                    if (z as usize & b).count_ones() & 1 == 1 {
                        w -= c;
                    } else {
                        w += c;
                    }
                }
                if w != Complex64::new(0.0, 0.0) {
                    f(row, col, w);
                }
            }
        }
    }

    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        self.for_each_element(|row, col, w| out[row] += w * v[col]);
    }

    fn dense(&self) -> (DMatrix<f64>, bool) {
        let d = self.dim();
        let mut re = DMatrix::<f64>::zeros(d, d);
        let mut im = DMatrix::<f64>::zeros(d, d);
        self.for_each_element(|row, col, w| {
            re[(row, col)] += w.re;
            im[(row, col)] += w.im;
        });
        if im.iter().all(|v| v.abs() < 1e-15) {
            return (re, true);
        }
        // [[A, -B], [B, A]] has the spectrum of A + iB, each value twice
        let mut big = DMatrix::<f64>::zeros(2 * d, 2 * d);
        big.view_mut((0, 0), (d, d)).copy_from(&re);
        big.view_mut((d, d), (d, d)).copy_from(&re);
        big.view_mut((0, d), (d, d)).copy_from(&(-&im));
        big.view_mut((d, 0), (d, d)).copy_from(&im);
        (big, false)
    }
}

fn dense_eigenvalues(op: &Restricted) -> Vec<f64> {
    let (m, real) = op.dense();
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    if !real {
        values = values.chunks(2).map(|p| p[0]).collect();
    }
    values
}

fn start_vector(basis: &[usize], reference: Option<usize>) -> Vec<Complex64> {
    // deterministic, dense in every basis state so no symmetry block is missed
    let mut v: Vec<Complex64> = basis
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let weight = if Some(b) == reference { 1.0 } else { 1e-2 };
            Complex64::new(weight * (1.0 + ((i as f64) * 0.618_033_988_75).fract()), 0.0)
        })
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

fn lanczos_lowest(op: &Restricted, reference: Option<usize>, n_eigenvalues: usize) -> Vec<f64> {
    let d = op.dim();
    let max_steps = d.min(400);
    let mut basis: Vec<Vec<Complex64>> = vec![start_vector(&op.basis, reference)];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); d];
    let mut previous: Option<Vec<f64>> = None;
    loop {
        let j = alpha.len();
        op.apply(&basis[j], &mut w);
        let a: f64 = basis[j].iter().zip(&w).map(|(q, x)| (q.conj() * x).re).sum();
        alpha.push(a);
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for q in &basis {
                let overlap: Complex64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                w.iter_mut().zip(q).for_each(|(x, qk)| *x -= overlap * qk);
            }
        }
        let b = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();

        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
        let wanted = n_eigenvalues.min(m);
        let values: Vec<f64> = order[..wanted].iter().map(|&i| eig.eigenvalues[i]).collect();
        let residual = order[..wanted]
            .iter()
            .map(|&i| (b * eig.eigenvectors[(m - 1, i)]).abs())
            .fold(0.0, f64::max);
        let stalled = previous
            .as_ref()
            .is_some_and(|p| p.len() == values.len() && p.iter().zip(&values).all(|(x, y)| (x - y).abs() < 1e-13));
        if m >= max_steps || b < 1e-12 || (wanted == n_eigenvalues && (residual < LANCZOS_TOL || stalled)) {
            return values;
        }
        previous = Some(values);
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
}

/// Lowest `n_eigenvalues` energies of the (sector-restricted) Hamiltonian.
pub fn lowest_energies(req: &SpectrumRequest) -> Result<Vec<f64>> {
    let h = req.hamiltonian;
    let n = h.n_qubits();
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::DimensionTooLarge {
            n_qubits: n,
            limit: MAX_ORACLE_QUBITS,
        });
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitian(defect));
    }
    if req.n_eigenvalues == 0 {
        return Ok(Vec::new());
    }
    let grouped = h.grouped();
    let basis = sector_basis(n, req.sector);
    if basis.is_empty() {
        return Err(Error::UnsupportedConfiguration(format!(
            "sector {:?} is empty on {n} qubits",
            req.sector
        )));
    }
    let reference = req.sector.map(|s| {
        // lowest-index determinant of the sector: fill spin-orbitals bottom-up
        let (up, down) = (
            ((s.n_electrons as i32 + s.two_sz) / 2) as usize,
            ((s.n_electrons as i32 - s.two_sz) / 2) as usize,
        );
        (0..up).map(|k| 1usize << (2 * k)).sum::<usize>() + (0..down).map(|k| 1usize << (2 * k + 1)).sum::<usize>()
    });
    let op = Restricted::new(&grouped, basis, req.sector.is_none());
    let dense = match req.solver {
        Solver::Dense => true,
        Solver::Lanczos => false,
        Solver::Auto => op.dim() <= DENSE_LIMIT,
    };
    let mut values = if dense {
        dense_eigenvalues(&op)
    } else {
        lanczos_lowest(&op, reference, req.n_eigenvalues)
    };
    values.truncate(req.n_eigenvalues);
    Ok(values)
}

pub fn exact_ground_energy(req: &SpectrumRequest) -> Result<f64> {
    let req = SpectrumRequest {
        n_eigenvalues: 1,
        ..req.clone()
    };
    lowest_energies(&req)?
        .first()
        .copied()
        .ok_or_else(|| Error::UnsupportedConfiguration("empty spectrum".into()))
}
