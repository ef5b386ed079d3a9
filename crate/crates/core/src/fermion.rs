//! Second-quantized operators over spin-orbitals.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One ladder operator: `(mode, is_creation)`.
pub type Ladder = (usize, bool);

#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    pub coefficient: Complex64,
    /// Applied right to left, as written: `[(3, true), (0, false)]` is `a†₃ a₀`.
    pub ops: Vec<Ladder>,
}

impl FermionTerm {
    pub fn adjoint(&self) -> FermionTerm {
        FermionTerm {
            coefficient: self.coefficient.conj(),
            ops: self.ops.iter().rev().map(|&(m, c)| (m, !c)).collect(),
        }
    }
}

/// A linear combination of ladder-operator products on `n_modes` spin-orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionOperator {
    n_modes: usize,
    terms: Vec<FermionTerm>,
}

impl FermionOperator {
    pub fn zero(n_modes: usize) -> Self {
        FermionOperator {
            n_modes,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_modes: usize, coefficient: Complex64) -> Self {
        let mut op = Self::zero(n_modes);
        op.terms.push(FermionTerm {
            coefficient,
            ops: Vec::new(),
        });
        op
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &[FermionTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, coefficient: Complex64, ops: Vec<Ladder>) -> Result<()> {
        if let Some(&(mode, _)) = ops.iter().find(|(m, _)| *m >= self.n_modes) {
            return Err(Error::IndexOutOfRange {
                index: mode,
                limit: self.n_modes,
            });
        }
        self.terms.push(FermionTerm { coefficient, ops });
        Ok(())
    }

    /// `a†_p`
    pub fn creation(n_modes: usize, p: usize) -> Result<Self> {
        let mut op = Self::zero(n_modes);
        op.push(Complex64::new(1.0, 0.0), vec![(p, true)])?;
        Ok(op)
    }

    /// `a_p`
    pub fn annihilation(n_modes: usize, p: usize) -> Result<Self> {
        let mut op = Self::zero(n_modes);
        op.push(Complex64::new(1.0, 0.0), vec![(p, false)])?;
        Ok(op)
    }

    /// `Σ_p a†_p a_p`
    pub fn number_operator(n_modes: usize) -> Self {
        let mut op = Self::zero(n_modes);
        for p in 0..n_modes {
            op.terms.push(FermionTerm {
                coefficient: Complex64::new(1.0, 0.0),
                ops: vec![(p, true), (p, false)],
            });
        }
        op
    }

    pub fn adjoint(&self) -> Self {
        FermionOperator {
            n_modes: self.n_modes,
            terms: self.terms.iter().map(FermionTerm::adjoint).collect(),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        FermionOperator {
            n_modes: self.n_modes,
            terms: self
                .terms
                .iter()
                .map(|t| FermionTerm {
                    coefficient: t.coefficient * factor,
                    ops: t.ops.clone(),
                })
                .collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_modes != other.n_modes {
            return Err(Error::QubitMismatch {
                left: self.n_modes,
                right: other.n_modes,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(FermionOperator {
            n_modes: self.n_modes,
            terms,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Operator product; ladder sequences are concatenated without reordering.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut ops = a.ops.clone();
                ops.extend_from_slice(&b.ops);
                terms.push(FermionTerm {
                    coefficient: a.coefficient * b.coefficient,
                    ops,
                });
            }
        }
        Ok(FermionOperator {
            n_modes: self.n_modes,
            terms,
        })
    }

    /// Merges terms with identical ladder sequences and drops those below `drop_tol`.
    ///
    /// Products are compared literally, so `a†₀a₁` and `−a₁a†₀` are not merged.
    pub fn simplify(self, drop_tol: f64) -> Self {
        let mut terms = self.terms;
        terms.sort_by(|a, b| a.ops.cmp(&b.ops));
        let mut merged: Vec<FermionTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.ops == t.ops => last.coefficient += t.coefficient,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coefficient.norm() >= drop_tol);
        FermionOperator {
            n_modes: self.n_modes,
            terms: merged,
        }
    }
}

impl fmt::Display for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                writeln!(f, " +")?;
            }
            let ops: Vec<String> = t
                .ops
                .iter()
                .map(|&(m, c)| if c { format!("{m}^") } else { m.to_string() })
                .collect();
            write!(f, "({}{:+}j) [{}]", t.coefficient.re, t.coefficient.im, ops.join(" "))?;
        }
        Ok(())
    }
}
