//! Pauli strings packed as paired X/Z bitmasks, and sums of them.
//!
//! A string with masks `(x, z)` denotes `i^{|x & z|} X^x Z^z`, so a qubit with
//! both bits set carries `Y = iXZ` and the string is Hermitian for any masks.
//! Qubit `k` is bit `k` of each mask.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;

/// Coefficients smaller than this are rounding residue after exact phase algebra.
pub const DEFAULT_DROP_TOL: f64 = 1e-12;

/// `i^k` for any integer `k`.
#[inline]
pub fn i_pow(k: u32) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[inline]
fn qubit_mask(n_qubits: usize) -> u64 {
    if n_qubits >= 64 {
        u64::MAX
    } else {
        (1u64 << n_qubits) - 1
    }
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits(n_qubits));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
    coefficient: Complex64,
}

impl PauliTerm {
    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64, coefficient: Complex64) -> Result<Self> {
        check_qubits(n_qubits)?;
        let outside = (x_mask | z_mask) & !qubit_mask(n_qubits);
        if outside != 0 {
            return Err(Error::IndexOutOfRange {
                index: 63 - outside.leading_zeros() as usize,
                limit: n_qubits,
            });
        }
        Ok(PauliTerm {
            n_qubits,
            x_mask,
            z_mask,
            coefficient,
        })
    }

    pub fn identity(n_qubits: usize, coefficient: Complex64) -> Result<Self> {
        Self::new(n_qubits, 0, 0, coefficient)
    }

    /// A single non-identity factor on `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, op: Pauli, coefficient: Complex64) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::IndexOutOfRange {
                index: qubit,
                limit: n_qubits,
            });
        }
        let (x, z) = op.bits();
        Self::new(
            n_qubits,
            (x as u64) << qubit,
            (z as u64) << qubit,
            coefficient,
        )
    }

    /// Parses labels such as `"X0 Z1 Y3"`; the empty string or `"I"` is the identity.
    pub fn from_label(n_qubits: usize, label: &str, coefficient: Complex64) -> Result<Self> {
        let mut x_mask = 0u64;
        let mut z_mask = 0u64;
        for token in label.split_whitespace() {
            if token == "I" {
                continue;
            }
            let mut chars = token.chars();
            let op = match chars.next() {
                Some('X') => Pauli::X,
                Some('Y') => Pauli::Y,
                Some('Z') => Pauli::Z,
                Some('I') => Pauli::I,
                _ => return Err(Error::InvalidConfig(format!("bad pauli token {token:?}"))),
            };
            let qubit: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad pauli token {token:?}")))?;
            if qubit >= n_qubits.min(MAX_QUBITS) {
                return Err(Error::IndexOutOfRange {
                    index: qubit,
                    limit: n_qubits,
                });
            }
            let bit = 1u64 << qubit;
            if (x_mask | z_mask) & bit != 0 {
                return Err(Error::InvalidConfig(format!("qubit {qubit} repeated in {label:?}")));
            }
            let (x, z) = op.bits();
            if x {
                x_mask |= bit;
            }
            if z {
                z_mask |= bit;
            }
        }
        Self::new(n_qubits, x_mask, z_mask, coefficient)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn coefficient(&self) -> Complex64 {
        self.coefficient
    }

    pub fn with_coefficient(&self, coefficient: Complex64) -> Self {
        PauliTerm {
            coefficient,
            ..*self
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        self.with_coefficient(self.coefficient * factor)
    }

    pub fn adjoint(&self) -> Self {
        self.with_coefficient(self.coefficient.conj())
    }

    /// Number of `Y` factors, which fixes the `i^k` prefactor of the string.
    pub fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    /// Qubits acted on by anything other than identity.
    pub fn support(&self) -> u64 {
        self.x_mask | self.z_mask
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    pub fn pauli_at(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(
            (self.x_mask >> qubit) & 1 == 1,
            (self.z_mask >> qubit) & 1 == 1,
        )
    }

    pub fn same_string(&self, other: &PauliTerm) -> bool {
        self.x_mask == other.x_mask && self.z_mask == other.z_mask
    }

    pub fn commutes_with(&self, other: &PauliTerm) -> bool {
        let anti = (self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones();
        anti % 2 == 0
    }

    pub fn multiply(&self, other: &PauliTerm) -> Result<PauliTerm> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self.multiply_unchecked(other))
    }

    #[inline]
    pub(crate) fn multiply_unchecked(&self, other: &PauliTerm) -> PauliTerm {
        // i^{a} X^x1 Z^z1 · i^{b} X^x2 Z^z2 = i^{a+b} (-1)^{|z1&x2|} X^x Z^z
        let x_mask = self.x_mask ^ other.x_mask;
        let z_mask = self.z_mask ^ other.z_mask;
        let phase = self.y_count() + other.y_count() + 2 * (self.z_mask & other.x_mask).count_ones();
        let phase = (phase + 4 * 64 - (x_mask & z_mask).count_ones()) & 3;
        PauliTerm {
            n_qubits: self.n_qubits,
            x_mask,
            z_mask,
            coefficient: self.coefficient * other.coefficient * i_pow(phase),
        }
    }

    fn key(&self) -> (u64, u64) {
        (self.x_mask, self.z_mask)
    }

    fn cmp_string(&self, other: &PauliTerm) -> Ordering {
        self.key().cmp(&other.key())
    }

    /// The string without its coefficient, e.g. `X0 Z1 Y3`.
    pub fn label(&self) -> String {
        if self.is_identity() {
            return "I".to_string();
        }
        (0..self.n_qubits)
            .filter_map(|q| match self.pauli_at(q) {
                Pauli::I => None,
                p => Some(format!("{}{}", p.symbol(), q)),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn fmt_coefficient(c: Complex64) -> String {
    format!("({}{:+}j)", c.re, c.im)
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", fmt_coefficient(self.coefficient), self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(PauliSum {
            n_qubits,
            terms: Vec::new(),
        })
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut sum = Self::zero(n_qubits)?;
        for term in terms {
            sum.push(term)?;
        }
        Ok(sum)
    }

    pub fn push(&mut self, term: PauliTerm) -> Result<()> {
        if term.n_qubits != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: term.n_qubits,
            });
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PauliTerm> {
        self.terms.iter()
    }

    fn check_same(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Merges duplicate strings, drops coefficients below `drop_tol` and sorts
    /// terms by `(x_mask, z_mask)`.
    pub fn simplify(mut self, drop_tol: f64) -> Self {
        self.terms.sort_unstable_by(PauliTerm::cmp_string);
        let mut merged: Vec<PauliTerm> = Vec::with_capacity(self.terms.len());
        for term in self.terms {
            match merged.last_mut() {
                Some(last) if last.same_string(&term) => last.coefficient += term.coefficient,
                _ => merged.push(term),
            }
        }
        merged.retain(|t| t.coefficient.norm() >= drop_tol);
        PauliSum {
            n_qubits: self.n_qubits,
            terms: merged,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|t| t.scaled(factor)).collect(),
        }
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
        .simplify(DEFAULT_DROP_TOL))
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let terms = self
            .terms
            .iter()
            .flat_map(|a| other.terms.iter().map(move |b| a.multiply_unchecked(b)))
            .collect();
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
        .simplify(DEFAULT_DROP_TOL))
    }

    /// `self·other − other·self`. Only anticommuting string pairs survive, each as `2·ab`.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let two = Complex64::new(2.0, 0.0);
        let terms = self
            .terms
            .iter()
            .flat_map(|a| {
                other
                    .terms
                    .iter()
                    .filter(move |b| !a.commutes_with(b))
                    .map(move |b| a.multiply_unchecked(b).scaled(two))
            })
            .collect();
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
        .simplify(DEFAULT_DROP_TOL))
    }

    pub fn adjoint(&self) -> Self {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(PauliTerm::adjoint).collect(),
        }
    }

    /// Largest coefficient of `self − self†` after simplification.
    pub fn hermiticity_defect(&self) -> f64 {
        let merged = self.clone().simplify(0.0);
        merged
            .terms
            .iter()
            .map(|t| 2.0 * t.coefficient.im.abs())
            .fold(0.0, f64::max)
    }

    /// Largest coefficient of `self + self†` after simplification.
    pub fn anti_hermiticity_defect(&self) -> f64 {
        let merged = self.clone().simplify(0.0);
        merged
            .terms
            .iter()
            .map(|t| 2.0 * t.coefficient.re.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.anti_hermiticity_defect() <= tol
    }

    /// Largest coefficient modulus, zero for the empty sum.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.norm()).fold(0.0, f64::max)
    }

    pub fn grouped(&self) -> GroupedPauliSum {
        GroupedPauliSum::new(self)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, term) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{term}")?;
        }
        Ok(())
    }
}

/// Terms sharing an X mask, with the `i^{#Y}` phase folded into each coefficient.
#[derive(Clone, Debug)]
pub struct XGroup {
    pub x_mask: u64,
    pub z_terms: Vec<(u64, Complex64)>,
}

/// A Pauli sum regrouped by X mask for repeated expectation values.
///
/// Within a group every string maps `|b⟩` to a multiple of `|b ⊕ x⟩`, so the
/// amplitude product `conj(ψ[b⊕x])·ψ[b]` is shared by all of its terms.
#[derive(Clone, Debug)]
pub struct GroupedPauliSum {
    n_qubits: usize,
    groups: Vec<XGroup>,
}

impl GroupedPauliSum {
    pub fn new(sum: &PauliSum) -> Self {
        let mut terms: Vec<&PauliTerm> = sum.terms.iter().collect();
        terms.sort_by(|a, b| a.cmp_string(b));
        let mut groups: Vec<XGroup> = Vec::new();
        for t in terms {
            let c = t.coefficient * i_pow(t.y_count());
            match groups.last_mut() {
                Some(g) if g.x_mask == t.x_mask => g.z_terms.push((t.z_mask, c)),
                _ => groups.push(XGroup {
                    x_mask: t.x_mask,
                    z_terms: vec![(t.z_mask, c)],
                }),
            }
        }
        GroupedPauliSum {
            n_qubits: sum.n_qubits,
            groups,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn groups(&self) -> &[XGroup] {
        &self.groups
    }

    pub fn n_terms(&self) -> usize {
        self.groups.iter().map(|g| g.z_terms.len()).sum()
    }
}
