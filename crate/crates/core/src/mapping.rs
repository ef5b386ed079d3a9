//! Jordan–Wigner encoding of fermionic operators.
//!
//! Spin-orbital `j` is qubit `j` and
//! `a_j ↦ ½(X_j + iY_j) ⊗ Z_{j-1} ⊗ … ⊗ Z_0`, so occupied is `|1⟩` and the
//! parity string sits on lower-indexed qubits.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, Ladder};
use crate::pauli::{PauliSum, PauliTerm, DEFAULT_DROP_TOL};

/// The two strings of a single ladder operator.
fn ladder_image(n_qubits: usize, (mode, creation): Ladder) -> [PauliTerm; 2] {
    let bit = 1u64 << mode;
    let parity = bit - 1;
    let half = Complex64::new(0.5, 0.0);
    let y_coeff = Complex64::new(0.0, if creation { -0.5 } else { 0.5 });
    [
        PauliTerm::new(n_qubits, bit, parity, half).expect("mode checked against n_qubits"),
        PauliTerm::new(n_qubits, bit, parity | bit, y_coeff).expect("mode checked against n_qubits"),
    ]
}

pub fn jordan_wigner(f: &FermionOperator, n_qubits: usize) -> Result<PauliSum> {
    let mut out = PauliSum::zero(n_qubits)?;
    let mut strings: Vec<PauliTerm> = Vec::new();
    for term in f.terms() {
        if let Some(&(mode, _)) = term.ops.iter().find(|(m, _)| *m >= n_qubits) {
            return Err(Error::IndexOutOfRange {
                index: mode,
                limit: n_qubits,
            });
        }
        let mut partial = vec![PauliTerm::identity(n_qubits, term.coefficient)?];
        for &op in &term.ops {
            let image = ladder_image(n_qubits, op);
            partial = partial
                .iter()
                .flat_map(|p| image.iter().map(move |q| p.multiply_unchecked(q)))
                .collect();
        }
        strings.extend(partial);
    }
    for s in strings {
        out.push(s)?;
    }
    Ok(out.simplify(DEFAULT_DROP_TOL))
}

/// One factor `exp(i · sign · magnitude · θ · P)` of an excitation unitary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationFactor {
    /// Unit-coefficient string.
    pub string: PauliTerm,
    pub sign: i8,
    pub magnitude: f64,
}

impl RotationFactor {
    /// Rotation angle for generator parameter `theta`.
    pub fn angle(&self, theta: f64) -> f64 {
        f64::from(self.sign) * self.magnitude * theta
    }
}

/// Splits `exp(θ·g)` into eight commuting single-string rotations.
///
/// `g` must be the image of one double-excitation generator: eight strings,
/// pairwise commuting, with purely imaginary coefficients of equal modulus.
/// Factors come back in the canonical `(x_mask, z_mask)` order.
pub fn excitation_rotation_factors(g: &PauliSum) -> Result<Vec<RotationFactor>> {
    let g = g.clone().simplify(DEFAULT_DROP_TOL);
    if g.len() != 8 {
        return Err(Error::NotDoubleExcitation(format!(
            "expected 8 strings, found {}",
            g.len()
        )));
    }
    let terms = g.terms();
    for (i, a) in terms.iter().enumerate() {
        if terms[i + 1..].iter().any(|b| !a.commutes_with(b)) {
            return Err(Error::NotDoubleExcitation(format!(
                "string {} does not commute with the rest",
                a.label()
            )));
        }
    }
    let magnitude = terms[0].coefficient().im.abs();
    let tol = 1e-10 * magnitude.max(1.0);
    let mut factors = Vec::with_capacity(8);
    for t in terms {
        let c = t.coefficient();
        if c.re.abs() > tol || (c.im.abs() - magnitude).abs() > tol {
            return Err(Error::NotDoubleExcitation(format!(
                "coefficient {c} of {} is not ±i·{magnitude}",
                t.label()
            )));
        }
        factors.push(RotationFactor {
            string: t.with_coefficient(Complex64::new(1.0, 0.0)),
            sign: if c.im > 0.0 { 1 } else { -1 },
            magnitude,
        });
    }
    Ok(factors)
}
