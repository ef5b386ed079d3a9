//! FCIDUMP ingestion and the second-quantized molecular Hamiltonian.
//!
//! Spin-orbitals are interleaved: spatial orbital `p` owns spin-orbital `2p`
//! (spin up) and `2p + 1` (spin down). Everything downstream (pool, HF state,
//! sector restrictions) relies on this ordering.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::FermionOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

pub fn spin_orbital(spatial: usize, spin: Spin) -> usize {
    2 * spatial + matches!(spin, Spin::Down) as usize
}

pub fn spin_of(spin_orbital: usize) -> Spin {
    if spin_orbital % 2 == 0 {
        Spin::Up
    } else {
        Spin::Down
    }
}

/// Real restricted-orbital integrals. Two-body values are chemists' `(pq|rs)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularIntegrals {
    n_orbitals: usize,
    n_electrons: usize,
    ms2: i32,
    core_energy: f64,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
}

impl MolecularIntegrals {
    pub fn new(n_orbitals: usize, n_electrons: usize, ms2: i32) -> Result<Self> {
        if n_electrons > 2 * n_orbitals {
            return Err(Error::UnsupportedConfiguration(format!(
                "{n_electrons} electrons do not fit in {n_orbitals} spatial orbitals"
            )));
        }
        Ok(MolecularIntegrals {
            n_orbitals,
            n_electrons,
            ms2,
            core_energy: 0.0,
            one_body: vec![0.0; n_orbitals * n_orbitals],
            two_body: vec![0.0; n_orbitals.pow(4)],
        })
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_orbitals
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn ms2(&self) -> i32 {
        self.ms2
    }

    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    pub fn set_core_energy(&mut self, value: f64) {
        self.core_energy = value;
    }

    pub fn one_body(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.n_orbitals + q]
    }

    fn idx4(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n_orbitals + q) * self.n_orbitals + r) * self.n_orbitals + s
    }

    /// `(pq|rs)` in chemists' notation.
    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body[self.idx4(p, q, r, s)]
    }

    /// Sets `h_pq` and its transpose.
    pub fn set_one_body(&mut self, p: usize, q: usize, value: f64) {
        let n = self.n_orbitals;
        self.one_body[p * n + q] = value;
        self.one_body[q * n + p] = value;
    }

    /// Sets `(pq|rs)` and its eight real-orbital images.
    pub fn set_two_body(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            let i = self.idx4(a, b, c, d);
            self.two_body[i] = value;
        }
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_fcidump(&text)
    }

    /// Writes the symmetry-unique entries in FCIDUMP form.
    pub fn to_fcidump(&self) -> String {
        let n = self.n_orbitals;
        let mut out = String::new();
        let _ = writeln!(
            out,
            " &FCI NORB={},NELEC={},MS2={},",
            n, self.n_electrons, self.ms2
        );
        let _ = writeln!(out, "  ORBSYM={}", "1,".repeat(n));
        let _ = writeln!(out, "  ISYM=1,");
        let _ = writeln!(out, " &END");
        for p in 0..n {
            for q in 0..=p {
                for r in 0..n {
                    for s in 0..=r {
                        if p * (p + 1) / 2 + q < r * (r + 1) / 2 + s {
                            continue;
                        }
                        let v = self.two_body(p, q, r, s);
                        if v != 0.0 {
                            let _ = writeln!(out, "{v:.17e} {} {} {} {}", p + 1, q + 1, r + 1, s + 1);
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..=p {
                let v = self.one_body(p, q);
                if v != 0.0 {
                    let _ = writeln!(out, "{v:.17e} {} {} 0 0", p + 1, q + 1);
                }
            }
        }
        let _ = writeln!(out, "{:.17e} 0 0 0 0", self.core_energy);
        out
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_real(token: &str) -> Option<f64> {
    token.replace(['D', 'd'], "e").parse().ok()
}

struct Header {
    norb: usize,
    nelec: usize,
    ms2: i32,
    /// 1-based line number of the first value line.
    body_start: usize,
}

fn parse_header(lines: &[&str]) -> Result<Header> {
    let first = lines.first().map(|l| l.trim_start()).unwrap_or("");
    if !first.to_ascii_uppercase().starts_with("&FCI") {
        return Err(parse_err(1, "expected '&FCI' namelist header"));
    }
    let mut text = String::new();
    let mut end = None;
    for (k, line) in lines.iter().enumerate() {
        let upper = line.trim().to_ascii_uppercase();
        let (content, done) = if let Some(pos) = upper.find("&END") {
            (&upper[..pos], true)
        } else if upper == "/" || upper.ends_with('/') {
            (upper.trim_end_matches('/'), true)
        } else {
            (upper.as_str(), false)
        };
        text.push_str(content);
        text.push(',');
        if done {
            end = Some(k);
            break;
        }
    }
    let end = end.ok_or_else(|| parse_err(lines.len(), "namelist header is never terminated"))?;
    let text = text.trim_start().trim_start_matches("&FCI");

    let mut norb = None;
    let mut nelec = None;
    let mut ms2 = 0i32;
    let mut key: Option<String> = None;
    let header_line = 1;
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let value = if let Some((k, v)) = token.split_once('=') {
            key = Some(k.trim().to_string());
            v.trim()
        } else {
            token
        };
        let Some(k) = key.as_deref() else {
            return Err(parse_err(header_line, format!("unexpected token {token:?} in header")));
        };
        if value.is_empty() {
            continue;
        }
        let int = || {
            value
                .parse::<i64>()
                .map_err(|_| parse_err(header_line, format!("{k} must be an integer, got {value:?}")))
        };
        match k {
            "NORB" => norb = Some(usize::try_from(int()?).map_err(|_| parse_err(header_line, "NORB < 0"))?),
            "NELEC" => nelec = Some(usize::try_from(int()?).map_err(|_| parse_err(header_line, "NELEC < 0"))?),
            "MS2" => ms2 = int()? as i32,
            "IUHF" | "UHF" if value != "0" && value != ".FALSE." && value != "F" => {
                return Err(parse_err(header_line, "unrestricted integrals are not supported"));
            }
            _ => {}
        }
    }
    let norb = norb.ok_or_else(|| parse_err(header_line, "header is missing NORB"))?;
    let nelec = nelec.ok_or_else(|| parse_err(header_line, "header is missing NELEC"))?;
    if nelec > 2 * norb {
        return Err(parse_err(
            header_line,
            format!("NELEC={nelec} exceeds twice NORB={norb}"),
        ));
    }
    Ok(Header {
        norb,
        nelec,
        ms2,
        body_start: end + 2,
    })
}

/// Parses an FCIDUMP file with 1-based spatial indices.
///
/// `i j k l = 0 0 0 0` is the core energy, `k = l = 0` a one-body entry and all
/// four nonzero a two-body entry. Orbital-energy lines (`i 0 0 0`) are skipped.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let lines: Vec<&str> = text.lines().collect();
    let header = parse_header(&lines)?;
    let mut ints = MolecularIntegrals::new(header.norb, header.nelec, header.ms2)?;
    let norb = header.norb;

    for (offset, line) in lines[header.body_start - 1..].iter().enumerate() {
        let line_no = header.body_start + offset;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() == 6 {
            return Err(parse_err(line_no, "complex integrals are not supported"));
        }
        if tokens.len() != 5 {
            return Err(parse_err(
                line_no,
                format!("expected 'value i j k l', found {} fields", tokens.len()),
            ));
        }
        let value = parse_real(tokens[0])
            .filter(|v| v.is_finite())
            .ok_or_else(|| parse_err(line_no, format!("non-numeric value {:?}", tokens[0])))?;
        let mut idx = [0usize; 4];
        for (slot, token) in idx.iter_mut().zip(&tokens[1..]) {
            let i: i64 = token
                .parse()
                .map_err(|_| parse_err(line_no, format!("non-integer index {token:?}")))?;
            if i < 0 || i as usize > norb {
                return Err(parse_err(
                    line_no,
                    format!("index {i} outside [0, {norb}]"),
                ));
            }
            *slot = i as usize;
        }
        match idx {
            [0, 0, 0, 0] => ints.core_energy = value,
            [i, j, 0, 0] if i > 0 && j > 0 => ints.set_one_body(i - 1, j - 1, value),
            [_, 0, 0, 0] => {}
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                ints.set_two_body(i - 1, j - 1, k - 1, l - 1, value)
            }
            _ => {
                return Err(parse_err(
                    line_no,
                    format!("index pattern {idx:?} is not a recognised integral"),
                ))
            }
        }
    }
    Ok(ints)
}

/// `Σ h_pq a†_p a_q + ½ Σ h_pqrs a†_p a†_q a_r a_s + E_core` over spin-orbitals.
///
/// The spin-orbital two-body coefficient is `h_PQRS = (ps|qr)` with the spins
/// of `P,S` and of `Q,R` matching; terms with a repeated creation or
/// annihilation index vanish and are omitted.
pub fn build_fermionic_hamiltonian(m: &MolecularIntegrals) -> FermionOperator {
    let n = m.n_orbitals();
    let n_modes = m.n_spin_orbitals();
    let mut h = FermionOperator::zero(n_modes);
    let spins = [Spin::Up, Spin::Down];
    let real = |v: f64| Complex64::new(v, 0.0);

    if m.core_energy() != 0.0 {
        h = FermionOperator::identity(n_modes, real(m.core_energy()));
    }
    for p in 0..n {
        for q in 0..n {
            let v = m.one_body(p, q);
            if v == 0.0 {
                continue;
            }
            for spin in spins {
                h.push(
                    real(v),
                    vec![(spin_orbital(p, spin), true), (spin_orbital(q, spin), false)],
                )
                .expect("indices derived from n_orbitals");
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    // a†_{pσ} a†_{qτ} a_{rτ} a_{sσ} carries (ps|qr)
                    let v = m.two_body(p, s, q, r);
                    if v == 0.0 {
                        continue;
                    }
                    for sigma in spins {
                        for tau in spins {
                            let big_p = spin_orbital(p, sigma);
                            let big_q = spin_orbital(q, tau);
                            let big_r = spin_orbital(r, tau);
                            let big_s = spin_orbital(s, sigma);
                            if big_p == big_q || big_r == big_s {
                                continue;
                            }
                            h.push(
                                real(0.5 * v),
                                vec![(big_p, true), (big_q, true), (big_r, false), (big_s, false)],
                            )
                            .expect("indices derived from n_orbitals");
                        }
                    }
                }
            }
        }
    }
    h.simplify(0.0)
}
