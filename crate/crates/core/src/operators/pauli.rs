use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::fermion::{FermionOperator, PRUNE};
use crate::error::{Error, Result};

/// Tensor product of single-qubit Paulis, as X and Z bit masks
/// (`Y` sets both bits). Qubit `q` is bit `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub const IDENTITY: Self = Self { x: 0, z: 0 };

    pub fn letter(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn single(q: usize, letter: char) -> Self {
        let bit = 1u64 << q;
        match letter {
            'X' => Self { x: bit, z: 0 },
            'Y' => Self { x: bit, z: bit },
            'Z' => Self { x: 0, z: bit },
            _ => Self::IDENTITY,
        }
    }

    /// Parse a string such as `"XIZY"`, leftmost character = highest qubit.
    pub fn parse(s: &str) -> Option<Self> {
        let n = s.len();
        let mut p = Self::IDENTITY;
        for (k, ch) in s.chars().enumerate() {
            let q = n - 1 - k;
            if !"IXYZ".contains(ch) {
                return None;
            }
            let single = Self::single(q, ch);
            p.x |= single.x;
            p.z |= single.z;
        }
        Some(p)
    }

    /// `self * other = phase * result`
    pub fn multiply(&self, other: &Self) -> (Complex64, Self) {
        // Write each string as i^{|x&z|} X^x Z^z; moving Z^z1 past X^x2 costs (-1)^{|z1&x2|}.
        let y1 = (self.x & self.z).count_ones();
        let y2 = (other.x & other.z).count_ones();
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let y = (x & z).count_ones();
        let swaps = (self.z & other.x).count_ones();
        // i^{y1 + y2 - y} (-1)^swaps
        let power = (y1 as i64 + y2 as i64 - y as i64 + 2 * swaps as i64).rem_euclid(4);
        let phase = match power {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        (phase, Self { x, z })
    }

    /// `P|b> = phase(b) |b ^ x>`
    #[inline]
    pub fn apply_phase(&self, basis: u64) -> Complex64 {
        let ipow = (self.x & self.z).count_ones() + 2 * (basis & self.z).count_ones();
        match ipow % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn to_string_width(&self, n_qubits: usize) -> String {
        (0..n_qubits).rev().map(|q| self.letter(q)).collect()
    }
}

/// Weighted sum of Pauli strings on a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let mut s = Self::zero(n_qubits);
        s.add_term(PauliString::IDENTITY, 1.0.into());
        s
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (PauliString, Complex64)>) -> Self {
        let mut s = Self::zero(n_qubits);
        for (p, c) in terms {
            s.add_term(p, c);
        }
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    pub fn add_term(&mut self, p: PauliString, c: Complex64) {
        let total = self.terms.get(&p).copied().unwrap_or_default() + c;
        if total.norm() > PRUNE {
            self.terms.insert(p, total);
        } else {
            self.terms.remove(&p);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(*p, *c);
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_terms(self.n_qubits, self.terms.iter().map(|(p, c)| (*p, c * factor)))
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                let (phase, p) = pa.multiply(pb);
                *acc.entry(p).or_default() += phase * ca * cb;
            }
        }
        Self::from_terms(self.n_qubits.max(other.n_qubits), acc)
    }

    /// Largest |Im c| over terms (zero for a Hermitian sum).
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Largest |Re c| over terms (zero for an anti-Hermitian sum).
    pub fn max_real(&self) -> f64 {
        self.terms.values().map(|c| c.re.abs()).fold(0.0, f64::max)
    }

    /// Sum of |c| over terms; bounds the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Dense matrix, row-major, `2^n x 2^n`. Intended for small checks.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let dim = 1usize << self.n_qubits;
        let mut m = vec![vec![Complex64::default(); dim]; dim];
        for (p, c) in &self.terms {
            for b in 0..dim as u64 {
                let row = (b ^ p.x) as usize;
                m[row][b as usize] += c * p.apply_phase(b);
            }
        }
        m
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (p, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i) {}", c.re, c.im, p.to_string_width(self.n_qubits))?;
        }
        Ok(())
    }
}

/// Jordan-Wigner image of one ladder operator:
/// `a+_p -> (X_p - iY_p)/2 Z_{p-1}..Z_0`, `a_p -> (X_p + iY_p)/2 Z_{p-1}..Z_0`.
fn ladder_image(index: usize, dagger: bool, n_qubits: usize) -> PauliSum {
    let zs = (1u64 << index) - 1;
    let bit = 1u64 << index;
    let sign = if dagger { -0.5 } else { 0.5 };
    PauliSum::from_terms(
        n_qubits,
        [
            (PauliString { x: bit, z: zs }, Complex64::new(0.5, 0.0)),
            (PauliString { x: bit, z: zs | bit }, Complex64::new(0.0, sign)),
        ],
    )
}

pub fn jordan_wigner(op: &FermionOperator, n_qubits: usize) -> Result<PauliSum> {
    if n_qubits > 63 {
        return Err(Error::IndexOverflow { index: n_qubits, n_qubits: 63 });
    }
    if let Some(max) = op.max_index() {
        if max >= n_qubits {
            return Err(Error::IndexOverflow { index: max, n_qubits });
        }
    }
    let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
    for (term, coeff) in op.terms() {
        let mut prod = PauliSum::identity(n_qubits).scale(*coeff);
        for l in term {
            prod = prod.multiply(&ladder_image(l.index, l.dagger, n_qubits));
        }
        for (p, c) in prod.terms {
            *acc.entry(p).or_default() += c;
        }
    }
    Ok(PauliSum::from_terms(n_qubits, acc))
}
