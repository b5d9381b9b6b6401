//! Dense statevector engine.
//!
//! A [`State`] always stores all `2^n` amplitudes. Hot loops run on a
//! [`Basis`] (usually one particle-number/S_z sector) with operators compiled
//! into CSR form by [`SparseOperator`]; packed amplitude vectors are indexed by
//! basis position.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{FermionOperator, PauliSum};
use crate::rdm::{self, Rdm};

/// Amplitudes below this are treated as leakage-free zeros.
pub const LEAKAGE_TOL: f64 = 1e-10;

const NONE: u32 = u32::MAX;

/// Ordered set of computational basis states with O(1) reverse lookup.
#[derive(Debug, Clone)]
pub struct Basis {
    n_qubits: usize,
    states: Vec<u64>,
    lookup: Vec<u32>,
}

impl Basis {
    pub fn from_states(n_qubits: usize, mut states: Vec<u64>) -> Self {
        states.sort_unstable();
        states.dedup();
        let mut lookup = vec![NONE; 1usize << n_qubits];
        for (i, &s) in states.iter().enumerate() {
            lookup[s as usize] = i as u32;
        }
        Self { n_qubits, states, lookup }
    }

    pub fn full(n_qubits: usize) -> Self {
        Self::from_states(n_qubits, (0..1u64 << n_qubits).collect())
    }

    /// Determinants with `n_alpha` even-indexed and `n_beta` odd-indexed modes occupied.
    pub fn sector(n_qubits: usize, n_alpha: usize, n_beta: usize) -> Self {
        let alpha_mask = (0..n_qubits).step_by(2).fold(0u64, |m, q| m | 1 << q);
        let states = (0..1u64 << n_qubits)
            .filter(|&b| {
                (b & alpha_mask).count_ones() as usize == n_alpha
                    && (b & !alpha_mask).count_ones() as usize == n_beta
            })
            .collect();
        Self::from_states(n_qubits, states)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    #[inline]
    pub fn position(&self, state: u64) -> Option<usize> {
        match self.lookup.get(state as usize) {
            Some(&i) if i != NONE => Some(i as usize),
            _ => None,
        }
    }
}

/// Apply a ladder product (rightmost factor first) to a determinant.
/// Returns the sign and the resulting determinant, or `None` if annihilated.
#[inline]
pub(crate) fn apply_ladders(ladders: &[(usize, bool)], mut b: u64) -> Option<(f64, u64)> {
    let mut sign = 1.0;
    for &(i, dagger) in ladders.iter().rev() {
        let bit = 1u64 << i;
        if ((b & bit) != 0) == dagger {
            return None;
        }
        if (b & (bit - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        b ^= bit;
    }
    Some((sign, b))
}

/// CSR matrix over a [`Basis`].
#[derive(Debug, Clone)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<Complex64>,
    norm_bound: f64,
}

impl SparseOperator {
    fn from_triplets(dim: usize, mut triplets: Vec<(u32, u32, Complex64)>) -> Self {
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(u32, u32)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r as usize + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        // prune cancellations
        let mut keep_ptr = vec![0usize; dim + 1];
        let mut k = 0;
        let mut out_cols = Vec::with_capacity(cols.len());
        let mut out_vals = Vec::with_capacity(vals.len());
        for r in 0..dim {
            let n = row_ptr[r + 1];
            for _ in 0..n {
                if vals[k].norm() > 1e-15 {
                    out_cols.push(cols[k]);
                    out_vals.push(vals[k]);
                    keep_ptr[r + 1] += 1;
                }
                k += 1;
            }
        }
        for r in 0..dim {
            keep_ptr[r + 1] += keep_ptr[r];
        }
        let mut op = Self { dim, row_ptr: keep_ptr, cols: out_cols, vals: out_vals, norm_bound: 0.0 };
        op.norm_bound = (0..dim)
            .map(|r| op.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        op
    }

    /// Compile a Pauli sum. Fails if it maps a basis state outside `basis`.
    pub fn from_pauli(op: &PauliSum, basis: &Basis) -> Result<Self> {
        if op.n_qubits() > basis.n_qubits() {
            return Err(Error::DimensionMismatch(op.n_qubits(), basis.n_qubits()));
        }
        let mut triplets = Vec::new();
        for (col, &b) in basis.states().iter().enumerate() {
            for (p, c) in op.terms() {
                let target = b ^ p.x;
                let v = c * p.apply_phase(b);
                match basis.position(target) {
                    Some(row) => triplets.push((row as u32, col as u32, v)),
                    None => {
                        if v.norm() > 1e-14 {
                            return Err(Error::LeavesBasis);
                        }
                    }
                }
            }
        }
        let sparse = Self::from_triplets(basis.len(), triplets);
        Ok(sparse)
    }

    /// Compile a fermion operator directly from ladder actions on determinants.
    pub fn from_fermion(op: &FermionOperator, basis: &Basis) -> Result<Self> {
        if let Some(max) = op.max_index() {
            if max >= basis.n_qubits() {
                return Err(Error::IndexOverflow { index: max, n_qubits: basis.n_qubits() });
            }
        }
        let terms: Vec<(Vec<(usize, bool)>, Complex64)> = op
            .terms()
            .map(|(t, c)| (t.iter().map(|l| (l.index, l.dagger)).collect(), *c))
            .collect();
        let mut triplets = Vec::new();
        for (col, &b) in basis.states().iter().enumerate() {
            for (ladders, c) in &terms {
                if let Some((sign, target)) = apply_ladders(ladders, b) {
                    match basis.position(target) {
                        Some(row) => triplets.push((row as u32, col as u32, c * sign)),
                        None => return Err(Error::LeavesBasis),
                    }
                }
            }
        }
        Ok(Self::from_triplets(basis.len(), triplets))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Max absolute row sum; bounds the spectral radius for the normal
    /// matrices used here.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    #[inline]
    fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.cols[a..b].iter().zip(&self.vals[a..b]).map(|(&c, &v)| (c as usize, v))
    }

    /// `y = A x`
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let mut acc = Complex64::default();
            for k in a..b {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            *out = acc;
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::default(); self.dim];
        self.apply_into(x, &mut y);
        y
    }

    /// Largest entry of `A^dagger + A` (zero for an anti-Hermitian matrix).
    pub fn anti_hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                let transposed = self.row(c).find(|&(cc, _)| cc == r).map(|(_, v)| v).unwrap_or_default();
                worst = worst.max((v + transposed.conj()).norm());
            }
        }
        worst
    }

    /// `exp(t A) x` by a truncated Taylor series, stepping so that each
    /// step has `|t| * bound <= 1`.
    pub fn expm_apply(&self, t: f64, x: &[Complex64]) -> Vec<Complex64> {
        let mut v = x.to_vec();
        if t == 0.0 || self.vals.is_empty() {
            return v;
        }
        let steps = (t.abs() * self.norm_bound).ceil().max(1.0) as usize;
        let dt = t / steps as f64;
        let mut term = vec![Complex64::default(); self.dim];
        let mut next = vec![Complex64::default(); self.dim];
        for _ in 0..steps {
            term.copy_from_slice(&v);
            for k in 1..60 {
                self.apply_into(&term, &mut next);
                let scale = dt / k as f64;
                let mut term_norm = 0.0;
                for (tk, nk) in term.iter_mut().zip(&next) {
                    *tk = nk * scale;
                    term_norm += tk.norm_sqr();
                }
                for (vk, tk) in v.iter_mut().zip(&term) {
                    *vk += tk;
                }
                if term_norm.sqrt() < 1e-16 {
                    break;
                }
            }
        }
        v
    }
}

/// Real CSR matrix, the fast path for real generators and Hamiltonians.
#[derive(Debug, Clone)]
pub struct RealSparse {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    norm_bound: f64,
}

impl SparseOperator {
    /// Real copy, if every stored entry has a negligible imaginary part.
    pub fn to_real(&self) -> Option<RealSparse> {
        if self.vals.iter().any(|v| v.im.abs() > 1e-14) {
            return None;
        }
        Some(RealSparse {
            dim: self.dim,
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            vals: self.vals.iter().map(|v| v.re).collect(),
            norm_bound: self.norm_bound,
        })
    }
}

impl RealSparse {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// Entries `(row, col, value)` in row order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k] as usize, self.vals[k]))
        })
    }

    #[inline]
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let mut acc = 0.0;
            for k in a..b {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            *out = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.apply_into(x, &mut y);
        y
    }

    /// `exp(t A) x` by a stepped Taylor series, as for [`SparseOperator::expm_apply`].
    pub fn expm_apply(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        if t == 0.0 || self.vals.is_empty() {
            return v;
        }
        let steps = (t.abs() * self.norm_bound).ceil().max(1.0) as usize;
        let dt = t / steps as f64;
        let mut term = vec![0.0; self.dim];
        let mut next = vec![0.0; self.dim];
        for _ in 0..steps {
            term.copy_from_slice(&v);
            for k in 1..60 {
                self.apply_into(&term, &mut next);
                let scale = dt / k as f64;
                let mut term_norm = 0.0;
                for ((tk, nk), vk) in term.iter_mut().zip(&next).zip(v.iter_mut()) {
                    *tk = nk * scale;
                    *vk += *tk;
                    term_norm += *tk * *tk;
                }
                if term_norm < 1e-34 {
                    break;
                }
            }
        }
        v
    }
}

#[inline]
pub fn dot_real(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Real part of `<x|A|x>` with the packed vector.
pub fn packed_expectation(op: &SparseOperator, x: &[Complex64]) -> f64 {
    dot(x, &op.apply(x)).re
}

/// `||(A - <A>) x||^2`, the variance of a Hermitian `A`.
pub fn packed_variance(op: &SparseOperator, x: &[Complex64]) -> f64 {
    let ax = op.apply(x);
    let mean = dot(x, &ax).re;
    ax.iter().zip(x).map(|(a, b)| (a - b * mean).norm_sqr()).sum()
}

/// Statevector over all `2^n_qubits` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl State {
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1usize << n_qubits {
            return Err(Error::DimensionMismatch(amplitudes.len(), 1usize << n_qubits));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn from_packed(basis: &Basis, packed: &[Complex64]) -> Self {
        let mut amplitudes = vec![Complex64::default(); 1usize << basis.n_qubits()];
        for (&b, &c) in basis.states().iter().zip(packed) {
            amplitudes[b as usize] = c;
        }
        Self { n_qubits: basis.n_qubits(), amplitudes }
    }

    /// Amplitudes on `basis`, in basis order.
    pub fn pack(&self, basis: &Basis) -> Vec<Complex64> {
        basis.states().iter().map(|&b| self.amplitudes[b as usize]).collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// Largest amplitude outside the given (N, S_z) sector.
    pub fn leakage(&self, n_alpha: usize, n_beta: usize) -> f64 {
        let alpha_mask = (0..self.n_qubits).step_by(2).fold(0u64, |m, q| m | 1 << q);
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(b, _)| {
                let b = *b as u64;
                (b & alpha_mask).count_ones() as usize != n_alpha
                    || (b & !alpha_mask).count_ones() as usize != n_beta
            })
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    /// Debug dump: one `index real imag` line per nonzero amplitude.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.amplitudes.iter().enumerate() {
            if c.norm() > 0.0 {
                let _ = writeln!(out, "{i} {:.17e} {:.17e}", c.re, c.im);
            }
        }
        out
    }
}

pub fn prepare_reference(occupied: &[usize], n_qubits: usize) -> Result<State> {
    let mut b = 0u64;
    for &i in occupied {
        if i >= n_qubits {
            return Err(Error::IndexOverflow { index: i, n_qubits });
        }
        if b & (1 << i) != 0 {
            return Err(Error::DuplicateOrbital(i));
        }
        b |= 1 << i;
    }
    let mut amplitudes = vec![Complex64::default(); 1usize << n_qubits];
    amplitudes[b as usize] = Complex64::new(1.0, 0.0);
    Ok(State { n_qubits, amplitudes })
}

/// `exp(theta * g)|s>` for an anti-Hermitian `g`, or `exp(i theta g)|s>` for
/// a Hermitian `g`.
pub fn apply_exp_generator(s: &State, g: &PauliSum, theta: f64) -> Result<State> {
    if theta == 0.0 {
        return Ok(s.clone());
    }
    let (generator, defect) = if g.max_real() <= 1e-12 {
        (g.clone(), 0.0)
    } else if g.max_imag() <= 1e-12 {
        (g.scale(Complex64::new(0.0, 1.0)), 0.0)
    } else {
        (g.clone(), g.max_real().min(g.max_imag()))
    };
    if defect > 0.0 {
        return Err(Error::NotAntiHermitian(defect));
    }
    let basis = Basis::full(s.n_qubits);
    let op = SparseOperator::from_pauli(&generator, &basis)?;
    // Pauli strings are Hermitian, so purely imaginary coefficients make the
    // sum anti-Hermitian; real-coefficient entries would have been rejected.
    let amplitudes = op.expm_apply(theta, &s.amplitudes);
    Ok(State { n_qubits: s.n_qubits, amplitudes })
}

pub fn expectation(s: &State, h: &PauliSum) -> f64 {
    let mut acc = Complex64::default();
    for (p, c) in h.terms() {
        let mut partial = Complex64::default();
        for (b, amp) in s.amplitudes.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let b = b as u64;
            partial += s.amplitudes[(b ^ p.x) as usize].conj() * p.apply_phase(b) * amp;
        }
        acc += c * partial;
    }
    debug_assert!(acc.im.abs() < 1e-8, "non-Hermitian observable: Im = {}", acc.im);
    acc.re
}

/// `<h^2> - <h>^2`, evaluated as `||(h - <h>)|s>||^2`.
pub fn variance(s: &State, h: &PauliSum) -> f64 {
    let basis = Basis::full(s.n_qubits);
    let op = SparseOperator::from_pauli(h, &basis).expect("full basis is closed");
    packed_variance(&op, &s.amplitudes)
}

pub fn overlap(a: &State, b: &State) -> Result<Complex64> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::DimensionMismatch(a.n_qubits, b.n_qubits));
    }
    Ok(dot(&a.amplitudes, &b.amplitudes))
}

/// m-RDM with the `1/m!` prefactor, from ladder strings applied to each determinant.
pub fn measure_rdm(s: &State, order: usize) -> Rdm {
    let states: Vec<u64> = (0..s.amplitudes.len() as u64).collect();
    measure_rdm_on(s.n_qubits, &states, &s.amplitudes, |b| Some(b as usize), order)
}

/// RDM of a packed state on `basis`.
pub fn measure_rdm_packed(basis: &Basis, amplitudes: &[Complex64], order: usize) -> Rdm {
    measure_rdm_on(basis.n_qubits(), basis.states(), amplitudes, |b| basis.position(b), order)
}

fn measure_rdm_on(
    n: usize,
    states: &[u64],
    amplitudes: &[Complex64],
    position: impl Fn(u64) -> Option<usize>,
    order: usize,
) -> Rdm {
    assert!((1..=3).contains(&order), "RDM order must be 1, 2 or 3");
    assert!(2 * order <= n.max(2 * order), "order too large");
    let combos = rdm::Combinations::new(n, order);
    let mut sorted = vec![Complex64::default(); combos.len() * combos.len()];
    let factorial = (1..=order).product::<usize>() as f64;
    let mut ann = Vec::with_capacity(order);
    let mut cre = Vec::with_capacity(order);
    for (&b, &amp) in states.iter().zip(amplitudes) {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let occupied: Vec<usize> = (0..n).filter(|&i| b >> i & 1 == 1).collect();
        for q in rdm::Combinations::new(occupied.len(), order).iter() {
            // lower indices q1 < q2 < ... ; operator a_qm ... a_q1 acts first
            ann.clear();
            ann.extend(q.iter().rev().map(|&k| (occupied[k], false)));
            let Some((s1, mid)) = apply_ladders(&ann, b) else { continue };
            let empty: Vec<usize> = (0..n).filter(|&i| mid >> i & 1 == 0).collect();
            let q_global: Vec<usize> = q.iter().map(|&k| occupied[k]).collect();
            let q_rank = combos.rank(&q_global);
            for p in rdm::Combinations::new(empty.len(), order).iter() {
                cre.clear();
                cre.extend(p.iter().map(|&k| (empty[k], true)));
                let Some((s2, target)) = apply_ladders(&cre, mid) else { continue };
                let Some(pos) = position(target) else { continue };
                let bra = amplitudes[pos];
                if bra.norm_sqr() == 0.0 {
                    continue;
                }
                let p_global: Vec<usize> = p.iter().map(|&k| empty[k]).collect();
                let p_rank = combos.rank(&p_global);
                sorted[p_rank * combos.len() + q_rank] += bra.conj() * amp * (s1 * s2 / factorial);
            }
        }
    }
    Rdm::from_sorted(order, n, &combos, &sorted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{jordan_wigner, PauliString};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn reference_state_bits() {
        let s = prepare_reference(&[0, 1], 4).unwrap();
        assert_eq!(s.amplitudes()[0b0011], c(1.0));
        assert_eq!(s.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 1);
        let vac = prepare_reference(&[], 2).unwrap();
        assert_eq!(vac.amplitudes()[0], c(1.0));
        assert!(matches!(prepare_reference(&[1, 1], 4), Err(Error::DuplicateOrbital(1))));
    }

    #[test]
    fn zero_angle_is_bitwise_identity() {
        let s = prepare_reference(&[0], 2).unwrap();
        let tau = FermionOperator::hopping(1, 0).sub(&FermionOperator::hopping(0, 1));
        let g = jordan_wigner(&tau, 2).unwrap();
        assert_eq!(apply_exp_generator(&s, &g, 0.0).unwrap(), s);
    }

    #[test]
    fn single_excitation_rotates() {
        // exp(theta (a+_1 a_0 - a+_0 a_1)) |01> = cos|01> + sin|10>
        let s = prepare_reference(&[0], 2).unwrap();
        let tau = FermionOperator::hopping(1, 0).sub(&FermionOperator::hopping(0, 1));
        let g = jordan_wigner(&tau, 2).unwrap();
        for theta in [0.1, 0.7, -1.3, 2.9] {
            let out = apply_exp_generator(&s, &g, theta).unwrap();
            assert!((out.amplitudes()[0b01] - c(theta.cos())).norm() < 1e-12);
            assert!((out.amplitudes()[0b10] - c(theta.sin())).norm() < 1e-12);
        }
    }

    #[test]
    fn group_law() {
        let s = prepare_reference(&[0, 1], 4).unwrap();
        let tau = FermionOperator::double(3, 2, 0, 1).sub(&FermionOperator::double(1, 0, 2, 3));
        let g = jordan_wigner(&tau, 4).unwrap();
        let half = apply_exp_generator(&apply_exp_generator(&s, &g, 0.35).unwrap(), &g, 0.35).unwrap();
        let full = apply_exp_generator(&s, &g, 0.7).unwrap();
        for (a, b) in half.amplitudes().iter().zip(full.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn hermitian_input_is_rejected_when_mixed() {
        let s = prepare_reference(&[0], 1).unwrap();
        let mixed = PauliSum::from_terms(
            1,
            [(PauliString::parse("X").unwrap(), c(1.0)), (PauliString::parse("Y").unwrap(), Complex64::new(0.0, 1.0))],
        );
        assert!(matches!(apply_exp_generator(&s, &mixed, 0.3), Err(Error::NotAntiHermitian(_))));
    }

    #[test]
    fn simple_expectations() {
        let s = prepare_reference(&[0], 2).unwrap();
        assert!((expectation(&s, &PauliSum::identity(2)) - 1.0).abs() < 1e-15);
        let z0 = PauliSum::from_terms(2, [(PauliString::parse("IZ").unwrap(), c(1.0))]);
        assert!((expectation(&s, &z0) + 1.0).abs() < 1e-15);
        assert!(variance(&s, &z0).abs() < 1e-15);
    }

    #[test]
    fn superposition_variance() {
        let amp = 1.0 / 2f64.sqrt();
        let s = State::from_amplitudes(1, vec![c(amp), c(amp)]).unwrap();
        let z = PauliSum::from_terms(1, [(PauliString::parse("Z").unwrap(), c(1.0))]);
        assert!((variance(&s, &z) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlaps() {
        let a = prepare_reference(&[0], 2).unwrap();
        let b = prepare_reference(&[1], 2).unwrap();
        assert_eq!(overlap(&a, &a).unwrap(), c(1.0));
        assert_eq!(overlap(&a, &b).unwrap(), c(0.0));
        let wide = prepare_reference(&[0], 3).unwrap();
        assert!(overlap(&a, &wide).is_err());
    }

    #[test]
    fn determinant_one_rdm() {
        let s = prepare_reference(&[0, 1], 4).unwrap();
        let d1 = measure_rdm(&s, 1);
        for p in 0..4 {
            for q in 0..4 {
                let expected = if p == q && p < 2 { 1.0 } else { 0.0 };
                assert_eq!(d1.get(&[p], &[q]), c(expected));
            }
        }
    }

    #[test]
    fn pauli_and_fermion_compilation_agree() {
        let basis = Basis::full(4);
        let op = FermionOperator::double(3, 1, 0, 2)
            .add(&FermionOperator::hopping(2, 1).scale(c(0.3)))
            .add(&FermionOperator::hopping(0, 3).scale(Complex64::new(0.0, 0.2)));
        let direct = SparseOperator::from_fermion(&op, &basis).unwrap();
        let via_jw = SparseOperator::from_pauli(&jordan_wigner(&op, 4).unwrap(), &basis).unwrap();
        let x: Vec<Complex64> = (0..16).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos())).collect();
        let (a, b) = (direct.apply(&x), via_jw.apply(&x));
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn sector_compile_rejects_leaving_operators() {
        let basis = Basis::sector(4, 1, 1);
        let flip = FermionOperator::hopping(2, 1);
        assert!(matches!(SparseOperator::from_fermion(&flip, &basis), Err(Error::LeavesBasis)));
    }
}
