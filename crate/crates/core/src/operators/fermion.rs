use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

/// Coefficients below this magnitude are dropped.
pub const PRUNE: f64 = 1e-14;

/// One creation or annihilation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ladder {
    pub index: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(index: usize) -> Self {
        Self { index, dagger: true }
    }

    pub fn annihilate(index: usize) -> Self {
        Self { index, dagger: false }
    }

    fn adjoint(self) -> Self {
        Self { index: self.index, dagger: !self.dagger }
    }
}

/// Product of ladder operators, left to right.
pub type Term = Vec<Ladder>;

/// Sum of normal-ordered ladder products.
///
/// Canonical order: creations before annihilations, creations by strictly
/// decreasing index, annihilations by strictly increasing index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FermionOperator {
    terms: BTreeMap<Term, Complex64>,
}

fn in_order(a: Ladder, b: Ladder) -> bool {
    match (a.dagger, b.dagger) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.index > b.index,
        (false, false) => a.index < b.index,
    }
}

/// Normal-order one product, pushing the resulting canonical terms into `out`.
fn normal_order_into(term: Term, coeff: Complex64, out: &mut BTreeMap<Term, Complex64>) {
    let mut stack = vec![(term, coeff)];
    'outer: while let Some((mut term, mut coeff)) = stack.pop() {
        loop {
            let swap = (1..term.len()).find(|&i| !in_order(term[i - 1], term[i]));
            let Some(i) = swap else {
                *out.entry(term).or_default() += coeff;
                continue 'outer;
            };
            let (a, b) = (term[i - 1], term[i]);
            if a.index == b.index {
                if a.dagger == b.dagger {
                    // a_p a_p = 0
                    continue 'outer;
                }
                // a_p a+_p = 1 - a+_p a_p
                let mut contracted = term.clone();
                contracted.drain(i - 1..=i);
                stack.push((contracted, coeff));
            }
            term.swap(i - 1, i);
            coeff = -coeff;
        }
    }
}

impl FermionOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_term(Vec::new(), Complex64::new(1.0, 0.0))
    }

    pub fn from_term(term: Term, coeff: Complex64) -> Self {
        let mut op = Self::zero();
        op.add_term(term, coeff);
        op
    }

    /// `a+_p a_q`
    pub fn hopping(p: usize, q: usize) -> Self {
        Self::from_term(vec![Ladder::create(p), Ladder::annihilate(q)], 1.0.into())
    }

    /// `a+_p a+_q a_r a_s`
    pub fn double(p: usize, q: usize, r: usize, s: usize) -> Self {
        Self::from_term(
            vec![Ladder::create(p), Ladder::create(q), Ladder::annihilate(r), Ladder::annihilate(s)],
            1.0.into(),
        )
    }

    /// Add a (possibly non-canonical) product; it is normal ordered on insertion.
    pub fn add_term(&mut self, term: Term, coeff: Complex64) {
        let mut ordered = BTreeMap::new();
        normal_order_into(term, coeff, &mut ordered);
        for (t, c) in ordered {
            let total = self.terms.get(&t).copied().unwrap_or_default() + c;
            if total.norm() > PRUNE {
                self.terms.insert(t, total);
            } else {
                self.terms.remove(&t);
            }
        }
    }

    /// Drop coefficients below the pruning threshold.
    pub fn compress(&mut self) {
        self.terms.retain(|_, c| c.norm() > PRUNE);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, term: &[Ladder]) -> Complex64 {
        self.terms.get(term).copied().unwrap_or_default()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms.keys().flat_map(|t| t.iter().map(|l| l.index)).max()
    }

    /// Largest number of creation operators in any term.
    pub fn body_order(&self) -> usize {
        self.terms.keys().map(|t| t.iter().filter(|l| l.dagger).count()).max().unwrap_or(0)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self::zero();
        for (t, c) in &self.terms {
            let v = c * factor;
            if v.norm() > PRUNE {
                out.terms.insert(t.clone(), v);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            *out.terms.entry(t.clone()).or_default() += c;
        }
        out.compress();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale((-1.0).into()))
    }

    /// Normal-ordered product `self * other`.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = BTreeMap::new();
        for (ta, ca) in &self.terms {
            for (tb, cb) in &other.terms {
                let mut t = ta.clone();
                t.extend_from_slice(tb);
                normal_order_into(t, ca * cb, &mut out);
            }
        }
        let mut op = Self { terms: out };
        op.compress();
        op
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Self) -> Self {
        self.multiply(other).sub(&other.multiply(self))
    }

    pub fn adjoint(&self) -> Self {
        let mut out = BTreeMap::new();
        for (t, c) in &self.terms {
            let adj: Term = t.iter().rev().map(|l| l.adjoint()).collect();
            normal_order_into(adj, c.conj(), &mut out);
        }
        let mut op = Self { terms: out };
        op.compress();
        op
    }

    /// Largest coefficient deviation from `self^dagger = sign * self`.
    pub fn hermiticity_defect(&self, sign: f64) -> f64 {
        let diff = self.adjoint().sub(&self.scale(sign.into()));
        diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of squared coefficient magnitudes.
    pub fn coefficient_norm_sqr(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// Total number operator on `n` modes.
    pub fn number(n: usize) -> Self {
        let mut op = Self::zero();
        for p in 0..n {
            op = op.add(&Self::hopping(p, p));
        }
        op
    }

    /// Total S_z (in units of hbar) with interleaved alpha/beta modes.
    pub fn spin_z(n: usize) -> Self {
        let mut op = Self::zero();
        for p in 0..n {
            let sign = if p % 2 == 0 { 0.5 } else { -0.5 };
            op = op.add(&Self::hopping(p, p).scale(sign.into()));
        }
        op
    }

    /// Total S^2 with interleaved alpha/beta modes.
    pub fn spin_squared(n_spatial: usize) -> Self {
        let n = 2 * n_spatial;
        let sz = Self::spin_z(n);
        let mut s_plus = Self::zero();
        let mut s_minus = Self::zero();
        for i in 0..n_spatial {
            s_plus = s_plus.add(&Self::hopping(2 * i, 2 * i + 1));
            s_minus = s_minus.add(&Self::hopping(2 * i + 1, 2 * i));
        }
        // S^2 = S- S+ + Sz (Sz + 1)
        s_minus
            .multiply(&s_plus)
            .add(&sz.multiply(&sz))
            .add(&sz)
    }
}

impl fmt::Display for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (t, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)", c.re, c.im)?;
            if t.is_empty() {
                write!(f, " I")?;
            }
            for l in t {
                write!(f, " {}{}", l.index, if l.dagger { "^" } else { "" })?;
            }
        }
        Ok(())
    }
}
