use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;

use super::fermion::{FermionOperator, Ladder};
use super::pauli::{jordan_wigner, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PoolKind {
    /// Every spin-conserving generalized single and double over spin orbitals.
    UnrestrictedGsd,
    /// Singlet spin-adapted generalized singles and doubles over spatial orbitals.
    SpinAdaptedGsd,
}

impl std::str::FromStr for PoolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "unrestricted" | "unrestricted-gsd" | "gsd" => Ok(Self::UnrestrictedGsd),
            "spin-adapted" | "spin-adapted-gsd" | "singlet" | "singlet-gsd" => Ok(Self::SpinAdaptedGsd),
            other => Err(format!("unknown pool kind `{other}`")),
        }
    }
}

/// What a pool element excites. Ordering of this enum is part of the pool order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelKind {
    Single,
    Double,
    SpinAdaptedSingle,
    /// Two independent singlet couplings per spatial quadruple, `0` and `1`.
    SpinAdaptedDouble(u8),
}

/// `kind` plus indices: spin orbitals for unrestricted elements, spatial
/// orbitals for spin-adapted ones. Singles are `(to, from)`, doubles
/// `(p, q, r, s)` for `a+_p a+_q a_r a_s - h.c.` (unrestricted) or `(p,q) -> (r,s)`
/// (spin-adapted).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PoolLabel {
    pub kind: LabelKind,
    pub indices: Vec<usize>,
}

impl fmt::Display for PoolLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            LabelKind::Single => "S".to_string(),
            LabelKind::Double => "D".to_string(),
            LabelKind::SpinAdaptedSingle => "s".to_string(),
            LabelKind::SpinAdaptedDouble(c) => format!("d{c}"),
        };
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{tag}({})", idx.join(","))
    }
}

#[derive(Debug, Clone)]
pub struct PoolElement {
    pub label: PoolLabel,
    /// Anti-Hermitian generator.
    pub generator: FermionOperator,
    pub qubit_generator: PauliSum,
}

#[derive(Debug, Clone)]
pub struct OperatorPool {
    pub kind: PoolKind,
    pub n_spatial: usize,
    pub elements: Vec<PoolElement>,
}

fn anti_hermitian_part(op: &FermionOperator) -> FermionOperator {
    op.sub(&op.adjoint())
}

fn normalized(op: FermionOperator) -> Option<FermionOperator> {
    if op.body_order() == 0 {
        return None;
    }
    let norm = op.coefficient_norm_sqr().sqrt();
    Some(op.scale((1.0 / norm).into()))
}

/// Sign-insensitive fingerprint used to drop duplicate generators.
fn fingerprint(op: &FermionOperator) -> String {
    let mut sign = 1.0;
    if let Some((_, c)) = op.terms().next() {
        if c.re < 0.0 || (c.re == 0.0 && c.im < 0.0) {
            sign = -1.0;
        }
    }
    op.terms()
        .map(|(t, c)| {
            let t: Vec<String> = t.iter().map(|l| format!("{}{}", l.index, if l.dagger { "^" } else { "" })).collect();
            format!("{}:{:.10}:{:.10}", t.join(" "), sign * c.re, sign * c.im)
        })
        .collect::<Vec<_>>()
        .join("|")
}

/// Generators in pool order, before Jordan-Wigner.
pub fn pool_generators(n_spatial: usize, kind: PoolKind) -> Vec<(PoolLabel, FermionOperator)> {
    let mut raw = match kind {
        PoolKind::UnrestrictedGsd => unrestricted(n_spatial),
        PoolKind::SpinAdaptedGsd => spin_adapted(n_spatial),
    };
    raw.sort_by(|a, b| a.0.cmp(&b.0));
    let mut seen = HashSet::new();
    raw.into_iter().filter(|(_, g)| seen.insert(fingerprint(g))).collect()
}

fn unrestricted(n_spatial: usize) -> Vec<(PoolLabel, FermionOperator)> {
    let n = 2 * n_spatial;
    let mut out = Vec::new();
    for p in 0..n {
        for q in 0..p {
            if p % 2 != q % 2 {
                continue;
            }
            let g = anti_hermitian_part(&FermionOperator::hopping(p, q));
            if !g.is_empty() {
                out.push((PoolLabel { kind: LabelKind::Single, indices: vec![p, q] }, g));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (0..p).map(move |q| (p, q))).collect();
    for &(p, q) in &pairs {
        for &(r, s) in &pairs {
            if (p, q) <= (r, s) {
                continue;
            }
            let up = (p % 2) + (q % 2);
            let down = (r % 2) + (s % 2);
            if up != down {
                continue;
            }
            let g = anti_hermitian_part(&FermionOperator::double(p, q, r, s));
            if !g.is_empty() {
                out.push((PoolLabel { kind: LabelKind::Double, indices: vec![p, q, r, s] }, g));
            }
        }
    }
    out
}

fn term(ops: [(usize, bool); 4], coeff: f64) -> FermionOperator {
    FermionOperator::from_term(
        ops.iter().map(|&(i, d)| Ladder { index: i, dagger: d }).collect(),
        Complex64::new(coeff, 0.0),
    )
}

fn spin_adapted(n_spatial: usize) -> Vec<(PoolLabel, FermionOperator)> {
    let mut out = Vec::new();
    for p in 0..n_spatial {
        for q in p..n_spatial {
            let (pa, pb, qa, qb) = (2 * p, 2 * p + 1, 2 * q, 2 * q + 1);
            let op = FermionOperator::hopping(pa, qa).add(&FermionOperator::hopping(pb, qb));
            if let Some(g) = normalized(anti_hermitian_part(&op)) {
                out.push((PoolLabel { kind: LabelKind::SpinAdaptedSingle, indices: vec![p, q] }, g));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n_spatial).flat_map(|p| (p..n_spatial).map(move |q| (p, q))).collect();
    for (ipq, &(p, q)) in pairs.iter().enumerate() {
        for &(r, s) in &pairs[ipq..] {
            let (pa, pb, qa, qb) = (2 * p, 2 * p + 1, 2 * q, 2 * q + 1);
            let (ra, rb, sa, sb) = (2 * r, 2 * r + 1, 2 * s, 2 * s + 1);
            let c = 1.0 / 12f64.sqrt();
            // a+_r a_p a+_s a_q products; the two singlet couplings of (p,q) -> (r,s).
            let a = [
                term([(ra, true), (pa, false), (sa, true), (qa, false)], 2.0 * c),
                term([(rb, true), (pb, false), (sb, true), (qb, false)], 2.0 * c),
                term([(ra, true), (pa, false), (sb, true), (qb, false)], c),
                term([(rb, true), (pb, false), (sa, true), (qa, false)], c),
                term([(ra, true), (pb, false), (sb, true), (qa, false)], c),
                term([(rb, true), (pa, false), (sa, true), (qb, false)], c),
            ];
            let b = [
                term([(ra, true), (pa, false), (sb, true), (qb, false)], 0.5),
                term([(rb, true), (pb, false), (sa, true), (qa, false)], 0.5),
                term([(ra, true), (pb, false), (sb, true), (qa, false)], -0.5),
                term([(rb, true), (pa, false), (sa, true), (qb, false)], -0.5),
            ];
            for (coupling, parts) in [(0u8, &a[..]), (1u8, &b[..])] {
                let sum = parts.iter().fold(FermionOperator::zero(), |acc, t| acc.add(t));
                if let Some(g) = normalized(anti_hermitian_part(&sum)) {
                    out.push((
                        PoolLabel { kind: LabelKind::SpinAdaptedDouble(coupling), indices: vec![p, q, r, s] },
                        g,
                    ));
                }
            }
        }
    }
    out
}

pub fn build_pool(n_spatial: usize, kind: PoolKind) -> OperatorPool {
    let n_qubits = 2 * n_spatial;
    let elements = pool_generators(n_spatial, kind)
        .into_iter()
        .map(|(label, generator)| {
            let qubit_generator =
                jordan_wigner(&generator, n_qubits).expect("pool indices are below 2 * n_spatial");
            PoolElement { label, generator, qubit_generator }
        })
        .collect();
    OperatorPool { kind, n_spatial, elements }
}

impl OperatorPool {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_spatial
    }

    /// Debug listing, one `label : generator` line per element.
    pub fn dump(&self) -> String {
        self.elements.iter().map(|e| format!("{} : {}\n", e.label, e.generator)).collect()
    }
}
