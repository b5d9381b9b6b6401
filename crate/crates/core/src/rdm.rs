//! Reduced density matrices, wedge products, cumulant reconstruction and
//! RDM-based residual contractions.
//!
//! Convention: `D^{p1..pm}_{q1..qm} = (1/m!) <a+_p1 .. a+_pm a_qm .. a_q1>`.

use ndarray::{Array2, Array4, Array6, ArrayD, Dimension, Ix2, Ix4, Ix6, IxDyn};
use num_complex::Complex64;

/// Sorted m-subsets of `0..n` with colexicographic ranking.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    m: usize,
    binom: Vec<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, m: usize) -> Self {
        let mut binom = vec![vec![0usize; m + 2]; n + 2];
        for i in 0..n + 2 {
            binom[i][0] = 1;
            for k in 1..m + 2 {
                binom[i][k] = if i == 0 { 0 } else { binom[i - 1][k - 1] + binom[i - 1][k] };
            }
        }
        Self { n, m, binom }
    }

    pub fn len(&self) -> usize {
        self.binom[self.n][self.m]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Colex rank of a strictly increasing tuple.
    #[inline]
    pub fn rank(&self, sorted: &[usize]) -> usize {
        sorted.iter().enumerate().map(|(i, &c)| self.binom[c][i + 1]).sum()
    }

    /// All subsets in colex order (rank order).
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let m = self.m;
        let n = self.n;
        let mut current: Option<Vec<usize>> = if m <= n { Some((0..m).collect()) } else { None };
        std::iter::from_fn(move || {
            let out = current.clone()?;
            // colex successor
            let mut next = out.clone();
            let mut i = 0;
            loop {
                if i == m {
                    current = None;
                    break;
                }
                let limit = if i + 1 < m { next[i + 1] } else { n };
                if next[i] + 1 < limit {
                    next[i] += 1;
                    for (j, slot) in next.iter_mut().enumerate().take(i) {
                        *slot = j;
                    }
                    current = Some(next);
                    break;
                }
                i += 1;
            }
            Some(out)
        })
    }
}

/// Permutations of `0..m` with their signs.
pub fn signed_permutations(m: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if left.is_empty() {
            out.push((prefix.clone(), sign));
            return;
        }
        for k in 0..left.len() {
            let v = left.remove(k);
            prefix.push(v);
            // picking the k-th remaining element costs k transpositions
            rec(prefix, left, if k % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            left.insert(k, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..m).collect(), 1.0, &mut out);
    out
}

/// An m-particle reduced density matrix as a dense rank-2m tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Rdm {
    order: usize,
    tensor: ArrayD<Complex64>,
}

impl Rdm {
    pub fn zeros(order: usize, n: usize) -> Self {
        Self { order, tensor: ArrayD::zeros(IxDyn(&vec![n; 2 * order])) }
    }

    pub fn from_tensor(order: usize, tensor: ArrayD<Complex64>) -> Self {
        assert_eq!(tensor.ndim(), 2 * order);
        Self { order, tensor }
    }

    /// Build from values on sorted `(P, Q)` pairs, indexed
    /// `sorted[rank(P) * len + rank(Q)]`, filling antisymmetric images.
    pub fn from_sorted(order: usize, n: usize, combos: &Combinations, sorted: &[Complex64]) -> Self {
        let mut rdm = Self::zeros(order, n);
        let perms = signed_permutations(order);
        let subsets: Vec<Vec<usize>> = combos.iter().collect();
        let len = subsets.len();
        let mut idx = vec![0usize; 2 * order];
        for (ip, p) in subsets.iter().enumerate() {
            for (iq, q) in subsets.iter().enumerate() {
                let v = sorted[ip * len + iq];
                if v == Complex64::default() {
                    continue;
                }
                for (pp, sp) in &perms {
                    for (pq, sq) in &perms {
                        for k in 0..order {
                            idx[k] = p[pp[k]];
                            idx[order + k] = q[pq[k]];
                        }
                        rdm.tensor[idx.as_slice()] = v * (sp * sq);
                    }
                }
            }
        }
        rdm
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_orbitals(&self) -> usize {
        self.tensor.shape()[0]
    }

    pub fn tensor(&self) -> &ArrayD<Complex64> {
        &self.tensor
    }

    pub fn get(&self, upper: &[usize], lower: &[usize]) -> Complex64 {
        let idx: Vec<usize> = upper.iter().chain(lower).copied().collect();
        self.tensor[idx.as_slice()]
    }

    pub fn as2(&self) -> Array2<Complex64> {
        self.tensor.clone().into_dimensionality::<Ix2>().expect("order 1")
    }

    pub fn as4(&self) -> Array4<Complex64> {
        self.tensor.clone().into_dimensionality::<Ix4>().expect("order 2")
    }

    pub fn as6(&self) -> Array6<Complex64> {
        self.tensor.clone().into_dimensionality::<Ix6>().expect("order 3")
    }

    /// Full contraction `sum_P D^P_P`, equal to `C(N, m)`.
    pub fn trace(&self) -> Complex64 {
        let n = self.n_orbitals();
        let m = self.order;
        let total = n.pow(m as u32);
        let mut acc = Complex64::default();
        let mut idx = vec![0usize; 2 * m];
        for flat in 0..total {
            let mut f = flat;
            for k in 0..m {
                idx[k] = f % n;
                idx[m + k] = f % n;
                f /= n;
            }
            acc += self.tensor[idx.as_slice()];
        }
        acc
    }

    /// Largest `|D^P_Q - conj(D^Q_P)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = self.order;
        let mut worst: f64 = 0.0;
        for (idx, v) in self.tensor.indexed_iter() {
            let idx = idx.slice().to_vec();
            let idx = idx.as_slice();
            let mut swapped = vec![0usize; 2 * m];
            swapped[..m].copy_from_slice(&idx[m..]);
            swapped[m..].copy_from_slice(&idx[..m]);
            worst = worst.max((v - self.tensor[swapped.as_slice()].conj()).norm());
        }
        worst
    }

    /// Largest deviation from antisymmetry under swapping the first two upper
    /// or the first two lower indices.
    pub fn antisymmetry_defect(&self) -> f64 {
        let m = self.order;
        if m < 2 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for (idx, v) in self.tensor.indexed_iter() {
            let idx = idx.slice().to_vec();
            for base in [0, m] {
                let mut s = idx.clone();
                s.swap(base, base + 1);
                worst = worst.max((v + self.tensor[s.as_slice()]).norm());
            }
        }
        worst
    }

    /// Entrywise difference, largest magnitude.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.tensor.iter().zip(other.tensor.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `D^{pq}_{rs}` for `m = 2` from `D^{pqt}_{rst}` by partial trace:
    /// `(m+1)/(N-m)` times the contraction over the last index.
    pub fn partial_trace(&self, n_electrons: usize) -> Self {
        let m = self.order;
        assert!(m >= 2);
        let n = self.n_orbitals();
        let factor = m as f64 / (n_electrons as f64 - (m as f64 - 1.0));
        let mut out = Self::zeros(m - 1, n);
        let mut full = vec![0usize; 2 * m];
        for (idx, slot) in out.tensor.indexed_iter_mut() {
            let idx = idx.slice().to_vec();
            let idx = idx.as_slice();
            let mut acc = Complex64::default();
            for t in 0..n {
                full[..m - 1].copy_from_slice(&idx[..m - 1]);
                full[m - 1] = t;
                full[m..2 * m - 1].copy_from_slice(&idx[m - 1..]);
                full[2 * m - 1] = t;
                acc += self.tensor[full.as_slice()];
            }
            *slot = acc * factor;
        }
        out
    }
}

/// `(a ^ b)^{p1 p2}_{q1 q2} = 1/4 sum sgn(pi) sgn(sigma) a^{pi1}_{sigma1} b^{pi2}_{sigma2}`.
pub fn wedge_11(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array4<Complex64> {
    let n = a.nrows();
    let mut out = Array4::zeros((n, n, n, n));
    for p1 in 0..n {
        for p2 in 0..n {
            for q1 in 0..n {
                for q2 in 0..n {
                    out[[p1, p2, q1, q2]] = (a[[p1, q1]] * b[[p2, q2]] - a[[p2, q1]] * b[[p1, q2]]
                        - a[[p1, q2]] * b[[p2, q1]]
                        + a[[p2, q2]] * b[[p1, q1]])
                        * 0.25;
                }
            }
        }
    }
    out
}

fn sorted_fill6(n: usize, mut value: impl FnMut(&[usize], &[usize]) -> Complex64) -> Rdm {
    let combos = Combinations::new(n, 3);
    let subsets: Vec<Vec<usize>> = combos.iter().collect();
    let len = subsets.len();
    let mut sorted = vec![Complex64::default(); len * len];
    for (ip, p) in subsets.iter().enumerate() {
        for (iq, q) in subsets.iter().enumerate() {
            sorted[ip * len + iq] = value(p, q);
        }
    }
    Rdm::from_sorted(3, n, &combos, &sorted)
}

/// `(A ^ B)` for a two-index antisymmetric `A` and one-index `B`, with the
/// `1/(3!)^2` normalization.
pub fn wedge_21(a: &Array4<Complex64>, b: &Array2<Complex64>) -> Rdm {
    let n = b.nrows();
    let perms = signed_permutations(3);
    sorted_fill6(n, |p, q| {
        let mut acc = Complex64::default();
        for (pp, sp) in &perms {
            for (pq, sq) in &perms {
                acc += a[[p[pp[0]], p[pp[1]], q[pq[0]], q[pq[1]]]] * b[[p[pp[2]], q[pq[2]]]] * (sp * sq);
            }
        }
        acc / 36.0
    })
}

/// `D ^ D ^ D` for a one-index `D`: `det(D[P, Q]) / 6`.
pub fn wedge_111(d: &Array2<Complex64>) -> Rdm {
    let n = d.nrows();
    sorted_fill6(n, |p, q| det3(d, p, q) / 6.0)
}

fn det3(d: &Array2<Complex64>, p: &[usize], q: &[usize]) -> Complex64 {
    let m = |i: usize, j: usize| d[[p[i], q[j]]];
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

/// Two-body cumulant `D2 - D1 ^ D1`.
pub fn cumulant2(d1: &Array2<Complex64>, d2: &Array4<Complex64>) -> Array4<Complex64> {
    d2 - &wedge_11(d1, d1)
}

/// Cumulant reconstruction `D3 ~ D1^D1^D1 + 3 Delta2 ^ D1`.
pub fn valdemoro3(d1: &Array2<Complex64>, d2: &Array4<Complex64>) -> Rdm {
    let n = d1.nrows();
    let delta = cumulant2(d1, d2);
    let perms = signed_permutations(3);
    sorted_fill6(n, |p, q| {
        let mut acc = Complex64::default();
        for (pp, sp) in &perms {
            for (pq, sq) in &perms {
                let v = delta[[p[pp[0]], p[pp[1]], q[pq[0]], q[pq[1]]]];
                if v != Complex64::default() {
                    acc += v * d1[[p[pp[2]], q[pq[2]]]] * (sp * sq);
                }
            }
        }
        det3(d1, p, q) / 6.0 + acc * (3.0 / 36.0)
    })
}

/// `sum H^{pq}_{rs} D^{pq}_{rs}` with `H` the reduced two-body Hamiltonian.
pub fn energy_from_2rdm(h2_reduced: &Array4<f64>, d2: &Array4<Complex64>) -> f64 {
    h2_reduced.iter().zip(d2.iter()).map(|(h, d)| h * d.re).sum()
}

/// `<[a+_p a_q, H]>` from the 1- and 2-RDM.
pub fn residual_one_body(
    p: usize,
    q: usize,
    h1: &Array2<f64>,
    v2: &Array4<f64>,
    d1: &Array2<Complex64>,
    d2: &Array4<Complex64>,
) -> Complex64 {
    let n = h1.nrows();
    let mut acc = Complex64::default();
    for s in 0..n {
        acc += d1[[p, s]] * h1[[q, s]];
        acc -= d1[[s, q]] * h1[[s, p]];
    }
    for s in 0..n {
        for t in 0..n {
            for u in 0..n {
                let a = v2[[q, s, t, u]];
                if a != 0.0 {
                    acc += d2[[p, s, t, u]] * (2.0 * a);
                }
                let b = v2[[t, u, p, s]];
                if b != 0.0 {
                    acc -= d2[[t, u, q, s]] * (2.0 * b);
                }
            }
        }
    }
    acc
}

/// `<[a+_p1 a+_p2 a_q1 a_q2, H]>` from the 2- and 3-RDM.
#[allow(clippy::too_many_arguments)]
pub fn residual_two_body(
    p1: usize,
    p2: usize,
    q1: usize,
    q2: usize,
    h1: &Array2<f64>,
    v2: &Array4<f64>,
    d2: &Array4<Complex64>,
    d3: &Array6<Complex64>,
) -> Complex64 {
    let n = h1.nrows();
    let mut acc = Complex64::default();
    for k in 0..n {
        acc += d2[[p1, p2, k, q1]] * (2.0 * h1[[q2, k]]);
        acc -= d2[[p1, p2, k, q2]] * (2.0 * h1[[q1, k]]);
        acc -= d2[[k, p2, q2, q1]] * (2.0 * h1[[k, p1]]);
        acc += d2[[k, p1, q2, q1]] * (2.0 * h1[[k, p2]]);
    }
    for a in 0..n {
        for b in 0..n {
            let v = v2[[q2, q1, b, a]];
            if v != 0.0 {
                acc += d2[[p1, p2, b, a]] * (2.0 * v);
            }
            let v = v2[[b, a, p1, p2]];
            if v != 0.0 {
                acc += d2[[a, b, q2, q1]] * (2.0 * v);
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                // a = p3, b = q3, c = q4
                let v = v2[[q2, a, c, b]];
                if v != 0.0 {
                    acc -= d3[[p1, p2, a, c, b, q1]] * (6.0 * v);
                }
                let v = v2[[q1, a, c, b]];
                if v != 0.0 {
                    acc += d3[[p1, p2, a, c, b, q2]] * (6.0 * v);
                }
                // a = p3, b = p4, c = q3
                let v = v2[[b, a, p1, c]];
                if v != 0.0 {
                    acc -= d3[[a, b, p2, q2, q1, c]] * (6.0 * v);
                }
                let v = v2[[a, b, c, p2]];
                if v != 0.0 {
                    acc += d3[[a, b, p1, q2, q1, c]] * (6.0 * v);
                }
            }
        }
    }
    acc
}
