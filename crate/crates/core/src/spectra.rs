//! FCI oracle, variational quantum deflation and curve statistics.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adapt::{sector_of, AdaptConfig, AnsatzTrace, Deflation, Engine, PenaltyMode};
use crate::error::{Error, Result};
use crate::integrals::SpinHamiltonian;
use crate::operators::{FermionOperator, OperatorPool};
use crate::statevector::{dot_real, Basis, RealSparse, SparseOperator, State};

pub const HARTREE_TO_KCAL: f64 = 627.5095;

/// Fixed particle numbers per spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sector {
    pub n_alpha: usize,
    pub n_beta: usize,
}

impl Sector {
    /// From the electron count and `2 S_z`.
    pub fn new(n_electrons: usize, ms2: i64) -> Result<Self> {
        let twice_alpha = n_electrons as i64 + ms2;
        if twice_alpha < 0 || twice_alpha % 2 != 0 || twice_alpha > 2 * n_electrons as i64 {
            return Err(Error::Config(format!("no sector with N = {n_electrons}, 2Sz = {ms2}")));
        }
        let n_alpha = (twice_alpha / 2) as usize;
        Ok(Self { n_alpha, n_beta: n_electrons - n_alpha })
    }

    pub fn of_hamiltonian(ham: &SpinHamiltonian) -> Self {
        let (n_alpha, n_beta) = sector_of(&ham.hf_occupation());
        Self { n_alpha, n_beta }
    }

    pub fn n_electrons(&self) -> usize {
        self.n_alpha + self.n_beta
    }

    pub fn sz(&self) -> f64 {
        (self.n_alpha as f64 - self.n_beta as f64) / 2.0
    }

    pub fn basis(&self, n_spin_orbitals: usize) -> Basis {
        Basis::sector(n_spin_orbitals, self.n_alpha, self.n_beta)
    }
}

#[derive(Debug, Clone)]
pub struct EigenSolution {
    /// Ascending, `e_core` included.
    pub energies: Vec<f64>,
    pub states: Vec<State>,
    /// `<S^2>` of each state.
    pub spins: Vec<f64>,
    pub sector: Sector,
}

impl EigenSolution {
    /// Total spin quantum number `S` of root `i`, from `S(S+1)`.
    pub fn spin_quantum_number(&self, i: usize) -> f64 {
        ((1.0 + 4.0 * self.spins[i].max(0.0)).sqrt() - 1.0) / 2.0
    }
}

fn real(op: SparseOperator) -> Result<RealSparse> {
    op.to_real().ok_or_else(|| Error::Fault("complex matrix elements in a real problem".into()))
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot_real(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in against {
            let o = dot_real(q, v);
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= o * b);
        }
    }
}

/// Lanczos with full reorthogonalization. Invariant subspaces are left by
/// restarting from a fresh vector orthogonal to all previous ones, so a run
/// to the full dimension resolves degenerate eigenvalues. Returns the
/// lowest `k` eigenpairs.
pub fn lanczos(op: &RealSparse, k: usize, seed: u64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let dim = op.dim();
    let k = k.min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    // tridiagonal, except across restarts where the coupling is zero
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let full = dim <= 4000;
    let mut next: Option<Vec<f64>> = None;
    let mut last_check = 0;
    loop {
        let mut v = match next.take() {
            Some(v) => v,
            None => {
                let mut v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
                orthogonalize(&mut v, &basis);
                if normalize(&mut v) < 1e-10 {
                    break;
                }
                if !basis.is_empty() {
                    beta.push(0.0);
                }
                v
            }
        };
        orthogonalize(&mut v, &basis);
        normalize(&mut v);
        let mut w = op.apply(&v);
        let a = dot_real(&w, &v);
        alpha.push(a);
        basis.push(v);
        orthogonalize(&mut w, &basis);
        let b = dot_real(&w, &w).sqrt();
        if basis.len() == dim {
            break;
        }
        if b > 1e-10 {
            w.iter_mut().for_each(|x| *x /= b);
            beta.push(b);
            next = Some(w);
        }
        if !full && basis.len() >= last_check + 20 && basis.len() >= 2 * k {
            last_check = basis.len();
            let (vals, vecs) = tridiagonal_eigen(&alpha, &beta);
            let m = alpha.len();
            let coupling = if next.is_some() { *beta.last().unwrap() } else { 0.0 };
            let converged = (0..k).all(|i| (coupling * vecs[(m - 1, i)]).abs() < 1e-11 * vals[i].abs().max(1.0));
            if converged {
                break;
            }
        }
    }
    let (vals, vecs) = tridiagonal_eigen(&alpha, &beta);
    let m = alpha.len();
    let mut out_vecs = Vec::new();
    for i in 0..k.min(m) {
        let mut x = vec![0.0; dim];
        for (j, q) in basis.iter().enumerate() {
            let c = vecs[(j, i)];
            x.iter_mut().zip(q).for_each(|(a, b)| *a += c * b);
        }
        normalize(&mut x);
        out_vecs.push(x);
    }
    (vals[..k.min(m)].to_vec(), out_vecs)
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    sorted_eigen(t)
}

fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Rotate degenerate clusters onto `S^2` eigenvectors; returns `<S^2>` per vector.
fn resolve_spin(energies: &[f64], vecs: &mut [Vec<f64>], s2: &RealSparse) -> Vec<f64> {
    let mut start = 0;
    while start < energies.len() {
        let mut end = start + 1;
        while end < energies.len() && (energies[end] - energies[start]).abs() < 1e-8 {
            end += 1;
        }
        if end - start > 1 {
            let block: Vec<Vec<f64>> = vecs[start..end].to_vec();
            let images: Vec<Vec<f64>> = block.iter().map(|v| s2.apply(v)).collect();
            let n = block.len();
            let m = DMatrix::from_fn(n, n, |i, j| dot_real(&block[i], &images[j]));
            let m = (&m + m.transpose()) * 0.5;
            let (_, rot) = sorted_eigen(m);
            for c in 0..n {
                let mut x = vec![0.0; block[0].len()];
                for (r, b) in block.iter().enumerate() {
                    x.iter_mut().zip(b).for_each(|(a, y)| *a += rot[(r, c)] * y);
                }
                vecs[start + c] = x;
            }
        }
        start = end;
    }
    vecs.iter().map(|v| dot_real(v, &s2.apply(v))).collect()
}

struct SectorProblem {
    basis: Basis,
    h: RealSparse,
    s2: RealSparse,
}

fn sector_problem(ham: &SpinHamiltonian, sector: Sector) -> Result<SectorProblem> {
    let n = ham.n_spin_orbitals;
    let basis = sector.basis(n);
    if basis.is_empty() {
        return Err(Error::Empty("sector"));
    }
    let h = real(SparseOperator::from_fermion(&ham.fermion_operator(), &basis)?)?;
    let s2 = real(SparseOperator::from_fermion(&FermionOperator::spin_squared(n / 2), &basis)?)?;
    Ok(SectorProblem { basis, h, s2 })
}

fn to_state(basis: &Basis, v: &[f64]) -> State {
    let packed: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    State::from_packed(basis, &packed)
}

fn solution(ham: &SpinHamiltonian, p: &SectorProblem, sector: Sector, vals: Vec<f64>, mut vecs: Vec<Vec<f64>>) -> EigenSolution {
    let spins = resolve_spin(&vals, &mut vecs, &p.s2);
    EigenSolution {
        energies: vals.iter().map(|e| e + ham.e_core).collect(),
        states: vecs.iter().map(|v| to_state(&p.basis, v)).collect(),
        spins,
        sector,
    }
}

/// Lowest `k` eigenpairs in `sector`.
pub fn fci_solve(ham: &SpinHamiltonian, sector: Sector, k: usize) -> Result<EigenSolution> {
    let p = sector_problem(ham, sector)?;
    if k > p.basis.len() {
        return Err(Error::TooManyRoots { requested: k, available: p.basis.len() });
    }
    // extra roots so that degenerate partners of the k-th are included
    let want = (k + 4).min(p.basis.len());
    let (vals, vecs) = lanczos(&p.h, want, 11);
    let mut sol = solution(ham, &p, sector, vals, vecs);
    sol.energies.truncate(k);
    sol.states.truncate(k);
    sol.spins.truncate(k);
    Ok(sol)
}

/// Lowest `k` eigenpairs with total spin `s`.
pub fn fci_solve_spin(ham: &SpinHamiltonian, sector: Sector, k: usize, s: f64) -> Result<EigenSolution> {
    let p = sector_problem(ham, sector)?;
    let target = s * (s + 1.0);
    let mut want = (4 * k + 8).min(p.basis.len());
    loop {
        let (vals, vecs) = lanczos(&p.h, want, 11);
        let sol = solution(ham, &p, sector, vals, vecs);
        let keep: Vec<usize> = (0..sol.energies.len()).filter(|&i| (sol.spins[i] - target).abs() < 1e-6).collect();
        if keep.len() >= k || want == p.basis.len() {
            if keep.len() < k {
                return Err(Error::TooManyRoots { requested: k, available: keep.len() });
            }
            let keep = &keep[..k];
            return Ok(EigenSolution {
                energies: keep.iter().map(|&i| sol.energies[i]).collect(),
                states: keep.iter().map(|&i| sol.states[i].clone()).collect(),
                spins: keep.iter().map(|&i| sol.spins[i]).collect(),
                sector,
            });
        }
        want = (want * 2).min(p.basis.len());
    }
}

/// Dense diagonalization of the sector, for cross-checks on small systems.
pub fn fci_dense(ham: &SpinHamiltonian, sector: Sector) -> Result<Vec<f64>> {
    let p = sector_problem(ham, sector)?;
    let dim = p.basis.len();
    let mut m = DMatrix::zeros(dim, dim);
    for (r, c, v) in p.h.entries() {
        m[(r, c)] += v;
    }
    let (vals, _) = sorted_eigen(m);
    Ok(vals.iter().map(|e| e + ham.e_core).collect())
}

/// Upper Gershgorin bound of the sector Hamiltonian, `e_core` included.
pub fn gershgorin_max(ham: &SpinHamiltonian, engine: &Engine) -> f64 {
    let mut rows = vec![(0.0f64, 0.0f64); engine.basis.len()];
    for (r, c, v) in engine.h_op.entries() {
        if r == c {
            rows[r].0 += v;
        } else {
            rows[r].1 += v.abs();
        }
    }
    rows.iter().map(|(d, o)| d + o).fold(f64::NEG_INFINITY, f64::max) + ham.e_core
}

/// Starting configuration of a VQD root.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    /// Occupied spin orbitals of a single determinant.
    Determinant(Vec<usize>),
    /// Singlet `(E_{a i} + ...)/sqrt 2` excitation of the Hartree-Fock
    /// determinant between spatial orbitals `from -> to`.
    Singlet { from: usize, to: usize },
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::Determinant(occ) => {
                let s: Vec<String> = occ.iter().map(|i| i.to_string()).collect();
                write!(f, "det[{}]", s.join(","))
            }
            Reference::Singlet { from, to } => write!(f, "{from}->{to}"),
        }
    }
}

impl FromStr for Reference {
    type Err = Error;

    /// `3->4` for a singlet excitation, `0,1,2,5` for a determinant.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse reference `{s}`"));
        let s = s.trim();
        if let Some((a, b)) = s.split_once("->") {
            let from = a.trim().parse().map_err(|_| bad())?;
            let to = b.trim().parse().map_err(|_| bad())?;
            return Ok(Reference::Singlet { from, to });
        }
        let s = s.trim_start_matches("det[").trim_end_matches(']');
        let occ = s.split(',').map(|t| t.trim().parse::<usize>()).collect::<std::result::Result<Vec<_>, _>>().map_err(|_| bad())?;
        Ok(Reference::Determinant(occ))
    }
}

impl Reference {
    /// Packed reference vector on the engine basis.
    pub fn prepare(&self, engine: &Engine) -> Result<Vec<f64>> {
        match self {
            Reference::Determinant(occ) => engine.determinant(occ),
            Reference::Singlet { from, to } => {
                let hf = engine.determinant(&engine.ham.hf_occupation())?;
                let op = FermionOperator::hopping(2 * to, 2 * from).add(&FermionOperator::hopping(2 * to + 1, 2 * from + 1));
                let e = SparseOperator::from_fermion(&op, &engine.basis).and_then(real)?;
                let mut v = e.apply(&hf);
                if normalize(&mut v) < 1e-12 {
                    return Err(Error::Config(format!("excitation {self} annihilates the reference")));
                }
                Ok(v)
            }
        }
    }
}

/// HOMO -> LUMO + k singlet references for a closed-shell reference.
pub fn homo_lumo_references(ham: &SpinHamiltonian, up_to: usize) -> Vec<Reference> {
    let homo = ham.n_electrons / 2 - 1;
    (0..=up_to)
        .map(|k| Reference::Singlet { from: homo, to: homo + 1 + k })
        .filter(|r| matches!(r, Reference::Singlet { to, .. } if *to < ham.n_spin_orbitals / 2))
        .collect()
}

#[derive(Debug, Clone)]
pub struct VqdConfig {
    pub penalty_mode: PenaltyMode,
    /// Per deflated state; `None` selects `2 (E_max - E_I)` with a Gershgorin `E_max`.
    pub beta: Option<Vec<f64>>,
    pub deflation_states: Vec<State>,
    pub reference_candidates: Vec<Reference>,
    pub epsilon: f64,
}

impl VqdConfig {
    pub fn new(deflation_states: Vec<State>, reference_candidates: Vec<Reference>) -> Self {
        Self { penalty_mode: PenaltyMode::Penalty, beta: None, deflation_states, reference_candidates, epsilon: 1e-4 }
    }
}

/// Build the deflation on an engine basis.
pub fn deflation_for(cfg: &VqdConfig, engine: &Engine) -> Result<Deflation> {
    let mut states = Vec::new();
    for s in &cfg.deflation_states {
        let mut v = engine.pack_state(s)?;
        let n = normalize(&mut v);
        if (n - 1.0).abs() > 1e-6 {
            return Err(Error::Config(format!("deflation state has norm {n:.3e} in the target sector")));
        }
        states.push(v);
    }
    let betas = match &cfg.beta {
        Some(b) => {
            if b.len() != states.len() || b.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::Config("one positive beta per deflated state is required".into()));
            }
            b.clone()
        }
        None => {
            let emax = gershgorin_max(engine.ham, engine);
            states.iter().map(|v| 2.0 * (emax - engine.energy(v))).collect()
        }
    };
    Ok(Deflation { mode: cfg.penalty_mode, states, betas })
}

/// Deflated objective of `psi(theta)`: penalty or projector form.
pub fn vqd_objective(
    theta: &[f64],
    operators: &[usize],
    reference: &[f64],
    deflation: &Deflation,
    engine: &Engine,
) -> f64 {
    let psi = engine.ansatz_state(reference, operators, theta);
    dot_real(&psi, &deflation.apply(&engine.h_op, &psi)) + engine.ham.e_core
}

#[derive(Debug, Clone)]
pub struct VqdResult {
    /// Run with the lowest deflated objective.
    pub best: AnsatzTrace,
    pub best_reference: Reference,
    pub candidates: Vec<(Reference, std::result::Result<AnsatzTrace, String>)>,
    /// `|<I|psi>|` for each deflated state.
    pub overlaps: Vec<f64>,
}

/// One excited root: ADAPT against the deflated objective from each candidate reference.
pub fn run_vqd(cfg: &VqdConfig, adapt_cfg: &AdaptConfig, ham: &SpinHamiltonian, pool: &OperatorPool) -> Result<VqdResult> {
    if cfg.reference_candidates.is_empty() {
        return Err(Error::Empty("reference candidates"));
    }
    let sector = Sector::of_hamiltonian(ham);
    let engine = Engine::new(ham, pool, sector.n_alpha, sector.n_beta)?;
    let deflation = deflation_for(cfg, &engine)?;
    let adapt_cfg = AdaptConfig { epsilon: cfg.epsilon, ..adapt_cfg.clone() };
    let mut candidates = Vec::new();
    for r in &cfg.reference_candidates {
        let out = r.prepare(&engine).and_then(|psi| engine.run(&adapt_cfg, &psi, &deflation));
        candidates.push((r.clone(), out.map_err(|e| e.to_string())));
    }
    let objective = |t: &AnsatzTrace| t.records.last().map(|r| r.objective).unwrap_or(f64::INFINITY);
    let best_idx = candidates
        .iter()
        .enumerate()
        .filter_map(|(i, (_, t))| t.as_ref().ok().map(|t| (i, objective(t))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i);
    let Some(best_idx) = best_idx else {
        let why: Vec<String> = candidates.iter().map(|(r, t)| format!("{r}: {}", t.as_ref().err().unwrap())).collect();
        return Err(Error::Fault(format!("every reference failed: {}", why.join("; "))));
    };
    let best = candidates[best_idx].1.clone().unwrap();
    let psi = engine.pack_state(&best.state)?;
    let overlaps = deflation.states.iter().map(|s| dot_real(s, &psi).abs()).collect();
    Ok(VqdResult { best, best_reference: candidates[best_idx].0.clone(), candidates, overlaps })
}

/// Nonparallelity error: `max - min` of signed errors along a curve.
pub fn npe(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::Empty("error list"));
    }
    let max = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}
