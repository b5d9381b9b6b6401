//! Adaptive ansatz growth: exact ADAPT, ADAPT-RDM, ADAPT-V and ADAPT-Vx.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, Array4, Array6};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrals::SpinHamiltonian;
use crate::operators::{OperatorPool, PauliSum, PoolKind};
use crate::optimizer::{minimize, AnsatzObjective, BfgsOptions};
use crate::rdm::{residual_one_body, residual_two_body, valdemoro3};
use crate::statevector::{
    dot_real, measure_rdm, measure_rdm_packed, Basis, RealSparse, SparseOperator, State,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Adapt,
    AdaptRdm,
    AdaptV,
    AdaptVx,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Adapt => "adapt",
            Variant::AdaptRdm => "adapt_rdm",
            Variant::AdaptV => "adapt_v",
            Variant::AdaptVx => "adapt_vx",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "adapt" => Ok(Variant::Adapt),
            "adapt_rdm" => Ok(Variant::AdaptRdm),
            "adapt_v" => Ok(Variant::AdaptV),
            "adapt_vx" => Ok(Variant::AdaptVx),
            other => Err(Error::Config(format!("unknown variant `{other}`"))),
        }
    }
}

/// Stopping test applied before each growth step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// `<H^2> - <H>^2 < epsilon`
    Variance,
    /// `||R||_2 < epsilon`, exact residuals only.
    ResidualNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptConfig {
    pub variant: Variant,
    pub n_update: usize,
    /// Auxiliary pool size for ADAPT-Vx. `None` means `max(30, n_update)`.
    pub n_aux: Option<usize>,
    pub epsilon: f64,
    pub criterion: Criterion,
    pub energy_stall: f64,
    pub max_iterations: usize,
    pub pool_kind: PoolKind,
    /// Occupied spin orbitals of the reference; `None` means Hartree-Fock.
    pub reference: Option<Vec<usize>>,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Adapt,
            n_update: 1,
            n_aux: None,
            epsilon: 1e-4,
            criterion: Criterion::Variance,
            energy_stall: 1e-10,
            max_iterations: 300,
            pool_kind: PoolKind::SpinAdaptedGsd,
            reference: None,
        }
    }
}

impl AdaptConfig {
    pub fn n_aux(&self) -> usize {
        self.n_aux.unwrap_or(self.n_update.max(30))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_update == 0 {
            return Err(Error::Config("N_u must be at least 1".into()));
        }
        if self.variant == Variant::AdaptVx && self.n_aux() < self.n_update {
            return Err(Error::Config(format!("N_m = {} is smaller than N_u = {}", self.n_aux(), self.n_update)));
        }
        if self.criterion == Criterion::ResidualNorm && self.variant != Variant::Adapt {
            return Err(Error::Config("the residual-norm criterion needs exact residuals (variant adapt)".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    Variance,
    ResidualNorm,
    EnergyStall,
    MaxIterations,
}

impl Convergence {
    /// Whether the run ended by meeting its convergence threshold.
    pub fn converged(&self) -> bool {
        matches!(self, Convergence::Variance | Convergence::ResidualNorm)
    }
}

impl fmt::Display for Convergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convergence::Variance => "variance",
            Convergence::ResidualNorm => "residual_norm",
            Convergence::EnergyStall => "energy_stall",
            Convergence::MaxIterations => "max_iterations",
        })
    }
}

#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iteration: usize,
    pub selected: Vec<usize>,
    pub labels: Vec<String>,
    pub residual_norm: f64,
    pub selected_residuals: Vec<f64>,
    /// Energy after re-optimization, `e_core` included.
    pub energy: f64,
    pub objective: f64,
    pub variance: f64,
    pub n_parameters: usize,
    pub optimizer_iterations: usize,
    pub gradient_max: f64,
    pub line_search_failed: bool,
}

#[derive(Debug, Clone)]
pub struct AnsatzTrace {
    pub variant: Variant,
    pub n_update: usize,
    pub n_aux: usize,
    pub reference_energy: f64,
    pub records: Vec<IterationRecord>,
    /// Pool indices of the ansatz, first applied first.
    pub operators: Vec<usize>,
    pub parameters: Vec<f64>,
    pub energy: f64,
    pub variance: f64,
    pub convergence: Convergence,
    pub state: State,
}

impl AnsatzTrace {
    /// Parameter count `N_s`.
    pub fn n_parameters(&self) -> usize {
        self.parameters.len()
    }

    /// Growth iterations `N_k`.
    pub fn n_iterations(&self) -> usize {
        self.records.len()
    }

    /// Human-readable per-iteration trace.
    pub fn render(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "# variant {} N_u {} N_m {}", self.variant, self.n_update, self.n_aux);
        let _ = writeln!(out, "# reference energy {:.12}", self.reference_energy);
        let _ = writeln!(out, "# iteration, |R|_2, energy, variance, N_s, bfgs_iterations, selected");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{}, {:.6e}, {:.12}, {:.6e}, {}, {}, {}",
                r.iteration,
                r.residual_norm,
                r.energy,
                r.variance,
                r.n_parameters,
                r.optimizer_iterations,
                r.labels.join(" ")
            );
        }
        let _ = writeln!(out, "# final energy {:.12} variance {:.6e} ({})", self.energy, self.variance, self.convergence);
        out
    }
}

/// Deflation of previously found states, used for excited roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyMode {
    /// `H + sum_I beta_I |I><I|`
    Penalty,
    /// `P H P` with `P = 1 - sum_I |I><I|`
    Projector,
}

impl FromStr for PenaltyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "penalty" => Ok(PenaltyMode::Penalty),
            "projector" => Ok(PenaltyMode::Projector),
            other => Err(Error::Config(format!("unknown penalty mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Deflation {
    pub mode: PenaltyMode,
    /// Packed on the engine basis.
    pub states: Vec<Vec<f64>>,
    pub betas: Vec<f64>,
}

impl Deflation {
    pub fn none() -> Self {
        Self { mode: PenaltyMode::Penalty, states: Vec::new(), betas: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for s in &self.states {
            let o = dot_real(s, x);
            out.iter_mut().zip(s).for_each(|(a, b)| *a -= o * b);
        }
        out
    }

    /// `A x` for the deflated observable built on `h`.
    pub fn apply(&self, h: &RealSparse, x: &[f64]) -> Vec<f64> {
        if self.states.is_empty() {
            return h.apply(x);
        }
        match self.mode {
            PenaltyMode::Penalty => {
                let mut y = h.apply(x);
                for (s, beta) in self.states.iter().zip(&self.betas) {
                    let o = beta * dot_real(s, x);
                    y.iter_mut().zip(s).for_each(|(a, b)| *a += o * b);
                }
                y
            }
            PenaltyMode::Projector => self.project(&h.apply(&self.project(x))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Tuple {
    One(usize, usize),
    Two(usize, usize, usize, usize),
}

/// RDM-level residual plan: each pool generator as a weighted sum of
/// one- and two-body ladder strings.
fn residual_plan(pool: &OperatorPool) -> Vec<Vec<(Tuple, f64)>> {
    pool.elements
        .iter()
        .map(|e| {
            e.generator
                .terms()
                .map(|(t, c)| {
                    let idx: Vec<usize> = t.iter().map(|l| l.index).collect();
                    let tuple = match idx.len() {
                        2 => Tuple::One(idx[0], idx[1]),
                        4 => Tuple::Two(idx[0], idx[1], idx[2], idx[3]),
                        _ => unreachable!("pool generators are one- and two-body"),
                    };
                    debug_assert!(c.im.abs() < 1e-14);
                    (tuple, c.re)
                })
                .collect()
        })
        .collect()
}

/// Source of the three-body density matrix in RDM residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeRdm {
    Exact,
    Valdemoro,
}

struct RdmSet {
    d1: Array2<Complex64>,
    d2: Array4<Complex64>,
    d3: Option<Array6<Complex64>>,
}

fn rdm_residuals(
    plan: &[Vec<(Tuple, f64)>],
    subset: Option<&[usize]>,
    ham: &SpinHamiltonian,
    rdms: &RdmSet,
) -> Vec<f64> {
    let mut cache: HashMap<Tuple, Complex64> = HashMap::new();
    let mut value = |t: Tuple| -> Complex64 {
        *cache.entry(t).or_insert_with(|| match t {
            Tuple::One(p, q) => residual_one_body(p, q, &ham.h1, &ham.v2, &rdms.d1, &rdms.d2),
            Tuple::Two(p1, p2, q1, q2) => residual_two_body(
                p1,
                p2,
                q1,
                q2,
                &ham.h1,
                &ham.v2,
                &rdms.d2,
                rdms.d3.as_ref().expect("three-body RDM available"),
            ),
        })
    };
    let indices: Vec<usize> = match subset {
        Some(s) => s.to_vec(),
        None => (0..plan.len()).collect(),
    };
    // <[H, tau]> = -sum_t c_t <[term_t, H]>
    indices.iter().map(|&u| -plan[u].iter().map(|&(t, c)| (value(t) * c).re).sum::<f64>()).collect()
}

fn measure_rdms(basis: &Basis, psi: &[f64], three: Option<ThreeRdm>) -> RdmSet {
    let packed: Vec<Complex64> = psi.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let d1 = measure_rdm_packed(basis, &packed, 1).as2();
    let d2 = measure_rdm_packed(basis, &packed, 2).as4();
    let d3 = match three {
        Some(ThreeRdm::Exact) => Some(measure_rdm_packed(basis, &packed, 3).as6()),
        Some(ThreeRdm::Valdemoro) => Some(valdemoro3(&d1, &d2).as6()),
        None => None,
    };
    RdmSet { d1, d2, d3 }
}

/// Indices of the `n` largest `|R_u|`, ties broken by lower index.
pub fn select_operators(residuals: &[f64], n: usize) -> Vec<usize> {
    let n = if n > residuals.len() {
        log::warn!("requested {n} operators from a pool of {}", residuals.len());
        residuals.len()
    } else {
        n
    };
    let mut order: Vec<usize> = (0..residuals.len()).collect();
    order.sort_by(|&a, &b| residuals[b].abs().total_cmp(&residuals[a].abs()).then(a.cmp(&b)));
    order.truncate(n);
    order
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Hamiltonian and pool compiled on one (N, S_z) sector.
pub struct Engine<'a> {
    pub ham: &'a SpinHamiltonian,
    pub pool: &'a OperatorPool,
    pub basis: Basis,
    pub h_op: RealSparse,
    pub generators: Vec<RealSparse>,
    plan: Vec<Vec<(Tuple, f64)>>,
}

fn real(op: SparseOperator) -> Result<RealSparse> {
    op.to_real().ok_or_else(|| Error::Fault("complex matrix elements in a real problem".into()))
}

impl<'a> Engine<'a> {
    pub fn new(ham: &'a SpinHamiltonian, pool: &'a OperatorPool, n_alpha: usize, n_beta: usize) -> Result<Self> {
        let n = ham.n_spin_orbitals;
        if pool.n_qubits() != n {
            return Err(Error::DimensionMismatch(pool.n_qubits(), n));
        }
        let basis = Basis::sector(n, n_alpha, n_beta);
        if basis.is_empty() {
            return Err(Error::Empty("sector"));
        }
        let h_op = real(SparseOperator::from_fermion(&ham.fermion_operator(), &basis)?)?;
        let generators = pool
            .elements
            .iter()
            .map(|e| SparseOperator::from_fermion(&e.generator, &basis).and_then(real))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ham, pool, basis, h_op, generators, plan: residual_plan(pool) })
    }

    /// Engine on the sector of the Hartree-Fock determinant.
    pub fn for_ground_state(ham: &'a SpinHamiltonian, pool: &'a OperatorPool) -> Result<Self> {
        let occ = ham.hf_occupation();
        let (na, nb) = sector_of(&occ);
        Self::new(ham, pool, na, nb)
    }

    pub fn pack_state(&self, s: &State) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.basis.len());
        for &b in self.basis.states() {
            let c = s.amplitudes()[b as usize];
            if c.im.abs() > 1e-12 {
                return Err(Error::Fault("complex amplitudes are not supported by the engine".into()));
            }
            out.push(c.re);
        }
        Ok(out)
    }

    pub fn unpack(&self, psi: &[f64]) -> State {
        let packed: Vec<Complex64> = psi.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        State::from_packed(&self.basis, &packed)
    }

    pub fn determinant(&self, occupied: &[usize]) -> Result<Vec<f64>> {
        let s = crate::statevector::prepare_reference(occupied, self.ham.n_spin_orbitals)?;
        let psi = self.pack_state(&s)?;
        if norm2(&psi) < 0.5 {
            return Err(Error::Config(format!("reference {occupied:?} is outside the engine sector")));
        }
        Ok(psi)
    }

    /// `<H>` including the core energy.
    pub fn energy(&self, psi: &[f64]) -> f64 {
        dot_real(psi, &self.h_op.apply(psi)) + self.ham.e_core
    }

    pub fn variance(&self, psi: &[f64]) -> f64 {
        let hx = self.h_op.apply(psi);
        let mean = dot_real(psi, &hx);
        hx.iter().zip(psi).map(|(a, b)| (a - mean * b).powi(2)).sum()
    }

    /// `R_u = 2 <A psi| tau_u psi>` for the deflated observable `A`.
    pub fn residuals_exact(&self, psi: &[f64], deflation: &Deflation, subset: Option<&[usize]>) -> Vec<f64> {
        let sigma = deflation.apply(&self.h_op, psi);
        let indices: Vec<usize> = match subset {
            Some(s) => s.to_vec(),
            None => (0..self.generators.len()).collect(),
        };
        indices.iter().map(|&u| 2.0 * dot_real(&sigma, &self.generators[u].apply(psi))).collect()
    }

    /// RDM residuals of `H`, plus the exact deflation correction.
    pub fn residuals_rdm(&self, psi: &[f64], mode: ThreeRdm, deflation: &Deflation, subset: Option<&[usize]>) -> Vec<f64> {
        let rdms = measure_rdms(&self.basis, psi, Some(mode));
        let mut r = rdm_residuals(&self.plan, subset, self.ham, &rdms);
        if !deflation.is_empty() {
            let hx = self.h_op.apply(psi);
            let corr: Vec<f64> = deflation.apply(&self.h_op, psi).iter().zip(&hx).map(|(a, b)| a - b).collect();
            let indices: Vec<usize> = match subset {
                Some(s) => s.to_vec(),
                None => (0..self.generators.len()).collect(),
            };
            for (ri, &u) in r.iter_mut().zip(&indices) {
                *ri += 2.0 * dot_real(&corr, &self.generators[u].apply(psi));
            }
        }
        r
    }

    pub fn ansatz_state(&self, reference: &[f64], operators: &[usize], theta: &[f64]) -> Vec<f64> {
        let mut psi = reference.to_vec();
        for (&u, &t) in operators.iter().zip(theta) {
            psi = self.generators[u].expm_apply(t, &psi);
        }
        psi
    }

    /// Algorithm loop from `reference` under `deflation`.
    pub fn run(&self, cfg: &AdaptConfig, reference: &[f64], deflation: &Deflation) -> Result<AnsatzTrace> {
        cfg.validate()?;
        let n_aux = cfg.n_aux();
        let apply = |x: &[f64]| deflation.apply(&self.h_op, x);
        let objective_of = |x: &[f64]| dot_real(x, &apply(x));

        let mut operators: Vec<usize> = Vec::new();
        let mut theta: Vec<f64> = Vec::new();
        let mut psi = reference.to_vec();
        let mut objective = objective_of(&psi);
        let reference_energy = self.energy(&psi);
        let mut records = Vec::new();
        let convergence;

        loop {
            let variance = self.variance(&psi);
            if cfg.criterion == Criterion::Variance && variance < cfg.epsilon {
                convergence = Convergence::Variance;
                break;
            }
            if records.len() >= cfg.max_iterations {
                convergence = Convergence::MaxIterations;
                break;
            }
            let (residuals, candidates): (Vec<f64>, Vec<usize>) = match cfg.variant {
                Variant::Adapt => {
                    let r = self.residuals_exact(&psi, deflation, None);
                    let sel = select_operators(&r, cfg.n_update);
                    (r, sel)
                }
                Variant::AdaptRdm => {
                    let r = self.residuals_rdm(&psi, ThreeRdm::Exact, deflation, None);
                    let sel = select_operators(&r, cfg.n_update);
                    (r, sel)
                }
                Variant::AdaptV => {
                    let r = self.residuals_rdm(&psi, ThreeRdm::Valdemoro, deflation, None);
                    let sel = select_operators(&r, cfg.n_update);
                    (r, sel)
                }
                Variant::AdaptVx => {
                    let screen = self.residuals_rdm(&psi, ThreeRdm::Valdemoro, deflation, None);
                    let aux = select_operators(&screen, n_aux);
                    let exact = self.residuals_exact(&psi, deflation, Some(&aux));
                    let local = select_operators(&exact, cfg.n_update);
                    let mut r = screen;
                    for (&u, &v) in aux.iter().zip(&exact) {
                        r[u] = v;
                    }
                    (r, local.iter().map(|&k| aux[k]).collect())
                }
            };
            let residual_norm = norm2(&residuals);
            if cfg.criterion == Criterion::ResidualNorm && residual_norm < cfg.epsilon {
                convergence = Convergence::ResidualNorm;
                break;
            }
            operators.extend(&candidates);
            theta.extend(std::iter::repeat_n(0.0, candidates.len()));
            let obj = AnsatzObjective {
                reference,
                generators: operators.iter().map(|&u| &self.generators[u]).collect(),
                apply_observable: &apply,
            };
            let min = minimize(&obj, &theta, &BfgsOptions::default());
            for line in &min.log {
                log::trace!("bfgs {line}");
            }
            theta = min.x;
            psi = obj.state(&theta);
            let previous = objective;
            objective = min.value;
            if objective > previous + 1e-10 {
                return Err(Error::Fault(format!(
                    "objective rose from {previous:.12} to {objective:.12} at iteration {}",
                    records.len() + 1
                )));
            }
            let record = IterationRecord {
                iteration: records.len() + 1,
                labels: candidates.iter().map(|&u| self.pool.elements[u].label.to_string()).collect(),
                selected_residuals: candidates.iter().map(|&u| residuals[u]).collect(),
                selected: candidates,
                residual_norm,
                energy: self.energy(&psi),
                objective,
                variance: self.variance(&psi),
                n_parameters: theta.len(),
                optimizer_iterations: min.iterations,
                gradient_max: min.gradient_max,
                line_search_failed: min.line_search_failed,
            };
            log::debug!(
                "iteration {} energy {:.10} variance {:.3e} N_s {}",
                record.iteration,
                record.energy,
                record.variance,
                record.n_parameters
            );
            records.push(record);
            if (previous - objective).abs() < cfg.energy_stall {
                convergence = Convergence::EnergyStall;
                break;
            }
        }
        Ok(AnsatzTrace {
            variant: cfg.variant,
            n_update: cfg.n_update,
            n_aux,
            reference_energy,
            records,
            energy: self.energy(&psi),
            variance: self.variance(&psi),
            operators,
            parameters: theta,
            convergence,
            state: self.unpack(&psi),
        })
    }
}

/// `(n_alpha, n_beta)` of an occupation list.
pub fn sector_of(occupied: &[usize]) -> (usize, usize) {
    let na = occupied.iter().filter(|&&i| i % 2 == 0).count();
    (na, occupied.len() - na)
}

/// Ground-state ADAPT run from `cfg.reference` (Hartree-Fock by default).
pub fn run_adapt(cfg: &AdaptConfig, ham: &SpinHamiltonian, pool: &OperatorPool) -> Result<AnsatzTrace> {
    let occ = cfg.reference.clone().unwrap_or_else(|| ham.hf_occupation());
    let (na, nb) = sector_of(&occ);
    let engine = Engine::new(ham, pool, na, nb)?;
    let reference = engine.determinant(&occ)?;
    engine.run(cfg, &reference, &Deflation::none())
}

/// `R_u = <s|[H, tau_u]|s>` over the full space.
pub fn residuals_exact(s: &State, pool: &OperatorPool, h: &PauliSum) -> Result<Vec<f64>> {
    let basis = Basis::full(s.n_qubits());
    let hs = SparseOperator::from_pauli(h, &basis)?.apply(s.amplitudes());
    pool.elements
        .iter()
        .map(|e| {
            let ts = SparseOperator::from_pauli(&e.qubit_generator, &basis)?.apply(s.amplitudes());
            Ok(2.0 * crate::statevector::dot(&hs, &ts).re)
        })
        .collect()
}

/// Residuals from measured 1-, 2- and exact or reconstructed 3-RDMs.
pub fn residuals_rdm(s: &State, pool: &OperatorPool, ham: &SpinHamiltonian, mode: ThreeRdm) -> Vec<f64> {
    let d1 = measure_rdm(s, 1).as2();
    let d2 = measure_rdm(s, 2).as4();
    let d3 = match mode {
        ThreeRdm::Exact => measure_rdm(s, 3).as6(),
        ThreeRdm::Valdemoro => valdemoro3(&d1, &d2).as6(),
    };
    rdm_residuals(&residual_plan(pool), None, ham, &RdmSet { d1, d2, d3: Some(d3) })
}

/// Measurement term counts in the style of the resource table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    pub variant: Variant,
    pub n_spin_orbitals: usize,
    pub pool_size: usize,
    pub ham_terms: usize,
    /// Terms measured per growth iteration to obtain residuals.
    pub residual_terms: usize,
    /// `N_s` of the run, if one is given.
    pub n_parameters: Option<usize>,
    pub n_iterations: Option<usize>,
}

fn spin(p: usize) -> usize {
    p % 2
}

/// Unique Hermitian one-body terms `p >= q` of equal spin.
pub fn count_one_body(n: usize) -> usize {
    (0..n).flat_map(|p| (0..=p).map(move |q| (p, q))).filter(|&(p, q)| spin(p) == spin(q)).count()
}

/// Unique Hermitian two-body terms: pairs `(p>q)`, `(r>s)` with equal spin
/// content and `(p,q) >= (r,s)`; also the unique 2-RDM element count.
pub fn count_two_body(n: usize) -> usize {
    let mut classes = [0usize; 3];
    for p in 0..n {
        for q in 0..p {
            classes[spin(p) + spin(q)] += 1;
        }
    }
    classes.iter().map(|v| v * (v + 1) / 2).sum()
}

/// Unique 3-RDM elements under antisymmetry, Hermiticity and S_z.
pub fn count_three_body(n: usize) -> usize {
    let mut classes = [0usize; 4];
    for p in 0..n {
        for q in 0..p {
            for r in 0..q {
                classes[spin(p) + spin(q) + spin(r)] += 1;
            }
        }
    }
    classes.iter().map(|v| v * (v + 1) / 2).sum()
}

/// Size of the unrestricted generalized singles-and-doubles pool on `n` spin orbitals.
pub fn count_unrestricted_pool(n: usize) -> usize {
    let singles = (0..n).flat_map(|p| (0..p).map(move |q| (p, q))).filter(|&(p, q)| spin(p) == spin(q)).count();
    let mut classes = [0usize; 3];
    for p in 0..n {
        for q in 0..p {
            classes[spin(p) + spin(q)] += 1;
        }
    }
    singles + classes.iter().map(|v| v * v.saturating_sub(1) / 2).sum::<usize>()
}

pub fn measurement_cost(
    cfg: &AdaptConfig,
    n_spin_orbitals: usize,
    pool_size: usize,
    trace: Option<&AnsatzTrace>,
) -> CostReport {
    let n = n_spin_orbitals;
    let ham_terms = count_one_body(n) + count_two_body(n);
    let rdm12 = count_one_body(n) + count_two_body(n);
    let residual_terms = match cfg.variant {
        Variant::Adapt => pool_size * ham_terms,
        Variant::AdaptRdm => count_two_body(n) + count_three_body(n),
        Variant::AdaptV => rdm12,
        Variant::AdaptVx => rdm12 + cfg.n_aux() * ham_terms,
    };
    CostReport {
        variant: cfg.variant,
        n_spin_orbitals: n,
        pool_size,
        ham_terms,
        residual_terms,
        n_parameters: trace.map(|t| t.n_parameters()),
        n_iterations: trace.map(|t| t.n_iterations()),
    }
}
