//! BFGS minimization and the product-of-exponentials energy objective.

use crate::error::{Error, Result};
use crate::operators::PauliSum;
use crate::statevector::{dot_real, Basis, RealSparse, SparseOperator, State};

pub const GRADIENT_TOL: f64 = 1e-7;
pub const MAX_ITERATIONS: usize = 10_000;

/// A differentiable scalar function of `dimension` parameters.
pub trait Objective {
    fn dimension(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>);
}

/// Objective built from a pair of closures.
pub struct ObjectiveBundle<'a> {
    pub dimension: usize,
    pub evaluate: Box<dyn Fn(&[f64]) -> f64 + Sync + 'a>,
    pub gradient: Box<dyn Fn(&[f64]) -> Vec<f64> + Sync + 'a>,
}

impl Objective for ObjectiveBundle<'_> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.evaluate)(x)
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        ((self.evaluate)(x), (self.gradient)(x))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub gradient_tol: f64,
    pub max_iterations: usize,
    pub c1: f64,
    pub c2: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { gradient_tol: GRADIENT_TOL, max_iterations: MAX_ITERATIONS, c1: 1e-4, c2: 0.9 }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_max: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Set when the line search could not satisfy the Wolfe conditions.
    pub line_search_failed: bool,
    /// `iter, energy, grad_norm, step`
    pub log: Vec<String>,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dotr(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(x: &[f64], alpha: f64, p: &[f64]) -> Vec<f64> {
    x.iter().zip(p).map(|(a, b)| a + alpha * b).collect()
}

struct Probe {
    alpha: f64,
    f: f64,
    g: Vec<f64>,
    slope: f64,
}

fn cubic_min(a: &Probe, b: &Probe) -> f64 {
    let (lo, hi) = if a.alpha < b.alpha { (a.alpha, b.alpha) } else { (b.alpha, a.alpha) };
    let d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.slope * b.slope;
    let mid = 0.5 * (lo + hi);
    if disc < 0.0 {
        return mid;
    }
    let d2 = disc.sqrt() * (b.alpha - a.alpha).signum();
    let t = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
    let margin = 0.1 * (hi - lo);
    if t.is_finite() && t > lo + margin && t < hi - margin {
        t
    } else {
        mid
    }
}

/// Strong-Wolfe line search. Returns the accepted probe or `None`.
fn line_search(
    obj: &dyn Objective,
    x: &[f64],
    f0: f64,
    slope0: f64,
    p: &[f64],
    opts: &BfgsOptions,
    evaluations: &mut usize,
) -> Option<Probe> {
    let slack = 4.0 * f64::EPSILON * f0.abs().max(1.0);
    let probe = |alpha: f64, evaluations: &mut usize| {
        *evaluations += 1;
        let (f, g) = obj.value_and_gradient(&axpy(x, alpha, p));
        let slope = dotr(&g, p);
        Probe { alpha, f, g, slope }
    };
    let armijo = |pr: &Probe| pr.f <= f0 + opts.c1 * pr.alpha * slope0 + slack;
    let curvature = |pr: &Probe| pr.slope.abs() <= opts.c2 * slope0.abs();

    let mut prev = Probe { alpha: 0.0, f: f0, g: Vec::new(), slope: slope0 };
    let mut alpha = 1.0;
    for i in 0..30 {
        let cur = probe(alpha, evaluations);
        if !cur.f.is_finite() {
            alpha *= 0.5;
            continue;
        }
        if !armijo(&cur) || (i > 0 && cur.f >= prev.f) {
            return zoom(prev, cur, f0, slope0, opts, slack, &probe, evaluations);
        }
        if curvature(&cur) {
            return Some(cur);
        }
        if cur.slope >= 0.0 {
            return zoom(cur, prev, f0, slope0, opts, slack, &probe, evaluations);
        }
        alpha *= 2.0;
        prev = cur;
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn zoom(
    mut lo: Probe,
    mut hi: Probe,
    f0: f64,
    slope0: f64,
    opts: &BfgsOptions,
    slack: f64,
    probe: &dyn Fn(f64, &mut usize) -> Probe,
    evaluations: &mut usize,
) -> Option<Probe> {
    for _ in 0..40 {
        let alpha = cubic_min(&lo, &hi);
        if (hi.alpha - lo.alpha).abs() < 1e-14 * lo.alpha.abs().max(1.0) {
            break;
        }
        let cur = probe(alpha, evaluations);
        if cur.f > f0 + opts.c1 * alpha * slope0 + slack || cur.f >= lo.f {
            hi = cur;
        } else {
            if cur.slope.abs() <= opts.c2 * slope0.abs() {
                return Some(cur);
            }
            if cur.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
    }
    // accept a decreasing point even if the curvature test never passed
    if lo.alpha > 0.0 && lo.f < f0 {
        Some(lo)
    } else {
        None
    }
}

/// BFGS with a strong-Wolfe line search; returns the best point seen.
pub fn minimize(obj: &dyn Objective, x0: &[f64], opts: &BfgsOptions) -> Minimum {
    let n = obj.dimension();
    assert_eq!(x0.len(), n, "starting point has wrong dimension");
    let mut evaluations = 1;
    let (mut f, mut g) = obj.value_and_gradient(x0);
    let mut x = x0.to_vec();
    let mut hinv: Vec<f64> = (0..n * n).map(|k| if k % (n + 1) == 0 { 1.0 } else { 0.0 }).collect();
    let mut log = Vec::new();
    let mut line_search_failed = false;
    let mut iterations = 0;
    let mut first_step = true;

    while iterations < opts.max_iterations && max_abs(&g) >= opts.gradient_tol {
        let mut p: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| hinv[i * n + j] * g[j]).sum::<f64>()).collect();
        let mut slope = dotr(&g, &p);
        if slope >= 0.0 {
            // lost positive definiteness; restart from steepest descent
            hinv.iter_mut().enumerate().for_each(|(k, h)| *h = if k % (n + 1) == 0 { 1.0 } else { 0.0 });
            p = g.iter().map(|v| -v).collect();
            slope = dotr(&g, &p);
        }
        let Some(acc) = line_search(obj, &x, f, slope, &p, opts, &mut evaluations) else {
            line_search_failed = true;
            let gmax = max_abs(&g);
            if gmax > 1e3 * opts.gradient_tol {
                log::warn!("line search failed at iteration {iterations}, |g|_max = {gmax:.3e}");
            } else {
                log::debug!("line search stopped at round-off, iteration {iterations}, |g|_max = {gmax:.3e}");
            }
            break;
        };
        iterations += 1;
        let s: Vec<f64> = p.iter().map(|v| v * acc.alpha).collect();
        let y: Vec<f64> = acc.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dotr(&s, &y);
        x = axpy(&x, acc.alpha, &p);
        f = acc.f;
        g = acc.g;
        log.push(format!("{iterations}, {f:.12}, {:.3e}, {:.3e}", max_abs(&g), acc.alpha));
        if sy > 1e-300 {
            if first_step {
                let scale = sy / dotr(&y, &y);
                hinv.iter_mut().for_each(|h| *h *= scale);
                first_step = false;
            }
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| hinv[i * n + j] * y[j]).sum()).collect();
            let yhy = dotr(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] +=
                        -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
    }
    let gradient_max = max_abs(&g);
    Minimum {
        x,
        value: f,
        gradient_max,
        iterations,
        evaluations,
        converged: gradient_max < opts.gradient_tol,
        line_search_failed,
        log,
    }
}

/// `|psi(theta)> = exp(theta_k G_k) ... exp(theta_1 G_1) |ref>` on a packed
/// real basis, minimizing `<psi| A |psi>` for a symmetric `A` given as a map.
pub struct AnsatzObjective<'a> {
    pub reference: &'a [f64],
    pub generators: Vec<&'a RealSparse>,
    pub apply_observable: &'a (dyn Fn(&[f64]) -> Vec<f64> + Sync),
}

impl AnsatzObjective<'_> {
    pub fn state(&self, theta: &[f64]) -> Vec<f64> {
        assert_eq!(theta.len(), self.generators.len());
        let mut psi = self.reference.to_vec();
        for (g, &t) in self.generators.iter().zip(theta) {
            psi = g.expm_apply(t, &psi);
        }
        psi
    }

    /// Two sweeps: forward to `psi`, then back through the layers carrying
    /// both the state and `A psi`.
    pub fn energy_and_gradient(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let mut phi = self.state(theta);
        let mut sigma = (self.apply_observable)(&phi);
        let energy = dot_real(&phi, &sigma);
        let mut grad = vec![0.0; theta.len()];
        for k in (0..theta.len()).rev() {
            let g = self.generators[k];
            grad[k] = 2.0 * dot_real(&sigma, &g.apply(&phi));
            if k > 0 {
                phi = g.expm_apply(-theta[k], &phi);
                sigma = g.expm_apply(-theta[k], &sigma);
            }
        }
        (energy, grad)
    }
}

impl Objective for AnsatzObjective<'_> {
    fn dimension(&self) -> usize {
        self.generators.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let psi = self.state(x);
        dot_real(&psi, &(self.apply_observable)(&psi))
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.energy_and_gradient(x)
    }
}

fn real_or_fault(op: SparseOperator) -> Result<RealSparse> {
    op.to_real().ok_or_else(|| Error::Fault("operator has complex matrix elements".into()))
}

/// Energy gradient of a product-of-exponentials ansatz in the full space.
/// Generators, Hamiltonian and reference must be real in the computational basis.
pub fn analytic_gradient(ansatz: &[PauliSum], theta: &[f64], reference: &State, h: &PauliSum) -> Result<Vec<f64>> {
    if ansatz.len() != theta.len() {
        return Err(Error::DimensionMismatch(ansatz.len(), theta.len()));
    }
    let basis = Basis::full(reference.n_qubits());
    let generators = ansatz
        .iter()
        .map(|g| SparseOperator::from_pauli(g, &basis).and_then(real_or_fault))
        .collect::<Result<Vec<_>>>()?;
    let ham = real_or_fault(SparseOperator::from_pauli(h, &basis)?)?;
    if reference.amplitudes().iter().any(|c| c.im != 0.0) {
        return Err(Error::Fault("reference state has complex amplitudes".into()));
    }
    let reference: Vec<f64> = reference.amplitudes().iter().map(|c| c.re).collect();
    let apply = |x: &[f64]| ham.apply(x);
    let obj = AnsatzObjective { reference: &reference, generators: generators.iter().collect(), apply_observable: &apply };
    Ok(obj.energy_and_gradient(theta).1)
}
