#![allow(dead_code)]

use adapt_rdm::adapt::Engine;
use adapt_rdm::integrals::{to_spin_hamiltonian, SpinHamiltonian};
use adapt_rdm::{Complex64, MolecularIntegrals};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> MolecularIntegrals {
    let path = format!("{}/../../fixtures/{name}.fcidump", env!("CARGO_MANIFEST_DIR"));
    MolecularIntegrals::from_file(path).unwrap()
}

pub fn hamiltonian(name: &str) -> SpinHamiltonian {
    to_spin_hamiltonian(&fixture(name)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c /= n);
    v
}

/// Hartree-Fock evolved by `depth` random pool exponentials, angles in [-1, 1).
pub fn pool_evolved(engine: &Engine, rng: &mut ChaCha8Rng, depth: usize) -> Vec<f64> {
    let reference = engine.determinant(&engine.ham.hf_occupation()).unwrap();
    let ops: Vec<usize> = (0..depth).map(|_| rng.random_range(0..engine.generators.len())).collect();
    let theta: Vec<f64> = (0..depth).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
    engine.ansatz_state(&reference, &ops, &theta)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
