use adapt_rdm::integrals::to_spin_hamiltonian;
use adapt_rdm::operators::{FermionOperator, Ladder};
use adapt_rdm::rdm::{energy_from_2rdm, residual_one_body, residual_two_body, valdemoro3, wedge_11};
use adapt_rdm::spectra::{fci_solve, Sector};
use adapt_rdm::statevector::{dot, measure_rdm_packed, Basis, SparseOperator};
use adapt_rdm::{Complex64, MolecularIntegrals};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> MolecularIntegrals {
    let path = format!("{}/../../fixtures/{name}.fcidump", env!("CARGO_MANIFEST_DIR"));
    MolecularIntegrals::from_file(path).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c /= n);
    v
}

fn commutator_expectation(
    op: &FermionOperator,
    ham: &SparseOperator,
    basis: &Basis,
    full_state: &[Complex64],
) -> Complex64 {
    let a = SparseOperator::from_fermion(op, basis).unwrap();
    let ha = ham.apply(&a.apply(full_state));
    let ah = a.apply(&ham.apply(full_state));
    dot(full_state, &ah) - dot(full_state, &ha)
}

#[test]
fn contractions_match_commutators_on_random_states() {
    let ham = to_spin_hamiltonian(&fixture("h4_1.8")).unwrap();
    let n = ham.n_spin_orbitals;
    let full = Basis::full(n);
    let h_full = SparseOperator::from_fermion(&ham.fermion_operator(), &full).unwrap();
    let sector = Basis::sector(n, 2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    for _ in 0..3 {
        let packed = random_state(&mut rng, sector.len());
        let mut full_state = vec![Complex64::default(); full.len()];
        for (&b, &c) in sector.states().iter().zip(&packed) {
            full_state[b as usize] = c;
        }
        let d1 = measure_rdm_packed(&sector, &packed, 1).as2();
        let d2 = measure_rdm_packed(&sector, &packed, 2).as4();
        let d3 = measure_rdm_packed(&sector, &packed, 3).as6();

        let mut worst1: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                let exact = commutator_expectation(&FermionOperator::hopping(p, q), &h_full, &full, &full_state);
                let rdm = residual_one_body(p, q, &ham.h1, &ham.v2, &d1, &d2);
                worst1 = worst1.max((exact - rdm).norm());
            }
        }
        assert!(worst1 < 1e-10, "one-body residual deviation {worst1}");

        let mut worst2: f64 = 0.0;
        for _ in 0..200 {
            let idx: Vec<usize> = (0..4).map(|_| rng.random_range(0..n)).collect();
            let op = FermionOperator::from_term(
                vec![Ladder::create(idx[0]), Ladder::create(idx[1]), Ladder::annihilate(idx[2]), Ladder::annihilate(idx[3])],
                Complex64::new(1.0, 0.0),
            );
            let exact = commutator_expectation(&op, &h_full, &full, &full_state);
            let rdm = residual_two_body(idx[0], idx[1], idx[2], idx[3], &ham.h1, &ham.v2, &d2, &d3);
            let dev = (exact - rdm).norm();
            if dev > 1e-10 {
                eprintln!("{idx:?}: exact {exact} rdm {rdm}");
            }
            worst2 = worst2.max(dev);
        }
        assert!(worst2 < 1e-10, "two-body residual deviation {worst2}");
    }
}

fn determinant_state(n: usize, occupied: &[usize]) -> (Basis, Vec<Complex64>) {
    let bits: u64 = occupied.iter().map(|&i| 1u64 << i).sum();
    (Basis::from_states(n, vec![bits]), vec![Complex64::new(1.0, 0.0)])
}

#[test]
fn valdemoro_on_two_electron_states() {
    for occ in [[0usize, 1], [2, 5], [1, 3]] {
        let (basis, psi) = determinant_state(8, &occ);
        let d1 = measure_rdm_packed(&basis, &psi, 1).as2();
        let d2 = measure_rdm_packed(&basis, &psi, 2).as4();
        let worst = valdemoro3(&d1, &d2).tensor().iter().fold(0.0f64, |m, c| m.max(c.norm()));
        assert!(worst < 1e-10, "{occ:?}: {worst}");
    }
    // correlated pairs: the exact 3-RDM is zero but the reconstruction is not
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let basis = Basis::sector(8, 1, 1);
    for _ in 0..5 {
        let psi = random_state(&mut rng, basis.len());
        let d1 = measure_rdm_packed(&basis, &psi, 1).as2();
        let d2 = measure_rdm_packed(&basis, &psi, 2).as4();
        assert!(measure_rdm_packed(&basis, &psi, 3).tensor().iter().all(|c| c.norm() == 0.0));
        let worst = valdemoro3(&d1, &d2).tensor().iter().fold(0.0f64, |m, c| m.max(c.norm()));
        assert!(worst > 1e-4, "{worst}");
    }
}

#[test]
fn valdemoro_is_exact_on_three_electron_determinants() {
    for occ in [[0usize, 1, 2], [1, 4, 7], [0, 3, 5]] {
        let (basis, psi) = determinant_state(8, &occ);
        let d1 = measure_rdm_packed(&basis, &psi, 1).as2();
        let d2 = measure_rdm_packed(&basis, &psi, 2).as4();
        let exact = measure_rdm_packed(&basis, &psi, 3);
        assert!(valdemoro3(&d1, &d2).max_abs_diff(&exact) < 1e-10, "{occ:?}");
    }
}

#[test]
fn zero_inputs_contract_to_zero() {
    let ham = to_spin_hamiltonian(&fixture("h2_0.7414")).unwrap();
    let z2 = ndarray::Array4::<Complex64>::zeros((4, 4, 4, 4));
    assert_eq!(energy_from_2rdm(&ham.h2_reduced, &z2), 0.0);
    let z1 = ndarray::Array2::<Complex64>::zeros((4, 4));
    assert!(wedge_11(&z1, &z1).iter().all(|c| c.norm() == 0.0));
}

#[test]
fn hartree_fock_energy_from_two_rdm() {
    let mi = fixture("h2_0.7414");
    let ham = to_spin_hamiltonian(&mi).unwrap();
    let (basis, psi) = determinant_state(4, &[0, 1]);
    let d2 = measure_rdm_packed(&basis, &psi, 2).as4();
    assert!((energy_from_2rdm(&ham.h2_reduced, &d2) + ham.e_core - mi.closed_shell_energy()).abs() < 1e-9);
}

#[test]
fn two_body_contraction_is_antisymmetric() {
    let ham = to_spin_hamiltonian(&fixture("h4_1.8")).unwrap();
    let basis = Basis::sector(8, 2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let psi = random_state(&mut rng, basis.len());
    let d2 = measure_rdm_packed(&basis, &psi, 2).as4();
    let d3 = measure_rdm_packed(&basis, &psi, 3).as6();
    for _ in 0..100 {
        let i: Vec<usize> = (0..4).map(|_| rng.random_range(0..8)).collect();
        let r = |a, b, c, d| residual_two_body(a, b, c, d, &ham.h1, &ham.v2, &d2, &d3);
        let base = r(i[0], i[1], i[2], i[3]);
        assert!((base + r(i[1], i[0], i[2], i[3])).norm() < 1e-12);
        assert!((base + r(i[0], i[1], i[3], i[2])).norm() < 1e-12);
    }
}

#[test]
fn residuals_vanish_on_an_eigenstate() {
    let ham = to_spin_hamiltonian(&fixture("h4_1.8")).unwrap();
    let sol = fci_solve(&ham, Sector::of_hamiltonian(&ham), 1).unwrap();
    let basis = Basis::sector(8, 2, 2);
    let psi = sol.states[0].pack(&basis);
    let d1 = measure_rdm_packed(&basis, &psi, 1).as2();
    let d2 = measure_rdm_packed(&basis, &psi, 2).as4();
    let d3 = measure_rdm_packed(&basis, &psi, 3).as6();
    let mut worst: f64 = 0.0;
    for p in 0..8 {
        for q in 0..8 {
            worst = worst.max(residual_one_body(p, q, &ham.h1, &ham.v2, &d1, &d2).norm());
            for r in 0..8 {
                for s in 0..8 {
                    worst = worst.max(residual_two_body(p, q, r, s, &ham.h1, &ham.v2, &d2, &d3).norm());
                }
            }
        }
    }
    assert!(worst < 1e-9, "{worst}");
    assert!(valdemoro3(&d1, &d2).max_abs_diff(&measure_rdm_packed(&basis, &psi, 3)) > 1e-6);
}

#[test]
fn brillouin_and_valdemoro_on_hartree_fock() {
    let ham = to_spin_hamiltonian(&fixture("h4_1.8")).unwrap();
    let (basis, psi) = determinant_state(8, &ham.hf_occupation());
    let d1 = measure_rdm_packed(&basis, &psi, 1).as2();
    let d2 = measure_rdm_packed(&basis, &psi, 2).as4();
    let d3 = measure_rdm_packed(&basis, &psi, 3).as6();
    let d3v = valdemoro3(&d1, &d2).as6();
    for a in 4..8 {
        for i in 0..4 {
            assert!(residual_one_body(a, i, &ham.h1, &ham.v2, &d1, &d2).norm() < 1e-9, "single {a}<-{i}");
        }
    }
    for p in 0..8 {
        for q in 0..8 {
            for r in 0..8 {
                for s in 0..8 {
                    let e = residual_two_body(p, q, r, s, &ham.h1, &ham.v2, &d2, &d3);
                    let v = residual_two_body(p, q, r, s, &ham.h1, &ham.v2, &d2, &d3v);
                    assert!((e - v).norm() < 1e-9);
                }
            }
        }
    }
}
