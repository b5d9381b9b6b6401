//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Runs the full H6 and N2 potential-energy curves; expect tens of minutes on
//! a single core.

mod tolerances;

use std::process::Command;
use std::time::Instant;

use adapt_rdm::adapt::{run_adapt, AdaptConfig, AnsatzTrace, Convergence, Deflation, Engine, ThreeRdm, Variant};
use adapt_rdm::cli::resource_sweep;
use adapt_rdm::fixtures::{available_geometries, load_fixture};
use adapt_rdm::integrals::{to_spin_hamiltonian, SpinHamiltonian};
use adapt_rdm::operators::{build_pool, OperatorPool, PoolKind};
use adapt_rdm::optimizer::{AnsatzObjective, Objective};
use adapt_rdm::rdm::valdemoro3;
use adapt_rdm::spectra::{fci_solve_spin, homo_lumo_references, npe, run_vqd, Sector, VqdConfig, HARTREE_TO_KCAL};
use adapt_rdm::statevector::{apply_exp_generator, measure_rdm, measure_rdm_packed, prepare_reference, Basis, State};
use adapt_rdm::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tolerances::*;

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, lines: Vec::new() }
    }

    /// Record a sub-check.
    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

struct Suite {
    results: Vec<(String, bool)>,
}

impl Suite {
    fn run(&mut self, id: &str, title: &str, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let out = f();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("{verdict} [{id}] {title} ({:.1} s)", start.elapsed().as_secs_f64());
        for l in &out.lines {
            println!("       {l}");
        }
        self.results.push((format!("[{id}] {title}"), out.pass));
    }
}

fn hamiltonian(system: &str, r: f64) -> SpinHamiltonian {
    to_spin_hamiltonian(&load_fixture(system, r).unwrap()).unwrap()
}

fn spin_adapted_pool(ham: &SpinHamiltonian) -> OperatorPool {
    build_pool(ham.n_spin_orbitals / 2, PoolKind::SpinAdaptedGsd)
}

fn cfg(variant: Variant, n_update: usize, n_aux: Option<usize>) -> AdaptConfig {
    AdaptConfig { variant, n_update, n_aux, ..Default::default() }
}

fn label(c: &AdaptConfig) -> String {
    match c.variant {
        Variant::AdaptVx => format!("{}({},{})", c.variant, c.n_aux(), c.n_update),
        _ => format!("{}({})", c.variant, c.n_update),
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

struct CurvePoint {
    r: f64,
    e_fci: f64,
    trace: AnsatzTrace,
}

impl CurvePoint {
    fn error(&self) -> f64 {
        self.trace.energy - self.e_fci
    }
}

struct Curve {
    label: String,
    points: Vec<CurvePoint>,
}

impl Curve {
    fn npe_kcal(&self) -> f64 {
        let errs: Vec<f64> = self.points.iter().map(|p| p.error() * HARTREE_TO_KCAL).collect();
        npe(&errs).unwrap()
    }

    fn at(&self, r: f64) -> &CurvePoint {
        self.points.iter().find(|p| (p.r - r).abs() < 1e-9).unwrap()
    }
}

/// Ground-state curves of every config over all bundled geometries of `system`.
fn ground_curves(system: &str, configs: &[AdaptConfig]) -> Vec<Curve> {
    let mut curves: Vec<Curve> = configs.iter().map(|c| Curve { label: label(c), points: Vec::new() }).collect();
    for r in available_geometries(system) {
        let ham = hamiltonian(system, r);
        let pool = spin_adapted_pool(&ham);
        let e_fci = fci_solve_spin(&ham, Sector::of_hamiltonian(&ham), 1, 0.0).unwrap().energies[0];
        for (c, curve) in configs.iter().zip(curves.iter_mut()) {
            let trace = run_adapt(c, &ham, &pool).unwrap();
            curve.points.push(CurvePoint { r, e_fci, trace });
        }
    }
    curves
}

fn curve_lines(out: &mut Outcome, curves: &[Curve]) {
    for c in curves {
        let worst = c.points.iter().map(|p| (p.error() * HARTREE_TO_KCAL).abs()).fold(0.0, f64::max);
        let stalls = c.points.iter().filter(|p| !p.trace.convergence.converged()).count();
        out.lines.push(format!(
            "     {:<20} NPE {:.3} kcal/mol, max |error| {:.3} kcal/mol, {} of {} points not converged",
            c.label,
            c.npe_kcal(),
            worst,
            stalls,
            c.points.len()
        ));
    }
}

fn random_pool_state(engine: &Engine, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let reference = engine.determinant(&engine.ham.hf_occupation()).unwrap();
    let depth = rng.random_range(1..=10);
    let ops: Vec<usize> = (0..depth).map(|_| rng.random_range(0..engine.generators.len())).collect();
    let theta: Vec<f64> = (0..depth).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
    engine.ansatz_state(&reference, &ops, &theta)
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    let ham = hamiltonian("h4", 1.8);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for kind in [PoolKind::SpinAdaptedGsd, PoolKind::UnrestrictedGsd] {
        let pool = build_pool(4, kind);
        let engine = Engine::for_ground_state(&ham, &pool).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let psi = random_pool_state(&engine, &mut rng);
            let exact = engine.residuals_exact(&psi, &Deflation::none(), None);
            let rdm = engine.residuals_rdm(&psi, ThreeRdm::Exact, &Deflation::none(), None);
            worst = worst.max(max_abs_diff(&exact, &rdm));
        }
        out.check(
            worst < RESIDUAL_EQUIVALENCE,
            format!("H4 {kind:?} pool ({} elements), 200 states: max |dR| = {worst:.2e}", pool.len()),
        );
    }
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(6..=12);
        let n_el = rng.random_range(3..=5);
        let mut orbitals: Vec<usize> = (0..n).collect();
        orbitals.shuffle(&mut rng);
        let bits: u64 = orbitals[..n_el].iter().map(|&i| 1u64 << i).sum();
        let basis = Basis::from_states(n, vec![bits]);
        let psi = [Complex64::new(1.0, 0.0)];
        let d1 = measure_rdm_packed(&basis, &psi, 1).as2();
        let d2 = measure_rdm_packed(&basis, &psi, 2).as4();
        let d3 = measure_rdm_packed(&basis, &psi, 3);
        worst = worst.max(valdemoro3(&d1, &d2).max_abs_diff(&d3));
    }
    out.check(worst < VALDEMORO_DETERMINANT, format!("50 random determinants: max error {worst:.2e}"));

    let ham = hamiltonian("h4", 1.8);
    let fci = fci_solve_spin(&ham, Sector::of_hamiltonian(&ham), 1, 0.0).unwrap();
    let s = &fci.states[0];
    let rec = valdemoro3(&measure_rdm(s, 1).as2(), &measure_rdm(s, 2).as4());
    let err = rec.max_abs_diff(&measure_rdm(s, 3));
    out.check(err > VALDEMORO_CORRELATED_MIN, format!("H4 1.8 A FCI ground state: max error {err:.3e}"));
    out
}

fn criterion_3(h6: &[Curve]) -> Outcome {
    let mut out = Outcome::new();
    let p = h6.iter().find(|c| c.label == "adapt(1)").unwrap().at(1.5);
    let err = p.error() * 1e3;
    let ns = p.trace.n_parameters();
    out.check(
        err.abs() < H6_NU1_ERROR_MHA && (H6_NU1_PARAMS.0..=H6_NU1_PARAMS.1).contains(&ns),
        format!("N_u=1: error {err:.3e} mHa, N_s {ns}, N_k {}, {}", p.trace.n_iterations(), p.trace.convergence),
    );
    let ham = hamiltonian("h6", 1.5);
    let pool = spin_adapted_pool(&ham);
    let t = run_adapt(&cfg(Variant::Adapt, 50, None), &ham, &pool).unwrap();
    let err = (t.energy - p.e_fci) * 1e3;
    out.check(
        err.abs() < H6_NU50_ERROR_MHA && t.n_iterations() <= H6_NU50_MAX_ITERATIONS,
        format!("N_u=50: error {err:.3e} mHa, N_s {}, N_k {}, {}", t.n_parameters(), t.n_iterations(), t.convergence),
    );
    out
}

fn criterion_4(h6: &[Curve]) -> Outcome {
    let mut out = Outcome::new();
    let ham = hamiltonian("h6", 1.5);
    let pool = spin_adapted_pool(&ham);
    let e_fci = h6[0].at(1.5).e_fci;
    let t = run_adapt(&cfg(Variant::AdaptV, 1, None), &ham, &pool).unwrap();
    let err = (t.energy - e_fci) * 1e3;
    out.check(
        t.convergence == Convergence::EnergyStall && err > V1_STALL_MIN_ERROR_MHA,
        format!("adapt_v(1): {} with error {err:.3} mHa after {} parameters", t.convergence, t.n_parameters()),
    );
    let p = h6.iter().find(|c| c.label == "adapt_v(30)").unwrap().at(1.5);
    let err = p.error() * 1e3;
    out.check(
        p.trace.convergence.converged() && err.abs() < V30_ERROR_MHA,
        format!("adapt_v(30): {} with error {err:.3e} mHa, N_s {}", p.trace.convergence, p.trace.n_parameters()),
    );
    out
}

fn npe_check(out: &mut Outcome, curves: &[Curve], name: &str, lo: f64, hi: f64) {
    let c = curves.iter().find(|c| c.label == name).unwrap();
    let v = c.npe_kcal();
    out.check(v > lo && v < hi, format!("{name}: NPE {v:.3} kcal/mol, band ({lo}, {hi})"));
}

fn criterion_5(h6: &[Curve], n2: &[Curve]) -> Outcome {
    let mut out = Outcome::new();
    out.lines.push("H6 S0".into());
    for name in ["adapt(1)", "adapt_v(30)", "adapt_vx(30,10)"] {
        npe_check(&mut out, h6, name, f64::NEG_INFINITY, NPE_GOOD_KCAL);
    }
    npe_check(&mut out, h6, "adapt_v(10)", H6_V10_NPE_MIN_KCAL, f64::INFINITY);
    curve_lines(&mut out, h6);
    out.lines.push("N2 S0".into());
    for name in ["adapt(1)", "adapt_v(30)", "adapt_vx(30,10)"] {
        npe_check(&mut out, n2, name, f64::NEG_INFINITY, NPE_GOOD_KCAL);
    }
    npe_check(&mut out, n2, "adapt_v(10)", N2_V10_NPE_KCAL.0, N2_V10_NPE_KCAL.1);
    curve_lines(&mut out, n2);
    out
}

fn criterion_6(excited: &mut Vec<Curve>) -> Outcome {
    let mut out = Outcome::new();
    let ham = hamiltonian("h4", 1.8);
    let pool = spin_adapted_pool(&ham);
    let fci = fci_solve_spin(&ham, Sector::of_hamiltonian(&ham), 2, 0.0).unwrap();
    let mut vcfg = VqdConfig::new(vec![fci.states[0].clone()], homo_lumo_references(&ham, 1));
    vcfg.epsilon = EXCITED_EPSILON;
    let res = run_vqd(&vcfg, &AdaptConfig::default(), &ham, &pool).unwrap();
    let err = res.best.energy - fci.energies[1];
    out.check(
        err.abs() < H4_S1_ERROR,
        format!("H4 1.8 A S1: error {err:.2e} Ha from {}, overlap with S0 {:.1e}", res.best_reference, res.overlaps[0]),
    );

    let configs = [cfg(Variant::Adapt, 1, None), cfg(Variant::AdaptVx, 10, Some(30))];
    let mut curves: Vec<Curve> = configs.iter().map(|c| Curve { label: label(c), points: Vec::new() }).collect();
    for r in available_geometries("h6") {
        let ham = hamiltonian("h6", r);
        let pool = spin_adapted_pool(&ham);
        let fci = fci_solve_spin(&ham, Sector::of_hamiltonian(&ham), 2, 0.0).unwrap();
        let vcfg = VqdConfig::new(vec![fci.states[0].clone()], homo_lumo_references(&ham, 1));
        for (c, curve) in configs.iter().zip(curves.iter_mut()) {
            let res = run_vqd(&vcfg, c, &ham, &pool).unwrap();
            curve.points.push(CurvePoint { r, e_fci: fci.energies[1], trace: res.best });
        }
    }
    out.lines.push("H6 S1 (references HOMO->LUMO, HOMO->LUMO+1)".into());
    for c in &curves {
        let v = c.npe_kcal();
        out.check(v < H6_S1_NPE_KCAL, format!("{}: NPE {v:.3} kcal/mol", c.label));
        let below = c.points.iter().filter(|p| p.error() < -1e-6).count();
        out.check(below == 0, format!("{}: {below} points below the FCI root", c.label));
    }
    curve_lines(&mut out, &curves);
    excited.extend(curves);
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let (_, slopes) = resource_sweep(&[8, 12, 16, 20], None);
    for (name, want) in SLOPES {
        let got = slopes.iter().find(|(v, _)| v.name() == name).unwrap().1;
        out.check((got - want).abs() <= SLOPE_BAND, format!("{name}: slope {got:.3}, expected {want} +- {SLOPE_BAND}"));
    }
    out
}

fn gradient_check(out: &mut Outcome) {
    let ham = hamiltonian("h4", 1.8);
    let pool = spin_adapted_pool(&ham);
    let engine = Engine::for_ground_state(&ham, &pool).unwrap();
    let reference = engine.determinant(&ham.hf_occupation()).unwrap();
    let apply = |x: &[f64]| engine.h_op.apply(x);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let depth = rng.random_range(1..=8);
        let ops: Vec<usize> = (0..depth).map(|_| rng.random_range(0..pool.len())).collect();
        let theta: Vec<f64> = (0..depth).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
        let obj = AnsatzObjective {
            reference: &reference,
            generators: ops.iter().map(|&u| &engine.generators[u]).collect(),
            apply_observable: &apply,
        };
        let (_, g) = obj.value_and_gradient(&theta);
        for k in 0..depth {
            let mut a = theta.clone();
            let mut b = theta.clone();
            a[k] += GRADIENT_FD_STEP;
            b[k] -= GRADIENT_FD_STEP;
            let fd = (obj.value(&a) - obj.value(&b)) / (2.0 * GRADIENT_FD_STEP);
            worst = worst.max((fd - g[k]).abs());
        }
    }
    out.check(worst < GRADIENT_FD, format!("gradient vs central differences: max deviation {worst:.2e}"));
}

fn unitarity_check(out: &mut Outcome) {
    let pool = build_pool(4, PoolKind::UnrestrictedGsd);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut s = prepare_reference(&[0, 1, 2, 3], 8).unwrap();
    for _ in 0..1000 {
        let e = &pool.elements[rng.random_range(0..pool.len())];
        s = apply_exp_generator(&s, &e.qubit_generator, 4.0 * rng.random::<f64>() - 2.0).unwrap();
    }
    let drift = (s.norm() - 1.0).abs();
    out.check(drift < UNITARITY_DRIFT, format!("norm drift after 1000 exponentials: {drift:.2e}"));
}

fn rdm_check(out: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let n = 8;
    let mut worst: f64 = 0.0;
    let mut trace_err: f64 = 0.0;
    for _ in 0..20 {
        let n_el = rng.random_range(2..=5);
        let states: Vec<usize> = (0..1usize << n).filter(|b| b.count_ones() as usize == n_el).collect();
        let mut amps = vec![Complex64::default(); 1 << n];
        for &b in &states {
            amps[b] = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|c| *c /= norm);
        let s = State::from_amplitudes(n, amps).unwrap();
        let d2 = measure_rdm(&s, 2);
        worst = worst.max(d2.hermiticity_defect()).max(d2.antisymmetry_defect());
        trace_err = trace_err.max((d2.trace().re - (n_el * (n_el - 1) / 2) as f64).abs());
    }
    out.check(
        worst < RDM_SYMMETRY && trace_err < 1e-10,
        format!("2-RDM Hermiticity/antisymmetry defect {worst:.1e}, trace error {trace_err:.1e}"),
    );
}

fn monotone_check(out: &mut Outcome, curves: &[&Curve]) {
    let mut violations = 0;
    let mut traces = 0;
    for c in curves {
        for p in &c.points {
            traces += 1;
            let mut previous = p.trace.reference_energy;
            let mut n_params = 0;
            for rec in &p.trace.records {
                // excited roots are monotone in the deflated objective, not the energy
                let value = if c.label.starts_with("S1") { rec.objective } else { rec.energy };
                if value > previous + MONOTONE_SLACK || rec.n_parameters != n_params + rec.selected.len() {
                    violations += 1;
                }
                previous = value;
                n_params = rec.n_parameters;
            }
        }
    }
    out.check(violations == 0, format!("monotone outer energy and N_s growth over {traces} runs: {violations} violations"));
}

fn golden_check(out: &mut Outcome) {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let target = dir.path().join(sub);
        let status = Command::new(env!("CARGO_BIN_EXE_adapt-rdm"))
            .args(["run", "--system", "h4", "--r-grid", "1.8,1.0", "--variant", "adapt", "--out"])
            .arg(&target)
            .env("ADAPT_RDM_FIXTURES", adapt_rdm::fixtures::fixture_dir())
            .output()
            .unwrap()
            .status;
        (status.code(), std::fs::read_to_string(target.join("summary.csv")).unwrap_or_default())
    };
    let (ca, a) = run("a");
    let (cb, b) = run("b");
    let golden = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/summary_h4_adapt.csv")).unwrap();
    out.check(
        ca == Some(0) && cb == Some(0) && a == b && a == golden,
        "CLI summary byte-identical across runs and equal to the golden file".into(),
    );
}

fn criterion_8(curves: &[&Curve]) -> Outcome {
    let mut out = Outcome::new();
    gradient_check(&mut out);
    unitarity_check(&mut out);
    rdm_check(&mut out);
    monotone_check(&mut out, curves);
    golden_check(&mut out);
    out
}

fn soundness(curves: &[&Curve]) -> Outcome {
    let mut out = Outcome::new();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for c in curves {
        for p in &c.points {
            if p.trace.convergence == Convergence::Variance {
                checked += 1;
                worst = worst.max(p.error().abs() * 1e3);
            }
        }
    }
    for system in ["h2", "h4"] {
        for r in available_geometries(system) {
            let ham = hamiltonian(system, r);
            let pool = spin_adapted_pool(&ham);
            let t = run_adapt(&AdaptConfig::default(), &ham, &pool).unwrap();
            if t.convergence == Convergence::Variance {
                let e = fci_solve_spin(&ham, Sector::of_hamiltonian(&ham), 1, 0.0).unwrap().energies[0];
                checked += 1;
                worst = worst.max((t.energy - e).abs() * 1e3);
            }
        }
    }
    out.check(
        worst < SOUNDNESS_MHA,
        format!("{checked} variance-converged runs on all fixtures: max |E - E_FCI| = {worst:.3e} mHa"),
    );
    out
}

fn main() {
    // `cargo test -- <filter>` passes arguments; only a bare run or `acceptance` executes the suite
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let mut suite = Suite { results: Vec::new() };
    suite.run("1", "RDM residuals with exact 3-RDM equal commutator residuals", criterion_1);
    suite.run("2", "Valdemoro reconstruction exact on determinants only", criterion_2);
    suite.run("7", "measurement-count scaling slopes", criterion_7);

    let start = Instant::now();
    let s0 = [
        cfg(Variant::Adapt, 1, None),
        cfg(Variant::AdaptV, 30, None),
        cfg(Variant::AdaptVx, 10, Some(30)),
        cfg(Variant::AdaptV, 10, None),
    ];
    let h6 = ground_curves("h6", &s0);
    println!("(H6 S0 curves: {:.0} s)", start.elapsed().as_secs_f64());
    let start = Instant::now();
    let n2 = ground_curves("n2", &s0);
    println!("(N2 S0 curves: {:.0} s)", start.elapsed().as_secs_f64());

    suite.run("3", "H6 1.5 A adapt convergence bands", || criterion_3(&h6));
    suite.run("4", "H6 1.5 A adapt_v failure mode and recovery", || criterion_4(&h6));
    suite.run("5", "ground-state NPE bands on the H6 and N2 curves", || criterion_5(&h6, &n2));
    let mut excited = Vec::new();
    suite.run("6", "VQD first excited singlets", || criterion_6(&mut excited));
    for c in excited.iter_mut() {
        c.label = format!("S1 {}", c.label);
    }

    let all: Vec<&Curve> = h6.iter().chain(&n2).chain(&excited).collect();
    let ground: Vec<&Curve> = h6.iter().chain(&n2).collect();
    suite.run("8", "invariant suite", || criterion_8(&all));
    suite.run("8+", "variance-converged runs lie within 1 mHa of FCI", || soundness(&ground));

    let failed: Vec<&String> = suite.results.iter().filter(|(_, ok)| !ok).map(|(n, _)| n).collect();
    println!("\nacceptance: {} passed, {} failed", suite.results.len() - failed.len(), failed.len());
    if !failed.is_empty() {
        for f in &failed {
            println!("  failed: {f}");
        }
        std::process::exit(1);
    }
}
