//! Molecular integrals from FCIDUMP files and their spin-orbital Hamiltonian.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array2, Array4};

use crate::error::{Error, Result};
use crate::operators::{FermionOperator, Ladder};

/// Spatial-orbital integrals as read from an FCIDUMP file.
///
/// `eri_spatial` is stored in chemists' notation, `(ij|kl)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularIntegrals {
    pub n_spatial: usize,
    pub n_electrons: usize,
    pub ms2: i64,
    pub e_core: f64,
    pub h_spatial: Array2<f64>,
    pub eri_spatial: Array4<f64>,
}

impl MolecularIntegrals {
    pub fn zeros(n_spatial: usize, n_electrons: usize) -> Self {
        let n = n_spatial;
        Self {
            n_spatial,
            n_electrons,
            ms2: 0,
            e_core: 0.0,
            h_spatial: Array2::zeros((n, n)),
            eri_spatial: Array4::zeros((n, n, n, n)),
        }
    }

    /// Store `(ij|kl)` together with its seven real-orbital images.
    pub fn set_eri(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        for (a, b, c, d) in [
            (i, j, k, l),
            (j, i, k, l),
            (i, j, l, k),
            (j, i, l, k),
            (k, l, i, j),
            (l, k, i, j),
            (k, l, j, i),
            (l, k, j, i),
        ] {
            self.eri_spatial[[a, b, c, d]] = value;
        }
    }

    pub fn set_h(&mut self, i: usize, j: usize, value: f64) {
        self.h_spatial[[i, j]] = value;
        self.h_spatial[[j, i]] = value;
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        parse_fcidump(&std::fs::read_to_string(path)?)
    }

    /// Hartree-Fock energy of the closed-shell determinant built from the
    /// lowest `n_electrons / 2` spatial orbitals, evaluated directly from the
    /// spatial integrals. Includes `e_core`.
    pub fn closed_shell_energy(&self) -> f64 {
        let nocc = self.n_electrons / 2;
        let mut e = self.e_core;
        for i in 0..nocc {
            e += 2.0 * self.h_spatial[[i, i]];
            for j in 0..nocc {
                e += 2.0 * self.eri_spatial[[i, i, j, j]] - self.eri_spatial[[i, j, j, i]];
            }
        }
        e
    }
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    token
        .replace(['D', 'd'], "E")
        .parse::<f64>()
        .map_err(|_| Error::Parse { line, token: token.to_string() })
}

/// Parse a Molpro-style FCIDUMP document.
///
/// The namelist header ends at `&END` or `/`. ORBSYM and ISYM are read and
/// discarded. Records with only the first index set (orbital energies) are
/// skipped.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let mut header = String::new();
    let mut body_start = None;
    for (n, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        let upper = trimmed.to_ascii_uppercase();
        if let Some(pos) = upper.find("&END") {
            header.push_str(&trimmed[..pos]);
            body_start = Some(n + 1);
            break;
        }
        if upper == "/" || upper.ends_with('/') {
            header.push_str(trimmed.trim_end_matches('/'));
            body_start = Some(n + 1);
            break;
        }
        header.push_str(trimmed);
        header.push(' ');
    }
    let body_start =
        body_start.ok_or_else(|| Error::Format("namelist header is not terminated".into()))?;

    let mut norb = None;
    let mut nelec = None;
    let mut ms2 = 0i64;
    let spaced = header.replace(',', " ").replace('=', " = ");
    let tokens: Vec<&str> = spaced.split_whitespace().collect();
    let mut i = 0;
    while i < tokens.len() {
        if i + 1 < tokens.len() && tokens[i + 1] == "=" {
            let key = tokens[i].to_ascii_uppercase();
            let mut values = Vec::new();
            let mut j = i + 2;
            while j < tokens.len() && !(j + 1 < tokens.len() && tokens[j + 1] == "=") {
                values.push(tokens[j]);
                j += 1;
            }
            let first = || -> Result<i64> {
                values
                    .first()
                    .and_then(|v| v.parse::<i64>().ok())
                    .ok_or_else(|| Error::Format(format!("key {key} has no integer value")))
            };
            match key.as_str() {
                "NORB" => norb = Some(first()?),
                "NELEC" => nelec = Some(first()?),
                "MS2" => ms2 = first()?,
                _ => {}
            }
            i = j;
        } else {
            i += 1;
        }
    }
    let norb = norb.ok_or_else(|| Error::Format("missing key NORB".into()))?;
    let nelec = nelec.ok_or_else(|| Error::Format("missing key NELEC".into()))?;
    if norb < 0 || nelec < 0 {
        return Err(Error::Format("NORB and NELEC must be non-negative".into()));
    }
    let norb = norb as usize;
    let nelec = nelec as usize;
    if nelec > 2 * norb {
        return Err(Error::Format(format!("NELEC={nelec} exceeds 2*NORB={}", 2 * norb)));
    }

    let mut mi = MolecularIntegrals::zeros(norb, nelec);
    mi.ms2 = ms2;
    for (n, line) in text.lines().enumerate().skip(body_start) {
        let line_no = n + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(Error::Format(format!(
                "line {line_no}: expected `value i j k l`, found {} fields",
                fields.len()
            )));
        }
        let value = parse_value(fields[0], line_no)?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&fields[1..]) {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::Parse { line: line_no, token: tok.to_string() })?;
            if v < 0 || v > norb as i64 {
                return Err(Error::Index { line: line_no, index: v, norb });
            }
            *slot = v as usize;
        }
        match idx {
            [0, 0, 0, 0] => mi.e_core = value,
            [i, j, 0, 0] if i > 0 && j > 0 => mi.set_h(i - 1, j - 1, value),
            [_, 0, 0, 0] => {}
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                mi.set_eri(i - 1, j - 1, k - 1, l - 1, value)
            }
            _ => {
                return Err(Error::Format(format!(
                    "line {line_no}: unsupported index pattern {idx:?}"
                )))
            }
        }
    }
    Ok(mi)
}

/// Serialize to FCIDUMP, writing each symmetry-unique element once.
pub fn write_fcidump(mi: &MolecularIntegrals) -> String {
    let n = mi.n_spatial;
    let mut out = String::new();
    let _ = writeln!(out, " &FCI NORB={},NELEC={},MS2={},", n, mi.n_electrons, mi.ms2);
    let _ = writeln!(out, "  ORBSYM={}", vec!["1"; n].join(","));
    let _ = writeln!(out, "  ISYM=1,");
    let _ = writeln!(out, " &END");
    for i in 0..n {
        for j in 0..=i {
            let ij = i * (i + 1) / 2 + j;
            for k in 0..n {
                for l in 0..=k {
                    let kl = k * (k + 1) / 2 + l;
                    if kl > ij {
                        continue;
                    }
                    let v = mi.eri_spatial[[i, j, k, l]];
                    if v != 0.0 {
                        let _ = writeln!(out, " {v:e} {} {} {} {}", i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = mi.h_spatial[[i, j]];
            if v != 0.0 {
                let _ = writeln!(out, " {v:e} {} {} 0 0", i + 1, j + 1);
            }
        }
    }
    let _ = writeln!(out, " {:e} 0 0 0 0", mi.e_core);
    out
}

/// Spin-orbital Hamiltonian.
///
/// `v2[p][q][r][s]` is the antisymmetrized physicists' integral
/// `(<pq|rs> - <pq|sr>) / 2`, so that the two-body operator reads
/// `1/2 sum v2[p][q][r][s] a+_p a+_q a_s a_r`. `h2_reduced` folds the one-body
/// part in with weight `1/(N-1)`.
#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    pub n_spin_orbitals: usize,
    pub n_electrons: usize,
    pub h1: Array2<f64>,
    pub v2: Array4<f64>,
    pub h2_reduced: Array4<f64>,
    pub e_core: f64,
}

pub fn to_spin_hamiltonian(mi: &MolecularIntegrals) -> Result<SpinHamiltonian> {
    if mi.n_electrons < 2 {
        return Err(Error::ReducedHamiltonian(mi.n_electrons));
    }
    let n = 2 * mi.n_spatial;
    let mut h1 = Array2::zeros((n, n));
    for p in 0..n {
        for q in 0..n {
            if p % 2 == q % 2 {
                h1[[p, q]] = mi.h_spatial[[p / 2, q / 2]];
            }
        }
    }
    // <pq|rs> = (pr|qs) delta(sp, sr) delta(sq, ss)
    let phys = |p: usize, q: usize, r: usize, s: usize| -> f64 {
        if p % 2 == r % 2 && q % 2 == s % 2 {
            mi.eri_spatial[[p / 2, r / 2, q / 2, s / 2]]
        } else {
            0.0
        }
    };
    let mut v2 = Array4::zeros((n, n, n, n));
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    v2[[p, q, r, s]] = 0.5 * (phys(p, q, r, s) - phys(p, q, s, r));
                }
            }
        }
    }
    let scale = 1.0 / (mi.n_electrons as f64 - 1.0);
    let mut h2_reduced = v2.clone();
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let mut one = 0.0;
                    if q == s {
                        one += h1[[p, r]];
                    }
                    if p == r {
                        one += h1[[q, s]];
                    }
                    h2_reduced[[p, q, r, s]] += scale * one;
                }
            }
        }
    }
    Ok(SpinHamiltonian { n_spin_orbitals: n, n_electrons: mi.n_electrons, h1, v2, h2_reduced, e_core: mi.e_core })
}

impl SpinHamiltonian {
    /// Second-quantized electronic Hamiltonian (without `e_core`), normal ordered.
    pub fn fermion_operator(&self) -> FermionOperator {
        let n = self.n_spin_orbitals;
        let mut op = FermionOperator::zero();
        for p in 0..n {
            for q in 0..n {
                let h = self.h1[[p, q]];
                if h != 0.0 {
                    op.add_term(vec![Ladder::create(p), Ladder::annihilate(q)], h.into());
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                if p == q {
                    continue;
                }
                for r in 0..n {
                    for s in 0..n {
                        let v = self.v2[[p, q, r, s]];
                        if r == s || v == 0.0 {
                            continue;
                        }
                        op.add_term(
                            vec![
                                Ladder::create(p),
                                Ladder::create(q),
                                Ladder::annihilate(s),
                                Ladder::annihilate(r),
                            ],
                            (0.5 * v).into(),
                        );
                    }
                }
            }
        }
        op.compress();
        op
    }

    /// Occupation list of the Hartree-Fock determinant (lowest spin orbitals).
    pub fn hf_occupation(&self) -> Vec<usize> {
        (0..self.n_electrons).collect()
    }

    /// Energy of a single determinant from the spin-orbital tensors, `e_core` included.
    pub fn determinant_energy(&self, occupied: &[usize]) -> f64 {
        let mut e = self.e_core;
        for &i in occupied {
            e += self.h1[[i, i]];
            for &j in occupied {
                // 1/2 sum_ij <ij||ij> with v2 = <ij||ij>/2
                e += self.v2[[i, j, i, j]];
            }
        }
        e
    }

    /// Count of exactly-nonzero `v2` entries whose creation spins do not
    /// multiset-match the annihilation spins.
    pub fn spin_forbidden_count(&self) -> usize {
        let n = self.n_spin_orbitals;
        let mut count = 0;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let up = (p % 2) + (q % 2);
                        let down = (r % 2) + (s % 2);
                        if up != down && self.v2[[p, q, r, s]] != 0.0 {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_energy_only() {
        let mi = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,&END\n0.5 0 0 0 0\n").unwrap();
        assert_eq!(mi.n_spatial, 2);
        assert_eq!(mi.n_electrons, 2);
        assert_eq!(mi.e_core, 0.5);
        assert!(mi.h_spatial.iter().all(|&v| v == 0.0));
        assert!(mi.eri_spatial.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn one_body_record_is_symmetrized() {
        let mi = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,&END\n0.25 1 2 0 0\n").unwrap();
        assert_eq!(mi.h_spatial[[0, 1]], 0.25);
        assert_eq!(mi.h_spatial[[1, 0]], 0.25);
    }

    #[test]
    fn eri_record_gets_eightfold_images() {
        let mi = parse_fcidump(" &FCI NORB=3, NELEC=2,\n ORBSYM=1,1,1,\n ISYM=1\n /\n 0.1 1 2 3 1\n").unwrap();
        for (a, b, c, d) in [(0, 1, 2, 0), (1, 0, 2, 0), (0, 1, 0, 2), (2, 0, 0, 1), (0, 2, 1, 0)] {
            assert_eq!(mi.eri_spatial[[a, b, c, d]], 0.1);
        }
        assert_eq!(mi.eri_spatial[[0, 2, 1, 0]], 0.1);
        assert_eq!(mi.eri_spatial[[0, 0, 1, 2]], 0.0);
    }

    #[test]
    fn header_errors_name_missing_key() {
        let err = parse_fcidump("&FCI NELEC=2 &END\n").unwrap_err();
        assert!(err.to_string().contains("NORB"), "{err}");
        let err = parse_fcidump("&FCI NORB=2 &END\n").unwrap_err();
        assert!(err.to_string().contains("NELEC"), "{err}");
    }

    #[test]
    fn record_errors_carry_line_numbers() {
        let err = parse_fcidump("&FCI NORB=2,NELEC=2,&END\n0.1 1 1 0 0\n0.2 3 1 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Index { line: 3, index: 3, norb: 2 }), "{err}");
        let err = parse_fcidump("&FCI NORB=2,NELEC=2,&END\nabc 1 1 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_fcidump("&FCI NORB=2,NELEC=2,&END\n0.1 -1 1 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Index { line: 2, index: -1, .. }), "{err}");
    }

    #[test]
    fn fortran_exponents() {
        let mi = parse_fcidump("&FCI NORB=1,NELEC=2,&END\n-1.5D+00 1 1 0 0\n").unwrap();
        assert_eq!(mi.h_spatial[[0, 0]], -1.5);
    }

    #[test]
    fn diagonal_spin_lift() {
        let mut mi = MolecularIntegrals::zeros(1, 2);
        mi.set_h(0, 0, -1.0);
        let ham = to_spin_hamiltonian(&mi).unwrap();
        assert_eq!(ham.h1, ndarray::arr2(&[[-1.0, 0.0], [0.0, -1.0]]));
        assert!(ham.v2.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reduced_hamiltonian_needs_two_electrons() {
        let mi = MolecularIntegrals::zeros(2, 1);
        assert!(matches!(to_spin_hamiltonian(&mi), Err(Error::ReducedHamiltonian(1))));
    }

    #[test]
    fn two_electron_reduced_weight_is_one() {
        let mut mi = MolecularIntegrals::zeros(2, 2);
        mi.set_h(0, 0, -1.2);
        mi.set_h(0, 1, 0.3);
        mi.set_h(1, 1, -0.4);
        mi.set_eri(0, 0, 1, 1, 0.6);
        mi.set_eri(0, 1, 0, 1, 0.2);
        let ham = to_spin_hamiltonian(&mi).unwrap();
        let n = ham.n_spin_orbitals;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let mut one = 0.0;
                        if q == s {
                            one += ham.h1[[p, r]];
                        }
                        if p == r {
                            one += ham.h1[[q, s]];
                        }
                        assert_eq!(ham.h2_reduced[[p, q, r, s]] - ham.v2[[p, q, r, s]], one);
                    }
                }
            }
        }
    }
}
