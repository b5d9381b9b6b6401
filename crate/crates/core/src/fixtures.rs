//! Bundled integral files, addressed by system name and bond length.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::integrals::MolecularIntegrals;

pub const FIXTURE_ENV: &str = "ADAPT_RDM_FIXTURES";

/// Fixture directory: `$ADAPT_RDM_FIXTURES`, else the repository's `fixtures/`.
pub fn fixture_dir() -> PathBuf {
    match std::env::var_os(FIXTURE_ENV) {
        Some(dir) => PathBuf::from(dir),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"),
    }
}

fn format_r(r: f64) -> String {
    let s = format!("{r:.4}");
    let s = s.trim_end_matches('0');
    if s.ends_with('.') {
        format!("{s}0")
    } else {
        s.to_string()
    }
}

pub fn fixture_path(system: &str, r: f64) -> PathBuf {
    fixture_dir().join(format!("{}_{}.fcidump", system.to_ascii_lowercase(), format_r(r)))
}

pub fn load_fixture(system: &str, r: f64) -> Result<MolecularIntegrals> {
    let path = fixture_path(system, r);
    if !path.exists() {
        return Err(Error::MissingFixture { system: system.to_string(), r });
    }
    MolecularIntegrals::from_file(path)
}

/// Bond lengths with a bundled fixture for `system`, ascending.
pub fn available_geometries(system: &str) -> Vec<f64> {
    let prefix = format!("{}_", system.to_ascii_lowercase());
    let mut out: Vec<f64> = std::fs::read_dir(fixture_dir())
        .into_iter()
        .flatten()
        .flatten()
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            name.strip_prefix(&prefix)?.strip_suffix(".fcidump")?.parse().ok()
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}
