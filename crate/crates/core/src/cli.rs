//! Command-line driver: single runs and curve scans, variant comparisons and
//! resource reports. All output is CSV plus plain-text traces.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;

use crate::adapt::{
    count_unrestricted_pool, measurement_cost, sector_of, AdaptConfig, AnsatzTrace, Criterion, PenaltyMode,
    Variant,
};
use crate::error::{Error, Result};
use crate::fixtures::load_fixture;
use crate::integrals::{to_spin_hamiltonian, MolecularIntegrals, SpinHamiltonian};
use crate::operators::{build_pool, PoolKind};
use crate::spectra::{
    fci_solve, fci_solve_spin, homo_lumo_references, npe, run_vqd, Reference, Sector, VqdConfig, HARTREE_TO_KCAL,
};
use crate::statevector::State;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_STALL: i32 = 2;

pub const SUMMARY_COLUMNS: [&str; 12] = [
    "R", "variant", "N_u", "N_m", "E", "E_FCI", "error_mHa", "N_s", "N_k", "variance", "ham_terms", "residual_terms",
];

#[derive(Parser, Debug)]
#[command(name = "adapt-rdm", version, about = "ADAPT-VQE family simulator with an FCI oracle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one variant over a geometry grid.
    Run(RunArgs),
    /// Run several variants on the same grid.
    Compare(CompareArgs),
    /// Measurement-cost report and scaling fit.
    Resources(ResourceArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// TOML run file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Bundled system name (h2, h4, h6, n2).
    #[arg(long)]
    pub system: Option<String>,
    /// Explicit integral file(s) instead of a bundled system.
    #[arg(long)]
    pub fcidump: Vec<PathBuf>,
    /// Single bond length in Angstrom.
    #[arg(long)]
    pub r: Option<f64>,
    /// Bond lengths: `start:stop:step` or a comma list.
    #[arg(long = "r-grid")]
    pub r_grid: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// 0 for the ground state, k for the k-th excited state of the same spin.
    #[arg(long = "target-root")]
    pub target_root: Option<usize>,
    /// Excited-state references separated by `;`, e.g. `2->3;2->4` or `0,1,2,5`.
    #[arg(long)]
    pub refs: Option<String>,
    /// Deflate with exact FCI states instead of the variational lower roots.
    #[arg(long = "exact-deflation")]
    pub exact_deflation: bool,
    #[arg(long = "penalty-mode")]
    pub penalty_mode: Option<String>,
    /// `spin-adapted` or `unrestricted`.
    #[arg(long)]
    pub pool: Option<String>,
    /// `variance` or `residual-norm`.
    #[arg(long)]
    pub criterion: Option<String>,
    #[arg(long = "max-iterations")]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub nu: Option<usize>,
    #[arg(long)]
    pub nm: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma list of `variant[:N_u[:N_m]]`, e.g. `adapt,adapt_v:30,adapt_vx:10:30`.
    #[arg(long)]
    pub variants: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ResourceArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long)]
    pub fcidump: Vec<PathBuf>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Spin-orbital counts for the scaling fit.
    #[arg(long, value_delimiter = ',', default_value = "8,12,16,20")]
    pub sweep: Vec<usize>,
    #[arg(long)]
    pub nm: Option<usize>,
    /// Also run each variant on the given system to report `N_s` and `N_k`.
    #[arg(long)]
    pub runs: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Declarative run file; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub system: Option<String>,
    pub fcidump: Option<Vec<PathBuf>>,
    pub r: Option<f64>,
    pub r_grid: Option<String>,
    pub variant: Option<String>,
    pub variants: Option<String>,
    pub nu: Option<usize>,
    pub nm: Option<usize>,
    pub eps: Option<f64>,
    pub target_root: Option<usize>,
    pub refs: Option<String>,
    pub exact_deflation: Option<bool>,
    pub penalty_mode: Option<String>,
    pub pool: Option<String>,
    pub criterion: Option<String>,
    pub max_iterations: Option<usize>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    /// Reserved; every algorithm here is deterministic.
    pub seed: Option<u64>,
}

fn read_run_file(path: &Option<PathBuf>) -> Result<RunFile> {
    match path {
        None => Ok(RunFile::default()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

/// Parse `start:stop:step` or `a,b,c`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot parse geometry grid `{text}`"));
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if text.contains(':') {
        let parts: Vec<f64> =
            text.split(':').map(|t| t.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        let [start, stop, step] = parts[..] else { return Err(bad()) };
        if !(step > 0.0) {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor();
        if n < 0.0 {
            return Ok(Vec::new());
        }
        return Ok((0..=n as usize).map(|i| ((start + i as f64 * step) * 1e6).round() / 1e6).collect());
    }
    text.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect()
}

/// One geometry: its label and integrals.
struct Point {
    r: f64,
    ham: SpinHamiltonian,
}

fn r_from_name(path: &Path) -> Option<f64> {
    let stem = path.file_stem()?.to_str()?;
    stem.rsplit('_').next()?.parse().ok()
}

fn load_points(system: Option<&str>, files: &[PathBuf], grid: &[f64]) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    if !files.is_empty() {
        for (i, f) in files.iter().enumerate() {
            let mi = MolecularIntegrals::from_file(f)?;
            let r = if files.len() == 1 && grid.len() == 1 {
                grid[0]
            } else {
                r_from_name(f).unwrap_or(i as f64)
            };
            out.push(Point { r, ham: to_spin_hamiltonian(&mi)? });
        }
        return Ok(out);
    }
    let system = system.ok_or_else(|| Error::Config("either --system or --fcidump is required".into()))?;
    for &r in grid {
        out.push(Point { r, ham: to_spin_hamiltonian(&load_fixture(system, r)?)? });
    }
    Ok(out)
}

/// Fully merged settings of a run or comparison.
#[derive(Debug, Clone)]
struct Settings {
    system: Option<String>,
    fcidump: Vec<PathBuf>,
    grid: Vec<f64>,
    base: AdaptConfig,
    target_root: usize,
    refs: Option<Vec<Reference>>,
    exact_deflation: bool,
    penalty_mode: PenaltyMode,
    jobs: usize,
    out: PathBuf,
}

fn merge_common(c: &CommonArgs, file: &RunFile) -> Result<Settings> {
    let system = c.system.clone().or(file.system.clone());
    let fcidump = if c.fcidump.is_empty() { file.fcidump.clone().unwrap_or_default() } else { c.fcidump.clone() };
    let grid = match (c.r, &c.r_grid, file.r, &file.r_grid) {
        (Some(r), _, _, _) => vec![r],
        (None, Some(g), _, _) => parse_grid(g)?,
        (None, None, Some(r), _) => vec![r],
        (None, None, None, Some(g)) => parse_grid(g)?,
        (None, None, None, None) if !fcidump.is_empty() => Vec::new(),
        _ => return Err(Error::Config("no geometry given (--r or --r-grid)".into())),
    };
    if grid.is_empty() && fcidump.is_empty() {
        return Err(Error::Config("the geometry grid is empty".into()));
    }
    let pool_kind = match c.pool.clone().or(file.pool.clone()) {
        Some(p) => p.parse::<PoolKind>().map_err(Error::Config)?,
        None => PoolKind::SpinAdaptedGsd,
    };
    let criterion = match c.criterion.clone().or(file.criterion.clone()).as_deref() {
        None | Some("variance") => Criterion::Variance,
        Some("residual-norm") | Some("residual_norm") => Criterion::ResidualNorm,
        Some(other) => return Err(Error::Config(format!("unknown criterion `{other}`"))),
    };
    let defaults = AdaptConfig::default();
    let base = AdaptConfig {
        epsilon: c.eps.or(file.eps).unwrap_or(defaults.epsilon),
        criterion,
        max_iterations: c.max_iterations.or(file.max_iterations).unwrap_or(defaults.max_iterations),
        pool_kind,
        ..defaults
    };
    let refs = match c.refs.clone().or(file.refs.clone()) {
        Some(s) => Some(s.split(';').filter(|t| !t.trim().is_empty()).map(|t| t.parse()).collect::<Result<Vec<_>>>()?),
        None => None,
    };
    let penalty_mode = match c.penalty_mode.clone().or(file.penalty_mode.clone()) {
        Some(m) => m.parse()?,
        None => PenaltyMode::Penalty,
    };
    let jobs = c.jobs.or(file.jobs).unwrap_or(1).max(1);
    Ok(Settings {
        system,
        fcidump,
        grid,
        base,
        target_root: c.target_root.or(file.target_root).unwrap_or(0),
        refs,
        exact_deflation: c.exact_deflation || file.exact_deflation.unwrap_or(false),
        penalty_mode,
        jobs,
        out: c.out.clone().or(file.out.clone()).unwrap_or_else(|| PathBuf::from("out")),
    })
}

/// `variant[:N_u[:N_m]]`
pub fn parse_variant_spec(text: &str) -> Result<(Variant, usize, Option<usize>)> {
    let mut parts = text.trim().split(':');
    let variant: Variant = parts.next().unwrap_or("").parse()?;
    let bad = || Error::Config(format!("cannot parse variant spec `{text}`"));
    let nu = parts.next().map(|t| t.parse().map_err(|_| bad())).transpose()?.unwrap_or(1);
    let nm = parts.next().map(|t| t.parse().map_err(|_| bad())).transpose()?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((variant, nu, nm))
}

/// Result of one (geometry, variant) job.
#[derive(Debug, Clone)]
pub struct Row {
    pub r: f64,
    pub label: String,
    pub variant: Variant,
    pub n_update: usize,
    pub n_aux: usize,
    pub energy: f64,
    pub e_fci: f64,
    pub n_parameters: usize,
    pub n_iterations: usize,
    pub variance: f64,
    pub ham_terms: usize,
    pub residual_terms: usize,
    pub converged: bool,
    pub convergence: String,
    pub trace: String,
}

impl Row {
    pub fn error_mha(&self) -> f64 {
        (self.energy - self.e_fci) * 1e3
    }

    fn summary_record(&self) -> Vec<String> {
        vec![
            format!("{}", self.r),
            self.variant.to_string(),
            self.n_update.to_string(),
            self.n_aux.to_string(),
            format!("{:.10}", self.energy),
            format!("{:.10}", self.e_fci),
            format!("{:.6e}", self.error_mha()),
            self.n_parameters.to_string(),
            self.n_iterations.to_string(),
            format!("{:.6e}", self.variance),
            self.ham_terms.to_string(),
            self.residual_terms.to_string(),
        ]
    }
}

fn label_of(variant: Variant, nu: usize, nm: usize) -> String {
    match variant {
        Variant::AdaptVx => format!("{variant}({nm},{nu})"),
        _ => format!("{variant}({nu})"),
    }
}

fn references_for(settings: &Settings, ham: &SpinHamiltonian) -> Vec<Reference> {
    settings.refs.clone().unwrap_or_else(|| homo_lumo_references(ham, 1))
}

/// Target-root energy from the FCI oracle, matched to the pool's spin behaviour.
fn fci_reference(ham: &SpinHamiltonian, cfg: &AdaptConfig, root: usize) -> Result<(f64, Vec<State>)> {
    let occ = cfg.reference.clone().unwrap_or_else(|| ham.hf_occupation());
    let (na, nb) = sector_of(&occ);
    let sector = Sector { n_alpha: na, n_beta: nb };
    let sol = match cfg.pool_kind {
        PoolKind::SpinAdaptedGsd if na == nb => fci_solve_spin(ham, sector, root + 1, 0.0)?,
        _ => fci_solve(ham, sector, root + 1)?,
    };
    Ok((sol.energies[root], sol.states))
}

fn run_point(point: &Point, cfg: &AdaptConfig, settings: &Settings) -> Result<Row> {
    let ham = &point.ham;
    let pool = build_pool(ham.n_spin_orbitals / 2, cfg.pool_kind);
    let (e_fci, fci_states) = fci_reference(ham, cfg, settings.target_root)?;
    let mut trace_text = String::new();
    let trace: AnsatzTrace = if settings.target_root == 0 {
        crate::adapt::run_adapt(cfg, ham, &pool)?
    } else {
        let mut deflate: Vec<State> = Vec::new();
        let ground = crate::adapt::run_adapt(cfg, ham, &pool)?;
        trace_text.push_str("## root 0\n");
        trace_text.push_str(&ground.render());
        deflate.push(if settings.exact_deflation { fci_states[0].clone() } else { ground.state.clone() });
        let mut last = ground;
        for root in 1..=settings.target_root {
            let mut vcfg = VqdConfig::new(deflate.clone(), references_for(settings, ham));
            vcfg.penalty_mode = settings.penalty_mode;
            vcfg.epsilon = cfg.epsilon;
            let res = run_vqd(&vcfg, cfg, ham, &pool)?;
            trace_text.push_str(&format!("## root {root} reference {}\n", res.best_reference));
            for (r, t) in &res.candidates {
                match t {
                    Ok(t) => trace_text.push_str(&format!("# candidate {r}: E {:.10} ({})\n", t.energy, t.convergence)),
                    Err(e) => trace_text.push_str(&format!("# candidate {r}: failed: {e}\n")),
                }
            }
            deflate.push(if settings.exact_deflation { fci_states[root].clone() } else { res.best.state.clone() });
            last = res.best;
        }
        last
    };
    trace_text.push_str(&trace.render());
    let cost = measurement_cost(cfg, ham.n_spin_orbitals, pool.len(), Some(&trace));
    Ok(Row {
        r: point.r,
        label: label_of(cfg.variant, cfg.n_update, cfg.n_aux()),
        variant: cfg.variant,
        n_update: cfg.n_update,
        n_aux: if cfg.variant == Variant::AdaptVx { cfg.n_aux() } else { 0 },
        energy: trace.energy,
        e_fci,
        n_parameters: trace.n_parameters(),
        n_iterations: trace.n_iterations(),
        variance: trace.variance,
        ham_terms: cost.ham_terms,
        residual_terms: cost.residual_terms,
        converged: trace.convergence.converged(),
        convergence: trace.convergence.to_string(),
        trace: trace_text,
    })
}

/// Run every (point, config) pair on a pool of `jobs` workers; rows come back
/// sorted by `(R, variant label)`.
pub fn run_jobs(points: &[(f64, SpinHamiltonian)], configs: &[AdaptConfig], jobs: usize) -> Result<Vec<Row>> {
    let settings = Settings {
        system: None,
        fcidump: Vec::new(),
        grid: Vec::new(),
        base: AdaptConfig::default(),
        target_root: 0,
        refs: None,
        exact_deflation: false,
        penalty_mode: PenaltyMode::Penalty,
        jobs,
        out: PathBuf::new(),
    };
    let points: Vec<Point> = points.iter().map(|(r, h)| Point { r: *r, ham: h.clone() }).collect();
    execute(&points, configs, &settings)
}

fn execute(points: &[Point], configs: &[AdaptConfig], settings: &Settings) -> Result<Vec<Row>> {
    let tasks: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| (0..configs.len()).map(move |c| (p, c))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<Row>> =
        pool.install(|| tasks.par_iter().map(|&(p, c)| run_point(&points[p], &configs[c], settings)).collect());
    let mut rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.r.total_cmp(&b.r).then_with(|| a.label.cmp(&b.label)));
    Ok(rows)
}

fn write_summary(path: &Path, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Config(e.to_string()))?;
    w.write_record(SUMMARY_COLUMNS).map_err(|e| Error::Config(e.to_string()))?;
    for row in rows {
        w.write_record(row.summary_record()).map_err(|e| Error::Config(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn r_tag(r: f64) -> String {
    format!("{r}")
}

fn cmd_run(args: &RunArgs) -> Result<i32> {
    let file = read_run_file(&args.common.config)?;
    let settings = merge_common(&args.common, &file)?;
    let variant: Variant = args.variant.clone().or(file.variant.clone()).unwrap_or_else(|| "adapt".into()).parse()?;
    let cfg = AdaptConfig {
        variant,
        n_update: args.nu.or(file.nu).unwrap_or(1),
        n_aux: args.nm.or(file.nm),
        ..settings.base.clone()
    };
    cfg.validate()?;
    let points = load_points(settings.system.as_deref(), &settings.fcidump, &settings.grid)?;
    let rows = execute(&points, std::slice::from_ref(&cfg), &settings)?;
    fs::create_dir_all(&settings.out)?;
    for row in &rows {
        fs::write(settings.out.join(format!("trace_{}.log", r_tag(row.r))), &row.trace)?;
    }
    write_summary(&settings.out.join("summary.csv"), &rows)?;
    for row in &rows {
        println!(
            "R={} {} E={:.10} E_FCI={:.10} error={:.4e} mHa N_s={} N_k={} ({})",
            row.r,
            row.label,
            row.energy,
            row.e_fci,
            row.error_mha(),
            row.n_parameters,
            row.n_iterations,
            row.convergence
        );
    }
    Ok(if rows.iter().all(|r| r.converged) { EXIT_OK } else { EXIT_STALL })
}

fn cmd_compare(args: &CompareArgs) -> Result<i32> {
    let file = read_run_file(&args.common.config)?;
    let settings = merge_common(&args.common, &file)?;
    let spec = args
        .variants
        .clone()
        .or(file.variants.clone())
        .unwrap_or_else(|| "adapt_v:30,adapt_v:10,adapt_vx:10:30,adapt".into());
    let mut configs = Vec::new();
    for item in spec.split(',').filter(|t| !t.trim().is_empty()) {
        let (variant, nu, nm) = parse_variant_spec(item)?;
        let cfg = AdaptConfig { variant, n_update: nu, n_aux: nm, ..settings.base.clone() };
        cfg.validate()?;
        configs.push(cfg);
    }
    if configs.is_empty() {
        return Err(Error::Config("no variants to compare".into()));
    }
    let points = load_points(settings.system.as_deref(), &settings.fcidump, &settings.grid)?;
    let rows = execute(&points, &configs, &settings)?;
    fs::create_dir_all(&settings.out)?;
    let mut w = csv::Writer::from_path(settings.out.join("compare.csv")).map_err(|e| Error::Config(e.to_string()))?;
    let header = ["label", "R", "variant", "N_u", "N_m", "E", "E_FCI", "error_mHa", "error_kcal", "N_s", "N_k", "variance", "convergence"];
    w.write_record(header).map_err(|e| Error::Config(e.to_string()))?;
    for row in &rows {
        let err_kcal = (row.energy - row.e_fci) * HARTREE_TO_KCAL;
        w.write_record([
            row.label.clone(),
            format!("{}", row.r),
            row.variant.to_string(),
            row.n_update.to_string(),
            row.n_aux.to_string(),
            format!("{:.10}", row.energy),
            format!("{:.10}", row.e_fci),
            format!("{:.6e}", row.error_mha()),
            format!("{:.6e}", err_kcal),
            row.n_parameters.to_string(),
            row.n_iterations.to_string(),
            format!("{:.6e}", row.variance),
            row.convergence.clone(),
        ])
        .map_err(|e| Error::Config(e.to_string()))?;
        fs::write(settings.out.join(format!("trace_{}_{}.log", row.label, r_tag(row.r))), &row.trace)?;
    }
    w.flush()?;
    let mut labels: Vec<String> = rows.iter().map(|r| r.label.clone()).collect();
    labels.sort();
    labels.dedup();
    let mut npe_csv = String::from("label,NPE_kcal,max_abs_error_kcal\n");
    for label in &labels {
        let errs: Vec<f64> =
            rows.iter().filter(|r| &r.label == label).map(|r| (r.energy - r.e_fci) * HARTREE_TO_KCAL).collect();
        let value = npe(&errs)?;
        let max_abs = errs.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        npe_csv.push_str(&format!("{label},{value:.6},{max_abs:.6}\n"));
        println!("{label}: NPE {value:.4} kcal/mol, max |error| {max_abs:.4} kcal/mol");
    }
    fs::write(settings.out.join("npe.csv"), npe_csv)?;
    Ok(if rows.iter().all(|r| r.converged) { EXIT_OK } else { EXIT_STALL })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

const RESOURCE_VARIANTS: [Variant; 4] = [Variant::Adapt, Variant::AdaptRdm, Variant::AdaptV, Variant::AdaptVx];

/// Resource rows `(N, variant, ham_terms, residual_terms)` and per-variant slopes.
pub fn resource_sweep(sweep: &[usize], n_aux: Option<usize>) -> (Vec<(usize, Variant, usize, usize)>, Vec<(Variant, f64)>) {
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for v in RESOURCE_VARIANTS {
        let cfg = AdaptConfig { variant: v, n_aux, ..Default::default() };
        let mut ys = Vec::new();
        for &n in sweep {
            let c = measurement_cost(&cfg, n, count_unrestricted_pool(n), None);
            rows.push((n, v, c.ham_terms, c.residual_terms));
            ys.push(c.residual_terms as f64);
        }
        let xs: Vec<f64> = sweep.iter().map(|&n| n as f64).collect();
        slopes.push((v, loglog_slope(&xs, &ys)));
    }
    (rows, slopes)
}

fn cmd_resources(args: &ResourceArgs) -> Result<i32> {
    let file = read_run_file(&args.config)?;
    if args.sweep.len() < 2 || args.sweep.iter().any(|&n| n < 2) {
        return Err(Error::Config("the sweep needs at least two sizes of 2 or more spin orbitals".into()));
    }
    let n_aux = args.nm.or(file.nm);
    let (rows, slopes) = resource_sweep(&args.sweep, n_aux);
    let mut text = String::from("N,variant,pool_size,ham_terms,residual_terms\n");
    for (n, v, h, r) in &rows {
        text.push_str(&format!("{n},{v},{},{h},{r}\n", count_unrestricted_pool(*n)));
    }
    let mut slope_text = String::from("variant,slope\n");
    for (v, s) in &slopes {
        slope_text.push_str(&format!("{v},{s:.4}\n"));
        println!("{v}: residual term count ~ N^{s:.2}");
    }
    let system = args.system.clone().or(file.system.clone());
    let mut system_text = String::new();
    if system.is_some() || !args.fcidump.is_empty() {
        let grid = vec![args.r.or(file.r).unwrap_or(1.0)];
        let points = load_points(system.as_deref(), &args.fcidump, &grid)?;
        system_text.push_str("R,variant,N,pool_size,ham_terms,residual_terms,N_s,N_k\n");
        for p in &points {
            let n = p.ham.n_spin_orbitals;
            let pool = build_pool(n / 2, PoolKind::SpinAdaptedGsd);
            for v in RESOURCE_VARIANTS {
                let cfg = AdaptConfig { variant: v, n_aux, ..Default::default() };
                let trace = if args.runs { Some(crate::adapt::run_adapt(&cfg, &p.ham, &pool)?) } else { None };
                let c = measurement_cost(&cfg, n, pool.len(), trace.as_ref());
                let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
                system_text.push_str(&format!(
                    "{},{v},{n},{},{},{},{},{}\n",
                    p.r,
                    pool.len(),
                    c.ham_terms,
                    c.residual_terms,
                    opt(c.n_parameters),
                    opt(c.n_iterations)
                ));
            }
        }
    }
    let out = args.out.clone().or(file.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out)?;
    fs::write(out.join("resources.csv"), text)?;
    fs::write(out.join("scaling.csv"), slope_text)?;
    if !system_text.is_empty() {
        fs::write(out.join("system_resources.csv"), system_text)?;
    }
    Ok(EXIT_OK)
}

/// Entry point shared by the binary and tests; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Resources(a) => cmd_resources(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.5:0.8:0.1").unwrap(), vec![0.5, 0.6, 0.7, 0.8]);
        assert_eq!(parse_grid("1.5, 2.0").unwrap(), vec![1.5, 2.0]);
        assert!(parse_grid("").unwrap().is_empty());
        assert!(parse_grid("1:0:0.1").unwrap().is_empty());
        assert!(parse_grid("a:b").is_err());
    }

    #[test]
    fn variant_specs() {
        assert_eq!(parse_variant_spec("adapt").unwrap(), (Variant::Adapt, 1, None));
        assert_eq!(parse_variant_spec("adapt_vx:10:30").unwrap(), (Variant::AdaptVx, 10, Some(30)));
        assert!(parse_variant_spec("adapt:1:2:3").is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [2.0, 4.0, 8.0];
        let ys = [8.0, 64.0, 512.0];
        assert!((loglog_slope(&xs, &ys) - 3.0).abs() < 1e-12);
    }
}
